// SPDX-License-Identifier: Apache-2.0

#ifndef FAB_MODULUS_HPP
#define FAB_MODULUS_HPP

#include <vector>

#include "fab/common.hpp"

namespace fab {

/// One word-sized prime limb of the RNS modulus chain, together with the
/// precomputed table for shift-and-add modular reduction and a 2N-th root
/// of unity for the negacyclic NTT.
struct Modulus {
    u64 q = 0;         ///< prime, q == 1 (mod 2N), fewer than 55 bits
    int log_q = 0;     ///< bit width of q
    int shifts = 6;    ///< bits folded per reduction step
    std::vector<u64> madd; ///< madd[i-1] = (i << log_q) mod q, i in [1, 2^shifts)
    u64 ntt_root = 0;  ///< primitive 2N-th root of unity mod q
    u64 ring_degree = 0; ///< N this root belongs to
    std::size_t index = 0; ///< position in the modulus chain

    Modulus() = default;
    Modulus(u64 prime, u64 N, int shift_bits = 6, std::size_t chain_index = 0);

    bool operator==(const Modulus& other) const { return q == other.q; }
};

/// Precompute table for folding the top `shifts` bits of a partial remainder:
/// entry i-1 equals (i * 2^log_q) mod q.
std::vector<u64> precompute_madd(u64 q, int log_q, int shifts);

/// Shift-and-add modular reduction. Accepts any a < 2^(2*log_q); the shift
/// loop keeps the high part within log_q bits so the fold index never
/// exceeds the table, and the closing sum needs at most three conditional
/// subtractions.
inline u64 mod_reduce(u128 a, const Modulus& m) {
    const int lq = m.log_q;
    const u64 mask = (lq == 64) ? ~u64(0) : ((u64(1) << lq) - 1);
    u64 hi = static_cast<u64>(a >> lq);
    u64 lo = static_cast<u64>(a) & mask;
    if (hi >= (u64(1) << lq)) throw contract_error("mod_reduce: input exceeds 2^(2 log q)");
    const u64 top = u64(1) << lq;
    for (int count = 0; count < lq; count += m.shifts) {
        const int s = count + m.shifts <= lq ? m.shifts : lq - count;
        const u64 shifted = hi << s;
        const u64 carry = shifted >> lq;
        hi = shifted & mask;
        if (carry) hi += m.madd[carry - 1];
        if (hi >= top) hi -= m.q;
    }
    u64 c = hi + lo;
    while (c >= m.q) c -= m.q;
    return c;
}

inline u64 mod_add(u64 a, u64 b, const Modulus& m) {
    u64 c = a + b;
    return c >= m.q ? c - m.q : c;
}

inline u64 mod_sub(u64 a, u64 b, const Modulus& m) {
    return a >= b ? a - b : a + m.q - b;
}

inline u64 mod_mul(u64 a, u64 b, const Modulus& m) {
    return mod_reduce(static_cast<u128>(a) * b, m);
}

inline u64 mod_neg(u64 a, const Modulus& m) { return a == 0 ? 0 : m.q - a; }

u64 mod_pow(u64 base, u64 exp, const Modulus& m);

inline u64 mod_inv(u64 a, const Modulus& m) { return mod_pow(a, m.q - 2, m); }

bool is_prime_u64(u64 n);

/// Generate `count` distinct primes of exactly `bit_width` bits with
/// q == 1 (mod 2N), scanning downward from 2^bit_width. Roots of unity are
/// derived deterministically from `seed`. Throws if the range is exhausted.
std::vector<Modulus> generate_modulus_chain(u64 N, std::size_t count, int bit_width,
                                            u64 seed = 1, int shifts = 6);

} // namespace fab

#endif
