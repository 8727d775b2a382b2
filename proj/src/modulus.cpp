// SPDX-License-Identifier: Apache-2.0

#include "fab/modulus.hpp"

namespace fab {

std::vector<u64> precompute_madd(u64 q, int log_q, int shifts) {
    FAB_REQUIRE(shifts >= 1 && shifts <= 8, "precompute_madd: shifts must be in [1, 8]");
    const std::size_t entries = (std::size_t(1) << shifts) - 1;
    std::vector<u64> table(entries);
    for (std::size_t i = 1; i <= entries; ++i) {
        // (i << log_q) mod q, accumulated bit by bit.
        u64 acc = 0;
        for (int j = 0; j < shifts; ++j) {
            if ((i >> j) & 1) {
                u128 term = (u128(1) << (log_q + j)) % q;
                acc = (acc + static_cast<u64>(term)) % q;
            }
        }
        table[i - 1] = acc;
    }
    return table;
}

u64 mod_pow(u64 base, u64 exp, const Modulus& m) {
    u64 result = 1;
    u64 b = base % m.q;
    while (exp > 0) {
        if (exp & 1) result = mod_mul(result, b, m);
        b = mod_mul(b, b, m);
        exp >>= 1;
    }
    return result;
}

namespace {

u64 mulmod_u128(u64 a, u64 b, u64 q) { return static_cast<u64>((u128(a) * b) % q); }

u64 powmod_u128(u64 base, u64 exp, u64 q) {
    u64 result = 1, b = base % q;
    while (exp > 0) {
        if (exp & 1) result = mulmod_u128(result, b, q);
        b = mulmod_u128(b, b, q);
        exp >>= 1;
    }
    return result;
}

/// Find a primitive 2N-th root of unity mod q (q == 1 mod 2N) by raising
/// deterministic candidates to the cofactor power and checking x^N == -1.
u64 find_2n_root(u64 q, u64 N, u64 seed) {
    const u64 cofactor = (q - 1) / (2 * N);
    u64 state = seed;
    for (int attempt = 0; attempt < 4096; ++attempt) {
        state = split_seed(state);
        u64 h = 2 + state % (q - 3);
        u64 cand = powmod_u128(h, cofactor, q);
        if (powmod_u128(cand, N, q) == q - 1) return cand;
    }
    throw fab_error("find_2n_root: no root found (is q = 1 mod 2N?)");
}

} // namespace

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    // Deterministic Miller-Rabin bases, valid for all 64-bit inputs.
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod_u128(a % n, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < r; ++i) {
            x = mulmod_u128(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

Modulus::Modulus(u64 prime, u64 N, int shift_bits, std::size_t chain_index) {
    FAB_REQUIRE(is_power_of_two(N), "Modulus: N must be a power of two");
    q = prime;
    log_q = 64 - __builtin_clzll(prime);
    FAB_REQUIRE(log_q <= 54, "Modulus: limb width exceeds 54 bits");
    FAB_REQUIRE(prime % (2 * N) == 1, "Modulus: q != 1 mod 2N");
    shifts = shift_bits;
    ring_degree = N;
    index = chain_index;
    madd = precompute_madd(q, log_q, shifts);
    ntt_root = find_2n_root(q, N, split_seed(prime ^ (N << 1)));
}

std::vector<Modulus> generate_modulus_chain(u64 N, std::size_t count, int bit_width,
                                            u64 seed, int shifts) {
    FAB_REQUIRE(is_power_of_two(N), "generate_modulus_chain: N must be a power of two");
    FAB_REQUIRE(bit_width >= 4 && bit_width <= 54, "generate_modulus_chain: bit width out of range");
    FAB_REQUIRE(count >= 1, "generate_modulus_chain: count must be positive");

    const u64 two_n = 2 * N;
    std::vector<Modulus> chain;
    chain.reserve(count);
    // Scan candidates q == 1 (mod 2N) downward from the top of the width.
    const u64 hi = (u64(1) << bit_width) - 1;
    const u64 lo = u64(1) << (bit_width - 1);
    for (u64 cand = hi - ((hi - 1) % two_n); cand > lo && chain.size() < count; cand -= two_n) {
        if (is_prime_u64(cand)) {
            chain.emplace_back(cand, N, shifts, chain.size());
            chain.back().ntt_root = find_2n_root(cand, N, derive_seed(seed, 0x726f6f74, chain.size()));
        }
    }
    if (chain.size() < count)
        throw fab_error("generate_modulus_chain: not enough primes of the requested width");
    return chain;
}

} // namespace fab
