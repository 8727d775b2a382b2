// SPDX-License-Identifier: Apache-2.0

#ifndef FAB_NTT_HPP
#define FAB_NTT_HPP

#include <map>
#include <memory>
#include <vector>

#include "fab/modulus.hpp"

namespace fab {

/// Twiddle factors for one modulus, stored in the access order of the
/// unified Cooley-Tukey schedule (bit-reversed root powers), plus the
/// inverse table and N^-1 for the inverse transform.
struct TwiddleTable {
    u64 N = 0;
    std::vector<u64> fwd; ///< fwd[i] = psi^bitrev(i)
    std::vector<u64> inv; ///< inv[i] = psi^-bitrev(i)
    u64 n_inv = 0;        ///< N^-1 mod q

    TwiddleTable() = default;
    TwiddleTable(const Modulus& m, u64 ring_degree);
};

/// In-place forward negacyclic NTT of one limb. Input is in coefficient
/// order; output is the evaluation representation in the schedule's
/// internal (bit-reversed) point order, which pointwise products and the
/// inverse transform both agree on.
void ntt_forward(u64* limb, const Modulus& m, const TwiddleTable& tw);

/// Exact inverse of ntt_forward, including the N^-1 scaling.
void ntt_inverse(u64* limb, const Modulus& m, const TwiddleTable& tw);

/// Root exponent at evaluation position j: the forward transform leaves
/// a(psi^e_j) at position j with e_j = 2*bitrev(j) + 1.
std::vector<u64> eval_point_exponents(u64 N);

/// Per-modulus twiddle cache. Thread-compatible: build tables up front or
/// guard externally; lookups after warm-up are read-only.
class NttContext {
public:
    const TwiddleTable& table(const Modulus& m, u64 N) const;

private:
    mutable std::map<std::pair<u64, u64>, TwiddleTable> cache_;
};

} // namespace fab

#endif
