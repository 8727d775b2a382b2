// SPDX-License-Identifier: Apache-2.0

#ifndef FAB_ENCODER_HPP
#define FAB_ENCODER_HPP

#include <complex>
#include <vector>

#include "fab/poly.hpp"

namespace fab {

using cplx = std::complex<double>;

/// A vector of complex plaintext slots together with its scale.
struct CleartextVector {
    std::vector<cplx> values;
    double scale = 1.0;
};

/// Size-n canonical-embedding transform over the odd-root orbit generated
/// by 5. Slot j corresponds to the primitive 4n-th root zeta^(5^j).
class SpecialFft {
public:
    explicit SpecialFft(u64 n);

    u64 size() const { return n_; }
    const std::vector<u64>& rot_group() const { return rot_group_; }

    /// Coefficient pack w (w_k = p_k + i q_k, natural order) -> slot values.
    void forward(std::vector<cplx>& vals) const;
    /// Slot values -> coefficient pack, exact inverse of forward.
    void inverse(std::vector<cplx>& vals) const;

    /// One radix-2 stage of the forward schedule (block size `len`), acting
    /// on the bit-reversed intermediate ordering. forward() equals
    /// bit_reverse followed by stages len = 2, 4, ..., n.
    void apply_fwd_stage(std::vector<cplx>& vals, u64 len) const;
    /// Exact inverse of apply_fwd_stage.
    void apply_inv_stage(std::vector<cplx>& vals, u64 len) const;

    static void bit_reverse_permute(std::vector<cplx>& vals);

    /// Dense matrix U with U[j][k] = zeta^(5^j * k); the transform oracle.
    std::vector<std::vector<cplx>> dense_matrix() const;

private:
    u64 n_;
    u64 m_; // 4n
    std::vector<cplx> zeta_;      // zeta^j, j < 4n
    std::vector<u64> rot_group_;  // 5^j mod 4n
};

/// Encode n complex slots into a ring element over the given limbs at the
/// given scale. n must be a power of two with 2n dividing ring degree N;
/// for n < N/2 the polynomial lives in the index-stride subring. Output is
/// in coefficient representation.
Poly encode(const std::vector<cplx>& slots, double scale,
            const std::shared_ptr<const RnsBasis>& basis,
            const std::vector<std::size_t>& limb_ids);

/// Inverse of encode: centered CRT lift of each subring coefficient,
/// divided by the scale, mapped back through the embedding.
std::vector<cplx> decode(const Poly& p, std::size_t n_slots, double scale);

} // namespace fab

#endif
