// SPDX-License-Identifier: Apache-2.0

#ifndef FAB_SAMPLING_HPP
#define FAB_SAMPLING_HPP

#include <random>

#include "fab/poly.hpp"

namespace fab {

/// Deterministic random stream. mt19937_64 output is pinned by the
/// standard, and all range reduction here is explicit, so samples are
/// reproducible across platforms.
class RandomStream {
public:
    explicit RandomStream(u64 seed) : eng_(seed) {}

    u64 next() { return eng_(); }

    /// Unbiased uniform draw in [0, bound).
    u64 uniform_below(u64 bound) {
        FAB_REQUIRE(bound > 0, "uniform_below: bound must be positive");
        const u64 threshold = (~u64(0) - bound + 1) % bound; // 2^64 mod bound
        u64 r;
        do {
            r = eng_();
        } while (r < threshold);
        return r % bound;
    }

    double uniform_unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 eng_;
};

/// Uniform residues on every limb, directly in the requested representation.
Poly sample_uniform(std::shared_ptr<const RnsBasis> basis, const std::vector<std::size_t>& limbs,
                    Rep rep, RandomStream& rng);

/// Dense ternary element: each coefficient uniform on {-1, 0, 1}.
Poly sample_ternary(std::shared_ptr<const RnsBasis> basis, const std::vector<std::size_t>& limbs,
                    RandomStream& rng);

/// Ternary element with exactly `weight` nonzero coefficients.
Poly sample_sparse_ternary(std::shared_ptr<const RnsBasis> basis,
                           const std::vector<std::size_t>& limbs, std::size_t weight,
                           RandomStream& rng);

/// Centered discrete Gaussian (sigma = 3.2 by default) via an inverse-CDF
/// table; deterministic for a fixed stream.
Poly sample_gaussian(std::shared_ptr<const RnsBasis> basis, const std::vector<std::size_t>& limbs,
                     RandomStream& rng, double sigma = 3.2);

/// Signed coefficient view (ternary/gaussian polys only; coefficient rep).
std::vector<i64> signed_coeffs(const Poly& p, std::size_t limb = 0);

} // namespace fab

#endif
