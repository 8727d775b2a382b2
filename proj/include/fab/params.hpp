// SPDX-License-Identifier: Apache-2.0

#ifndef FAB_PARAMS_HPP
#define FAB_PARAMS_HPP

#include <memory>

#include "fab/rns.hpp"

namespace fab {

/// Scheme parameter set. Defaults are the FPGA deployment configuration:
/// 54-bit limbs, N = 2^16, L = 23, dnum = 3, fftIter = 4, 128-bit security.
struct SchemeParams {
    u64 N = u64(1) << 16;
    int log_q = 54;        ///< rescale limb width
    int log_q0 = 54;       ///< base limb width (>= log_q)
    int log_q_ext = 0;     ///< extension limb width; 0 means log_q0
    std::size_t L = 23;    ///< maximum multiplicative levels; L+1 original limbs
    std::size_t dnum = 3;  ///< key-switching digit count
    std::size_t fft_iter = 4;
    std::size_t lambda = 128; ///< claimed security level; 0 = toy/desk parameters
    double delta = 0x1p44; ///< default encoding scale
    u64 seed = 1;

    std::size_t alpha() const { return (L + 1 + dnum - 1) / dnum; }
    std::size_t original_limbs() const { return L + 1; }
    std::size_t raised_limbs() const { return original_limbs() + alpha(); }

    void validate() const;

    /// Desk-scale preset for software experiments: no security claim,
    /// 30-bit rescale limbs with a wider base limb for bootstrapping.
    int ext_bits() const { return log_q_ext == 0 ? log_q0 : log_q_ext; }

    static SchemeParams desk(u64 ring_degree = u64(1) << 13, int limb_bits = 30,
                             int base_bits = 34, std::size_t levels = 23);
};

/// Build the limb chain for a parameter set: extension limbs are drawn from
/// the top of the base width so P dominates every digit product, then the
/// base limb, then L rescale limbs in descending order.
std::shared_ptr<const RnsBasis> build_basis(const SchemeParams& p);

} // namespace fab

#endif
