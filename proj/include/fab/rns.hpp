// SPDX-License-Identifier: Apache-2.0

#ifndef FAB_RNS_HPP
#define FAB_RNS_HPP

#include <map>
#include <memory>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fab/modulus.hpp"

namespace fab {

using bigint = boost::multiprecision::cpp_int;

enum class LimbRole { original, extension };

/// Precomputed constants for one fast-base-conversion instance (Eq-style
/// recombination from a fixed source limb set to a fixed target limb set).
struct BasisConvTable {
    std::vector<std::size_t> src; ///< indices into the basis chain
    std::vector<std::size_t> dst;
    std::vector<u64> q_hat_inv;   ///< per source limb i: ((Q/q_i)^-1) mod q_i
    /// q_star[t][i] = (Q/q_i) mod p_t for target limb t.
    std::vector<std::vector<u64>> q_star;
};

/// Ordered chain of limb moduli with role tags and cached conversion tables.
/// Immutable after construction except for the lazily grown table cache.
class RnsBasis {
public:
    RnsBasis(std::vector<Modulus> moduli, std::size_t original_count);

    const Modulus& limb(std::size_t i) const { return moduli_.at(i); }
    std::size_t size() const { return moduli_.size(); }
    std::size_t original_count() const { return original_count_; }
    std::size_t extension_count() const { return moduli_.size() - original_count_; }
    LimbRole role(std::size_t i) const {
        return i < original_count_ ? LimbRole::original : LimbRole::extension;
    }
    u64 ring_degree() const { return moduli_.empty() ? 0 : moduli_[0].ring_degree; }

    /// Product of all limbs in `ids`.
    bigint product(const std::vector<std::size_t>& ids) const;
    /// Product of the first `count` original limbs.
    bigint modulus_product(std::size_t count) const;
    /// Product of all extension limbs.
    bigint extension_product() const;

    /// Fetch (building and caching on first use) the conversion table for a
    /// source/target limb set pair. Source and target must not overlap.
    const BasisConvTable& conv_table(const std::vector<std::size_t>& src,
                                     const std::vector<std::size_t>& dst) const;

private:
    std::vector<Modulus> moduli_;
    std::size_t original_count_;
    mutable std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, BasisConvTable>
        table_cache_;
};

/// Counter for modular multiplications performed by basis conversions;
/// counted poly-wise (one unit per limb-vector multiply).
struct ConvCounters {
    u64 modmul = 0;
};

/// Fast base conversion of a single coefficient vector column set:
/// `residues[i]` is the residue array (length n) for source limb src[i].
/// For each target limb, computes sum_i [x_i * Qhat_i]_{q_i} * (Q_i* mod p)
/// mod p, reusing the inner products across targets. When `exact` is set,
/// the multiple-of-Q overshoot is removed with a floating-point estimate of
/// sum_i y_i / q_i (valid when the represented value is below Q/2 in the
/// centered sense used by key switching).
std::vector<std::vector<u64>> basis_convert(const std::vector<const u64*>& residues,
                                            std::size_t n, const RnsBasis& basis,
                                            const BasisConvTable& table, bool exact = false,
                                            ConvCounters* counters = nullptr);

/// Test-oracle value type: one residue per limb of a chosen limb set.
struct RnsInteger {
    std::vector<std::size_t> limb_ids;
    std::vector<u64> residues;
};

/// Decompose a non-negative integer x < Q into residues (test oracle).
RnsInteger rns_decompose(const bigint& x, const RnsBasis& basis,
                         const std::vector<std::size_t>& limb_ids);

/// Unique integer in [0, Q) congruent to every residue (test oracle; exact CRT).
bigint crt_recombine(const RnsInteger& x, const RnsBasis& basis);

/// Centered representative in [-Q/2, Q/2).
bigint crt_recombine_centered(const RnsInteger& x, const RnsBasis& basis);

} // namespace fab

#endif
