// SPDX-License-Identifier: Apache-2.0

#ifndef FAB_POLY_HPP
#define FAB_POLY_HPP

#include <memory>
#include <vector>

#include "fab/ntt.hpp"
#include "fab/rns.hpp"

namespace fab {

enum class Rep { coeff, eval };

/// One ring element as a limb-major residue matrix over a subset of the
/// basis chain, with a coefficient/evaluation representation flag.
class Poly {
public:
    Poly() = default;
    Poly(std::shared_ptr<const RnsBasis> basis, std::vector<std::size_t> limb_ids, Rep rep)
        : basis_(std::move(basis)), limb_ids_(std::move(limb_ids)), rep_(rep) {
        n_ = basis_->ring_degree();
        data_.assign(limb_ids_.size() * n_, 0);
    }

    u64 ring_degree() const { return n_; }
    Rep rep() const { return rep_; }
    void set_rep(Rep r) { rep_ = r; }
    std::size_t limb_count() const { return limb_ids_.size(); }
    const std::vector<std::size_t>& limb_ids() const { return limb_ids_; }
    const std::shared_ptr<const RnsBasis>& basis() const { return basis_; }
    const Modulus& limb_mod(std::size_t i) const { return basis_->limb(limb_ids_[i]); }

    u64* limb_data(std::size_t i) { return data_.data() + i * n_; }
    const u64* limb_data(std::size_t i) const { return data_.data() + i * n_; }
    std::vector<u64>& raw() { return data_; }
    const std::vector<u64>& raw() const { return data_; }

    bool same_shape(const Poly& o) const {
        return n_ == o.n_ && limb_ids_ == o.limb_ids_;
    }

    /// Keep only the first `count` limbs (they must be a prefix).
    void drop_to(std::size_t count) {
        FAB_REQUIRE(count <= limb_count(), "Poly::drop_to: bad limb count");
        limb_ids_.resize(count);
        data_.resize(count * n_);
    }

private:
    std::shared_ptr<const RnsBasis> basis_;
    std::vector<std::size_t> limb_ids_;
    Rep rep_ = Rep::coeff;
    u64 n_ = 0;
    std::vector<u64> data_;
};

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_negate(const Poly& a);
/// Pointwise product; both operands must be in evaluation representation.
Poly poly_mul(const Poly& a, const Poly& b);
/// Multiply limb i by scalar[i].
Poly poly_scalar_mul(const Poly& a, const std::vector<u64>& per_limb_scalar);
void poly_add_inplace(Poly& a, const Poly& b);
void poly_sub_inplace(Poly& a, const Poly& b);
/// a += b * c, all in evaluation representation (fused key-switch update).
void poly_mul_acc(Poly& acc, const Poly& b, const Poly& c);

/// Per-limb forward/inverse transform; flips the representation flag.
void poly_ntt(Poly& p, const NttContext& ctx);
void poly_intt(Poly& p, const NttContext& ctx);

struct AutomorphTables {
    u64 galois = 0;                   ///< Galois element g (odd, mod 2N)
    std::vector<std::size_t> eval_perm; ///< eval rep: out[j] = in[perm[j]]
    std::vector<std::size_t> coeff_perm; ///< coeff rep: out[perm[j]] = sign[j]*in[j]
    std::vector<bool> coeff_negate;
};

AutomorphTables build_automorph_tables(u64 N, u64 galois);

/// Apply X -> X^g. Works in either representation using the prebuilt tables.
Poly poly_automorph(const Poly& a, const AutomorphTables& t);

/// Multiply by the monomial X^k (k may be negative); exact, representation
/// preserving (coeff rep: negacyclic shift; eval rep: pointwise root powers).
Poly poly_monomial_mul(const Poly& a, i64 k, const NttContext& ctx);

} // namespace fab

#endif
