// SPDX-License-Identifier: Apache-2.0

#include "fab/rns.hpp"

#include <algorithm>
#include <cmath>

namespace fab {

RnsBasis::RnsBasis(std::vector<Modulus> moduli, std::size_t original_count)
    : moduli_(std::move(moduli)), original_count_(original_count) {
    FAB_REQUIRE(original_count_ >= 1 && original_count_ <= moduli_.size(),
                "RnsBasis: bad original limb count");
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
        for (std::size_t j = i + 1; j < moduli_.size(); ++j) {
            FAB_REQUIRE(moduli_[i].q != moduli_[j].q, "RnsBasis: limbs must be distinct");
        }
    }
}

bigint RnsBasis::product(const std::vector<std::size_t>& ids) const {
    bigint p = 1;
    for (auto i : ids) p *= limb(i).q;
    return p;
}

bigint RnsBasis::modulus_product(std::size_t count) const {
    bigint p = 1;
    for (std::size_t i = 0; i < count; ++i) p *= moduli_[i].q;
    return p;
}

bigint RnsBasis::extension_product() const {
    bigint p = 1;
    for (std::size_t i = original_count_; i < moduli_.size(); ++i) p *= moduli_[i].q;
    return p;
}

const BasisConvTable& RnsBasis::conv_table(const std::vector<std::size_t>& src,
                                           const std::vector<std::size_t>& dst) const {
    auto key = std::make_pair(src, dst);
    auto it = table_cache_.find(key);
    if (it != table_cache_.end()) return it->second;

    for (auto s : src)
        for (auto d : dst)
            FAB_REQUIRE(s != d, "conv_table: source and target limb sets overlap");

    BasisConvTable t;
    t.src = src;
    t.dst = dst;
    t.q_hat_inv.resize(src.size());
    t.q_star.assign(dst.size(), std::vector<u64>(src.size()));

    // (Q/q_i) mod q_i via modular products; then invert.
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Modulus& qi = limb(src[i]);
        u64 qstar_i = 1;
        for (std::size_t j = 0; j < src.size(); ++j) {
            if (j == i) continue;
            qstar_i = mod_mul(qstar_i, limb(src[j]).q % qi.q, qi);
        }
        t.q_hat_inv[i] = mod_inv(qstar_i, qi);
    }
    for (std::size_t d = 0; d < dst.size(); ++d) {
        const Modulus& p = limb(dst[d]);
        for (std::size_t i = 0; i < src.size(); ++i) {
            u64 qstar = 1;
            for (std::size_t j = 0; j < src.size(); ++j) {
                if (j == i) continue;
                qstar = mod_mul(qstar, limb(src[j]).q % p.q, p);
            }
            t.q_star[d][i] = qstar;
        }
    }
    auto [ins, ok] = table_cache_.emplace(std::move(key), std::move(t));
    (void)ok;
    return ins->second;
}

std::vector<std::vector<u64>> basis_convert(const std::vector<const u64*>& residues,
                                            std::size_t n, const RnsBasis& basis,
                                            const BasisConvTable& table, bool exact,
                                            ConvCounters* counters) {
    const std::size_t ell = table.src.size();
    const std::size_t k = table.dst.size();
    FAB_REQUIRE(residues.size() == ell, "basis_convert: one residue array per source limb");

    // Inner products y_i = [x_i * Qhat_i]_{q_i}, computed once and reused
    // for every target limb.
    std::vector<std::vector<u64>> y(ell, std::vector<u64>(n));
    for (std::size_t i = 0; i < ell; ++i) {
        const Modulus& qi = basis.limb(table.src[i]);
        const u64 w = table.q_hat_inv[i];
        for (std::size_t c = 0; c < n; ++c) y[i][c] = mod_mul(residues[i][c], w, qi);
        if (counters) counters->modmul += 1;
    }

    // Optional exact mode: estimate the overshoot e = round(sum y_i / q_i)
    // and subtract e*Q on each target limb.
    std::vector<u64> overshoot;
    if (exact) {
        overshoot.resize(n);
        for (std::size_t c = 0; c < n; ++c) {
            long double acc = 0.0L;
            for (std::size_t i = 0; i < ell; ++i)
                acc += static_cast<long double>(y[i][c]) /
                       static_cast<long double>(basis.limb(table.src[i]).q);
            overshoot[c] = static_cast<u64>(acc + 0.5L);
        }
    }

    std::vector<std::vector<u64>> out(k, std::vector<u64>(n, 0));
    for (std::size_t d = 0; d < k; ++d) {
        const Modulus& p = basis.limb(table.dst[d]);
        for (std::size_t i = 0; i < ell; ++i) {
            const u64 qs = table.q_star[d][i];
            for (std::size_t c = 0; c < n; ++c) {
                u64 term = mod_mul(y[i][c] % p.q, qs, p);
                out[d][c] = mod_add(out[d][c], term, p);
            }
            if (counters) counters->modmul += 1;
        }
        if (exact) {
            // Q mod p over the source set.
            u64 q_mod_p = 1;
            for (std::size_t i = 0; i < ell; ++i)
                q_mod_p = mod_mul(q_mod_p, basis.limb(table.src[i]).q % p.q, p);
            for (std::size_t c = 0; c < n; ++c) {
                u64 sub = mod_mul(overshoot[c] % p.q, q_mod_p, p);
                out[d][c] = mod_sub(out[d][c], sub, p);
            }
        }
    }
    return out;
}

RnsInteger rns_decompose(const bigint& x, const RnsBasis& basis,
                         const std::vector<std::size_t>& limb_ids) {
    RnsInteger r;
    r.limb_ids = limb_ids;
    r.residues.reserve(limb_ids.size());
    for (auto i : limb_ids) {
        bigint m = x % basis.limb(i).q;
        if (m < 0) m += basis.limb(i).q;
        r.residues.push_back(m.convert_to<u64>());
    }
    return r;
}

bigint crt_recombine(const RnsInteger& x, const RnsBasis& basis) {
    FAB_REQUIRE(x.limb_ids.size() == x.residues.size(), "crt_recombine: malformed input");
    bigint Q = 1;
    for (auto i : x.limb_ids) Q *= basis.limb(i).q;
    bigint acc = 0;
    for (std::size_t i = 0; i < x.limb_ids.size(); ++i) {
        const Modulus& qi = basis.limb(x.limb_ids[i]);
        bigint qstar = Q / qi.q;
        u64 qstar_mod = (qstar % qi.q).convert_to<u64>();
        u64 y = mod_mul(x.residues[i], mod_inv(qstar_mod, qi), qi);
        acc += qstar * y;
    }
    return acc % Q;
}

bigint crt_recombine_centered(const RnsInteger& x, const RnsBasis& basis) {
    bigint Q = 1;
    for (auto i : x.limb_ids) Q *= basis.limb(i).q;
    bigint v = crt_recombine(x, basis);
    if (v * 2 >= Q) v -= Q;
    return v;
}

} // namespace fab
