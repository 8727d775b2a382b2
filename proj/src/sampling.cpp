// SPDX-License-Identifier: Apache-2.0

#include "fab/sampling.hpp"

#include <cmath>

namespace fab {

Poly sample_uniform(std::shared_ptr<const RnsBasis> basis, const std::vector<std::size_t>& limbs,
                    Rep rep, RandomStream& rng) {
    Poly p(std::move(basis), limbs, rep);
    const u64 n = p.ring_degree();
    for (std::size_t i = 0; i < p.limb_count(); ++i) {
        const u64 q = p.limb_mod(i).q;
        u64* dst = p.limb_data(i);
        for (u64 j = 0; j < n; ++j) dst[j] = rng.uniform_below(q);
    }
    return p;
}

namespace {

void fill_signed(Poly& p, const std::vector<i64>& c) {
    const u64 n = p.ring_degree();
    for (std::size_t i = 0; i < p.limb_count(); ++i) {
        const Modulus& m = p.limb_mod(i);
        u64* dst = p.limb_data(i);
        for (u64 j = 0; j < n; ++j) {
            i64 v = c[j];
            dst[j] = v >= 0 ? static_cast<u64>(v) % m.q : m.q - (static_cast<u64>(-v) % m.q);
            if (dst[j] == m.q) dst[j] = 0;
        }
    }
}

} // namespace

Poly sample_ternary(std::shared_ptr<const RnsBasis> basis, const std::vector<std::size_t>& limbs,
                    RandomStream& rng) {
    Poly p(std::move(basis), limbs, Rep::coeff);
    std::vector<i64> c(p.ring_degree());
    for (auto& v : c) v = static_cast<i64>(rng.uniform_below(3)) - 1;
    fill_signed(p, c);
    return p;
}

Poly sample_sparse_ternary(std::shared_ptr<const RnsBasis> basis,
                           const std::vector<std::size_t>& limbs, std::size_t weight,
                           RandomStream& rng) {
    Poly p(std::move(basis), limbs, Rep::coeff);
    const u64 n = p.ring_degree();
    FAB_REQUIRE(weight <= n, "sample_sparse_ternary: weight exceeds ring degree");
    std::vector<i64> c(n, 0);
    std::vector<u64> idx(n);
    for (u64 j = 0; j < n; ++j) idx[j] = j;
    for (std::size_t k = 0; k < weight; ++k) {
        u64 pick = k + rng.uniform_below(n - k);
        std::swap(idx[k], idx[pick]);
        c[idx[k]] = rng.uniform_below(2) ? 1 : -1;
    }
    fill_signed(p, c);
    return p;
}

Poly sample_gaussian(std::shared_ptr<const RnsBasis> basis, const std::vector<std::size_t>& limbs,
                     RandomStream& rng, double sigma) {
    // Inverse-CDF table over [-tail, tail], tail = 8 sigma.
    const int tail = static_cast<int>(std::ceil(8.0 * sigma));
    static thread_local std::vector<double> cdf;
    static thread_local double cached_sigma = -1.0;
    if (cached_sigma != sigma) {
        cdf.assign(2 * tail + 1, 0.0);
        double total = 0.0;
        for (int v = -tail; v <= tail; ++v)
            total += std::exp(-0.5 * (double(v) / sigma) * (double(v) / sigma));
        double acc = 0.0;
        for (int v = -tail; v <= tail; ++v) {
            acc += std::exp(-0.5 * (double(v) / sigma) * (double(v) / sigma)) / total;
            cdf[v + tail] = acc;
        }
        cached_sigma = sigma;
    }
    Poly p(std::move(basis), limbs, Rep::coeff);
    std::vector<i64> c(p.ring_degree());
    for (auto& out : c) {
        double u = rng.uniform_unit();
        int lo = 0, hi = 2 * tail;
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (cdf[mid] < u)
                lo = mid + 1;
            else
                hi = mid;
        }
        out = lo - tail;
    }
    fill_signed(p, c);
    return p;
}

std::vector<i64> signed_coeffs(const Poly& p, std::size_t limb) {
    FAB_REQUIRE(p.rep() == Rep::coeff, "signed_coeffs: coefficient representation required");
    const Modulus& m = p.limb_mod(limb);
    std::vector<i64> out(p.ring_degree());
    const u64* src = p.limb_data(limb);
    for (u64 j = 0; j < p.ring_degree(); ++j) {
        u64 v = src[j];
        out[j] = v > m.q / 2 ? -static_cast<i64>(m.q - v) : static_cast<i64>(v);
    }
    return out;
}

} // namespace fab
