// SPDX-License-Identifier: Apache-2.0

#include "fab/params.hpp"

#include <algorithm>

namespace fab {

void SchemeParams::validate() const {
    FAB_REQUIRE(is_power_of_two(N) && N >= 16, "params: N must be a power of two >= 16");
    FAB_REQUIRE(log_q >= 20 && log_q <= 54, "params: limb width out of range");
    FAB_REQUIRE(log_q0 >= log_q && log_q0 <= 54, "params: base limb width out of range");
    FAB_REQUIRE(log_q_ext == 0 || (log_q_ext >= log_q && log_q_ext <= 54),
                "params: extension limb width out of range");
    FAB_REQUIRE(L >= 1, "params: need at least one level");
    FAB_REQUIRE(dnum >= 1 && dnum <= L + 1, "params: dnum out of range");
    FAB_REQUIRE(fft_iter >= 1 && fft_iter <= 5, "params: fftIter out of range");
    FAB_REQUIRE(delta > 1.0, "params: scale must exceed 1");
    if (lambda == 128) {
        // Security budget for the raised modulus at this ring degree.
        FAB_REQUIRE(N >= (u64(1) << 16), "params: 128-bit security needs N >= 2^16");
        std::size_t log_pq = (L + 1) * log_q - log_q + log_q0 + alpha() * ext_bits();
        FAB_REQUIRE(log_pq <= 1728, "params: log(PQ) exceeds the 128-bit security budget");
    } else {
        FAB_REQUIRE(lambda == 0, "params: only lambda in {0, 128} is modeled");
    }
}

SchemeParams SchemeParams::desk(u64 ring_degree, int limb_bits, int base_bits,
                                std::size_t levels) {
    SchemeParams p;
    p.N = ring_degree;
    p.log_q = limb_bits;
    p.log_q0 = base_bits;
    p.L = levels;
    p.dnum = 3;
    p.fft_iter = 4;
    p.lambda = 0;
    p.delta = std::ldexp(1.0, limb_bits - 1);
    return p;
}

std::shared_ptr<const RnsBasis> build_basis(const SchemeParams& p) {
    p.validate();
    const std::size_t a = p.alpha();
    std::vector<Modulus> chain;
    chain.reserve(p.raised_limbs());

    // Extensions come from the top of their own width so P dominates every
    // digit product; then the base limb, then L rescale limbs descending.
    std::vector<Modulus> ext_pool, base_pool, rescale_pool;
    if (p.ext_bits() == p.log_q0) {
        auto wide = generate_modulus_chain(p.N, a + 1, p.log_q0, p.seed);
        ext_pool.assign(wide.begin(), wide.begin() + a);
        base_pool.push_back(wide[a]);
    } else {
        ext_pool = generate_modulus_chain(p.N, a, p.ext_bits(), p.seed);
        base_pool = generate_modulus_chain(p.N, 1, p.log_q0, p.seed);
    }
    if (p.log_q == p.log_q0) {
        // Rescale limbs share the base pool width; skip the base prime.
        auto pool = generate_modulus_chain(p.N, p.L + 1, p.log_q, p.seed);
        std::size_t skip = 0;
        for (const auto& m : pool) {
            if (skip < 1 && m.q == base_pool[0].q) {
                ++skip;
                continue;
            }
            if (std::none_of(ext_pool.begin(), ext_pool.end(),
                             [&](const Modulus& e) { return e.q == m.q; }) &&
                rescale_pool.size() < p.L)
                rescale_pool.push_back(m);
        }
        if (rescale_pool.size() < p.L) {
            auto more = generate_modulus_chain(p.N, p.L + a + 2, p.log_q, p.seed);
            for (const auto& m : more) {
                if (rescale_pool.size() >= p.L) break;
                bool used = m.q == base_pool[0].q;
                for (const auto& e : ext_pool) used |= e.q == m.q;
                for (const auto& r : rescale_pool) used |= r.q == m.q;
                if (!used) rescale_pool.push_back(m);
            }
        }
    } else {
        rescale_pool = generate_modulus_chain(p.N, p.L, p.log_q, p.seed);
    }
    FAB_REQUIRE(rescale_pool.size() == p.L, "build_basis: not enough rescale primes");

    chain.push_back(base_pool[0]);
    for (auto& m : rescale_pool) chain.push_back(m);
    for (auto& m : ext_pool) chain.push_back(m);
    for (std::size_t i = 0; i < chain.size(); ++i) chain[i].index = i;
    auto basis = std::make_shared<RnsBasis>(std::move(chain), p.original_limbs());

    // P must dominate the largest digit product.
    bigint P = basis->extension_product();
    for (std::size_t d = 0; d < p.dnum; ++d) {
        bigint digit = 1;
        for (std::size_t i = d * a; i < std::min(p.original_limbs(), (d + 1) * a); ++i)
            digit *= basis->limb(i).q;
        FAB_REQUIRE(P > digit, "build_basis: extension product does not cover a digit");
    }
    return basis;
}

} // namespace fab
