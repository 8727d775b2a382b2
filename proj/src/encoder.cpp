// SPDX-License-Identifier: Apache-2.0

#include "fab/encoder.hpp"

#include <cmath>

namespace fab {

SpecialFft::SpecialFft(u64 n) : n_(n), m_(4 * n) {
    FAB_REQUIRE(is_power_of_two(n), "SpecialFft: n must be a power of two");
    zeta_.resize(m_);
    const long double pi = 3.14159265358979323846264338327950288L;
    for (u64 j = 0; j < m_; ++j) {
        long double ang = 2.0L * pi * static_cast<long double>(j) / static_cast<long double>(m_);
        zeta_[j] = cplx(static_cast<double>(cosl(ang)), static_cast<double>(sinl(ang)));
    }
    rot_group_.resize(n_);
    u64 g = 1;
    for (u64 j = 0; j < n_; ++j) {
        rot_group_[j] = g;
        g = (g * 5) % m_;
    }
}

void SpecialFft::bit_reverse_permute(std::vector<cplx>& vals) {
    const u64 n = vals.size();
    for (u64 i = 1, j = 0; i < n; ++i) {
        u64 bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(vals[i], vals[j]);
    }
}

void SpecialFft::apply_fwd_stage(std::vector<cplx>& vals, u64 len) const {
    const u64 lenh = len >> 1;
    const u64 lenq = len << 2;
    for (u64 i = 0; i < n_; i += len) {
        for (u64 j = 0; j < lenh; ++j) {
            u64 idx = (rot_group_[j] % lenq) * (m_ / lenq);
            cplx u = vals[i + j];
            cplx v = vals[i + j + lenh] * zeta_[idx];
            vals[i + j] = u + v;
            vals[i + j + lenh] = u - v;
        }
    }
}

void SpecialFft::apply_inv_stage(std::vector<cplx>& vals, u64 len) const {
    const u64 lenh = len >> 1;
    const u64 lenq = len << 2;
    for (u64 i = 0; i < n_; i += len) {
        for (u64 j = 0; j < lenh; ++j) {
            u64 idx = (rot_group_[j] % lenq) * (m_ / lenq);
            cplx a = vals[i + j];
            cplx b = vals[i + j + lenh];
            vals[i + j] = (a + b) * 0.5;
            vals[i + j + lenh] = (a - b) * 0.5 * std::conj(zeta_[idx]);
        }
    }
}

void SpecialFft::forward(std::vector<cplx>& vals) const {
    FAB_REQUIRE(vals.size() == n_, "SpecialFft: size mismatch");
    bit_reverse_permute(vals);
    for (u64 len = 2; len <= n_; len <<= 1) apply_fwd_stage(vals, len);
}

void SpecialFft::inverse(std::vector<cplx>& vals) const {
    FAB_REQUIRE(vals.size() == n_, "SpecialFft: size mismatch");
    for (u64 len = n_; len >= 2; len >>= 1) apply_inv_stage(vals, len);
    bit_reverse_permute(vals);
}

std::vector<std::vector<cplx>> SpecialFft::dense_matrix() const {
    std::vector<std::vector<cplx>> u(n_, std::vector<cplx>(n_));
    for (u64 j = 0; j < n_; ++j)
        for (u64 k = 0; k < n_; ++k)
            u[j][k] = zeta_[(rot_group_[j] * k) % m_];
    return u;
}

Poly encode(const std::vector<cplx>& slots, double scale,
            const std::shared_ptr<const RnsBasis>& basis,
            const std::vector<std::size_t>& limb_ids) {
    const u64 N = basis->ring_degree();
    const u64 n = slots.size();
    FAB_REQUIRE(is_power_of_two(n) && 2 * n <= N, "encode: need power-of-two n <= N/2");
    FAB_REQUIRE(scale > 0, "encode: scale must be positive");

    SpecialFft fft(n);
    std::vector<cplx> w = slots;
    fft.inverse(w);

    // Subring stride: coefficient k of the degree-2n element lands at k*d.
    const u64 d = N / (2 * n);
    std::vector<i64> coeffs(2 * n);
    double max_abs = 0.0;
    for (u64 k = 0; k < n; ++k) {
        double re = w[k].real() * scale;
        double im = w[k].imag() * scale;
        FAB_REQUIRE(std::abs(re) < 4.6e18 && std::abs(im) < 4.6e18,
                    "encode: coefficient overflows 63 bits");
        coeffs[k] = static_cast<i64>(std::llround(re));
        coeffs[k + n] = static_cast<i64>(std::llround(im));
        max_abs = std::max({max_abs, std::abs(re), std::abs(im)});
    }
    // Reject coefficients beyond Q/2 for the selected limbs.
    double log_q_total = 0.0;
    for (auto id : limb_ids) log_q_total += std::log2(static_cast<double>(basis->limb(id).q));
    const double limit = std::ldexp(1.0, static_cast<int>(std::min(log_q_total - 1.0, 62.0)));
    FAB_REQUIRE(max_abs < limit, "encode: encoded coefficient exceeds Q/2");

    Poly p(basis, limb_ids, Rep::coeff);
    for (std::size_t li = 0; li < p.limb_count(); ++li) {
        const Modulus& m = p.limb_mod(li);
        u64* dst = p.limb_data(li);
        for (u64 k = 0; k < 2 * n; ++k) {
            i64 c = coeffs[k];
            u64 r = c >= 0 ? static_cast<u64>(c) % m.q : m.q - (static_cast<u64>(-c) % m.q);
            if (r == m.q) r = 0;
            dst[k * d] = r;
        }
    }
    return p;
}

std::vector<cplx> decode(const Poly& p, std::size_t n_slots, double scale) {
    FAB_REQUIRE(p.rep() == Rep::coeff, "decode: coefficient representation required");
    const u64 N = p.ring_degree();
    const u64 n = n_slots;
    FAB_REQUIRE(is_power_of_two(n) && 2 * n <= N, "decode: need power-of-two n <= N/2");
    const u64 d = N / (2 * n);

    const auto& basis = *p.basis();
    // Centered CRT lift of each subring coefficient.
    bigint Q = 1;
    for (auto id : p.limb_ids()) Q *= basis.limb(id).q;
    bigint half = Q / 2;

    std::vector<cplx> w(n);
    RnsInteger tmp;
    tmp.limb_ids = p.limb_ids();
    tmp.residues.resize(p.limb_count());
    auto lift = [&](u64 coeff_index) -> long double {
        for (std::size_t li = 0; li < p.limb_count(); ++li)
            tmp.residues[li] = p.limb_data(li)[coeff_index];
        bigint v = crt_recombine(tmp, basis);
        if (v > half) v -= Q;
        return v.convert_to<long double>();
    };
    const long double s = static_cast<long double>(scale);
    for (u64 k = 0; k < n; ++k) {
        long double re = lift(k * d) / s;
        long double im = lift((k + n) * d) / s;
        w[k] = cplx(static_cast<double>(re), static_cast<double>(im));
    }
    SpecialFft fft(n);
    fft.forward(w);
    return w;
}

} // namespace fab
