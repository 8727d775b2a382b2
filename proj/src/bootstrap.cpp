// SPDX-License-Identifier: Apache-2.0

#include "fab/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fab {

double amortized_mult_time(double t_boot, const std::vector<double>& t_mult_per_level,
                           std::size_t n_slots) {
    FAB_REQUIRE(!t_mult_per_level.empty(), "amortized_mult_time: no levels");
    FAB_REQUIRE(n_slots >= 1, "amortized_mult_time: no slots");
    double sum = t_boot;
    for (double t : t_mult_per_level) sum += t;
    return sum / (static_cast<double>(t_mult_per_level.size()) * static_cast<double>(n_slots));
}

std::vector<double> chebyshev_interpolate(const std::function<double(double)>& f,
                                          std::size_t degree) {
    const std::size_t m = degree + 1;
    const long double pi = 3.14159265358979323846264338327950288L;
    std::vector<long double> fx(m);
    for (std::size_t j = 0; j < m; ++j) {
        long double node = cosl(pi * (static_cast<long double>(j) + 0.5L) / m);
        fx[j] = f(static_cast<double>(node));
    }
    std::vector<double> c(m);
    for (std::size_t k = 0; k < m; ++k) {
        long double acc = 0;
        for (std::size_t j = 0; j < m; ++j)
            acc += fx[j] * cosl(pi * k * (static_cast<long double>(j) + 0.5L) / m);
        acc *= (k == 0 ? 1.0L : 2.0L) / m;
        c[k] = static_cast<double>(acc);
    }
    return c;
}

namespace {

/// p(x) = q(x) * T_g(x) + r(x) in the Chebyshev basis.
std::pair<std::vector<double>, std::vector<double>> cheb_divide(const std::vector<double>& c,
                                                                std::size_t g) {
    const std::size_t d = c.size() - 1;
    std::vector<double> q(d - g + 1, 0.0);
    std::vector<double> r(c.begin(), c.begin() + g);
    q[0] = c[g];
    for (std::size_t k = 1; k <= d - g; ++k) {
        q[k] = 2.0 * c[g + k];
        r[g - k] -= c[g + k];
    }
    return {std::move(q), std::move(r)};
}

std::size_t floor_pow2(std::size_t x) {
    std::size_t p = 1;
    while (2 * p <= x) p <<= 1;
    return p;
}

/// Chebyshev power cache with exact scale equalization on the subtracted
/// term of the product rule.
class ChebyPowers {
public:
    ChebyPowers(const Scheme& sch, const Ciphertext& x, const SwitchingKey& relin,
                std::size_t baby, std::size_t top_giant)
        : sch_(sch), relin_(relin) {
        pow_[1] = x;
        for (std::size_t j = 2; j < baby; ++j) build(j);
        for (std::size_t g = baby; g <= top_giant; g <<= 1) build(g);
    }

    const Ciphertext& at(std::size_t j) const {
        auto it = pow_.find(j);
        FAB_REQUIRE(it != pow_.end(), "ChebyPowers: power not built");
        return it->second;
    }

private:
    void build(std::size_t j) {
        if (pow_.count(j)) return;
        if (j % 2 == 0 && pow_.count(j / 2)) {
            // T_2k = 2 T_k^2 - 1.
            const Ciphertext& h = pow_.at(j / 2);
            Ciphertext prod = sch_.mult_integer(sch_.mult(h, h, relin_), 2);
            pow_[j] = sch_.add_const(prod, -1.0);
            return;
        }
        std::size_t a = floor_pow2(j);
        std::size_t b = j - a; // 1 <= b < a
        build(a);
        build(b);
        // T_{a+b} = 2 T_a T_b - T_{a-b}.
        Ciphertext prod = sch_.mult_integer(sch_.mult(pow_.at(a), pow_.at(b), relin_), 2);
        const Ciphertext& tc = pow_.at(a - b);
        Ciphertext tc_matched = sch_.retarget(tc, prod.limbs(), prod.scale);
        pow_[j] = sch_.sub(prod, tc_matched);
    }

    const Scheme& sch_;
    const SwitchingKey& relin_;
    std::map<std::size_t, Ciphertext> pow_;
};

} // namespace

namespace {

/// Recursive BSGS evaluation returning a ciphertext at exactly
/// (target_limbs, target_scale).
Ciphertext eval_cheby_rec(const Scheme& sch, const ChebyPowers& powers,
                          const SwitchingKey& relin, std::vector<double> c,
                          std::size_t baby, std::size_t target_limbs, double target_scale) {
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    const std::size_t d = c.size() - 1;
    if (d < baby) {
        // Linear combination of baby powers: constants target a common
        // pre-rescale scale, one rescale lands the tier exactly.
        const double q_drop = static_cast<double>(sch.basis()->limb(target_limbs).q);
        const double s_pre = target_scale * q_drop;
        Ciphertext acc;
        bool have = false;
        for (std::size_t j = 1; j <= d; ++j) {
            if (c[j] == 0.0) continue;
            Ciphertext tj = sch.mod_down_to(powers.at(j), target_limbs + 1);
            Ciphertext term = sch.mult_scalar_raw(tj, c[j], s_pre / tj.scale);
            term.scale = s_pre;
            if (!have) {
                acc = std::move(term);
                have = true;
            } else {
                acc = sch.add(acc, term);
            }
        }
        if (!have) {
            // Degenerate constant polynomial.
            Ciphertext zero = sch.mod_down_to(powers.at(1), target_limbs + 1);
            acc = sch.mult_scalar_raw(zero, 0.0, s_pre / zero.scale);
            acc.scale = s_pre;
        }
        acc = sch.rescale(acc);
        acc.scale = target_scale;
        if (c[0] != 0.0) acc = sch.add_const(acc, c[0]);
        return acc;
    }

    const std::size_t g = floor_pow2(d);
    auto [qc, rc] = cheb_divide(c, g);
    const Ciphertext& tg = powers.at(g);
    const double q_drop = static_cast<double>(sch.basis()->limb(target_limbs).q);
    Ciphertext tg_here = sch.mod_down_to(tg, target_limbs + 1);
    const double s_q = target_scale * q_drop / tg_here.scale;
    Ciphertext q_ct = eval_cheby_rec(sch, powers, relin, qc, baby, target_limbs + 1, s_q);
    Scheme::Tensor t = sch.tensor(q_ct, tg_here);
    Ciphertext prod = sch.rescale(sch.relinearize(t, relin));
    prod.scale = target_scale;
    Ciphertext r_ct = eval_cheby_rec(sch, powers, relin, rc, baby, target_limbs, target_scale);
    return sch.add(prod, r_ct);
}

} // namespace

Ciphertext evaluate_chebyshev(const Scheme& sch, const Ciphertext& ct_x,
                              const std::vector<double>& coeffs, const SwitchingKey& relin) {
    FAB_REQUIRE(coeffs.size() >= 2, "evaluate_chebyshev: degree must be at least 1");
    const std::size_t deg = coeffs.size() - 1;
    const std::size_t depth = static_cast<std::size_t>(std::ceil(std::log2(deg + 1)));
    FAB_REQUIRE(ct_x.limbs() > depth, "evaluate_chebyshev: not enough levels");
    const std::size_t baby = 32 < deg + 1 ? 32 : floor_pow2(deg);
    const std::size_t top_giant = floor_pow2(deg);
    ChebyPowers powers(sch, ct_x, relin, baby, top_giant);
    const std::size_t target_limbs = ct_x.limbs() - depth;
    // Natural output scale: keep the working scale of the input.
    return eval_cheby_rec(sch, powers, relin, coeffs, baby, target_limbs, ct_x.scale);
}

// ---------------------------------------------------------------------------
// Plan construction
// ---------------------------------------------------------------------------

namespace {

using Mat = std::vector<std::vector<cplx>>;

Mat identity_mat(u64 n) {
    Mat m(n, std::vector<cplx>(n, 0.0));
    for (u64 i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

/// Matrix of one forward stage (or its inverse) of the special transform,
/// acting on the bit-reversed intermediate ordering.
Mat stage_matrix(const SpecialFft& fft, u64 len, bool inverse) {
    const u64 n = fft.size();
    Mat m(n, std::vector<cplx>(n, 0.0));
    std::vector<cplx> col(n);
    for (u64 k = 0; k < n; ++k) {
        std::fill(col.begin(), col.end(), cplx(0.0));
        col[k] = 1.0;
        if (inverse)
            fft.apply_inv_stage(col, len);
        else
            fft.apply_fwd_stage(col, len);
        for (u64 r = 0; r < n; ++r) m[r][k] = col[r];
    }
    return m;
}

Mat mat_mul(const Mat& a, const Mat& b) {
    const u64 n = a.size();
    Mat out(n, std::vector<cplx>(n, 0.0));
    for (u64 i = 0; i < n; ++i)
        for (u64 k = 0; k < n; ++k) {
            cplx aik = a[i][k];
            if (std::abs(aik) < 1e-300) continue;
            for (u64 j = 0; j < n; ++j) out[i][j] += aik * b[k][j];
        }
    return out;
}

/// Split log2(n) radix-2 factors into `groups` contiguous groups; earlier
/// groups take the remainder.
std::vector<std::vector<u64>> group_lens(u64 n, std::size_t groups) {
    const std::size_t k = static_cast<std::size_t>(log2_exact(n));
    FAB_REQUIRE(groups >= 1 && groups <= k,
                "bootstrap: fftIter must be between 1 and log2(slots)");
    std::vector<std::vector<u64>> out(groups);
    const std::size_t base = k / groups, rem = k % groups;
    u64 len = 2;
    for (std::size_t gidx = 0; gidx < groups; ++gidx) {
        std::size_t take = base + (gidx < rem ? 1 : 0);
        for (std::size_t t = 0; t < take; ++t, len <<= 1) out[gidx].push_back(len);
    }
    return out;
}

LinearStage stage_from_matrix(const Mat& m) {
    const u64 n = m.size();
    LinearStage st;
    double max_abs = 0.0;
    for (u64 r = 0; r < n; ++r)
        for (u64 c = 0; c < n; ++c) max_abs = std::max(max_abs, std::abs(m[r][c]));
    for (u64 d = 0; d < n; ++d) {
        std::vector<cplx> diag(n);
        double mag = 0.0;
        for (u64 r = 0; r < n; ++r) {
            diag[r] = m[r][(r + d) % n];
            mag = std::max(mag, std::abs(diag[r]));
        }
        if (mag > 1e-11 * max_abs) st.diagonals.emplace(static_cast<i64>(d), std::move(diag));
    }
    // Baby-step/giant-step split over the offset set: offsets are
    // multiples of their gcd; split the multiplier index.
    std::vector<i64> offs;
    for (auto& [d, v] : st.diagonals)
        if (d != 0) offs.push_back(d);
    u64 stride = 0;
    for (i64 d : offs) stride = std::gcd(stride, static_cast<u64>(d));
    if (stride == 0) stride = 1;
    u64 kmax = 0;
    for (i64 d : offs) kmax = std::max(kmax, static_cast<u64>(d) / stride);
    u64 t = 1;
    while (t * t < kmax + 1) ++t;
    st.bsgs_baby = t * stride;
    std::set<i64> babies, giants;
    for (auto& [d, v] : st.diagonals) {
        u64 dd = static_cast<u64>(d);
        babies.insert(static_cast<i64>(dd % st.bsgs_baby));
        giants.insert(static_cast<i64>(dd - dd % st.bsgs_baby));
    }
    st.baby_shifts.assign(babies.begin(), babies.end());
    st.giant_shifts.assign(giants.begin(), giants.end());
    return st;
}

std::vector<cplx> rotate_values_left(const std::vector<cplx>& v, i64 k) {
    const i64 n = static_cast<i64>(v.size());
    std::vector<cplx> out(v.size());
    for (i64 j = 0; j < n; ++j) out[j] = v[((j + k) % n + n) % n];
    return out;
}

} // namespace

Bootstrapper::Bootstrapper(const Scheme& scheme, BootstrapConfig cfg)
    : scheme_(scheme), cfg_(cfg) {
    const u64 n = cfg_.n_slots;
    const u64 N = scheme_.params().N;
    FAB_REQUIRE(is_power_of_two(n) && 2 * n <= N, "bootstrap: bad slot count");
    FAB_REQUIRE(cfg_.fft_iter == scheme_.params().fft_iter,
                "bootstrap: config fftIter differs from the parameter set");
    FAB_REQUIRE(cfg_.cheby_degree >= 256 && cfg_.cheby_degree <= 511,
                "bootstrap: interpolant degree must keep the nine-level budget");
    FAB_REQUIRE(scheme_.top_limbs() > cfg_.l_boot(),
                "bootstrap: chain too short for the bootstrapping depth");

    if (cfg_.delta_boot == 0.0) {
        // Working scale for the reduction polynomial: the squaring ladder
        // T_2k = 2 T_k^2 - 1 keeps its scale only when it matches the
        // rescale limbs, so target the first limb EvalMod will drop.
        const std::size_t first_drop = scheme_.top_limbs() - cfg_.fft_iter - 1;
        cfg_.delta_boot = static_cast<double>(scheme_.basis()->limb(first_drop).q);
    }
    delta_em_ = cfg_.delta_boot;

    // Interpolated homomorphic reduction: scaled sine composed with the odd
    // terms of the inverse-sine series, mapped to z = m/Delta. Terms are
    // included while the on-arc truncation residual matters and the term's
    // frequency content still fits the degree budget.
    const double q0 = static_cast<double>(scheme_.basis()->limb(0).q);
    const double delta = scheme_.params().delta;
    const double arc = delta / q0; // |m|/q0 on the reduction arcs
    FAB_REQUIRE(arc <= 1.0 / 12.0,
                "bootstrap: message scale too close to the base limb for the sine reduction");
    const double amp = q0 / delta;
    const double k1 = cfg_.range_k + 1.0;
    const double two_pi = 2.0 * 3.14159265358979323846;
    // arcsin series: delta = sum t_k S^(2k+1), S = sin(2 pi delta) / (2 pi).
    std::vector<double> series{1.0};
    {
        double binom = 1.0; // C(2k, k)
        for (int k = 1; k <= 4; ++k) {
            binom *= (2.0 * (2 * k - 1)) / k; // C(2k,k) = C(2k-2,k-1)*2(2k-1)/k
            double t = binom * std::pow(two_pi, 2 * k) / (std::pow(4.0, k) * (2 * k + 1));
            double resid = t * std::pow(arc, 2 * k + 1) * amp;
            double freq = (2.0 * k + 1.0) * two_pi * k1;
            if (resid < 0x1p-26 || freq > 0.82 * static_cast<double>(cfg_.cheby_degree)) break;
            series.push_back(t);
        }
        // The first dropped term bounds the composition residual.
        const std::size_t kd = series.size();
        double binom_d = 1.0;
        for (std::size_t k = 1; k <= kd; ++k) binom_d *= (2.0 * (2 * k - 1)) / k;
        double t_next = binom_d * std::pow(two_pi, 2.0 * kd) /
                        (std::pow(4.0, static_cast<double>(kd)) * (2.0 * kd + 1.0));
        FAB_REQUIRE(t_next * std::pow(arc, 2.0 * kd + 1.0) * amp < 0x1p-11,
                    "bootstrap: sine inverse series cannot reach the precision target "
                    "at this scale/range configuration");
    }
    cheby_ = chebyshev_interpolate(
        [&](double x) {
            double s = std::sin(two_pi * k1 * x) / two_pi;
            double s2 = s * s;
            double acc = 0.0;
            for (std::size_t k = series.size(); k-- > 0;) acc = acc * s2 + series[k];
            return amp * s * acc;
        },
        cfg_.cheby_degree);

    // Linear transform plans. The value fold for the decoding direction
    // carries the trace correction, the coefficient extraction constant and
    // the conjugate-split halving, spread evenly across the stages.
    SpecialFft fft(n);
    auto groups = group_lens(n, cfg_.fft_iter);

    const double fold_total = delta * (2.0 * static_cast<double>(n) / static_cast<double>(N)) /
                              (2.0 * q0 * k1);
    const double fold_share = std::pow(fold_total, 1.0 / static_cast<double>(cfg_.fft_iter));

    // Slot-to-coefficient: forward stages grouped in application order.
    for (const auto& group : groups) {
        Mat m = identity_mat(n);
        for (u64 len : group) m = mat_mul(stage_matrix(fft, len, false), m);
        stoc_.dense_stage.push_back(m);
        stoc_.stages.push_back(stage_from_matrix(m));
    }
    // Coefficient-to-slot: inverse stages, reversed grouping, folded.
    for (std::size_t gidx = groups.size(); gidx-- > 0;) {
        Mat m = identity_mat(n);
        for (std::size_t t = groups[gidx].size(); t-- > 0;)
            m = mat_mul(stage_matrix(fft, groups[gidx][t], true), m);
        for (auto& row : m)
            for (auto& e : row) e *= fold_share;
        ctos_.dense_stage.push_back(m);
        ctos_.stages.push_back(stage_from_matrix(m));
    }

    // Trace shifts for sparse packing.
    for (u64 shift = n; shift < N / 2; shift <<= 1)
        subsum_shifts_.push_back(static_cast<i64>(shift));
}

namespace {

void add_stage_galois(const Scheme& sch, const LinearStage& st, std::set<u64>& g) {
    for (i64 b : st.baby_shifts)
        if (b) g.insert(sch.galois_for_left_rotation(b));
    for (i64 gi : st.giant_shifts)
        if (gi) g.insert(sch.galois_for_left_rotation(gi));
}

} // namespace

std::set<u64> Bootstrapper::required_galois() const {
    std::set<u64> g;
    for (const auto& st : ctos_.stages) add_stage_galois(scheme_, st, g);
    for (const auto& st : stoc_.stages) add_stage_galois(scheme_, st, g);
    for (i64 s : subsum_shifts_) g.insert(scheme_.galois_for_left_rotation(s));
    return g;
}

BootstrapKeys Bootstrapper::keygen(const SecretKey& sk, u64 seed,
                                   SecretKey* work_secret_out) const {
    BootstrapKeys keys;
    const SecretKey* work = &sk;
    SecretKey eph;
    if (cfg_.encap_weight > 0) {
        std::vector<std::size_t> all_ids(scheme_.basis()->size());
        for (std::size_t i = 0; i < all_ids.size(); ++i) all_ids[i] = i;
        RandomStream rng(derive_seed(seed, 14));
        Poly s_eph = sample_sparse_ternary(scheme_.basis(), all_ids, cfg_.encap_weight, rng);
        poly_ntt(s_eph, scheme_.ntt());
        eph = SecretKey{std::move(s_eph)};
        keys.to_ephemeral =
            scheme_.keygen_switching(eph, sk.s, derive_seed(seed, 15), KeyTag::generic);
        keys.to_dense = scheme_.keygen_switching(sk, eph.s, derive_seed(seed, 16), KeyTag::generic);
        work = &eph;
    }
    keys.relin = scheme_.keygen_relin(*work, derive_seed(seed, 11));
    keys.conj = scheme_.keygen_conjugation(*work, derive_seed(seed, 12));
    u64 idx = 0;
    for (u64 g : required_galois()) {
        Poly s_rot = poly_automorph(work->s, scheme_.automorph_tables(g));
        keys.galois.emplace(g, scheme_.keygen_switching(*work, s_rot,
                                                        derive_seed(seed, 13, idx++),
                                                        KeyTag::rotation, 0, g));
    }
    if (work_secret_out != nullptr) *work_secret_out = *work;
    return keys;
}

Ciphertext Bootstrapper::mod_raise(const Ciphertext& ct) const {
    FAB_REQUIRE(ct.limbs() == 1, "mod_raise: input must be at the lowest level");
    const u64 N = scheme_.params().N;
    const Modulus& q0 = scheme_.basis()->limb(0);
    const std::size_t top = scheme_.top_limbs();

    Ciphertext out;
    out.scale = ct.scale;
    out.n_slots = ct.n_slots;
    for (int part = 0; part < 2; ++part) {
        const Poly& src = part == 0 ? ct.a : ct.b;
        Poly coeff = src;
        poly_intt(coeff, scheme_.ntt());
        std::vector<std::size_t> ids(top);
        for (std::size_t i = 0; i < top; ++i) ids[i] = i;
        Poly raised(scheme_.basis(), ids, Rep::coeff);
        const u64* c0 = coeff.limb_data(0);
        for (std::size_t i = 0; i < top; ++i) {
            const Modulus& qi = scheme_.basis()->limb(i);
            u64* dst = raised.limb_data(i);
            for (u64 j = 0; j < N; ++j) {
                const u64 c = c0[j];
                // Centered lift: values at or above q0/2 represent c - q0.
                dst[j] = c >= q0.q / 2 ? mod_sub(c % qi.q, q0.q % qi.q, qi) : c % qi.q;
            }
        }
        poly_ntt(raised, scheme_.ntt());
        (part == 0 ? out.a : out.b) = std::move(raised);
    }
    return out;
}

Ciphertext Bootstrapper::sub_sum(const Ciphertext& ct, const BootstrapKeys& keys) const {
    Ciphertext acc = ct;
    for (i64 shift : subsum_shifts_) {
        const u64 g = scheme_.galois_for_left_rotation(shift);
        acc = scheme_.add(acc, scheme_.apply_galois(acc, g, keys.galois.at(g)));
    }
    return acc;
}

Ciphertext Bootstrapper::apply_stage(const Ciphertext& ct, const LinearStage& stage,
                                     double fold_abs, double declared_ratio,
                                     const std::map<u64, SwitchingKey>& rot_keys) const {
    const u64 n = cfg_.n_slots;
    const std::size_t limbs = ct.limbs();
    const double q_drop = static_cast<double>(scheme_.basis()->limb(limbs - 1).q);
    const double sigma = q_drop * declared_ratio;
    FAB_REQUIRE(sigma > 1.0, "apply_stage: encode scale collapsed");

    // Baby rotations of the input, shared across giant groups.
    std::map<i64, Ciphertext> rotated;
    for (i64 b : stage.baby_shifts) {
        if (b == 0)
            rotated.emplace(0, ct);
        else {
            const u64 g = scheme_.galois_for_left_rotation(b);
            rotated.emplace(b, scheme_.apply_galois(ct, g, rot_keys.at(g)));
        }
    }

    Ciphertext total;
    bool have_total = false;
    for (i64 gshift : stage.giant_shifts) {
        Ciphertext inner;
        bool have_inner = false;
        for (i64 b : stage.baby_shifts) {
            auto it = stage.diagonals.find(gshift + b);
            if (it == stage.diagonals.end()) continue;
            // Pre-rotate the diagonal so the giant rotation lands it right.
            std::vector<cplx> vals = rotate_values_left(it->second, -gshift);
            for (auto& v : vals) v *= fold_abs;
            Poly pt = scheme_.encode_eval(vals, sigma, limbs);
            Ciphertext term = scheme_.mult_plain_raw(rotated.at(b), pt, sigma);
            if (!have_inner) {
                inner = std::move(term);
                have_inner = true;
            } else {
                inner = scheme_.add(inner, term);
            }
        }
        if (!have_inner) continue;
        if (gshift != 0) {
            const u64 g = scheme_.galois_for_left_rotation(gshift);
            inner = scheme_.apply_galois(inner, g, rot_keys.at(g));
        }
        if (!have_total) {
            total = std::move(inner);
            have_total = true;
        } else {
            total = scheme_.add(total, inner);
        }
    }
    FAB_REQUIRE(have_total, "apply_stage: empty stage");
    (void)n;
    return scheme_.rescale(total);
}

std::pair<Ciphertext, Ciphertext> Bootstrapper::coeff_to_slot(const Ciphertext& ct,
                                                              const BootstrapKeys& keys) const {
    FAB_REQUIRE(ct.limbs() > ctos_.stages.size(), "coeff_to_slot: insufficient levels");
    Ciphertext w = ct;
    // Per-stage declared-scale ratio walks the scale to the EvalMod target.
    for (std::size_t s = 0; s < ctos_.stages.size(); ++s) {
        const std::size_t remaining = ctos_.stages.size() - s;
        const double ratio =
            std::pow(delta_em_ / w.scale, 1.0 / static_cast<double>(remaining));
        w = apply_stage(w, ctos_.stages[s], 1.0, ratio, keys.galois);
    }
    w.scale = delta_em_;
    const u64 N = scheme_.params().N;
    Ciphertext cw = scheme_.conjugate(w, keys.conj);
    Ciphertext ct_p = scheme_.add(w, cw);
    Ciphertext ct_q = scheme_.add(scheme_.mult_monomial(w, 3 * static_cast<i64>(N) / 2),
                                  scheme_.mult_monomial(cw, static_cast<i64>(N) / 2));
    return {std::move(ct_p), std::move(ct_q)};
}

Ciphertext Bootstrapper::eval_mod(const Ciphertext& ct, const BootstrapKeys& keys) const {
    if (debug_sk_ != nullptr) {
        auto slots = scheme_.decrypt_slots(ct, *debug_sk_);
        const double k1 = cfg_.range_k + 1.0;
        for (const auto& v : slots) {
            FAB_REQUIRE(std::abs(v.real()) <= 1.0 + 1e-6 && std::abs(v.imag()) < 0.1,
                        "eval_mod: slot outside the reduction range");
            (void)k1;
        }
    }
    const std::size_t before = ct.limbs();
    Ciphertext out = evaluate_chebyshev(scheme_, ct, cheby_, keys.relin);
    FAB_REQUIRE(before - out.limbs() == 9, "eval_mod: level budget violated");
    return out;
}

Ciphertext Bootstrapper::slot_to_coeff(const Ciphertext& ct_p, const Ciphertext& ct_q,
                                       const BootstrapKeys& keys) const {
    const u64 N = scheme_.params().N;
    Ciphertext w = scheme_.add(ct_p, scheme_.mult_monomial(ct_q, static_cast<i64>(N) / 2));
    const double target = scheme_.params().delta;
    for (std::size_t s = 0; s < stoc_.stages.size(); ++s) {
        const std::size_t remaining = stoc_.stages.size() - s;
        const double ratio = std::pow(target / w.scale, 1.0 / static_cast<double>(remaining));
        w = apply_stage(w, stoc_.stages[s], 1.0, ratio, keys.galois);
    }
    w.scale = target;
    return w;
}

Ciphertext Bootstrapper::bootstrap(const Ciphertext& ct, const BootstrapKeys& keys) const {
    FAB_REQUIRE(ct.limbs() == 1, "bootstrap: input must be at one limb");
    FAB_REQUIRE(ct.n_slots == cfg_.n_slots, "bootstrap: slot count differs from the plan");
    const double drift = ct.scale / scheme_.params().delta;
    FAB_REQUIRE(drift > 1.0 - 0x1p-12 && drift < 1.0 + 0x1p-12,
                "bootstrap: input scale must match the configured scale");

    Ciphertext c = ct;
    c.scale = scheme_.params().delta;
    if (cfg_.encap_weight > 0) c = scheme_.switch_key(c, keys.to_ephemeral, scheme_.datapath());
    c = mod_raise(c);
    if (!subsum_shifts_.empty()) c = sub_sum(c, keys);
    auto [p, q] = coeff_to_slot(c, keys);
    p = eval_mod(p, keys);
    q = eval_mod(q, keys);
    Ciphertext out = slot_to_coeff(p, q, keys);
    // Back under the dense key.
    if (cfg_.encap_weight > 0) out = scheme_.switch_key(out, keys.to_dense, scheme_.datapath());
    FAB_REQUIRE(out.limbs() == scheme_.top_limbs() - cfg_.l_boot(),
                "bootstrap: output level does not match the depth budget");
    return out;
}

double Bootstrapper::eval_cleartext(double x) const {
    // Clenshaw recurrence on the Chebyshev coefficients.
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = cheby_.size(); k-- > 1;) {
        double b0 = 2.0 * x * b1 - b2 + cheby_[k];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + cheby_[0];
}

} // namespace fab
