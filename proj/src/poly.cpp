// SPDX-License-Identifier: Apache-2.0

#include "fab/poly.hpp"

namespace fab {

namespace {

void check_match(const Poly& a, const Poly& b, const char* what) {
    FAB_REQUIRE(a.same_shape(b), std::string(what) + ": limb sets differ");
    FAB_REQUIRE(a.rep() == b.rep(), std::string(what) + ": representation mismatch");
}

} // namespace

Poly poly_add(const Poly& a, const Poly& b) {
    Poly out = a;
    poly_add_inplace(out, b);
    return out;
}

Poly poly_sub(const Poly& a, const Poly& b) {
    Poly out = a;
    poly_sub_inplace(out, b);
    return out;
}

void poly_add_inplace(Poly& a, const Poly& b) {
    check_match(a, b, "poly_add");
    const u64 n = a.ring_degree();
    for (std::size_t i = 0; i < a.limb_count(); ++i) {
        const Modulus& m = a.limb_mod(i);
        u64* pa = a.limb_data(i);
        const u64* pb = b.limb_data(i);
        for (u64 j = 0; j < n; ++j) pa[j] = mod_add(pa[j], pb[j], m);
    }
}

void poly_sub_inplace(Poly& a, const Poly& b) {
    check_match(a, b, "poly_sub");
    const u64 n = a.ring_degree();
    for (std::size_t i = 0; i < a.limb_count(); ++i) {
        const Modulus& m = a.limb_mod(i);
        u64* pa = a.limb_data(i);
        const u64* pb = b.limb_data(i);
        for (u64 j = 0; j < n; ++j) pa[j] = mod_sub(pa[j], pb[j], m);
    }
}

Poly poly_negate(const Poly& a) {
    Poly out = a;
    const u64 n = a.ring_degree();
    for (std::size_t i = 0; i < out.limb_count(); ++i) {
        const Modulus& m = out.limb_mod(i);
        u64* p = out.limb_data(i);
        for (u64 j = 0; j < n; ++j) p[j] = mod_neg(p[j], m);
    }
    return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    check_match(a, b, "poly_mul");
    FAB_REQUIRE(a.rep() == Rep::eval, "poly_mul: operands must be in evaluation representation");
    Poly out = a;
    const u64 n = a.ring_degree();
    for (std::size_t i = 0; i < out.limb_count(); ++i) {
        const Modulus& m = out.limb_mod(i);
        u64* po = out.limb_data(i);
        const u64* pb = b.limb_data(i);
        for (u64 j = 0; j < n; ++j) po[j] = mod_mul(po[j], pb[j], m);
    }
    return out;
}

void poly_mul_acc(Poly& acc, const Poly& b, const Poly& c) {
    check_match(acc, b, "poly_mul_acc");
    check_match(b, c, "poly_mul_acc");
    FAB_REQUIRE(acc.rep() == Rep::eval, "poly_mul_acc: evaluation representation required");
    const u64 n = acc.ring_degree();
    for (std::size_t i = 0; i < acc.limb_count(); ++i) {
        const Modulus& m = acc.limb_mod(i);
        u64* pa = acc.limb_data(i);
        const u64* pb = b.limb_data(i);
        const u64* pc = c.limb_data(i);
        for (u64 j = 0; j < n; ++j) pa[j] = mod_add(pa[j], mod_mul(pb[j], pc[j], m), m);
    }
}

Poly poly_scalar_mul(const Poly& a, const std::vector<u64>& per_limb_scalar) {
    FAB_REQUIRE(per_limb_scalar.size() == a.limb_count(), "poly_scalar_mul: one scalar per limb");
    Poly out = a;
    const u64 n = a.ring_degree();
    for (std::size_t i = 0; i < out.limb_count(); ++i) {
        const Modulus& m = out.limb_mod(i);
        const u64 s = per_limb_scalar[i];
        u64* p = out.limb_data(i);
        for (u64 j = 0; j < n; ++j) p[j] = mod_mul(p[j], s, m);
    }
    return out;
}

void poly_ntt(Poly& p, const NttContext& ctx) {
    FAB_REQUIRE(p.rep() == Rep::coeff, "poly_ntt: already in evaluation representation");
    for (std::size_t i = 0; i < p.limb_count(); ++i) {
        const Modulus& m = p.limb_mod(i);
        ntt_forward(p.limb_data(i), m, ctx.table(m, p.ring_degree()));
    }
    p.set_rep(Rep::eval);
}

void poly_intt(Poly& p, const NttContext& ctx) {
    FAB_REQUIRE(p.rep() == Rep::eval, "poly_intt: already in coefficient representation");
    for (std::size_t i = 0; i < p.limb_count(); ++i) {
        const Modulus& m = p.limb_mod(i);
        ntt_inverse(p.limb_data(i), m, ctx.table(m, p.ring_degree()));
    }
    p.set_rep(Rep::coeff);
}

AutomorphTables build_automorph_tables(u64 N, u64 galois) {
    FAB_REQUIRE(galois % 2 == 1, "automorph: Galois element must be odd");
    AutomorphTables t;
    t.galois = galois % (2 * N);
    // Evaluation order: position j holds the value at root exponent
    // e_j = 2*bitrev(j)+1. After X -> X^g the value at exponent e comes
    // from input exponent g*e mod 2N.
    auto exps = eval_point_exponents(N);
    std::vector<std::size_t> pos_of_exp(2 * N, 0);
    for (u64 j = 0; j < N; ++j) pos_of_exp[exps[j]] = j;
    t.eval_perm.resize(N);
    for (u64 j = 0; j < N; ++j) {
        u64 e = static_cast<u64>((u128(t.galois) * exps[j]) % (2 * N));
        t.eval_perm[j] = pos_of_exp[e];
    }
    t.coeff_perm.resize(N);
    t.coeff_negate.resize(N);
    for (u64 j = 0; j < N; ++j) {
        u64 e = static_cast<u64>((u128(j) * t.galois) % (2 * N));
        t.coeff_perm[j] = e & (N - 1);
        t.coeff_negate[j] = e >= N;
    }
    return t;
}

Poly poly_automorph(const Poly& a, const AutomorphTables& t) {
    const u64 n = a.ring_degree();
    FAB_REQUIRE(t.eval_perm.size() == n, "poly_automorph: table size mismatch");
    Poly out = a;
    if (a.rep() == Rep::eval) {
        for (std::size_t i = 0; i < a.limb_count(); ++i) {
            const u64* src = a.limb_data(i);
            u64* dst = out.limb_data(i);
            for (u64 j = 0; j < n; ++j) dst[j] = src[t.eval_perm[j]];
        }
    } else {
        for (std::size_t i = 0; i < a.limb_count(); ++i) {
            const Modulus& m = a.limb_mod(i);
            const u64* src = a.limb_data(i);
            u64* dst = out.limb_data(i);
            for (u64 j = 0; j < n; ++j) {
                u64 v = src[j];
                dst[t.coeff_perm[j]] = t.coeff_negate[j] ? mod_neg(v, m) : v;
            }
        }
    }
    return out;
}

Poly poly_monomial_mul(const Poly& a, i64 k, const NttContext& ctx) {
    const u64 n = a.ring_degree();
    const i64 period = static_cast<i64>(2 * n);
    i64 kk = ((k % period) + period) % period;
    if (kk == 0) return a;
    Poly out = a;
    if (a.rep() == Rep::coeff) {
        for (std::size_t i = 0; i < a.limb_count(); ++i) {
            const Modulus& m = a.limb_mod(i);
            const u64* src = a.limb_data(i);
            u64* dst = out.limb_data(i);
            for (u64 j = 0; j < n; ++j) {
                u64 e = (j + static_cast<u64>(kk)) % (2 * n);
                u64 v = src[j];
                if (e >= n) {
                    e -= n;
                    v = mod_neg(v, m);
                }
                dst[e] = v;
            }
        }
    } else {
        // Pointwise multiply by psi^(k*e_j) at each evaluation point.
        auto exps = eval_point_exponents(n);
        for (std::size_t i = 0; i < a.limb_count(); ++i) {
            const Modulus& m = a.limb_mod(i);
            const TwiddleTable& tw = ctx.table(m, n);
            (void)tw;
            u64 psi = mod_pow(m.ntt_root, m.ring_degree / n, m);
            const u64* src = a.limb_data(i);
            u64* dst = out.limb_data(i);
            for (u64 j = 0; j < n; ++j) {
                u64 e = static_cast<u64>((u128(kk) * exps[j]) % (2 * n));
                dst[j] = mod_mul(src[j], mod_pow(psi, e, m), m);
            }
        }
    }
    return out;
}

} // namespace fab
