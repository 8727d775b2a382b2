// SPDX-License-Identifier: Apache-2.0

#include "fab/scheme.hpp"

#include <algorithm>
#include <cmath>

namespace fab {

namespace {
constexpr u64 kRoleSecret = 0x5345;
constexpr u64 kRolePublic = 0x5055;
constexpr u64 kRoleKeyA = 0x4b41;
constexpr u64 kRoleKeyE = 0x4b45;
constexpr u64 kRoleEncU = 0x4555;
constexpr u64 kRoleEncE = 0x4545;
} // namespace

Scheme::Scheme(SchemeParams params) : params_(std::move(params)) {
    params_.validate();
    basis_ = build_basis(params_);
}

std::vector<std::size_t> Scheme::prefix_ids(std::size_t limbs) const {
    FAB_REQUIRE(limbs >= 1 && limbs <= top_limbs(), "prefix_ids: limb count out of range");
    std::vector<std::size_t> ids(limbs);
    for (std::size_t i = 0; i < limbs; ++i) ids[i] = i;
    return ids;
}

namespace {
std::vector<std::size_t> all_ids(const RnsBasis& b) {
    std::vector<std::size_t> ids(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) ids[i] = i;
    return ids;
}
} // namespace

SecretKey Scheme::keygen_secret(u64 seed) const {
    RandomStream rng(derive_seed(seed, kRoleSecret));
    Poly s = sample_ternary(basis_, all_ids(*basis_), rng);
    poly_ntt(s, ntt_);
    return SecretKey{std::move(s)};
}

PublicKey Scheme::keygen_public(const SecretKey& sk, u64 seed) const {
    auto ids = prefix_ids(top_limbs());
    RandomStream rng_a(derive_seed(seed, kRolePublic, 0));
    RandomStream rng_e(derive_seed(seed, kRolePublic, 1));
    Poly a = sample_uniform(basis_, ids, Rep::eval, rng_a);
    Poly e = sample_gaussian(basis_, ids, rng_e);
    poly_ntt(e, ntt_);
    // b = -a*s + e
    Poly s_pref(basis_, ids, Rep::eval);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const u64* src = sk.s.limb_data(i);
        std::copy(src, src + basis_->ring_degree(), s_pref.limb_data(i));
    }
    Poly b = poly_negate(poly_mul(a, s_pref));
    poly_add_inplace(b, e);
    return PublicKey{std::move(a), std::move(b)};
}

SwitchingKey Scheme::keygen_switching(const SecretKey& sk, const Poly& source_key, u64 seed,
                                      KeyTag tag, i64 rotation_index, u64 galois) const {
    FAB_REQUIRE(source_key.limb_count() == basis_->size(),
                "keygen_switching: source key must span the raised basis");
    const std::size_t dnum = params_.dnum;
    const std::size_t alpha = params_.alpha();
    const auto ids = all_ids(*basis_);
    const u64 n = basis_->ring_degree();

    SwitchingKey key;
    key.tag = tag;
    key.rotation_index = rotation_index;
    key.galois = galois;
    key.seed = derive_seed(seed, kRoleKeyA,
                           (static_cast<u64>(tag) << 56) ^ static_cast<u64>(rotation_index) ^ galois);
    key.a_rows.reserve(dnum);
    key.b_rows.reserve(dnum);

    for (std::size_t col = 0; col < dnum; ++col) {
        RandomStream rng_a(derive_seed(key.seed, kRoleKeyA, col));
        RandomStream rng_e(derive_seed(key.seed, kRoleKeyE, col));
        Poly a = sample_uniform(basis_, ids, Rep::eval, rng_a);
        Poly e = sample_gaussian(basis_, ids, rng_e);
        poly_ntt(e, ntt_);
        Poly b = poly_negate(poly_mul(a, sk.s));
        poly_add_inplace(b, e);
        // + (P mod q_i) * source_key on the limbs of digit block `col`.
        std::vector<u64> w(ids.size(), 0);
        for (std::size_t i = col * alpha; i < std::min(top_limbs(), (col + 1) * alpha); ++i) {
            const Modulus& m = basis_->limb(i);
            u64 p_mod = 1;
            for (std::size_t e_i = top_limbs(); e_i < basis_->size(); ++e_i)
                p_mod = mod_mul(p_mod, basis_->limb(e_i).q % m.q, m);
            w[i] = p_mod;
        }
        Poly weighted = poly_scalar_mul(source_key, w);
        poly_add_inplace(b, weighted);
        (void)n;
        key.a_rows.push_back(std::move(a));
        key.b_rows.push_back(std::move(b));
    }
    return key;
}

void Scheme::expand_switching_key(SwitchingKey& key) const {
    if (!key.a_rows.empty()) return;
    const auto ids = all_ids(*basis_);
    for (std::size_t col = 0; col < key.b_rows.size(); ++col) {
        RandomStream rng_a(derive_seed(key.seed, kRoleKeyA, col));
        key.a_rows.push_back(sample_uniform(basis_, ids, Rep::eval, rng_a));
    }
}

SwitchingKey Scheme::keygen_relin(const SecretKey& sk, u64 seed) const {
    Poly s2 = poly_mul(sk.s, sk.s);
    return keygen_switching(sk, s2, seed, KeyTag::relin);
}

u64 Scheme::galois_for_left_rotation(i64 k) const {
    const u64 order = params_.N / 2; // order of 5 mod 2N
    u64 kk = static_cast<u64>(((k % static_cast<i64>(order)) + static_cast<i64>(order)) %
                              static_cast<i64>(order));
    u64 g = 1;
    const u64 two_n = 2 * params_.N;
    u64 base = 5;
    while (kk > 0) {
        if (kk & 1) g = static_cast<u64>((u128(g) * base) % two_n);
        base = static_cast<u64>((u128(base) * base) % two_n);
        kk >>= 1;
    }
    return g;
}

const AutomorphTables& Scheme::automorph_tables(u64 galois) const {
    auto it = automorph_cache_.find(galois);
    if (it == automorph_cache_.end())
        it = automorph_cache_.emplace(galois, build_automorph_tables(params_.N, galois)).first;
    return it->second;
}

SwitchingKey Scheme::keygen_rotation(const SecretKey& sk, i64 slot_shift, u64 seed) const {
    const u64 g = galois_for_left_rotation(slot_shift);
    Poly s_rot = poly_automorph(sk.s, automorph_tables(g));
    return keygen_switching(sk, s_rot, seed, KeyTag::rotation, slot_shift, g);
}

SwitchingKey Scheme::keygen_conjugation(const SecretKey& sk, u64 seed) const {
    const u64 g = 2 * params_.N - 1;
    Poly s_conj = poly_automorph(sk.s, automorph_tables(g));
    return keygen_switching(sk, s_conj, seed, KeyTag::conjugate, 0, g);
}

KeyBundle Scheme::keygen_bundle(const SecretKey& sk, const std::vector<i64>& rotation_indices,
                                u64 seed) const {
    KeyBundle kb;
    kb.pk = keygen_public(sk, seed);
    kb.relin = keygen_relin(sk, derive_seed(seed, 1));
    kb.conj = keygen_conjugation(sk, derive_seed(seed, 2));
    for (i64 k : rotation_indices) {
        if (kb.rotations.count(k)) continue;
        kb.rotations.emplace(k, keygen_rotation(sk, k, derive_seed(seed, 3, static_cast<u64>(k))));
    }
    return kb;
}

Ciphertext Scheme::encrypt(const Poly& pt_coeff, const PublicKey& pk, u64 seed,
                           double scale, std::size_t n_slots) const {
    FAB_REQUIRE(pt_coeff.limb_count() >= 1, "encrypt: plaintext has no limbs");
    const std::size_t limbs = pt_coeff.limb_count();
    auto ids = prefix_ids(limbs);
    Poly m = pt_coeff;
    if (m.rep() == Rep::coeff) poly_ntt(m, ntt_);

    RandomStream rng_u(derive_seed(seed, kRoleEncU));
    RandomStream rng_e0(derive_seed(seed, kRoleEncE, 0));
    RandomStream rng_e1(derive_seed(seed, kRoleEncE, 1));
    Poly u = sample_ternary(basis_, ids, rng_u);
    poly_ntt(u, ntt_);
    Poly e0 = sample_gaussian(basis_, ids, rng_e0);
    poly_ntt(e0, ntt_);
    Poly e1 = sample_gaussian(basis_, ids, rng_e1);
    poly_ntt(e1, ntt_);

    auto slice = [&](const Poly& p) {
        Poly out(basis_, ids, Rep::eval);
        for (std::size_t i = 0; i < limbs; ++i) {
            const u64* src = p.limb_data(i);
            std::copy(src, src + basis_->ring_degree(), out.limb_data(i));
        }
        return out;
    };
    Poly pka = slice(pk.a);
    Poly pkb = slice(pk.b);

    Ciphertext ct;
    ct.a = poly_mul(pka, u);
    poly_add_inplace(ct.a, e1);
    ct.b = poly_mul(pkb, u);
    poly_add_inplace(ct.b, e0);
    poly_add_inplace(ct.b, m);
    ct.scale = scale;
    ct.n_slots = n_slots;
    return ct;
}

Ciphertext Scheme::encrypt_slots(const std::vector<cplx>& slots, const PublicKey& pk, u64 seed,
                                 double scale, std::size_t limbs) const {
    Poly pt = encode(slots, scale, basis_, prefix_ids(limbs));
    return encrypt(pt, pk, seed, scale, slots.size());
}

Poly Scheme::decrypt(const Ciphertext& ct, const SecretKey& sk) const {
    Poly s_pref(basis_, ct.b.limb_ids(), Rep::eval);
    for (std::size_t i = 0; i < ct.b.limb_count(); ++i) {
        const u64* src = sk.s.limb_data(ct.b.limb_ids()[i]);
        std::copy(src, src + basis_->ring_degree(), s_pref.limb_data(i));
    }
    Poly m = poly_mul(ct.a, s_pref);
    poly_add_inplace(m, ct.b);
    poly_intt(m, ntt_);
    return m;
}

std::vector<cplx> Scheme::decrypt_slots(const Ciphertext& ct, const SecretKey& sk) const {
    Poly m = decrypt(ct, sk);
    return decode(m, ct.n_slots, ct.scale);
}

namespace {

void check_add_compat(const Ciphertext& c1, const Ciphertext& c2) {
    FAB_REQUIRE(c1.a.ring_degree() == c2.a.ring_degree(), "add: ring degree mismatch");
    FAB_REQUIRE(c1.n_slots == c2.n_slots, "add: slot count mismatch");
    const double ratio = c1.scale / c2.scale;
    FAB_REQUIRE(ratio > 0.999999 && ratio < 1.000001, "add: operand scales differ");
}

} // namespace

Ciphertext Scheme::add(const Ciphertext& c1, const Ciphertext& c2) const {
    check_add_compat(c1, c2);
    const Ciphertext* lo = &c1;
    const Ciphertext* hi = &c2;
    if (lo->limbs() < hi->limbs()) std::swap(lo, hi);
    Ciphertext a = mod_down_to(*lo, hi->limbs());
    Ciphertext out = *hi;
    poly_add_inplace(out.a, a.a);
    poly_add_inplace(out.b, a.b);
    return out;
}

Ciphertext Scheme::sub(const Ciphertext& c1, const Ciphertext& c2) const {
    return add(c1, negate(c2));
}

Ciphertext Scheme::negate(const Ciphertext& ct) const {
    Ciphertext out = ct;
    out.a = poly_negate(ct.a);
    out.b = poly_negate(ct.b);
    return out;
}

Ciphertext Scheme::add_plain(const Ciphertext& ct, const Poly& pt_eval, double) const {
    FAB_REQUIRE(pt_eval.rep() == Rep::eval, "add_plain: plaintext must be in evaluation rep");
    Ciphertext out = ct;
    Poly pt = pt_eval;
    if (pt.limb_count() > out.limbs()) pt.drop_to(out.limbs());
    FAB_REQUIRE(pt.limb_count() == out.limbs(), "add_plain: plaintext limbs too few");
    poly_add_inplace(out.b, pt);
    return out;
}

Scheme::Tensor Scheme::tensor(const Ciphertext& c1, const Ciphertext& c2) const {
    FAB_REQUIRE(c1.n_slots == c2.n_slots, "tensor: slot count mismatch");
    std::size_t limbs = std::min(c1.limbs(), c2.limbs());
    Ciphertext x = mod_down_to(c1, limbs);
    Ciphertext y = mod_down_to(c2, limbs);
    Tensor t;
    t.d0 = poly_mul(x.b, y.b);
    t.d1 = poly_add(poly_mul(x.a, y.b), poly_mul(x.b, y.a));
    t.d2 = poly_mul(x.a, y.a);
    t.scale = x.scale * y.scale;
    t.n_slots = c1.n_slots;
    return t;
}

void Scheme::tensor_add_inplace(Tensor& acc, const Tensor& t) {
    FAB_REQUIRE(std::abs(acc.scale / t.scale - 1.0) < 1e-9, "tensor_add: scales differ");
    poly_add_inplace(acc.d0, t.d0);
    poly_add_inplace(acc.d1, t.d1);
    poly_add_inplace(acc.d2, t.d2);
}

Ciphertext Scheme::relinearize(const Tensor& t, const SwitchingKey& relin,
                               KsCounters* counters, OpTrace* trace) const {
    auto plan = plan_at(t.d2.limb_count(), datapath_);
    auto [ka, kb] = key_switch(t.d2, relin, plan, ntt_, counters, trace);
    Ciphertext out;
    out.a = poly_add(t.d1, ka);
    out.b = poly_add(t.d0, kb);
    out.scale = t.scale;
    out.n_slots = t.n_slots;
    return out;
}

Ciphertext Scheme::mult(const Ciphertext& c1, const Ciphertext& c2, const SwitchingKey& relin,
                        KsCounters* counters, OpTrace* trace) const {
    if (std::min(c1.limbs(), c2.limbs()) < 2)
        throw level_exhausted_error("mult: level exhausted, bootstrapping required");
    Tensor t = tensor(c1, c2);
    Ciphertext out = relinearize(t, relin, counters, trace);
    return rescale(out);
}

Ciphertext Scheme::mult_plain_raw(const Ciphertext& ct, const Poly& pt_eval,
                                  double pt_scale) const {
    FAB_REQUIRE(pt_eval.rep() == Rep::eval, "mult_plain: plaintext must be in evaluation rep");
    Poly pt = pt_eval;
    if (pt.limb_count() > ct.limbs()) pt.drop_to(ct.limbs());
    FAB_REQUIRE(pt.limb_count() == ct.limbs(), "mult_plain: plaintext limbs too few");
    Ciphertext out = ct;
    out.a = poly_mul(ct.a, pt);
    out.b = poly_mul(ct.b, pt);
    out.scale = ct.scale * pt_scale;
    return out;
}

Ciphertext Scheme::mult_plain(const Ciphertext& ct, const Poly& pt_eval, double pt_scale) const {
    if (ct.limbs() < 2)
        throw level_exhausted_error("mult_plain: level exhausted, bootstrapping required");
    return rescale(mult_plain_raw(ct, pt_eval, pt_scale));
}

Ciphertext Scheme::rescale(const Ciphertext& ct) const {
    FAB_REQUIRE(ct.limbs() >= 2, "rescale: cannot drop the base limb");
    const std::size_t ell = ct.limbs();
    const u64 n = basis_->ring_degree();
    const Modulus& q_last = basis_->limb(ell - 1);
    const TwiddleTable& tw_last = ntt_.table(q_last, n);

    Ciphertext out;
    out.scale = ct.scale / static_cast<double>(q_last.q);
    out.n_slots = ct.n_slots;
    for (int part = 0; part < 2; ++part) {
        const Poly& src = part == 0 ? ct.a : ct.b;
        // Last limb to coefficient representation.
        std::vector<u64> last(src.limb_data(ell - 1), src.limb_data(ell - 1) + n);
        ntt_inverse(last.data(), q_last, tw_last);
        Poly dst(basis_, prefix_ids(ell - 1), Rep::eval);
        std::vector<u64> tmp(n);
        for (std::size_t i = 0; i + 1 < ell; ++i) {
            const Modulus& qi = basis_->limb(i);
            const u64 inv = mod_inv(q_last.q % qi.q, qi);
            for (u64 j = 0; j < n; ++j) {
                // Centered residue of the dropped limb, reduced into q_i.
                u64 c = last[j];
                u64 centered = c; // value in [0, q_last)
                u64 r = centered >= q_last.q / 2
                            ? mod_sub(0, (q_last.q - centered) % qi.q, qi)
                            : centered % qi.q;
                tmp[j] = r;
            }
            ntt_forward(tmp.data(), qi, ntt_.table(qi, n));
            const u64* si = src.limb_data(i);
            u64* di = dst.limb_data(i);
            for (u64 j = 0; j < n; ++j) di[j] = mod_mul(mod_sub(si[j], tmp[j], qi), inv, qi);
        }
        if (part == 0)
            out.a = std::move(dst);
        else
            out.b = std::move(dst);
    }
    return out;
}

Ciphertext Scheme::mod_down_to(const Ciphertext& ct, std::size_t limbs) const {
    FAB_REQUIRE(limbs >= 1 && limbs <= ct.limbs(), "mod_down_to: bad limb target");
    if (limbs == ct.limbs()) return ct;
    Ciphertext out = ct;
    out.a.drop_to(limbs);
    out.b.drop_to(limbs);
    return out;
}

Ciphertext Scheme::mult_integer(const Ciphertext& ct, i64 k) const {
    Ciphertext out = ct;
    std::vector<u64> s(ct.limbs());
    for (std::size_t i = 0; i < ct.limbs(); ++i) {
        const Modulus& m = basis_->limb(i);
        u64 kk = k >= 0 ? static_cast<u64>(k) % m.q : m.q - (static_cast<u64>(-k) % m.q);
        s[i] = kk == m.q ? 0 : kk;
    }
    out.a = poly_scalar_mul(ct.a, s);
    out.b = poly_scalar_mul(ct.b, s);
    return out;
}

Ciphertext Scheme::mult_monomial(const Ciphertext& ct, i64 k) const {
    Ciphertext out = ct;
    out.a = poly_monomial_mul(ct.a, k, ntt_);
    out.b = poly_monomial_mul(ct.b, k, ntt_);
    return out;
}

KeySwitchPlan Scheme::plan_at(std::size_t limbs, Datapath path) const {
    return KeySwitchPlan::create(basis_, limbs, params_.dnum, path);
}

Ciphertext Scheme::switch_key(const Ciphertext& ct, const SwitchingKey& ksk, Datapath path,
                              KsCounters* counters, OpTrace* trace) const {
    SwitchingKey expanded;
    const SwitchingKey* key = &ksk;
    if (ksk.a_rows.empty()) {
        expanded = ksk;
        expand_switching_key(expanded);
        key = &expanded;
    }
    auto plan = plan_at(ct.limbs(), path);
    auto [ka, kb] = key_switch(ct.a, *key, plan, ntt_, counters, trace);
    Ciphertext out;
    out.a = std::move(ka);
    out.b = poly_add(ct.b, kb);
    out.scale = ct.scale;
    out.n_slots = ct.n_slots;
    return out;
}

Ciphertext Scheme::apply_galois(const Ciphertext& ct, u64 galois, const SwitchingKey& key,
                                KsCounters* counters, OpTrace* trace) const {
    if (galois == 1) return ct;
    const AutomorphTables& tables = automorph_tables(galois);
    Ciphertext mapped = ct;
    mapped.a = poly_automorph(ct.a, tables);
    mapped.b = poly_automorph(ct.b, tables);
    if (trace) trace->emit(OpKind::automorph, 2 * ct.limbs(), params_.N);
    return switch_key(mapped, key, datapath_, counters, trace);
}

Ciphertext Scheme::rotate_left(const Ciphertext& ct, i64 k, const SwitchingKey& key,
                               KsCounters* counters, OpTrace* trace) const {
    const u64 n = ct.n_slots == 0 ? params_.N / 2 : ct.n_slots;
    i64 kk = ((k % static_cast<i64>(n)) + static_cast<i64>(n)) % static_cast<i64>(n);
    if (kk == 0) return ct;
    const u64 g = galois_for_left_rotation(kk);
    FAB_REQUIRE(key.galois == g || key.rotation_index == kk,
                "rotate: switching key does not match the rotation index");
    return apply_galois(ct, g, key, counters, trace);
}

Ciphertext Scheme::add_const(const Ciphertext& ct, double v) const {
    const long double scaled = static_cast<long double>(v) * ct.scale;
    FAB_REQUIRE(fabsl(scaled) < 4.6e18L, "add_const: constant overflows 63 bits");
    const i64 c = static_cast<i64>(llroundl(scaled));
    Ciphertext out = ct;
    for (std::size_t i = 0; i < out.limbs(); ++i) {
        const Modulus& m = basis_->limb(i);
        u64 r = c >= 0 ? static_cast<u64>(c) % m.q : m.q - (static_cast<u64>(-c) % m.q);
        if (r == m.q) r = 0;
        // A constant polynomial evaluates to the constant at every point.
        u64* d = out.b.limb_data(i);
        for (u64 j = 0; j < basis_->ring_degree(); ++j) d[j] = mod_add(d[j], r, m);
    }
    return out;
}

Ciphertext Scheme::mult_scalar_raw(const Ciphertext& ct, double v, double enc_scale) const {
    const long double scaled = static_cast<long double>(v) * enc_scale;
    FAB_REQUIRE(fabsl(scaled) < 4.6e18L, "mult_scalar_raw: constant overflows 63 bits");
    const i64 c = static_cast<i64>(llroundl(scaled));
    std::vector<u64> s(ct.limbs());
    for (std::size_t i = 0; i < ct.limbs(); ++i) {
        const Modulus& m = basis_->limb(i);
        u64 r = c >= 0 ? static_cast<u64>(c) % m.q : m.q - (static_cast<u64>(-c) % m.q);
        if (r == m.q) r = 0;
        s[i] = r;
    }
    Ciphertext out = ct;
    out.a = poly_scalar_mul(ct.a, s);
    out.b = poly_scalar_mul(ct.b, s);
    out.scale = ct.scale * enc_scale;
    return out;
}

Ciphertext Scheme::retarget(const Ciphertext& ct, std::size_t limbs, double scale) const {
    FAB_REQUIRE(limbs + 1 <= ct.limbs(), "retarget: not enough limbs");
    Ciphertext t = mod_down_to(ct, limbs + 1);
    const double q_drop = static_cast<double>(basis_->limb(limbs).q);
    const double sigma = scale * q_drop / t.scale;
    FAB_REQUIRE(sigma >= 1.0, "retarget: target scale too small for one rescale");
    t = mult_scalar_raw(t, 1.0, sigma);
    t = rescale(t);
    t.scale = scale; // exact by construction, avoid float residue
    return t;
}

Ciphertext Scheme::rotate(const Ciphertext& ct, i64 k, const KeyBundle& keys,
                          KsCounters* counters, OpTrace* trace) const {
    const u64 n = ct.n_slots == 0 ? params_.N / 2 : ct.n_slots;
    i64 left = ((-k % static_cast<i64>(n)) + static_cast<i64>(n)) % static_cast<i64>(n);
    if (left == 0) return ct;
    auto it = keys.rotations.find(left);
    FAB_REQUIRE(it != keys.rotations.end(),
                "rotate: no switching key for rotation index " + std::to_string(k));
    return rotate_left(ct, left, it->second, counters, trace);
}

Poly Scheme::encode_at(const std::vector<cplx>& slots, double scale, std::size_t limbs) const {
    return encode(slots, scale, basis_, prefix_ids(limbs));
}

Poly Scheme::encode_eval(const std::vector<cplx>& slots, double scale, std::size_t limbs) const {
    Poly p = encode_at(slots, scale, limbs);
    poly_ntt(p, ntt_);
    return p;
}

Ciphertext Scheme::conjugate(const Ciphertext& ct, const SwitchingKey& conj_key,
                             KsCounters* counters, OpTrace* trace) const {
    const AutomorphTables& tables = automorph_tables(2 * params_.N - 1);
    Ciphertext conj = ct;
    conj.a = poly_automorph(ct.a, tables);
    conj.b = poly_automorph(ct.b, tables);
    if (trace) trace->emit(OpKind::automorph, 2 * ct.limbs(), params_.N);
    return switch_key(conj, conj_key, datapath_, counters, trace);
}

} // namespace fab
