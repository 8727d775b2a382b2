// SPDX-License-Identifier: Apache-2.0

#include "fab/keyswitch.hpp"

#include <algorithm>
#include <sstream>

namespace fab {

std::string KsCounters::report() const {
    std::ostringstream os;
    os << "{ntt_count: " << ntt << ", intt_count: " << intt << ", modmul_count: " << modmul
       << ", key_bytes_streamed: " << key_bytes_streamed
       << ", peak_onchip_bytes: " << peak_onchip_bytes << "}";
    return os.str();
}

KeySwitchPlan KeySwitchPlan::create(std::shared_ptr<const RnsBasis> basis,
                                    std::size_t level_limbs, std::size_t dnum, Datapath path) {
    FAB_REQUIRE(level_limbs >= 1, "KeySwitchPlan: need at least one limb");
    FAB_REQUIRE(level_limbs <= basis->original_count(), "KeySwitchPlan: level exceeds chain");
    KeySwitchPlan plan;
    plan.level_limbs = level_limbs;
    plan.dnum = dnum;
    plan.alpha = (basis->original_count() + dnum - 1) / dnum;
    plan.path = path;
    const std::size_t beta = (level_limbs + plan.alpha - 1) / plan.alpha;
    for (std::size_t d = 0; d < beta; ++d) {
        std::vector<std::size_t> block;
        for (std::size_t i = d * plan.alpha; i < std::min(level_limbs, (d + 1) * plan.alpha); ++i)
            block.push_back(i);
        plan.digits.push_back(std::move(block));
    }
    for (std::size_t i = 0; i < level_limbs; ++i) plan.raised_ids.push_back(i);
    for (std::size_t i = basis->original_count(); i < basis->size(); ++i) {
        plan.raised_ids.push_back(i);
        plan.ext_ids.push_back(i);
    }
    // On-chip accounting size of one limb polynomial: N * log q bits.
    plan.poly_bytes = basis->ring_degree() * static_cast<u64>(basis->limb(0).log_q) / 8;
    plan.basis = std::move(basis);
    return plan;
}

std::vector<DigitBlock> decomp(const Poly& a, const KeySwitchPlan& plan) {
    FAB_REQUIRE(a.rep() == Rep::eval, "decomp: evaluation representation required");
    FAB_REQUIRE(a.limb_count() == plan.level_limbs, "decomp: limb count mismatch");
    FAB_REQUIRE(plan.level_limbs >= 1, "decomp: empty input");
    for (std::size_t i = 0; i < a.limb_count(); ++i)
        FAB_REQUIRE(a.limb_ids()[i] == i, "decomp: input limbs must be the chain prefix");
    std::vector<DigitBlock> blocks;
    blocks.reserve(plan.digits.size());
    for (std::size_t d = 0; d < plan.digits.size(); ++d) {
        DigitBlock b;
        b.index = d;
        b.source_ids = plan.digits[d];
        for (auto id : plan.raised_ids) {
            if (std::find(b.source_ids.begin(), b.source_ids.end(), id) == b.source_ids.end())
                b.generated_ids.push_back(id);
        }
        b.source = Poly(a.basis(), b.source_ids, Rep::eval);
        const u64 n = a.ring_degree();
        for (std::size_t i = 0; i < b.source_ids.size(); ++i) {
            const u64* src = a.limb_data(b.source_ids[i]); // digit limbs are a prefix slice
            std::copy(src, src + n, b.source.limb_data(i));
        }
        blocks.push_back(std::move(b));
    }
    return blocks;
}

void mod_up(DigitBlock& d, const KeySwitchPlan& plan, const NttContext& ntt,
            KsCounters* counters, OpTrace* trace) {
    const u64 n = plan.basis->ring_degree();
    // Sources to coefficient representation for the conversion.
    Poly coeff = d.source;
    poly_intt(coeff, ntt);
    if (counters) counters->intt += coeff.limb_count();
    if (trace) trace->emit(OpKind::intt, coeff.limb_count(), n);

    const auto& table = plan.basis->conv_table(d.source_ids, d.generated_ids);
    std::vector<const u64*> rows(coeff.limb_count());
    for (std::size_t i = 0; i < coeff.limb_count(); ++i) rows[i] = coeff.limb_data(i);
    ConvCounters cc;
    auto converted = basis_convert(rows, n, *plan.basis, table, /*exact=*/false, &cc);
    if (counters) {
        counters->basis_convert_modmul += cc.modmul;
        counters->modmul += cc.modmul;
    }

    d.generated = Poly(d.source.basis(), d.generated_ids, Rep::coeff);
    for (std::size_t i = 0; i < d.generated_ids.size(); ++i)
        std::copy(converted[i].begin(), converted[i].end(), d.generated.limb_data(i));
    poly_ntt(d.generated, ntt);
    if (counters) counters->ntt += d.generated.limb_count();
    if (trace) trace->emit(OpKind::ntt, d.generated.limb_count(), n);
}

namespace {

/// acc[limb] += digit[limb] * key[limb] for the limbs named in `ids`.
void accumulate(Poly& acc_a, Poly& acc_b, const Poly& digit_part,
                const std::vector<std::size_t>& ids, const SwitchingKey& ksk, std::size_t column,
                KsCounters* counters) {
    const u64 n = acc_a.ring_degree();
    const Poly& ka = ksk.a_rows[column];
    const Poly& kb = ksk.b_rows[column];
    // Map limb id -> position within each poly.
    auto pos_in = [](const Poly& p, std::size_t id) {
        const auto& v = p.limb_ids();
        return static_cast<std::size_t>(std::find(v.begin(), v.end(), id) - v.begin());
    };
    for (auto id : ids) {
        std::size_t pd = pos_in(digit_part, id);
        std::size_t pk = pos_in(ka, id);
        std::size_t pa = pos_in(acc_a, id);
        const Modulus& m = acc_a.basis()->limb(id);
        const u64* x = digit_part.limb_data(pd);
        const u64* a = ka.limb_data(pk);
        const u64* b = kb.limb_data(pk);
        u64* oa = acc_a.limb_data(pa);
        u64* ob = acc_b.limb_data(pa);
        for (u64 j = 0; j < n; ++j) {
            oa[j] = mod_add(oa[j], mod_mul(x[j], a[j], m), m);
            ob[j] = mod_add(ob[j], mod_mul(x[j], b[j], m), m);
        }
        if (counters) counters->modmul += 2;
    }
}

} // namespace

void kskip_partial(Poly& acc_a, Poly& acc_b, const DigitBlock& d, const SwitchingKey& ksk,
                   KsCounters* counters) {
    FAB_REQUIRE(acc_a.same_shape(acc_b), "kskip: accumulator shape mismatch");
    accumulate(acc_a, acc_b, d.source, d.source_ids, ksk, d.index, counters);
}

void kskip_complete(Poly& acc_a, Poly& acc_b, const DigitBlock& d, const SwitchingKey& ksk,
                    KsCounters* counters) {
    FAB_REQUIRE(d.generated.limb_count() == d.generated_ids.size(),
                "kskip_complete: mod_up has not run");
    accumulate(acc_a, acc_b, d.generated, d.generated_ids, ksk, d.index, counters);
}

Poly mod_down(const Poly& acc, const KeySwitchPlan& plan, const NttContext& ntt,
              KsCounters* counters, OpTrace* trace) {
    const u64 n = plan.basis->ring_degree();
    const std::size_t ell = plan.level_limbs;
    const auto& ext = plan.ext_ids;
    FAB_REQUIRE(acc.limb_ids() == plan.raised_ids, "mod_down: accumulator not in raised basis");

    // Extension part to coefficient representation.
    Poly ext_part(acc.basis(), ext, Rep::eval);
    for (std::size_t i = 0; i < ext.size(); ++i) {
        const u64* src = acc.limb_data(ell + i);
        std::copy(src, src + n, ext_part.limb_data(i));
    }
    poly_intt(ext_part, ntt);
    if (counters) counters->intt += ext_part.limb_count();
    if (trace) trace->emit(OpKind::intt, ext_part.limb_count(), n);

    std::vector<std::size_t> orig_ids(plan.raised_ids.begin(), plan.raised_ids.begin() + ell);
    const auto& table = plan.basis->conv_table(ext, orig_ids);
    std::vector<const u64*> rows(ext.size());
    for (std::size_t i = 0; i < ext.size(); ++i) rows[i] = ext_part.limb_data(i);
    ConvCounters cc;
    // The downward conversion uses the overshoot-corrected mode: a stray
    // multiple of P here lands directly on the output coefficients.
    auto converted = basis_convert(rows, n, *plan.basis, table, /*exact=*/true, &cc);
    if (counters) {
        counters->basis_convert_modmul += cc.modmul;
        counters->modmul += cc.modmul;
    }

    Poly conv(acc.basis(), orig_ids, Rep::coeff);
    for (std::size_t i = 0; i < ell; ++i)
        std::copy(converted[i].begin(), converted[i].end(), conv.limb_data(i));
    poly_ntt(conv, ntt);
    if (counters) counters->ntt += conv.limb_count();
    if (trace) trace->emit(OpKind::ntt, conv.limb_count(), n);

    Poly out(acc.basis(), orig_ids, Rep::eval);
    for (std::size_t i = 0; i < ell; ++i) {
        const Modulus& m = plan.basis->limb(orig_ids[i]);
        // P^-1 mod q_i.
        u64 p_mod = 1;
        for (auto e : ext) p_mod = mod_mul(p_mod, plan.basis->limb(e).q % m.q, m);
        const u64 p_inv = mod_inv(p_mod, m);
        const u64* ai = acc.limb_data(i);
        const u64* ci = conv.limb_data(i);
        u64* oi = out.limb_data(i);
        for (u64 j = 0; j < n; ++j) oi[j] = mod_mul(mod_sub(ai[j], ci[j], m), p_inv, m);
        if (counters) counters->modmul += 1;
    }
    return out;
}

std::pair<Poly, Poly> key_switch(const Poly& part, const SwitchingKey& ksk,
                                 const KeySwitchPlan& plan, const NttContext& ntt,
                                 KsCounters* counters, OpTrace* trace) {
    FAB_REQUIRE(ksk.dnum() >= plan.digits.size(), "key_switch: key has too few digits");
    const u64 n = plan.basis->ring_degree();
    auto blocks = decomp(part, plan);

    Poly acc_a(part.basis(), plan.raised_ids, Rep::eval);
    Poly acc_b(part.basis(), plan.raised_ids, Rep::eval);

    const u64 key_block_polys = 2 * plan.raised_ids.size();
    if (plan.path == Datapath::modified) {
        // Working set: all dnum*(level+alpha) result limbs stay resident;
        // the key streams through a four-polynomial buffer per digit.
        if (trace) {
            trace->emit(OpKind::residency_alloc, plan.digits.size() * plan.raised_ids.size(), n);
            trace->emit(OpKind::residency_alloc, 4, n);
        }
        for (auto& d : blocks) {
            kskip_partial(acc_a, acc_b, d, ksk, counters);
            mod_up(d, plan, ntt, counters, trace);
            kskip_complete(acc_a, acc_b, d, ksk, counters);
            if (counters) counters->key_bytes_streamed += key_block_polys * plan.poly_bytes;
            if (trace) trace->emit(OpKind::key_digit_stream, key_block_polys, n);
        }
        if (counters)
            counters->peak_onchip_bytes =
                std::max(counters->peak_onchip_bytes,
                         (plan.digits.size() * plan.raised_ids.size() + 4) * plan.poly_bytes);
        if (trace) {
            trace->emit(OpKind::residency_free, plan.digits.size() * plan.raised_ids.size() + 4, n);
        }
    } else {
        // Reference order: finish every ModUp (sources pass through an
        // iNTT/NTT round trip), then run the whole inner product with all
        // keys resident.
        const u64 naive_resident = 2 * ksk.dnum() * plan.raised_ids.size() // all key polys
                                   + 2 * plan.raised_ids.size();          // raised ciphertext
        if (trace) trace->emit(OpKind::residency_alloc, naive_resident, n);
        for (auto& d : blocks) {
            // Round-trip the unchanged limbs as the original datapath does;
            // transform exactness keeps them bit-identical.
            Poly roundtrip = d.source;
            poly_intt(roundtrip, ntt);
            poly_ntt(roundtrip, ntt);
            if (counters) {
                counters->ntt += roundtrip.limb_count();
                counters->intt += roundtrip.limb_count();
            }
            if (trace) {
                trace->emit(OpKind::intt, roundtrip.limb_count(), n);
                trace->emit(OpKind::ntt, roundtrip.limb_count(), n);
            }
            d.source = std::move(roundtrip);
            mod_up(d, plan, ntt, counters, trace);
        }
        for (auto& d : blocks) {
            kskip_partial(acc_a, acc_b, d, ksk, counters);
            kskip_complete(acc_a, acc_b, d, ksk, counters);
            if (counters) counters->key_bytes_streamed += key_block_polys * plan.poly_bytes;
        }
        if (counters)
            counters->peak_onchip_bytes =
                std::max(counters->peak_onchip_bytes, naive_resident * plan.poly_bytes);
        if (trace) trace->emit(OpKind::residency_free, naive_resident, n);
    }

    Poly out_a = mod_down(acc_a, plan, ntt, counters, trace);
    Poly out_b = mod_down(acc_b, plan, ntt, counters, trace);
    return {std::move(out_a), std::move(out_b)};
}

} // namespace fab
