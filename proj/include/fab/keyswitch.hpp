// SPDX-License-Identifier: Apache-2.0

#ifndef FAB_KEYSWITCH_HPP
#define FAB_KEYSWITCH_HPP

#include <string>

#include "fab/keys.hpp"
#include "fab/trace.hpp"

namespace fab {

enum class Datapath { reference, modified };

/// Per-call instrumentation. NTT/iNTT counts are limb transforms; modmul
/// counts are poly-wise (one unit = one N-point modular multiply).
struct KsCounters {
    u64 ntt = 0;
    u64 intt = 0;
    u64 modmul = 0;
    u64 basis_convert_modmul = 0;
    u64 key_bytes_streamed = 0;
    u64 peak_onchip_bytes = 0;
    std::string report() const;
};

/// Digit layout and datapath selection for key switching at one level.
struct KeySwitchPlan {
    std::shared_ptr<const RnsBasis> basis;
    std::size_t level_limbs = 0; ///< current limb count of the input
    std::size_t alpha = 0;
    std::size_t dnum = 0;
    Datapath path = Datapath::modified;
    std::vector<std::vector<std::size_t>> digits; ///< source limb ids per digit
    std::vector<std::size_t> raised_ids;          ///< [0, level) plus extensions
    std::vector<std::size_t> ext_ids;
    u64 poly_bytes = 0; ///< serialized bytes of one limb polynomial

    static KeySwitchPlan create(std::shared_ptr<const RnsBasis> basis, std::size_t level_limbs,
                                std::size_t dnum, Datapath path);
};

/// One digit of the decomposition: the unchanged source limbs plus, after
/// mod_up, the generated limbs of the raised basis.
struct DigitBlock {
    std::size_t index = 0;
    std::vector<std::size_t> source_ids;
    std::vector<std::size_t> generated_ids;
    Poly source;    ///< evaluation representation, source limbs
    Poly generated; ///< evaluation representation after mod_up
};

/// Split an evaluation-representation element into beta <= dnum digit blocks.
std::vector<DigitBlock> decomp(const Poly& a, const KeySwitchPlan& plan);

/// Generate the missing raised-basis limbs of a digit: iNTT the sources,
/// fast base conversion with product reuse, NTT only the generated limbs.
void mod_up(DigitBlock& d, const KeySwitchPlan& plan, const NttContext& ntt,
            KsCounters* counters = nullptr, OpTrace* trace = nullptr);

/// Multiply-accumulate the unchanged source limbs of a digit against the
/// matching key limbs.
void kskip_partial(Poly& acc_a, Poly& acc_b, const DigitBlock& d, const SwitchingKey& ksk,
                   KsCounters* counters = nullptr);

/// Same over the generated limbs, completing the inner product for a digit.
void kskip_complete(Poly& acc_a, Poly& acc_b, const DigitBlock& d, const SwitchingKey& ksk,
                    KsCounters* counters = nullptr);

/// Divide the raised accumulator by P: convert the extension part down,
/// subtract, multiply by P^-1 on each original limb.
Poly mod_down(const Poly& acc, const KeySwitchPlan& plan, const NttContext& ntt,
              KsCounters* counters = nullptr, OpTrace* trace = nullptr);

/// Full key switch of one ring element. Modified and reference datapaths
/// produce bit-identical outputs; they differ in operation counts and in
/// the modeled on-chip working set.
std::pair<Poly, Poly> key_switch(const Poly& part, const SwitchingKey& ksk,
                                 const KeySwitchPlan& plan, const NttContext& ntt,
                                 KsCounters* counters = nullptr, OpTrace* trace = nullptr);

} // namespace fab

#endif
