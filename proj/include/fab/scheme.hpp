// SPDX-License-Identifier: Apache-2.0

#ifndef FAB_SCHEME_HPP
#define FAB_SCHEME_HPP

#include "fab/encoder.hpp"
#include "fab/keyswitch.hpp"
#include "fab/sampling.hpp"

namespace fab {

/// Pair of ring elements (a, b) with b + a*s = scale*m + e, plus level and
/// scale metadata. Limbs are always the chain prefix [0, limbs).
struct Ciphertext {
    Poly a;
    Poly b;
    double scale = 1.0;
    std::size_t n_slots = 0;

    std::size_t limbs() const { return b.limb_count(); }
    std::size_t level() const { return limbs() - 1; } ///< remaining mult budget
};

/// Scheme context: parameter set, limb chain, transform tables, samplers.
/// Homomorphic operations are pure (fresh outputs); the context itself is
/// safe to share once built.
class Scheme {
public:
    explicit Scheme(SchemeParams params);

    const SchemeParams& params() const { return params_; }
    const std::shared_ptr<const RnsBasis>& basis() const { return basis_; }
    const NttContext& ntt() const { return ntt_; }
    std::size_t top_limbs() const { return params_.original_limbs(); }

    // --- key generation -------------------------------------------------
    SecretKey keygen_secret(u64 seed) const;
    PublicKey keygen_public(const SecretKey& sk, u64 seed) const;
    /// Switching key toward `target_of_s` (e.g. s^2, automorphed s).
    SwitchingKey keygen_switching(const SecretKey& sk, const Poly& source_key, u64 seed,
                                  KeyTag tag, i64 rotation_index = 0, u64 galois = 0) const;
    SwitchingKey keygen_relin(const SecretKey& sk, u64 seed) const;
    SwitchingKey keygen_rotation(const SecretKey& sk, i64 slot_shift, u64 seed) const;
    SwitchingKey keygen_conjugation(const SecretKey& sk, u64 seed) const;
    KeyBundle keygen_bundle(const SecretKey& sk, const std::vector<i64>& rotation_indices,
                            u64 seed) const;

    /// Regenerate the a-rows of a compressed key from its seed.
    void expand_switching_key(SwitchingKey& key) const;

    // --- encryption -----------------------------------------------------
    Ciphertext encrypt(const Poly& pt_coeff, const PublicKey& pk, u64 seed,
                       double scale, std::size_t n_slots) const;
    Ciphertext encrypt_slots(const std::vector<cplx>& slots, const PublicKey& pk, u64 seed,
                             double scale, std::size_t limbs) const;
    Poly decrypt(const Ciphertext& ct, const SecretKey& sk) const;
    std::vector<cplx> decrypt_slots(const Ciphertext& ct, const SecretKey& sk) const;

    // --- homomorphic operations ------------------------------------------
    Ciphertext add(const Ciphertext& c1, const Ciphertext& c2) const;
    Ciphertext sub(const Ciphertext& c1, const Ciphertext& c2) const;
    Ciphertext add_plain(const Ciphertext& ct, const Poly& pt_eval, double pt_scale_ignored = 0) const;
    Ciphertext negate(const Ciphertext& ct) const;

    /// Tensor + relinearize + rescale; level drops by one.
    Ciphertext mult(const Ciphertext& c1, const Ciphertext& c2, const SwitchingKey& relin,
                    KsCounters* counters = nullptr, OpTrace* trace = nullptr) const;
    /// Plaintext product followed by rescale.
    Ciphertext mult_plain(const Ciphertext& ct, const Poly& pt_eval, double pt_scale) const;
    /// Plaintext product without rescale (scale multiplies).
    Ciphertext mult_plain_raw(const Ciphertext& ct, const Poly& pt_eval, double pt_scale) const;

    /// Degree-2 intermediate from a tensor product (no relinearization).
    struct Tensor {
        Poly d0, d1, d2;
        double scale;
        std::size_t n_slots;
    };
    Tensor tensor(const Ciphertext& c1, const Ciphertext& c2) const;
    static void tensor_add_inplace(Tensor& acc, const Tensor& t);
    Ciphertext relinearize(const Tensor& t, const SwitchingKey& relin,
                           KsCounters* counters = nullptr, OpTrace* trace = nullptr) const;

    Ciphertext rescale(const Ciphertext& ct) const;
    /// Drop limbs without dividing the encrypted value (modulus reduction).
    Ciphertext mod_down_to(const Ciphertext& ct, std::size_t limbs) const;
    /// Exact multiply by integer constant (no level cost, scale unchanged).
    Ciphertext mult_integer(const Ciphertext& ct, i64 k) const;
    /// Exact multiply by the monomial X^k (slotwise by i^(..) phases).
    Ciphertext mult_monomial(const Ciphertext& ct, i64 k) const;

    /// Slot rotation toward lower indices: out[j] = in[j + k mod n].
    Ciphertext rotate_left(const Ciphertext& ct, i64 k, const SwitchingKey& key,
                           KsCounters* counters = nullptr, OpTrace* trace = nullptr) const;
    /// Vector rotation as in the scheme definition: out[j] = in[j - k mod n].
    Ciphertext rotate(const Ciphertext& ct, i64 k, const KeyBundle& keys,
                      KsCounters* counters = nullptr, OpTrace* trace = nullptr) const;
    Ciphertext conjugate(const Ciphertext& ct, const SwitchingKey& conj_key,
                         KsCounters* counters = nullptr, OpTrace* trace = nullptr) const;

    /// Galois element for a left rotation by k slots.
    u64 galois_for_left_rotation(i64 k) const;
    const AutomorphTables& automorph_tables(u64 galois) const;

    /// Apply an arbitrary Galois automorphism with its switching key.
    Ciphertext apply_galois(const Ciphertext& ct, u64 galois, const SwitchingKey& key,
                            KsCounters* counters = nullptr, OpTrace* trace = nullptr) const;

    /// Add a real constant to every slot (exact, no level cost).
    Ciphertext add_const(const Ciphertext& ct, double v) const;
    /// Multiply by a real scalar encoded at `enc_scale` (no rescale).
    Ciphertext mult_scalar_raw(const Ciphertext& ct, double v, double enc_scale) const;
    /// Bring a ciphertext to exactly (limbs, scale) via a unit scalar
    /// product and one rescale.
    Ciphertext retarget(const Ciphertext& ct, std::size_t limbs, double scale) const;

    /// Switch a ciphertext to be decryptable under another key. The
    /// switching key must encrypt P * s_source.
    Ciphertext switch_key(const Ciphertext& ct, const SwitchingKey& ksk, Datapath path,
                          KsCounters* counters = nullptr, OpTrace* trace = nullptr) const;

    Datapath datapath() const { return datapath_; }
    void set_datapath(Datapath d) { datapath_ = d; }

    KeySwitchPlan plan_at(std::size_t limbs, Datapath path) const;

    // --- helpers ----------------------------------------------------------
    std::vector<std::size_t> prefix_ids(std::size_t limbs) const;
    Poly encode_at(const std::vector<cplx>& slots, double scale, std::size_t limbs) const;
    /// Encode then transform to evaluation representation.
    Poly encode_eval(const std::vector<cplx>& slots, double scale, std::size_t limbs) const;

private:
    SchemeParams params_;
    std::shared_ptr<const RnsBasis> basis_;
    NttContext ntt_;
    Datapath datapath_ = Datapath::modified;
    mutable std::map<u64, AutomorphTables> automorph_cache_;
};

} // namespace fab

#endif
