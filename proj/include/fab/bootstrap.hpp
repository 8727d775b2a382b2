// SPDX-License-Identifier: Apache-2.0

#ifndef FAB_BOOTSTRAP_HPP
#define FAB_BOOTSTRAP_HPP

#include <functional>
#include <set>

#include "fab/scheme.hpp"

namespace fab {

/// Bootstrapping configuration. The homomorphic modular reduction is a
/// single Chebyshev interpolant (degree below 2^9) of the scaled sine with
/// its odd cubic inverse correction composed in, so the evaluation consumes
/// exactly nine levels for every fftIter choice.
struct BootstrapConfig {
    std::size_t n_slots = 64;
    std::size_t fft_iter = 4;       ///< depth of each linear transform
    std::size_t cheby_degree = 380; ///< interpolant degree, <= 511
    double range_k = 12.0;          ///< integer part bound handled by EvalMod
    std::size_t encap_weight = 32;  ///< ephemeral key weight for ModRaise; 0 disables
    double delta_boot = 0.0;        ///< EvalMod working scale; 0 picks the base limb size

    std::size_t l_boot() const { return 2 * fft_iter + 9; }
};

/// One stage of a decomposed linear transform: rotated diagonals plus the
/// baby-step/giant-step split.
struct LinearStage {
    std::map<i64, std::vector<cplx>> diagonals; ///< offset -> per-slot values
    std::size_t bsgs_baby = 1;                  ///< T: offsets split as g*T + b
    std::vector<i64> baby_shifts;
    std::vector<i64> giant_shifts;
};

/// Decomposed transform with per-stage dense oracles for testing.
struct DiagonalPlan {
    std::vector<LinearStage> stages;
    std::vector<std::vector<std::vector<cplx>>> dense_stage; ///< test oracle
};

/// The pipeline runs under a low-weight ephemeral working key: every noise
/// term added before the modular reduction is amplified by the reduction
/// slope, and both rescale rounding and key-switch rounding grow with the
/// key weight. The ciphertext enters via to_ephemeral at the lowest level
/// and returns to the dense key at the end of SlotToCoeff. With
/// encap_weight = 0 everything stays under the dense key.
struct BootstrapKeys {
    SwitchingKey relin; ///< under the working key
    SwitchingKey conj;  ///< under the working key
    std::map<u64, SwitchingKey> galois; ///< rotations, under the working key
    SwitchingKey to_ephemeral; ///< dense -> ephemeral, used at the lowest level
    SwitchingKey to_dense;     ///< ephemeral -> dense, used on the output
};

class Bootstrapper {
public:
    Bootstrapper(const Scheme& scheme, BootstrapConfig cfg);

    const BootstrapConfig& config() const { return cfg_; }
    const DiagonalPlan& coeff_to_slot_plan() const { return ctos_; }
    const DiagonalPlan& slot_to_coeff_plan() const { return stoc_; }
    const std::vector<double>& cheby_coeffs() const { return cheby_; }

    /// Every Galois element the pipeline rotates by.
    std::set<u64> required_galois() const;
    /// Generate the bootstrap key set. When encapsulation is enabled the
    /// ephemeral working secret is returned through `work_secret_out`
    /// (tests need it to observe mid-pipeline state); otherwise the dense
    /// secret is the working secret.
    BootstrapKeys keygen(const SecretKey& sk, u64 seed,
                         SecretKey* work_secret_out = nullptr) const;

    /// Re-express the lowest-level ciphertext over the full chain; the
    /// encrypted value becomes m + q0*I for a small integer element I.
    Ciphertext mod_raise(const Ciphertext& ct) const;

    /// Trace projection onto the packing subring (sparse slots only).
    Ciphertext sub_sum(const Ciphertext& ct, const BootstrapKeys& keys) const;

    /// Homomorphic decoding transform; returns the real-part and
    /// imaginary-part coefficient ciphertexts.
    std::pair<Ciphertext, Ciphertext> coeff_to_slot(const Ciphertext& ct,
                                                    const BootstrapKeys& keys) const;

    /// Homomorphic modular reduction; consumes exactly nine levels.
    Ciphertext eval_mod(const Ciphertext& ct, const BootstrapKeys& keys) const;

    /// Inverse transform back to coefficients.
    Ciphertext slot_to_coeff(const Ciphertext& ct_p, const Ciphertext& ct_q,
                             const BootstrapKeys& keys) const;

    /// Full pipeline; input at one limb, output at L+1 - (2 fftIter + 9) limbs.
    Ciphertext bootstrap(const Ciphertext& ct, const BootstrapKeys& keys) const;

    /// Debug shadow: when set, eval_mod checks its range precondition by
    /// decrypting with this key and throws on violation. Test use only.
    void set_debug_secret(const SecretKey* sk) { debug_sk_ = sk; }

    /// Evaluate the interpolant on a cleartext input (test oracle path).
    double eval_cleartext(double x) const;

private:
    const Scheme& scheme_;
    BootstrapConfig cfg_;
    DiagonalPlan ctos_;
    DiagonalPlan stoc_;
    std::vector<double> cheby_; ///< Chebyshev-basis coefficients of F
    std::vector<i64> subsum_shifts_;
    double delta_em_ = 0; ///< declared scale targeted at the EvalMod input
    const SecretKey* debug_sk_ = nullptr;

    Ciphertext apply_stage(const Ciphertext& ct, const LinearStage& stage, double fold_abs,
                           double declared_ratio,
                           const std::map<u64, SwitchingKey>& rot_keys) const;
};

/// Amortized multiplication time per slot: (T_boot + sum T_mult(i)) / (l*n).
double amortized_mult_time(double t_boot, const std::vector<double>& t_mult_per_level,
                           std::size_t n_slots);

/// Chebyshev interpolation of f on [-1, 1] at Chebyshev nodes; returns
/// coefficients in the Chebyshev basis (c_0 .. c_degree).
std::vector<double> chebyshev_interpolate(const std::function<double(double)>& f,
                                          std::size_t degree);

/// BSGS evaluation of a Chebyshev-basis polynomial on a ciphertext whose
/// declared-scale values lie in [-1, 1]. Consumes exactly
/// ceil(log2(degree+1)) levels.
Ciphertext evaluate_chebyshev(const Scheme& sch, const Ciphertext& ct_x,
                              const std::vector<double>& coeffs, const SwitchingKey& relin);

} // namespace fab

#endif
