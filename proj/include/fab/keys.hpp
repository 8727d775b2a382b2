// SPDX-License-Identifier: Apache-2.0

#ifndef FAB_KEYS_HPP
#define FAB_KEYS_HPP

#include <map>
#include <optional>

#include "fab/poly.hpp"
#include "fab/params.hpp"

namespace fab {

/// Dense ternary secret over the full raised basis, evaluation representation.
struct SecretKey {
    Poly s;
};

/// Encryption key over the original limbs, evaluation representation.
struct PublicKey {
    Poly a;
    Poly b; // b = -a*s + e
};

enum class KeyTag { relin, rotation, conjugate, generic };

/// Hybrid switching key: a 2 x dnum matrix of ring elements over the raised
/// basis. Column k encrypts P * (s_old restricted to digit block k). The
/// a-rows are expanded from `seed`, so compressed serialization stores the
/// seed alone.
struct SwitchingKey {
    KeyTag tag = KeyTag::generic;
    i64 rotation_index = 0; ///< slot shift for rotation keys
    u64 galois = 0;         ///< Galois element realizing the permutation
    u64 seed = 0;           ///< stream seed for the a-rows
    bool compressed = true; ///< a-rows reproducible from seed
    std::vector<Poly> a_rows;
    std::vector<Poly> b_rows;

    std::size_t dnum() const { return b_rows.size(); }
};

/// Everything a server needs for evaluation.
struct KeyBundle {
    PublicKey pk;
    SwitchingKey relin;
    SwitchingKey conj;
    std::map<i64, SwitchingKey> rotations; ///< keyed by slot shift
};

/// Uncompressed switching-key byte size: 2 * dnum * raised * N * ceil(log q)/8,
/// with every residue stored as a 64-bit word in serialized form accounted
/// separately; this is the on-paper size identity used by the cost model.
u64 switching_key_bytes(const SchemeParams& p, bool compressed = false);
u64 ciphertext_bytes(const SchemeParams& p, std::size_t limbs);
u64 poly_bytes(const SchemeParams& p);

} // namespace fab

#endif
