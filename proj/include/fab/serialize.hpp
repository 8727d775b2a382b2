// SPDX-License-Identifier: Apache-2.0

#ifndef FAB_SERIALIZE_HPP
#define FAB_SERIALIZE_HPP

#include <iosfwd>
#include <string>

#include "fab/scheme.hpp"

namespace fab {

/// Binary container: magic "FAB1", format version, parameter block
/// (N, log q, L, dnum, fftIter, delta as 64-bit little-endian fields),
/// object kind, then limb-major residues as 64-bit little-endian words.
/// Compressed switching keys carry a 32-byte seed in place of the a-rows.

class serialize_error : public fab_error {
public:
    explicit serialize_error(const std::string& msg) : fab_error(msg) {}
};
class bad_magic_error : public serialize_error {
public:
    bad_magic_error() : serialize_error("not a FAB1 container") {}
};
class bad_version_error : public serialize_error {
public:
    explicit bad_version_error(u64 v)
        : serialize_error("unsupported FAB1 version " + std::to_string(v)) {}
};
class truncated_error : public serialize_error {
public:
    truncated_error() : serialize_error("FAB1 container is truncated") {}
};
class params_mismatch_error : public serialize_error {
public:
    params_mismatch_error() : serialize_error("FAB1 parameter block does not match this context") {}
};

enum class ObjectKind : u64 {
    ciphertext = 1,
    secret_key = 2,
    public_key = 3,
    switching_key = 4,
};

struct Fab1Header {
    u64 version = 1;
    u64 N = 0;
    u64 log_q = 0;
    u64 L = 0;
    u64 dnum = 0;
    u64 fft_iter = 0;
    double delta = 0;
    ObjectKind kind = ObjectKind::ciphertext;
};

void write_ciphertext(std::ostream& os, const Scheme& sch, const Ciphertext& ct);
Ciphertext read_ciphertext(std::istream& is, const Scheme& sch);

void write_secret_key(std::ostream& os, const Scheme& sch, const SecretKey& sk);
SecretKey read_secret_key(std::istream& is, const Scheme& sch);

void write_public_key(std::ostream& os, const Scheme& sch, const PublicKey& pk);
PublicKey read_public_key(std::istream& is, const Scheme& sch);

/// `compressed` stores the seed instead of the a-rows, halving the payload.
void write_switching_key(std::ostream& os, const Scheme& sch, const SwitchingKey& key,
                         bool compressed);
SwitchingKey read_switching_key(std::istream& is, const Scheme& sch);

/// Read just the header (any parameter set); for inspection tools.
Fab1Header read_header(std::istream& is);

} // namespace fab

#endif
