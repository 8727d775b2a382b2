// SPDX-License-Identifier: Apache-2.0

#include "fab/serialize.hpp"

#include <cstring>
#include <istream>
#include <ostream>

namespace fab {

namespace {

constexpr char kMagic[4] = {'F', 'A', 'B', '1'};
constexpr u64 kVersion = 1;

void put_u64(std::ostream& os, u64 v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

u64 get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (is.gcount() != 8) throw truncated_error();
    u64 v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<u64>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double d) {
    u64 bits;
    std::memcpy(&bits, &d, 8);
    put_u64(os, bits);
}

double get_f64(std::istream& is) {
    u64 bits = get_u64(is);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

void write_header(std::ostream& os, const Scheme& sch, ObjectKind kind) {
    os.write(kMagic, 4);
    put_u64(os, kVersion);
    const auto& p = sch.params();
    put_u64(os, p.N);
    put_u64(os, static_cast<u64>(p.log_q));
    put_u64(os, p.L);
    put_u64(os, p.dnum);
    put_u64(os, p.fft_iter);
    put_f64(os, p.delta);
    put_u64(os, static_cast<u64>(kind));
}

Fab1Header check_header(std::istream& is, const Scheme& sch, ObjectKind expect) {
    Fab1Header h = read_header(is);
    const auto& p = sch.params();
    if (h.N != p.N || h.log_q != static_cast<u64>(p.log_q) || h.L != p.L || h.dnum != p.dnum ||
        h.fft_iter != p.fft_iter || h.delta != p.delta)
        throw params_mismatch_error();
    if (h.kind != expect) throw serialize_error("FAB1 object kind mismatch");
    return h;
}

void write_poly(std::ostream& os, const Poly& p) {
    put_u64(os, p.limb_count());
    put_u64(os, static_cast<u64>(p.rep() == Rep::eval ? 1 : 0));
    for (auto id : p.limb_ids()) put_u64(os, id);
    for (u64 w : p.raw()) put_u64(os, w);
}

Poly read_poly(std::istream& is, const Scheme& sch) {
    u64 limbs = get_u64(is);
    if (limbs == 0 || limbs > sch.basis()->size()) throw serialize_error("bad limb count");
    u64 rep = get_u64(is);
    std::vector<std::size_t> ids(limbs);
    for (auto& id : ids) {
        id = get_u64(is);
        if (id >= sch.basis()->size()) throw serialize_error("bad limb id");
    }
    Poly p(sch.basis(), ids, rep ? Rep::eval : Rep::coeff);
    for (auto& w : p.raw()) {
        w = get_u64(is);
        // 54-bit residues are stored zero-extended; validate against the limb.
    }
    for (std::size_t i = 0; i < p.limb_count(); ++i) {
        const u64 q = p.limb_mod(i).q;
        const u64* d = p.limb_data(i);
        for (u64 j = 0; j < p.ring_degree(); ++j)
            if (d[j] >= q) throw serialize_error("residue out of range");
    }
    return p;
}

} // namespace

Fab1Header read_header(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (is.gcount() != 4) throw truncated_error();
    if (std::memcmp(magic, kMagic, 4) != 0) throw bad_magic_error();
    Fab1Header h;
    h.version = get_u64(is);
    if (h.version != kVersion) throw bad_version_error(h.version);
    h.N = get_u64(is);
    h.log_q = get_u64(is);
    h.L = get_u64(is);
    h.dnum = get_u64(is);
    h.fft_iter = get_u64(is);
    h.delta = get_f64(is);
    h.kind = static_cast<ObjectKind>(get_u64(is));
    return h;
}

void write_ciphertext(std::ostream& os, const Scheme& sch, const Ciphertext& ct) {
    write_header(os, sch, ObjectKind::ciphertext);
    put_f64(os, ct.scale);
    put_u64(os, ct.n_slots);
    write_poly(os, ct.a);
    write_poly(os, ct.b);
}

Ciphertext read_ciphertext(std::istream& is, const Scheme& sch) {
    check_header(is, sch, ObjectKind::ciphertext);
    Ciphertext ct;
    ct.scale = get_f64(is);
    ct.n_slots = get_u64(is);
    ct.a = read_poly(is, sch);
    ct.b = read_poly(is, sch);
    FAB_REQUIRE(ct.a.same_shape(ct.b), "ciphertext parts disagree");
    return ct;
}

void write_secret_key(std::ostream& os, const Scheme& sch, const SecretKey& sk) {
    write_header(os, sch, ObjectKind::secret_key);
    write_poly(os, sk.s);
}

SecretKey read_secret_key(std::istream& is, const Scheme& sch) {
    check_header(is, sch, ObjectKind::secret_key);
    return SecretKey{read_poly(is, sch)};
}

void write_public_key(std::ostream& os, const Scheme& sch, const PublicKey& pk) {
    write_header(os, sch, ObjectKind::public_key);
    write_poly(os, pk.a);
    write_poly(os, pk.b);
}

PublicKey read_public_key(std::istream& is, const Scheme& sch) {
    check_header(is, sch, ObjectKind::public_key);
    PublicKey pk;
    pk.a = read_poly(is, sch);
    pk.b = read_poly(is, sch);
    return pk;
}

void write_switching_key(std::ostream& os, const Scheme& sch, const SwitchingKey& key,
                         bool compressed) {
    write_header(os, sch, ObjectKind::switching_key);
    put_u64(os, static_cast<u64>(key.tag));
    put_u64(os, static_cast<u64>(key.rotation_index));
    put_u64(os, key.galois);
    put_u64(os, compressed ? 1 : 0);
    if (compressed) {
        // 32-byte seed block in place of the a-rows.
        unsigned char seed_block[32] = {0};
        for (int i = 0; i < 8; ++i) seed_block[i] = static_cast<unsigned char>(key.seed >> (8 * i));
        os.write(reinterpret_cast<const char*>(seed_block), 32);
    }
    put_u64(os, key.b_rows.size());
    if (!compressed) {
        FAB_REQUIRE(key.a_rows.size() == key.b_rows.size(),
                    "write_switching_key: expand the key before uncompressed writing");
        for (const auto& p : key.a_rows) write_poly(os, p);
    }
    for (const auto& p : key.b_rows) write_poly(os, p);
}

SwitchingKey read_switching_key(std::istream& is, const Scheme& sch) {
    check_header(is, sch, ObjectKind::switching_key);
    SwitchingKey key;
    key.tag = static_cast<KeyTag>(get_u64(is));
    key.rotation_index = static_cast<i64>(get_u64(is));
    key.galois = get_u64(is);
    const bool compressed = get_u64(is) != 0;
    key.compressed = compressed;
    if (compressed) {
        unsigned char seed_block[32];
        is.read(reinterpret_cast<char*>(seed_block), 32);
        if (is.gcount() != 32) throw truncated_error();
        key.seed = 0;
        for (int i = 0; i < 8; ++i) key.seed |= static_cast<u64>(seed_block[i]) << (8 * i);
    }
    u64 cols = get_u64(is);
    if (cols == 0 || cols > 64) throw serialize_error("bad switching key shape");
    if (!compressed) {
        key.a_rows.reserve(cols);
        for (u64 c = 0; c < cols; ++c) key.a_rows.push_back(read_poly(is, sch));
    }
    key.b_rows.reserve(cols);
    for (u64 c = 0; c < cols; ++c) key.b_rows.push_back(read_poly(is, sch));
    if (compressed) sch.expand_switching_key(key);
    return key;
}

} // namespace fab
