// SPDX-License-Identifier: Apache-2.0

#include "fab/ntt.hpp"

namespace fab {

namespace {

u64 bit_reverse(u64 x, int bits) {
    u64 r = 0;
    for (int i = 0; i < bits; ++i) {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    return r;
}

} // namespace

TwiddleTable::TwiddleTable(const Modulus& m, u64 ring_degree) {
    FAB_REQUIRE(is_power_of_two(ring_degree), "TwiddleTable: N must be a power of two");
    FAB_REQUIRE(m.ring_degree % ring_degree == 0,
                "TwiddleTable: modulus root does not cover this ring degree");
    N = ring_degree;
    const int logn = log2_exact(N);
    // psi for this N: the chain root is a 2*ring_degree-th root for the
    // modulus' own degree; raise it to reach a primitive 2N-th root.
    u64 psi = mod_pow(m.ntt_root, m.ring_degree / N, m);
    u64 psi_inv = mod_inv(psi, m);
    fwd.resize(N);
    inv.resize(N);
    u64 p = 1, pi = 1;
    for (u64 i = 0; i < N; ++i) {
        u64 r = bit_reverse(i, logn);
        fwd[r] = p;
        inv[r] = pi;
        p = mod_mul(p, psi, m);
        pi = mod_mul(pi, psi_inv, m);
    }
    n_inv = mod_inv(N % m.q, m);
}

void ntt_forward(u64* a, const Modulus& m, const TwiddleTable& tw) {
    const u64 N = tw.N;
    u64 t = N;
    for (u64 len = 1; len < N; len <<= 1) {
        t >>= 1;
        for (u64 i = 0; i < len; ++i) {
            const u64 s = tw.fwd[len + i];
            u64* lo = a + i * 2 * t;
            u64* hi = lo + t;
            for (u64 j = 0; j < t; ++j) {
                u64 u = lo[j];
                u64 v = mod_mul(hi[j], s, m);
                lo[j] = mod_add(u, v, m);
                hi[j] = mod_sub(u, v, m);
            }
        }
    }
}

void ntt_inverse(u64* a, const Modulus& m, const TwiddleTable& tw) {
    const u64 N = tw.N;
    u64 t = 1;
    for (u64 len = N >> 1; len >= 1; len >>= 1) {
        u64 j1 = 0;
        for (u64 i = 0; i < len; ++i) {
            const u64 s = tw.inv[len + i];
            u64* lo = a + j1;
            u64* hi = lo + t;
            for (u64 j = 0; j < t; ++j) {
                u64 u = lo[j];
                u64 v = hi[j];
                lo[j] = mod_add(u, v, m);
                hi[j] = mod_mul(mod_sub(u, v, m), s, m);
            }
            j1 += 2 * t;
        }
        t <<= 1;
    }
    for (u64 j = 0; j < N; ++j) a[j] = mod_mul(a[j], tw.n_inv, m);
}

std::vector<u64> eval_point_exponents(u64 N) {
    const int logn = log2_exact(N);
    std::vector<u64> e(N);
    for (u64 j = 0; j < N; ++j) e[j] = 2 * bit_reverse(j, logn) + 1;
    return e;
}

const TwiddleTable& NttContext::table(const Modulus& m, u64 N) const {
    auto key = std::make_pair(m.q, N);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, TwiddleTable(m, N)).first;
    return it->second;
}

} // namespace fab
