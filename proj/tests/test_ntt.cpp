// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fab/ntt.hpp"

using namespace fab;

namespace {

std::vector<u64> random_limb(u64 N, u64 q, std::mt19937_64& rng) {
    std::vector<u64> v(N);
    for (auto& x : v) x = rng() % q;
    return v;
}

/// O(N^2) negacyclic schoolbook product with sign folding.
std::vector<u64> schoolbook_negacyclic(const std::vector<u64>& a, const std::vector<u64>& b,
                                       const Modulus& m) {
    const u64 N = a.size();
    std::vector<u64> c(N, 0);
    for (u64 i = 0; i < N; ++i) {
        for (u64 j = 0; j < N; ++j) {
            u64 prod = mod_mul(a[i], b[j], m);
            u64 k = i + j;
            if (k < N)
                c[k] = mod_add(c[k], prod, m);
            else
                c[k - N] = mod_sub(c[k - N], prod, m);
        }
    }
    return c;
}

/// Direct evaluation of a at psi^e.
u64 eval_at(const std::vector<u64>& a, u64 e, const Modulus& m, u64 psi) {
    u64 x = mod_pow(psi, e, m);
    u64 acc = 0, p = 1;
    for (u64 i = 0; i < a.size(); ++i) {
        acc = mod_add(acc, mod_mul(a[i], p, m), m);
        p = mod_mul(p, x, m);
    }
    return acc;
}

} // namespace

TEST_CASE("forward transform evaluates at the documented point order") {
    auto chain = generate_modulus_chain(16, 1, 12);
    const Modulus& m = chain[0];
    TwiddleTable tw(m, 16);
    std::mt19937_64 rng(1);
    auto a = random_limb(16, m.q, rng);
    auto y = a;
    ntt_forward(y.data(), m, tw);
    auto exps = eval_point_exponents(16);
    u64 psi = m.ntt_root;
    for (u64 j = 0; j < 16; ++j) CHECK(y[j] == eval_at(a, exps[j], m, psi));
}

TEST_CASE("constant polynomial transforms to a constant vector") {
    auto chain = generate_modulus_chain(64, 1, 16);
    const Modulus& m = chain[0];
    TwiddleTable tw(m, 64);
    std::vector<u64> a(64, 0);
    a[0] = 42;
    ntt_forward(a.data(), m, tw);
    for (u64 j = 0; j < 64; ++j) CHECK(a[j] == 42);
}

TEST_CASE("roundtrip identity for all supported ring degrees") {
    std::mt19937_64 rng(2);
    for (int logn = 4; logn <= 16; ++logn) {
        const u64 N = u64(1) << logn;
        int bits = logn + 2 >= 20 ? 30 : 20;
        auto chain = generate_modulus_chain(N, 1, bits);
        const Modulus& m = chain[0];
        TwiddleTable tw(m, N);
        auto a = random_limb(N, m.q, rng);
        auto b = a;
        ntt_forward(b.data(), m, tw);
        ntt_inverse(b.data(), m, tw);
        CHECK(b == a);
        // And the opposite composition.
        auto c = a;
        ntt_inverse(c.data(), m, tw);
        ntt_forward(c.data(), m, tw);
        CHECK(c == a);
    }
}

TEST_CASE("pointwise product equals schoolbook negacyclic product") {
    // Fixed instance from the contract: N = 16, q = 257.
    {
        Modulus m(257, 16);
        TwiddleTable tw(m, 16);
        std::mt19937_64 rng(3);
        auto a = random_limb(16, m.q, rng);
        auto b = random_limb(16, m.q, rng);
        auto expect = schoolbook_negacyclic(a, b, m);
        auto fa = a, fb = b;
        ntt_forward(fa.data(), m, tw);
        ntt_forward(fb.data(), m, tw);
        for (u64 j = 0; j < 16; ++j) fa[j] = mod_mul(fa[j], fb[j], m);
        ntt_inverse(fa.data(), m, tw);
        CHECK(fa == expect);
    }
    std::mt19937_64 rng(4);
    for (u64 N : {16ULL, 32ULL, 64ULL}) {
        auto chain = generate_modulus_chain(N, 2, 28);
        for (const auto& m : chain) {
            TwiddleTable tw(m, N);
            auto a = random_limb(N, m.q, rng);
            auto b = random_limb(N, m.q, rng);
            auto expect = schoolbook_negacyclic(a, b, m);
            auto fa = a, fb = b;
            ntt_forward(fa.data(), m, tw);
            ntt_forward(fb.data(), m, tw);
            for (u64 j = 0; j < N; ++j) fa[j] = mod_mul(fa[j], fb[j], m);
            ntt_inverse(fa.data(), m, tw);
            CHECK(fa == expect);
        }
    }
}

TEST_CASE("inverse transform matches the Vandermonde matrix inverse at N = 8, q = 17") {
    Modulus m(17, 8, 2);
    TwiddleTable tw(m, 8);
    auto exps = eval_point_exponents(8);
    // V[j][k] = psi^(e_j * k); invert over F_17 by Gaussian elimination.
    const u64 N = 8;
    std::vector<std::vector<u64>> aug(N, std::vector<u64>(2 * N, 0));
    for (u64 j = 0; j < N; ++j) {
        for (u64 k = 0; k < N; ++k) aug[j][k] = mod_pow(m.ntt_root, exps[j] * k % 16, m);
        aug[j][N + j] = 1;
    }
    for (u64 col = 0; col < N; ++col) {
        u64 piv = col;
        while (aug[piv][col] == 0) ++piv;
        std::swap(aug[col], aug[piv]);
        u64 inv = mod_inv(aug[col][col], m);
        for (u64 k = 0; k < 2 * N; ++k) aug[col][k] = mod_mul(aug[col][k], inv, m);
        for (u64 r = 0; r < N; ++r) {
            if (r == col || aug[r][col] == 0) continue;
            u64 f = aug[r][col];
            for (u64 k = 0; k < 2 * N; ++k)
                aug[r][k] = mod_sub(aug[r][k], mod_mul(f, aug[col][k], m), m);
        }
    }
    std::mt19937_64 rng(5);
    std::vector<u64> y(N);
    for (auto& v : y) v = rng() % m.q;
    // Reference inverse: a = V^-1 y.
    std::vector<u64> expect(N, 0);
    for (u64 j = 0; j < N; ++j)
        for (u64 k = 0; k < N; ++k)
            expect[j] = mod_add(expect[j], mod_mul(aug[j][N + k], y[k], m), m);
    auto got = y;
    ntt_inverse(got.data(), m, tw);
    CHECK(got == expect);

    // All-zero input stays zero.
    std::vector<u64> z(N, 0);
    ntt_inverse(z.data(), m, tw);
    for (auto v : z) CHECK(v == 0);
}
