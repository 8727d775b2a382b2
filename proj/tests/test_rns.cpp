// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fab/rns.hpp"

using namespace fab;

namespace {

/// Wide-integer reduction oracle.
u64 oracle_mod(u128 a, u64 q) { return static_cast<u64>(a % q); }

RnsBasis small_basis(std::vector<u64> primes, u64 N, std::size_t originals) {
    std::vector<Modulus> ms;
    for (std::size_t i = 0; i < primes.size(); ++i) ms.emplace_back(primes[i], N, 2, i);
    return RnsBasis(std::move(ms), originals);
}

} // namespace

TEST_CASE("madd table matches the precompute formula") {
    // q = 13 (log q = 4), shifts = 2: [2^4, 2^5, 2^4+2^5] mod 13 = [3, 6, 9].
    auto t = precompute_madd(13, 4, 2);
    REQUIRE(t.size() == 3);
    CHECK(t[0] == 3);
    CHECK(t[1] == 6);
    CHECK(t[2] == 9);
}

TEST_CASE("madd first entry is 2^log_q mod q") {
    for (u64 q : {97ULL, 193ULL, 257ULL, 7681ULL, 65537ULL}) {
        int lq = 64 - __builtin_clzll(q);
        for (int shifts = 1; shifts <= 8; ++shifts) {
            auto t = precompute_madd(q, lq, shifts);
            CHECK(t[0] == (u128(1) << lq) % q);
            for (u64 e : t) CHECK(e < q);
        }
    }
}

TEST_CASE("mod_reduce equals wide-integer reduction, exhaustively for small widths") {
    // Primes with q = 1 mod 2N for N = 16.
    for (u64 q : {193ULL, 257ULL, 449ULL, 3137ULL}) {
        Modulus m(q, 16);
        CHECK(mod_reduce(0, m) == 0);
        CHECK(mod_reduce(q, m) == 0);
        const u128 bound = u128(1) << (2 * m.log_q - 1);
        for (u128 a = 0; a < bound; ++a) {
            if (mod_reduce(a, m) != oracle_mod(a, q)) {
                REQUIRE(mod_reduce(a, m) == oracle_mod(a, q));
            }
        }
    }
}

TEST_CASE("mod_reduce matches the oracle on random 54-bit inputs") {
    auto chain = generate_modulus_chain(1 << 4, 2, 54);
    std::mt19937_64 rng(7);
    for (const auto& m : chain) {
        for (int i = 0; i < 20000; ++i) {
            u128 a = (u128(rng()) << 64 | rng()) % (u128(1) << (2 * m.log_q - 1));
            CHECK(mod_reduce(a, m) == oracle_mod(a, m.q));
        }
        // Full product range, beyond the documented precondition.
        for (int i = 0; i < 20000; ++i) {
            u128 a = u128(rng() % m.q) * (rng() % m.q);
            CHECK(mod_reduce(a, m) == oracle_mod(a, m.q));
        }
    }
}

TEST_CASE("modular add, sub, mul match the oracle") {
    auto chain = generate_modulus_chain(16, 1, 12);
    const Modulus& m = chain[0];
    CHECK(mod_add(m.q - 1, 1, m) == 0);
    CHECK(mod_sub(0, 1, m) == m.q - 1);
    CHECK(mod_mul(1, 42 % m.q, m) == 42 % m.q);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5000; ++i) {
        u64 a = rng() % m.q, b = rng() % m.q;
        CHECK(mod_add(a, b, m) == (a + b) % m.q);
        CHECK(mod_sub(a, b, m) == (a + m.q - b) % m.q);
        CHECK(mod_mul(a, b, m) == oracle_mod(u128(a) * b, m.q));
        if (a != 0) CHECK(mod_mul(a, mod_pow(a, m.q - 2, m), m) == 1);
    }
}

TEST_CASE("modulus chain generation: width, congruence, determinism") {
    // All 8-bit primes = 1 mod 32: only 193, so the chain is [193].
    auto c = generate_modulus_chain(16, 1, 8);
    REQUIRE(c.size() == 1);
    CHECK(c[0].q == 193);

    auto c2 = generate_modulus_chain(1 << 12, 6, 40, 9);
    for (const auto& m : c2) {
        CHECK(m.q % (2 * (1 << 12)) == 1);
        CHECK(m.log_q == 40);
        CHECK(is_prime_u64(m.q));
        // Root sanity: psi^N = -1, psi^2N = 1.
        CHECK(mod_pow(m.ntt_root, 1 << 12, m) == m.q - 1);
        CHECK(mod_pow(m.ntt_root, 2 << 12, m) == 1);
    }
    auto c3 = generate_modulus_chain(1 << 12, 6, 40, 9);
    for (std::size_t i = 0; i < c2.size(); ++i) {
        CHECK(c2[i].q == c3[i].q);
        CHECK(c2[i].ntt_root == c3[i].ntt_root);
    }
    CHECK_THROWS_AS(generate_modulus_chain(16, 40, 8), fab_error);
}

TEST_CASE("paper-scale chain: 32 distinct 54-bit primes for N = 2^16") {
    auto c = generate_modulus_chain(u64(1) << 16, 32, 54);
    REQUIRE(c.size() == 32);
    for (const auto& m : c) {
        CHECK(m.q % (u64(1) << 17) == 1);
        CHECK(m.log_q == 54);
        CHECK(m.madd.size() == 63);
    }
}

TEST_CASE("basis_convert matches CRT recombination on small primes") {
    auto basis = std::make_shared<RnsBasis>(small_basis({13, 17, 11}, 1, 2));
    // Value 100 over {13, 17}: residues (9, 15); exact mod 11 = 1.
    std::vector<u64> r0{9}, r1{15};
    auto table = basis->conv_table({0, 1}, {2});
    auto out = basis_convert({r0.data(), r1.data()}, 1, *basis, table, /*exact=*/true);
    REQUIRE(out.size() == 1);
    CHECK(out[0][0] == 100 % 11);

    // Zero maps to zero.
    std::vector<u64> z0{0}, z1{0};
    auto zout = basis_convert({z0.data(), z1.data()}, 1, *basis, table, false);
    CHECK(zout[0][0] == 0);

    // Literal (non-exact) conversion is congruent up to an additive e*Q term.
    for (u64 v = 0; v < 13 * 17; ++v) {
        std::vector<u64> a{v % 13}, b{v % 17};
        auto lit = basis_convert({a.data(), b.data()}, 1, *basis, table, false);
        u64 got = lit[0][0];
        bool ok = false;
        for (u64 e = 0; e <= 2; ++e)
            if (got == (v + e * 13 * 17) % 11) ok = true;
        CHECK(ok);
    }
}

TEST_CASE("basis_convert multiplication count is l*(k+1)") {
    auto chain = generate_modulus_chain(16, 8, 20);
    std::vector<Modulus> ms(chain.begin(), chain.end());
    auto basis = std::make_shared<RnsBasis>(ms, 5);
    std::vector<std::size_t> src{0, 1, 2, 3, 4}, dst{5, 6, 7};
    auto& table = basis->conv_table(src, dst);
    std::vector<std::vector<u64>> data(5, std::vector<u64>(4, 1));
    std::vector<const u64*> rows;
    for (auto& d : data) rows.push_back(d.data());
    ConvCounters c;
    basis_convert(rows, 4, *basis, table, false, &c);
    const u64 ell = 5, k = 3;
    CHECK(c.modmul == ell * (k + 1));
    CHECK(c.modmul < 2 * ell * k);
}

TEST_CASE("crt_recombine: zero, bijection, exhaustive example") {
    auto basis = std::make_shared<RnsBasis>(small_basis({13, 17}, 1, 2));
    RnsInteger zero{{0, 1}, {0, 0}};
    CHECK(crt_recombine(zero, *basis) == 0);

    // (9, 15) -> 100, checked against exhaustive search.
    RnsInteger x{{0, 1}, {9, 15}};
    bigint expect = -1;
    for (u64 v = 0; v < 13 * 17; ++v)
        if (v % 13 == 9 && v % 17 == 15) expect = v;
    CHECK(crt_recombine(x, *basis) == expect);
    CHECK(expect == 100);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        bigint v = rng() % (13 * 17);
        auto d = rns_decompose(v, *basis, {0, 1});
        CHECK(crt_recombine(d, *basis) == v);
    }
}
