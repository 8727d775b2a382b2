// SPDX-License-Identifier: Apache-2.0

#ifndef FAB_COMMON_HPP
#define FAB_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fab {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i64 = std::int64_t;

/// Base class for all library errors.
class fab_error : public std::runtime_error {
public:
    explicit fab_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A precondition of an operation was violated by the caller.
class contract_error : public fab_error {
public:
    explicit contract_error(const std::string& msg) : fab_error(msg) {}
};

/// A ciphertext has run out of multiplicative levels; bootstrapping is required.
class level_exhausted_error : public fab_error {
public:
    explicit level_exhausted_error(const std::string& msg) : fab_error(msg) {}
};

#define FAB_REQUIRE(cond, msg)                     \
    do {                                           \
        if (!(cond)) throw ::fab::contract_error(msg); \
    } while (0)

/// SplitMix64 step; used to derive independent seed streams from a master seed.
inline u64 split_seed(u64 x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive a child seed for a named role/index pair.
inline u64 derive_seed(u64 master, u64 role, u64 index = 0) {
    return split_seed(split_seed(master ^ (role * 0xd1342543de82ef95ULL)) ^ index);
}

inline bool is_power_of_two(u64 x) { return x != 0 && (x & (x - 1)) == 0; }

inline int log2_exact(u64 x) {
    int l = 0;
    while ((u64(1) << l) < x) ++l;
    return l;
}

} // namespace fab

#endif
