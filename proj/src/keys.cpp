// SPDX-License-Identifier: Apache-2.0

#include "fab/keys.hpp"

namespace fab {

u64 poly_bytes(const SchemeParams& p) {
    return p.N * static_cast<u64>(p.log_q) / 8;
}

u64 ciphertext_bytes(const SchemeParams& p, std::size_t limbs) {
    return 2 * static_cast<u64>(limbs) * poly_bytes(p);
}

u64 switching_key_bytes(const SchemeParams& p, bool compressed) {
    u64 full = 2 * static_cast<u64>(p.dnum) * static_cast<u64>(p.raised_limbs()) * poly_bytes(p);
    return compressed ? full / 2 : full;
}

} // namespace fab
