// SPDX-License-Identifier: Apache-2.0

#ifndef FAB_TRACE_HPP
#define FAB_TRACE_HPP

#include <vector>

#include "fab/common.hpp"

namespace fab {

enum class OpKind {
    ntt,
    intt,
    elementwise_add,
    elementwise_sub,
    elementwise_mul,
    automorph,
    key_digit_stream, ///< limbs = key limb-polys fetched for one digit
    residency_alloc,  ///< limbs = polynomials becoming resident on chip
    residency_free,
};

struct TraceRecord {
    OpKind kind;
    u64 limbs = 0;
    u64 ring_degree = 0;
    u64 flags = 0;
};

/// Deterministic, replayable record of the operations a scheme call issued.
struct OpTrace {
    std::vector<TraceRecord> records;
    void emit(OpKind k, u64 limbs, u64 n, u64 flags = 0) {
        records.push_back({k, limbs, n, flags});
    }
};

} // namespace fab

#endif
