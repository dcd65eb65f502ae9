// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <parexec/types.hpp>

#include <optional>
#include <string>
#include <vector>

namespace parexec {

struct StateMismatch
{
    MemoryLocation location;
    std::optional<Value> expected; // sequential
    std::optional<Value> got;      // parallel
};

struct EquivalenceReport
{
    bool equal{true};
    std::vector<StateMismatch> diff;
};

/// Byte-exact comparison of two final states (both sorted by location).
EquivalenceReport check_equivalence(FinalState const &parallel_out,
                                    FinalState const &sequential_out);

/// Human-readable diff, one mismatch per line, values hex-encoded.
std::string format_diff(EquivalenceReport const &report, std::size_t max_lines = 20);

} // namespace parexec
