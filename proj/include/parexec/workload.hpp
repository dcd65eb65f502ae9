// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <parexec/p2p.hpp>
#include <parexec/vm.hpp>

#include <chrono>
#include <cstdint>

namespace parexec {

struct WorkloadSpec
{
    std::size_t block_size{1000};
    std::size_t num_accounts{100};
    p2p::Shape shape{p2p::Shape::aptos};
    std::uint64_t seed{0};
    std::uint64_t initial_balance{10'000};
    /// Largest transfer amount; amounts are uniform in [1, max_amount].
    std::uint64_t max_amount{1'000};
    /// Synthetic per-transaction compute, spent once per VM execution.
    std::chrono::nanoseconds synthetic_work{0};
};

/// Deterministic random block of p2p transfers; sender != receiver.
/// Requires num_accounts >= 2 unless block_size is 0.
Block generate_block(WorkloadSpec const &spec);

/// Pre-block state for `spec`: every account with `initial_balance` and
/// sequence number 0, plus the shared verification locations.
Storage make_storage(WorkloadSpec const &spec);

} // namespace parexec
