// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <parexec/workload.hpp>

#include <random>
#include <stdexcept>
#include <unordered_map>

namespace parexec {

Block generate_block(WorkloadSpec const &spec)
{
    Block block;
    if (spec.block_size == 0) {
        return block;
    }
    if (spec.num_accounts < 2) {
        throw std::invalid_argument{"a p2p workload needs at least two accounts"};
    }
    if (spec.max_amount == 0) {
        throw std::invalid_argument{"max_amount must be positive"};
    }

    // Integer-only draws so the block is identical across standard libraries.
    std::mt19937_64 rng{spec.seed};
    auto uniform = [&rng](std::uint64_t bound) { return rng() % bound; };

    block.reserve(spec.block_size);
    for (std::size_t i = 0; i < spec.block_size; ++i) {
        auto const sender = uniform(spec.num_accounts);
        auto receiver = uniform(spec.num_accounts - 1);
        if (receiver >= sender) {
            ++receiver;
        }
        auto const amount = 1 + uniform(spec.max_amount);
        block.push_back(std::make_shared<p2p::Transfer const>(
            sender, receiver, amount, spec.shape, spec.synthetic_work));
    }
    return block;
}

Storage make_storage(WorkloadSpec const &spec)
{
    std::unordered_map<MemoryLocation, Value, MemoryLocationHash> values;
    values.reserve(2 * spec.num_accounts + p2p::verification_location_count);
    for (p2p::AccountId a = 0; a < spec.num_accounts; ++a) {
        values.emplace(p2p::balance_key(a), p2p::encode_u64(spec.initial_balance));
        values.emplace(p2p::sequence_key(a), p2p::encode_u64(0));
    }
    for (std::size_t slot = 0; slot < p2p::verification_location_count; ++slot) {
        values.emplace(p2p::verification_key(slot), p2p::encode_u64(slot + 1));
    }
    return Storage{std::move(values)};
}

} // namespace parexec
