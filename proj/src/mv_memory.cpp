// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <parexec/error.hpp>
#include <parexec/mv_memory.hpp>

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <iterator>

namespace parexec {

MvMemory::MvMemory(std::size_t block_size, std::size_t shard_count)
    : block_size_{block_size}
    , shard_count_{std::max<std::size_t>(shard_count, 1)}
    , shards_{std::make_unique<Shard[]>(shard_count_)}
    , last_written_locations_(block_size)
    , last_read_set_(block_size)
{
    // Rough guess of a few distinct locations per transaction, to skip the
    // early rehashes under the exclusive shard lock.
    for (std::size_t s = 0; s < shard_count_; ++s) {
        shards_[s].locations.reserve(2 * block_size / shard_count_);
    }
}

MvMemory::Shard &MvMemory::shard_for(MemoryLocation const &location) const
{
    return shards_[MemoryLocationHash{}(location) % shard_count_];
}

MvMemory::LocationVersions *MvMemory::find(MemoryLocation const &location) const
{
    auto &shard = shard_for(location);
    std::shared_lock guard{shard.lock};
    auto it = shard.locations.find(location);
    return it == shard.locations.end() ? nullptr : it->second.get();
}

MvMemory::LocationVersions &MvMemory::find_or_create(MemoryLocation const &location)
{
    auto &shard = shard_for(location);
    {
        std::shared_lock guard{shard.lock};
        if (auto it = shard.locations.find(location); it != shard.locations.end()) {
            return *it->second;
        }
    }
    std::unique_lock guard{shard.lock};
    auto &slot = shard.locations[location];
    if (!slot) {
        slot = std::make_unique<LocationVersions>();
    }
    return *slot;
}

void MvMemory::apply_write_set(TxnIndex txn_idx, Incarnation incarnation,
                               WriteSet const &write_set)
{
    PAREXEC_CHECK(txn_idx < block_size_, "write from outside the block");
    for (auto const &[location, value] : write_set) {
        auto &versions = find_or_create(location);
        std::lock_guard guard{versions.lock};
        versions.cells.insert_or_assign(txn_idx, Cell{false, incarnation, value});
    }
}

bool MvMemory::rcu_update_written_locations(TxnIndex txn_idx, LocationSet new_locations)
{
    PAREXEC_CHECK(txn_idx < block_size_, "write from outside the block");
    std::sort(new_locations.begin(), new_locations.end());
    new_locations.erase(std::unique(new_locations.begin(), new_locations.end()),
                        new_locations.end());

    auto prev = last_written_locations_[txn_idx].load();

    LocationSet unwritten;
    std::set_difference(prev->begin(), prev->end(), new_locations.begin(),
                        new_locations.end(), std::back_inserter(unwritten));
    for (auto const &location : unwritten) {
        if (auto *versions = find(location)) {
            std::lock_guard guard{versions->lock};
            versions->cells.erase(txn_idx);
        }
    }

    bool const wrote_new_location =
        !std::includes(prev->begin(), prev->end(), new_locations.begin(),
                       new_locations.end());

    last_written_locations_[txn_idx].exchange(
        std::make_shared<LocationSet const>(std::move(new_locations)));
    return wrote_new_location;
}

bool MvMemory::record(Version version, ReadSet read_set, WriteSet const &write_set)
{
    apply_write_set(version.txn_idx, version.incarnation, write_set);
    bool const wrote_new_location =
        rcu_update_written_locations(version.txn_idx, locations_of(write_set));
    last_read_set_[version.txn_idx].exchange(
        std::make_shared<ReadSet const>(std::move(read_set)));
    return wrote_new_location;
}

void MvMemory::convert_writes_to_estimates(TxnIndex txn_idx)
{
    PAREXEC_CHECK(txn_idx < block_size_, "abort outside the block");
    auto prev = last_written_locations_[txn_idx].load();
    for (auto const &location : *prev) {
        auto *versions = find(location);
        PAREXEC_CHECK(versions != nullptr,
                      "estimate target location missing: " + location.bytes());
        std::lock_guard guard{versions->lock};
        auto it = versions->cells.find(txn_idx);
        PAREXEC_CHECK(it != versions->cells.end(),
                      "estimate target cell missing: " + location.bytes());
        it->second.estimate = true;
    }
}

ReadResult MvMemory::read(MemoryLocation const &location, TxnIndex reader_idx) const
{
    auto const *versions = find(location);
    if (versions == nullptr) {
        return read_result::NotFound{};
    }
    std::lock_guard guard{versions->lock};
    auto it = versions->cells.lower_bound(reader_idx);
    if (it == versions->cells.begin()) {
        return read_result::NotFound{};
    }
    --it;
    if (it->second.estimate) {
        return read_result::Dependency{it->first};
    }
    return read_result::Found{Version{it->first, it->second.incarnation},
                              it->second.value};
}

bool MvMemory::validate_read_set(TxnIndex txn_idx) const
{
    auto prior_reads = last_read_set_.at(txn_idx).load();
    for (auto const &[location, observed] : *prior_reads) {
        auto const current = read(location, txn_idx);
        if (std::holds_alternative<read_result::Dependency>(current)) {
            return false;
        }
        if (std::holds_alternative<read_result::NotFound>(current)) {
            if (observed.has_value()) {
                return false;
            }
            continue;
        }
        auto const &found = std::get<read_result::Found>(current);
        if (!observed.has_value() || found.version != *observed) {
            return false;
        }
    }
    return true;
}

FinalState MvMemory::snapshot(std::size_t num_threads) const
{
    auto const by_location = [](auto const &a, auto const &b) { return a.first < b.first; };
    std::vector<FinalState> per_shard(shard_count_);
    std::atomic<bool> stray_estimate{false};
    auto const shard_count = static_cast<std::int64_t>(shard_count_);

#pragma omp parallel for schedule(dynamic, 4) num_threads(static_cast<int>(std::max<std::size_t>(num_threads, 1)))
    for (std::int64_t s = 0; s < shard_count; ++s) {
        auto const &shard = shards_[static_cast<std::size_t>(s)];
        std::shared_lock guard{shard.lock};
        auto &out = per_shard[static_cast<std::size_t>(s)];
        for (auto const &[location, versions] : shard.locations) {
            std::lock_guard cells_guard{versions->lock};
            if (versions->cells.empty()) {
                continue;
            }
            auto const &[idx, cell] = *versions->cells.rbegin();
            if (cell.estimate) {
                stray_estimate.store(true, std::memory_order_relaxed);
                continue;
            }
            out.emplace_back(location, cell.value);
        }
        std::sort(out.begin(), out.end(), by_location);
    }

    PAREXEC_CHECK(!stray_estimate.load(), "estimate left after completion");

    // Pairwise merge of the sorted shard runs.
    while (per_shard.size() > 1) {
        std::vector<FinalState> merged((per_shard.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < per_shard.size(); i += 2) {
            auto &a = per_shard[i];
            auto &b = per_shard[i + 1];
            auto &out = merged[i / 2];
            out.reserve(a.size() + b.size());
            std::merge(std::make_move_iterator(a.begin()), std::make_move_iterator(a.end()),
                       std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()),
                       std::back_inserter(out), by_location);
        }
        if (per_shard.size() % 2 == 1) {
            merged.back() = std::move(per_shard.back());
        }
        per_shard = std::move(merged);
    }
    return per_shard.empty() ? FinalState{} : std::move(per_shard.front());
}

std::shared_ptr<ReadSet const> MvMemory::last_read_set(TxnIndex txn_idx) const
{
    return last_read_set_.at(txn_idx).load();
}

std::shared_ptr<LocationSet const> MvMemory::last_written_locations(TxnIndex txn_idx) const
{
    return last_written_locations_.at(txn_idx).load();
}

} // namespace parexec
