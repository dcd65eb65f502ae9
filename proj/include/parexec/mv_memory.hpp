// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <parexec/types.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <variant>
#include <vector>

namespace parexec {

namespace read_result {

struct NotFound
{
    friend bool operator==(NotFound, NotFound) = default;
};

/// The highest lower write is an ESTIMATE left by an aborted incarnation.
struct Dependency
{
    TxnIndex blocking_txn_idx{0};
    friend bool operator==(Dependency const &, Dependency const &) = default;
};

struct Found
{
    Version version;
    Value value;
    friend bool operator==(Found const &, Found const &) = default;
};

} // namespace read_result

using ReadResult =
    std::variant<read_result::NotFound, read_result::Dependency, read_result::Found>;

/// Holds a shared_ptr to an immutable snapshot that can be replaced as a
/// whole and loaded concurrently.
template <class T>
class SnapshotCell
{
    mutable std::mutex lock_;
    std::shared_ptr<T const> current_;

public:
    SnapshotCell()
        : current_{std::make_shared<T const>()}
    {
    }

    std::shared_ptr<T const> load() const
    {
        std::lock_guard guard{lock_};
        return current_;
    }

    std::shared_ptr<T const> exchange(std::shared_ptr<T const> next)
    {
        std::lock_guard guard{lock_};
        current_.swap(next);
        return next;
    }
};

/// Multi-version memory shared by all workers of one block execution.
///
/// Logically a map (location, txn_idx) -> cell, where a cell is either a
/// (incarnation, value) pair written by that transaction or an ESTIMATE
/// marker. Physically a sharded hash map over locations; each location owns a
/// lock-protected ordered map keyed by transaction index, so "highest writer
/// below the reader" is a single lower_bound.
class MvMemory
{
public:
    explicit MvMemory(std::size_t block_size, std::size_t shard_count = 64);

    MvMemory(MvMemory const &) = delete;
    MvMemory &operator=(MvMemory const &) = delete;

    std::size_t block_size() const noexcept { return block_size_; }

    void apply_write_set(TxnIndex txn_idx, Incarnation incarnation,
                         WriteSet const &write_set);

    /// Removes this transaction's cells at locations it no longer writes and
    /// publishes `new_locations`. Returns true iff some location in
    /// `new_locations` was not in the previous set.
    bool rcu_update_written_locations(TxnIndex txn_idx, LocationSet new_locations);

    /// Publishes a finished execution: write set first, then the written
    /// location set, then the read set. Returns whether a new location was
    /// written compared to the previous finished execution.
    bool record(Version version, ReadSet read_set, WriteSet const &write_set);

    /// Replaces every cell of the last finished execution of `txn_idx` with
    /// an ESTIMATE. A missing cell is an engine bug.
    void convert_writes_to_estimates(TxnIndex txn_idx);

    /// Reads the value written by the highest transaction strictly below
    /// `reader_idx`. `reader_idx` may equal the block size.
    ReadResult read(MemoryLocation const &location, TxnIndex reader_idx) const;

    /// Re-reads every descriptor of the last recorded read set and reports
    /// whether each read would observe the same version (or storage) again.
    bool validate_read_set(TxnIndex txn_idx) const;

    /// Final values of every location written in the block. Only valid once
    /// the engine has finished and all workers joined.
    FinalState snapshot(std::size_t num_threads = 1) const;

    std::shared_ptr<ReadSet const> last_read_set(TxnIndex txn_idx) const;
    std::shared_ptr<LocationSet const> last_written_locations(TxnIndex txn_idx) const;

private:
    struct Cell
    {
        bool estimate{false};
        Incarnation incarnation{0};
        Value value;
    };

    struct LocationVersions
    {
        mutable std::mutex lock;
        std::map<TxnIndex, Cell> cells;
    };

    struct alignas(cache_line_size) Shard
    {
        mutable std::shared_mutex lock;
        std::unordered_map<MemoryLocation, std::unique_ptr<LocationVersions>, MemoryLocationHash>
            locations;
    };

    Shard &shard_for(MemoryLocation const &location) const;
    LocationVersions *find(MemoryLocation const &location) const;
    LocationVersions &find_or_create(MemoryLocation const &location);

    std::size_t block_size_;
    std::size_t shard_count_;
    std::unique_ptr<Shard[]> shards_;
    std::vector<SnapshotCell<LocationSet>> last_written_locations_;
    std::vector<SnapshotCell<ReadSet>> last_read_set_;
};

} // namespace parexec
