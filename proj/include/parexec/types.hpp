// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace parexec {

inline constexpr std::size_t cache_line_size = 64;

/// Position of a transaction in the block's preset order, 0-based.
using TxnIndex = std::uint64_t;

/// Number of times a transaction has been aborted; the i-th execution attempt
/// of a transaction runs as incarnation i.
using Incarnation = std::uint32_t;

/// Identity of one speculative execution attempt. Ordered lexicographically,
/// transaction index first.
struct Version
{
    TxnIndex txn_idx{0};
    Incarnation incarnation{0};

    friend auto operator<=>(Version const &, Version const &) = default;
    friend bool operator==(Version const &, Version const &) = default;
};

std::strong_ordering version_compare(Version const &a, Version const &b);

/// Opaque key of one addressable memory cell. Compared and hashed by bytes.
class MemoryLocation
{
    std::string key_;
    // Cached: every location is hashed at least twice per access (shard
    // choice, then the shard's table).
    std::size_t hash_{std::hash<std::string>{}(key_)};

public:
    MemoryLocation() = default;
    explicit MemoryLocation(std::string key)
        : key_{std::move(key)}
        , hash_{std::hash<std::string>{}(key_)}
    {
    }

    std::string const &bytes() const noexcept { return key_; }
    std::size_t hash() const noexcept { return hash_; }

    friend std::strong_ordering operator<=>(MemoryLocation const &a, MemoryLocation const &b)
    {
        return a.key_ <=> b.key_;
    }
    friend bool operator==(MemoryLocation const &a, MemoryLocation const &b) noexcept
    {
        return a.hash_ == b.hash_ && a.key_ == b.key_;
    }
};

struct MemoryLocationHash
{
    std::size_t operator()(MemoryLocation const &loc) const noexcept { return loc.hash(); }
};

/// Opaque payload stored at a location. The engine never interprets it.
class Value
{
    std::string payload_;

public:
    Value() = default;
    explicit Value(std::string payload)
        : payload_{std::move(payload)}
    {
    }

    std::string const &bytes() const noexcept { return payload_; }

    friend auto operator<=>(Value const &, Value const &) = default;
    friend bool operator==(Value const &, Value const &) = default;
};

/// One recorded read. `observed` is empty when the value came from pre-block
/// storage (the multi-version memory had nothing below the reader).
struct ReadDescriptor
{
    MemoryLocation location;
    std::optional<Version> observed;

    friend bool operator==(ReadDescriptor const &, ReadDescriptor const &) = default;
};

/// Reads in program order. Repeated reads of a location are recorded once per
/// read.
using ReadSet = std::vector<ReadDescriptor>;

/// Locations written by a transaction, at most one value per location. Kept
/// as a flat vector since transaction write sets are small.
class WriteSet
{
public:
    using Entry = std::pair<MemoryLocation, Value>;

    /// Replaces any pending value for `location`.
    void put(MemoryLocation location, Value value);
    Value const *find(MemoryLocation const &location) const;

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    void clear() noexcept { entries_.clear(); }

    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    friend bool operator==(WriteSet const &, WriteSet const &) = default;

private:
    std::vector<Entry> entries_;
};

/// Sorted, duplicate-free set of locations.
using LocationSet = std::vector<MemoryLocation>;

LocationSet locations_of(WriteSet const &write_set);

enum class TxnState : std::uint8_t
{
    ready_to_execute,
    executing,
    executed,
    aborting,
};

std::string_view to_string(TxnState state) noexcept;

struct TxnStatus
{
    Incarnation incarnation{0};
    TxnState state{TxnState::ready_to_execute};

    friend bool operator==(TxnStatus const &, TxnStatus const &) = default;
};

/// True iff `from -> to` is an edge of the status automaton:
/// READY(i)->EXECUTING(i), EXECUTING(i)->EXECUTED(i), EXECUTING(i)->ABORTING(i),
/// EXECUTED(i)->ABORTING(i), ABORTING(i)->READY(i+1).
bool is_valid_transition(TxnStatus const &from, TxnStatus const &to) noexcept;

enum class TaskKind : std::uint8_t
{
    execution,
    validation,
};

struct Task
{
    TaskKind kind{TaskKind::execution};
    Version version;

    friend bool operator==(Task const &, Task const &) = default;
};

struct VmSuccess
{
    ReadSet read_set;
    WriteSet write_set;
};

struct VmReadError
{
    TxnIndex blocking_txn_idx{0};
};

using VmResult = std::variant<VmSuccess, VmReadError>;

/// Final state of a block: written locations with their last values, sorted
/// by location.
using FinalState = std::vector<std::pair<MemoryLocation, Value>>;

} // namespace parexec
