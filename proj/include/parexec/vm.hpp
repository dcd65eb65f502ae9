// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <parexec/mv_memory.hpp>
#include <parexec/types.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace parexec {

/// Immutable pre-block state.
class Storage
{
    std::unordered_map<MemoryLocation, Value, MemoryLocationHash> values_;

public:
    Storage() = default;
    explicit Storage(std::unordered_map<MemoryLocation, Value, MemoryLocationHash> values)
        : values_{std::move(values)}
    {
    }

    Value const *get(MemoryLocation const &location) const
    {
        auto it = values_.find(location);
        return it == values_.end() ? nullptr : &it->second;
    }

    std::size_t size() const noexcept { return values_.size(); }
};

/// Read/write callbacks handed to transaction logic. `read` returns nullopt
/// for a location that has no value anywhere.
class TransactionContext
{
public:
    virtual ~TransactionContext() = default;

    virtual std::optional<Value> read(MemoryLocation const &location) = 0;
    virtual void write(MemoryLocation location, Value value) = 0;
};

/// Deterministic transaction logic. Given identical read responses it must
/// perform the identical read sequence and write set, and it must terminate.
///
/// Throwing an ordinary exception is a transaction fault: the execution keeps
/// its reads but its writes are discarded, both in the parallel engine and in
/// the sequential reference.
class Transaction
{
public:
    virtual ~Transaction() = default;

    virtual void execute(TransactionContext &context) const = 0;
};

using TransactionPtr = std::shared_ptr<Transaction const>;
using Block = std::vector<TransactionPtr>;

/// Adapter for ad-hoc transaction logic, mostly used by tests.
class FunctionTransaction final : public Transaction
{
    std::function<void(TransactionContext &)> body_;

public:
    explicit FunctionTransaction(std::function<void(TransactionContext &)> body)
        : body_{std::move(body)}
    {
    }

    void execute(TransactionContext &context) const override { body_(context); }
};

TransactionPtr make_transaction(std::function<void(TransactionContext &)> body);

/// Runs transaction `txn_idx` with reads and writes intercepted: reads are
/// served from the pending write set, then from the multi-version memory below
/// `txn_idx`, then from storage. Nothing shared is modified. A read that hits
/// an ESTIMATE stops the transaction and yields VmReadError.
VmResult vm_execute(Transaction const &transaction, TxnIndex txn_idx,
                    MvMemory const &memory, Storage const &storage);

} // namespace parexec
