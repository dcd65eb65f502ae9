// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <parexec/error.hpp>
#include <parexec/vm.hpp>

namespace parexec {

namespace {

struct ReadBlocked
{
    TxnIndex blocking_txn_idx;
};

class CapturingContext final : public TransactionContext
{
public:
    CapturingContext(TxnIndex txn_idx, MvMemory const &memory, Storage const &storage)
        : txn_idx_{txn_idx}
        , memory_{memory}
        , storage_{storage}
    {
    }

    std::optional<Value> read(MemoryLocation const &location) override
    {
        if (blocked_) {
            // Logic that swallowed the first stop keeps getting stopped.
            throw ReadBlocked{*blocked_};
        }
        if (auto const *own = write_set_.find(location)) {
            return *own;
        }
        auto result = memory_.read(location, txn_idx_);
        if (auto *found = std::get_if<read_result::Found>(&result)) {
            read_set_.push_back(ReadDescriptor{location, found->version});
            return std::move(found->value);
        }
        if (auto const *dep = std::get_if<read_result::Dependency>(&result)) {
            blocked_ = dep->blocking_txn_idx;
            throw ReadBlocked{dep->blocking_txn_idx};
        }
        read_set_.push_back(ReadDescriptor{location, std::nullopt});
        if (auto const *stored = storage_.get(location)) {
            return *stored;
        }
        return std::nullopt;
    }

    void write(MemoryLocation location, Value value) override
    {
        write_set_.put(std::move(location), std::move(value));
    }

    std::optional<TxnIndex> blocked() const noexcept { return blocked_; }

    VmSuccess take(bool faulted)
    {
        if (faulted) {
            write_set_.clear();
        }
        return VmSuccess{std::move(read_set_), std::move(write_set_)};
    }

private:
    TxnIndex txn_idx_;
    MvMemory const &memory_;
    Storage const &storage_;
    ReadSet read_set_;
    WriteSet write_set_;
    std::optional<TxnIndex> blocked_;
};

} // namespace

TransactionPtr make_transaction(std::function<void(TransactionContext &)> body)
{
    return std::make_shared<FunctionTransaction const>(std::move(body));
}

VmResult vm_execute(Transaction const &transaction, TxnIndex txn_idx,
                    MvMemory const &memory, Storage const &storage)
{
    CapturingContext context{txn_idx, memory, storage};
    bool faulted = false;
    try {
        transaction.execute(context);
    }
    catch (ReadBlocked const &blocked) {
        return VmReadError{blocked.blocking_txn_idx};
    }
    catch (InvariantViolation const &) {
        throw;
    }
    catch (...) {
        faulted = true;
    }
    if (auto blocked = context.blocked()) {
        return VmReadError{*blocked};
    }
    return context.take(faulted);
}

} // namespace parexec
