// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <parexec/observer.hpp>
#include <parexec/types.hpp>

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace parexec {

/// Collaborative scheduler: dispatches the lowest-index available execution
/// or validation task using two shared counters, a per-transaction status
/// automaton and per-transaction dependency lists.
///
/// Every successful increment of the active-task count is matched either by a
/// decrement on the same path or by handing a Task back to the caller, who
/// then owns that count until its own finish call.
class Scheduler
{
public:
    explicit Scheduler(std::size_t block_size, Observer *observer = nullptr);

    Scheduler(Scheduler const &) = delete;
    Scheduler &operator=(Scheduler const &) = delete;

    std::size_t block_size() const noexcept { return block_size_; }

    bool done() const noexcept { return done_marker_.value.load(); }

    void decrease_execution_idx(TxnIndex target_idx);
    void decrease_validation_idx(TxnIndex target_idx);

    /// Sets the done marker iff both indices are past the block and no task
    /// is active, certified by reading decrease_cnt before and after.
    void check_done();

    std::optional<Version> try_incarnate(TxnIndex txn_idx);
    std::optional<Version> next_version_to_execute();
    std::optional<Version> next_version_to_validate();
    std::optional<Task> next_task();

    /// Registers `txn_idx` as waiting on `blocking_txn_idx`. Returns false if
    /// the blocking transaction is already EXECUTED, in which case nothing
    /// changed and the caller should re-execute right away.
    bool add_dependency(TxnIndex txn_idx, TxnIndex blocking_txn_idx);

    void set_ready_status(TxnIndex txn_idx);
    void resume_dependencies(std::vector<TxnIndex> const &dependent_txn_indices);

    std::optional<Task> finish_execution(TxnIndex txn_idx, Incarnation incarnation,
                                         bool wrote_new_location);
    bool try_validation_abort(TxnIndex txn_idx, Incarnation incarnation);
    std::optional<Task> finish_validation(TxnIndex txn_idx, bool aborted);

    // Observers used by tests and post-run checks.
    TxnIndex execution_idx() const noexcept { return execution_idx_.value.load(); }
    TxnIndex validation_idx() const noexcept { return validation_idx_.value.load(); }
    std::uint64_t decrease_cnt() const noexcept { return decrease_cnt_.value.load(); }
    std::int64_t num_active_tasks() const noexcept { return num_active_tasks_.value.load(); }
    /// True if num_active_tasks was ever decremented below zero.
    bool active_tasks_underflowed() const noexcept { return active_tasks_underflow_.value.load(); }
    TxnStatus status(TxnIndex txn_idx) const;
    std::vector<TxnIndex> dependents(TxnIndex txn_idx) const;

private:
    template <class T>
    struct alignas(cache_line_size) Padded
    {
        T value;
    };

    struct alignas(cache_line_size) StatusSlot
    {
        mutable std::mutex lock;
        TxnStatus status;
    };

    struct alignas(cache_line_size) DependencySlot
    {
        mutable std::mutex lock;
        std::vector<TxnIndex> dependents;
    };

    class ActiveTaskGuard;

    void decrement_active_tasks() noexcept;
    void transition(TxnIndex txn_idx, StatusSlot &slot, TxnStatus next);

    std::size_t block_size_;
    Observer *observer_;

    Padded<std::atomic<TxnIndex>> execution_idx_{0};
    Padded<std::atomic<TxnIndex>> validation_idx_{0};
    Padded<std::atomic<std::uint64_t>> decrease_cnt_{0};
    Padded<std::atomic<std::int64_t>> num_active_tasks_{0};
    Padded<std::atomic<bool>> done_marker_{false};
    Padded<std::atomic<bool>> active_tasks_underflow_{false};

    std::unique_ptr<StatusSlot[]> txn_status_;
    std::unique_ptr<DependencySlot[]> txn_dependency_;
};

} // namespace parexec
