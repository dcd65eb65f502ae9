// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <parexec/mv_memory.hpp>
#include <parexec/observer.hpp>
#include <parexec/scheduler.hpp>
#include <parexec/types.hpp>
#include <parexec/vm.hpp>

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace parexec {

struct BlockExecutionConfig
{
    std::size_t num_threads{1};
    /// Instrumentation; null in production and benchmarks.
    Observer *observer{nullptr};
};

struct BlockExecutionOutput
{
    FinalState final_state;
    /// Final incarnation number per transaction, i.e. how often it aborted.
    std::vector<Incarnation> incarnations;
    std::uint64_t total_aborts{0};
};

/// Executes `block` on top of `storage` with `config.num_threads` workers and
/// returns a final state identical to running the block sequentially in
/// order. An engine invariant failure in any worker stops every worker and is
/// rethrown here; no partial state is returned.
BlockExecutionOutput execute_block(std::span<TransactionPtr const> block,
                                   Storage const &storage,
                                   BlockExecutionConfig const &config);

/// Per-block engine state shared by all workers. execute_block drives it with
/// an OpenMP team; tests drive the same entry points from scripted threads.
class Executor
{
public:
    Executor(std::span<TransactionPtr const> block, Storage const &storage,
             Observer *observer = nullptr);

    Executor(Executor const &) = delete;
    Executor &operator=(Executor const &) = delete;

    /// Worker loop: keeps performing tasks until the scheduler reports done
    /// (or another worker failed).
    void run();

    /// Executes an owned execution task. Returns a validation task for the
    /// same version, or nothing.
    std::optional<Task> try_execute(Version version);

    /// Validates an owned validation task. Returns a re-execution task, or
    /// nothing.
    std::optional<Task> needs_reexecution(Version version);

    /// Stops all run() loops without completing the block.
    void halt() noexcept { halted_.store(true); }
    bool halted() const noexcept { return halted_.load(); }

    /// Throws InvariantViolation unless every transaction is EXECUTED and no
    /// task is active. Call only after all workers returned.
    void verify_quiescent() const;

    Scheduler &scheduler() noexcept { return scheduler_; }
    Scheduler const &scheduler() const noexcept { return scheduler_; }
    MvMemory &memory() noexcept { return memory_; }
    MvMemory const &memory() const noexcept { return memory_; }

    std::uint64_t vm_executions() const noexcept { return vm_executions_.load(); }

private:
    std::optional<TxnIndex> estimate_in_previous_reads(TxnIndex txn_idx) const;
    void hook(HookPoint point, Version version);

    std::span<TransactionPtr const> block_;
    Storage const &storage_;
    Observer *observer_;
    MvMemory memory_;
    Scheduler scheduler_;
    std::atomic<bool> halted_{false};
    std::atomic<std::uint64_t> vm_executions_{0};
};

} // namespace parexec
