// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <parexec/error.hpp>
#include <parexec/executor.hpp>

#include <omp.h>

#include <algorithm>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace parexec {

Executor::Executor(std::span<TransactionPtr const> block, Storage const &storage,
                   Observer *observer)
    : block_{block}
    , storage_{storage}
    , observer_{observer}
    , memory_{block.size()}
    , scheduler_{block.size(), observer}
{
}

void Executor::hook(HookPoint point, Version version)
{
    if (observer_ != nullptr) {
        observer_->on_hook(point, version);
    }
}

void Executor::run()
{
    std::optional<Task> task;
    while (!scheduler_.done() && !halted()) {
        if (task && task->kind == TaskKind::execution) {
            task = try_execute(task->version);
        }
        if (task && task->kind == TaskKind::validation) {
            task = needs_reexecution(task->version);
        }
        if (!task) {
            task = scheduler_.next_task();
            if (!task) {
                std::this_thread::yield();
            }
        }
    }
}

// A re-execution restarts from scratch, so if the previous incarnation read a
// location that now holds an ESTIMATE, running the VM would most likely stop
// at the same read.
std::optional<TxnIndex> Executor::estimate_in_previous_reads(TxnIndex txn_idx) const
{
    auto const prior_reads = memory_.last_read_set(txn_idx);
    for (auto const &descriptor : *prior_reads) {
        auto const result = memory_.read(descriptor.location, txn_idx);
        if (auto const *dep = std::get_if<read_result::Dependency>(&result)) {
            return dep->blocking_txn_idx;
        }
    }
    return std::nullopt;
}

std::optional<Task> Executor::try_execute(Version version)
{
    auto const [txn_idx, incarnation] = version;
    PAREXEC_CHECK(txn_idx < block_.size(), "execution task outside the block");

    if (incarnation > 0) {
        if (auto blocking = estimate_in_previous_reads(txn_idx)) {
            if (observer_ != nullptr) {
                observer_->on_read_error(version, *blocking);
            }
            hook(HookPoint::before_add_dependency, version);
            if (scheduler_.add_dependency(txn_idx, *blocking)) {
                return std::nullopt;
            }
        }
    }

    for (;;) {
        vm_executions_.fetch_add(1, std::memory_order_relaxed);
        auto result = vm_execute(*block_[txn_idx], txn_idx, memory_, storage_);
        if (auto const *error = std::get_if<VmReadError>(&result)) {
            if (observer_ != nullptr) {
                observer_->on_read_error(version, error->blocking_txn_idx);
            }
            hook(HookPoint::before_add_dependency, version);
            if (!scheduler_.add_dependency(txn_idx, error->blocking_txn_idx)) {
                // dependency resolved in the meantime
                continue;
            }
            return std::nullopt;
        }

        auto &success = std::get<VmSuccess>(result);
        hook(HookPoint::before_record, version);
        bool const wrote_new_location =
            memory_.record(version, std::move(success.read_set), success.write_set);
        hook(HookPoint::before_finish_execution, version);
        return scheduler_.finish_execution(txn_idx, incarnation, wrote_new_location);
    }
}

std::optional<Task> Executor::needs_reexecution(Version version)
{
    auto const [txn_idx, incarnation] = version;
    bool const read_set_valid = memory_.validate_read_set(txn_idx);
    bool aborted = false;
    if (!read_set_valid) {
        hook(HookPoint::before_validation_abort, version);
        aborted = scheduler_.try_validation_abort(txn_idx, incarnation);
    }
    if (aborted) {
        memory_.convert_writes_to_estimates(txn_idx);
        if (observer_ != nullptr) {
            observer_->on_estimates_converted(version);
        }
    }
    return scheduler_.finish_validation(txn_idx, aborted);
}

void Executor::verify_quiescent() const
{
    PAREXEC_CHECK(scheduler_.done(), "workers joined before done");
    PAREXEC_CHECK(scheduler_.num_active_tasks() == 0,
                  "active tasks at join: " + std::to_string(scheduler_.num_active_tasks()));
    PAREXEC_CHECK(!scheduler_.active_tasks_underflowed(), "active task count went negative");
    for (TxnIndex i = 0; i < block_.size(); ++i) {
        auto const status = scheduler_.status(i);
        PAREXEC_CHECK(status.state == TxnState::executed,
                      "txn " + std::to_string(i) + " is " +
                          std::string{to_string(status.state)} + " at join");
    }
}

BlockExecutionOutput execute_block(std::span<TransactionPtr const> block,
                                   Storage const &storage,
                                   BlockExecutionConfig const &config)
{
    auto const num_threads = static_cast<int>(std::max<std::size_t>(config.num_threads, 1));
    Executor executor{block, storage, config.observer};

    std::mutex failure_lock;
    std::exception_ptr failure;

#pragma omp parallel num_threads(num_threads)
    {
        try {
            executor.run();
        }
        catch (...) {
            executor.halt();
            std::lock_guard guard{failure_lock};
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }

    if (failure) {
        std::rethrow_exception(failure);
    }
    executor.verify_quiescent();

    BlockExecutionOutput output;
    output.final_state = executor.memory().snapshot(static_cast<std::size_t>(num_threads));
    output.incarnations.reserve(block.size());
    for (TxnIndex i = 0; i < block.size(); ++i) {
        auto const incarnation = executor.scheduler().status(i).incarnation;
        output.incarnations.push_back(incarnation);
        output.total_aborts += incarnation;
    }
    return output;
}

} // namespace parexec
