// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <parexec/error.hpp>
#include <parexec/scheduler.hpp>

#include "lock_order.hpp"

#include <algorithm>
#include <string>

namespace parexec {

using detail::DependencyLock;
using detail::StatusLock;

// Owns one unit of num_active_tasks on a scheduler path; gives it back on
// scope exit unless the path hands a task to its caller.
class Scheduler::ActiveTaskGuard
{
    Scheduler *scheduler_;

public:
    explicit ActiveTaskGuard(Scheduler &scheduler) noexcept
        : scheduler_{&scheduler}
    {
    }

    ActiveTaskGuard(ActiveTaskGuard const &) = delete;
    ActiveTaskGuard &operator=(ActiveTaskGuard const &) = delete;

    ~ActiveTaskGuard()
    {
        if (scheduler_ != nullptr) {
            scheduler_->decrement_active_tasks();
        }
    }

    void hand_over() noexcept { scheduler_ = nullptr; }
};

Scheduler::Scheduler(std::size_t block_size, Observer *observer)
    : block_size_{block_size}
    , observer_{observer}
    , txn_status_{std::make_unique<StatusSlot[]>(block_size)}
    , txn_dependency_{std::make_unique<DependencySlot[]>(block_size)}
{
}

void Scheduler::decrement_active_tasks() noexcept
{
    auto const prev = num_active_tasks_.value.fetch_sub(1);
    if (prev <= 0) {
        active_tasks_underflow_.value.store(true);
    }
}

void Scheduler::transition(TxnIndex txn_idx, StatusSlot &slot, TxnStatus next)
{
    if (observer_ != nullptr) {
        observer_->on_status_change(txn_idx, slot.status, next);
    }
    slot.status = next;
}

void Scheduler::decrease_execution_idx(TxnIndex target_idx)
{
    auto current = execution_idx_.value.load();
    while (target_idx < current &&
           !execution_idx_.value.compare_exchange_weak(current, target_idx)) {
    }
    decrease_cnt_.value.fetch_add(1);
}

void Scheduler::decrease_validation_idx(TxnIndex target_idx)
{
    auto current = validation_idx_.value.load();
    while (target_idx < current &&
           !validation_idx_.value.compare_exchange_weak(current, target_idx)) {
    }
    decrease_cnt_.value.fetch_add(1);
}

void Scheduler::check_done()
{
    auto const observed_cnt = decrease_cnt_.value.load();
    auto const exec_idx = execution_idx_.value.load();
    auto const val_idx = validation_idx_.value.load();
    auto const active = num_active_tasks_.value.load();
    if (observer_ != nullptr) {
        observer_->on_hook(HookPoint::check_done_between_collects, Version{});
    }
    if (std::min(exec_idx, val_idx) >= block_size_ && active == 0 &&
        observed_cnt == decrease_cnt_.value.load()) {
        done_marker_.value.store(true);
    }
}

std::optional<Version> Scheduler::try_incarnate(TxnIndex txn_idx)
{
    ActiveTaskGuard guard{*this};
    if (txn_idx < block_size_) {
        auto &slot = txn_status_[txn_idx];
        StatusLock lock{slot.lock};
        if (slot.status.state == TxnState::ready_to_execute) {
            transition(txn_idx, slot, TxnStatus{slot.status.incarnation, TxnState::executing});
            guard.hand_over();
            return Version{txn_idx, slot.status.incarnation};
        }
    }
    return std::nullopt;
}

std::optional<Version> Scheduler::next_version_to_execute()
{
    if (execution_idx_.value.load() >= block_size_) {
        check_done();
        return std::nullopt;
    }
    num_active_tasks_.value.fetch_add(1);
    auto const idx_to_execute = execution_idx_.value.fetch_add(1);
    return try_incarnate(idx_to_execute);
}

std::optional<Version> Scheduler::next_version_to_validate()
{
    if (validation_idx_.value.load() >= block_size_) {
        check_done();
        return std::nullopt;
    }
    num_active_tasks_.value.fetch_add(1);
    ActiveTaskGuard guard{*this};
    auto const idx_to_validate = validation_idx_.value.fetch_add(1);
    if (idx_to_validate < block_size_) {
        TxnStatus status;
        {
            auto &slot = txn_status_[idx_to_validate];
            StatusLock lock{slot.lock};
            status = slot.status;
        }
        if (status.state == TxnState::executed) {
            guard.hand_over();
            return Version{idx_to_validate, status.incarnation};
        }
    }
    return std::nullopt;
}

std::optional<Task> Scheduler::next_task()
{
    if (validation_idx_.value.load() < execution_idx_.value.load()) {
        if (auto version = next_version_to_validate()) {
            return Task{TaskKind::validation, *version};
        }
    }
    else {
        if (auto version = next_version_to_execute()) {
            return Task{TaskKind::execution, *version};
        }
    }
    return std::nullopt;
}

bool Scheduler::add_dependency(TxnIndex txn_idx, TxnIndex blocking_txn_idx)
{
    PAREXEC_CHECK(blocking_txn_idx < txn_idx && txn_idx < block_size_,
                  "dependency must point to a lower transaction");
    {
        auto &dependency = txn_dependency_[blocking_txn_idx];
        DependencyLock dep_lock{dependency.lock};
        {
            auto &blocking = txn_status_[blocking_txn_idx];
            StatusLock lock{blocking.lock};
            if (blocking.status.state == TxnState::executed) {
                return false;
            }
        }
        {
            auto &slot = txn_status_[txn_idx];
            StatusLock lock{slot.lock};
            PAREXEC_CHECK(slot.status.state == TxnState::executing,
                          "dependency registered for a transaction that is not executing");
            transition(txn_idx, slot, TxnStatus{slot.status.incarnation, TxnState::aborting});
        }
        dependency.dependents.push_back(txn_idx);
    }
    decrement_active_tasks();
    return true;
}

void Scheduler::set_ready_status(TxnIndex txn_idx)
{
    auto &slot = txn_status_[txn_idx];
    StatusLock lock{slot.lock};
    PAREXEC_CHECK(slot.status.state == TxnState::aborting,
                  "set_ready_status on txn " + std::to_string(txn_idx) + " in state " +
                      std::string{to_string(slot.status.state)});
    transition(txn_idx, slot,
               TxnStatus{slot.status.incarnation + 1, TxnState::ready_to_execute});
}

void Scheduler::resume_dependencies(std::vector<TxnIndex> const &dependent_txn_indices)
{
    for (auto const dep_txn_idx : dependent_txn_indices) {
        set_ready_status(dep_txn_idx);
    }
    if (!dependent_txn_indices.empty()) {
        decrease_execution_idx(
            *std::min_element(dependent_txn_indices.begin(), dependent_txn_indices.end()));
    }
}

std::optional<Task> Scheduler::finish_execution(TxnIndex txn_idx, Incarnation incarnation,
                                                bool wrote_new_location)
{
    ActiveTaskGuard guard{*this};
    {
        auto &slot = txn_status_[txn_idx];
        StatusLock lock{slot.lock};
        PAREXEC_CHECK(slot.status == (TxnStatus{incarnation, TxnState::executing}),
                      "finish_execution on a version that is not executing");
        transition(txn_idx, slot, TxnStatus{incarnation, TxnState::executed});
    }

    std::vector<TxnIndex> deps;
    {
        auto &dependency = txn_dependency_[txn_idx];
        DependencyLock lock{dependency.lock};
        deps.swap(dependency.dependents);
    }
    resume_dependencies(deps);

    if (validation_idx_.value.load() > txn_idx) {
        if (wrote_new_location) {
            decrease_validation_idx(txn_idx);
        }
        else {
            guard.hand_over();
            return Task{TaskKind::validation, Version{txn_idx, incarnation}};
        }
    }
    return std::nullopt;
}

bool Scheduler::try_validation_abort(TxnIndex txn_idx, Incarnation incarnation)
{
    auto &slot = txn_status_[txn_idx];
    StatusLock lock{slot.lock};
    if (slot.status == TxnStatus{incarnation, TxnState::executed}) {
        transition(txn_idx, slot, TxnStatus{incarnation, TxnState::aborting});
        return true;
    }
    return false;
}

std::optional<Task> Scheduler::finish_validation(TxnIndex txn_idx, bool aborted)
{
    ActiveTaskGuard guard{*this};
    if (aborted) {
        set_ready_status(txn_idx);
        decrease_validation_idx(txn_idx + 1);
        if (execution_idx_.value.load() > txn_idx) {
            // try_incarnate consumes one active-task unit on failure, so give
            // it the one this validation holds.
            guard.hand_over();
            if (auto new_version = try_incarnate(txn_idx)) {
                return Task{TaskKind::execution, *new_version};
            }
        }
    }
    return std::nullopt;
}

TxnStatus Scheduler::status(TxnIndex txn_idx) const
{
    PAREXEC_CHECK(txn_idx < block_size_, "status index out of range");
    auto &slot = txn_status_[txn_idx];
    StatusLock lock{slot.lock};
    return slot.status;
}

std::vector<TxnIndex> Scheduler::dependents(TxnIndex txn_idx) const
{
    PAREXEC_CHECK(txn_idx < block_size_, "dependency index out of range");
    auto &slot = txn_dependency_[txn_idx];
    DependencyLock lock{slot.lock};
    return slot.dependents;
}

} // namespace parexec
