// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <parexec/error.hpp>
#include <parexec/scheduler.hpp>

#include "audit_observer.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <barrier>
#include <random>
#include <thread>

using namespace parexec;
using enum TxnState;

namespace {

// Hands out the first `n` execution tasks; those transactions stay EXECUTING.
void start_executions(Scheduler &s, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        auto v = s.next_version_to_execute();
        ASSERT_TRUE(v.has_value());
        ASSERT_EQ(v->txn_idx, i);
    }
}

void advance_validation_idx(Scheduler &s, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        s.next_version_to_validate();
    }
}

// Takes txn 0 through `aborts` validation aborts and leaves it EXECUTED with
// no task in flight.
void cycle_txn0(Scheduler &s, Incarnation aborts)
{
    ASSERT_EQ(s.next_version_to_execute(), (Version{0, 0}));
    ASSERT_FALSE(s.finish_execution(0, 0, false).has_value());
    ASSERT_EQ(s.next_version_to_validate(), (Version{0, 0}));
    for (Incarnation i = 0; i < aborts; ++i) {
        ASSERT_TRUE(s.try_validation_abort(0, i));
        auto exec = s.finish_validation(0, true);
        ASSERT_EQ(exec, (Task{TaskKind::execution, {0, i + 1}}));
        auto val = s.finish_execution(0, i + 1, false);
        ASSERT_EQ(val, (Task{TaskKind::validation, {0, i + 1}}));
    }
    ASSERT_FALSE(s.finish_validation(0, false).has_value());
    ASSERT_EQ(s.num_active_tasks(), 0);
}

} // namespace

TEST(SchedulerDone, Fresh)
{
    Scheduler s{3};
    EXPECT_FALSE(s.done());
}

TEST(SchedulerDone, EmptyBlockFinishesOnFirstCheck)
{
    Scheduler s{0};
    s.check_done();
    EXPECT_TRUE(s.done());
    EXPECT_FALSE(s.next_task().has_value());
}

TEST(SchedulerDone, SetAfterFullRun)
{
    Scheduler s{1};
    cycle_txn0(s, 0);
    EXPECT_FALSE(s.done());
    EXPECT_FALSE(s.next_task().has_value());
    EXPECT_TRUE(s.done());
}

TEST(SchedulerCheckDone, ActiveTaskBlocks)
{
    Scheduler s{1};
    ASSERT_TRUE(s.next_version_to_execute().has_value());
    ASSERT_EQ(s.num_active_tasks(), 1);
    ASSERT_GE(s.execution_idx(), 1u);
    advance_validation_idx(s, 1);
    s.check_done();
    EXPECT_FALSE(s.done());
}

TEST(SchedulerCheckDone, DecreaseBetweenCollectsBlocks)
{
    parexec::testing::AuditObserver observer;
    Scheduler s{0, &observer};
    int injected = 0;
    observer.set_hook([&](HookPoint point, Version) {
        if (point == HookPoint::check_done_between_collects && injected == 0) {
            ++injected;
            s.decrease_execution_idx(0);
        }
    });
    s.check_done();
    EXPECT_EQ(injected, 1);
    EXPECT_FALSE(s.done());
    s.check_done();
    EXPECT_TRUE(s.done());
}

TEST(SchedulerDecrease, ExecutionIdx)
{
    Scheduler s{10};
    start_executions(s, 7);
    auto const cnt = s.decrease_cnt();
    s.decrease_execution_idx(3);
    EXPECT_EQ(s.execution_idx(), 3u);
    EXPECT_EQ(s.decrease_cnt(), cnt + 1);

    Scheduler t{10};
    start_executions(t, 2);
    t.decrease_execution_idx(5);
    EXPECT_EQ(t.execution_idx(), 2u);
    EXPECT_EQ(t.decrease_cnt(), 1u);
}

TEST(SchedulerDecrease, ValidationIdx)
{
    Scheduler s{10};
    advance_validation_idx(s, 9);
    s.decrease_validation_idx(4);
    EXPECT_EQ(s.validation_idx(), 4u);
    s.decrease_validation_idx(9);
    EXPECT_EQ(s.validation_idx(), 4u);
    EXPECT_EQ(s.decrease_cnt(), 2u);
    EXPECT_EQ(s.num_active_tasks(), 0);
}

TEST(SchedulerDecrease, ConcurrentDecreasesKeepMinimum)
{
    for (int round = 0; round < 200; ++round) {
        Scheduler s{10};
        start_executions(s, 9);
        std::barrier sync{2};
        std::thread a{[&] {
            sync.arrive_and_wait();
            s.decrease_execution_idx(4);
        }};
        std::thread b{[&] {
            sync.arrive_and_wait();
            s.decrease_execution_idx(2);
        }};
        a.join();
        b.join();
        ASSERT_EQ(s.execution_idx(), 2u);
        ASSERT_EQ(s.decrease_cnt(), 2u);
    }
}

TEST(SchedulerTryIncarnate, Examples)
{
    Scheduler s{3};
    EXPECT_EQ(s.next_version_to_execute(), (Version{0, 0}));
    EXPECT_EQ(s.status(0), (TxnStatus{0, executing}));
    EXPECT_EQ(s.num_active_tasks(), 1);

    // already EXECUTING: count restored
    EXPECT_FALSE(s.try_incarnate(0).has_value());
    EXPECT_EQ(s.num_active_tasks(), 0);

    EXPECT_FALSE(s.try_incarnate(3).has_value());
    EXPECT_EQ(s.num_active_tasks(), -1);
}

TEST(SchedulerNextVersion, ToExecute)
{
    Scheduler s{3};
    EXPECT_EQ(s.next_version_to_execute(), (Version{0, 0}));
    EXPECT_EQ(s.next_version_to_execute(), (Version{1, 0}));
    EXPECT_EQ(s.next_version_to_execute(), (Version{2, 0}));
    EXPECT_FALSE(s.next_version_to_execute().has_value());
    EXPECT_EQ(s.execution_idx(), 3u);
    EXPECT_FALSE(s.done());

    // fetched index already EXECUTED
    Scheduler t{3};
    start_executions(t, 2);
    t.finish_execution(1, 0, false);
    t.decrease_execution_idx(1);
    EXPECT_FALSE(t.next_version_to_execute().has_value());
    EXPECT_EQ(t.status(1), (TxnStatus{0, executed}));
    EXPECT_EQ(t.num_active_tasks(), 1);
}

TEST(SchedulerNextVersion, ToExecuteAtEndRunsCheckDone)
{
    Scheduler s{0};
    EXPECT_FALSE(s.next_version_to_execute().has_value());
    EXPECT_TRUE(s.done());
}

TEST(SchedulerNextVersion, ToValidate)
{
    Scheduler s{3};
    start_executions(s, 1);
    EXPECT_FALSE(s.next_version_to_validate().has_value()); // txn 0 EXECUTING
    EXPECT_EQ(s.num_active_tasks(), 1);

    Scheduler t{3};
    start_executions(t, 1);
    t.finish_execution(0, 0, false);
    EXPECT_EQ(t.next_version_to_validate(), (Version{0, 0}));

    Scheduler e{0};
    EXPECT_FALSE(e.next_version_to_validate().has_value());
    EXPECT_TRUE(e.done());
}

TEST(SchedulerNextTask, Heuristic)
{
    Scheduler s{3};
    // tie goes to execution
    EXPECT_EQ(s.next_task(), (Task{TaskKind::execution, {0, 0}}));
    EXPECT_EQ(s.next_version_to_execute(), (Version{1, 0}));
    s.finish_execution(0, 0, false);
    EXPECT_EQ(s.next_task(), (Task{TaskKind::validation, {0, 0}}));

    Scheduler t{1};
    cycle_txn0(t, 0);
    EXPECT_FALSE(t.next_task().has_value());
}

TEST(SchedulerAddDependency, BlockerExecuting)
{
    Scheduler s{10};
    start_executions(s, 6);
    EXPECT_TRUE(s.add_dependency(5, 3));
    EXPECT_EQ(s.status(5), (TxnStatus{0, aborting}));
    EXPECT_EQ(s.dependents(3), (std::vector<TxnIndex>{5}));
    EXPECT_EQ(s.num_active_tasks(), 5);

    // second dependent of the same blocker
    EXPECT_TRUE(s.add_dependency(4, 3));
    auto deps = s.dependents(3);
    std::sort(deps.begin(), deps.end());
    EXPECT_EQ(deps, (std::vector<TxnIndex>{4, 5}));
}

TEST(SchedulerAddDependency, RaceLost)
{
    Scheduler s{10};
    start_executions(s, 6);
    s.finish_execution(3, 0, false);
    auto const active = s.num_active_tasks();
    EXPECT_FALSE(s.add_dependency(5, 3));
    EXPECT_EQ(s.status(5), (TxnStatus{0, executing}));
    EXPECT_TRUE(s.dependents(3).empty());
    EXPECT_EQ(s.num_active_tasks(), active);
}

TEST(SchedulerAddDependency, BlockerMustBeLower)
{
    Scheduler s{10};
    start_executions(s, 6);
    EXPECT_THROW(s.add_dependency(3, 5), InvariantViolation);
}

TEST(SchedulerAddDependency, ConcurrentDependentsAllRecorded)
{
    for (int round = 0; round < 100; ++round) {
        Scheduler s{8};
        start_executions(s, 8);
        std::barrier sync{4};
        std::vector<std::thread> threads;
        for (TxnIndex t = 4; t < 8; ++t) {
            threads.emplace_back([&, t] {
                sync.arrive_and_wait();
                ASSERT_TRUE(s.add_dependency(t, 1));
            });
        }
        for (auto &t : threads) {
            t.join();
        }
        auto deps = s.dependents(1);
        std::sort(deps.begin(), deps.end());
        ASSERT_EQ(deps, (std::vector<TxnIndex>{4, 5, 6, 7}));
    }
}

TEST(SchedulerSetReady, Examples)
{
    Scheduler s{10};
    start_executions(s, 6);
    s.add_dependency(5, 3);
    s.set_ready_status(5);
    EXPECT_EQ(s.status(5), (TxnStatus{1, ready_to_execute}));

    Scheduler t{1};
    cycle_txn0(t, 4);
    ASSERT_TRUE(t.try_validation_abort(0, 4));
    t.set_ready_status(0);
    EXPECT_EQ(t.status(0), (TxnStatus{5, ready_to_execute}));
}

TEST(SchedulerSetReady, FromExecutedIsFatal)
{
    Scheduler s{1};
    cycle_txn0(s, 0);
    EXPECT_THROW(s.set_ready_status(0), InvariantViolation);
}

TEST(SchedulerResume, Examples)
{
    Scheduler s{10};
    start_executions(s, 9);
    auto const cnt = s.decrease_cnt();
    s.resume_dependencies({});
    EXPECT_EQ(s.decrease_cnt(), cnt);
    EXPECT_EQ(s.execution_idx(), 9u);

    s.add_dependency(5, 3);
    s.resume_dependencies({5});
    EXPECT_EQ(s.status(5), (TxnStatus{1, ready_to_execute}));
    EXPECT_EQ(s.execution_idx(), 5u);

    Scheduler t{10};
    start_executions(t, 9);
    t.add_dependency(5, 3);
    t.add_dependency(7, 3);
    t.resume_dependencies({7, 5});
    EXPECT_EQ(t.status(5), (TxnStatus{1, ready_to_execute}));
    EXPECT_EQ(t.status(7), (TxnStatus{1, ready_to_execute}));
    EXPECT_EQ(t.execution_idx(), 5u);
}

TEST(SchedulerFinishExecution, ResumesDependents)
{
    Scheduler s{10};
    start_executions(s, 9);
    s.add_dependency(6, 2);
    s.finish_execution(2, 0, false);
    EXPECT_EQ(s.status(2), (TxnStatus{0, executed}));
    EXPECT_EQ(s.status(6), (TxnStatus{1, ready_to_execute}));
    EXPECT_TRUE(s.dependents(2).empty());
    EXPECT_EQ(s.execution_idx(), 6u);
}

TEST(SchedulerFinishExecution, NewLocationLowersValidationIdx)
{
    Scheduler s{10};
    start_executions(s, 5);
    advance_validation_idx(s, 9);
    ASSERT_EQ(s.validation_idx(), 9u);
    auto const active = s.num_active_tasks();
    EXPECT_FALSE(s.finish_execution(4, 0, true).has_value());
    EXPECT_EQ(s.validation_idx(), 4u);
    EXPECT_EQ(s.num_active_tasks(), active - 1);
}

TEST(SchedulerFinishExecution, SameLocationsReturnsValidationTask)
{
    Scheduler s{10};
    start_executions(s, 5);
    advance_validation_idx(s, 9);
    auto const active = s.num_active_tasks();
    EXPECT_EQ(s.finish_execution(4, 0, false), (Task{TaskKind::validation, {4, 0}}));
    EXPECT_EQ(s.validation_idx(), 9u);
    EXPECT_EQ(s.num_active_tasks(), active);
}

TEST(SchedulerFinishExecution, LowValidationIdxUntouched)
{
    Scheduler s{10};
    start_executions(s, 5);
    advance_validation_idx(s, 2);
    auto const cnt = s.decrease_cnt();
    EXPECT_FALSE(s.finish_execution(4, 0, true).has_value());
    EXPECT_EQ(s.validation_idx(), 2u);
    EXPECT_EQ(s.execution_idx(), 5u);
    EXPECT_EQ(s.decrease_cnt(), cnt);
}

TEST(SchedulerFinishExecution, RequiresExecutingStatus)
{
    Scheduler s{3};
    start_executions(s, 1);
    s.finish_execution(0, 0, false);
    EXPECT_THROW(s.finish_execution(0, 0, false), InvariantViolation);
}

TEST(SchedulerTryValidationAbort, Examples)
{
    Scheduler s{1};
    cycle_txn0(s, 2);
    EXPECT_FALSE(s.try_validation_abort(0, 1)); // stale task
    EXPECT_TRUE(s.try_validation_abort(0, 2));
    EXPECT_EQ(s.status(0), (TxnStatus{2, aborting}));
    EXPECT_FALSE(s.try_validation_abort(0, 2));

    Scheduler t{1};
    cycle_txn0(t, 3);
    EXPECT_FALSE(t.try_validation_abort(0, 2));
    EXPECT_EQ(t.status(0), (TxnStatus{3, executed}));
}

TEST(SchedulerTryValidationAbort, ConcurrentExactlyOneWins)
{
    for (int round = 0; round < 500; ++round) {
        Scheduler s{1};
        cycle_txn0(s, 2);
        std::atomic<int> wins{0};
        std::barrier sync{2};
        auto body = [&] {
            sync.arrive_and_wait();
            if (s.try_validation_abort(0, 2)) {
                ++wins;
            }
        };
        std::thread a{body};
        std::thread b{body};
        a.join();
        b.join();
        ASSERT_EQ(wins.load(), 1);
    }
}

TEST(SchedulerFinishValidation, AbortedReturnsReexecution)
{
    Scheduler s{10};
    start_executions(s, 9);
    s.finish_execution(4, 0, false);
    advance_validation_idx(s, 4);
    ASSERT_EQ(s.next_version_to_validate(), (Version{4, 0}));
    auto const active = s.num_active_tasks();
    ASSERT_TRUE(s.try_validation_abort(4, 0));
    EXPECT_EQ(s.finish_validation(4, true), (Task{TaskKind::execution, {4, 1}}));
    EXPECT_EQ(s.status(4), (TxnStatus{1, executing}));
    EXPECT_EQ(s.validation_idx(), 5u);
    EXPECT_EQ(s.num_active_tasks(), active);
}

TEST(SchedulerFinishValidation, AbortedBehindExecutionIdx)
{
    Scheduler s{10};
    start_executions(s, 9);
    s.finish_execution(4, 0, false);
    advance_validation_idx(s, 4);
    ASSERT_EQ(s.next_version_to_validate(), (Version{4, 0}));
    s.decrease_execution_idx(2);
    auto const active = s.num_active_tasks();
    ASSERT_TRUE(s.try_validation_abort(4, 0));
    EXPECT_FALSE(s.finish_validation(4, true).has_value());
    EXPECT_EQ(s.status(4), (TxnStatus{1, ready_to_execute}));
    EXPECT_LE(s.validation_idx(), 5u);
    EXPECT_EQ(s.num_active_tasks(), active - 1);
}

TEST(SchedulerFinishValidation, NotAborted)
{
    Scheduler s{3};
    start_executions(s, 1);
    s.finish_execution(0, 0, false);
    ASSERT_EQ(s.next_version_to_validate(), (Version{0, 0}));
    auto const exec = s.execution_idx();
    auto const val = s.validation_idx();
    auto const cnt = s.decrease_cnt();
    EXPECT_FALSE(s.finish_validation(0, false).has_value());
    EXPECT_EQ(s.num_active_tasks(), 0);
    EXPECT_EQ(s.execution_idx(), exec);
    EXPECT_EQ(s.validation_idx(), val);
    EXPECT_EQ(s.decrease_cnt(), cnt);
    EXPECT_EQ(s.status(0), (TxnStatus{0, executed}));
}

// Random single-threaded schedules that always follow the protocol: the
// observer log must stay consistent with the automaton and the active-task
// count must never go negative.
TEST(SchedulerProperty, RandomProtocolDrivesToDone)
{
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        std::mt19937_64 rng{seed};
        std::size_t const n = 1 + rng() % 12;
        parexec::testing::AuditObserver observer;
        Scheduler s{n, &observer};

        std::vector<Task> held;
        std::size_t steps = 0;
        while (!s.done()) {
            ASSERT_LT(++steps, 100'000u) << "seed " << seed;
            if (held.empty() || rng() % 3 == 0) {
                if (auto t = s.next_task()) {
                    held.push_back(*t);
                }
                continue;
            }
            auto const pick = rng() % held.size();
            Task task = held[pick];
            held.erase(held.begin() + static_cast<std::ptrdiff_t>(pick));
            auto const [txn, inc] = task.version;
            std::optional<Task> next;
            if (task.kind == TaskKind::execution) {
                // a random lower EXECUTING txn plays the role of an estimate
                if (txn > 0 && rng() % 4 == 0) {
                    TxnIndex const blocker = rng() % txn;
                    if (s.add_dependency(txn, blocker)) {
                        continue;
                    }
                }
                next = s.finish_execution(txn, inc, rng() % 3 == 0);
            }
            else {
                bool const aborted = rng() % 4 == 0 && s.try_validation_abort(txn, inc);
                if (aborted) {
                    // the executor converts writes here; mirror its event
                    observer.on_estimates_converted(task.version);
                }
                next = s.finish_validation(txn, aborted);
            }
            if (next) {
                held.push_back(*next);
            }
            ASSERT_EQ(s.num_active_tasks(), static_cast<std::int64_t>(held.size()));
        }
        EXPECT_TRUE(held.empty()) << "seed " << seed;
        EXPECT_EQ(s.num_active_tasks(), 0);
        EXPECT_FALSE(s.active_tasks_underflowed());
        for (TxnIndex i = 0; i < n; ++i) {
            EXPECT_EQ(s.status(i).state, executed);
        }
        auto problems = observer.audit(n);
        EXPECT_TRUE(problems.empty()) << "seed " << seed << ": " << problems.front();
    }
}
