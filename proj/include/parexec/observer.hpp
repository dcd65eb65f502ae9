// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <parexec/types.hpp>

namespace parexec {

/// Points in the engine where an observer may run arbitrary code (inject
/// delays, drive other transactions from a scripted test). No engine lock is
/// held when these fire.
enum class HookPoint : std::uint8_t
{
    before_record,
    before_finish_execution,
    // after a failed read-set validation, before try_validation_abort
    before_validation_abort,
    // after a read error, before add_dependency takes its locks
    before_add_dependency,
    // inside check_done, after the condition reads and before the second
    // collect of decrease_cnt
    check_done_between_collects,
};

/// Optional instrumentation. Engine components hold a nullable pointer to an
/// Observer; when it is null no instrumentation cost is paid beyond a branch.
///
/// on_status_change is invoked while the status lock of `txn_idx` is held, so
/// the calls for one transaction are totally ordered. Implementations must not
/// call back into the scheduler from it.
class Observer
{
public:
    virtual ~Observer() = default;

    virtual void on_status_change(TxnIndex, TxnStatus /*from*/, TxnStatus /*to*/) {}
    virtual void on_read_error(Version, TxnIndex /*blocking_txn_idx*/) {}
    virtual void on_estimates_converted(Version) {}
    virtual void on_hook(HookPoint, Version) {}
};

} // namespace parexec
