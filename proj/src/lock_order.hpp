// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <parexec/error.hpp>

#include <mutex>

namespace parexec::detail {

// The only nested acquisition allowed in the scheduler is
// dependency-lock(blocking) -> status-lock(any). Status locks never nest.
enum class LockClass
{
    dependency,
    status,
};

#if PAREXEC_LOCK_ORDER_CHECKS
struct HeldLocks
{
    int dependency{0};
    int status{0};
};

inline thread_local HeldLocks held_locks;
#endif

template <LockClass Class>
class OrderedLock
{
    std::unique_lock<std::mutex> lock_;

public:
    explicit OrderedLock(std::mutex &m)
    {
#if PAREXEC_LOCK_ORDER_CHECKS
        if constexpr (Class == LockClass::dependency) {
            PAREXEC_CHECK(held_locks.dependency == 0 && held_locks.status == 0,
                          "dependency lock acquired while holding another lock");
            ++held_locks.dependency;
        }
        else {
            PAREXEC_CHECK(held_locks.status == 0,
                          "status lock acquired while holding a status lock");
            ++held_locks.status;
        }
#endif
        lock_ = std::unique_lock{m};
    }

    ~OrderedLock()
    {
#if PAREXEC_LOCK_ORDER_CHECKS
        if constexpr (Class == LockClass::dependency) {
            --held_locks.dependency;
        }
        else {
            --held_locks.status;
        }
#endif
    }

    OrderedLock(OrderedLock const &) = delete;
    OrderedLock &operator=(OrderedLock const &) = delete;
};

using DependencyLock = OrderedLock<LockClass::dependency>;
using StatusLock = OrderedLock<LockClass::status>;

} // namespace parexec::detail
