// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <parexec/watchdog.hpp>

#include <cstdio>
#include <cstdlib>

namespace parexec {

Watchdog::Watchdog(std::chrono::milliseconds timeout, std::string label)
    : on_timeout_{[label = std::move(label), timeout] {
        std::fprintf(stderr, "watchdog: '%s' did not finish within %lld ms\n",
                     label.c_str(), static_cast<long long>(timeout.count()));
        std::fflush(stderr);
        std::_Exit(watchdog_exit_code);
    }}
{
    start(timeout);
}

Watchdog::Watchdog(std::chrono::milliseconds timeout, std::function<void()> on_timeout)
    : on_timeout_{std::move(on_timeout)}
{
    start(timeout);
}

void Watchdog::start(std::chrono::milliseconds timeout)
{
    timer_ = std::thread{[this, timeout] {
        std::unique_lock guard{lock_};
        if (!cv_.wait_for(guard, timeout, [this] { return disarmed_; })) {
            guard.unlock();
            on_timeout_();
        }
    }};
}

void Watchdog::disarm()
{
    {
        std::lock_guard guard{lock_};
        disarmed_ = true;
    }
    cv_.notify_all();
}

Watchdog::~Watchdog()
{
    disarm();
    if (timer_.joinable()) {
        timer_.join();
    }
}

} // namespace parexec
