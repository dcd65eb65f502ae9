// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <string>
#include <thread>

namespace parexec {

inline constexpr int watchdog_exit_code = 124;

/// Fires `on_timeout` from a timer thread if not destroyed (or disarmed)
/// within `timeout`. A hung block cannot be cancelled, so the default action
/// reports `label` on stderr and terminates the process with
/// watchdog_exit_code.
class Watchdog
{
public:
    Watchdog(std::chrono::milliseconds timeout, std::string label);
    Watchdog(std::chrono::milliseconds timeout, std::function<void()> on_timeout);
    ~Watchdog();

    Watchdog(Watchdog const &) = delete;
    Watchdog &operator=(Watchdog const &) = delete;

    void disarm();

private:
    void start(std::chrono::milliseconds timeout);

    std::function<void()> on_timeout_;
    std::mutex lock_;
    std::condition_variable cv_;
    bool disarmed_{false};
    std::thread timer_;
};

} // namespace parexec
