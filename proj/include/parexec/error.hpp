// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace parexec {

/// Raised when an engine invariant is broken. Always indicates a bug in the
/// engine (or a misuse of a scripted test), never a property of the workload.
class InvariantViolation : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

[[noreturn]] void fail_invariant(char const *expr, char const *file, int line,
                                 std::string const &message);

} // namespace parexec

#define PAREXEC_CHECK(cond, message)                                          \
    do {                                                                      \
        if (!(cond)) [[unlikely]] {                                           \
            ::parexec::fail_invariant(#cond, __FILE__, __LINE__, (message));  \
        }                                                                     \
    } while (0)
