// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <parexec/error.hpp>
#include <parexec/types.hpp>

#include <algorithm>
#include <sstream>

namespace parexec {

void fail_invariant(char const *expr, char const *file, int line,
                    std::string const &message)
{
    std::ostringstream os;
    os << "invariant violated: " << expr << " (" << file << ':' << line << ')';
    if (!message.empty()) {
        os << ": " << message;
    }
    throw InvariantViolation{os.str()};
}

std::strong_ordering version_compare(Version const &a, Version const &b)
{
    return a <=> b;
}

void WriteSet::put(MemoryLocation location, Value value)
{
    for (auto &entry : entries_) {
        if (entry.first == location) {
            entry.second = std::move(value);
            return;
        }
    }
    entries_.emplace_back(std::move(location), std::move(value));
}

Value const *WriteSet::find(MemoryLocation const &location) const
{
    for (auto const &entry : entries_) {
        if (entry.first == location) {
            return &entry.second;
        }
    }
    return nullptr;
}

LocationSet locations_of(WriteSet const &write_set)
{
    LocationSet out;
    out.reserve(write_set.size());
    for (auto const &[location, value] : write_set) {
        out.push_back(location);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string_view to_string(TxnState state) noexcept
{
    switch (state) {
    case TxnState::ready_to_execute:
        return "READY_TO_EXECUTE";
    case TxnState::executing:
        return "EXECUTING";
    case TxnState::executed:
        return "EXECUTED";
    case TxnState::aborting:
        return "ABORTING";
    }
    return "?";
}

bool is_valid_transition(TxnStatus const &from, TxnStatus const &to) noexcept
{
    using enum TxnState;
    if (from.state == aborting) {
        return to.state == ready_to_execute &&
               to.incarnation == from.incarnation + 1;
    }
    if (to.incarnation != from.incarnation) {
        return false;
    }
    switch (from.state) {
    case ready_to_execute:
        return to.state == executing;
    case executing:
        return to.state == executed || to.state == aborting;
    case executed:
        return to.state == aborting;
    case aborting:
        break;
    }
    return false;
}

} // namespace parexec
