// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <parexec/equivalence.hpp>

#include <sstream>

namespace parexec {

namespace {

std::string hex(std::optional<Value> const &v)
{
    if (!v) {
        return "<absent>";
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * v->bytes().size());
    for (unsigned char c : v->bytes()) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

} // namespace

EquivalenceReport check_equivalence(FinalState const &parallel_out,
                                    FinalState const &sequential_out)
{
    EquivalenceReport report;
    auto p = parallel_out.begin();
    auto s = sequential_out.begin();
    while (p != parallel_out.end() || s != sequential_out.end()) {
        if (s == sequential_out.end() || (p != parallel_out.end() && p->first < s->first)) {
            report.diff.push_back({p->first, std::nullopt, p->second});
            ++p;
        }
        else if (p == parallel_out.end() || s->first < p->first) {
            report.diff.push_back({s->first, s->second, std::nullopt});
            ++s;
        }
        else {
            if (p->second != s->second) {
                report.diff.push_back({p->first, s->second, p->second});
            }
            ++p;
            ++s;
        }
    }
    report.equal = report.diff.empty();
    return report;
}

std::string format_diff(EquivalenceReport const &report, std::size_t max_lines)
{
    std::ostringstream os;
    std::size_t n = 0;
    for (auto const &m : report.diff) {
        if (n++ == max_lines) {
            os << "... " << (report.diff.size() - max_lines) << " more\n";
            break;
        }
        os << m.location.bytes() << ": expected " << hex(m.expected) << " got "
           << hex(m.got) << '\n';
    }
    return os.str();
}

} // namespace parexec
