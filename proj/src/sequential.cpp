// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <parexec/error.hpp>
#include <parexec/sequential.hpp>

#include <algorithm>
#include <unordered_map>

namespace parexec {

namespace {

using Overlay = std::unordered_map<MemoryLocation, Value, MemoryLocationHash>;

class OverlayContext final : public TransactionContext
{
public:
    OverlayContext(Overlay const &overlay, Storage const &storage)
        : overlay_{overlay}
        , storage_{storage}
    {
    }

    std::optional<Value> read(MemoryLocation const &location) override
    {
        if (auto const *own = pending_.find(location)) {
            return *own;
        }
        if (auto it = overlay_.find(location); it != overlay_.end()) {
            return it->second;
        }
        if (auto const *stored = storage_.get(location)) {
            return *stored;
        }
        return std::nullopt;
    }

    void write(MemoryLocation location, Value value) override
    {
        pending_.put(std::move(location), std::move(value));
    }

    WriteSet &pending() noexcept { return pending_; }

private:
    Overlay const &overlay_;
    Storage const &storage_;
    WriteSet pending_;
};

} // namespace

FinalState execute_sequential(std::span<TransactionPtr const> block, Storage const &storage)
{
    Overlay overlay;
    for (auto const &transaction : block) {
        OverlayContext context{overlay, storage};
        try {
            transaction->execute(context);
        }
        catch (InvariantViolation const &) {
            throw;
        }
        catch (...) {
            // faulting transactions commit nothing
            context.pending().clear();
        }
        for (auto const &[location, value] : context.pending()) {
            overlay.insert_or_assign(location, value);
        }
    }

    FinalState state(overlay.begin(), overlay.end());
    std::sort(state.begin(), state.end(),
              [](auto const &a, auto const &b) { return a.first < b.first; });
    return state;
}

} // namespace parexec
