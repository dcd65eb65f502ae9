// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <parexec/vm.hpp>

#include <chrono>
#include <cstdint>
#include <optional>
#include <string_view>

namespace parexec::p2p {

using AccountId = std::uint64_t;
using Amount = std::uint64_t;

/// Read/write footprint of a payment.
///  - diem: 17 verification reads + 4 account reads; writes both balances and
///    both sequence numbers (21 reads / 4 writes).
///  - aptos: 4 verification reads + 4 account reads; the same 4 writes plus a
///    per-sender event record (8 reads / 5 writes).
enum class Shape : std::uint8_t
{
    diem,
    aptos,
};

std::string_view to_string(Shape shape) noexcept;
std::optional<Shape> parse_shape(std::string_view name) noexcept;

struct ShapeFootprint
{
    std::size_t verification_reads;
    std::size_t reads;
    std::size_t writes;
};

ShapeFootprint footprint(Shape shape) noexcept;

/// Number of shared read-only verification locations seeded into storage.
inline constexpr std::size_t verification_location_count = 17;

// Keys: b/<id>, s/<id>, e/<id> and cfg/<slot>. Short enough to avoid heap
// allocation when copied into read sets.
MemoryLocation balance_key(AccountId account);
MemoryLocation sequence_key(AccountId account);
MemoryLocation event_key(AccountId account);
MemoryLocation verification_key(std::size_t slot);

Value encode_u64(std::uint64_t v);
/// Missing values decode as 0. Values that are not 8 bytes are a logic fault.
std::uint64_t decode_u64(std::optional<Value> const &v);

/// Transfer of `amount` from `sender` to `receiver`. A sender with less than
/// `amount` transfers its whole balance. The sender's sequence number always
/// advances.
class Transfer final : public Transaction
{
public:
    Transfer(AccountId sender, AccountId receiver, Amount amount, Shape shape,
             std::chrono::nanoseconds synthetic_work = std::chrono::nanoseconds{0});

    void execute(TransactionContext &context) const override;

    AccountId sender() const noexcept { return sender_; }
    AccountId receiver() const noexcept { return receiver_; }
    Amount amount() const noexcept { return amount_; }
    Shape shape() const noexcept { return shape_; }

private:
    AccountId sender_;
    AccountId receiver_;
    Amount amount_;
    Shape shape_;
    std::chrono::nanoseconds synthetic_work_;
    MemoryLocation sender_balance_;
    MemoryLocation sender_seq_;
    MemoryLocation sender_event_;
    MemoryLocation receiver_balance_;
    MemoryLocation receiver_seq_;
};

/// Busy-waits for `duration`, emulating VM compute.
void burn_cpu(std::chrono::nanoseconds duration) noexcept;

} // namespace parexec::p2p
