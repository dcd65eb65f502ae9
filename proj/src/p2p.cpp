// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <parexec/error.hpp>
#include <parexec/p2p.hpp>

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace parexec::p2p {

std::string_view to_string(Shape shape) noexcept
{
    return shape == Shape::diem ? "diem" : "aptos";
}

std::optional<Shape> parse_shape(std::string_view name) noexcept
{
    if (name == "diem") {
        return Shape::diem;
    }
    if (name == "aptos") {
        return Shape::aptos;
    }
    return std::nullopt;
}

ShapeFootprint footprint(Shape shape) noexcept
{
    if (shape == Shape::diem) {
        return {17, 21, 4};
    }
    return {4, 8, 5};
}

MemoryLocation balance_key(AccountId account)
{
    return MemoryLocation{"b/" + std::to_string(account)};
}

MemoryLocation sequence_key(AccountId account)
{
    return MemoryLocation{"s/" + std::to_string(account)};
}

MemoryLocation event_key(AccountId account)
{
    return MemoryLocation{"e/" + std::to_string(account)};
}

MemoryLocation verification_key(std::size_t slot)
{
    return MemoryLocation{"cfg/" + std::to_string(slot)};
}

Value encode_u64(std::uint64_t v)
{
    std::string bytes(sizeof(v), '\0');
    for (std::size_t i = 0; i < sizeof(v); ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    }
    return Value{std::move(bytes)};
}

std::uint64_t decode_u64(std::optional<Value> const &v)
{
    if (!v) {
        return 0;
    }
    auto const &bytes = v->bytes();
    if (bytes.size() != sizeof(std::uint64_t)) {
        throw std::runtime_error{"malformed integer value"};
    }
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < sizeof(out); ++i) {
        out |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
    }
    return out;
}

void burn_cpu(std::chrono::nanoseconds duration) noexcept
{
    if (duration.count() <= 0) {
        return;
    }
    auto const deadline = std::chrono::steady_clock::now() + duration;
    while (std::chrono::steady_clock::now() < deadline) {
    }
}

Transfer::Transfer(AccountId sender, AccountId receiver, Amount amount, Shape shape,
                   std::chrono::nanoseconds synthetic_work)
    : sender_{sender}
    , receiver_{receiver}
    , amount_{amount}
    , shape_{shape}
    , synthetic_work_{synthetic_work}
    , sender_balance_{balance_key(sender)}
    , sender_seq_{sequence_key(sender)}
    , sender_event_{event_key(sender)}
    , receiver_balance_{balance_key(receiver)}
    , receiver_seq_{sequence_key(receiver)}
{
    if (sender == receiver) {
        throw std::invalid_argument{"transfer sender and receiver must differ"};
    }
}

void Transfer::execute(TransactionContext &context) const
{
    static std::vector<MemoryLocation> const verification = [] {
        std::vector<MemoryLocation> keys;
        for (std::size_t slot = 0; slot < verification_location_count; ++slot) {
            keys.push_back(verification_key(slot));
        }
        return keys;
    }();

    auto const fp = footprint(shape_);
    for (std::size_t slot = 0; slot < fp.verification_reads; ++slot) {
        context.read(verification[slot]);
    }

    auto const sender_balance = decode_u64(context.read(sender_balance_));
    auto const sender_seq = decode_u64(context.read(sender_seq_));
    auto const receiver_balance = decode_u64(context.read(receiver_balance_));
    auto const receiver_seq = decode_u64(context.read(receiver_seq_));

    burn_cpu(synthetic_work_);

    auto const moved = std::min(amount_, sender_balance);
    context.write(sender_balance_, encode_u64(sender_balance - moved));
    context.write(receiver_balance_, encode_u64(receiver_balance + moved));
    context.write(sender_seq_, encode_u64(sender_seq + 1));
    // The receiver's account resource is rewritten as a whole.
    context.write(receiver_seq_, encode_u64(receiver_seq));
    if (shape_ == Shape::aptos) {
        context.write(sender_event_, encode_u64(sender_seq + 1));
    }
}

} // namespace parexec::p2p
