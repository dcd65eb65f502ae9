// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <parexec/types.hpp>
#include <parexec/vm.hpp>

#include <span>

namespace parexec {

/// Serial reference: runs every transaction in block order against one
/// mutable overlay of `storage` and returns the overlay (every location
/// written at least once, with its final value), sorted by location.
///
/// This is the correctness oracle for execute_block; it shares nothing with
/// the parallel path except the Transaction interface.
FinalState execute_sequential(std::span<TransactionPtr const> block, Storage const &storage);

} // namespace parexec
