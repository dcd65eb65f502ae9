// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <parexec/workload.hpp>

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace parexec {

struct BenchOptions
{
    std::vector<std::size_t> threads{1};
    std::size_t runs{10};
    /// Compare every timed parallel run against the sequential reference.
    bool check{false};
    std::chrono::milliseconds watchdog_timeout{60'000};
};

struct BenchRow
{
    std::size_t threads{0};
    std::size_t block_size{0};
    std::size_t num_accounts{0};
    p2p::Shape shape{p2p::Shape::aptos};
    std::size_t runs{0};
    /// block_size / mean wall time of execute_block (snapshot included,
    /// block generation excluded).
    double throughput_tps{0};
    double sequential_tps{0};
    double speedup{0};
    double mean_aborts{0};
};

struct BenchReport
{
    std::vector<BenchRow> rows;
    /// Number of timed runs whose final state differed from the sequential
    /// reference. Always 0 unless BenchOptions::check is set.
    std::size_t equivalence_failures{0};
    std::string first_failure;
};

/// For each workload and thread count: one warm-up, then `runs` timed
/// executions. The sequential reference is warmed up and timed `runs` times
/// per workload.
BenchReport run_benchmark(std::vector<WorkloadSpec> const &workloads,
                          BenchOptions const &options);

std::string to_json(BenchReport const &report);
std::string to_csv(BenchReport const &report);
std::string to_table(BenchReport const &report);

struct VerifyOptions
{
    std::chrono::milliseconds budget{10'000};
    std::uint64_t seed{0};
    std::size_t max_threads{8};
    std::size_t max_block_size{1000};
    std::chrono::milliseconds watchdog_timeout{60'000};
};

struct VerifyResult
{
    std::size_t blocks_checked{0};
    std::size_t failures{0};
    std::string first_failure;
};

/// Equivalence fuzzing: random workloads and thread counts until the time
/// budget is spent, each parallel result compared to the sequential one.
VerifyResult run_verify(VerifyOptions const &options);

} // namespace parexec
