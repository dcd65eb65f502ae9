// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

// bench: throughput of the parallel executor against the sequential reference
// on generated p2p blocks, plus an equivalence fuzzing mode.

#include <parexec/bench.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

int write_output(std::string const &text, std::string const &path)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return 0;
    }
    std::ofstream out{path};
    if (!out) {
        std::cerr << "cannot open " << path << " for writing\n";
        return 2;
    }
    out << text;
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Parallel block executor benchmark"};
    app.require_subcommand(1);

    std::vector<std::size_t> block_sizes{1000};
    std::vector<std::size_t> accounts{100};
    std::vector<std::size_t> threads{1, 2, 4, 8};
    std::string shape_name = "aptos";
    std::size_t runs = 10;
    std::uint64_t seed = 0;
    bool check = false;
    std::string output_format = "table";
    std::string output_path;
    double work_us = 0;
    std::uint64_t initial_balance = 10'000;
    unsigned timeout_s = 60;

    auto *run = app.add_subcommand("run", "Time execute_block against the sequential reference");
    run->add_option("--block-size", block_sizes, "Transactions per block (comma list allowed)")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    run->add_option("--accounts", accounts, "Number of accounts (comma list allowed)")
        ->delimiter(',')
        ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
    run->add_option("--threads", threads, "Worker thread counts, e.g. 1,2,4,8")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    run->add_option("--shape", shape_name, "Transaction shape")
        ->check(CLI::IsMember({"diem", "aptos"}));
    run->add_option("--runs", runs, "Timed runs per configuration")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Workload seed");
    run->add_flag("--check", check, "Compare every run against the sequential reference");
    run->add_option("--output", output_format, "Report format")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    run->add_option("--out-file", output_path, "Write the report here instead of stdout");
    run->add_option("--work-us", work_us, "Synthetic compute per transaction execution (us)")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--initial-balance", initial_balance, "Starting balance of every account");
    run->add_option("--timeout", timeout_s, "Watchdog timeout per block (s)")
        ->check(CLI::PositiveNumber);

    unsigned budget_s = 30;
    std::uint64_t verify_seed = 0;
    std::size_t max_threads = 8;
    std::size_t max_block_size = 1000;
    auto *verify = app.add_subcommand("verify", "Equivalence fuzzing within a time budget");
    verify->add_option("--budget", budget_s, "Time budget (s)")->check(CLI::PositiveNumber);
    verify->add_option("--seed", verify_seed, "Fuzzer seed");
    verify->add_option("--max-threads", max_threads, "Upper bound on worker threads")
        ->check(CLI::PositiveNumber);
    verify->add_option("--max-block-size", max_block_size, "Upper bound on block size");
    verify->add_option("--timeout", timeout_s, "Watchdog timeout per block (s)")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (*run) {
        std::vector<parexec::WorkloadSpec> workloads;
        auto const shape = *parexec::p2p::parse_shape(shape_name);
        for (auto const n : block_sizes) {
            for (auto const m : accounts) {
                parexec::WorkloadSpec spec;
                spec.block_size = n;
                spec.num_accounts = m;
                spec.shape = shape;
                spec.seed = seed;
                spec.initial_balance = initial_balance;
                spec.synthetic_work = std::chrono::nanoseconds{
                    static_cast<std::int64_t>(work_us * 1000.0)};
                workloads.push_back(spec);
            }
        }
        parexec::BenchOptions options;
        options.threads = threads;
        options.runs = runs;
        options.check = check;
        options.watchdog_timeout = std::chrono::seconds{timeout_s};

        auto const report = parexec::run_benchmark(workloads, options);
        std::string text = output_format == "json"  ? parexec::to_json(report)
                           : output_format == "csv" ? parexec::to_csv(report)
                                                    : parexec::to_table(report);
        if (int rc = write_output(text, output_path); rc != 0) {
            return rc;
        }
        if (report.equivalence_failures > 0) {
            std::cerr << report.equivalence_failures
                      << " run(s) diverged from the sequential reference; first:\n"
                      << report.first_failure;
            return 1;
        }
        return 0;
    }

    parexec::VerifyOptions options;
    options.budget = std::chrono::seconds{budget_s};
    options.seed = verify_seed;
    options.max_threads = max_threads;
    options.max_block_size = max_block_size;
    options.watchdog_timeout = std::chrono::seconds{timeout_s};
    auto const result = parexec::run_verify(options);
    std::cout << "checked " << result.blocks_checked << " blocks, " << result.failures
              << " divergent\n";
    if (result.failures > 0) {
        std::cerr << "first divergence:\n" << result.first_failure;
        return 1;
    }
    return 0;
}
