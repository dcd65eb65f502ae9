// Copyright 2026 The parexec Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <parexec/bench.hpp>
#include <parexec/equivalence.hpp>
#include <parexec/executor.hpp>
#include <parexec/sequential.hpp>
#include <parexec/watchdog.hpp>

#include <json.hpp>

#include <cstdio>
#include <iomanip>
#include <random>
#include <sstream>

namespace parexec {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string describe(WorkloadSpec const &spec, std::size_t threads)
{
    std::ostringstream os;
    os << "block_size=" << spec.block_size << " accounts=" << spec.num_accounts
       << " shape=" << p2p::to_string(spec.shape) << " seed=" << spec.seed
       << " threads=" << threads;
    return os.str();
}

} // namespace

BenchReport run_benchmark(std::vector<WorkloadSpec> const &workloads,
                          BenchOptions const &options)
{
    BenchReport report;
    auto const runs = std::max<std::size_t>(options.runs, 1);

    for (auto const &spec : workloads) {
        auto const block = generate_block(spec);
        auto const storage = make_storage(spec);

        FinalState expected = execute_sequential(block, storage);
        double sequential_seconds = 0;
        for (std::size_t r = 0; r < runs; ++r) {
            auto const start = Clock::now();
            auto state = execute_sequential(block, storage);
            sequential_seconds += seconds_since(start);
        }
        double const sequential_tps =
            sequential_seconds > 0
                ? static_cast<double>(spec.block_size) * runs / sequential_seconds
                : 0;

        for (auto const threads : options.threads) {
            auto const label = describe(spec, threads);
            BlockExecutionConfig const config{threads, nullptr};
            {
                Watchdog watchdog{options.watchdog_timeout, label};
                (void)execute_block(block, storage, config);
            }

            double parallel_seconds = 0;
            double aborts = 0;
            for (std::size_t r = 0; r < runs; ++r) {
                Watchdog watchdog{options.watchdog_timeout, label};
                auto const start = Clock::now();
                auto output = execute_block(block, storage, config);
                parallel_seconds += seconds_since(start);
                aborts += static_cast<double>(output.total_aborts);

                if (options.check) {
                    auto const eq = check_equivalence(output.final_state, expected);
                    if (!eq.equal) {
                        if (report.equivalence_failures == 0) {
                            report.first_failure = label + "\n" + format_diff(eq);
                        }
                        ++report.equivalence_failures;
                    }
                }
            }

            BenchRow row;
            row.threads = threads;
            row.block_size = spec.block_size;
            row.num_accounts = spec.num_accounts;
            row.shape = spec.shape;
            row.runs = runs;
            row.throughput_tps =
                parallel_seconds > 0
                    ? static_cast<double>(spec.block_size) * runs / parallel_seconds
                    : 0;
            row.sequential_tps = sequential_tps;
            row.speedup = parallel_seconds > 0 ? sequential_seconds / parallel_seconds : 0;
            row.mean_aborts = aborts / static_cast<double>(runs);
            report.rows.push_back(row);
        }
    }
    return report;
}

std::string to_json(BenchReport const &report)
{
    auto rows = nlohmann::json::array();
    for (auto const &row : report.rows) {
        rows.push_back({
            {"threads", row.threads},
            {"block_size", row.block_size},
            {"num_accounts", row.num_accounts},
            {"shape", p2p::to_string(row.shape)},
            {"runs", row.runs},
            {"throughput_tps", row.throughput_tps},
            {"sequential_tps", row.sequential_tps},
            {"speedup", row.speedup},
            {"mean_aborts", row.mean_aborts},
        });
    }
    return rows.dump(2) + "\n";
}

std::string to_csv(BenchReport const &report)
{
    std::ostringstream os;
    os << "threads,block_size,num_accounts,shape,runs,throughput_tps,sequential_tps,"
          "speedup,mean_aborts\n";
    os << std::fixed;
    for (auto const &row : report.rows) {
        os << row.threads << ',' << row.block_size << ',' << row.num_accounts << ','
           << p2p::to_string(row.shape) << ',' << row.runs << ',' << std::setprecision(1)
           << row.throughput_tps << ',' << row.sequential_tps << ',' << std::setprecision(3)
           << row.speedup << ',' << std::setprecision(2) << row.mean_aborts << '\n';
    }
    return os.str();
}

std::string to_table(BenchReport const &report)
{
    std::ostringstream os;
    os << std::left << std::setw(8) << "threads" << std::setw(11) << "block" << std::setw(10)
       << "accounts" << std::setw(7) << "shape" << std::setw(6) << "runs" << std::right
       << std::setw(14) << "tps" << std::setw(14) << "seq_tps" << std::setw(9) << "speedup"
       << std::setw(11) << "aborts" << '\n';
    os << std::fixed;
    for (auto const &row : report.rows) {
        os << std::left << std::setw(8) << row.threads << std::setw(11) << row.block_size
           << std::setw(10) << row.num_accounts << std::setw(7) << p2p::to_string(row.shape)
           << std::setw(6) << row.runs << std::right << std::setprecision(0)
           << std::setw(14) << row.throughput_tps << std::setw(14) << row.sequential_tps
           << std::setprecision(2) << std::setw(9) << row.speedup << std::setprecision(1)
           << std::setw(11) << row.mean_aborts << '\n';
    }
    return os.str();
}

VerifyResult run_verify(VerifyOptions const &options)
{
    VerifyResult result;
    std::mt19937_64 rng{options.seed};
    static constexpr std::size_t account_choices[] = {2, 3, 5, 10, 30, 100, 1000, 10000};

    auto const deadline = Clock::now() + options.budget;
    do {
        WorkloadSpec spec;
        spec.block_size = rng() % (options.max_block_size + 1);
        spec.num_accounts = account_choices[rng() % std::size(account_choices)];
        spec.shape = rng() % 2 == 0 ? p2p::Shape::diem : p2p::Shape::aptos;
        spec.seed = rng();
        spec.initial_balance = rng() % 2 == 0 ? 500 : 1'000'000;
        auto const threads = 1 + rng() % std::max<std::size_t>(options.max_threads, 1);

        auto const block = generate_block(spec);
        auto const storage = make_storage(spec);
        auto const label = describe(spec, threads);

        FinalState parallel;
        {
            Watchdog watchdog{options.watchdog_timeout, label};
            parallel = execute_block(block, storage, {threads, nullptr}).final_state;
        }
        auto const eq = check_equivalence(parallel, execute_sequential(block, storage));
        ++result.blocks_checked;
        if (!eq.equal) {
            if (result.failures == 0) {
                result.first_failure = label + "\n" + format_diff(eq);
            }
            ++result.failures;
        }
    } while (Clock::now() < deadline);
    return result;
}

} // namespace parexec
