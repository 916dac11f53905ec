// cfs: synthetic-benchmark and real-data driver for the causal feature
// selection library.
//
// Subcommands:
//   simulate   run the (scenario x N x rho x seed x model) grid into a store
//   aggregate  turn a record store into tidy plot CSVs
//   bootstrap  class-imbalance bootstrap study on a user CSV
//   selftest   run the library invariant suite
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <string>
#include <vector>

#include "cfs/bench/aggregate.hpp"
#include "cfs/bench/bootstrap.hpp"
#include "cfs/bench/grid.hpp"
#include "cfs/bench/records.hpp"
#include "cfs/bench/selftest.hpp"
#include "cfs/errors.hpp"
#include "cfs/frameworks/selector.hpp"

namespace {

std::vector<int> parseSeedList(const std::vector<std::string>& tokens) {
    std::vector<int> seeds;
    auto parseOne = [](const std::string& s) {
        int v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
            throw CLI::ValidationError("--seeds", "bad seed token '" + s + "'");
        return v;
    };
    for (const auto& token : tokens) {
        const auto dash = token.find('-', 1);  // allow plain negative rejection below
        if (dash == std::string::npos) {
            seeds.push_back(parseOne(token));
        } else {
            const int lo = parseOne(token.substr(0, dash));
            const int hi = parseOne(token.substr(dash + 1));
            if (hi < lo) throw CLI::ValidationError("--seeds", "empty range '" + token + "'");
            for (int s = lo; s <= hi; ++s) seeds.push_back(s);
        }
    }
    return seeds;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal feature selection benchmark driver"};
    app.require_subcommand(1);

    // ---- simulate ----
    auto* simulate = app.add_subcommand("simulate", "run the synthetic experiment grid");
    simulate->set_config("--config", "", "flat key=value file mirroring the flags");
    cfs::bench::ExperimentGrid grid;
    std::vector<std::string> seedTokens{"1-30"};
    std::string simOut;
    int workers = 1;
    simulate->add_option("--scenario", grid.scenarios, "scenario ids (1..4)")
        ->delimiter(',')
        ->capture_default_str();
    simulate->add_option("--n", grid.ns, "sample sizes")->delimiter(',')->capture_default_str();
    simulate->add_option("--rho", grid.rhos, "covariate correlations")
        ->delimiter(',')
        ->capture_default_str();
    simulate->add_option("--seeds", seedTokens, "seed list/ranges, e.g. 1-30 or 1,2,5")
        ->delimiter(',')
        ->capture_default_str();
    simulate->add_option("--models", grid.models, "model names (see --list-models)")
        ->delimiter(',');
    simulate->add_option("--out", simOut, "output directory for the record store")->required();
    simulate->add_option("--workers", workers, "worker threads")->capture_default_str();
    simulate->add_option("--true-effect", grid.trueEffect, "injected treatment effect")
        ->capture_default_str();
    simulate->add_option("--p", grid.p, "covariate count")->capture_default_str();
    simulate->add_option("--noise-sd", grid.outcomeNoiseSd, "outcome noise sd")
        ->capture_default_str();
    bool listModels = false;
    simulate->add_flag("--list-models", listModels, "print known model names and exit");

    // ---- aggregate ----
    auto* aggregate = app.add_subcommand("aggregate", "summarize a record store");
    aggregate->set_config("--config", "", "flat key=value file mirroring the flags");
    std::string storePath, kindName = "bias", aggOut;
    aggregate->add_option("--store", storePath, "records.csv produced by simulate")->required();
    aggregate->add_option("--kind", kindName, "bias | selectionProbability")
        ->capture_default_str();
    aggregate->add_option("--out", aggOut, "output CSV path")->required();

    // ---- bootstrap ----
    auto* bootstrap = app.add_subcommand("bootstrap", "bootstrap study on a real-data CSV");
    bootstrap->set_config("--config", "", "flat key=value file mirroring the flags");
    cfs::bench::RealDataJob job;
    std::string csvPath, bootOut;
    bootstrap->add_option("--csv", csvPath, "input CSV")->required();
    bootstrap->add_option("--treatment", job.treatmentColumn, "treatment column name")
        ->required();
    bootstrap->add_option("--outcome", job.outcomeColumn, "outcome column name")->required();
    bootstrap->add_option("--iters", job.bootstrapIterations, "bootstrap iterations")
        ->capture_default_str();
    bootstrap->add_option("--control-sample", job.controlSampleSize,
                          "controls drawn per iteration")
        ->capture_default_str();
    bootstrap->add_option("--threshold", job.frequencyThreshold, "consensus frequency threshold")
        ->capture_default_str();
    bootstrap->add_option("--expert-features", job.expertFeatureSet,
                          "1-based expert covariate ids")
        ->delimiter(',');
    bootstrap->add_option("--seed", job.rngSeed, "rng seed")->capture_default_str();
    bootstrap->add_option("--models", job.models, "model names")->delimiter(',')
        ->capture_default_str();
    bootstrap->add_option("--out", bootOut, "output directory")->required();

    // ---- selftest ----
    auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
    int selftestWorkers = 2;
    std::string only;
    selftest->add_option("--workers", selftestWorkers, "worker threads")->capture_default_str();
    selftest->add_option("--only", only, "run only invariants with this name prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (simulate->parsed()) {
            if (listModels) {
                for (const auto& name : cfs::frameworks::knownModelNames())
                    std::cout << name << '\n';
                return 0;
            }
            if (grid.models.empty())
                throw std::invalid_argument("simulate: --models is required");
            grid.seeds = parseSeedList(seedTokens);
            const auto stats = cfs::bench::runGrid(grid, simOut, workers, &std::cout);
            std::cout << "computed=" << stats.computed << " skipped=" << stats.skipped
                      << " failed=" << stats.failed << '\n';
            return 0;
        }
        if (aggregate->parsed()) {
            const auto kind = cfs::bench::parsePlotKind(kindName);
            const auto records = cfs::bench::store::load(storePath);
            cfs::bench::emitPlotData(records, kind, aggOut);
            std::cout << "wrote " << aggOut << '\n';
            return 0;
        }
        if (bootstrap->parsed()) {
            job.csvPath = csvPath;
            const auto report = cfs::bench::runBootstrapStudy(job);
            cfs::bench::writeBootstrapReport(report, bootOut);
            std::cout << "iterations=" << report.iterations
                      << " rows_dropped=" << report.rowsDropped << '\n';
            for (const auto& m : report.models) {
                std::cout << m.model << ": mean_att=" << cfs::bench::formatDouble(m.meanAtt)
                          << " consensus=" << cfs::bench::joinSelected(m.consensus);
                if (!job.expertFeatureSet.empty())
                    std::cout << " bias_vs_expert=" << cfs::bench::formatDouble(m.biasVsExpert);
                std::cout << '\n';
            }
            return 0;
        }
        if (selftest->parsed()) {
            const int failures = cfs::bench::runSelftest(std::cout, selftestWorkers, only);
            if (failures > 0) {
                std::cout << failures << " invariant(s) failed\n";
                return 3;
            }
            std::cout << "all invariants passed\n";
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const cfs::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const cfs::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
