#include "cfs/bench/grid.hpp"

#include <atomic>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "cfs/causal/att.hpp"
#include "cfs/causal/matching.hpp"
#include "cfs/errors.hpp"
#include "cfs/frameworks/selector.hpp"
#include "cfs/synthgen/synthgen.hpp"

namespace cfs::bench {

std::vector<int> ExperimentGrid::effectiveSeeds() const {
    if (!seeds.empty()) return seeds;
    std::vector<int> s(30);
    std::iota(s.begin(), s.end(), 1);
    return s;
}

long ExperimentGrid::cellCount() const {
    return static_cast<long>(scenarios.size()) * static_cast<long>(ns.size()) *
           static_cast<long>(rhos.size()) * static_cast<long>(effectiveSeeds().size()) *
           static_cast<long>(models.size());
}

std::string ExperimentGrid::describe() const {
    std::ostringstream os;
    os << "scenarios=";
    for (int s : scenarios) os << s << ';';
    os << " ns=";
    for (int n : ns) os << n << ';';
    os << " rhos=";
    for (double r : rhos) os << formatDouble(r) << ';';
    os << " seeds=";
    for (int s : effectiveSeeds()) os << s << ';';
    os << " models=";
    for (const auto& m : models) os << m << ';';
    os << " trueEffect=" << formatDouble(trueEffect) << " p=" << p
       << " noiseSd=" << formatDouble(outcomeNoiseSd);
    return os.str();
}

ExperimentRecord runCell(const ExperimentGrid& grid, int scenario, int n, double rho,
                         int seed, const std::string& model) {
    ExperimentRecord rec;
    rec.model = model;
    rec.scenario = scenario;
    rec.n = n;
    rec.rho = rho;
    rec.seed = seed;
    rec.p = grid.p;
    try {
        const auto spec = synthgen::ScenarioSpec::scenario(scenario, grid.p, grid.trueEffect,
                                                           grid.outcomeNoiseSd);
        const auto data =
            synthgen::generate(spec, n, rho, static_cast<std::uint64_t>(seed));
        const auto cfg = frameworks::SelectorConfig::named(model);
        const auto selection = frameworks::runSelector(data, cfg);
        const auto matched = causal::nearestNeighborMatch(data, selection.selected);
        const auto att = causal::estimateAtt(data, matched, selection.selected);
        rec.selected.reserve(selection.selected.size());
        for (int j : selection.selected) rec.selected.push_back(j + 1);  // 1-based outside
        rec.att = att.att;
        rec.bias = causal::selectionBias(att, synthgen::trueAtt(spec));
        rec.seconds = selection.wallClockSeconds;
    } catch (const std::exception& e) {
        rec.error = e.what();
        rec.att = rec.bias = std::numeric_limits<double>::quiet_NaN();
    }
    return rec;
}

GridRunStats runGrid(const ExperimentGrid& grid, const std::filesystem::path& outDir,
                     int workers, std::ostream* progress) {
    if (grid.models.empty()) throw std::invalid_argument("runGrid: no models configured");
    for (const auto& m : grid.models) frameworks::SelectorConfig::named(m);  // validate early
    if (workers < 1) workers = 1;

    std::filesystem::create_directories(outDir);
    const auto storePath = outDir / "records.csv";

    std::unordered_set<std::string> existing;
    if (std::filesystem::exists(storePath))
        for (const auto& r : store::load(storePath)) existing.insert(r.key());

    struct Cell {
        int scenario, n, seed;
        double rho;
        std::string model;
    };
    std::vector<Cell> todo;
    GridRunStats stats;
    for (const auto& model : grid.models)
        for (int scenario : grid.scenarios)
            for (int n : grid.ns)
                for (double rho : grid.rhos)
                    for (int seed : grid.effectiveSeeds()) {
                        ExperimentRecord probe;
                        probe.model = model;
                        probe.scenario = scenario;
                        probe.n = n;
                        probe.rho = rho;
                        probe.seed = seed;
                        if (existing.count(probe.key())) {
                            ++stats.skipped;
                        } else {
                            todo.push_back({scenario, n, seed, rho, model});
                        }
                    }

    // Manifest: grid description + FNV-1a hash, one line per invocation.
    {
        const std::string desc = grid.describe();
        std::uint64_t hash = 1469598103934665603ULL;
        for (unsigned char ch : desc) {
            hash ^= ch;
            hash *= 1099511628211ULL;
        }
        std::ofstream manifest(outDir / "manifest.txt", std::ios::app);
        manifest << "hash=" << hash << ' ' << desc << '\n';
    }

    const bool fresh = !std::filesystem::exists(storePath);
    std::ofstream out(storePath, std::ios::app);
    if (!out) throw DataError("cannot write record store: " + storePath.string());
    if (fresh) out << store::kHeader << '\n';

    std::mutex sink;
    std::atomic<std::size_t> next{0};
    std::atomic<long> failed{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= todo.size()) break;
            const Cell& c = todo[k];
            const auto rec = runCell(grid, c.scenario, c.n, c.rho, c.seed, c.model);
            if (rec.failed()) failed.fetch_add(1);
            std::lock_guard<std::mutex> lock(sink);
            out << store::encodeRow(rec) << '\n';
            out.flush();
            if (progress)
                *progress << (rec.failed() ? "[error] " : "[done]  ") << rec.key() << '\n';
        }
    };

    if (workers == 1 || todo.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int count = std::min<int>(workers, static_cast<int>(todo.size()));
        pool.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    stats.computed = static_cast<long>(todo.size());
    stats.failed = failed.load();
    return stats;
}

} // namespace cfs::bench
