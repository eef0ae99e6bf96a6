#include "qland/minima.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "qland/errors.hpp"
#include "qland/hessian.hpp"

namespace qland {

void BasinHoppingConfig::validate() const {
    if (steps < 1) throw InputError("steps must be >= 1");
    if (!(temperature > 0.0)) throw InputError("temperature must be positive");
    if (!(max_perturbation > 0.0)) throw InputError("max perturbation must be positive");
    if (!(rms_threshold > 0.0)) throw InputError("rms threshold must be positive");
    if (!(dedup_energy > 0.0)) throw InputError("dedup threshold must be positive");
    if (min_curvature < 0.0) throw InputError("minimum curvature must be non-negative");
}

const char* to_string(Provenance p) {
    return p == Provenance::BasinHopping ? "basin-hopping" : "connected";
}

std::optional<Provenance> provenance_from_string(std::string_view s) {
    if (s == "basin-hopping") return Provenance::BasinHopping;
    if (s == "connected") return Provenance::Connected;
    return std::nullopt;
}

std::optional<std::size_t> MinimaDatabase::find(double e) const {
    const double tol = run_config.dedup_energy;
    auto it = std::lower_bound(records.begin(), records.end(), e - tol,
                               [](const MinimumRecord& r, double v) { return r.energy < v; });
    std::optional<std::size_t> best;
    double best_gap = tol;
    for (; it != records.end() && it->energy <= e + tol; ++it) {
        const double gap = std::abs(it->energy - e);
        if (gap < best_gap) {
            best_gap = gap;
            best = static_cast<std::size_t>(it - records.begin());
        }
    }
    return best;
}

std::size_t insert_or_find(MinimaDatabase& db, MinimumRecord rec, bool& inserted) {
    if (auto idx = db.find(rec.energy)) {
        inserted = false;
        return *idx;
    }
    auto it = std::upper_bound(db.records.begin(), db.records.end(), rec.energy,
                               [](double v, const MinimumRecord& r) { return v < r.energy; });
    const auto pos = static_cast<std::size_t>(it - db.records.begin());
    db.records.insert(it, std::move(rec));
    inserted = true;
    return pos;
}

bool insert_deduped(MinimaDatabase& db, MinimumRecord rec) {
    bool inserted = false;
    insert_or_find(db, std::move(rec), inserted);
    return inserted;
}

MinimumFactory::MinimumFactory(const WeightedGraph& g, std::span<const std::uint64_t> alternative_states)
    : sols_(brute_force_maxcut(g, true)), eval_(CostDiagonal(g)) {
    if (!alternative_states.empty()) {
        const std::uint64_t dim = std::uint64_t{1} << g.vertex_count();
        for (auto z : alternative_states)
            if (z >= dim) throw InputError("alternative state out of range");
        sols_.alternative.assign(alternative_states.begin(), alternative_states.end());
        std::sort(sols_.alternative.begin(), sols_.alternative.end());
        sols_.alternative_cut = g.cut_weight(sols_.alternative.front());
    }
}

Objective MinimumFactory::objective() {
    return [this](std::span<const double> x, std::span<double> grad) { return eval_.energy_and_gradient(x, grad); };
}

MinimumRecord MinimumFactory::make_record(const LbfgsResult& r, int step) {
    MinimumRecord rec;
    rec.theta = ParameterVector::from_flat(r.x);
    rec.energy = r.f;
    rec.rms_gradient = r.rms;
    const StateVector psi(eval_.state(r.x));
    rec.p_solution = solution_probability(psi, sols_.solutions);
    if (sols_.alternative_cut) rec.p_alternative = solution_probability(psi, sols_.alternative);
    rec.discovery_step = step;
    return rec;
}

double MinimumFactory::lowest_curvature(std::span<const double> x) {
    const auto hess = numerical_hessian(eval_, x);
    return symmetric_eigen(hess, x.size()).values.front();
}

bool MinimumFactory::is_minimum(const LbfgsResult& r, const BasinHoppingConfig& cfg) {
    if (cfg.min_curvature <= 0.0) return true;
    // Ground-state manifolds are degenerate by overparametrization.
    if (r.f <= eval_.diagonal().min() + cfg.dedup_energy) return true;
    return lowest_curvature(r.x) > cfg.min_curvature;
}

LbfgsOptions minimizer_options(const BasinHoppingConfig& cfg) {
    LbfgsOptions opt;
    opt.rms_tolerance = cfg.rms_threshold;
    return opt;
}

MinimumRecord lbfgs_minimize(MinimumFactory& factory, const ParameterVector& start, const LbfgsOptions& options) {
    const auto res = lbfgs_minimize(factory.objective(), start.flat(), options);
    if (!res.converged) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "minimization failed (" << res.message << ") after " << res.iterations
            << " iterations; best energy " << res.f << ", rms gradient " << res.rms;
        throw ConvergenceError(msg.str());
    }
    return factory.make_record(res, 0);
}

MinimaDatabase basin_hop(const WeightedGraph& g, std::string graph_id, int layers, const BasinHoppingConfig& cfg,
                         std::span<const std::uint64_t> alternative_states) {
    cfg.validate();
    if (layers < 1) throw InputError("layers must be >= 1");
    MinimaDatabase db(std::move(graph_id), g, layers, cfg);
    db.alternative_states.assign(alternative_states.begin(), alternative_states.end());
    MinimumFactory factory(g, alternative_states);
    const auto options = minimizer_options(cfg);
    const auto objective = factory.objective();

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> start_dist(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const std::size_t dim = 2 * static_cast<std::size_t>(layers);

    // Initial point; retried on the (unlikely) failure of the first quench.
    LbfgsResult current;
    for (int attempt = 0;; ++attempt) {
        std::vector<double> x0(dim);
        for (auto& v : x0) v = start_dist(rng);
        current = lbfgs_minimize(objective, std::move(x0), options);
        if (current.converged && factory.is_minimum(current, cfg)) break;
        if (attempt >= 100) throw ConvergenceError("could not converge an initial minimum");
    }
    insert_deduped(db, factory.make_record(current, 0));

    for (int step = 1; step <= cfg.steps; ++step) {
        ++db.stats.steps;
        std::vector<double> trial = current.x;
        for (auto& v : trial) v += unit(rng) * cfg.max_perturbation;
        auto res = lbfgs_minimize(objective, std::move(trial), options);
        if (!res.converged) {
            ++db.stats.failed;
            if (2 * db.stats.failed > cfg.steps) {
                throw ConvergenceError("basin-hopping aborted: more than half of the local minimizations failed");
            }
            continue;
        }
        if (!factory.is_minimum(res, cfg)) {
            ++db.stats.non_minima;
            continue;
        }
        insert_deduped(db, factory.make_record(res, step));
        bool accept = res.f < current.f;
        if (!accept) accept = coin(rng) < std::exp(-(res.f - current.f) / cfg.temperature);
        if (accept) {
            ++db.stats.accepted;
            current = std::move(res);
        }
    }
    return db;
}

void merge_into(MinimaDatabase& a, const MinimaDatabase& b) {
    for (const auto& r : b.records) insert_deduped(a, r);
    a.stats.steps += b.stats.steps;
    a.stats.accepted += b.stats.accepted;
    a.stats.failed += b.stats.failed;
    a.stats.non_minima += b.stats.non_minima;
}

MinimaDatabase basin_hop_streams(const WeightedGraph& g, std::string graph_id, int layers,
                                 const BasinHoppingConfig& cfg, int streams, int jobs,
                                 std::span<const std::uint64_t> alternative_states) {
    if (streams < 1) throw InputError("need at least one stream");
    jobs = std::clamp(jobs, 1, streams);
    std::vector<std::optional<MinimaDatabase>> results(streams);
    std::vector<std::exception_ptr> errors(streams);
    std::mutex next_mutex;
    int next = 0;
    auto worker = [&] {
        while (true) {
            int k;
            {
                std::lock_guard lock(next_mutex);
                if (next >= streams) return;
                k = next++;
            }
            auto stream_cfg = cfg;
            stream_cfg.seed = cfg.seed + static_cast<std::uint64_t>(k);
            try {
                results[k] = basin_hop(g, graph_id, layers, stream_cfg, alternative_states);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    MinimaDatabase merged = std::move(*results[0]);
    merged.run_config = cfg;
    for (int k = 1; k < streams; ++k) merge_into(merged, *results[k]);
    return merged;
}

}  // namespace qland
