#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qland/graph.hpp"
#include "qland/lbfgs.hpp"
#include "qland/simulator.hpp"

namespace qland {

struct BasinHoppingConfig {
    int steps = 10000;
    double temperature = 1.0;
    double max_perturbation = 1.0;
    double rms_threshold = 1e-10;
    double dedup_energy = 1e-9;
    std::uint64_t seed = 1;
    /// Smallest Hessian eigenvalue a converged point needs to count as a
    /// minimum; rejects the flat lines of degenerate stationary points.
    /// Zero disables the check. Points at the ground-state energy are exempt.
    double min_curvature = 1e-6;

    /// Throws InputError unless every field is positive and steps >= 1.
    void validate() const;
};

struct MinimumRecord {
    ParameterVector theta;
    double energy = 0.0;
    double rms_gradient = 0.0;
    double p_solution = 0.0;
    std::optional<double> p_alternative;
    int discovery_step = 0;
};

enum class Provenance { BasinHopping, Connected };

const char* to_string(Provenance p);
std::optional<Provenance> provenance_from_string(std::string_view s);

struct BasinHoppingStats {
    int steps = 0;
    int accepted = 0;
    int failed = 0;
    int non_minima = 0;
    double acceptance_fraction() const {
        const int quenched = steps - failed - non_minima;
        return quenched > 0 ? double(accepted) / quenched : 0.0;
    }
};

/// Local minima for one (graph, L), sorted by ascending energy and
/// deduplicated by energy.
struct MinimaDatabase {
    std::string graph_id;
    WeightedGraph graph;
    int layers = 1;
    BasinHoppingConfig run_config;
    Provenance provenance = Provenance::BasinHopping;
    /// Explicit |t> states; empty means the second-best cut states.
    std::vector<std::uint64_t> alternative_states;
    std::vector<MinimumRecord> records;
    BasinHoppingStats stats;

    MinimaDatabase(std::string id, WeightedGraph g, int layers_, BasinHoppingConfig cfg = {})
        : graph_id(std::move(id)), graph(std::move(g)), layers(layers_), run_config(cfg) {}

    /// Index of the record within dedup_energy of e, if any.
    std::optional<std::size_t> find(double e) const;
};

/// Inserts rec unless a record lies within db.run_config.dedup_energy.
/// Keeps records sorted; returns whether rec was inserted.
bool insert_deduped(MinimaDatabase& db, MinimumRecord rec);

/// Returns the index of an existing record within dedup tolerance, or inserts
/// rec and returns its new index. Indices of later records shift on insertion.
std::size_t insert_or_find(MinimaDatabase& db, MinimumRecord rec, bool& inserted);

/// Evaluates p(|s>), p(|t>) for converged angles.
class MinimumFactory {
public:
    explicit MinimumFactory(const WeightedGraph& g, std::span<const std::uint64_t> alternative_states = {});

    Evaluator& evaluator() noexcept { return eval_; }
    const SolutionSet& solutions() const noexcept { return sols_; }
    Objective objective();

    MinimumRecord make_record(const LbfgsResult& r, int step);

    /// Smallest eigenvalue of the finite-difference Hessian at x.
    double lowest_curvature(std::span<const double> x);

    /// Converged point counts as a minimum under cfg.min_curvature.
    bool is_minimum(const LbfgsResult& r, const BasinHoppingConfig& cfg);

private:
    SolutionSet sols_;
    Evaluator eval_;
};

/// L-BFGS from start on the graph's expectation. Throws ConvergenceError on
/// failure (non-convergence or NaN); the message reports the best point.
MinimumRecord lbfgs_minimize(MinimumFactory& factory, const ParameterVector& start, const LbfgsOptions& options);

LbfgsOptions minimizer_options(const BasinHoppingConfig& cfg);

/// Metropolis basin-hopping. Every converged minimum is databased; failures
/// are counted as skipped steps and abort the run when more than half fail.
MinimaDatabase basin_hop(const WeightedGraph& g, std::string graph_id, int layers, const BasinHoppingConfig& cfg,
                         std::span<const std::uint64_t> alternative_states = {});

/// Runs `streams` independent chains with seeds seed, seed+1, ... on up to
/// `jobs` threads and merges them in stream order.
MinimaDatabase basin_hop_streams(const WeightedGraph& g, std::string graph_id, int layers,
                                 const BasinHoppingConfig& cfg, int streams, int jobs,
                                 std::span<const std::uint64_t> alternative_states = {});

/// Merges b into a under a's dedup threshold.
void merge_into(MinimaDatabase& a, const MinimaDatabase& b);

}  // namespace qland
