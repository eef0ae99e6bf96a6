#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qland/minima.hpp"

namespace qland {

struct TransitionStateRecord {
    ParameterVector theta;
    double energy = 0.0;
    double rms_gradient = 0.0;
    double negative_eigenvalue = 0.0;
    std::size_t min_a = 0;
    std::size_t min_b = 0;
    /// Second-lowest Hessian eigenvalue not clearly positive.
    bool degenerate_spectrum = false;

    /// Both sides descend into the same database minimum.
    bool degenerate_path() const noexcept { return min_a == min_b; }
};

struct DnebConfig {
    int images = 11;  // interior
    double spring = 1.0;
    double rms_tolerance = 1e-4;
    int max_iterations = 1000;
    double max_step = 0.1;
    double time_step = 0.02;
    double max_time_step = 0.2;
};

struct RefineConfig {
    double rms_tolerance = 1e-8;
    int max_iterations = 200;
    double max_uphill_step = 0.2;
    int tangent_iterations = 8;
    double eigen_tolerance = 1e-8;
};

struct ConnectConfig {
    DnebConfig dneb;
    RefineConfig refine;
    /// Attempt budget; negative means 10 * M.
    int budget = -1;
    int jobs = 1;
    double endpoint_step = 1e-4;
};

/// Minima plus transition states. Minimum indices refer to minima.records.
class KineticTransitionNetwork {
public:
    explicit KineticTransitionNetwork(MinimaDatabase minima);

    MinimaDatabase minima;
    std::vector<TransitionStateRecord> transition_states;

    /// Component label per minimum, numbered in order of first appearance.
    std::vector<int> components() const;
    int component_count() const;

    /// Inserts or finds a minimum, shifting TS indices on insertion.
    std::size_t add_minimum(MinimumRecord rec, bool& inserted);

    /// Adds ts unless an equivalent one (same energy within dedup and same
    /// endpoint pair) exists. Returns whether it was added.
    bool add_transition_state(TransitionStateRecord ts);

    /// Throws InputError when a TS endpoint index is out of range.
    void validate() const;
};

struct DnebResult {
    std::vector<ParameterVector> candidates;
    std::vector<ParameterVector> band;  // endpoints included
    std::vector<double> energies;
    double rms = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string diagnostic;
};

/// Period of each flat coordinate for shortest-arc interpolation; 0 means
/// none. gamma has period 4 pi on integer-weight graphs, delta has 2 pi.
std::vector<double> angle_periods(const WeightedGraph& g, int layers);

/// Doubly-nudged elastic band between two minima, relaxed until the band rms
/// falls below the tolerance or the iteration budget runs out. Returns the
/// interior images that are energy maxima along the band; `converged` and the
/// diagnostic report how far relaxation got. Throws InputError for identical
/// endpoints.
DnebResult dneb_candidates(const WeightedGraph& g, const ParameterVector& a, const ParameterVector& b,
                           const DnebConfig& cfg = {});

enum class RefineStatus { Converged, NotConverged, Minimum, HigherIndex };

const char* to_string(RefineStatus s);

struct RefineResult {
    RefineStatus status = RefineStatus::NotConverged;
    TransitionStateRecord ts;  // endpoints unset
    std::vector<double> eigenvector;  // unit vector for the negative eigenvalue
    int index = 0;
    int steps = 0;
};

/// Hybrid eigenvector-following: Rayleigh-Ritz estimate of the lowest
/// Hessian eigenpair from gradient differences, an uphill step along it and
/// L-BFGS minimization in the orthogonal complement, then Newton polishing.
RefineResult refine_transition_state(Evaluator& ev, const ParameterVector& candidate, const RefineConfig& cfg = {});

struct PathEndpoints {
    MinimumRecord plus;
    MinimumRecord minus;
    bool plus_descended = false;
    bool minus_descended = false;
};

/// Minimizes from ts +/- step along the eigenvector.
PathEndpoints path_endpoints(MinimumFactory& factory, const TransitionStateRecord& ts,
                             std::span<const double> eigenvector, double step = 1e-4,
                             const LbfgsOptions& options = {});

struct ConnectStats {
    int attempts = 0;
    int budget = 0;
    int new_minima = 0;
    int rejected_candidates = 0;
    bool budget_exhausted = false;
};

struct ConnectResult {
    KineticTransitionNetwork network;
    ConnectStats stats;
};

/// Missing-connection search: repeated Dijkstra on the complete graph of
/// minima with weight 0 inside a connected component and 1 - |<psi_a|psi_b>|
/// otherwise; DNEB + refinement on every nonzero edge of the path from the
/// global minimum to each unconnected minimum.
ConnectResult connect_database(const MinimaDatabase& db, const ConnectConfig& cfg = {});

}  // namespace qland
