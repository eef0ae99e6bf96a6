#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qland/landscape.hpp"
#include "qland/minima.hpp"

namespace qland {

struct Hcmp {
    double value = 0.0;
    bool is_global = true;
    std::size_t index = 0;  // record holding the HCMP
};

/// Highest correct Max-Cut probability: the larger p(|s>) of the global
/// minimum and the next-lowest minimum. Ties favour the global minimum.
/// Throws InputError on an empty database.
Hcmp hcmp(const MinimaDatabase& db);

/// Largest p(|s>) over every record.
double max_solution_probability(const MinimaDatabase& db);

/// F = 1/(M |E_min|) sum_m |E_min - E_m| (1 - p_m).
double f_metric(const MinimaDatabase& db);

struct HullPoint {
    double energy = 0.0;
    double probability = 0.0;
    friend bool operator==(const HullPoint&, const HullPoint&) = default;
};

/// Counterclockwise vertices starting from the lowest (energy, probability)
/// point; collinear boundary points dropped. Degenerate inputs give one or
/// two vertices.
struct ConvexHull {
    std::vector<HullPoint> vertices;
    bool contains(const HullPoint& p, double tol = 1e-12) const;
};

ConvexHull convex_hull(std::vector<HullPoint> points);

struct ExpectationThresholds {
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Offsets from e_min of the outermost crossings of the hull boundary with
/// p = p_op; nullopt when the line misses the hull.
std::optional<ExpectationThresholds> expectation_thresholds(const ConvexHull& hull, double e_min, double p_op);

struct HullIntersection {
    double d3 = 0.0, d4 = 0.0, p1 = 0.0, p2 = 0.0;
};

/// Crossings of C_s with the left edge of C_t, i.e. the upper chain of C_t
/// from its lowest-energy vertex to its highest-probability vertex. Uses the
/// lowest- and highest-energy crossing; nullopt with fewer than two.
std::optional<HullIntersection> hull_intersection_thresholds(const ConvexHull& c_s, const ConvexHull& c_t,
                                                             double e_min);

struct DeltaMetrics {
    double delta_e = 0.0;  // |E_HCMP - E_GM|
    double delta_p = 0.0;  // HCMP - p_GM
};

/// Present only when the HCMP does not sit on the global minimum.
std::optional<DeltaMetrics> delta_metrics(const MinimaDatabase& db);

ConvexHull solution_hull(const MinimaDatabase& db);
/// Hull of (energy, p_alternative); empty when no record carries it.
ConvexHull alternative_hull(const MinimaDatabase& db);

struct AnalysisReport {
    std::string graph_id;
    int layers = 0;
    std::size_t m = 0;
    double e_min = 0.0;
    double hcmp = 0.0;
    bool hcmp_is_global = true;
    double p_max = 0.0;
    double f_metric = 0.0;
    double p_op = 0.5;
    std::optional<ExpectationThresholds> d12;
    std::optional<HullIntersection> d34;
    std::optional<DeltaMetrics> delta;
    /// Database kinds behind each metric group.
    Provenance counts_source = Provenance::BasinHopping;
    Provenance metrics_source = Provenance::BasinHopping;
    std::size_t metrics_m = 0;
    std::optional<int> l_min_candidate;
    std::optional<int> l_ad_candidate;
};

/// Probability cutoff conventionally used for a graph: 0.25 for G4, else 0.5.
double default_p_op(std::string_view graph_id);

/// M, HCMP and delta come from `counts`; F and hulls from `metrics`.
AnalysisReport analyze(const MinimaDatabase& counts, const MinimaDatabase& metrics, double p_op);

/// Sets study-level L_min / L_ad candidates on every report of one graph.
void annotate_layer_candidates(std::vector<AnalysisReport>& reports);

/// "key=value" lines; absent values print as "-".
std::string report_text(const AnalysisReport& r);
std::string report_csv_header();
std::string report_csv_row(const AnalysisReport& r);

/// Sweep table with one column per L: M, HCMP (asterisk when non-global), F.
std::string sweep_table(const std::vector<AnalysisReport>& reports);

}  // namespace qland
