#include "qland/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "qland/errors.hpp"

namespace qland {

namespace {

double cross(const HullPoint& o, const HullPoint& a, const HullPoint& b) {
    return (a.energy - o.energy) * (b.probability - o.probability) -
           (a.probability - o.probability) * (b.energy - o.energy);
}

void require_records(const MinimaDatabase& db) {
    if (db.records.empty()) throw InputError("database has no minima");
}

// Boundary segments; a degenerate two-vertex hull yields one segment.
std::vector<std::pair<HullPoint, HullPoint>> boundary(const ConvexHull& h) {
    std::vector<std::pair<HullPoint, HullPoint>> out;
    const auto& v = h.vertices;
    if (v.size() == 1) out.push_back({v[0], v[0]});
    if (v.size() == 2) out.push_back({v[0], v[1]});
    if (v.size() >= 3)
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back({v[i], v[(i + 1) % v.size()]});
    return out;
}

// Intersection points of segments ab and cd (including collinear overlaps'
// endpoints).
void segment_intersections(const HullPoint& a, const HullPoint& b, const HullPoint& c, const HullPoint& d,
                           std::vector<HullPoint>& out) {
    constexpr double eps = 1e-12;
    const double d1 = cross(c, d, a), d2 = cross(c, d, b);
    const double d3 = cross(a, b, c), d4 = cross(a, b, d);
    auto on_segment = [](const HullPoint& p, const HullPoint& q, const HullPoint& r) {
        return std::min(p.energy, q.energy) - eps <= r.energy && r.energy <= std::max(p.energy, q.energy) + eps &&
               std::min(p.probability, q.probability) - eps <= r.probability &&
               r.probability <= std::max(p.probability, q.probability) + eps;
    };
    if (std::abs(d1) <= eps && std::abs(d2) <= eps) {
        for (const auto& p : {a, b})
            if (on_segment(c, d, p)) out.push_back(p);
        for (const auto& p : {c, d})
            if (on_segment(a, b, p)) out.push_back(p);
        return;
    }
    if ((d1 > eps && d2 > eps) || (d1 < -eps && d2 < -eps)) return;
    if ((d3 > eps && d4 > eps) || (d3 < -eps && d4 < -eps)) return;
    const double t = d1 / (d1 - d2);
    out.push_back({a.energy + t * (b.energy - a.energy), a.probability + t * (b.probability - a.probability)});
}

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string opt(const std::optional<double>& v, const char* spec = "%.6f") { return v ? fmt(*v, spec) : "-"; }

std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : "-"; }

}  // namespace

Hcmp hcmp(const MinimaDatabase& db) {
    require_records(db);
    const auto& r = db.records;
    if (r.size() > 1 && r[1].p_solution > r[0].p_solution) return {r[1].p_solution, false, 1};
    return {r[0].p_solution, true, 0};
}

double max_solution_probability(const MinimaDatabase& db) {
    require_records(db);
    double best = 0.0;
    for (const auto& r : db.records) best = std::max(best, r.p_solution);
    return best;
}

double f_metric(const MinimaDatabase& db) {
    require_records(db);
    double e_min = db.records.front().energy;
    for (const auto& r : db.records) e_min = std::min(e_min, r.energy);
    if (std::abs(e_min) < 1e-12) throw InputError("F is undefined for a zero global-minimum energy");
    double sum = 0.0;
    for (const auto& r : db.records) sum += std::abs(e_min - r.energy) * (1.0 - r.p_solution);
    return sum / (static_cast<double>(db.records.size()) * std::abs(e_min));
}

bool ConvexHull::contains(const HullPoint& p, double tol) const {
    const auto& v = vertices;
    if (v.empty()) return false;
    if (v.size() == 1) return std::abs(v[0].energy - p.energy) <= tol && std::abs(v[0].probability - p.probability) <= tol;
    if (v.size() == 2) {
        if (std::abs(cross(v[0], v[1], p)) > tol) return false;
        return std::min(v[0].energy, v[1].energy) - tol <= p.energy && p.energy <= std::max(v[0].energy, v[1].energy) + tol &&
               std::min(v[0].probability, v[1].probability) - tol <= p.probability &&
               p.probability <= std::max(v[0].probability, v[1].probability) + tol;
    }
    for (std::size_t i = 0; i < v.size(); ++i)
        if (cross(v[i], v[(i + 1) % v.size()], p) < -tol) return false;
    return true;
}

ConvexHull convex_hull(std::vector<HullPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const HullPoint& a, const HullPoint& b) {
        return a.energy < b.energy || (a.energy == b.energy && a.probability < b.probability);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    ConvexHull hull;
    if (pts.size() <= 2) {
        hull.vertices = pts;
        return hull;
    }
    std::vector<HullPoint> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0.0) --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    hull.vertices = std::move(h);
    return hull;
}

std::optional<ExpectationThresholds> expectation_thresholds(const ConvexHull& hull, double e_min, double p_op) {
    std::vector<double> hits;
    for (const auto& [a, b] : boundary(hull)) {
        const double da = a.probability - p_op, db = b.probability - p_op;
        if (da == 0.0) hits.push_back(a.energy);
        if (db == 0.0) hits.push_back(b.energy);
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0))
            hits.push_back(a.energy + (p_op - a.probability) / (b.probability - a.probability) * (b.energy - a.energy));
    }
    if (hits.empty()) return std::nullopt;
    const auto [lo, hi] = std::minmax_element(hits.begin(), hits.end());
    return ExpectationThresholds{*lo - e_min, *hi - e_min};
}

std::optional<HullIntersection> hull_intersection_thresholds(const ConvexHull& c_s, const ConvexHull& c_t,
                                                             double e_min) {
    const auto& t = c_t.vertices;
    if (t.size() < 2 || c_s.vertices.empty()) return std::nullopt;
    std::size_t top = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i].probability > t[top].probability) top = i;
    if (top == 0) return std::nullopt;
    // Clockwise from vertex 0 follows the upper chain.
    std::vector<HullPoint> chain{t[0]};
    for (std::size_t i = t.size() - 1;; --i) {
        chain.push_back(t[i]);
        if (i == top) break;
    }
    if (t.size() == 2) chain = {t[0], t[1]};
    std::vector<HullPoint> hits;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        for (const auto& [a, b] : boundary(c_s)) segment_intersections(chain[i], chain[i + 1], a, b, hits);
    std::sort(hits.begin(), hits.end(), [](const HullPoint& a, const HullPoint& b) { return a.energy < b.energy; });
    hits.erase(std::unique(hits.begin(), hits.end(),
                           [](const HullPoint& a, const HullPoint& b) {
                               return std::abs(a.energy - b.energy) <= 1e-12 &&
                                      std::abs(a.probability - b.probability) <= 1e-12;
                           }),
               hits.end());
    if (hits.size() < 2) return std::nullopt;
    const auto& lo = hits.front();
    const auto& hi = hits.back();
    return HullIntersection{lo.energy - e_min, hi.energy - e_min, lo.probability, hi.probability};
}

std::optional<DeltaMetrics> delta_metrics(const MinimaDatabase& db) {
    const auto h = hcmp(db);
    if (h.is_global) return std::nullopt;
    const auto& gm = db.records.front();
    return DeltaMetrics{std::abs(db.records[h.index].energy - gm.energy), h.value - gm.p_solution};
}

ConvexHull solution_hull(const MinimaDatabase& db) {
    std::vector<HullPoint> pts;
    for (const auto& r : db.records) pts.push_back({r.energy, r.p_solution});
    return convex_hull(std::move(pts));
}

ConvexHull alternative_hull(const MinimaDatabase& db) {
    std::vector<HullPoint> pts;
    for (const auto& r : db.records)
        if (r.p_alternative) pts.push_back({r.energy, *r.p_alternative});
    return convex_hull(std::move(pts));
}

double default_p_op(std::string_view graph_id) { return graph_id == "G4" ? 0.25 : 0.5; }

AnalysisReport analyze(const MinimaDatabase& counts, const MinimaDatabase& metrics, double p_op) {
    require_records(counts);
    require_records(metrics);
    if (counts.layers != metrics.layers || !(counts.graph == metrics.graph))
        throw InputError("databases describe different graphs or layer counts");
    AnalysisReport r;
    r.graph_id = counts.graph_id;
    r.layers = counts.layers;
    r.m = counts.records.size();
    r.e_min = counts.records.front().energy;
    const auto h = hcmp(counts);
    r.hcmp = h.value;
    r.hcmp_is_global = h.is_global;
    r.p_max = max_solution_probability(counts);
    r.delta = delta_metrics(counts);
    r.counts_source = counts.provenance;
    r.metrics_source = metrics.provenance;
    r.metrics_m = metrics.records.size();
    r.f_metric = f_metric(metrics);
    r.p_op = p_op;
    const double e_gm = metrics.records.front().energy;
    const auto c_s = solution_hull(metrics);
    r.d12 = expectation_thresholds(c_s, e_gm, p_op);
    const auto c_t = alternative_hull(metrics);
    if (!c_t.vertices.empty()) r.d34 = hull_intersection_thresholds(c_s, c_t, e_gm);
    return r;
}

void annotate_layer_candidates(std::vector<AnalysisReport>& reports) {
    std::map<std::string, std::vector<AnalysisReport*>> by_graph;
    for (auto& r : reports) by_graph[r.graph_id].push_back(&r);
    for (auto& [id, group] : by_graph) {
        std::sort(group.begin(), group.end(), [](auto* a, auto* b) { return a->layers < b->layers; });
        double best = 0.0;
        for (auto* r : group) best = std::max(best, r->hcmp);
        std::optional<int> l_min, l_ad;
        for (auto* r : group) {
            if (!l_min && r->hcmp >= best - 1e-6) l_min = r->layers;
            if (!l_ad && r->m == 1 && r->hcmp >= 1.0 - 1e-6) l_ad = r->layers;
        }
        for (auto* r : group) {
            r->l_min_candidate = l_min;
            r->l_ad_candidate = l_ad;
        }
    }
}

std::string report_text(const AnalysisReport& r) {
    std::string out;
    auto line = [&](const std::string& k, const std::string& v) { out += k + "=" + v + "\n"; };
    line("graph_id", r.graph_id);
    line("layers", std::to_string(r.layers));
    line("m", std::to_string(r.m));
    line("e_min", fmt(r.e_min, "%.9f"));
    line("hcmp", fmt(r.hcmp));
    line("hcmp_is_global", r.hcmp_is_global ? "true" : "false");
    line("p_max", fmt(r.p_max));
    line("delta_e", opt(r.delta ? std::optional(r.delta->delta_e) : std::nullopt));
    line("delta_p", opt(r.delta ? std::optional(r.delta->delta_p) : std::nullopt));
    line("counts_source", to_string(r.counts_source));
    line("metrics_source", to_string(r.metrics_source));
    line("metrics_m", std::to_string(r.metrics_m));
    line("f", fmt(r.f_metric));
    line("p_op", fmt(r.p_op));
    line("d1", opt(r.d12 ? std::optional(r.d12->d1) : std::nullopt));
    line("d2", opt(r.d12 ? std::optional(r.d12->d2) : std::nullopt));
    line("d3", opt(r.d34 ? std::optional(r.d34->d3) : std::nullopt));
    line("d4", opt(r.d34 ? std::optional(r.d34->d4) : std::nullopt));
    line("p1", opt(r.d34 ? std::optional(r.d34->p1) : std::nullopt));
    line("p2", opt(r.d34 ? std::optional(r.d34->p2) : std::nullopt));
    line("l_min_candidate", opt_int(r.l_min_candidate));
    line("l_ad_candidate", opt_int(r.l_ad_candidate));
    return out;
}

std::string report_csv_header() {
    return "graph_id,layers,m,e_min,hcmp,hcmp_is_global,p_max,delta_e,delta_p,counts_source,metrics_source,"
           "metrics_m,f,p_op,d1,d2,d3,d4,p1,p2,l_min_candidate,l_ad_candidate\n";
}

std::string report_csv_row(const AnalysisReport& r) {
    const char* g = "%.9g";
    auto o = [&](bool has, double v) { return has ? fmt(v, g) : std::string(); };
    std::string out = r.graph_id + "," + std::to_string(r.layers) + "," + std::to_string(r.m) + "," + fmt(r.e_min, g) +
                      "," + fmt(r.hcmp, g) + "," + (r.hcmp_is_global ? "1" : "0") + "," + fmt(r.p_max, g) + "," +
                      o(r.delta.has_value(), r.delta ? r.delta->delta_e : 0) + "," +
                      o(r.delta.has_value(), r.delta ? r.delta->delta_p : 0) + "," + to_string(r.counts_source) +
                      "," + to_string(r.metrics_source) + "," + std::to_string(r.metrics_m) + "," +
                      fmt(r.f_metric, g) + "," + fmt(r.p_op, g) + "," + o(r.d12.has_value(), r.d12 ? r.d12->d1 : 0) +
                      "," + o(r.d12.has_value(), r.d12 ? r.d12->d2 : 0) + "," +
                      o(r.d34.has_value(), r.d34 ? r.d34->d3 : 0) + "," + o(r.d34.has_value(), r.d34 ? r.d34->d4 : 0) +
                      "," + o(r.d34.has_value(), r.d34 ? r.d34->p1 : 0) + "," +
                      o(r.d34.has_value(), r.d34 ? r.d34->p2 : 0) + "," +
                      (r.l_min_candidate ? std::to_string(*r.l_min_candidate) : "") + "," +
                      (r.l_ad_candidate ? std::to_string(*r.l_ad_candidate) : "") + "\n";
    return out;
}

std::string sweep_table(const std::vector<AnalysisReport>& reports) {
    std::map<std::string, std::map<int, const AnalysisReport*>> grid;
    std::map<int, bool> layers;
    for (const auto& r : reports) {
        grid[r.graph_id][r.layers] = &r;
        layers[r.layers] = true;
    }
    std::string out = "graph\trow";
    for (const auto& [l, _] : layers) out += "\tL=" + std::to_string(l);
    out += "\n";
    for (const auto& [id, row] : grid) {
        for (const char* what : {"M", "HCMP", "F"}) {
            out += id + "\t" + what;
            for (const auto& [l, _] : layers) {
                out += "\t";
                auto it = row.find(l);
                if (it == row.end()) {
                    out += "-";
                    continue;
                }
                const auto& r = *it->second;
                if (what[0] == 'M') out += std::to_string(r.m);
                else if (what[0] == 'H') out += fmt(r.hcmp) + (r.hcmp_is_global ? "" : "*");
                else out += fmt(r.f_metric);
            }
            out += "\n";
        }
    }
    return out;
}

}  // namespace qland
