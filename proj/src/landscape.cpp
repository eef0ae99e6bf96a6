#include "qland/landscape.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <set>
#include <thread>

#include "qland/errors.hpp"
#include "qland/hessian.hpp"

namespace qland {

namespace {

using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void normalize(Vec& v) {
    const double n = norm(v);
    if (n > 0.0)
        for (auto& x : v) x /= n;
}

struct UnionFind {
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> parent;
};

}  // namespace

KineticTransitionNetwork::KineticTransitionNetwork(MinimaDatabase db) : minima(std::move(db)) {}

std::vector<int> KineticTransitionNetwork::components() const {
    UnionFind uf(minima.records.size());
    for (const auto& ts : transition_states) uf.unite(ts.min_a, ts.min_b);
    std::vector<int> label(minima.records.size(), -1);
    std::vector<int> root_label(minima.records.size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < label.size(); ++i) {
        const auto r = uf.find(i);
        if (root_label[r] < 0) root_label[r] = next++;
        label[i] = root_label[r];
    }
    return label;
}

int KineticTransitionNetwork::component_count() const {
    const auto c = components();
    return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1;
}

std::size_t KineticTransitionNetwork::add_minimum(MinimumRecord rec, bool& inserted) {
    const auto idx = insert_or_find(minima, std::move(rec), inserted);
    if (inserted) {
        for (auto& ts : transition_states) {
            if (ts.min_a >= idx) ++ts.min_a;
            if (ts.min_b >= idx) ++ts.min_b;
        }
    }
    return idx;
}

bool KineticTransitionNetwork::add_transition_state(TransitionStateRecord ts) {
    if (ts.min_a > ts.min_b) std::swap(ts.min_a, ts.min_b);
    for (const auto& t : transition_states) {
        if (t.min_a == ts.min_a && t.min_b == ts.min_b &&
            std::abs(t.energy - ts.energy) <= minima.run_config.dedup_energy)
            return false;
    }
    transition_states.push_back(std::move(ts));
    return true;
}

void KineticTransitionNetwork::validate() const {
    const auto m = minima.records.size();
    for (std::size_t k = 0; k < transition_states.size(); ++k) {
        const auto& ts = transition_states[k];
        if (ts.min_a >= m || ts.min_b >= m)
            throw InputError("transition state " + std::to_string(k) + " refers to a missing minimum");
        if (ts.theta.layers() != minima.layers)
            throw InputError("transition state " + std::to_string(k) + " has the wrong layer count");
    }
}

std::vector<double> angle_periods(const WeightedGraph& g, int layers) {
    const double gamma_period = g.has_integer_weights() ? 4.0 * std::numbers::pi : 0.0;
    std::vector<double> out(2 * static_cast<std::size_t>(layers), 2.0 * std::numbers::pi);
    std::fill_n(out.begin(), layers, gamma_period);
    return out;
}

// ---------------------------------------------------------------------------
// DNEB

DnebResult dneb_candidates(const WeightedGraph& g, const ParameterVector& a, const ParameterVector& b,
                           const DnebConfig& cfg) {
    if (a.layers() != b.layers()) throw InputError("endpoints have different layer counts");
    if (cfg.images < 1) throw InputError("band needs at least one interior image");
    Evaluator ev{CostDiagonal(g)};
    const Vec xa = a.flat();
    Vec xb = b.flat();
    const std::size_t d = xa.size();
    const auto periods = angle_periods(g, a.layers());
    for (std::size_t k = 0; k < d; ++k) {
        if (periods[k] > 0.0) xb[k] = xa[k] + std::remainder(xb[k] - xa[k], periods[k]);
    }
    Vec diff(d);
    for (std::size_t k = 0; k < d; ++k) diff[k] = xb[k] - xa[k];
    if (norm(diff) < 1e-8) throw InputError("band endpoints are identical");

    const int K = cfg.images;
    const std::size_t n = static_cast<std::size_t>(K) * d;
    Vec x(n);
    for (int i = 0; i < K; ++i) {
        const double t = double(i + 1) / (K + 1);
        for (std::size_t k = 0; k < d; ++k) x[i * d + k] = xa[k] + t * diff[k];
    }
    const double ea = ev.energy(xa);
    const double eb = ev.energy(xb);
    Vec energies(K + 2);
    energies.front() = ea;
    energies.back() = eb;

    auto image = [&](const Vec& band, int i) -> std::span<const double> {
        if (i == 0) return xa;
        if (i == K + 1) return xb;
        return std::span<const double>(band).subspan((i - 1) * d, d);
    };

    Vec grad_true(n);
    auto band_gradient = [&](const Vec& band, Vec& out) {
        for (int i = 1; i <= K; ++i) {
            energies[i] = ev.energy_and_gradient(image(band, i), std::span<double>(grad_true).subspan((i - 1) * d, d));
        }
        Vec tp(d), tm(d), tau(d), gs(d);
        for (int i = 1; i <= K; ++i) {
            const auto xi = image(band, i), xp = image(band, i + 1), xm = image(band, i - 1);
            for (std::size_t k = 0; k < d; ++k) {
                tp[k] = xp[k] - xi[k];
                tm[k] = xi[k] - xm[k];
            }
            const double e = energies[i], ep = energies[i + 1], em = energies[i - 1];
            if (ep > e && e > em) {
                tau = tp;
            } else if (ep < e && e < em) {
                tau = tm;
            } else {
                const double dmax = std::max(std::abs(ep - e), std::abs(em - e));
                const double dmin = std::min(std::abs(ep - e), std::abs(em - e));
                const double wp = ep > em ? dmax : dmin;
                const double wm = ep > em ? dmin : dmax;
                for (std::size_t k = 0; k < d; ++k) tau[k] = wp * tp[k] + wm * tm[k];
            }
            normalize(tau);
            for (std::size_t k = 0; k < d; ++k) gs[k] = cfg.spring * (2.0 * xi[k] - xm[k] - xp[k]);
            const auto gt = std::span<const double>(grad_true).subspan((i - 1) * d, d);
            const double gt_par = dot(gt, tau);
            const double gs_par = dot(gs, tau);
            Vec gperp(d), gsperp(d);
            for (std::size_t k = 0; k < d; ++k) {
                gperp[k] = gt[k] - gt_par * tau[k];
                gsperp[k] = gs[k] - gs_par * tau[k];
            }
            const double gperp_norm = norm(gperp);
            double nudge = 0.0;
            if (gperp_norm > 1e-12) nudge = dot(gsperp, gperp) / (gperp_norm * gperp_norm);
            auto o = std::span<double>(out).subspan((i - 1) * d, d);
            for (std::size_t k = 0; k < d; ++k) o[k] = gperp[k] + gs_par * tau[k] + gsperp[k] - nudge * gperp[k];
        }
    };

    // FIRE relaxation; the projected force is not a gradient, so no line search.
    Vec G(n), vel(n, 0.0);
    band_gradient(x, G);
    DnebResult res;
    double dt = cfg.time_step;
    double mix = 0.1;
    int since_reset = 0;
    for (res.iterations = 0; res.iterations < cfg.max_iterations; ++res.iterations) {
        res.rms = std::sqrt(dot(G, G) / double(n));
        if (res.rms <= cfg.rms_tolerance) {
            res.converged = true;
            break;
        }
        const double power = -dot(G, vel);
        if (power > 0.0) {
            const double vn = norm(vel), gn = norm(G);
            for (std::size_t k = 0; k < n; ++k) vel[k] = (1.0 - mix) * vel[k] - mix * vn * G[k] / gn;
            if (++since_reset > 5) {
                dt = std::min(dt * 1.1, cfg.max_time_step);
                mix *= 0.99;
            }
        } else {
            std::fill(vel.begin(), vel.end(), 0.0);
            dt *= 0.5;
            mix = 0.1;
            since_reset = 0;
        }
        for (std::size_t k = 0; k < n; ++k) vel[k] -= dt * G[k];
        double biggest = 0.0;
        for (double v : vel) biggest = std::max(biggest, std::abs(v) * dt);
        const double scale = biggest > cfg.max_step ? cfg.max_step / biggest : 1.0;
        for (std::size_t k = 0; k < n; ++k) x[k] += scale * dt * vel[k];
        band_gradient(x, G);
    }
    if (!res.converged) res.rms = std::sqrt(dot(G, G) / double(n));

    for (int i = 0; i <= K + 1; ++i) {
        const auto xi = image(x, i);
        res.band.push_back(ParameterVector::from_flat(xi));
    }
    res.energies = energies;
    if (!res.converged) {
        res.diagnostic = "band rms " + std::to_string(res.rms) + " after " + std::to_string(res.iterations) +
                         " iterations";
    }
    for (int i = 1; i <= K; ++i) {
        if (energies[i] > energies[i - 1] && energies[i] > energies[i + 1]) res.candidates.push_back(res.band[i]);
    }
    if (res.candidates.empty() && res.diagnostic.empty()) res.diagnostic = "no interior energy maximum";
    return res;
}

// ---------------------------------------------------------------------------
// Eigenvector following

const char* to_string(RefineStatus s) {
    switch (s) {
        case RefineStatus::Converged: return "converged";
        case RefineStatus::NotConverged: return "not converged";
        case RefineStatus::Minimum: return "minimum";
        case RefineStatus::HigherIndex: return "higher-index saddle";
    }
    return "unknown";
}

namespace {

// Lowest eigenpair by Rayleigh-Ritz on span{v, residual, previous step}.
double lowest_eigenpair(Evaluator& ev, std::span<const double> x, Vec& v, int iterations, double tol) {
    const std::size_t d = x.size();
    if (norm(v) == 0.0) {
        v.assign(d, 1.0);
        for (std::size_t k = 0; k < d; ++k) v[k] += 0.1 * double(k);
    }
    normalize(v);
    Vec prev_dir;
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        const Vec hv = hessian_vector_product(ev, x, v);
        lambda = dot(v, hv);
        Vec r(d);
        for (std::size_t k = 0; k < d; ++k) r[k] = hv[k] - lambda * v[k];
        if (norm(r) < tol) break;
        std::vector<Vec> basis{v};
        auto add = [&](Vec w) {
            for (const auto& b : basis) {
                const double c = dot(w, b);
                for (std::size_t k = 0; k < d; ++k) w[k] -= c * b[k];
            }
            const double nw = norm(w);
            if (nw > 1e-10) {
                for (auto& val : w) val /= nw;
                basis.push_back(std::move(w));
            }
        };
        add(r);
        if (!prev_dir.empty()) add(prev_dir);
        const std::size_t m = basis.size();
        std::vector<Vec> hb{hv};
        for (std::size_t j = 1; j < m; ++j) hb.push_back(hessian_vector_product(ev, x, basis[j]));
        Eigen::MatrixXd small(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) small(i, j) = 0.5 * (dot(basis[i], hb[j]) + dot(basis[j], hb[i]));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(small);
        Vec next(d, 0.0);
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < d; ++k) next[k] += solver.eigenvectors()(j, 0) * basis[j][k];
        normalize(next);
        prev_dir.assign(d, 0.0);
        for (std::size_t k = 0; k < d; ++k) prev_dir[k] = next[k] - v[k];
        v = std::move(next);
        lambda = solver.eigenvalues()(0);
    }
    return lambda;
}

// One Newton step on the gradient with the full Hessian; returns false if
// the Hessian is too singular.
bool newton_step(Evaluator& ev, Vec& x, std::span<const double> grad) {
    const std::size_t d = x.size();
    const auto e = symmetric_eigen(numerical_hessian(ev, x), d);
    Vec step(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        if (std::abs(e.values[j]) < 1e-8) continue;
        const double c = dot(e.vectors[j], grad) / e.values[j];
        for (std::size_t k = 0; k < d; ++k) step[k] -= c * e.vectors[j][k];
    }
    double biggest = 0.0;
    for (double s : step) biggest = std::max(biggest, std::abs(s));
    if (biggest > 0.1) return false;
    for (std::size_t k = 0; k < d; ++k) x[k] += step[k];
    return true;
}

}  // namespace

RefineResult refine_transition_state(Evaluator& ev, const ParameterVector& candidate, const RefineConfig& cfg) {
    Vec x = candidate.flat();
    const std::size_t d = x.size();
    Vec g(d), v;
    RefineResult out;
    double f = ev.energy_and_gradient(x, g);
    double rms = rms_of(g);
    LbfgsOptions sub;
    sub.max_iterations = cfg.tangent_iterations;
    sub.rms_tolerance = cfg.rms_tolerance * 0.1;
    sub.max_step = cfg.max_uphill_step;

    while (rms > cfg.rms_tolerance && out.steps < cfg.max_iterations) {
        ++out.steps;
        if (rms < 1e-4) {
            Vec trial = x;
            if (newton_step(ev, trial, g)) {
                Vec gt(d);
                const double ft = ev.energy_and_gradient(trial, gt);
                if (rms_of(gt) < rms) {
                    x = std::move(trial);
                    g = std::move(gt);
                    f = ft;
                    rms = rms_of(g);
                    continue;
                }
            }
        }
        const double lambda = lowest_eigenpair(ev, x, v, 30, 1e-7);
        const double F = dot(g, v);
        double t;
        if (lambda < 0.0) {
            t = 2.0 * F / (std::abs(lambda) * (1.0 + std::sqrt(1.0 + 4.0 * F * F / (lambda * lambda))));
        } else {
            t = F >= 0.0 ? cfg.max_uphill_step : -cfg.max_uphill_step;
        }
        t = std::clamp(t, -cfg.max_uphill_step, cfg.max_uphill_step);
        for (std::size_t k = 0; k < d; ++k) x[k] += t * v[k];

        const Vec frozen = v;
        auto projected = [&ev, &frozen](std::span<const double> xx, std::span<double> gg) {
            const double e = ev.energy_and_gradient(xx, gg);
            const double c = dot(gg, frozen);
            for (std::size_t k = 0; k < gg.size(); ++k) gg[k] -= c * frozen[k];
            return e;
        };
        auto r = lbfgs_minimize(projected, x, sub);
        x = std::move(r.x);
        f = ev.energy_and_gradient(x, g);
        rms = rms_of(g);
        if (!std::isfinite(f)) break;
    }

    out.ts.theta = ParameterVector::from_flat(x);
    out.ts.energy = f;
    out.ts.rms_gradient = rms;
    const auto e = symmetric_eigen(numerical_hessian(ev, x), d);
    out.index = hessian_index(e, cfg.eigen_tolerance);
    out.ts.negative_eigenvalue = e.values.front();
    out.eigenvector = e.vectors.front();
    out.ts.degenerate_spectrum = d > 1 && e.values[1] <= cfg.eigen_tolerance;
    if (rms > cfg.rms_tolerance)
        out.status = RefineStatus::NotConverged;
    else if (out.index == 0)
        out.status = RefineStatus::Minimum;
    else if (out.index >= 2)
        out.status = RefineStatus::HigherIndex;
    else
        out.status = RefineStatus::Converged;
    return out;
}

PathEndpoints path_endpoints(MinimumFactory& factory, const TransitionStateRecord& ts,
                             std::span<const double> eigenvector, double step, const LbfgsOptions& options) {
    const Vec x0 = ts.theta.flat();
    if (eigenvector.size() != x0.size()) throw InputError("eigenvector dimension mismatch");
    PathEndpoints out;
    for (int side : {+1, -1}) {
        Vec x = x0;
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += side * step * eigenvector[k];
        const double first = factory.evaluator().energy(x);
        auto rec = lbfgs_minimize(factory, ParameterVector::from_flat(x), options);
        const bool descended = first < ts.energy && rec.energy <= first;
        if (side > 0) {
            out.plus = std::move(rec);
            out.plus_descended = descended;
        } else {
            out.minus = std::move(rec);
            out.minus_descended = descended;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Missing-connection search

namespace {

struct Attempt {
    std::size_t a = 0, b = 0;
    ParameterVector theta_a, theta_b;
};

struct FoundPath {
    TransitionStateRecord ts;
    MinimumRecord plus, minus;
};

struct AttemptOutcome {
    std::vector<FoundPath> paths;
    int rejected = 0;
};

AttemptOutcome run_attempt(MinimumFactory& factory, const WeightedGraph& g, const Attempt& at,
                           const ConnectConfig& cfg, const BasinHoppingConfig& bh) {
    AttemptOutcome out;
    DnebResult band;
    try {
        band = dneb_candidates(g, at.theta_a, at.theta_b, cfg.dneb);
    } catch (const InputError&) {
        return out;
    }
    const auto options = minimizer_options(bh);
    for (const auto& cand : band.candidates) {
        auto ref = refine_transition_state(factory.evaluator(), cand, cfg.refine);
        if (ref.status != RefineStatus::Converged) {
            ++out.rejected;
            continue;
        }
        try {
            auto ends = path_endpoints(factory, ref.ts, ref.eigenvector, cfg.endpoint_step, options);
            auto check = [&](const MinimumRecord& r) {
                LbfgsResult probe;
                probe.x = r.theta.flat();
                probe.f = r.energy;
                return factory.is_minimum(probe, bh);
            };
            if (!check(ends.plus) || !check(ends.minus)) {
                ++out.rejected;
                continue;
            }
            out.paths.push_back({std::move(ref.ts), std::move(ends.plus), std::move(ends.minus)});
        } catch (const ConvergenceError&) {
            ++out.rejected;
        }
    }
    return out;
}

std::pair<double, double> pair_key(double ea, double eb) { return {std::min(ea, eb), std::max(ea, eb)}; }

}  // namespace

ConnectResult connect_database(const MinimaDatabase& db, const ConnectConfig& cfg) {
    ConnectResult result{KineticTransitionNetwork(db), {}};
    auto& ktn = result.network;
    auto& stats = result.stats;
    ktn.minima.provenance = Provenance::Connected;
    const auto m0 = ktn.minima.records.size();
    stats.budget = cfg.budget < 0 ? static_cast<int>(10 * m0) : cfg.budget;
    if (m0 < 2) return result;

    const auto& g = ktn.minima.graph;
    const auto& bh = ktn.minima.run_config;
    const int jobs = std::max(1, cfg.jobs);
    std::vector<std::unique_ptr<MinimumFactory>> factories;
    for (int j = 0; j < jobs; ++j)
        factories.push_back(std::make_unique<MinimumFactory>(g, ktn.minima.alternative_states));

    std::vector<StateVector> states;
    for (const auto& r : ktn.minima.records)
        states.emplace_back(factories[0]->evaluator().state(r.theta.flat()));

    std::set<std::pair<double, double>> attempted;
    std::set<double> dead_targets;
    constexpr double kTriedPenalty = 1e3;

    while (true) {
        const auto comp = ktn.components();
        const auto m = ktn.minima.records.size();
        if (*std::max_element(comp.begin(), comp.end()) == 0) break;
        if (stats.attempts >= stats.budget) {
            stats.budget_exhausted = true;
            break;
        }
        std::optional<std::size_t> target;
        for (std::size_t i = 1; i < m; ++i) {
            if (comp[i] != comp[0] && !dead_targets.count(ktn.minima.records[i].energy)) {
                target = i;
                break;
            }
        }
        if (!target) break;

        auto weight = [&](std::size_t u, std::size_t v) {
            if (comp[u] == comp[v]) return 0.0;
            const double s = overlap_distance(states[u], states[v]);
            if (attempted.count(pair_key(ktn.minima.records[u].energy, ktn.minima.records[v].energy)))
                return s + kTriedPenalty;
            return s;
        };
        std::vector<double> dist(m, std::numeric_limits<double>::infinity());
        std::vector<std::size_t> prev(m, m);
        std::vector<bool> done(m, false);
        dist[0] = 0.0;
        for (std::size_t iter = 0; iter < m; ++iter) {
            std::size_t u = m;
            for (std::size_t i = 0; i < m; ++i)
                if (!done[i] && (u == m || dist[i] < dist[u])) u = i;
            if (u == m || u == *target) break;
            done[u] = true;
            for (std::size_t v = 0; v < m; ++v) {
                if (done[v]) continue;
                const double alt = dist[u] + weight(u, v);
                if (alt < dist[v]) {
                    dist[v] = alt;
                    prev[v] = u;
                }
            }
        }
        std::vector<Attempt> batch;
        for (std::size_t v = *target; prev[v] != m; v = prev[v]) {
            const std::size_t u = prev[v];
            if (comp[u] == comp[v]) continue;
            const auto key = pair_key(ktn.minima.records[u].energy, ktn.minima.records[v].energy);
            if (attempted.count(key)) continue;
            attempted.insert(key);
            batch.push_back({u, v, ktn.minima.records[u].theta, ktn.minima.records[v].theta});
        }
        std::reverse(batch.begin(), batch.end());
        if (batch.empty()) {
            dead_targets.insert(ktn.minima.records[*target].energy);
            continue;
        }
        const auto remaining = static_cast<std::size_t>(stats.budget - stats.attempts);
        if (batch.size() > remaining) batch.resize(remaining);
        stats.attempts += static_cast<int>(batch.size());

        std::vector<AttemptOutcome> outcomes(batch.size());
        std::size_t next = 0;
        std::mutex next_mutex;
        auto worker = [&](int slot) {
            while (true) {
                std::size_t k;
                {
                    std::lock_guard lock(next_mutex);
                    if (next >= batch.size()) return;
                    k = next++;
                }
                outcomes[k] = run_attempt(*factories[slot], g, batch[k], cfg, bh);
            }
        };
        const int threads = std::min<int>(jobs, static_cast<int>(batch.size()));
        std::vector<std::thread> pool;
        for (int t = 1; t < threads; ++t) pool.emplace_back(worker, t);
        worker(0);
        for (auto& t : pool) t.join();

        for (auto& outcome : outcomes) {
            stats.rejected_candidates += outcome.rejected;
            for (auto& path : outcome.paths) {
                std::size_t ends[2];
                MinimumRecord* recs[2] = {&path.plus, &path.minus};
                for (int s = 0; s < 2; ++s) {
                    bool inserted = false;
                    StateVector psi(factories[0]->evaluator().state(recs[s]->theta.flat()));
                    ends[s] = ktn.add_minimum(*recs[s], inserted);
                    if (inserted) {
                        ++stats.new_minima;
                        states.insert(states.begin() + static_cast<std::ptrdiff_t>(ends[s]), std::move(psi));
                        if (s == 1 && ends[0] >= ends[1]) ++ends[0];
                    }
                }
                const double floor = std::max(ktn.minima.records[ends[0]].energy, ktn.minima.records[ends[1]].energy);
                if (path.ts.energy < floor - 1e-10) {
                    ++stats.rejected_candidates;
                    continue;
                }
                path.ts.min_a = ends[0];
                path.ts.min_b = ends[1];
                ktn.add_transition_state(std::move(path.ts));
            }
        }
    }
    return result;
}

}  // namespace qland
