#include "qland/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>

namespace qland {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

struct Trial {
    double alpha = 0.0;
    double f = 0.0;
    double slope = 0.0;
    std::vector<double> x;
    std::vector<double> g;
};

// Minimizer of the cubic interpolating (a, fa, da), (b, fb, db), clamped to
// the interior of [min(a,b), max(a,b)].
double cubic_step(double a, double fa, double da, double b, double fb, double db) {
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    const double margin = 0.1 * (hi - lo);
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    double t = 0.5 * (a + b);
    if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), b - a);
        const double denom = db - da + 2.0 * d2;
        if (denom != 0.0) t = b - (b - a) * (db + d2 - d1) / denom;
    }
    if (!std::isfinite(t)) t = 0.5 * (a + b);
    return std::clamp(t, lo + margin, hi - margin);
}

class LineSearch {
public:
    LineSearch(const Objective& obj, const LbfgsOptions& opt, std::span<const double> x, double f0,
               std::span<const double> dir, double slope0, int& evals)
        : obj_(obj), opt_(opt), x_(x), dir_(dir), f0_(f0), slope0_(slope0), evals_(evals) {
        tiny_ = 1e-12 * std::max(1.0, std::abs(f0));
    }

    // Returns false when no acceptable step was found.
    bool run(double alpha0, double alpha_max, Trial& out) {
        Trial prev{0.0, f0_, slope0_, {}, {}};
        double alpha = std::min(alpha0, alpha_max);
        for (int k = 0; k < opt_.max_line_search; ++k) {
            Trial cur = evaluate(alpha);
            if (accept(cur)) {
                out = std::move(cur);
                return true;
            }
            const bool armijo = cur.f <= f0_ + opt_.c1 * alpha * slope0_;
            if (alpha >= alpha_max && armijo && (k == 0 || cur.f < prev.f)) {
                out = std::move(cur);
                return true;
            }
            if (cur.f > f0_ + opt_.c1 * alpha * slope0_ || (k > 0 && cur.f >= prev.f)) {
                return zoom(std::move(prev), std::move(cur), out);
            }
            if (cur.slope >= 0.0) return zoom(std::move(cur), std::move(prev), out);
            if (alpha >= alpha_max) break;
            prev = std::move(cur);
            alpha = std::min(2.0 * alpha, alpha_max);
        }
        return fallback(out);
    }

private:
    Trial evaluate(double alpha) {
        Trial t;
        t.alpha = alpha;
        t.x.resize(x_.size());
        t.g.resize(x_.size());
        for (std::size_t i = 0; i < x_.size(); ++i) t.x[i] = x_[i] + alpha * dir_[i];
        t.f = obj_(t.x, t.g);
        ++evals_;
        t.slope = dot(t.g, dir_);
        if (std::isfinite(t.f) && t.f < f0_ && (!best_ || t.f < best_->f)) best_ = t;
        return t;
    }

    bool accept(const Trial& t) const {
        if (!std::isfinite(t.f)) return false;
        const bool armijo = t.f <= f0_ + opt_.c1 * t.alpha * slope0_;
        const bool curvature = std::abs(t.slope) <= -opt_.c2 * slope0_;
        if (armijo && curvature) return true;
        // Approximate Wolfe conditions for decreases below resolution.
        const bool approx_decrease = t.f <= f0_ + tiny_;
        const bool approx_slope = opt_.c2 * slope0_ <= t.slope && t.slope <= (2.0 * opt_.c1 - 1.0) * slope0_;
        return approx_decrease && approx_slope;
    }

    bool zoom(Trial lo, Trial hi, Trial& out) {
        for (int k = 0; k < opt_.max_line_search; ++k) {
            if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, lo.alpha)) break;
            // Below energy resolution only the slopes carry information.
            const bool slope_only = std::abs(hi.alpha - lo.alpha) * std::abs(slope0_) < tiny_;
            double alpha;
            if (slope_only) {
                alpha = 0.5 * (lo.alpha + hi.alpha);
                if (lo.slope < 0.0 && hi.slope > 0.0) {
                    const double secant = lo.alpha - lo.slope * (hi.alpha - lo.alpha) / (hi.slope - lo.slope);
                    const double lo_b = std::min(lo.alpha, hi.alpha);
                    const double hi_b = std::max(lo.alpha, hi.alpha);
                    const double margin = 0.05 * (hi_b - lo_b);
                    alpha = std::clamp(secant, lo_b + margin, hi_b - margin);
                }
            } else {
                alpha = cubic_step(lo.alpha, lo.f, lo.slope, hi.alpha, hi.f, hi.slope);
            }
            Trial cur = evaluate(alpha);
            if (accept(cur)) {
                out = std::move(cur);
                return true;
            }
            if (slope_only) {
                if (!std::isfinite(cur.f) || cur.slope >= 0.0) {
                    hi = std::move(cur);
                } else {
                    lo = std::move(cur);
                }
            } else if (!std::isfinite(cur.f) || cur.f > f0_ + opt_.c1 * alpha * slope0_ || cur.f >= lo.f) {
                hi = std::move(cur);
            } else {
                if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = std::move(lo);
                lo = std::move(cur);
            }
        }
        return fallback(out);
    }

    bool fallback(Trial& out) {
        if (!best_) return false;
        out = *best_;
        return true;
    }

    const Objective& obj_;
    const LbfgsOptions& opt_;
    std::span<const double> x_;
    std::span<const double> dir_;
    double f0_;
    double slope0_;
    double tiny_;
    int& evals_;
    std::optional<Trial> best_;
};

}  // namespace

double rms_of(std::span<const double> g) {
    if (g.empty()) return 0.0;
    return std::sqrt(dot(g, g) / static_cast<double>(g.size()));
}

LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0, const LbfgsOptions& options) {
    LbfgsResult res;
    const std::size_t n = x0.size();
    res.x = std::move(x0);
    res.grad.assign(n, 0.0);
    if (std::any_of(res.x.begin(), res.x.end(), [](double v) { return !std::isfinite(v); })) {
        res.message = "non-finite starting point";
        return res;
    }
    res.f = objective(res.x, res.grad);
    res.evaluations = 1;
    if (!std::isfinite(res.f) || std::any_of(res.grad.begin(), res.grad.end(), [](double v) { return !std::isfinite(v); })) {
        res.message = "objective returned NaN";
        return res;
    }
    res.rms = rms_of(res.grad);

    struct Pair {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair> history;
    std::vector<double> dir(n);
    std::vector<double> alpha_buf(options.memory);
    int consecutive_failures = 0;

    while (true) {
        if (res.rms <= options.rms_tolerance) {
            res.converged = true;
            res.message = "converged";
            return res;
        }
        if (res.iterations >= options.max_iterations) {
            res.message = "iteration limit reached";
            return res;
        }

        // Two-loop recursion.
        for (std::size_t i = 0; i < n; ++i) dir[i] = -res.grad[i];
        for (std::size_t k = history.size(); k-- > 0;) {
            const auto& h = history[k];
            alpha_buf[k] = h.rho * dot(h.s, dir);
            for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha_buf[k] * h.y[i];
        }
        if (!history.empty()) {
            const auto& h = history.back();
            const double scale = dot(h.s, h.y) / dot(h.y, h.y);
            for (auto& d : dir) d *= scale;
        }
        for (std::size_t k = 0; k < history.size(); ++k) {
            const auto& h = history[k];
            const double beta = h.rho * dot(h.y, dir);
            for (std::size_t i = 0; i < n; ++i) dir[i] += (alpha_buf[k] - beta) * h.s[i];
        }

        double slope = dot(res.grad, dir);
        if (!(slope < 0.0)) {
            history.clear();
            for (std::size_t i = 0; i < n; ++i) dir[i] = -res.grad[i];
            slope = dot(res.grad, dir);
        }
        double largest = 0.0;
        for (double d : dir) largest = std::max(largest, std::abs(d));
        const double alpha_max = largest > 0.0 ? options.max_step / largest : 1.0;
        const double alpha0 = std::min(1.0, alpha_max);

        Trial step;
        LineSearch ls(objective, options, res.x, res.f, dir, slope, res.evaluations);
        if (!ls.run(alpha0, alpha_max, step)) {
            if (history.empty() || ++consecutive_failures > 2) {
                res.message = "line search failed";
                return res;
            }
            history.clear();
            continue;
        }
        consecutive_failures = 0;
        if (std::any_of(step.g.begin(), step.g.end(), [](double v) { return !std::isfinite(v); })) {
            res.message = "objective returned NaN";
            return res;
        }

        Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            p.s[i] = step.x[i] - res.x[i];
            p.y[i] = step.g[i] - res.grad[i];
        }
        const double sy = dot(p.s, p.y);
        if (sy > 1e-300 && sy > std::numeric_limits<double>::epsilon() * std::sqrt(dot(p.s, p.s) * dot(p.y, p.y))) {
            p.rho = 1.0 / sy;
            history.push_back(std::move(p));
            if (static_cast<int>(history.size()) > options.memory) history.pop_front();
        }

        res.x = std::move(step.x);
        res.grad = std::move(step.g);
        res.f = step.f;
        res.rms = rms_of(res.grad);
        ++res.iterations;
    }
}

}  // namespace qland
