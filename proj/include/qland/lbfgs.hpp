#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qland {

/// Returns f(x) and writes the gradient into grad.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
    int memory = 10;
    int max_iterations = 10000;
    double rms_tolerance = 1e-10;
    double c1 = 1e-4;
    double c2 = 0.9;
    /// Largest per-component displacement of any single step.
    double max_step = 0.5;
    int max_line_search = 40;
};

struct LbfgsResult {
    std::vector<double> x;
    std::vector<double> grad;
    double f = 0.0;
    double rms = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string message;
};

/// Root-mean-square of a gradient vector.
double rms_of(std::span<const double> g);

/// Limited-memory BFGS with a strong-Wolfe line search.
///
/// Near convergence, where the predicted decrease falls below floating-point
/// resolution, steps satisfying the approximate Wolfe conditions of Hager and
/// Zhang are also accepted. On failure the result carries the best point seen
/// and converged == false.
LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0, const LbfgsOptions& options = {});

}  // namespace qland
