#pragma once

#include <span>
#include <vector>

#include "qland/simulator.hpp"

namespace qland {

inline constexpr double kHessianStep = 1e-5;

/// Row-major symmetric Hessian from central differences of the analytic gradient.
std::vector<double> numerical_hessian(Evaluator& ev, std::span<const double> x, double h = kHessianStep);

/// H v from central differences of the analytic gradient along v.
std::vector<double> hessian_vector_product(Evaluator& ev, std::span<const double> x, std::span<const double> v,
                                           double h = kHessianStep);

struct EigenPairs {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // unit-norm, matching values
};

EigenPairs symmetric_eigen(std::span<const double> matrix, std::size_t dim);

/// Number of eigenvalues below -tol.
int hessian_index(const EigenPairs& e, double tol);

}  // namespace qland
