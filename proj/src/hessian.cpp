#include "qland/hessian.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "qland/errors.hpp"

namespace qland {

std::vector<double> numerical_hessian(Evaluator& ev, std::span<const double> x, double h) {
    const std::size_t d = x.size();
    std::vector<double> hess(d * d);
    std::vector<double> xp(x.begin(), x.end());
    std::vector<double> gp(d), gm(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double saved = xp[i];
        xp[i] = saved + h;
        ev.energy_and_gradient(xp, gp);
        xp[i] = saved - h;
        ev.energy_and_gradient(xp, gm);
        xp[i] = saved;
        for (std::size_t j = 0; j < d; ++j) hess[j * d + i] = (gp[j] - gm[j]) / (2.0 * h);
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const double avg = 0.5 * (hess[i * d + j] + hess[j * d + i]);
            hess[i * d + j] = hess[j * d + i] = avg;
        }
    }
    return hess;
}

std::vector<double> hessian_vector_product(Evaluator& ev, std::span<const double> x, std::span<const double> v,
                                           double h) {
    const std::size_t d = x.size();
    std::vector<double> xp(d), xm(d), gp(d), gm(d), out(d);
    for (std::size_t i = 0; i < d; ++i) {
        xp[i] = x[i] + h * v[i];
        xm[i] = x[i] - h * v[i];
    }
    ev.energy_and_gradient(xp, gp);
    ev.energy_and_gradient(xm, gm);
    for (std::size_t i = 0; i < d; ++i) out[i] = (gp[i] - gm[i]) / (2.0 * h);
    return out;
}

EigenPairs symmetric_eigen(std::span<const double> matrix, std::size_t dim) {
    if (matrix.size() != dim * dim) throw InputError("matrix size mismatch");
    Eigen::MatrixXd m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) m(i, j) = matrix[i * dim + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    EigenPairs out;
    for (std::size_t k = 0; k < dim; ++k) {
        out.values.push_back(solver.eigenvalues()(k));
        std::vector<double> v(dim);
        for (std::size_t i = 0; i < dim; ++i) v[i] = solver.eigenvectors()(i, k);
        out.vectors.push_back(std::move(v));
    }
    return out;
}

int hessian_index(const EigenPairs& e, double tol) {
    int count = 0;
    for (double v : e.values)
        if (v < -tol) ++count;
    return count;
}

}  // namespace qland
