#pragma once

// Reference implementations used to check the library: a dense-matrix QAOA
// simulator, brute-force Max-Cut and the F metric written out directly.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qland/graph.hpp"
#include "qland/minima.hpp"

namespace oracle {

using cplx = std::complex<double>;

inline double cost(const qland::WeightedGraph& g, std::uint64_t z) {
    double c = 0;
    for (const auto& e : g.edges()) {
        const int si = (z >> e.i) & 1 ? -1 : 1;
        const int sj = (z >> e.j) & 1 ? -1 : 1;
        c += e.w * si * sj;
    }
    return 0.5 * c;
}

struct MaxCut {
    double value = 0;
    std::vector<std::uint64_t> states;
};

inline MaxCut maxcut(const qland::WeightedGraph& g) {
    MaxCut out{-1, {}};
    const std::uint64_t dim = std::uint64_t{1} << g.vertex_count();
    for (std::uint64_t z = 0; z < dim; ++z) {
        double cut = 0;
        for (const auto& e : g.edges()) {
            if (((z >> e.i) ^ (z >> e.j)) & 1) cut += e.w;
        }
        if (cut > out.value + 1e-9) {
            out.value = cut;
            out.states.clear();
        }
        if (std::fabs(cut - out.value) <= 1e-9) out.states.push_back(z);
    }
    return out;
}

/// Dense simulator: the mixer exp(i delta sum X) is built from an
/// eigendecomposition of the full 2^n x 2^n transverse-field matrix.
class Simulator {
public:
    explicit Simulator(const qland::WeightedGraph& g) : n_(g.vertex_count()), dim_(std::size_t{1} << n_) {
        diag_.resize(dim_);
        for (std::size_t z = 0; z < dim_; ++z) diag_[z] = cost(g, z);
        Eigen::MatrixXd hm = Eigen::MatrixXd::Zero(dim_, dim_);
        for (std::size_t z = 0; z < dim_; ++z) {
            for (int k = 0; k < n_; ++k) hm(z ^ (std::size_t{1} << k), z) -= 1.0;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hm);
        vecs_ = es.eigenvectors();
        vals_ = es.eigenvalues();
    }

    /// theta in flat layout (gammas then deltas).
    Eigen::VectorXcd state(const std::vector<double>& theta) const {
        const int L = static_cast<int>(theta.size() / 2);
        Eigen::VectorXcd psi = Eigen::VectorXcd::Constant(dim_, 1.0 / std::sqrt(double(dim_)));
        for (int l = 0; l < L; ++l) {
            for (std::size_t z = 0; z < dim_; ++z) psi[z] *= std::exp(cplx(0, -theta[l] * diag_[z]));
            Eigen::VectorXcd c = vecs_.transpose().cast<cplx>() * psi;
            for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::exp(cplx(0, -theta[L + l] * vals_[k]));
            psi = vecs_.cast<cplx>() * c;
        }
        return psi;
    }

    double energy(const std::vector<double>& theta) const {
        const auto psi = state(theta);
        double e = 0;
        for (std::size_t z = 0; z < dim_; ++z) e += std::norm(psi[z]) * diag_[z];
        return e;
    }

    double probability(const std::vector<double>& theta, const std::vector<std::uint64_t>& states) const {
        const auto psi = state(theta);
        double p = 0;
        for (auto z : states) p += std::norm(psi[z]);
        return p;
    }

    std::vector<double> fd_gradient(const std::vector<double>& theta, double h = 1e-5) const {
        std::vector<double> g(theta.size());
        for (std::size_t k = 0; k < theta.size(); ++k) {
            auto p = theta, m = theta;
            p[k] += h;
            m[k] -= h;
            g[k] = (energy(p) - energy(m)) / (2 * h);
        }
        return g;
    }

    double min_cost() const { return *std::min_element(diag_.begin(), diag_.end()); }
    double max_cost() const { return *std::max_element(diag_.begin(), diag_.end()); }

private:
    int n_;
    std::size_t dim_;
    std::vector<double> diag_;
    Eigen::MatrixXd vecs_;
    Eigen::VectorXd vals_;
};

inline double f_metric(const std::vector<double>& energies, const std::vector<double>& p) {
    double e_min = energies[0];
    for (double e : energies) e_min = std::min(e_min, e);
    double s = 0;
    for (std::size_t m = 0; m < energies.size(); ++m) s += std::fabs(e_min - energies[m]) * (1 - p[m]);
    return s / (energies.size() * std::fabs(e_min));
}

}  // namespace oracle
