#include "qland/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qland/errors.hpp"

namespace qland {

namespace {

constexpr double kNormTolerance = 1e-12;

int qubits_for_dimension(std::size_t dim) {
    int n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    if ((std::size_t{1} << n) != dim) throw InputError("state dimension is not a power of two");
    return n;
}

void check_layers(const ParameterVector& theta) {
    if (theta.layers() < 1) throw InputError("parameter vector needs at least one layer");
}

void check_flat(std::span<const double> flat) {
    if (flat.empty() || flat.size() % 2 != 0) throw InputError("flat parameter vector must have even length 2L >= 2");
}

void apply_phase(std::vector<Complex>& psi, std::span<const double> diag, double gamma) {
    for (std::size_t z = 0; z < psi.size(); ++z) psi[z] *= std::polar(1.0, -gamma * diag[z]);
}

// exp(-i delta H_M) with H_M = -sum X_q, i.e. prod_q (cos delta + i sin delta X_q).
void apply_mixer(std::vector<Complex>& psi, int n, double delta) {
    const double c = std::cos(delta);
    const Complex is{0.0, std::sin(delta)};
    const std::size_t dim = psi.size();
    for (int q = 0; q < n; ++q) {
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t z = 0; z < dim; ++z) {
            if (z & bit) continue;
            const Complex a = psi[z];
            const Complex b = psi[z | bit];
            psi[z] = c * a + is * b;
            psi[z | bit] = is * a + c * b;
        }
    }
}

// <lhs| H_M |rhs> with H_M = -sum X_q.
Complex mixer_matrix_element(const std::vector<Complex>& lhs, const std::vector<Complex>& rhs, int n) {
    Complex acc{0.0, 0.0};
    const std::size_t dim = lhs.size();
    for (int q = 0; q < n; ++q) {
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t z = 0; z < dim; ++z) acc += std::conj(lhs[z]) * rhs[z ^ bit];
    }
    return -acc;
}

void fill_plus(std::vector<Complex>& psi) {
    const double amp = 1.0 / std::sqrt(static_cast<double>(psi.size()));
    std::fill(psi.begin(), psi.end(), Complex{amp, 0.0});
}

}  // namespace

CostDiagonal::CostDiagonal(const WeightedGraph& g) : n_(g.vertex_count()) {
    if (n_ > kMaxVertices) throw SizeError("simulation limited to " + std::to_string(kMaxVertices) + " qubits");
    const std::size_t dim = std::size_t{1} << n_;
    values_.assign(dim, 0.0);
    for (std::size_t z = 0; z < dim; ++z) {
        double v = 0.0;
        for (const auto& e : g.edges()) {
            const bool differ = ((z >> e.i) ^ (z >> e.j)) & 1U;
            v += differ ? -e.w : e.w;
        }
        values_[z] = 0.5 * v;
    }
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    min_ = *lo;
    max_ = *hi;
}

ParameterVector::ParameterVector(std::vector<double> gammas, std::vector<double> deltas)
    : gammas_(std::move(gammas)), deltas_(std::move(deltas)) {
    if (gammas_.size() != deltas_.size()) throw InputError("gamma and delta counts differ");
    if (gammas_.empty()) throw InputError("parameter vector needs at least one layer");
}

ParameterVector ParameterVector::zeros(int layers) {
    if (layers < 1) throw InputError("parameter vector needs at least one layer");
    return ParameterVector(std::vector<double>(layers, 0.0), std::vector<double>(layers, 0.0));
}

ParameterVector ParameterVector::from_flat(std::span<const double> flat) {
    check_flat(flat);
    const std::size_t L = flat.size() / 2;
    return ParameterVector({flat.begin(), flat.begin() + L}, {flat.begin() + L, flat.end()});
}

std::vector<double> ParameterVector::flat() const {
    std::vector<double> out(gammas_.begin(), gammas_.end());
    out.insert(out.end(), deltas_.begin(), deltas_.end());
    return out;
}

StateVector::StateVector(std::vector<Complex> amplitudes)
    : n_(qubits_for_dimension(amplitudes.size())), amps_(std::move(amplitudes)) {}

double StateVector::norm_squared() const noexcept {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
}

StateVector initial_state(int n) {
    if (n < 1) throw InputError("initial state needs at least one qubit");
    if (n > kMaxVertices) throw SizeError("simulation limited to " + std::to_string(kMaxVertices) + " qubits");
    std::vector<Complex> psi(std::size_t{1} << n);
    fill_plus(psi);
    return StateVector(std::move(psi));
}

StateVector evolve(const CostDiagonal& diag, const ParameterVector& theta) {
    check_layers(theta);
    Evaluator ev(diag);
    const auto flat = theta.flat();
    return StateVector(ev.state(flat));
}

double expectation(const CostDiagonal& diag, const ParameterVector& theta) {
    check_layers(theta);
    Evaluator ev(diag);
    const auto flat = theta.flat();
    return ev.energy(flat);
}

double solution_probability(const StateVector& psi, std::span<const std::uint64_t> states) {
    double p = 0.0;
    for (auto z : states) {
        if (z >= psi.dimension()) throw InputError("basis state index exceeds state dimension");
        p += std::norm(psi.amplitudes()[z]);
    }
    return p;
}

std::vector<double> gradient(const CostDiagonal& diag, const ParameterVector& theta) {
    check_layers(theta);
    Evaluator ev(diag);
    const auto flat = theta.flat();
    std::vector<double> grad(flat.size());
    ev.energy_and_gradient(flat, grad);
    return grad;
}

namespace {

// Gate-level circuit with an individual angle per gate. Edge gate e applies
// exp(-i a_e/2 Z_i Z_j) with a_e = w_e gamma; qubit gate q applies
// exp(-i b_q/2 X_q) with b_q = -2 delta.
struct GateAngles {
    std::vector<std::vector<double>> edge;   // [layer][edge]
    std::vector<std::vector<double>> qubit;  // [layer][qubit]
};

double gate_level_energy(const WeightedGraph& g, const CostDiagonal& diag, const GateAngles& angles) {
    const int n = g.vertex_count();
    std::vector<Complex> psi(std::size_t{1} << n);
    fill_plus(psi);
    for (std::size_t l = 0; l < angles.edge.size(); ++l) {
        const auto edges = g.edges();
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const double half = 0.5 * angles.edge[l][e];
            for (std::size_t z = 0; z < psi.size(); ++z) {
                const bool differ = ((z >> edges[e].i) ^ (z >> edges[e].j)) & 1U;
                psi[z] *= std::polar(1.0, differ ? half : -half);
            }
        }
        for (int q = 0; q < n; ++q) {
            const double half = 0.5 * angles.qubit[l][q];
            const double c = std::cos(half);
            const Complex mis{0.0, -std::sin(half)};
            const std::size_t bit = std::size_t{1} << q;
            for (std::size_t z = 0; z < psi.size(); ++z) {
                if (z & bit) continue;
                const Complex a = psi[z];
                const Complex b = psi[z | bit];
                psi[z] = c * a + mis * b;
                psi[z | bit] = mis * a + c * b;
            }
        }
    }
    double e = 0.0;
    for (std::size_t z = 0; z < psi.size(); ++z) e += diag[z] * std::norm(psi[z]);
    return e;
}

}  // namespace

std::vector<double> parameter_shift_gradient(const WeightedGraph& g, const ParameterVector& theta) {
    check_layers(theta);
    const CostDiagonal diag(g);
    const int L = theta.layers();
    const int n = g.vertex_count();
    const auto edges = g.edges();
    GateAngles base;
    for (int l = 0; l < L; ++l) {
        std::vector<double> ea;
        for (const auto& e : edges) ea.push_back(e.w * theta.gammas()[l]);
        base.edge.push_back(std::move(ea));
        base.qubit.emplace_back(n, -2.0 * theta.deltas()[l]);
    }
    constexpr double shift = std::numbers::pi / 2;
    auto two_point = [&](double& angle) {
        const double saved = angle;
        angle = saved + shift;
        const double plus = gate_level_energy(g, diag, base);
        angle = saved - shift;
        const double minus = gate_level_energy(g, diag, base);
        angle = saved;
        return 0.5 * (plus - minus);
    };
    std::vector<double> grad(2 * L, 0.0);
    for (int l = 0; l < L; ++l) {
        for (std::size_t e = 0; e < edges.size(); ++e) grad[l] += edges[e].w * two_point(base.edge[l][e]);
        for (int q = 0; q < n; ++q) grad[L + l] += -2.0 * two_point(base.qubit[l][q]);
    }
    return grad;
}

double overlap_distance(const StateVector& a, const StateVector& b) {
    if (a.dimension() != b.dimension()) throw InputError("state dimensions differ");
    Complex ip{0.0, 0.0};
    for (std::size_t z = 0; z < a.dimension(); ++z) ip += std::conj(a.amplitudes()[z]) * b.amplitudes()[z];
    return std::clamp(1.0 - std::abs(ip), 0.0, 1.0);
}

Evaluator::Evaluator(CostDiagonal diag)
    : diag_(std::move(diag)), psi_(diag_.dimension()), lambda_(diag_.dimension()), scratch_(diag_.dimension()) {}

void Evaluator::forward(std::span<const double> flat) {
    check_flat(flat);
    const std::size_t L = flat.size() / 2;
    fill_plus(psi_);
    for (std::size_t l = 0; l < L; ++l) {
        apply_phase(psi_, diag_.values(), flat[l]);
        apply_mixer(psi_, diag_.qubit_count(), flat[L + l]);
    }
}

const std::vector<Complex>& Evaluator::state(std::span<const double> flat) {
    forward(flat);
    return psi_;
}

double Evaluator::energy(std::span<const double> flat) {
    forward(flat);
    const auto c = diag_.values();
    double e = 0.0;
    for (std::size_t z = 0; z < psi_.size(); ++z) e += c[z] * std::norm(psi_[z]);
    return e;
}

double Evaluator::energy_and_gradient(std::span<const double> flat, std::span<double> grad) {
    if (grad.size() != flat.size()) throw InputError("gradient buffer size mismatch");
    forward(flat);
    const auto c = diag_.values();
    const int n = diag_.qubit_count();
    const std::size_t L = flat.size() / 2;
    double e = 0.0;
    for (std::size_t z = 0; z < psi_.size(); ++z) {
        e += c[z] * std::norm(psi_[z]);
        lambda_[z] = c[z] * psi_[z];
    }
    // Walk the circuit backwards; dE/dtheta = 2 Im <lambda| G |psi> for a
    // layer exp(-i theta G).
    for (std::size_t l = L; l-- > 0;) {
        grad[L + l] = 2.0 * mixer_matrix_element(lambda_, psi_, n).imag();
        apply_mixer(psi_, n, -flat[L + l]);
        apply_mixer(lambda_, n, -flat[L + l]);

        Complex acc{0.0, 0.0};
        for (std::size_t z = 0; z < psi_.size(); ++z) acc += std::conj(lambda_[z]) * (c[z] * psi_[z]);
        grad[l] = 2.0 * acc.imag();
        apply_phase(psi_, c, -flat[l]);
        apply_phase(lambda_, c, -flat[l]);
    }
    return e;
}

}  // namespace qland
