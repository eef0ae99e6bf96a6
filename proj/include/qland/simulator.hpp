#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qland/graph.hpp"

namespace qland {

using Complex = std::complex<double>;

/// Diagonal of the cost Hamiltonian H_C = 1/2 sum_ij w_ij Z_i Z_j.
///
/// values[z] = 1/2 sum_ij w_ij s_i s_j with s_k = +1 for bit k of z clear
/// and -1 when set.
class CostDiagonal {
public:
    explicit CostDiagonal(const WeightedGraph& g);

    int qubit_count() const noexcept { return n_; }
    std::size_t dimension() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::uint64_t z) const noexcept { return values_[z]; }
    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }

private:
    int n_;
    std::vector<double> values_;
    double min_;
    double max_;
};

/// Ansatz angles. Flat layout is (gamma_1..gamma_L, delta_1..delta_L).
class ParameterVector {
public:
    ParameterVector() = default;
    ParameterVector(std::vector<double> gammas, std::vector<double> deltas);
    static ParameterVector zeros(int layers);
    static ParameterVector from_flat(std::span<const double> flat);

    int layers() const noexcept { return static_cast<int>(gammas_.size()); }
    std::span<const double> gammas() const noexcept { return gammas_; }
    std::span<const double> deltas() const noexcept { return deltas_; }
    std::vector<double> flat() const;

    friend bool operator==(const ParameterVector&, const ParameterVector&) = default;

private:
    std::vector<double> gammas_;
    std::vector<double> deltas_;
};

class StateVector {
public:
    StateVector() = default;
    explicit StateVector(std::vector<Complex> amplitudes);

    int qubit_count() const noexcept { return n_; }
    std::size_t dimension() const noexcept { return amps_.size(); }
    std::span<const Complex> amplitudes() const noexcept { return amps_; }
    std::span<Complex> amplitudes() noexcept { return amps_; }
    double norm_squared() const noexcept;

private:
    int n_ = 0;
    std::vector<Complex> amps_;
};

/// |+>^n.
StateVector initial_state(int n);

/// Applies exp(-i gamma_l H_C) then exp(-i delta_l H_M), H_M = -sum X_i, for l = 1..L.
StateVector evolve(const CostDiagonal& diag, const ParameterVector& theta);

double expectation(const CostDiagonal& diag, const ParameterVector& theta);

/// Total probability over a set of basis states.
double solution_probability(const StateVector& psi, std::span<const std::uint64_t> states);

/// Exact gradient of the expectation in flat layout, via adjoint differentiation.
std::vector<double> gradient(const CostDiagonal& diag, const ParameterVector& theta);

/// Exact gradient by per-gate two-point parameter shifts (slow reference).
std::vector<double> parameter_shift_gradient(const WeightedGraph& g, const ParameterVector& theta);

/// 1 - |<a|b>|.
double overlap_distance(const StateVector& a, const StateVector& b);

/// Reusable evaluator with scratch buffers. Not thread-safe; use one per thread.
class Evaluator {
public:
    explicit Evaluator(CostDiagonal diag);

    const CostDiagonal& diagonal() const noexcept { return diag_; }

    double energy(std::span<const double> flat);
    /// Fills grad (size 2L) and returns the energy.
    double energy_and_gradient(std::span<const double> flat, std::span<double> grad);
    const std::vector<Complex>& state(std::span<const double> flat);

private:
    void forward(std::span<const double> flat);

    CostDiagonal diag_;
    std::vector<Complex> psi_;
    std::vector<Complex> lambda_;
    std::vector<Complex> scratch_;
};

}  // namespace qland
