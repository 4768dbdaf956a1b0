#pragma once

// Time integration of pH-DAEs with an energy ledger per step.

#include "poroph/fem.hpp"
#include "poroph/formulations.hpp"
#include "poroph/phdae.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

namespace poroph {

/// Input signal v(t); an empty function means v ≡ 0.
using InputSignal = std::function<Vec(double)>;

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<double> hamiltonian;
    /// Per step: h z_mᵀ R z_m (midpoint) or h z_{k+1}ᵀ R z_{k+1} (Euler).
    std::vector<double> dissipated;
    /// Per step: h y_mᵀ v_m (midpoint) or h y_{k+1}ᵀ v_{k+1} (Euler).
    std::vector<double> supplied;

    [[nodiscard]] std::size_t steps() const { return dissipated.size(); }
    /// |ΔH_k + dissipated_k − supplied_k| / max(1, |H_k|) per step.
    [[nodiscard]] std::vector<double> power_balance_residuals() const;
    [[nodiscard]] double max_power_balance_residual() const;
    /// H_{k+1} ≤ H_k + slack · max(1, |H_k|) at every step.
    [[nodiscard]] bool hamiltonian_nonincreasing(double slack = 1e-13) const;
};

struct IntegratorOptions {
    /// Relative tolerance on the algebraic rows of the dynamics at t_0.
    double consistency_tol = 1e-8;
    bool check_consistency = true;
    /// Pivot threshold of the step-matrix factorization.
    double pivot_tol = 1e-13;
};

std::vector<double> uniform_grid(double t0, double t_end, int steps);

/// (E − h/2 (J−R)) z_{k+1} = (E + h/2 (J−R)) z_k + h G v(t_{k+1/2}).
/// Throws InconsistentStateError for an inconsistent z_0 and StepError when
/// a step matrix is singular.
Trajectory integrate_midpoint(const PhDae& sys, const Vec& z0, const InputSignal& input,
                              const std::vector<double>& grid, const IntegratorOptions& opts = {});

/// (E − h (J−R)) z_{k+1} = E z_k + h G v(t_{k+1}).
Trajectory integrate_euler(const PhDae& sys, const Vec& z0, const InputSignal& input,
                           const std::vector<double>& grid, const IntegratorOptions& opts = {});

/// Midpoint steps on the full first-order system with the pressure block of R
/// reassembled from κ(∇·u_k) at the start of every step. Single network only.
Trajectory integrate_nonlinear_kappa(const DiscreteOperators& ops, const fem::KappaLaw& law, const Vec& z0,
                                     const InputSignal& input, const std::vector<double>& grid,
                                     const IntegratorOptions& opts = {});

/// Residual of the rows of the dynamics that E annihilates, relative to the
/// size of the right-hand side: ‖Wᵀ((J−R) z + G v)‖ / (1 + ‖(J−R) z‖ + ‖G v‖).
double algebraic_residual(const PhDae& sys, const Vec& z, const Vec& v);

/// Columns: time, H, dissipated_cum, supplied_cum, then one per state entry.
void write_csv(std::ostream& os, const Trajectory& traj, const std::vector<BlockLabel>& labels = {});
void write_csv_file(const std::filesystem::path& path, const Trajectory& traj,
                    const std::vector<BlockLabel>& labels = {});

}  // namespace poroph
