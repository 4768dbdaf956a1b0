#include "poroph/timeint.hpp"

#include "poroph/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <tuple>

namespace poroph {

namespace {

struct StepOperator {
    Mat lhs;
    Mat rhs;
    Eigen::FullPivLU<Mat> lu;
};

// lhs = E − θh A, rhs = E + (1−θ)h A
StepOperator factor_step(const Mat& E, const Mat& A, double h, double theta, double pivot_tol, long step) {
    StepOperator op;
    op.lhs = E - (theta * h) * A;
    op.rhs = E + ((1.0 - theta) * h) * A;
    if (op.lhs.rows() == 0) return op;
    op.lu.setThreshold(pivot_tol);
    op.lu.compute(op.lhs);
    if (!op.lu.isInvertible()) throw StepError("step matrix is singular", step);
    return op;
}

Vec solve_step(const StepOperator& op, const Vec& b) {
    if (b.size() == 0) return b;
    Vec x = op.lu.solve(b);
    // one round of iterative refinement keeps the energy identity at rounding level
    const Vec r = b - op.lhs * x;
    x += op.lu.solve(r);
    return x;
}

Vec input_at(const InputSignal& input, double t, Eigen::Index m) {
    if (!input) return Vec::Zero(m);
    Vec v = input(t);
    if (v.size() != m) throw DimensionError("input signal returned a vector of the wrong length");
    return v;
}

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw ConfigError("time grid is empty");
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) throw ConfigError("time grid must be strictly increasing");
    }
}

void check_initial(const PhDae& sys, const Vec& z0, const InputSignal& input, double t0,
                   const IntegratorOptions& opts) {
    if (z0.size() != sys.state_dim()) throw DimensionError("initial state has the wrong length");
    if (!opts.check_consistency) return;
    const double res = algebraic_residual(sys, z0, input_at(input, t0, sys.input_dim()));
    if (res > opts.consistency_tol) {
        throw InconsistentStateError("initial state violates the algebraic equations (relative residual " +
                                     std::to_string(res) + ")");
    }
}

Trajectory start(const PhDae& sys, const Vec& z0, double t0) {
    Trajectory traj;
    traj.times.push_back(t0);
    traj.states.push_back(z0);
    traj.hamiltonian.push_back(hamiltonian(sys, z0));
    return traj;
}

void record(Trajectory& traj, const Mat& E, const Mat& R, const Mat& G, const Vec& zq, const Vec& vq,
            const Vec& z1, double t1, double h) {
    traj.times.push_back(t1);
    traj.states.push_back(z1);
    traj.hamiltonian.push_back(0.5 * z1.dot(E * z1));
    traj.dissipated.push_back(h * zq.dot(R * zq));
    traj.supplied.push_back(h * (G.transpose() * zq).dot(vq));
}

// Midpoint stepping with a drift matrix supplied per step. `drift_at` returns
// (A_k, R_k) and reports whether it changed since the previous step.
template <typename DriftFn>
Trajectory run_midpoint(const PhDae& sys, const Vec& z0, const InputSignal& input, const std::vector<double>& grid,
                        const IntegratorOptions& opts, DriftFn&& drift_at) {
    check_grid(grid);
    check_initial(sys, z0, input, grid.front(), opts);
    Trajectory traj = start(sys, z0, grid.front());

    StepOperator op;
    double h_cached = std::numeric_limits<double>::quiet_NaN();
    Vec z = z0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double h = grid[k + 1] - grid[k];
        const auto [A, R, changed] = drift_at(z, static_cast<long>(k));
        if (changed || h != h_cached) {
            op = factor_step(sys.E(), *A, h, 0.5, opts.pivot_tol, static_cast<long>(k));
            h_cached = h;
        }
        const Vec v = input_at(input, grid[k] + 0.5 * h, sys.input_dim());
        const Vec b = op.rhs * z + h * (sys.G() * v);
        Vec z1 = solve_step(op, b);
        if (!z1.allFinite()) throw StepError("non-finite state", static_cast<long>(k));
        const Vec zm = 0.5 * (z + z1);
        record(traj, sys.E(), *R, sys.G(), zm, v, z1, grid[k + 1], h);
        z = std::move(z1);
    }
    return traj;
}

struct LinearDrift {
    Mat A;
    const Mat* R;
    bool first = true;
    std::tuple<const Mat*, const Mat*, bool> operator()(const Vec&, long) {
        const bool changed = first;
        first = false;
        return {&A, R, changed};
    }
};

}  // namespace

std::vector<double> Trajectory::power_balance_residuals() const {
    std::vector<double> out(steps());
    for (std::size_t k = 0; k < steps(); ++k) {
        const double dh = hamiltonian[k + 1] - hamiltonian[k];
        out[k] = std::abs(dh + dissipated[k] - supplied[k]) / std::max(1.0, std::abs(hamiltonian[k]));
    }
    return out;
}

double Trajectory::max_power_balance_residual() const {
    const auto r = power_balance_residuals();
    return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

bool Trajectory::hamiltonian_nonincreasing(double slack) const {
    for (std::size_t k = 0; k + 1 < hamiltonian.size(); ++k) {
        if (hamiltonian[k + 1] > hamiltonian[k] + slack * std::max(1.0, std::abs(hamiltonian[k]))) return false;
    }
    return true;
}

std::vector<double> uniform_grid(double t0, double t_end, int steps) {
    if (steps < 1) throw ConfigError("time grid needs at least one step");
    if (!(t_end > t0)) throw ConfigError("time grid needs t_end > t0");
    std::vector<double> grid(steps + 1);
    const double h = (t_end - t0) / steps;
    for (int k = 0; k <= steps; ++k) grid[k] = t0 + k * h;
    grid.back() = t_end;
    return grid;
}

double algebraic_residual(const PhDae& sys, const Vec& z, const Vec& v) {
    if (sys.state_dim() == 0) return 0.0;
    const Mat W = numkit::null_space(sys.E().transpose(), 1e-10);
    if (W.cols() == 0) return 0.0;
    const Vec az = sys.drift() * z;
    const Vec gv = sys.G() * v;
    const double scale = 1.0 + az.lpNorm<Eigen::Infinity>() + gv.lpNorm<Eigen::Infinity>();
    return (W.transpose() * (az + gv)).lpNorm<Eigen::Infinity>() / scale;
}

Trajectory integrate_midpoint(const PhDae& sys, const Vec& z0, const InputSignal& input,
                              const std::vector<double>& grid, const IntegratorOptions& opts) {
    LinearDrift drift{sys.drift(), &sys.R()};
    return run_midpoint(sys, z0, input, grid, opts, drift);
}

Trajectory integrate_euler(const PhDae& sys, const Vec& z0, const InputSignal& input,
                           const std::vector<double>& grid, const IntegratorOptions& opts) {
    check_grid(grid);
    check_initial(sys, z0, input, grid.front(), opts);
    Trajectory traj = start(sys, z0, grid.front());
    const Mat A = sys.drift();

    StepOperator op;
    double h_cached = std::numeric_limits<double>::quiet_NaN();
    Vec z = z0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double h = grid[k + 1] - grid[k];
        if (h != h_cached) {
            op = factor_step(sys.E(), A, h, 1.0, opts.pivot_tol, static_cast<long>(k));
            h_cached = h;
        }
        const Vec v = input_at(input, grid[k + 1], sys.input_dim());
        Vec z1 = solve_step(op, Vec(op.rhs * z + h * (sys.G() * v)));
        if (!z1.allFinite()) throw StepError("non-finite state", static_cast<long>(k));
        record(traj, sys.E(), sys.R(), sys.G(), z1, v, z1, grid[k + 1], h);
        z = std::move(z1);
    }
    return traj;
}

Trajectory integrate_nonlinear_kappa(const DiscreteOperators& ops, const fem::KappaLaw& law, const Vec& z0,
                                     const InputSignal& input, const std::vector<double>& grid,
                                     const IntegratorOptions& opts) {
    if (ops.networks() != 1) throw ConfigError("nonlinear permeability: single network only");
    const PhDae sys = build_full_first_order(ops);
    const BlockLabel* ub = sys.find_state_block("u");
    const BlockLabel* pb = sys.find_state_block("p");
    const double nu = ops.materials.front().nu;

    Mat R = sys.R();
    Mat A = sys.drift();
    const auto drift = [&](const Vec& z, long step) -> std::tuple<const Mat*, const Mat*, bool> {
        Mat kp;
        try {
            kp = fem::assemble_nonlinear_permeability(*ops.qspace, *ops.vspace, z.segment(ub->offset, ub->size),
                                                      law, nu);
        } catch (const BoundViolationError& e) {
            throw BoundViolationError(std::string(e.what()) + " at step " + std::to_string(step));
        }
        R.block(pb->offset, pb->offset, pb->size, pb->size) = kp;
        A = sys.J() - R;
        return {&A, &R, true};
    };
    return run_midpoint(sys, z0, input, grid, opts, drift);
}

void write_csv(std::ostream& os, const Trajectory& traj, const std::vector<BlockLabel>& labels) {
    const auto n = traj.states.empty() ? 0 : traj.states.front().size();
    std::vector<std::string> names(n);
    for (Eigen::Index i = 0; i < n; ++i) names[i] = "z" + std::to_string(i);
    for (const auto& b : labels) {
        for (Eigen::Index i = 0; i < b.size && b.offset + i < n; ++i) {
            names[b.offset + i] = b.name + "_" + std::to_string(i);
        }
    }
    os << "time,H,dissipated_cum,supplied_cum";
    for (const auto& s : names) os << ',' << s;
    os << '\n';

    os << std::setprecision(17);
    double diss = 0.0, supp = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (k > 0) {
            diss += traj.dissipated[k - 1];
            supp += traj.supplied[k - 1];
        }
        os << traj.times[k] << ',' << traj.hamiltonian[k] << ',' << diss << ',' << supp;
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << traj.states[k](i);
        os << '\n';
    }
}

void write_csv_file(const std::filesystem::path& path, const Trajectory& traj,
                    const std::vector<BlockLabel>& labels) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    write_csv(os, traj, labels);
    if (!os) throw IoError("write failed for " + path.string());
}

}  // namespace poroph
