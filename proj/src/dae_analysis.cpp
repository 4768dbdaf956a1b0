#include "poroph/dae_analysis.hpp"

#include "poroph/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace poroph {

std::string_view to_string(IndexClass c) {
    switch (c) {
    case IndexClass::zero: return "0";
    case IndexClass::one: return "1";
    case IndexClass::at_least_2: return "at_least_2";
    }
    return "unknown";
}

namespace {

double relative_min_singular(const Mat& m) {
    const Vec s = numkit::singular_values(m);
    if (s.size() == 0) return 1.0;
    if (s(0) == 0.0) return 0.0;
    return s(s.size() - 1) / s(0);
}

double norm_scale(const Vec& a, const Vec& b) {
    return 1.0 + a.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
}

struct Blocks {
    Mat D;     // D̄
    Mat M;     // M̄
    Mat K;     // K̄_B
    Mat S;     // K_A + D̄ᵀM̄⁻¹D̄
    Mat MinvD; // M̄⁻¹D̄
};

Blocks qs_blocks(const DiscreteOperators& ops, const std::optional<NetworkCoupling>& coupling) {
    Blocks b;
    b.D = ops.stacked_coupling();
    b.M = ops.pressure_mass_block();
    b.K = ops.exchange_stiffness(coupling ? *coupling : NetworkCoupling::zero(ops.networks()));
    b.MinvD = numkit::solve(b.M, b.D);
    b.S = ops.K_A + b.D.transpose() * b.MinvD;
    return b;
}

}  // namespace

IndexReport classify_index(const Mat& E, const Mat& A, double tol, std::uint64_t seed) {
    numkit::require_square(E, "classify_index E");
    numkit::require_square(A, "classify_index A");
    if (E.rows() != A.rows()) throw DimensionError("classify_index: E and A differ in size");

    IndexReport rep;
    const auto n = E.rows();
    if (n == 0) {
        rep.kernel_test_value = std::numeric_limits<double>::quiet_NaN();
        rep.pencil_sample_value = 1.0;
        return rep;
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.1, 10.0);
    double best = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double lambda = dist(rng);
        best = std::max(best, relative_min_singular(lambda * E - A));
    }
    rep.pencil_sample_value = best;
    rep.pencil_regular = best > tol;
    if (!rep.pencil_regular) {
        throw SingularError("classify_index: the pencil is singular at every sampled lambda");
    }

    const Vec se = numkit::singular_values(E);
    rep.e_rank = numkit::numerical_rank(E, tol);
    if (se(0) > 0.0 && se(n - 1) > tol * se(0)) {
        rep.index = IndexClass::zero;
        rep.kernel_test_value = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }

    const Mat V = numkit::null_space(E, tol);
    const Mat W = numkit::null_space(E.transpose(), tol);
    const Mat reduced = W.transpose() * A * V;
    const Vec sa = numkit::singular_values(A);
    const double scale = sa.size() ? sa(0) : 0.0;
    const Vec sr = numkit::singular_values(reduced);
    const double smin = (reduced.rows() == reduced.cols() && sr.size()) ? sr(sr.size() - 1) : 0.0;
    rep.kernel_test_value = scale > 0.0 ? smin / scale : 0.0;
    rep.index = (scale > 0.0 && reduced.rows() == reduced.cols() && smin > tol * scale) ? IndexClass::one
                                                                                      : IndexClass::at_least_2;
    return rep;
}

IndexReport classify_index(const PhDae& sys, double tol, std::uint64_t seed) {
    return classify_index(sys.E(), sys.drift(), tol, seed);
}

std::pair<Mat, Mat> quasi_static_two_variable_pencil(const DiscreteOperators& ops) {
    if (ops.networks() != 1) throw ConfigError("two-variable pencil: single network only");
    const auto nu = ops.u_dim();
    const auto np = ops.p_dim();
    Mat E = Mat::Zero(nu + np, nu + np);
    E.block(nu, 0, np, nu) = ops.D[0];
    E.block(nu, nu, np, np) = ops.M_M;
    Mat A = Mat::Zero(nu + np, nu + np);
    A.block(0, 0, nu, nu) = -ops.K_A;
    A.block(0, nu, nu, np) = ops.D[0].transpose();
    A.block(nu, nu, np, np) = -ops.K_K[0];
    return {std::move(E), std::move(A)};
}

ConsistentState consistent_initialization(const DiscreteOperators& ops, const Vec& p0, const Vec& f0,
                                          const Vec& fdot0, const Vec& g0,
                                          const std::optional<NetworkCoupling>& coupling) {
    const auto nu = ops.u_dim();
    const auto mp = ops.networks() * ops.p_dim();
    if (p0.size() != mp || g0.size() != mp || f0.size() != nu || fdot0.size() != nu) {
        throw DimensionError("consistent_initialization: vector length mismatch");
    }
    const Blocks b = qs_blocks(ops, coupling);

    ConsistentState out;
    const Vec rhs_u = b.D.transpose() * p0 + f0;
    out.u0 = numkit::solve(ops.K_A, rhs_u);
    const Vec rhs_w = -b.D.transpose() * numkit::solve(b.M, Vec(b.K * p0)) + fdot0 +
                      b.D.transpose() * numkit::solve(b.M, g0);
    out.w0 = numkit::solve(b.S, rhs_w);

    out.residual_u = (ops.K_A * out.u0 - rhs_u).lpNorm<Eigen::Infinity>() / norm_scale(rhs_u, ops.K_A * out.u0);
    out.residual_w = (b.S * out.w0 - rhs_w).lpNorm<Eigen::Infinity>() / norm_scale(rhs_w, b.S * out.w0);
    return out;
}

double hidden_constraint_residual(const DiscreteOperators& ops, const Vec& w, const Vec& p, const Vec& fdot,
                                  const Vec& g, const std::optional<NetworkCoupling>& coupling) {
    const auto nu = ops.u_dim();
    const auto mp = ops.networks() * ops.p_dim();
    if (w.size() != nu || fdot.size() != nu || p.size() != mp || g.size() != mp) {
        throw DimensionError("hidden_constraint_residual: vector length mismatch");
    }
    const Blocks b = qs_blocks(ops, coupling);
    const Vec r = b.S * w + b.D.transpose() * numkit::solve(b.M, Vec(b.K * p)) - fdot -
                  b.D.transpose() * numkit::solve(b.M, g);
    return r.norm();
}

double explicit_constraint_residual(const DiscreteOperators& ops, const Vec& u, const Vec& p, const Vec& f) {
    if (u.size() != ops.u_dim() || f.size() != ops.u_dim() || p.size() != ops.networks() * ops.p_dim()) {
        throw DimensionError("explicit_constraint_residual: vector length mismatch");
    }
    return (ops.K_A * u - ops.stacked_coupling().transpose() * p - f).norm();
}

PhDae regularize_output_feedback(const PhDae& sys, const Mat& F11) {
    const auto it = std::find_if(sys.input_blocks().begin(), sys.input_blocks().end(),
                                 [](const BlockLabel& b) { return b.name == "f"; });
    if (it == sys.input_blocks().end()) throw ConfigError("regularize_output_feedback: system has no 'f' port");
    if (F11.rows() != it->size || F11.cols() != it->size) {
        throw DimensionError("regularize_output_feedback: F11 must match the 'f' port dimension");
    }
    const Mat Gf = sys.G().middleCols(it->offset, it->size);
    const auto [fsym, fskew] = numkit::sym_skew_split(F11);
    Mat J = sys.J() + Gf * fskew * Gf.transpose();
    Mat R = sys.R() - Gf * fsym * Gf.transpose();
    J = 0.5 * (J - J.transpose());
    R = 0.5 * (R + R.transpose());
    PhDae out = PhDae::unchecked(sys.E(), std::move(J), std::move(R), sys.G(), sys.state_blocks(),
                                 sys.input_blocks());
    const bool nonsingular = F11.size() == 0 || numkit::numerical_rank(F11, 1e-12) == F11.rows();
    out.set_expected_index(nonsingular ? std::optional<int>(1) : sys.expected_index());
    return out;
}

}  // namespace poroph
