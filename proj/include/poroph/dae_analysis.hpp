#pragma once

// Differentiation index of linear pencils, consistent initial values for the
// quasi-static formulation and output-feedback regularization.

#include "poroph/formulations.hpp"
#include "poroph/numkit.hpp"
#include "poroph/phdae.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

namespace poroph {

enum class IndexClass { zero, one, at_least_2 };

std::string_view to_string(IndexClass c);

struct IndexReport {
    IndexClass index = IndexClass::zero;
    Eigen::Index e_rank = 0;
    bool pencil_regular = true;
    /// σ_min(WᵀAV) relative to σ_max(A); NaN when E is nonsingular.
    double kernel_test_value = 0.0;
    /// Smallest relative σ_min(λE − A) over the sampled λ.
    double pencil_sample_value = 0.0;

    /// 0, 1 or 2 (2 standing for "at least 2").
    [[nodiscard]] int as_int() const { return static_cast<int>(index); }
};

/// Classifies the pencil (E, A) at relative tolerance `tol`. Regularity is
/// sampled at three pseudo-random λ drawn from `seed`; throws SingularError
/// when every sample is singular.
IndexReport classify_index(const Mat& E, const Mat& A, double tol = 1e-10, std::uint64_t seed = 20240611);
IndexReport classify_index(const PhDae& sys, double tol = 1e-10, std::uint64_t seed = 20240611);

/// Quasi-static system in the original variables (u, p), without w:
///   0 = −K_A u + Dᵀ p + f,   D u̇ + M ṗ = −K p + g.
/// Returns the pencil (E, A).
std::pair<Mat, Mat> quasi_static_two_variable_pencil(const DiscreteOperators& ops);

struct ConsistentState {
    Vec w0;
    Vec u0;
    double residual_u = 0.0;  ///< ‖K_A u0 − D̄ᵀp0 − f0‖ / scale
    double residual_w = 0.0;  ///< hidden-constraint residual / scale
};

/// Consistent (w0, u0) for given p0 and assembled loads f0, ḟ0, g0:
///   K_A u0 = D̄ᵀ p0 + f0
///   (K_A + D̄ᵀM̄⁻¹D̄) w0 = −D̄ᵀM̄⁻¹K̄ p0 + ḟ0 + D̄ᵀM̄⁻¹ g0
/// K̄ is K̄_B for a network (B = 0 when omitted).
ConsistentState consistent_initialization(const DiscreteOperators& ops, const Vec& p0, const Vec& f0,
                                          const Vec& fdot0, const Vec& g0,
                                          const std::optional<NetworkCoupling>& coupling = std::nullopt);

/// ‖(K_A + D̄ᵀM̄⁻¹D̄) w + D̄ᵀM̄⁻¹K̄ p − ḟ − D̄ᵀM̄⁻¹ g‖₂
double hidden_constraint_residual(const DiscreteOperators& ops, const Vec& w, const Vec& p, const Vec& fdot,
                                  const Vec& g, const std::optional<NetworkCoupling>& coupling = std::nullopt);

/// ‖K_A u − D̄ᵀ p − f‖₂
double explicit_constraint_residual(const DiscreteOperators& ops, const Vec& u, const Vec& p, const Vec& f);

/// Closes the loop v_f = F11 y_f + ṽ_f on the "f" input port: the skew part
/// of G_f F11 G_fᵀ goes into J and the symmetric part, negated, into R. The
/// result is not validated; a positive symmetric part of F11 yields an
/// indefinite R on purpose.
PhDae regularize_output_feedback(const PhDae& sys, const Mat& F11);

}  // namespace poroph
