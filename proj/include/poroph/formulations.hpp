#pragma once

// Discrete poroelastic operators and the port-Hamiltonian formulations built
// from them.
//
// State layouts (block labels in brackets):
//   full / quasi-static / network   [w, u, p1..pm]   E = diag(M_Y, K_A, M_M, ..)
//   square-root variant             [w, u_tilde, p]  E = diag(M_Y, I, M_M)
//   alternative quasi-static        [u, p, q]        E = diag(0, 0, K)
//   Schur-reduced parabolic         [p]              E = M_M + D K_A⁻¹ Dᵀ
//
// Inputs are nodal densities: G carries the unit-coefficient mass matrices,
// so a load density v_f enters the momentum row as M_u v_f.

#include "poroph/fem.hpp"
#include "poroph/numkit.hpp"
#include "poroph/phdae.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace poroph {

using Signal = std::function<Vec(double)>;

/// Exchange-rate matrix B with zero row sums.
class NetworkCoupling {
public:
    /// Throws ConfigError unless B is square and every row sums to zero.
    explicit NetworkCoupling(Mat B);

    /// Fill the diagonal from the off-diagonal rates: β_ii = −Σ_{j≠i} β_ij.
    static NetworkCoupling from_rates(const Mat& rates);
    static NetworkCoupling zero(int m);

    [[nodiscard]] const Mat& matrix() const { return B_; }
    [[nodiscard]] int size() const { return static_cast<int>(B_.rows()); }
    [[nodiscard]] Mat sym() const { return 0.5 * (B_ + B_.transpose()); }
    [[nodiscard]] Mat skew() const { return 0.5 * (B_ - B_.transpose()); }
    [[nodiscard]] bool is_symmetric() const { return B_ == B_.transpose(); }
    /// max_{i≠j} |β_ij|
    [[nodiscard]] double max_exchange_rate() const;

private:
    Mat B_;
};

struct DiscreteOperators {
    std::shared_ptr<const fem::Mesh2D> mesh;
    std::shared_ptr<const fem::FeSpace> vspace;
    std::shared_ptr<const fem::FeSpace> qspace;
    std::vector<fem::PoroMaterial> materials;  ///< one per pressure network

    Mat M_Y;               ///< ρ-weighted displacement mass
    Mat K_A;               ///< elasticity stiffness
    Mat M_M;               ///< 1/M-weighted pressure mass
    std::vector<Mat> K_K;  ///< κ_i/ν_i-weighted pressure stiffness per network
    std::vector<Mat> D;    ///< α_i-weighted divergence coupling per network
    Mat M_I;               ///< unit pressure mass (discrete embedding ℐ)
    Mat M_u;               ///< unit displacement mass (input weighting)

    [[nodiscard]] int networks() const { return static_cast<int>(K_K.size()); }
    [[nodiscard]] Eigen::Index u_dim() const { return K_A.rows(); }
    [[nodiscard]] Eigen::Index p_dim() const { return M_M.rows(); }

    /// D̄ = [D_1; ...; D_m]
    [[nodiscard]] Mat stacked_coupling() const;
    /// diag(M_M, ..., M_M)
    [[nodiscard]] Mat pressure_mass_block() const;
    /// diag(M_I, ..., M_I)
    [[nodiscard]] Mat pressure_input_block() const;
    /// diag(K_1, ..., K_m)
    [[nodiscard]] Mat pressure_stiffness_block() const;
    /// K̄_B = diag(K_i) + B ⊗ M_I
    [[nodiscard]] Mat exchange_stiffness(const NetworkCoupling& coupling) const;
    /// diag(K_i) + B_sym ⊗ M_I
    [[nodiscard]] Mat exchange_stiffness_sym(const NetworkCoupling& coupling) const;

    /// Copy with M_Y := 0.
    [[nodiscard]] DiscreteOperators quasi_static() const;
};

DiscreteOperators assemble_two_field(std::shared_ptr<const fem::Mesh2D> mesh, const fem::PoroMaterial& mat);

/// Materials must share ρ, μ, λ and the Biot modulus; α, κ, ν may differ.
DiscreteOperators assemble_network(std::shared_ptr<const fem::Mesh2D> mesh,
                                   std::span<const fem::PoroMaterial> mats,
                                   const NetworkCoupling& coupling);

PhDae build_full_first_order(const DiscreteOperators& ops);
PhDae build_sqrt_formulation(const DiscreteOperators& ops);
PhDae build_quasi_static(const DiscreteOperators& ops,
                         const std::optional<NetworkCoupling>& coupling = std::nullopt);
/// Rejects a non-symmetric coupling and a non-symmetric or indefinite K.
PhDae build_alternative_qs(const DiscreteOperators& ops,
                           const std::optional<NetworkCoupling>& coupling = std::nullopt);
/// Rejects couplings whose sym(K̄_B) is not positive definite.
PhDae build_network_ph(const DiscreteOperators& ops, const NetworkCoupling& coupling);

/// (u, p) -> (u, q) with K q = D u + M p, and its inverse.
Mat alt_qs_forward_map(const DiscreteOperators& ops,
                       const std::optional<NetworkCoupling>& coupling = std::nullopt);
Mat alt_qs_inverse_map(const DiscreteOperators& ops,
                       const std::optional<NetworkCoupling>& coupling = std::nullopt);
/// System matrix of the (u, q) form: [[−A − DᵀM⁻¹D, DᵀM⁻¹K], [KM⁻¹D, −KM⁻¹K]].
Mat alt_qs_reduced_operator(const DiscreteOperators& ops,
                            const std::optional<NetworkCoupling>& coupling = std::nullopt);

/// Elliptic elimination of u from the quasi-static system:
///   M̃ ṗ + K̄ p = g − D̄ K_A⁻¹ ḟ,   K_A u = D̄ᵀ p + f.
/// Loads here are assembled right-hand sides (f_h = M_u v_f, g_h = M_I v_g).
struct ParabolicReduction {
    Mat M_tilde;
    Mat K_bar;
    Mat D_bar;
    Mat K_A;

    [[nodiscard]] Vec reduced_load(const Vec& g_load, const Vec& fdot_load) const;
    [[nodiscard]] Vec recover_displacement(const Vec& p, const Vec& f_load) const;
};

ParabolicReduction schur_reduce_parabolic(const DiscreteOperators& ops,
                                          const std::optional<NetworkCoupling>& coupling = std::nullopt);

/// Reduced system as a pH-DAE: E = M̃, J = −skew(K̄), R = sym(K̄),
/// G = [diag(M_I), −D̄ K_A⁻¹ M_u] with inputs (g densities, ḟ density).
PhDae build_schur_parabolic(const DiscreteOperators& ops,
                            const std::optional<NetworkCoupling>& coupling = std::nullopt);

struct EllipticityReport {
    double min_sym_eigenvalue = 0.0;  ///< λ_min of sym(K̄_B)
    Definiteness verdict = Definiteness::indefinite;
    double ellipticity_constant = 0.0;  ///< c: min_i λ_min(K_i, H¹ Gram)
    double embedding_constant_sq = 0.0;  ///< C²: λ_max(M_I, H¹ Gram)
    double rate_bound = 0.0;             ///< c / (2 m C²)
    double max_exchange_rate = 0.0;
    bool sufficient_bound_holds = false;

    [[nodiscard]] bool definite() const { return verdict == Definiteness::positive_definite; }
};

EllipticityReport check_network_ellipticity(const DiscreteOperators& ops, const NetworkCoupling& coupling,
                                            std::optional<double> tol = std::nullopt);

}  // namespace poroph
