#pragma once

// Power-conserving aggregation and output feedback of pH-DAEs, and the
// subsystem couplings that rebuild the poroelastic formulations.
//
// Subsystems expose two kinds of ports: coupling ports ("c_*") with identity
// input matrices, used only by the feedback, and external ports carrying the
// load mass matrices. After the feedback the coupling ports are dropped, so the
// coupled system has the same inputs as the direct formulation.

#include "poroph/formulations.hpp"
#include "poroph/phdae.hpp"

#include <optional>
#include <string>
#include <vector>

namespace poroph {

class FeedbackLaw {
public:
    explicit FeedbackLaw(Mat F);

    [[nodiscard]] const Mat& matrix() const { return F_; }
    [[nodiscard]] const Mat& sym() const { return sym_; }
    [[nodiscard]] const Mat& skew() const { return skew_; }

private:
    Mat F_, sym_, skew_;
};

/// Block-diagonal E, J, R, G. Labels keep their names with shifted offsets.
PhDae aggregate(const PhDae& a, const PhDae& b);

/// Closes v = F y + ṽ: J += G F_skew Gᵀ, R −= G F_sym Gᵀ. Throws
/// StructureError (carrying the most negative eigenvalue) when the new R is
/// not positive semidefinite.
PhDae feedback(const PhDae& sys, const FeedbackLaw& law, std::optional<double> tol = std::nullopt);

/// Keeps the named input blocks, in the given order.
PhDae select_inputs(const PhDae& sys, const std::vector<std::string>& names);

// Subsystems.
/// (w, u): E = diag(M_Y, K_A), J = [[0, −K_A], [K_A, 0]]; ports c_w, f.
PhDae hyperbolic_subsystem(const DiscreteOperators& ops);
/// p_i: E = M_M, R = K_i; ports c_p(i), g(i).
PhDae parabolic_subsystem(const DiscreteOperators& ops, int network);
/// u: E = 0, R = K_A (zero Hamiltonian); ports c_u, f.
PhDae elliptic_subsystem(const DiscreteOperators& ops);
/// (p, q): E = diag(0, K), J = [[0, K], [−K, 0]], R = diag(M_M, 0); ports c_p, g.
PhDae pressure_auxiliary_subsystem(const DiscreteOperators& ops);

PhDae couple_two_field(const DiscreteOperators& ops);
PhDae couple_alt_qs(const DiscreteOperators& ops);
PhDae couple_network(const DiscreteOperators& ops, const NetworkCoupling& coupling);

}  // namespace poroph
