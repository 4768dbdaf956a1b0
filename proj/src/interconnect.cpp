#include "poroph/interconnect.hpp"

#include "poroph/error.hpp"

#include <algorithm>
#include <tuple>

namespace poroph {

namespace {

using Index = Eigen::Index;

std::string indexed(const char* base, int i, int m) {
    return m == 1 ? std::string(base) : std::string(base) + std::to_string(i + 1);
}

const BlockLabel& input_block(const PhDae& sys, const std::string& name) {
    const auto it = std::find_if(sys.input_blocks().begin(), sys.input_blocks().end(),
                                 [&](const BlockLabel& b) { return b.name == name; });
    if (it == sys.input_blocks().end()) throw ConfigError("no input block named '" + name + "'");
    return *it;
}

}  // namespace

FeedbackLaw::FeedbackLaw(Mat F) : F_(std::move(F)) {
    numkit::require_square(F_, "feedback law");
    numkit::require_finite(F_, "feedback law");
    std::tie(sym_, skew_) = numkit::sym_skew_split(F_);
}

PhDae aggregate(const PhDae& a, const PhDae& b) {
    const Index n1 = a.state_dim();
    const Index m1 = a.input_dim();
    const auto diag2 = [](const Mat& x, const Mat& y) {
        Mat out = Mat::Zero(x.rows() + y.rows(), x.cols() + y.cols());
        out.topLeftCorner(x.rows(), x.cols()) = x;
        out.bottomRightCorner(y.rows(), y.cols()) = y;
        return out;
    };
    std::vector<BlockLabel> sb = a.state_blocks();
    for (auto l : b.state_blocks()) {
        l.offset += n1;
        sb.push_back(std::move(l));
    }
    std::vector<BlockLabel> ib = a.input_blocks();
    for (auto l : b.input_blocks()) {
        l.offset += m1;
        ib.push_back(std::move(l));
    }
    return PhDae::create(diag2(a.E(), b.E()), diag2(a.J(), b.J()), diag2(a.R(), b.R()), diag2(a.G(), b.G()),
                         std::move(sb), std::move(ib));
}

PhDae feedback(const PhDae& sys, const FeedbackLaw& law, std::optional<double> tol) {
    if (law.matrix().rows() != sys.input_dim()) {
        throw DimensionError("feedback: law dimension must equal the input dimension");
    }
    const Mat& G = sys.G();
    Mat J = sys.J() + G * law.skew() * G.transpose();
    Mat R = sys.R() - G * law.sym() * G.transpose();
    const auto rep = numkit::spectral_report_of_sym_part(R, tol.value_or(numkit::default_tol(R)));
    if (!rep.is_psd()) {
        throw StructureError("feedback: R - G F_sym G^T is not positive semidefinite", rep.min_eigenvalue);
    }
    return PhDae::create(sys.E(), std::move(J), std::move(R), G, sys.state_blocks(), sys.input_blocks(), tol);
}

PhDae select_inputs(const PhDae& sys, const std::vector<std::string>& names) {
    Index total = 0;
    for (const auto& n : names) total += input_block(sys, n).size;
    Mat G(sys.state_dim(), total);
    std::vector<BlockLabel> ib;
    Index off = 0;
    for (const auto& n : names) {
        const BlockLabel& b = input_block(sys, n);
        G.middleCols(off, b.size) = sys.G().middleCols(b.offset, b.size);
        ib.push_back({b.name, off, b.size});
        off += b.size;
    }
    return PhDae::create(sys.E(), sys.J(), sys.R(), std::move(G), sys.state_blocks(), std::move(ib));
}

PhDae hyperbolic_subsystem(const DiscreteOperators& ops) {
    const Index nu = ops.u_dim();
    Mat E = Mat::Zero(2 * nu, 2 * nu);
    E.topLeftCorner(nu, nu) = ops.M_Y;
    E.bottomRightCorner(nu, nu) = ops.K_A;
    Mat J = Mat::Zero(2 * nu, 2 * nu);
    J.topRightCorner(nu, nu) = -ops.K_A;
    J.bottomLeftCorner(nu, nu) = ops.K_A;
    Mat G = Mat::Zero(2 * nu, 2 * nu);
    G.topLeftCorner(nu, nu).setIdentity();
    G.topRightCorner(nu, nu) = ops.M_u;
    return PhDae::create(std::move(E), std::move(J), Mat::Zero(2 * nu, 2 * nu), std::move(G),
                         {{"w", 0, nu}, {"u", nu, nu}}, {{"c_w", 0, nu}, {"f", nu, nu}});
}

PhDae parabolic_subsystem(const DiscreteOperators& ops, int network) {
    const int m = ops.networks();
    if (network < 0 || network >= m) throw DimensionError("parabolic_subsystem: network index out of range");
    const Index np = ops.p_dim();
    Mat G(np, 2 * np);
    G.leftCols(np).setIdentity();
    G.rightCols(np) = ops.M_I;
    return PhDae::create(ops.M_M, Mat::Zero(np, np), ops.K_K[network], std::move(G),
                         {{indexed("p", network, m), 0, np}},
                         {{indexed("c_p", network, m), 0, np}, {indexed("g", network, m), np, np}});
}

PhDae elliptic_subsystem(const DiscreteOperators& ops) {
    const Index nu = ops.u_dim();
    Mat G(nu, 2 * nu);
    G.leftCols(nu).setIdentity();
    G.rightCols(nu) = ops.M_u;
    return PhDae::create(Mat::Zero(nu, nu), Mat::Zero(nu, nu), ops.K_A, std::move(G), {{"u", 0, nu}},
                         {{"c_u", 0, nu}, {"f", nu, nu}});
}

PhDae pressure_auxiliary_subsystem(const DiscreteOperators& ops) {
    if (ops.networks() != 1) throw ConfigError("pressure_auxiliary_subsystem: single network only");
    const Index np = ops.p_dim();
    const Mat& K = ops.K_K[0];
    Mat E = Mat::Zero(2 * np, 2 * np);
    E.bottomRightCorner(np, np) = K;
    Mat J = Mat::Zero(2 * np, 2 * np);
    J.topRightCorner(np, np) = K;
    J.bottomLeftCorner(np, np) = -K;
    Mat R = Mat::Zero(2 * np, 2 * np);
    R.topLeftCorner(np, np) = ops.M_M;
    Mat G = Mat::Zero(2 * np, 2 * np);
    G.topLeftCorner(np, np).setIdentity();
    G.bottomRightCorner(np, np) = ops.M_I;
    return PhDae::create(std::move(E), std::move(J), std::move(R), std::move(G), {{"p", 0, np}, {"q", np, np}},
                         {{"c_p", 0, np}, {"g", np, np}});
}

PhDae couple_two_field(const DiscreteOperators& ops) {
    if (ops.networks() != 1) throw ConfigError("couple_two_field: single network only");
    return couple_network(ops, NetworkCoupling::zero(1));
}

PhDae couple_alt_qs(const DiscreteOperators& ops) {
    if (ops.networks() != 1) throw ConfigError("couple_alt_qs: single network only");
    const PhDae agg = aggregate(elliptic_subsystem(ops), pressure_auxiliary_subsystem(ops));
    const BlockLabel& cu = input_block(agg, "c_u");
    const BlockLabel& cp = input_block(agg, "c_p");
    Mat F = Mat::Zero(agg.input_dim(), agg.input_dim());
    F.block(cu.offset, cp.offset, cu.size, cp.size) = ops.D[0].transpose();
    F.block(cp.offset, cu.offset, cp.size, cu.size) = -ops.D[0];
    PhDae out = select_inputs(feedback(agg, FeedbackLaw(std::move(F))), {"f", "g"});
    out.set_expected_index(1);
    return out;
}

PhDae couple_network(const DiscreteOperators& ops, const NetworkCoupling& coupling) {
    const int m = ops.networks();
    if (coupling.size() != m) throw DimensionError("couple_network: coupling size mismatch");
    PhDae agg = hyperbolic_subsystem(ops);
    for (int i = 0; i < m; ++i) agg = aggregate(agg, parabolic_subsystem(ops, i));

    const Index np = ops.p_dim();
    const BlockLabel& cw = input_block(agg, "c_w");
    std::vector<Index> cp(m);
    for (int i = 0; i < m; ++i) cp[i] = input_block(agg, indexed("c_p", i, m)).offset;

    // Exchange enters as −B ⊗ M_I so that the pressure rows read
    // M ṗ_i = −D_i w − K_i p_i − Σ_j β_ij M_I p_j.
    const Mat X = numkit::kron(coupling.matrix(), ops.M_I);
    Mat F = Mat::Zero(agg.input_dim(), agg.input_dim());
    for (int i = 0; i < m; ++i) {
        F.block(cw.offset, cp[i], cw.size, np) = ops.D[i].transpose();
        F.block(cp[i], cw.offset, np, cw.size) = -ops.D[i];
        for (int j = 0; j < m; ++j) F.block(cp[i], cp[j], np, np) = -X.block(i * np, j * np, np, np);
    }

    std::vector<std::string> keep{"f"};
    for (int i = 0; i < m; ++i) keep.push_back(indexed("g", i, m));
    PhDae out = select_inputs(feedback(agg, FeedbackLaw(std::move(F))), keep);
    const bool inertial = ops.M_Y.size() > 0 && numkit::max_abs(ops.M_Y) > 0.0;
    out.set_expected_index(inertial ? 0 : 2);
    return out;
}

}  // namespace poroph
