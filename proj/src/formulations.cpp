#include "poroph/formulations.hpp"

#include "poroph/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace poroph {

namespace {

using Index = Eigen::Index;

std::string pressure_label(const char* base, int i, int m) {
    return m == 1 ? std::string(base) : std::string(base) + std::to_string(i + 1);
}

void require_single_network(const DiscreteOperators& ops, const char* what) {
    if (ops.networks() != 1) throw ConfigError(std::string(what) + ": requires a single pressure network");
}

void require_matching(const DiscreteOperators& ops, const NetworkCoupling& coupling, const char* what) {
    if (coupling.size() != ops.networks()) {
        throw DimensionError(std::string(what) + ": coupling size does not match the number of networks");
    }
}

NetworkCoupling coupling_or_zero(const DiscreteOperators& ops, const std::optional<NetworkCoupling>& coupling) {
    if (coupling) {
        require_matching(ops, *coupling, "formulation");
        return *coupling;
    }
    return NetworkCoupling::zero(ops.networks());
}

// kron(B, M_I) and its symmetric / skew parts, computed once so that the direct
// builders and the feedback construction see identical arithmetic.
struct ExchangeParts {
    Mat sym;
    Mat skew;
};

ExchangeParts exchange_parts(const DiscreteOperators& ops, const NetworkCoupling& coupling) {
    const Mat x = numkit::kron(coupling.matrix(), ops.M_I);
    return {0.5 * (x + x.transpose()), 0.5 * (x - x.transpose())};
}

// Shared layout of the full first-order and network forms: state (w, u, p1..pm),
// inputs (f, g1..gm).
PhDae build_wup(const DiscreteOperators& ops, const NetworkCoupling& coupling) {
    const int m = ops.networks();
    const Index nu = ops.u_dim();
    const Index np = ops.p_dim();
    const Index mp = m * np;
    const Index n = 2 * nu + mp;

    const Mat Dbar = ops.stacked_coupling();
    const ExchangeParts x = exchange_parts(ops, coupling);

    Mat E = Mat::Zero(n, n);
    E.block(0, 0, nu, nu) = ops.M_Y;
    E.block(nu, nu, nu, nu) = ops.K_A;
    E.block(2 * nu, 2 * nu, mp, mp) = ops.pressure_mass_block();

    Mat J = Mat::Zero(n, n);
    J.block(0, nu, nu, nu) = -ops.K_A;
    J.block(nu, 0, nu, nu) = ops.K_A;
    J.block(0, 2 * nu, nu, mp) = Dbar.transpose();
    J.block(2 * nu, 0, mp, nu) = -Dbar;
    J.block(2 * nu, 2 * nu, mp, mp) = -x.skew;

    Mat R = Mat::Zero(n, n);
    R.block(2 * nu, 2 * nu, mp, mp) = ops.pressure_stiffness_block() + x.sym;

    Mat G = Mat::Zero(n, nu + mp);
    G.block(0, 0, nu, nu) = ops.M_u;
    G.block(2 * nu, nu, mp, mp) = ops.pressure_input_block();

    std::vector<BlockLabel> sb{{"w", 0, nu}, {"u", nu, nu}};
    std::vector<BlockLabel> ib{{"f", 0, nu}};
    for (int i = 0; i < m; ++i) {
        sb.push_back({pressure_label("p", i, m), 2 * nu + i * np, np});
        ib.push_back({pressure_label("g", i, m), nu + i * np, np});
    }
    PhDae sys = PhDae::create(std::move(E), std::move(J), std::move(R), std::move(G), std::move(sb), std::move(ib));

    const bool inertial = ops.M_Y.size() > 0 && numkit::max_abs(ops.M_Y) > 0.0;
    sys.set_expected_index(inertial ? 0 : 2);
    return sys;
}

struct AltQsBlocks {
    Mat D;  // D̄
    Mat M;  // M̄
    Mat K;  // K̄_B (symmetric)
};

AltQsBlocks alt_qs_blocks(const DiscreteOperators& ops, const std::optional<NetworkCoupling>& coupling) {
    const NetworkCoupling b = coupling_or_zero(ops, coupling);
    if (!b.is_symmetric()) {
        throw ConfigError("alternative quasi-static form: the exchange matrix must be symmetric");
    }
    AltQsBlocks out{ops.stacked_coupling(), ops.pressure_mass_block(), ops.pressure_stiffness_block()};
    if (ops.networks() > 1) out.K += exchange_parts(ops, b).sym;
    if (!numkit::is_symmetric(out.K, numkit::default_tol(out.K))) {
        throw StructureError("alternative quasi-static form: K is not symmetric", numkit::asymmetry(out.K));
    }
    return out;
}

}  // namespace

// --- NetworkCoupling ---

NetworkCoupling::NetworkCoupling(Mat B) : B_(std::move(B)) {
    if (B_.rows() != B_.cols() || B_.rows() < 1) throw ConfigError("exchange matrix must be square and non-empty");
    if (!B_.allFinite()) throw ConfigError("exchange matrix must be finite");
    const double tol = 1e-13 * std::max(1.0, numkit::max_abs(B_));
    for (Index i = 0; i < B_.rows(); ++i) {
        if (std::abs(B_.row(i).sum()) > tol) {
            throw ConfigError("exchange matrix row " + std::to_string(i) + " does not sum to zero");
        }
    }
}

NetworkCoupling NetworkCoupling::from_rates(const Mat& rates) {
    if (rates.rows() != rates.cols()) throw ConfigError("exchange rates must be square");
    Mat b = rates;
    for (Index i = 0; i < b.rows(); ++i) {
        double s = 0.0;
        for (Index j = 0; j < b.cols(); ++j) {
            if (j != i) s += b(i, j);
        }
        b(i, i) = -s;
    }
    return NetworkCoupling(std::move(b));
}

NetworkCoupling NetworkCoupling::zero(int m) { return NetworkCoupling(Mat::Zero(m, m)); }

double NetworkCoupling::max_exchange_rate() const {
    double r = 0.0;
    for (Index i = 0; i < B_.rows(); ++i) {
        for (Index j = 0; j < B_.cols(); ++j) {
            if (i != j) r = std::max(r, std::abs(B_(i, j)));
        }
    }
    return r;
}

// --- DiscreteOperators ---

Mat DiscreteOperators::stacked_coupling() const {
    Mat d(networks() * p_dim(), u_dim());
    for (int i = 0; i < networks(); ++i) d.middleRows(i * p_dim(), p_dim()) = D[i];
    return d;
}

Mat DiscreteOperators::pressure_mass_block() const {
    return numkit::block_diag(std::vector<Mat>(networks(), M_M));
}

Mat DiscreteOperators::pressure_input_block() const {
    return numkit::block_diag(std::vector<Mat>(networks(), M_I));
}

Mat DiscreteOperators::pressure_stiffness_block() const { return numkit::block_diag(K_K); }

Mat DiscreteOperators::exchange_stiffness(const NetworkCoupling& coupling) const {
    require_matching(*this, coupling, "exchange_stiffness");
    return pressure_stiffness_block() + numkit::kron(coupling.matrix(), M_I);
}

Mat DiscreteOperators::exchange_stiffness_sym(const NetworkCoupling& coupling) const {
    require_matching(*this, coupling, "exchange_stiffness_sym");
    return pressure_stiffness_block() + exchange_parts(*this, coupling).sym;
}

DiscreteOperators DiscreteOperators::quasi_static() const {
    DiscreteOperators out = *this;
    out.M_Y.setZero();
    for (auto& mat : out.materials) mat.rho = 0.0;
    return out;
}

// --- assembly ---

DiscreteOperators assemble_two_field(std::shared_ptr<const fem::Mesh2D> mesh, const fem::PoroMaterial& mat) {
    const fem::PoroMaterial mats[] = {mat};
    return assemble_network(std::move(mesh), mats, NetworkCoupling::zero(1));
}

DiscreteOperators assemble_network(std::shared_ptr<const fem::Mesh2D> mesh,
                                   std::span<const fem::PoroMaterial> mats,
                                   const NetworkCoupling& coupling) {
    if (!mesh) throw ConfigError("assemble: missing mesh");
    if (mats.empty()) throw ConfigError("assemble: at least one material required");
    if (coupling.size() != static_cast<int>(mats.size())) {
        throw ConfigError("assemble: exchange matrix size must equal the number of networks");
    }
    for (const auto& m : mats) m.validate();
    const auto& ref = mats.front();
    for (const auto& m : mats) {
        if (m.rho != ref.rho || m.mu != ref.mu || m.lambda != ref.lambda || m.biot_M != ref.biot_M) {
            throw ConfigError("assemble: networks must share rho, mu, lambda and biot_M");
        }
    }

    DiscreteOperators ops;
    ops.mesh = mesh;
    ops.vspace = std::make_shared<const fem::FeSpace>(mesh, fem::SpaceKind::vector_p1);
    ops.qspace = std::make_shared<const fem::FeSpace>(mesh, fem::SpaceKind::scalar_p1);
    ops.materials.assign(mats.begin(), mats.end());

    ops.M_Y = fem::assemble_mass(*ops.vspace, ref.rho);
    ops.K_A = fem::assemble_elasticity(*ops.vspace, ref.mu, ref.lambda);
    ops.M_M = fem::assemble_mass(*ops.qspace, 1.0 / ref.biot_M);
    ops.M_I = fem::assemble_mass(*ops.qspace, 1.0);
    ops.M_u = fem::assemble_mass(*ops.vspace, 1.0);
    for (const auto& m : mats) {
        ops.K_K.push_back(fem::assemble_laplace(*ops.qspace, m.kappa / m.nu));
        ops.D.push_back(fem::assemble_divergence_coupling(*ops.vspace, *ops.qspace, m.alpha));
    }
    return ops;
}

// --- builders ---

PhDae build_full_first_order(const DiscreteOperators& ops) {
    require_single_network(ops, "build_full_first_order");
    return build_wup(ops, NetworkCoupling::zero(1));
}

PhDae build_sqrt_formulation(const DiscreteOperators& ops) {
    require_single_network(ops, "build_sqrt_formulation");
    const Index nu = ops.u_dim();
    const Index np = ops.p_dim();
    const Index n = 2 * nu + np;
    const Mat S = numkit::sqrtm_spd(ops.K_A);

    Mat E = Mat::Zero(n, n);
    E.block(0, 0, nu, nu) = ops.M_Y;
    E.block(nu, nu, nu, nu).setIdentity();
    E.block(2 * nu, 2 * nu, np, np) = ops.M_M;

    Mat J = Mat::Zero(n, n);
    J.block(0, nu, nu, nu) = -S;
    J.block(nu, 0, nu, nu) = S;
    J.block(0, 2 * nu, nu, np) = ops.D[0].transpose();
    J.block(2 * nu, 0, np, nu) = -ops.D[0];

    Mat R = Mat::Zero(n, n);
    R.block(2 * nu, 2 * nu, np, np) = ops.K_K[0];

    Mat G = Mat::Zero(n, nu + np);
    G.block(0, 0, nu, nu) = ops.M_u;
    G.block(2 * nu, nu, np, np) = ops.M_I;

    PhDae sys = PhDae::create(std::move(E), std::move(J), std::move(R), std::move(G),
                              {{"w", 0, nu}, {"u_tilde", nu, nu}, {"p", 2 * nu, np}},
                              {{"f", 0, nu}, {"g", nu, np}});
    const bool inertial = ops.M_Y.size() > 0 && numkit::max_abs(ops.M_Y) > 0.0;
    sys.set_expected_index(inertial ? 0 : 2);
    return sys;
}

PhDae build_quasi_static(const DiscreteOperators& ops, const std::optional<NetworkCoupling>& coupling) {
    const DiscreteOperators qs = ops.quasi_static();
    PhDae sys = build_wup(qs, coupling_or_zero(qs, coupling));
    sys.set_expected_index(2);
    return sys;
}

PhDae build_network_ph(const DiscreteOperators& ops, const NetworkCoupling& coupling) {
    require_matching(ops, coupling, "build_network_ph");
    const EllipticityReport rep = check_network_ellipticity(ops, coupling);
    if (rep.verdict == Definiteness::indefinite) {
        throw StructureError("build_network_ph: the symmetric part of the exchange stiffness is indefinite",
                             rep.min_sym_eigenvalue);
    }
    return build_wup(ops, coupling);
}

PhDae build_alternative_qs(const DiscreteOperators& ops, const std::optional<NetworkCoupling>& coupling) {
    const AltQsBlocks b = alt_qs_blocks(ops, coupling);
    const int m = ops.networks();
    const Index nu = ops.u_dim();
    const Index np = ops.p_dim();
    const Index mp = m * np;
    const Index n = nu + 2 * mp;

    const auto krep = numkit::spectral_report_of_sym_part(b.K, numkit::default_tol(b.K));
    if (!krep.is_pd()) {
        throw StructureError("alternative quasi-static form: K must be positive definite", krep.min_eigenvalue);
    }

    Mat E = Mat::Zero(n, n);
    E.block(nu + mp, nu + mp, mp, mp) = b.K;

    Mat J = Mat::Zero(n, n);
    J.block(0, nu, nu, mp) = b.D.transpose();
    J.block(nu, 0, mp, nu) = -b.D;
    J.block(nu, nu + mp, mp, mp) = b.K;
    J.block(nu + mp, nu, mp, mp) = -b.K;

    Mat R = Mat::Zero(n, n);
    R.block(0, 0, nu, nu) = ops.K_A;
    R.block(nu, nu, mp, mp) = b.M;

    Mat G = Mat::Zero(n, nu + mp);
    G.block(0, 0, nu, nu) = ops.M_u;
    G.block(nu + mp, nu, mp, mp) = ops.pressure_input_block();

    std::vector<BlockLabel> sb{{"u", 0, nu}};
    std::vector<BlockLabel> ib{{"f", 0, nu}};
    for (int i = 0; i < m; ++i) sb.push_back({pressure_label("p", i, m), nu + i * np, np});
    for (int i = 0; i < m; ++i) {
        sb.push_back({pressure_label("q", i, m), nu + mp + i * np, np});
        ib.push_back({pressure_label("g", i, m), nu + i * np, np});
    }
    PhDae sys = PhDae::create(std::move(E), std::move(J), std::move(R), std::move(G), std::move(sb), std::move(ib));
    sys.set_expected_index(1);
    return sys;
}

// --- change of variables ---

Mat alt_qs_forward_map(const DiscreteOperators& ops, const std::optional<NetworkCoupling>& coupling) {
    const AltQsBlocks b = alt_qs_blocks(ops, coupling);
    const Index nu = ops.u_dim();
    const Index mp = b.M.rows();
    Mat T = Mat::Zero(nu + mp, nu + mp);
    T.topLeftCorner(nu, nu).setIdentity();
    T.block(nu, 0, mp, nu) = numkit::solve(b.K, b.D);
    T.block(nu, nu, mp, mp) = numkit::solve(b.K, b.M);
    return T;
}

Mat alt_qs_inverse_map(const DiscreteOperators& ops, const std::optional<NetworkCoupling>& coupling) {
    const AltQsBlocks b = alt_qs_blocks(ops, coupling);
    const Index nu = ops.u_dim();
    const Index mp = b.M.rows();
    Mat T = Mat::Zero(nu + mp, nu + mp);
    T.topLeftCorner(nu, nu).setIdentity();
    T.block(nu, 0, mp, nu) = -numkit::solve(b.M, b.D);
    T.block(nu, nu, mp, mp) = numkit::solve(b.M, b.K);
    return T;
}

Mat alt_qs_reduced_operator(const DiscreteOperators& ops, const std::optional<NetworkCoupling>& coupling) {
    const AltQsBlocks b = alt_qs_blocks(ops, coupling);
    const Index nu = ops.u_dim();
    const Index mp = b.M.rows();
    const Mat Minv_D = numkit::solve(b.M, b.D);
    const Mat Minv_K = numkit::solve(b.M, b.K);
    Mat out(nu + mp, nu + mp);
    out.topLeftCorner(nu, nu) = -ops.K_A - b.D.transpose() * Minv_D;
    out.topRightCorner(nu, mp) = b.D.transpose() * Minv_K;
    out.bottomLeftCorner(mp, nu) = b.K * Minv_D;
    out.bottomRightCorner(mp, mp) = -b.K * Minv_K;
    return out;
}

// --- parabolic reduction ---

Vec ParabolicReduction::reduced_load(const Vec& g_load, const Vec& fdot_load) const {
    if (g_load.size() != M_tilde.rows() || fdot_load.size() != K_A.rows()) {
        throw DimensionError("reduced_load: length mismatch");
    }
    return g_load - D_bar * numkit::solve(K_A, fdot_load);
}

Vec ParabolicReduction::recover_displacement(const Vec& p, const Vec& f_load) const {
    if (p.size() != M_tilde.rows() || f_load.size() != K_A.rows()) {
        throw DimensionError("recover_displacement: length mismatch");
    }
    return numkit::solve(K_A, Vec(D_bar.transpose() * p + f_load));
}

ParabolicReduction schur_reduce_parabolic(const DiscreteOperators& ops,
                                          const std::optional<NetworkCoupling>& coupling) {
    const NetworkCoupling b = coupling_or_zero(ops, coupling);
    ParabolicReduction red;
    red.K_A = ops.K_A;
    red.D_bar = ops.stacked_coupling();
    red.K_bar = ops.exchange_stiffness(b);
    const Mat mt = ops.pressure_mass_block() + red.D_bar * numkit::solve(ops.K_A, Mat(red.D_bar.transpose()));
    red.M_tilde = 0.5 * (mt + mt.transpose());
    return red;
}

PhDae build_schur_parabolic(const DiscreteOperators& ops, const std::optional<NetworkCoupling>& coupling) {
    const NetworkCoupling b = coupling_or_zero(ops, coupling);
    const ParabolicReduction red = schur_reduce_parabolic(ops, b);
    const ExchangeParts x = exchange_parts(ops, b);
    const int m = ops.networks();
    const Index nu = ops.u_dim();
    const Index np = ops.p_dim();
    const Index mp = m * np;

    Mat G(mp, mp + nu);
    G.leftCols(mp) = ops.pressure_input_block();
    G.rightCols(nu) = -red.D_bar * numkit::solve(ops.K_A, ops.M_u);

    std::vector<BlockLabel> sb;
    std::vector<BlockLabel> ib;
    for (int i = 0; i < m; ++i) {
        sb.push_back({pressure_label("p", i, m), i * np, np});
        ib.push_back({pressure_label("g", i, m), i * np, np});
    }
    ib.push_back({"fdot", mp, nu});
    PhDae sys = PhDae::create(red.M_tilde, -x.skew, ops.pressure_stiffness_block() + x.sym, std::move(G),
                              std::move(sb), std::move(ib));
    sys.set_expected_index(0);
    return sys;
}

// --- ellipticity ---

EllipticityReport check_network_ellipticity(const DiscreteOperators& ops, const NetworkCoupling& coupling,
                                            std::optional<double> tol) {
    require_matching(ops, coupling, "check_network_ellipticity");
    EllipticityReport rep;
    const Mat ksym = ops.exchange_stiffness_sym(coupling);
    const auto spec = numkit::spectral_report_of_sym_part(ksym, tol.value_or(numkit::default_tol(ksym)));
    rep.min_sym_eigenvalue = spec.min_eigenvalue;
    rep.verdict = spec.verdict;
    rep.max_exchange_rate = coupling.max_exchange_rate();

    if (ops.p_dim() == 0) {
        // No interior pressure dofs: every statement holds vacuously.
        rep.ellipticity_constant = std::numeric_limits<double>::infinity();
        rep.embedding_constant_sq = 0.0;
        rep.rate_bound = std::numeric_limits<double>::infinity();
        rep.sufficient_bound_holds = true;
        return rep;
    }

    const Mat gram = fem::assemble_laplace(*ops.qspace, 1.0) + fem::assemble_mass(*ops.qspace, 1.0);
    double c = std::numeric_limits<double>::infinity();
    for (const auto& k : ops.K_K) c = std::min(c, numkit::min_generalized_eigenvalue(k, gram));
    rep.ellipticity_constant = c;
    rep.embedding_constant_sq = numkit::max_generalized_eigenvalue(ops.M_I, gram);
    rep.rate_bound = c / (2.0 * ops.networks() * rep.embedding_constant_sq);
    rep.sufficient_bound_holds = rep.max_exchange_rate < rep.rate_bound;
    return rep;
}

}  // namespace poroph
