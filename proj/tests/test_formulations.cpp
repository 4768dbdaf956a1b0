#include "helpers.hpp"
#include "oracles.hpp"

#include "poroph/error.hpp"
#include "poroph/formulations.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace poroph;
using namespace testing_support;

namespace {

Mat pair_coupling(double beta) {
    Mat b(2, 2);
    b << -beta, beta, beta, -beta;
    return b;
}

// Keeps the rows/cols in `keep` after eliminating those in `drop` (Schur complement).
Mat schur_complement(const Mat& a, const std::vector<int>& keep, const std::vector<int>& drop) {
    const auto take = [&](const std::vector<int>& r, const std::vector<int>& c) {
        Mat out(r.size(), c.size());
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = 0; j < c.size(); ++j) out(i, j) = a(r[i], c[j]);
        return out;
    };
    return take(keep, keep) - take(keep, drop) * oracle::gauss_solve(take(drop, drop), take(drop, keep));
}

std::vector<int> range(int from, int to) {
    std::vector<int> v;
    for (int i = from; i < to; ++i) v.push_back(i);
    return v;
}

}  // namespace

TEST(NetworkCoupling, Validation) {
    EXPECT_NO_THROW(NetworkCoupling(pair_coupling(0.3)));
    Mat bad = pair_coupling(0.3);
    bad(0, 0) = 0.0;
    EXPECT_THROW(NetworkCoupling{bad}, ConfigError);
    EXPECT_THROW(NetworkCoupling{Mat::Zero(2, 3)}, ConfigError);

    Mat rates = Mat::Zero(3, 3);
    rates(0, 1) = 1.0;
    rates(2, 0) = 0.5;
    const auto c = NetworkCoupling::from_rates(rates);
    EXPECT_DOUBLE_EQ(c.matrix()(0, 0), -1.0);
    EXPECT_DOUBLE_EQ(c.matrix()(2, 2), -0.5);
    EXPECT_FALSE(c.is_symmetric());
    EXPECT_DOUBLE_EQ(c.max_exchange_rate(), 1.0);
    EXPECT_TRUE(NetworkCoupling::zero(4).is_symmetric());
}

TEST(Assemble, TwoFieldDimensions) {
    const auto ops = two_field(2);
    EXPECT_EQ(ops.M_Y.rows(), 2);
    EXPECT_EQ(ops.K_A.rows(), 2);
    EXPECT_EQ(ops.M_M.rows(), 1);
    EXPECT_EQ(ops.D[0].rows(), 1);
    EXPECT_EQ(ops.D[0].cols(), 2);
    EXPECT_EQ(ops.networks(), 1);
}

TEST(Assemble, ZeroDensityAndZeroCoupling) {
    EXPECT_EQ(two_field(3, 0.0).M_Y, Mat::Zero(8, 8));
    EXPECT_EQ(two_field(3, 1.0, 0.0).D[0], Mat::Zero(4, 8));
    const auto qs = two_field(3).quasi_static();
    EXPECT_EQ(qs.M_Y, Mat::Zero(8, 8));
}

TEST(Assemble, NetworkMaterialsMustShareElasticData) {
    auto mats = network_materials(2);
    mats[1].mu = 7.0;
    EXPECT_THROW(assemble_network(mesh(2), mats, NetworkCoupling::zero(2)), ConfigError);
    EXPECT_THROW(assemble_network(mesh(2), network_materials(2), NetworkCoupling::zero(3)), ConfigError);
}

TEST(Assemble, ExchangeStiffnessBlocks) {
    const double beta = 0.2;
    const NetworkCoupling c(pair_coupling(beta));
    const auto ops = network(3, 2, c);
    const Mat kb = ops.exchange_stiffness(c);
    const auto np = ops.p_dim();
    EXPECT_LE((kb.block(0, np, np, np) - beta * ops.M_I).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((kb.block(0, 0, np, np) - (ops.K_K[0] - beta * ops.M_I)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((kb.block(np, np, np, np) - (ops.K_K[1] - beta * ops.M_I)).cwiseAbs().maxCoeff(), 1e-15);

    const Mat k0 = ops.exchange_stiffness(NetworkCoupling::zero(2));
    EXPECT_EQ(k0, ops.pressure_stiffness_block());
}

TEST(Assemble, QuadraticFormOfExchangeStiffnessSeesOnlySymmetricPart) {
    std::mt19937_64 rng(23);
    const auto c = random_coupling(rng, 3, 1.0, false);
    const auto ops = network(3, 3, c);
    const Mat kb = ops.exchange_stiffness(c);
    const Mat ks = ops.exchange_stiffness_sym(c);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec z = oracle::random_vector(rng, static_cast<int>(kb.rows()));
        const double a = z.dot(kb * z), b = z.dot(ks * z);
        EXPECT_NEAR(a, b, 1e-13 * (1.0 + std::abs(b)));
    }
}

TEST(Ellipticity, ZeroCouplingIsElliptic) {
    const auto ops = network(3, 2, NetworkCoupling::zero(2));
    const auto rep = check_network_ellipticity(ops, NetworkCoupling::zero(2));
    EXPECT_TRUE(rep.definite());
    EXPECT_GT(rep.min_sym_eigenvalue, 0.0);
    EXPECT_TRUE(rep.sufficient_bound_holds);
}

TEST(Ellipticity, SufficientBoundImpliesDefiniteness) {
    std::mt19937_64 rng(31);
    for (double scale : {1e-3, 1e-2, 1e-1, 1.0, 10.0, 1e2, 1e3}) {
        for (bool sym : {true, false}) {
            const auto c = random_coupling(rng, 2, scale, sym);
            const auto ops = network(3, 2, c);
            const auto rep = check_network_ellipticity(ops, c);
            if (rep.sufficient_bound_holds) EXPECT_TRUE(rep.definite()) << scale;
            EXPECT_NEAR(rep.min_sym_eigenvalue, oracle::min_eigenvalue(ops.exchange_stiffness_sym(c)),
                        1e-9 * (1.0 + scale));
        }
    }
}

TEST(Ellipticity, HugeExchangeRateBreaksDefiniteness) {
    std::mt19937_64 rng(37);
    const auto small = random_coupling(rng, 2, 1.0, false);
    const NetworkCoupling huge(small.matrix() * 1e6);
    const auto ops = network(3, 2, huge);
    const auto rep = check_network_ellipticity(ops, huge);
    EXPECT_FALSE(rep.definite());
    EXPECT_LT(oracle::min_eigenvalue(ops.exchange_stiffness_sym(huge)), 0.0);
    EXPECT_FALSE(rep.sufficient_bound_holds);
    EXPECT_THROW(build_network_ph(ops, huge), StructureError);
}

TEST(Ellipticity, EmptyPressureSpaceIsVacuous) {
    const auto ops = network(1, 2, NetworkCoupling::zero(2));
    const auto rep = check_network_ellipticity(ops, NetworkCoupling::zero(2));
    EXPECT_TRUE(rep.definite());
    EXPECT_TRUE(rep.sufficient_bound_holds);
}

TEST(FullFirstOrder, ZeroCouplingLeavesSkewJ) {
    const auto ops = two_field(3, 1.0, 0.0);
    const auto sys = build_full_first_order(ops);
    const auto nu = ops.u_dim();
    EXPECT_EQ(sys.J().block(0, 2 * nu, nu, ops.p_dim()), Mat::Zero(nu, ops.p_dim()));
    EXPECT_TRUE(numkit::is_skew(sys.J(), 0.0));
}

TEST(FullFirstOrder, InertialEnergyIsDefinite) {
    const auto sys = build_full_first_order(two_field(2));
    EXPECT_GT(oracle::min_eigenvalue(sys.E()), 0.0);
    EXPECT_EQ(sys.expected_index(), 0);
    EXPECT_EQ(build_full_first_order(two_field(2, 0.0)).expected_index(), 2);
}

TEST(FullFirstOrder, RejectsNetworks) {
    const auto ops = network(2, 2, NetworkCoupling::zero(2));
    EXPECT_THROW(build_full_first_order(ops), ConfigError);
    EXPECT_THROW(build_sqrt_formulation(ops), ConfigError);
}

TEST(SqrtFormulation, EnergyAndOutputAgree) {
    const auto ops = two_field(3);
    const auto full = build_full_first_order(ops);
    const auto sq = build_sqrt_formulation(ops);
    const Mat s = numkit::sqrtm_spd(ops.K_A);
    std::mt19937_64 rng(41);
    const auto nu = ops.u_dim();
    for (int trial = 0; trial < 10; ++trial) {
        const Vec z = oracle::random_vector(rng, static_cast<int>(full.state_dim()));
        Vec zt = z;
        zt.segment(nu, nu) = s * z.segment(nu, nu);
        EXPECT_NEAR(hamiltonian(full, z), hamiltonian(sq, zt), 1e-12 * (1.0 + hamiltonian(full, z)));
        EXPECT_LE((output(full, z) - output(sq, zt)).cwiseAbs().maxCoeff(), 1e-15);
    }
    EXPECT_TRUE(validate_structure(sq).verdict);
    EXPECT_EQ(sq.state_blocks()[1].name, "u_tilde");
}

TEST(QuasiStatic, EnergyRank) {
    const auto ops = two_field(3);
    const auto sys = build_quasi_static(ops);
    EXPECT_EQ(numkit::numerical_rank(sys.E(), 1e-12), ops.u_dim() + ops.p_dim());
    EXPECT_EQ(sys.expected_index(), 2);
    EXPECT_TRUE(validate_structure(sys).verdict);
}

TEST(AlternativeQs, HamiltonianThroughAuxiliaryVariable) {
    const auto ops = two_field(3);
    const auto sys = build_alternative_qs(ops);
    std::mt19937_64 rng(43);
    const auto nu = ops.u_dim(), np = ops.p_dim();
    const Vec u = oracle::random_vector(rng, static_cast<int>(nu));
    const Vec p = oracle::random_vector(rng, static_cast<int>(np));
    const Vec q = oracle::gauss_solve(ops.K_K[0], Vec(ops.D[0] * u + ops.M_M * p));
    Vec z(nu + 2 * np);
    z << u, p, q;
    const double expect = 0.5 * (ops.M_M * p + ops.D[0] * u).dot(q);
    EXPECT_NEAR(hamiltonian(sys, z), expect, 1e-13 * (1.0 + std::abs(expect)));
}

TEST(AlternativeQs, ChangeOfVariablesMapsAreInverse) {
    for (int n : {2, 3}) {
        const auto ops = two_field(n);
        const Mat t = alt_qs_forward_map(ops);
        const Mat ti = alt_qs_inverse_map(ops);
        EXPECT_LE((t * ti - Mat::Identity(t.rows(), t.cols())).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((ti * t - Mat::Identity(t.rows(), t.cols())).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(AlternativeQs, EliminatingPressureGivesReducedOperator) {
    for (int n : {2, 3}) {
        const auto ops = two_field(n);
        const auto sys = build_alternative_qs(ops);
        const int nu = static_cast<int>(ops.u_dim()), np = static_cast<int>(ops.p_dim());
        std::vector<int> keep = range(0, nu);
        for (int i : range(nu + np, nu + 2 * np)) keep.push_back(i);
        const Mat reduced = schur_complement(sys.drift(), keep, range(nu, nu + np));
        EXPECT_LE(oracle::rel_diff(reduced, alt_qs_reduced_operator(ops)), 1e-13) << n;
    }
}

TEST(AlternativeQs, NetworkCouplingMustBeSymmetric) {
    std::mt19937_64 rng(47);
    const auto c = random_coupling(rng, 2, 0.1, false);
    const auto ops = network(3, 2, c);
    EXPECT_THROW(build_alternative_qs(ops, c), ConfigError);
    const auto cs = random_coupling(rng, 2, 0.1, true);
    const auto sys = build_alternative_qs(network(3, 2, cs), cs);
    EXPECT_TRUE(validate_structure(sys).verdict);
    EXPECT_EQ(sys.state_blocks().size(), 5u);
}

TEST(Schur, DecoupledCaseIsPlainPressureMass) {
    const auto ops = two_field(3, 0.0, 0.0);
    const auto red = schur_reduce_parabolic(ops);
    EXPECT_LE((red.M_tilde - ops.M_M).cwiseAbs().maxCoeff(), 0.0);
    std::mt19937_64 rng(53);
    const Vec g = oracle::random_vector(rng, static_cast<int>(ops.p_dim()));
    const Vec fd = oracle::random_vector(rng, static_cast<int>(ops.u_dim()));
    EXPECT_EQ(red.reduced_load(g, fd), g);
}

TEST(Schur, ReducedMassIsDefinite) {
    for (int n : {2, 3}) {
        const auto ops = two_field(n, 0.0);
        const auto red = schur_reduce_parabolic(ops);
        EXPECT_TRUE(numkit::psd_check(red.M_tilde).is_pd());
        EXPECT_GT(oracle::min_eigenvalue(red.M_tilde), 0.0);
        const Mat expect = ops.M_M + ops.D[0] * oracle::gauss_solve(ops.K_A, Mat(ops.D[0].transpose()));
        EXPECT_LE(oracle::rel_diff(red.M_tilde, expect), 1e-13);
    }
}

TEST(Schur, PhDaeForm) {
    const auto ops = two_field(3, 0.0);
    const auto sys = build_schur_parabolic(ops);
    EXPECT_TRUE(validate_structure(sys).verdict);
    EXPECT_EQ(sys.input_dim(), ops.p_dim() + ops.u_dim());
    EXPECT_EQ(sys.input_blocks().back().name, "fdot");
    EXPECT_EQ(sys.expected_index(), 0);
}

TEST(Schur, DisplacementRecovery) {
    const auto ops = two_field(3, 0.0);
    const auto red = schur_reduce_parabolic(ops);
    std::mt19937_64 rng(59);
    const Vec p = oracle::random_vector(rng, static_cast<int>(ops.p_dim()));
    const Vec f = oracle::random_vector(rng, static_cast<int>(ops.u_dim()));
    const Vec u = red.recover_displacement(p, f);
    EXPECT_LE((ops.K_A * u - ops.D[0].transpose() * p - f).norm(), 1e-12);
}

TEST(Network, SingleNetworkMatchesTwoField) {
    const auto ops = two_field(3);
    const auto net = build_network_ph(ops, NetworkCoupling::zero(1));
    const auto full = build_full_first_order(ops);
    EXPECT_EQ(net.E(), full.E());
    EXPECT_EQ(net.J(), full.J());
    EXPECT_EQ(net.R(), full.R());
    EXPECT_EQ(net.G(), full.G());
}

TEST(Network, SymmetricCouplingOnlyDissipates) {
    std::mt19937_64 rng(61);
    const auto c = random_coupling(rng, 3, 0.2, true);
    const auto ops = network(3, 3, c);
    const auto sys = build_network_ph(ops, c);
    const auto nu = ops.u_dim();
    const auto mp = 3 * ops.p_dim();
    EXPECT_EQ(sys.J().block(2 * nu, 2 * nu, mp, mp), Mat::Zero(mp, mp));
    EXPECT_LE((sys.R().block(2 * nu, 2 * nu, mp, mp) - ops.exchange_stiffness(c)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(sys.state_blocks()[4].name, "p3");
    EXPECT_EQ(sys.input_blocks()[1].name, "g1");
}

TEST(Network, NonsymmetricCouplingSplitsIntoJAndR) {
    std::mt19937_64 rng(67);
    const auto c = random_coupling(rng, 2, 0.2, false);
    const auto ops = network(3, 2, c);
    const auto sys = build_network_ph(ops, c);
    const auto nu = ops.u_dim();
    const auto mp = 2 * ops.p_dim();
    const Mat drift_pp = sys.drift().block(2 * nu, 2 * nu, mp, mp);
    EXPECT_LE((drift_pp + ops.exchange_stiffness(c)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_TRUE(validate_structure(sys).verdict);
}
