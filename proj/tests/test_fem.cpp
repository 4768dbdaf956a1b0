#include "helpers.hpp"
#include "oracles.hpp"

#include "poroph/error.hpp"
#include "poroph/fem.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <sstream>

using namespace poroph;
using namespace poroph::fem;
using testing_support::mesh;

namespace {

const TriangleCoords kRef{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};

// spaces of the same resolution share one cached mesh, as coupled assembly requires
std::shared_ptr<const Mesh2D> shared_mesh(int n) {
    static std::map<int, std::shared_ptr<const Mesh2D>> cache;
    auto& m = cache[n];
    if (!m) m = mesh(n);
    return m;
}

FeSpace scalar(int n) { return FeSpace(shared_mesh(n), SpaceKind::scalar_p1); }
FeSpace vector(int n) { return FeSpace(shared_mesh(n), SpaceKind::vector_p1); }

}  // namespace

TEST(Mesh, Counts) {
    const auto m1 = build_unit_square_mesh(1);
    EXPECT_EQ(m1.nodes.size(), 4u);
    EXPECT_EQ(m1.triangles.size(), 2u);
    EXPECT_EQ(m1.boundary_nodes.size(), 4u);
    EXPECT_EQ(m1.interior_count(), 0);

    const auto m2 = build_unit_square_mesh(2);
    EXPECT_EQ(m2.nodes.size(), 9u);
    EXPECT_EQ(m2.triangles.size(), 8u);
    EXPECT_EQ(m2.interior_count(), 1);
    EXPECT_FALSE(m2.is_boundary(4));
}

TEST(Mesh, AreasPositiveAndSumToOne) {
    const auto m = build_unit_square_mesh(4);
    double total = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const double a = signed_area(m.coords(t));
        EXPECT_GT(a, 0.0);
        total += a;
    }
    EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(Mesh, NodeNumberingAndBoundary) {
    const int n = 3;
    const auto m = build_unit_square_mesh(n);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const int k = j * (n + 1) + i;
            EXPECT_DOUBLE_EQ(m.nodes[k][0], static_cast<double>(i) / n);
            EXPECT_DOUBLE_EQ(m.nodes[k][1], static_cast<double>(j) / n);
            const bool on_edge = i == 0 || j == 0 || i == n || j == n;
            EXPECT_EQ(m.is_boundary(k), on_edge) << k;
        }
}

TEST(Mesh, RejectsZeroSubdivisions) { EXPECT_THROW(build_unit_square_mesh(0), ConfigError); }

TEST(Mesh, WriteListsSections) {
    std::ostringstream os;
    write_mesh(os, build_unit_square_mesh(1));
    EXPECT_NE(os.str().find("nodes 4"), std::string::npos);
    EXPECT_NE(os.str().find("triangles 2"), std::string::npos);
}

TEST(FeSpace, Dimensions) {
    EXPECT_EQ(scalar(3).dim(), 4);
    EXPECT_EQ(vector(3).dim(), 8);
    EXPECT_EQ(scalar(1).dim(), 0);
    const auto v = vector(3);
    EXPECT_EQ(v.dof(0, 0), -1);
    const int first_interior = v.interior_nodes().front();
    EXPECT_EQ(v.dof(first_interior, 0), 0);
    EXPECT_EQ(v.dof(first_interior, 1), 4);
}

TEST(FeSpace, InterpolationBlocksComponents) {
    const auto v = vector(2);
    const Vec u = v.interpolate([](double x, double y) { return Point{x, 10 * y}; });
    ASSERT_EQ(u.size(), 2);
    EXPECT_DOUBLE_EQ(u(0), 0.5);
    EXPECT_DOUBLE_EQ(u(1), 5.0);
}

TEST(LocalMatrices, StiffnessGoldenValue) {
    Eigen::Matrix3d expect;
    expect << 2, -1, -1, -1, 1, 0, -1, 0, 1;
    expect *= 0.5;
    EXPECT_LE((local_stiffness(kRef, 1.0) - expect).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((oracle::stiffness(kRef, 1.0) - expect).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(LocalMatrices, MassGoldenValue) {
    Eigen::Matrix3d pattern;
    pattern << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    const TriangleCoords t{{{0.2, 0.1}, {0.9, 0.3}, {0.4, 0.8}}};
    const double a = signed_area(t);
    EXPECT_LE((local_mass(t, 3.0) - 3.0 * a / 12.0 * pattern).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((local_mass(t, 3.0) - oracle::mass(t, 3.0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LocalMatrices, GeneralTriangleAgainstQuadratureOracle) {
    const TriangleCoords t{{{0.1, 0.0}, {0.7, 0.2}, {0.3, 0.6}}};
    EXPECT_LE((local_stiffness(t, 2.5) - oracle::stiffness(t, 2.5)).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE((local_divergence(t, 0.7) - oracle::divergence(t, 0.7)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((local_elasticity(t, 1.3, 0.4) - oracle::elasticity(t, 1.3, 0.4)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(LocalMatrices, RigidMotionsCarryNoElasticEnergy) {
    const TriangleCoords t{{{0.1, 0.0}, {0.7, 0.2}, {0.3, 0.6}}};
    const auto a = local_elasticity(t, 1.0, 3.0);
    Eigen::Matrix<double, 6, 1> tx, ty, rot;
    tx << 1, 1, 1, 0, 0, 0;
    ty << 0, 0, 0, 1, 1, 1;
    for (int k = 0; k < 3; ++k) {
        rot(k) = -t[k][1];
        rot(3 + k) = t[k][0];
    }
    EXPECT_LE((a * tx).norm(), 1e-14);
    EXPECT_LE((a * ty).norm(), 1e-14);
    EXPECT_LE((a * rot).norm(), 1e-14);
}

TEST(LocalMatrices, AffineDivergenceReproducesHatIntegrals) {
    const TriangleCoords t{{{0.1, 0.0}, {0.7, 0.2}, {0.3, 0.6}}};
    Eigen::Matrix<double, 6, 1> u;
    for (int k = 0; k < 3; ++k) {
        u(k) = t[k][0];
        u(3 + k) = t[k][1];
    }
    const Eigen::Vector3d r = local_divergence(t, 1.5) * u;
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(r(i), 2 * 1.5 * signed_area(t) / 3.0, 1e-15);
}

TEST(Assembly, LaplaceInteriorValueOnTwoByTwo) {
    const Mat k = assemble_laplace(scalar(2), 1.0);
    ASSERT_EQ(k.rows(), 1);
    EXPECT_NEAR(k(0, 0), 4.0, 1e-13);
    EXPECT_NEAR(oracle::hat_stiffness_diagonal(2, {0.5, 0.5}, 1.0), 4.0, 1e-13);
}

TEST(Assembly, MassInteriorValueOnTwoByTwo) {
    const Mat m = assemble_mass(scalar(2), 1.0);
    ASSERT_EQ(m.rows(), 1);
    EXPECT_NEAR(m(0, 0), oracle::hat_mass_diagonal(2, {0.5, 0.5}, 1.0), 1e-15);
    EXPECT_EQ(assemble_mass(scalar(3), 0.0), Mat::Zero(4, 4));
}

TEST(Assembly, GlobalMatricesAgainstOracleAssembly) {
    for (int n : {2, 3, 4}) {
        EXPECT_LE(oracle::rel_diff(assemble_mass(scalar(n), 2.0),
                                   oracle::assemble_scalar(n, [](const oracle::Tri& t) { return oracle::mass(t, 2.0); })),
                  1e-15)
            << n;
        EXPECT_LE(
            oracle::rel_diff(assemble_laplace(scalar(n), 0.5),
                             oracle::assemble_scalar(n, [](const oracle::Tri& t) { return oracle::stiffness(t, 0.5); })),
            1e-13)
            << n;
        EXPECT_LE(oracle::rel_diff(assemble_divergence_coupling(vector(n), scalar(n), 0.8),
                                   oracle::assemble_divergence(n, 0.8)),
                  1e-14)
            << n;
        EXPECT_LE(oracle::rel_diff(assemble_elasticity(vector(n), 1.1, 2.3), oracle::assemble_elasticity(n, 1.1, 2.3)),
                  1e-13)
            << n;
    }
}

TEST(Assembly, LaplaceScalesLinearly) {
    const Mat k1 = assemble_laplace(scalar(3), 1.0);
    EXPECT_EQ(assemble_laplace(scalar(3), 4.0), 4.0 * k1);
}

TEST(Assembly, ElasticityLambdaZeroIsSymmetricGradientGram) {
    const auto v = vector(3);
    const Mat full = assemble_elasticity(v, 1.5, 2.0);
    const Mat lam0 = assemble_elasticity(v, 1.5, 0.0);
    const Mat mu_only = assemble_elasticity(v, 0.5, 0.0);
    EXPECT_LE((lam0 - 3.0 * mu_only).cwiseAbs().maxCoeff(), 1e-13);
    // remainder is λ times the divergence Gram
    const Mat div_gram = assemble_elasticity(v, 1.5, 1.0) - lam0;
    EXPECT_LE((full - lam0 - 2.0 * div_gram).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Assembly, ElasticityIsPositiveDefiniteOnThreeByThree) {
    const Mat a = assemble_elasticity(vector(3), 1.0, 1.0);
    EXPECT_EQ(numkit::psd_check(a).verdict, Definiteness::positive_definite);
    EXPECT_GT(oracle::min_eigenvalue(a), 0.0);
}

TEST(Assembly, DivergenceCouplingLinearity) {
    const auto v = vector(3);
    const auto q = scalar(3);
    EXPECT_EQ(assemble_divergence_coupling(v, q, 0.0), Mat::Zero(4, 8));
    const Mat d1 = assemble_divergence_coupling(v, q, 0.75);
    EXPECT_EQ(assemble_divergence_coupling(v, q, 1.5), 2.0 * d1);
}

TEST(Assembly, LoadVectors) {
    const auto q = scalar(3);
    EXPECT_EQ(assemble_load(q, [](double, double) { return 0.0; }), Vec::Zero(4));
    const Vec ones = assemble_load(q, [](double, double) { return 1.0; });
    const auto& mesh3 = q.mesh();
    for (int d = 0; d < q.dim(); ++d) {
        const auto& x = mesh3.nodes[q.interior_nodes()[d]];
        EXPECT_NEAR(ones(d), oracle::hat_integral(3, {x[0], x[1]}), 1e-15);
    }
    const auto f = [](double x, double y) { return x * y + 1.0; };
    const auto g = [](double x, double) { return std::sin(x); };
    const Vec lf = assemble_load(q, f), lg = assemble_load(q, g);
    const Vec lfg = assemble_load(q, [&](double x, double y) { return f(x, y) + g(x, y); });
    EXPECT_LE((lfg - lf - lg).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Assembly, VectorLoadBlocksComponents) {
    const auto v = vector(3);
    const Vec l = assemble_load(v, [](double, double) { return Point{1.0, 0.0}; });
    EXPECT_GT(l.head(4).minCoeff(), 0.0);
    EXPECT_EQ(l.tail(4), Vec::Zero(4));
}

TEST(Assembly, NonlinearPermeabilityReductions) {
    const auto v = vector(3);
    const auto q = scalar(3);
    std::mt19937_64 rng(1);
    const Vec u = oracle::random_vector(rng, v.dim());

    const Mat constant = assemble_nonlinear_permeability(q, v, u, KappaLaw::constant(2.0), 4.0);
    EXPECT_EQ(constant, assemble_laplace(q, 0.5));

    const auto kc = KappaLaw::kozeny_carman(1.0);
    const Mat at_zero = assemble_nonlinear_permeability(q, v, Vec::Zero(v.dim()), kc, 2.0);
    EXPECT_LE((at_zero - assemble_laplace(q, kc.kappa(0.0) / 2.0)).cwiseAbs().maxCoeff(), 1e-15);

    const Mat k = assemble_nonlinear_permeability(q, v, u, kc, 1.0);
    EXPECT_EQ(numkit::psd_check(k).verdict, Definiteness::positive_definite);
}

TEST(Assembly, NonlinearPermeabilityMatchesElementwiseCoefficients) {
    const auto v = vector(3);
    const auto q = scalar(3);
    std::mt19937_64 rng(9);
    const Vec u = oracle::random_vector(rng, v.dim());
    const auto kc = KappaLaw::kozeny_carman(1.0);
    std::vector<double> coeff;
    for (double d : elementwise_divergence(v, u)) coeff.push_back(kc.kappa(d));
    EXPECT_LE((assemble_nonlinear_permeability(q, v, u, kc, 1.0) - assemble_laplace_elementwise(q, coeff))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-15);
}

TEST(Assembly, NonlinearPermeabilityBoundViolation) {
    const auto v = vector(2);
    const auto q = scalar(2);
    KappaLaw bad{[](double) { return -1.0; }, 0.5, 1.0};
    EXPECT_THROW(assemble_nonlinear_permeability(q, v, Vec::Zero(2), bad, 1.0), BoundViolationError);
    KappaLaw outside{[](double) { return 5.0; }, 0.5, 1.0};
    EXPECT_THROW(assemble_nonlinear_permeability(q, v, Vec::Zero(2), outside, 1.0), BoundViolationError);
}

TEST(Assembly, ElementwiseDivergenceOfAffineField) {
    const auto v = vector(3);
    const Vec u = v.interpolate([](double x, double y) { return Point{x, y}; });
    const auto div = elementwise_divergence(v, u);
    const auto& m = v.mesh();
    ASSERT_EQ(div.size(), m.triangles.size());
    int inner = 0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        if (m.is_boundary(tri[0]) || m.is_boundary(tri[1]) || m.is_boundary(tri[2])) continue;
        EXPECT_NEAR(div[t], 2.0, 1e-14);
        ++inner;
    }
    EXPECT_EQ(inner, 2);
}

TEST(Material, Validation) {
    PoroMaterial m;
    EXPECT_NO_THROW(m.validate());
    m.rho = 0.0;
    EXPECT_NO_THROW(m.validate());
    m.alpha = 0.0;
    EXPECT_NO_THROW(m.validate());
    auto bad = m;
    bad.rho = -1.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = m;
    bad.mu = 0.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = m;
    bad.kappa = std::nan("");
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = m;
    bad.biot_M = 0.0;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(KappaLaw, KozenyCarmanBounds) {
    const auto law = KappaLaw::kozeny_carman(2.0);
    EXPECT_DOUBLE_EQ(law.lower, 1.0);
    EXPECT_DOUBLE_EQ(law.upper, 2.0);
    for (double xi : {-100.0, -1.0, 0.0, 0.3, 1e3}) {
        EXPECT_GE(law.kappa(xi), law.lower);
        EXPECT_LE(law.kappa(xi), law.upper);
    }
}

TEST(Assembly, CouplingRequiresOneMesh) {
    const FeSpace v(mesh(2), SpaceKind::vector_p1);
    const FeSpace q(mesh(2), SpaceKind::scalar_p1);
    EXPECT_THROW(assemble_divergence_coupling(v, q, 1.0), DimensionError);
}
