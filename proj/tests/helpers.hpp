#pragma once

#include "oracles.hpp"

#include "poroph/fem.hpp"
#include "poroph/formulations.hpp"

#include <memory>
#include <random>
#include <vector>

namespace testing_support {

inline std::shared_ptr<const poroph::fem::Mesh2D> mesh(int n) {
    return std::make_shared<const poroph::fem::Mesh2D>(poroph::fem::build_unit_square_mesh(n));
}

inline poroph::fem::PoroMaterial material(double rho = 1.0, double alpha = 1.0) {
    poroph::fem::PoroMaterial m;
    m.rho = rho;
    m.mu = 1.0;
    m.lambda = 2.0;
    m.alpha = alpha;
    m.biot_M = 2.0;
    m.kappa = 0.5;
    m.nu = 1.0;
    return m;
}

inline poroph::DiscreteOperators two_field(int n, double rho = 1.0, double alpha = 1.0) {
    return poroph::assemble_two_field(mesh(n), material(rho, alpha));
}

// m networks with distinct α and κ, shared elastic data.
inline std::vector<poroph::fem::PoroMaterial> network_materials(int m, double rho = 1.0) {
    std::vector<poroph::fem::PoroMaterial> mats;
    for (int i = 0; i < m; ++i) {
        auto mat = material(rho, 0.5 + 0.25 * i);
        mat.kappa = 0.3 + 0.2 * i;
        mat.nu = 1.0 + 0.1 * i;
        mats.push_back(mat);
    }
    return mats;
}

// Off-diagonal rates in [0, scale), diagonal from the zero row-sum rule.
inline poroph::NetworkCoupling random_coupling(std::mt19937_64& rng, int m, double scale, bool symmetric) {
    std::uniform_real_distribution<double> d(0.0, scale);
    poroph::Mat rates = poroph::Mat::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) rates(i, j) = d(rng);
    if (symmetric) rates = (0.5 * (rates + rates.transpose())).eval();
    return poroph::NetworkCoupling::from_rates(rates);
}

inline poroph::DiscreteOperators network(int n, int m, const poroph::NetworkCoupling& b, double rho = 1.0) {
    const auto mats = network_materials(m, rho);
    return poroph::assemble_network(mesh(n), mats, b);
}

}  // namespace testing_support
