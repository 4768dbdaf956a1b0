#pragma once

// Scenario files: a flat JSON description of mesh, material, formulation,
// sources, initial pressure and run parameters.

#include "poroph/fem.hpp"
#include "poroph/formulations.hpp"
#include "poroph/phdae.hpp"
#include "poroph/timeint.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace poroph {

/// c · x^a · y^b · φ(ω t) with φ ∈ {1, sin, cos}. `target` is the displacement
/// component (sources for f) or the network index (sources for g, pressure).
struct SourceTerm {
    enum class Kind { one, sin, cos };

    int target = 0;
    double c = 1.0;
    int a = 0;
    int b = 0;
    Kind kind = Kind::one;
    double omega = 0.0;

    [[nodiscard]] double spatial(double x, double y) const;
    [[nodiscard]] double time_factor(double t) const;
    [[nodiscard]] double time_derivative(double t) const;
};

struct KappaLawSpec {
    std::string type = "constant";  ///< "constant" or "kozeny_carman"
    double kappa0 = 1.0;
};

enum class InitialPressure { zero, random, terms };

struct Scenario {
    int mesh_n = 2;
    std::string formulation = "full";
    std::vector<fem::PoroMaterial> materials{fem::PoroMaterial{}};
    std::optional<Mat> exchange_matrix;
    double t_end = 1.0;
    int steps = 100;
    std::string integrator = "midpoint";
    std::vector<SourceTerm> source_f;
    std::vector<SourceTerm> source_g;
    InitialPressure initial_pressure = InitialPressure::zero;
    std::vector<SourceTerm> initial_pressure_terms;
    std::optional<KappaLawSpec> kappa_law;
    std::uint64_t seed = 0;
    std::optional<double> tol;
    std::optional<std::string> compare_with;
    std::vector<double> rho_sweep;

    [[nodiscard]] int networks() const { return static_cast<int>(materials.size()); }
    [[nodiscard]] std::optional<NetworkCoupling> coupling() const;
};

/// Throws ConfigError on malformed input or unknown keys.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

bool is_known_formulation(const std::string& tag);

DiscreteOperators scenario_operators(const Scenario& sc);

/// Builds the pH-DAE for a formulation tag from assembled operators.
PhDae build_formulation(const std::string& tag, const DiscreteOperators& ops,
                        const std::optional<NetworkCoupling>& coupling);

/// Nodal densities of the sources and their time derivatives.
class SourceField {
public:
    SourceField(const Scenario& sc, const DiscreteOperators& ops);

    [[nodiscard]] Vec f(double t) const;
    [[nodiscard]] Vec fdot(double t) const;
    [[nodiscard]] Vec g(double t) const;  ///< all networks stacked
    [[nodiscard]] bool zero() const { return f_terms_.empty() && g_terms_.empty(); }

private:
    struct Term {
        SourceTerm spec;
        Vec nodal;
    };
    std::vector<Term> f_terms_;
    std::vector<Term> g_terms_;
    Eigen::Index nu_ = 0;
    Eigen::Index mp_ = 0;
};

/// Input signal matching the input layout of the formulation.
InputSignal formulation_input(const std::string& tag, const DiscreteOperators& ops, const SourceField& src);

/// Initial pressure from the scenario (zero, seeded random or terms).
Vec initial_pressure(const Scenario& sc, const DiscreteOperators& ops);

/// Consistent initial state in the state layout of the formulation, derived
/// from p0 through the quasi-static consistency conditions.
Vec formulation_initial_state(const std::string& tag, const DiscreteOperators& ops,
                              const std::optional<NetworkCoupling>& coupling, const SourceField& src,
                              const Vec& p0);

}  // namespace poroph
