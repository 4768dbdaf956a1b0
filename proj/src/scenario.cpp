#include "poroph/scenario.hpp"

#include "poroph/dae_analysis.hpp"
#include "poroph/error.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace poroph {

using json = nlohmann::json;

namespace {

const std::array<const char*, 6> kFormulations{"full", "sqrt", "quasi_static", "alt_qs", "network",
                                               "schur_parabolic"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

fem::PoroMaterial parse_material(const json& j) {
    if (!j.is_object()) throw ConfigError("material must be an object");
    reject_unknown(j, {"rho", "mu", "lambda", "alpha", "biot_M", "kappa", "nu"}, "material");
    fem::PoroMaterial m;
    const auto read = [&](const char* key, double& field) {
        if (j.contains(key)) field = get<double>(j, key, "material");
    };
    read("rho", m.rho);
    read("mu", m.mu);
    read("lambda", m.lambda);
    read("alpha", m.alpha);
    read("biot_M", m.biot_M);
    read("kappa", m.kappa);
    read("nu", m.nu);
    m.validate();
    return m;
}

SourceTerm parse_term(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": each term must be an object");
    reject_unknown(j, {"target", "c", "a", "b", "kind", "omega"}, where);
    SourceTerm t;
    if (j.contains("target")) t.target = get<int>(j, "target", where);
    if (j.contains("c")) t.c = get<double>(j, "c", where);
    if (j.contains("a")) t.a = get<int>(j, "a", where);
    if (j.contains("b")) t.b = get<int>(j, "b", where);
    if (j.contains("omega")) t.omega = get<double>(j, "omega", where);
    if (j.contains("kind")) {
        const auto k = get<std::string>(j, "kind", where);
        if (k == "1" || k == "one" || k == "const") {
            t.kind = SourceTerm::Kind::one;
        } else if (k == "sin") {
            t.kind = SourceTerm::Kind::sin;
        } else if (k == "cos") {
            t.kind = SourceTerm::Kind::cos;
        } else {
            throw ConfigError(where + ": kind must be one of 1, sin, cos");
        }
    }
    if (t.a < 0 || t.b < 0) throw ConfigError(where + ": exponents must be >= 0");
    if (!std::isfinite(t.c) || !std::isfinite(t.omega)) throw ConfigError(where + ": coefficients must be finite");
    return t;
}

std::vector<SourceTerm> parse_terms(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + " must be an array of terms");
    std::vector<SourceTerm> out;
    for (const auto& t : j) out.push_back(parse_term(t, where));
    return out;
}

Mat parse_matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a non-empty array of rows");
    const auto rows = j.size();
    const auto cols = j.front().is_array() ? j.front().size() : 0;
    Mat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) throw ConfigError(where + ": rows must have equal length");
        for (std::size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number()) throw ConfigError(where + ": entries must be numbers");
            m(i, k) = j[i][k].get<double>();
        }
    }
    return m;
}

Vec nodal_values(const fem::FeSpace& space, const SourceTerm& t) {
    Vec out = Vec::Zero(space.dim());
    const auto& mesh = space.mesh();
    for (int node : space.interior_nodes()) {
        const auto& p = mesh.nodes[node];
        out(space.dof(node, space.kind() == fem::SpaceKind::vector_p1 ? t.target : 0)) = t.spatial(p[0], p[1]);
    }
    return out;
}

}  // namespace

double SourceTerm::spatial(double x, double y) const { return c * std::pow(x, a) * std::pow(y, b); }

double SourceTerm::time_factor(double t) const {
    switch (kind) {
    case Kind::one: return 1.0;
    case Kind::sin: return std::sin(omega * t);
    case Kind::cos: return std::cos(omega * t);
    }
    return 0.0;
}

double SourceTerm::time_derivative(double t) const {
    switch (kind) {
    case Kind::one: return 0.0;
    case Kind::sin: return omega * std::cos(omega * t);
    case Kind::cos: return -omega * std::sin(omega * t);
    }
    return 0.0;
}

std::optional<NetworkCoupling> Scenario::coupling() const {
    if (exchange_matrix) return NetworkCoupling(*exchange_matrix);
    if (networks() > 1) return NetworkCoupling::zero(networks());
    return std::nullopt;
}

bool is_known_formulation(const std::string& tag) {
    for (const char* f : kFormulations) {
        if (tag == f) return true;
    }
    return false;
}

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
    reject_unknown(j,
                   {"mesh_n", "formulation", "material", "materials", "exchange_matrix", "t_end", "steps",
                    "integrator", "source_f", "source_g", "initial_pressure", "kappa_law", "seed", "tol",
                    "compare_with", "rho_sweep", "description"},
                   "scenario");

    Scenario sc;
    const std::string where = "scenario";
    if (j.contains("mesh_n")) sc.mesh_n = get<int>(j, "mesh_n", where);
    if (j.contains("formulation")) sc.formulation = get<std::string>(j, "formulation", where);
    if (j.contains("material") && j.contains("materials")) {
        throw ConfigError("scenario: give either 'material' or 'materials', not both");
    }
    if (j.contains("material")) sc.materials = {parse_material(j["material"])};
    if (j.contains("materials")) {
        if (!j["materials"].is_array() || j["materials"].empty()) {
            throw ConfigError("scenario.materials must be a non-empty array");
        }
        sc.materials.clear();
        for (const auto& m : j["materials"]) sc.materials.push_back(parse_material(m));
    }
    if (j.contains("exchange_matrix") && !j["exchange_matrix"].is_null()) {
        sc.exchange_matrix = parse_matrix(j["exchange_matrix"], "scenario.exchange_matrix");
    }
    if (j.contains("t_end")) sc.t_end = get<double>(j, "t_end", where);
    if (j.contains("steps")) sc.steps = get<int>(j, "steps", where);
    if (j.contains("integrator")) sc.integrator = get<std::string>(j, "integrator", where);
    if (j.contains("source_f")) sc.source_f = parse_terms(j["source_f"], "scenario.source_f");
    if (j.contains("source_g")) sc.source_g = parse_terms(j["source_g"], "scenario.source_g");
    if (j.contains("initial_pressure")) {
        const auto& ip = j["initial_pressure"];
        if (ip.is_string()) {
            const auto s = ip.get<std::string>();
            if (s == "zero") {
                sc.initial_pressure = InitialPressure::zero;
            } else if (s == "random") {
                sc.initial_pressure = InitialPressure::random;
            } else {
                throw ConfigError("scenario.initial_pressure must be \"zero\", \"random\" or a term list");
            }
        } else {
            sc.initial_pressure = InitialPressure::terms;
            sc.initial_pressure_terms = parse_terms(ip, "scenario.initial_pressure");
        }
    }
    if (j.contains("kappa_law") && !j["kappa_law"].is_null()) {
        const auto& k = j["kappa_law"];
        if (!k.is_object()) throw ConfigError("scenario.kappa_law must be an object");
        reject_unknown(k, {"type", "kappa0"}, "scenario.kappa_law");
        KappaLawSpec spec;
        if (k.contains("type")) spec.type = get<std::string>(k, "type", "kappa_law");
        if (k.contains("kappa0")) spec.kappa0 = get<double>(k, "kappa0", "kappa_law");
        if (spec.type != "constant" && spec.type != "kozeny_carman") {
            throw ConfigError("scenario.kappa_law.type must be constant or kozeny_carman");
        }
        if (!(spec.kappa0 > 0.0) || !std::isfinite(spec.kappa0)) throw ConfigError("kappa_law.kappa0 must be > 0");
        sc.kappa_law = spec;
    }
    if (j.contains("seed")) {
        const auto s = get<long long>(j, "seed", where);
        if (s < 0) throw ConfigError("scenario.seed must be >= 0");
        sc.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("tol") && !j["tol"].is_null()) sc.tol = get<double>(j, "tol", where);
    if (j.contains("compare_with") && !j["compare_with"].is_null()) {
        sc.compare_with = get<std::string>(j, "compare_with", where);
    }
    if (j.contains("rho_sweep")) {
        try {
            sc.rho_sweep = j["rho_sweep"].get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("scenario.rho_sweep: ") + e.what());
        }
    }

    // consistency of the fields
    if (sc.mesh_n < 1) throw ConfigError("scenario.mesh_n must be >= 1");
    if (!is_known_formulation(sc.formulation)) throw ConfigError("unknown formulation '" + sc.formulation + "'");
    if (!(sc.t_end > 0.0) || !std::isfinite(sc.t_end)) throw ConfigError("scenario.t_end must be > 0");
    if (sc.steps < 1) throw ConfigError("scenario.steps must be >= 1");
    if (sc.integrator != "midpoint" && sc.integrator != "euler") {
        throw ConfigError("scenario.integrator must be midpoint or euler");
    }
    if (sc.tol && !(*sc.tol > 0.0)) throw ConfigError("scenario.tol must be > 0");
    const int m = sc.networks();
    if (sc.exchange_matrix) {
        if (sc.exchange_matrix->rows() != m || sc.exchange_matrix->cols() != m) {
            throw ConfigError("exchange_matrix must be m x m with m the number of materials");
        }
        (void)NetworkCoupling(*sc.exchange_matrix);
    }
    if (sc.formulation == "network" && !sc.exchange_matrix) {
        throw ConfigError("formulation network requires exchange_matrix");
    }
    if ((sc.formulation == "full" || sc.formulation == "sqrt") && m != 1) {
        throw ConfigError("formulation " + sc.formulation + " takes a single material");
    }
    if (sc.formulation == "alt_qs" && m > 1 && sc.exchange_matrix &&
        *sc.exchange_matrix != sc.exchange_matrix->transpose()) {
        throw ConfigError("formulation alt_qs requires a symmetric exchange_matrix");
    }
    if (sc.kappa_law && sc.formulation != "full") {
        throw ConfigError("kappa_law is supported for the full formulation only");
    }
    for (const auto& t : sc.source_f) {
        if (t.target < 0 || t.target > 1) throw ConfigError("source_f target must be 0 (x) or 1 (y)");
    }
    for (const auto& t : sc.source_g) {
        if (t.target < 0 || t.target >= m) throw ConfigError("source_g target must be a network index");
    }
    for (const auto& t : sc.initial_pressure_terms) {
        if (t.target < 0 || t.target >= m) throw ConfigError("initial_pressure target must be a network index");
    }
    if (sc.compare_with) {
        const auto& c = *sc.compare_with;
        if (c != "coupled" && !is_known_formulation(c)) throw ConfigError("unknown compare_with '" + c + "'");
    }
    for (double r : sc.rho_sweep) {
        if (!(r > 0.0)) throw ConfigError("rho_sweep entries must be > 0");
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open scenario " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_scenario(ss.str());
}

DiscreteOperators scenario_operators(const Scenario& sc) {
    auto mesh = std::make_shared<const fem::Mesh2D>(fem::build_unit_square_mesh(sc.mesh_n));
    const auto coupling = sc.coupling();
    return assemble_network(mesh, sc.materials, coupling ? *coupling : NetworkCoupling::zero(1));
}

PhDae build_formulation(const std::string& tag, const DiscreteOperators& ops,
                        const std::optional<NetworkCoupling>& coupling) {
    if (tag == "full") return build_full_first_order(ops);
    if (tag == "sqrt") return build_sqrt_formulation(ops);
    if (tag == "quasi_static") return build_quasi_static(ops, coupling);
    if (tag == "alt_qs") return build_alternative_qs(ops, coupling);
    if (tag == "network") return build_network_ph(ops, coupling ? *coupling : NetworkCoupling::zero(ops.networks()));
    if (tag == "schur_parabolic") return build_schur_parabolic(ops, coupling);
    throw ConfigError("unknown formulation '" + tag + "'");
}

SourceField::SourceField(const Scenario& sc, const DiscreteOperators& ops)
    : nu_(ops.u_dim()), mp_(ops.networks() * ops.p_dim()) {
    for (const auto& t : sc.source_f) f_terms_.push_back({t, nodal_values(*ops.vspace, t)});
    const auto np = ops.p_dim();
    for (const auto& t : sc.source_g) {
        Vec v = Vec::Zero(mp_);
        v.segment(t.target * np, np) = nodal_values(*ops.qspace, t);
        g_terms_.push_back({t, std::move(v)});
    }
}

Vec SourceField::f(double t) const {
    Vec v = Vec::Zero(nu_);
    for (const auto& term : f_terms_) v += term.spec.time_factor(t) * term.nodal;
    return v;
}

Vec SourceField::fdot(double t) const {
    Vec v = Vec::Zero(nu_);
    for (const auto& term : f_terms_) v += term.spec.time_derivative(t) * term.nodal;
    return v;
}

Vec SourceField::g(double t) const {
    Vec v = Vec::Zero(mp_);
    for (const auto& term : g_terms_) v += term.spec.time_factor(t) * term.nodal;
    return v;
}

InputSignal formulation_input(const std::string& tag, const DiscreteOperators& ops, const SourceField& src) {
    if (src.zero()) return {};
    const auto nu = ops.u_dim();
    const auto mp = ops.networks() * ops.p_dim();
    if (tag == "schur_parabolic") {
        return [src, nu, mp](double t) {
            Vec v(mp + nu);
            v << src.g(t), src.fdot(t);
            return v;
        };
    }
    return [src, nu, mp](double t) {
        Vec v(nu + mp);
        v << src.f(t), src.g(t);
        return v;
    };
}

Vec initial_pressure(const Scenario& sc, const DiscreteOperators& ops) {
    const auto np = ops.p_dim();
    const auto mp = ops.networks() * np;
    Vec p = Vec::Zero(mp);
    switch (sc.initial_pressure) {
    case InitialPressure::zero: break;
    case InitialPressure::random: {
        std::mt19937_64 rng(sc.seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (Eigen::Index i = 0; i < mp; ++i) p(i) = dist(rng);
        break;
    }
    case InitialPressure::terms:
        for (const auto& t : sc.initial_pressure_terms) {
            p.segment(t.target * np, np) += t.time_factor(0.0) * nodal_values(*ops.qspace, t);
        }
        break;
    }
    return p;
}

Vec formulation_initial_state(const std::string& tag, const DiscreteOperators& ops,
                              const std::optional<NetworkCoupling>& coupling, const SourceField& src,
                              const Vec& p0) {
    if (tag == "schur_parabolic") return p0;
    const Vec f0 = ops.M_u * src.f(0.0);
    const Vec fdot0 = ops.M_u * src.fdot(0.0);
    const Vec g0 = ops.pressure_input_block() * src.g(0.0);
    const ConsistentState cs = consistent_initialization(ops, p0, f0, fdot0, g0, coupling);
    const auto nu = ops.u_dim();
    const auto mp = p0.size();

    if (tag == "alt_qs") {
        const NetworkCoupling b = coupling ? *coupling : NetworkCoupling::zero(ops.networks());
        const Mat K = ops.networks() > 1 ? ops.exchange_stiffness_sym(b) : ops.pressure_stiffness_block();
        const Vec q0 = numkit::solve(K, Vec(ops.stacked_coupling() * cs.u0 + ops.pressure_mass_block() * p0));
        Vec z(nu + 2 * mp);
        z << cs.u0, p0, q0;
        return z;
    }
    Vec z(2 * nu + mp);
    if (tag == "sqrt") {
        z << cs.w0, numkit::sqrtm_spd(ops.K_A) * cs.u0, p0;
    } else {
        z << cs.w0, cs.u0, p0;
    }
    return z;
}

}  // namespace poroph
