#include "poroph/phdae.hpp"

#include "poroph/error.hpp"
#include "poroph/matrix_market.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace poroph {

using json = nlohmann::json;

namespace {

void check_dims(const Mat& E, const Mat& J, const Mat& R, const Mat& G) {
    const auto n = E.rows();
    if (E.cols() != n || J.rows() != n || J.cols() != n || R.rows() != n || R.cols() != n ||
        G.rows() != n) {
        throw DimensionError("PhDae: E, J, R must be n x n and G must have n rows");
    }
    numkit::require_finite(E, "PhDae E");
    numkit::require_finite(J, "PhDae J");
    numkit::require_finite(R, "PhDae R");
    numkit::require_finite(G, "PhDae G");
}

void check_labels(const std::vector<BlockLabel>& labels, Eigen::Index dim, const char* what) {
    for (const auto& b : labels) {
        if (b.offset < 0 || b.size < 0 || b.offset + b.size > dim) {
            throw DimensionError(std::string("PhDae: ") + what + " block '" + b.name + "' out of range");
        }
    }
}

}  // namespace

PhDae::PhDae(Mat E, Mat J, Mat R, Mat G, std::vector<BlockLabel> sb, std::vector<BlockLabel> ib)
    : E_(std::move(E)), J_(std::move(J)), R_(std::move(R)), G_(std::move(G)),
      state_blocks_(std::move(sb)), input_blocks_(std::move(ib)) {
    check_dims(E_, J_, R_, G_);
    check_labels(state_blocks_, E_.rows(), "state");
    check_labels(input_blocks_, G_.cols(), "input");
}

PhDae PhDae::unchecked(Mat E, Mat J, Mat R, Mat G, std::vector<BlockLabel> state_blocks,
                       std::vector<BlockLabel> input_blocks) {
    return PhDae(std::move(E), std::move(J), std::move(R), std::move(G), std::move(state_blocks),
                 std::move(input_blocks));
}

PhDae PhDae::create(Mat E, Mat J, Mat R, Mat G, std::vector<BlockLabel> state_blocks,
                    std::vector<BlockLabel> input_blocks, std::optional<double> tol) {
    PhDae sys(std::move(E), std::move(J), std::move(R), std::move(G), std::move(state_blocks),
              std::move(input_blocks));
    const StructureReport rep = validate_structure(sys, tol);
    if (!rep.verdict) {
        if (!rep.e_report.is_psd() || rep.e_report.max_asymmetry > rep.e_report.tolerance) {
            throw StructureError("PhDae: E is not symmetric positive semidefinite",
                                 rep.e_report.min_eigenvalue);
        }
        if (rep.j_skew_defect > rep.j_tolerance) {
            throw StructureError("PhDae: J is not skew-symmetric", rep.j_skew_defect);
        }
        throw StructureError("PhDae: R is not symmetric positive semidefinite",
                             rep.r_report.min_eigenvalue);
    }
    return sys;
}

const BlockLabel* PhDae::find_state_block(const std::string& name) const {
    const auto it = std::find_if(state_blocks_.begin(), state_blocks_.end(),
                                 [&](const BlockLabel& b) { return b.name == name; });
    return it == state_blocks_.end() ? nullptr : &*it;
}

StructureReport validate_structure(const PhDae& sys, std::optional<double> tol) {
    StructureReport rep;
    const double tol_e = tol.value_or(numkit::default_tol(sys.E()));
    const double tol_r = tol.value_or(numkit::default_tol(sys.R()));
    rep.j_tolerance = tol.value_or(numkit::default_tol(sys.J()));

    rep.e_report = numkit::spectral_report_of_sym_part(sys.E(), tol_e);
    rep.r_report = numkit::spectral_report_of_sym_part(sys.R(), tol_r);
    rep.j_skew_defect = numkit::skew_defect(sys.J());
    // With P = N = 0 the dissipation matrix is diag(R, 0): its spectrum is
    // that of R together with m zeros.
    rep.w_report = rep.r_report;
    if (sys.input_dim() > 0) {
        rep.w_report.min_eigenvalue = std::min(rep.w_report.min_eigenvalue, 0.0);
        rep.w_report.max_eigenvalue = std::max(rep.w_report.max_eigenvalue, 0.0);
        if (rep.w_report.verdict == Definiteness::positive_definite) {
            rep.w_report.verdict = Definiteness::positive_semidefinite;
        }
    }

    const bool e_ok = rep.e_report.max_asymmetry <= tol_e && rep.e_report.is_psd();
    const bool r_ok = rep.r_report.max_asymmetry <= tol_r && rep.r_report.is_psd();
    const bool j_ok = rep.j_skew_defect <= rep.j_tolerance;
    rep.verdict = rep.dims_ok && e_ok && r_ok && j_ok && rep.w_report.is_psd();
    return rep;
}

double hamiltonian(const PhDae& sys, const Vec& z) {
    if (z.size() != sys.state_dim()) throw DimensionError("hamiltonian: state length mismatch");
    return 0.5 * z.dot(sys.E() * z);
}

Vec output(const PhDae& sys, const Vec& z) {
    if (z.size() != sys.state_dim()) throw DimensionError("output: state length mismatch");
    return sys.G().transpose() * z;
}

Mat dissipation_matrix(const PhDae& sys) {
    const auto n = sys.state_dim();
    Mat w = Mat::Zero(n + sys.input_dim(), n + sys.input_dim());
    w.topLeftCorner(n, n) = sys.R();
    return w;
}

double power_balance_defect(const PhDae& sys, const Vec& z, const Vec& v, const Vec& zdot) {
    if (z.size() != sys.state_dim() || zdot.size() != sys.state_dim() || v.size() != sys.input_dim()) {
        throw DimensionError("power balance: vector length mismatch");
    }
    const double dh = z.dot(sys.E() * zdot);
    const double supplied = output(sys, z).dot(v);
    const double dissipated = z.dot(sys.R() * z);
    return std::abs(dh - (-dissipated + supplied));
}

double power_balance_residual(const PhDae& sys, const Vec& z, const Vec& v, const Vec& zdot,
                              double tol) {
    if (z.size() != sys.state_dim() || zdot.size() != sys.state_dim() || v.size() != sys.input_dim()) {
        throw DimensionError("power balance: vector length mismatch");
    }
    const Vec lhs = sys.E() * zdot;
    const Vec rhs = sys.drift() * z + sys.G() * v;
    const double scale = 1.0 + lhs.lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>();
    const double residual = (lhs - rhs).lpNorm<Eigen::Infinity>();
    if (residual > tol * scale) {
        throw InconsistentStateError("power balance: (z, v, zdot) does not satisfy the dynamics (residual " +
                                     std::to_string(residual) + ")");
    }
    return power_balance_defect(sys, z, v, zdot);
}

void save_phdae(const PhDae& sys, const std::filesystem::path& dir, std::optional<double> tol_used) {
    std::filesystem::create_directories(dir);
    mm::write_coordinate_file(dir / "E.mtx", sys.E());
    mm::write_coordinate_file(dir / "J.mtx", sys.J());
    mm::write_coordinate_file(dir / "R.mtx", sys.R());
    mm::write_coordinate_file(dir / "G.mtx", sys.G());

    json manifest;
    manifest["state_dim"] = sys.state_dim();
    manifest["input_dim"] = sys.input_dim();
    if (tol_used) {
        manifest["tolerance"] = *tol_used;
    } else {
        manifest["tolerance"] = nullptr;
    }
    const auto blocks = [](const std::vector<BlockLabel>& labels) {
        json arr = json::array();
        for (const auto& b : labels) arr.push_back({{"name", b.name}, {"offset", b.offset}, {"size", b.size}});
        return arr;
    };
    manifest["state_blocks"] = blocks(sys.state_blocks());
    manifest["input_blocks"] = blocks(sys.input_blocks());
    if (sys.expected_index()) manifest["expected_index"] = *sys.expected_index();
    manifest["files"] = {{"E", "E.mtx"}, {"J", "J.mtx"}, {"R", "R.mtx"}, {"G", "G.mtx"}};

    std::ofstream os(dir / "manifest.json");
    if (!os) throw IoError("cannot write manifest in " + dir.string());
    os << manifest.dump(2) << '\n';
}

PhDae load_phdae(const std::filesystem::path& dir) {
    std::ifstream is(dir / "manifest.json");
    if (!is) throw IoError("missing manifest.json in " + dir.string());
    json manifest;
    try {
        is >> manifest;
    } catch (const json::exception& e) {
        throw IoError(std::string("manifest.json: ") + e.what());
    }
    const auto blocks = [](const json& arr) {
        std::vector<BlockLabel> out;
        for (const auto& b : arr) {
            out.push_back({b.at("name").get<std::string>(), b.at("offset").get<Eigen::Index>(),
                           b.at("size").get<Eigen::Index>()});
        }
        return out;
    };
    Mat E = mm::read_file(dir / "E.mtx");
    Mat J = mm::read_file(dir / "J.mtx");
    Mat R = mm::read_file(dir / "R.mtx");
    Mat G = mm::read_file(dir / "G.mtx");
    if (E.rows() != manifest.at("state_dim").get<Eigen::Index>() ||
        G.cols() != manifest.at("input_dim").get<Eigen::Index>()) {
        throw IoError("manifest dimensions disagree with the stored matrices");
    }
    std::optional<double> tol;
    if (manifest.contains("tolerance") && manifest["tolerance"].is_number()) {
        tol = manifest["tolerance"].get<double>();
    }
    PhDae sys = PhDae::create(std::move(E), std::move(J), std::move(R), std::move(G),
                              blocks(manifest.value("state_blocks", json::array())),
                              blocks(manifest.value("input_blocks", json::array())), tol);
    if (manifest.contains("expected_index")) sys.set_expected_index(manifest["expected_index"].get<int>());
    return sys;
}

}  // namespace poroph
