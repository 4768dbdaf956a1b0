#pragma once

// Linear port-Hamiltonian descriptor systems without feedthrough:
//
//     E ż = (J − R) z + G v,     y = Gᵀ z,     H(z) = ½ zᵀ E z
//
// with E, R symmetric positive semidefinite and J skew-symmetric.

#include "poroph/numkit.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace poroph {

/// Named contiguous slice of the state (or input) vector.
struct BlockLabel {
    std::string name;
    Eigen::Index offset = 0;
    Eigen::Index size = 0;
};

struct StructureReport {
    SpectralReport e_report;
    SpectralReport r_report;
    double j_skew_defect = 0.0;
    double j_tolerance = 0.0;
    SpectralReport w_report;  ///< dissipation matrix diag(R, 0)
    bool dims_ok = true;
    bool verdict = false;
};

class PhDae {
public:
    /// Validated construction; throws StructureError when the pH conditions
    /// fail at `tol` (scale-aware default per matrix when omitted).
    static PhDae create(Mat E, Mat J, Mat R, Mat G, std::vector<BlockLabel> state_blocks = {},
                        std::vector<BlockLabel> input_blocks = {},
                        std::optional<double> tol = std::nullopt);

    /// Skips the structure checks (dimensions are still enforced). Only for
    /// constructions whose structure is reported on rather than guaranteed.
    static PhDae unchecked(Mat E, Mat J, Mat R, Mat G, std::vector<BlockLabel> state_blocks = {},
                           std::vector<BlockLabel> input_blocks = {});

    [[nodiscard]] const Mat& E() const { return E_; }
    [[nodiscard]] const Mat& J() const { return J_; }
    [[nodiscard]] const Mat& R() const { return R_; }
    [[nodiscard]] const Mat& G() const { return G_; }
    [[nodiscard]] Eigen::Index state_dim() const { return E_.rows(); }
    [[nodiscard]] Eigen::Index input_dim() const { return G_.cols(); }
    [[nodiscard]] const std::vector<BlockLabel>& state_blocks() const { return state_blocks_; }
    [[nodiscard]] const std::vector<BlockLabel>& input_blocks() const { return input_blocks_; }
    [[nodiscard]] const BlockLabel* find_state_block(const std::string& name) const;

    /// J − R
    [[nodiscard]] Mat drift() const { return J_ - R_; }

    /// Differentiation index the builder knows this system to have, if any.
    [[nodiscard]] std::optional<int> expected_index() const { return expected_index_; }
    PhDae& set_expected_index(std::optional<int> index) {
        expected_index_ = index;
        return *this;
    }

private:
    PhDae(Mat E, Mat J, Mat R, Mat G, std::vector<BlockLabel> sb, std::vector<BlockLabel> ib);

    Mat E_, J_, R_, G_;
    std::vector<BlockLabel> state_blocks_;
    std::vector<BlockLabel> input_blocks_;
    std::optional<int> expected_index_;
};

StructureReport validate_structure(const PhDae& sys, std::optional<double> tol = std::nullopt);

/// ½ zᵀ E z
double hamiltonian(const PhDae& sys, const Vec& z);

/// Gᵀ z
Vec output(const PhDae& sys, const Vec& z);

/// diag(R, 0_m)
Mat dissipation_matrix(const PhDae& sys);

/// |zᵀ E ż − (−zᵀ R z + yᵀ v)| without checking that ż solves the dynamics.
double power_balance_defect(const PhDae& sys, const Vec& z, const Vec& v, const Vec& zdot);

/// Same quantity, after verifying ‖E ż − (J − R) z − G v‖ ≤ tol · scale.
/// Throws InconsistentStateError otherwise.
double power_balance_residual(const PhDae& sys, const Vec& z, const Vec& v, const Vec& zdot,
                              double tol = 1e-10);

/// Directory layout: E.mtx, J.mtx, R.mtx, G.mtx and manifest.json.
/// `tol_used` is recorded in the manifest; nullopt means the scale-aware default.
void save_phdae(const PhDae& sys, const std::filesystem::path& dir,
                std::optional<double> tol_used = std::nullopt);
PhDae load_phdae(const std::filesystem::path& dir);

}  // namespace poroph
