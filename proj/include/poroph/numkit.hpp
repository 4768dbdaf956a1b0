#pragma once

// Dense linear algebra helpers with explicit structural checks.

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string_view>
#include <utility>

namespace poroph {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class Definiteness { positive_definite, positive_semidefinite, indefinite };

std::string_view to_string(Definiteness d);

/// Spectral summary of the symmetric part of a square matrix.
///
/// For an empty matrix the extreme eigenvalues are +inf / -inf, so the
/// verdict is (vacuously) positive definite.
struct SpectralReport {
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    double max_asymmetry = 0.0;  ///< max |M_ij - M_ji|
    double tolerance = 0.0;      ///< tolerance the verdict was taken with
    Definiteness verdict = Definiteness::indefinite;

    [[nodiscard]] bool is_psd() const { return verdict != Definiteness::indefinite; }
    [[nodiscard]] bool is_pd() const { return verdict == Definiteness::positive_definite; }
};

namespace numkit {

/// 1e-10 * (1 + max |entry|).
double default_tol(const Mat& m);

double max_abs(const Mat& m);

bool is_symmetric(const Mat& m, double tol);
bool is_skew(const Mat& m, double tol);

/// max |M_ij - M_ji|
double asymmetry(const Mat& m);
/// max |M_ij + M_ji|, diagonal included
double skew_defect(const Mat& m);

/// Eigenvalue report of a matrix that is symmetric within `tol`.
/// Throws StructureError when the asymmetry exceeds `tol`.
SpectralReport psd_check(const Mat& m, double tol);
SpectralReport psd_check(const Mat& m);

/// Same report computed on the symmetric part, never throws on asymmetry.
SpectralReport spectral_report_of_sym_part(const Mat& m, double tol);

/// Principal square root of a symmetric positive definite matrix.
Mat sqrtm_spd(const Mat& m, double tol);
Mat sqrtm_spd(const Mat& m);

/// (sym, skew) = (½(M+Mᵀ), ½(M−Mᵀ))
std::pair<Mat, Mat> sym_skew_split(const Mat& m);

/// Solve M x = b by full-pivot LU. Throws SingularError when the smallest
/// pivot falls below `pivot_tol` relative to the largest one.
Vec solve(const Mat& m, const Vec& b, double pivot_tol = 1e-13);
Mat solve(const Mat& m, const Mat& b, double pivot_tol = 1e-13);

Mat block_diag(std::span<const Mat> blocks);
Mat kron(const Mat& a, const Mat& b);

/// Singular values in decreasing order.
Vec singular_values(const Mat& m);

/// Orthonormal basis (columns) of the numerical null space of `m`; singular
/// values at or below rel_tol * sigma_max count as zero.
Mat null_space(const Mat& m, double rel_tol);
long numerical_rank(const Mat& m, double rel_tol);

/// Smallest generalized eigenvalue of the symmetric pencil (a, b), b SPD.
double min_generalized_eigenvalue(const Mat& a, const Mat& b);
double max_generalized_eigenvalue(const Mat& a, const Mat& b);

void require_square(const Mat& m, std::string_view what);
void require_finite(const Mat& m, std::string_view what);

}  // namespace numkit
}  // namespace poroph
