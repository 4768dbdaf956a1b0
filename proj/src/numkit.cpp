#include "poroph/numkit.hpp"

#include "poroph/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace poroph {

std::string_view to_string(Definiteness d) {
    switch (d) {
        case Definiteness::positive_definite: return "positive_definite";
        case Definiteness::positive_semidefinite: return "positive_semidefinite";
        case Definiteness::indefinite: return "indefinite";
    }
    return "indefinite";
}

namespace numkit {

void require_square(const Mat& m, std::string_view what) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

void require_finite(const Mat& m, std::string_view what) {
    if (!m.allFinite()) throw Error(std::string(what) + ": non-finite entry");
}

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double default_tol(const Mat& m) { return 1e-10 * (1.0 + max_abs(m)); }

double asymmetry(const Mat& m) {
    require_square(m, "asymmetry");
    return m.size() == 0 ? 0.0 : (m - m.transpose()).cwiseAbs().maxCoeff();
}

double skew_defect(const Mat& m) {
    require_square(m, "skew_defect");
    return m.size() == 0 ? 0.0 : (m + m.transpose()).cwiseAbs().maxCoeff();
}

bool is_symmetric(const Mat& m, double tol) { return m.rows() == m.cols() && asymmetry(m) <= tol; }

bool is_skew(const Mat& m, double tol) { return m.rows() == m.cols() && skew_defect(m) <= tol; }

SpectralReport spectral_report_of_sym_part(const Mat& m, double tol) {
    require_square(m, "spectral report");
    SpectralReport rep;
    rep.tolerance = tol;
    rep.max_asymmetry = asymmetry(m);
    if (m.rows() == 0) {
        rep.min_eigenvalue = std::numeric_limits<double>::infinity();
        rep.max_eigenvalue = -std::numeric_limits<double>::infinity();
        rep.verdict = Definiteness::positive_definite;
        return rep;
    }
    const Mat sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("psd_check: eigenvalue iteration failed");
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    rep.max_eigenvalue = es.eigenvalues().maxCoeff();
    if (rep.min_eigenvalue > tol) {
        rep.verdict = Definiteness::positive_definite;
    } else if (rep.min_eigenvalue >= -tol) {
        rep.verdict = Definiteness::positive_semidefinite;
    } else {
        rep.verdict = Definiteness::indefinite;
    }
    return rep;
}

SpectralReport psd_check(const Mat& m, double tol) {
    require_square(m, "psd_check");
    const double asym = asymmetry(m);
    if (asym > tol) {
        throw StructureError("psd_check: matrix is not symmetric (asymmetry " +
                                 std::to_string(asym) + "); symmetrize explicitly",
                             asym);
    }
    return spectral_report_of_sym_part(m, tol);
}

SpectralReport psd_check(const Mat& m) { return psd_check(m, default_tol(m)); }

Mat sqrtm_spd(const Mat& m, double tol) {
    const SpectralReport rep = psd_check(m, tol);
    if (!rep.is_pd()) {
        throw StructureError("sqrtm_spd: matrix is not positive definite", rep.min_eigenvalue);
    }
    if (m.rows() == 0) return m;
    const Mat sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym);
    const Vec root = es.eigenvalues().cwiseSqrt();
    Mat s = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
    s = 0.5 * (s + s.transpose()).eval();
    const double err = (s * s - m).norm();
    if (err > tol * std::max(1.0, m.norm())) {
        throw Error("sqrtm_spd: square root residual " + std::to_string(err) + " above tolerance");
    }
    return s;
}

Mat sqrtm_spd(const Mat& m) { return sqrtm_spd(m, default_tol(m)); }

std::pair<Mat, Mat> sym_skew_split(const Mat& m) {
    require_square(m, "sym_skew_split");
    Mat sym = 0.5 * (m + m.transpose());
    Mat skew = 0.5 * (m - m.transpose());
    return {std::move(sym), std::move(skew)};
}

namespace {

Eigen::FullPivLU<Mat> factor_checked(const Mat& m, double pivot_tol) {
    require_square(m, "solve");
    Eigen::FullPivLU<Mat> lu(m);
    lu.setThreshold(pivot_tol);
    if (!lu.isInvertible()) {
        throw SingularError("solve: matrix is numerically singular (rank " +
                            std::to_string(lu.rank()) + " of " + std::to_string(m.rows()) + ")");
    }
    return lu;
}

}  // namespace

Vec solve(const Mat& m, const Vec& b, double pivot_tol) {
    if (b.size() != m.rows()) throw DimensionError("solve: right-hand side length mismatch");
    if (m.rows() == 0) return Vec(0);
    return factor_checked(m, pivot_tol).solve(b);
}

Mat solve(const Mat& m, const Mat& b, double pivot_tol) {
    if (b.rows() != m.rows()) throw DimensionError("solve: right-hand side rows mismatch");
    if (m.rows() == 0) return Mat(0, b.cols());
    return factor_checked(m, pivot_tol).solve(b);
}

Mat block_diag(std::span<const Mat> blocks) {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    Mat out = Mat::Zero(rows, cols);
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Vec singular_values(const Mat& m) {
    if (m.size() == 0) return Vec(0);
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues();
}

Mat null_space(const Mat& m, double rel_tol) {
    if (m.cols() == 0) return Mat(0, 0);
    if (m.rows() == 0) return Mat::Identity(m.cols(), m.cols());
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    const Vec& s = svd.singularValues();
    const double cutoff = rel_tol * (s.size() ? s(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff) ++rank;
    }
    return svd.matrixV().rightCols(m.cols() - rank);
}

long numerical_rank(const Mat& m, double rel_tol) {
    const Vec s = singular_values(m);
    if (s.size() == 0) return 0;
    const double cutoff = rel_tol * s(0);
    long rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff) ++rank;
    }
    return rank;
}

namespace {

Vec generalized_eigenvalues(const Mat& a, const Mat& b) {
    require_square(a, "generalized eigenvalues");
    if (a.rows() != b.rows() || b.rows() != b.cols()) {
        throw DimensionError("generalized eigenvalues: pencil dimension mismatch");
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()),
                                                     0.5 * (b + b.transpose()),
                                                     Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) {
        throw SingularError("generalized eigenvalues: right-hand matrix is not positive definite");
    }
    return es.eigenvalues();
}

}  // namespace

double min_generalized_eigenvalue(const Mat& a, const Mat& b) {
    if (a.rows() == 0) return std::numeric_limits<double>::infinity();
    return generalized_eigenvalues(a, b).minCoeff();
}

double max_generalized_eigenvalue(const Mat& a, const Mat& b) {
    if (a.rows() == 0) return 0.0;
    return generalized_eigenvalues(a, b).maxCoeff();
}

}  // namespace numkit
}  // namespace poroph
