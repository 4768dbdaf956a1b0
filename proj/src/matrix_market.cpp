#include "poroph/matrix_market.hpp"

#include "poroph/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace poroph::mm {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

void set_precision(std::ostream& os) { os << std::setprecision(17); }

bool next_data_line(std::istream& is, std::string& line) {
    while (std::getline(is, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '%') continue;
        return true;
    }
    return false;
}

}  // namespace

void write_coordinate(std::ostream& os, const Mat& m) {
    set_precision(os);
    long nnz = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0.0) ++nnz;
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0.0) os << i + 1 << ' ' << j + 1 << ' ' << m(i, j) << '\n';
}

void write_array(std::ostream& os, const Mat& m) {
    set_precision(os);
    os << "%%MatrixMarket matrix array real general\n";
    os << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) os << m(i, j) << '\n';
}

Mat read(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw IoError("MatrixMarket: empty stream");
    std::istringstream hs(lower(header));
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%matrixmarket" || object != "matrix") {
        throw IoError("MatrixMarket: missing '%%MatrixMarket matrix' banner");
    }
    if (field != "real" && field != "double" && field != "integer") {
        throw IoError("MatrixMarket: unsupported field '" + field + "'");
    }
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general") {
        throw IoError("MatrixMarket: unsupported symmetry '" + symmetry + "'");
    }

    std::string line;
    if (!next_data_line(is, line)) throw IoError("MatrixMarket: missing size line");
    std::istringstream size_line(line);

    if (format == "coordinate") {
        long rows = 0, cols = 0, nnz = 0;
        if (!(size_line >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
            throw IoError("MatrixMarket: malformed coordinate size line");
        }
        Mat m = Mat::Zero(rows, cols);
        for (long k = 0; k < nnz; ++k) {
            if (!next_data_line(is, line)) throw IoError("MatrixMarket: truncated entry list");
            std::istringstream es(line);
            long i = 0, j = 0;
            double v = 0.0;
            if (!(es >> i >> j >> v)) throw IoError("MatrixMarket: malformed entry line");
            if (i < 1 || i > rows || j < 1 || j > cols) {
                throw IoError("MatrixMarket: entry index out of range");
            }
            m(i - 1, j - 1) = v;
            if (symmetric && i != j) m(j - 1, i - 1) = v;
        }
        return m;
    }
    if (format == "array") {
        if (symmetric) throw IoError("MatrixMarket: symmetric array format not supported");
        long rows = 0, cols = 0;
        if (!(size_line >> rows >> cols) || rows < 0 || cols < 0) {
            throw IoError("MatrixMarket: malformed array size line");
        }
        Mat m(rows, cols);
        for (long j = 0; j < cols; ++j) {
            for (long i = 0; i < rows; ++i) {
                if (!next_data_line(is, line)) throw IoError("MatrixMarket: truncated array");
                std::istringstream es(line);
                if (!(es >> m(i, j))) throw IoError("MatrixMarket: malformed array value");
            }
        }
        return m;
    }
    throw IoError("MatrixMarket: unsupported format '" + format + "'");
}

void write_coordinate_file(const std::filesystem::path& path, const Mat& m) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    write_coordinate(os, m);
    if (!os) throw IoError("write failed: " + path.string());
}

void write_array_file(const std::filesystem::path& path, const Mat& m) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    write_array(os, m);
    if (!os) throw IoError("write failed: " + path.string());
}

Mat read_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    return read(is);
}

}  // namespace poroph::mm
