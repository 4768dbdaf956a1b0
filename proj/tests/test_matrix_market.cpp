#include "oracles.hpp"

#include "poroph/error.hpp"
#include "poroph/matrix_market.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

using namespace poroph;

TEST(MatrixMarket, CoordinateRoundTripIsExact) {
    std::mt19937_64 rng(2);
    Mat m = oracle::random_matrix(rng, 4, 3);
    m(1, 1) = 0.0;
    m(3, 0) = 1.0 / 3.0;
    std::stringstream ss;
    mm::write_coordinate(ss, m);
    EXPECT_EQ(ss.str().rfind("%%MatrixMarket matrix coordinate real general", 0), 0u);
    EXPECT_EQ(mm::read(ss), m);
}

TEST(MatrixMarket, CoordinateWritesOnlyNonzeros) {
    Mat m = Mat::Zero(3, 3);
    m(0, 2) = -2.5;
    std::stringstream ss;
    mm::write_coordinate(ss, m);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line) && line.front() == '%') {
    }
    EXPECT_EQ(line, "3 3 1");
    std::getline(ss, line);
    EXPECT_EQ(line.substr(0, 4), "1 3 ");
}

TEST(MatrixMarket, ArrayRoundTripIsExact) {
    std::mt19937_64 rng(4);
    const Mat m = oracle::random_matrix(rng, 2, 5);
    std::stringstream ss;
    mm::write_array(ss, m);
    EXPECT_EQ(mm::read(ss), m);
}

TEST(MatrixMarket, ReadsSymmetricCoordinate) {
    std::istringstream is(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "% comment\n"
        "3 3 3\n"
        "1 1 2.0\n"
        "3 1 -1.0\n"
        "2 2 4.0\n");
    const Mat m = mm::read(is);
    EXPECT_EQ(m(0, 2), -1.0);
    EXPECT_EQ(m(2, 0), -1.0);
    EXPECT_EQ(m(1, 1), 4.0);
    EXPECT_EQ(m(2, 2), 0.0);
}

TEST(MatrixMarket, EmptyMatrices) {
    for (const Mat& m : {Mat(0, 0), Mat(3, 0), Mat(0, 2)}) {
        std::stringstream a, c;
        mm::write_array(a, m);
        mm::write_coordinate(c, m);
        const Mat ra = mm::read(a), rc = mm::read(c);
        EXPECT_EQ(ra.rows(), m.rows());
        EXPECT_EQ(ra.cols(), m.cols());
        EXPECT_EQ(rc.rows(), m.rows());
        EXPECT_EQ(rc.cols(), m.cols());
    }
}

TEST(MatrixMarket, MalformedInputThrows) {
    const char* bad[] = {
        "",
        "not a banner\n1 1 1\n1 1 1\n",
        "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n",
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n",
        "%%MatrixMarket matrix array real general\n2 1\n1.0\n",
    };
    for (const char* text : bad) {
        std::istringstream is(text);
        EXPECT_THROW(mm::read(is), IoError) << text;
    }
}

TEST(MatrixMarket, FileRoundTrip) {
    const auto dir = std::filesystem::temp_directory_path() / "poroph_mm_test";
    std::filesystem::create_directories(dir);
    Mat m(2, 2);
    m << 1, -2, 0, 1e-300;
    mm::write_coordinate_file(dir / "c.mtx", m);
    mm::write_array_file(dir / "a.mtx", m);
    EXPECT_EQ(mm::read_file(dir / "c.mtx"), m);
    EXPECT_EQ(mm::read_file(dir / "a.mtx"), m);
    EXPECT_THROW(mm::read_file(dir / "missing.mtx"), IoError);
    std::filesystem::remove_all(dir);
}
