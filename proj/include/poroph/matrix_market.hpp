#pragma once

// MatrixMarket import/export for dense matrices.
//
// Writers emit either `coordinate real general` (1-based, explicit nonzeros
// only) or `array real general` (column-major, every entry). The reader
// accepts both, plus `coordinate real symmetric`.

#include "poroph/numkit.hpp"

#include <filesystem>
#include <iosfwd>

namespace poroph::mm {

void write_coordinate(std::ostream& os, const Mat& m);
void write_array(std::ostream& os, const Mat& m);
Mat read(std::istream& is);

void write_coordinate_file(const std::filesystem::path& path, const Mat& m);
void write_array_file(const std::filesystem::path& path, const Mat& m);
Mat read_file(const std::filesystem::path& path);

}  // namespace poroph::mm
