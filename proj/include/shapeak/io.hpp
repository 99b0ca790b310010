#pragma once

#include <string>
#include <vector>

#include "shapeak/matrix.hpp"

namespace shapeak {

// MatrixMarket I/O: "array" format for dense matrices, "coordinate" for
// sparse; the symmetric qualifier is honored on read and used on write when
// the matrix is exactly symmetric.
Mat read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const Mat& m);

// Vectors persist as whitespace-separated text (one value per line) and also
// load from a JSON array file. Values are written with 17 significant digits
// so round trips are bit exact.
Vec read_vector(const std::string& path);  // sniffs text vs JSON
void write_vector(const std::string& path, const Vec& v);

std::string format_double(double v);  // shortest exact decimal (%.17g)

}  // namespace shapeak
