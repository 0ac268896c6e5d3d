#pragma once

#include <istream>
#include <string>

#include "mmlpca/spectrum.hpp"

namespace mmlpca {

/**
 * Reads a numeric CSV into an N x K matrix (rows are observations). A first
 * line containing any non-numeric field is treated as a header and skipped.
 * Blank lines are ignored. Ragged rows and unparsable fields throw InvalidData
 * with the offending line number.
 */
DataMatrix read_csv(std::istream& in);
DataMatrix read_csv_file(const std::string& path);

}  // namespace mmlpca
