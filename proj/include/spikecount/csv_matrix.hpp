#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace spikecount {

/// Reads a dense numeric CSV (rows = observations). Blank lines and lines
/// starting with '#' are skipped; a first row with any non-numeric field is
/// taken as a header. Errors are DataError with 1-based line numbers.
Eigen::MatrixXd read_csv_matrix(std::istream& in, const std::string& source = "<input>");
Eigen::MatrixXd load_csv_matrix(const std::string& path);

void write_csv_matrix(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& m);

}  // namespace spikecount
