#include "spikecount/csv_matrix.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "spikecount/error.hpp"
#include "spikecount/report.hpp"

namespace spikecount {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd read_csv_matrix(std::istream& in, const std::string& source) {
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, line_no = 0;
  bool header_allowed = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split(view);
    std::vector<double> row;
    row.reserve(fields.size());
    std::optional<std::size_t> bad;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const auto v = parse_double(fields[f]);
      if (!v) {
        bad = f;
        break;
      }
      row.push_back(*v);
    }
    if (bad) {
      if (header_allowed) {
        header_allowed = false;
        cols = fields.size();
        continue;
      }
      std::ostringstream os;
      os << source << ": line " << line_no << " (data row " << rows + 1 << "), field "
         << *bad + 1 << ": not a number '" << trim(fields[*bad]) << "'";
      throw DataError(os.str());
    }
    header_allowed = false;
    if (cols == 0) cols = row.size();
    if (row.size() != cols) {
      std::ostringstream os;
      os << source << ": line " << line_no << " (data row " << rows + 1 << "): expected " << cols
         << " fields, got " << row.size();
      throw DataError(os.str());
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw DataError(source + ": no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * cols + j];
  return m;
}

Eigen::MatrixXd load_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv_matrix(in, path);
}

void write_csv_matrix(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_number(m(i, j));
    out << '\n';
  }
}

}  // namespace spikecount
