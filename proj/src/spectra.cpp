#include "spikecount/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "spikecount/symmetric_eigen.hpp"

namespace spikecount {

void validate_data_matrix(const Eigen::Ref<const Eigen::MatrixXd>& y) {
  if (y.rows() < 2) throw DataError("data matrix needs at least 2 observations");
  if (y.cols() < 1) throw DataError("data matrix needs at least 1 variable");
  if (!y.allFinite()) throw DataError("data matrix contains non-finite entries");
}

namespace {

Eigen::MatrixXd centred(const Eigen::Ref<const Eigen::MatrixXd>& y) {
  return y.rowwise() - y.colwise().mean();
}

Eigen::MatrixXd symmetric_gram(const Eigen::Ref<const Eigen::MatrixXd>& a, double scale) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(a.cols(), a.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose(), 1.0 / scale);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

}  // namespace

Eigen::MatrixXd sample_covariance(const Eigen::Ref<const Eigen::MatrixXd>& y, Divisor divisor,
                                  bool center) {
  validate_data_matrix(y);
  const double div = divisor_value(divisor, static_cast<std::size_t>(y.rows()));
  if (center) return symmetric_gram(centred(y), div);
  return symmetric_gram(y, div);
}

EigenSpectrum eigenvalues_descending(const Eigen::Ref<const Eigen::MatrixXd>& s, std::size_t n,
                                     Divisor divisor) {
  if (s.rows() != s.cols()) throw DataError("eigenvalues_descending: matrix is not square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw DataError("eigenvalues_descending: matrix is not symmetric");

  Eigen::VectorXd ascending = linalg::symmetric_eigenvalues(s);
  EigenSpectrum out;
  out.n = n;
  out.divisor = divisor;
  out.values = ascending.reverse();
  const double floor = -1e-10 * std::max(1.0, out.values.size() ? out.values(0) : 0.0);
  for (Eigen::Index i = 0; i < out.values.size(); ++i) {
    double& v = out.values(i);
    if (v < 0.0) {
      if (v < floor) {
        std::ostringstream os;
        os << "eigenvalue " << v << " is negative beyond round-off; matrix is not PSD";
        throw DataError(os.str());
      }
      v = 0.0;
    }
  }
  return out;
}

EigenSpectrum spectrum_via_gram(const Eigen::Ref<const Eigen::MatrixXd>& y, Divisor divisor,
                                bool center) {
  validate_data_matrix(y);
  const auto n = static_cast<std::size_t>(y.rows());
  const Eigen::Index p = y.cols();
  const double div = divisor_value(divisor, n);
  Eigen::MatrixXd gram = center ? symmetric_gram(centred(y).transpose(), div)
                                : symmetric_gram(y.transpose(), div);
  EigenSpectrum small = eigenvalues_descending(gram, n, divisor);
  EigenSpectrum out;
  out.n = n;
  out.divisor = divisor;
  out.values = Eigen::VectorXd::Zero(p);
  const Eigen::Index keep = std::min<Eigen::Index>(p, small.values.size());
  out.values.head(keep) = small.values.head(keep);
  return out;
}

EigenSpectrum sample_spectrum(const Eigen::Ref<const Eigen::MatrixXd>& y, Divisor divisor,
                              bool center) {
  if (y.cols() > y.rows()) return spectrum_via_gram(y, divisor, center);
  return eigenvalues_descending(sample_covariance(y, divisor, center),
                                static_cast<std::size_t>(y.rows()), divisor);
}

EigenSpectrum with_divisor(const EigenSpectrum& spectrum, Divisor divisor) {
  if (spectrum.divisor == divisor) return spectrum;
  if (spectrum.n < 2) throw DataError("with_divisor: spectrum carries no sample size");
  EigenSpectrum out = spectrum;
  out.values *= divisor_value(spectrum.divisor, spectrum.n) / divisor_value(divisor, spectrum.n);
  out.divisor = divisor;
  return out;
}

std::size_t effective_rank(const EigenSpectrum& spectrum, Regime regime) {
  if (regime == Regime::SmallC) return spectrum.p();
  if (spectrum.n < 2) throw DataError("large-c regime needs the sample size n");
  return std::min(spectrum.p(), spectrum.n - 1);
}

std::vector<double> trailing_means(const EigenSpectrum& spectrum, Regime regime) {
  const std::size_t m = effective_rank(spectrum, regime);
  if (m == 0) throw DataError("trailing_means: empty averaging block");
  std::vector<double> means(m);
  double tail = 0.0;
  for (std::size_t j = m; j-- > 0;) {
    tail += spectrum[j];
    means[j] = tail / static_cast<double>(m - j);
  }
  return means;
}

}  // namespace spikecount
