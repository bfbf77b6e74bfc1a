#pragma once

// Sample covariance construction and descending eigenvalue spectra.

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "spikecount/error.hpp"

namespace spikecount {

/// Normalisation of the sample covariance: 1/(n-1) for the AIC family,
/// 1/n for the gap (Passemier-Yao) estimator.
enum class Divisor { NMinus1, N };

/// SmallC: p <= n, criteria average over all p eigenvalues.
/// LargeC: p > n, criteria use only the first n-1 eigenvalues.
enum class Regime { SmallC, LargeC };

inline Regime regime_for(std::size_t p, std::size_t n) {
  return p <= n ? Regime::SmallC : Regime::LargeC;
}

inline double divisor_value(Divisor d, std::size_t n) {
  return d == Divisor::N ? static_cast<double>(n) : static_cast<double>(n) - 1.0;
}

/// Descending sample eigenvalues l_1 >= ... >= l_p with their provenance.
struct EigenSpectrum {
  Eigen::VectorXd values;
  std::size_t n = 0;  ///< sample size the covariance was built from
  Divisor divisor = Divisor::NMinus1;

  std::size_t p() const { return static_cast<std::size_t>(values.size()); }
  double operator[](std::size_t i) const { return values(static_cast<Eigen::Index>(i)); }
};

/// Throws DataError unless y is a valid n x p data matrix (n >= 2, p >= 1, finite).
void validate_data_matrix(const Eigen::Ref<const Eigen::MatrixXd>& y);

/// S = Y^T Y / divisor (columns centred first when `center`), exactly symmetric.
Eigen::MatrixXd sample_covariance(const Eigen::Ref<const Eigen::MatrixXd>& y, Divisor divisor,
                                  bool center = false);

/// Eigenvalues of a symmetric PSD matrix in descending order. Round-off
/// negatives down to -1e-10 (relative to the largest eigenvalue) are clipped
/// to zero; anything more negative raises DataError.
EigenSpectrum eigenvalues_descending(const Eigen::Ref<const Eigen::MatrixXd>& s, std::size_t n = 0,
                                     Divisor divisor = Divisor::NMinus1);

/// Spectrum of the sample covariance computed through the n x n Gram matrix
/// Y Y^T / divisor, padded with zeros (p > n) or truncated (p < n) to p values.
EigenSpectrum spectrum_via_gram(const Eigen::Ref<const Eigen::MatrixXd>& y, Divisor divisor,
                                bool center = false);

/// Spectrum of the sample covariance; the Gram route is taken when p > n.
EigenSpectrum sample_spectrum(const Eigen::Ref<const Eigen::MatrixXd>& y, Divisor divisor,
                              bool center = false);

/// Same spectrum under another covariance divisor.
EigenSpectrum with_divisor(const EigenSpectrum& spectrum, Divisor divisor);

/// Trailing means l̄_j over every nonempty block. SmallC: mean of
/// l_{j+1..p} for j = 0..p-1. LargeC: mean of l_{j+1..n-1} for j = 0..n-2.
/// One backward cumulative sum.
std::vector<double> trailing_means(const EigenSpectrum& spectrum, Regime regime);

/// Number of eigenvalues entering the criteria: p (SmallC) or n-1 (LargeC).
std::size_t effective_rank(const EigenSpectrum& spectrum, Regime regime);

}  // namespace spikecount
