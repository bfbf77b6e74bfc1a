#include "spikecount/symmetric_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "spikecount/error.hpp"

namespace spikecount::linalg {

Tridiagonal householder_tridiagonalize(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw DataError("householder_tridiagonalize: matrix is not square");
  Tridiagonal t;
  t.diagonal.resize(n);
  t.off_diagonal.resize(std::max<Eigen::Index>(n - 1, 0));
  if (n == 0) return t;

  Eigen::VectorXd v, p;
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index m = n - k - 1;
    auto x = a.col(k).tail(m);
    const double x0 = x(0);
    const double sigma = x.tail(m - 1).squaredNorm();
    if (sigma == 0.0) {
      t.off_diagonal(k) = x0;
      continue;
    }
    const double norm = std::sqrt(x0 * x0 + sigma);
    const double alpha = x0 <= 0.0 ? norm : -norm;
    v = x;
    v(0) = x0 - alpha;
    const double tau = 2.0 / (v(0) * v(0) + sigma);

    // B <- H B H with H = I - tau v v^T, via the symmetric rank-2 update
    // B <- B - v w^T - w v^T, w = p - (tau/2)(v^T p) v, p = tau B v.
    auto block = a.bottomRightCorner(m, m);
    p.noalias() = tau * (block.selfadjointView<Eigen::Lower>() * v);
    const double kappa = 0.5 * tau * v.dot(p);
    p -= kappa * v;
    block.selfadjointView<Eigen::Lower>().rankUpdate(v, p, -1.0);
    t.off_diagonal(k) = alpha;
  }
  if (n >= 2) t.off_diagonal(n - 2) = a(n - 1, n - 2);
  t.diagonal = a.diagonal();
  return t;
}

Eigen::VectorXd tridiagonal_eigenvalues(Tridiagonal t, int max_sweeps) {
  Eigen::VectorXd& d = t.diagonal;
  const Eigen::Index n = d.size();
  if (n <= 1) return d;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e.head(n - 1) = t.off_diagonal;

  const double eps = std::numeric_limits<double>::epsilon();
  for (Eigen::Index l = 0; l < n; ++l) {
    int sweeps = 0;
    Eigen::Index m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d(m)) + std::abs(d(m + 1));
        if (std::abs(e(m)) <= eps * dd) break;
      }
      if (m == l) break;
      if (++sweeps > max_sweeps) {
        std::ostringstream os;
        os << "tridiagonal QL: eigenvalue " << l << " did not converge in " << max_sweeps
           << " sweeps";
        throw ConvergenceError(os.str());
      }
      // Wilkinson-type shift from the leading 2x2 block.
      double g = (d(l + 1) - d(l)) / (2.0 * e(l));
      double r = std::hypot(g, 1.0);
      g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, pp = 0.0;
      Eigen::Index i;
      bool underflow = false;
      for (i = m - 1; i >= l; --i) {
        double f = s * e(i);
        const double b = c * e(i);
        r = std::hypot(f, g);
        e(i + 1) = r;
        if (r == 0.0) {
          d(i + 1) -= pp;
          e(m) = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d(i + 1) - pp;
        r = (d(i) - g) * s + 2.0 * c * b;
        pp = s * r;
        d(i + 1) = g + pp;
        g = c * r - b;
      }
      if (underflow) continue;
      d(l) -= pp;
      e(l) = g;
      e(m) = 0.0;
    } while (m != l);
  }
  std::sort(d.data(), d.data() + n);
  return d;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a) {
  return tridiagonal_eigenvalues(householder_tridiagonalize(a));
}

}  // namespace spikecount::linalg
