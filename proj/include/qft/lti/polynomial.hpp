#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qft::lti {

/// Real-coefficient polynomial in the Laplace variable, stored in descending
/// degree order: coeffs[0] * s^n + ... + coeffs[n].
///
/// Exact leading zeros are trimmed on construction, so the leading
/// coefficient is nonzero unless the polynomial is the zero polynomial
/// (represented as the single coefficient 0).
template <typename Scalar>
class Polynomial {
 public:
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Polynomial() : coeffs_(Coeffs::Zero(1)) {}

  explicit Polynomial(const Coeffs& c) : coeffs_(c) { trim(); }

  Polynomial(std::initializer_list<Scalar> c) : coeffs_(static_cast<Eigen::Index>(c.size())) {
    std::copy(c.begin(), c.end(), coeffs_.data());
    trim();
  }

  explicit Polynomial(const std::vector<Scalar>& c) : coeffs_(static_cast<Eigen::Index>(c.size())) {
    std::copy(c.begin(), c.end(), coeffs_.data());
    trim();
  }

  static Polynomial constant(Scalar c) { return Polynomial{c}; }

  /// s^n
  static Polynomial monomial(int n) {
    Coeffs c = Coeffs::Zero(n + 1);
    c(0) = Scalar(1);
    return Polynomial(c);
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_(0) == Scalar(0); }
  const Coeffs& coeffs() const { return coeffs_; }
  Scalar leading() const { return coeffs_(0); }

  /// Coefficient of s^power (zero beyond the degree).
  Scalar coeff(int power) const {
    if (power < 0 || power > degree()) return Scalar(0);
    return coeffs_(degree() - power);
  }

  std::vector<Scalar> to_vector() const {
    return std::vector<Scalar>(coeffs_.data(), coeffs_.data() + coeffs_.size());
  }

  /// Coefficients padded with leading zeros to `length` entries.
  Coeffs padded(int length) const {
    if (length < coeffs_.size()) throw std::invalid_argument("Polynomial::padded: length below size");
    Coeffs out = Coeffs::Zero(length);
    out.tail(coeffs_.size()) = coeffs_;
    return out;
  }

  Scalar max_abs_coeff() const { return coeffs_.cwiseAbs().maxCoeff(); }

  /// Horner evaluation; T may be real or complex.
  template <typename T>
  T operator()(const T& s) const {
    T acc = T(coeffs_(0));
    for (Eigen::Index i = 1; i < coeffs_.size(); ++i) acc = acc * s + T(coeffs_(i));
    return acc;
  }

  Polynomial derivative() const {
    if (degree() == 0) return Polynomial();
    Coeffs d(degree());
    for (int i = 0; i < degree(); ++i) d(i) = coeffs_(i) * Scalar(degree() - i);
    return Polynomial(d);
  }

 private:
  void trim() {
    if (coeffs_.size() == 0) {
      coeffs_ = Coeffs::Zero(1);
      return;
    }
    Eigen::Index first = 0;
    while (first + 1 < coeffs_.size() && coeffs_(first) == Scalar(0)) ++first;
    if (first > 0) coeffs_ = Coeffs(coeffs_.tail(coeffs_.size() - first));
  }

  Coeffs coeffs_;
};

using Polynomiald = Polynomial<double>;

/// Coefficient convolution.
template <typename Scalar>
Polynomial<Scalar> multiply(const Polynomial<Scalar>& p, const Polynomial<Scalar>& q) {
  using Coeffs = typename Polynomial<Scalar>::Coeffs;
  const auto& a = p.coeffs();
  const auto& b = q.coeffs();
  Coeffs out = Coeffs::Zero(a.size() + b.size() - 1);
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i, b.size()) += a(i) * b;
  return Polynomial<Scalar>(out);
}

template <typename Scalar>
Polynomial<Scalar> add(const Polynomial<Scalar>& p, const Polynomial<Scalar>& q) {
  const int n = std::max(p.degree(), q.degree()) + 1;
  return Polynomial<Scalar>(typename Polynomial<Scalar>::Coeffs(p.padded(n) + q.padded(n)));
}

template <typename Scalar>
Polynomial<Scalar> scale(const Polynomial<Scalar>& p, Scalar k) {
  return Polynomial<Scalar>(typename Polynomial<Scalar>::Coeffs(p.coeffs() * k));
}

template <typename Scalar>
Polynomial<Scalar> operator*(const Polynomial<Scalar>& p, const Polynomial<Scalar>& q) {
  return multiply(p, q);
}

template <typename Scalar>
Polynomial<Scalar> operator+(const Polynomial<Scalar>& p, const Polynomial<Scalar>& q) {
  return add(p, q);
}

template <typename Scalar>
Polynomial<Scalar> operator-(const Polynomial<Scalar>& p, const Polynomial<Scalar>& q) {
  return add(p, scale(q, Scalar(-1)));
}

template <typename Scalar>
Polynomial<Scalar> operator*(Scalar k, const Polynomial<Scalar>& p) {
  return scale(p, k);
}

/// Monic polynomial with the given roots. Conjugate pairs give real
/// coefficients; any residual imaginary part is dropped.
template <typename Scalar>
Polynomial<Scalar> from_roots(const std::vector<std::complex<Scalar>>& roots) {
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> c =
      Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>::Ones(1);
  for (const auto& r : roots) {
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> next =
        Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>::Zero(c.size() + 1);
    next.head(c.size()) += c;
    next.tail(c.size()) -= c * r;
    c = next;
  }
  return Polynomial<Scalar>(typename Polynomial<Scalar>::Coeffs(c.real()));
}

/// All complex roots with multiplicity.
///
/// Eigenvalues of the balanced companion matrix, each refined by a few
/// Newton steps that are kept only while they reduce |p(r)|.
template <typename Scalar>
std::vector<std::complex<Scalar>> roots(const Polynomial<Scalar>& p) {
  using Complex = std::complex<Scalar>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (p.is_zero()) throw std::invalid_argument("roots: zero polynomial");
  const int n = p.degree();
  if (n < 1) throw std::invalid_argument("roots: degree must be at least 1");

  // Roots at the origin come off exactly.
  int zero_roots = 0;
  while (zero_roots < n && p.coeffs()(n - zero_roots) == Scalar(0)) ++zero_roots;
  const int m = n - zero_roots;

  std::vector<Complex> out;
  out.reserve(n);
  if (m > 0) {
    const auto& c = p.coeffs();
    Matrix companion = Matrix::Zero(m, m);
    for (int j = 0; j < m; ++j) companion(0, j) = -c(j + 1) / c(0);
    for (int i = 1; i < m; ++i) companion(i, i - 1) = Scalar(1);

    // Diagonal similarity balancing (Parlett-Reinsch), powers of two.
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Ones(m);
    for (bool converged = false; !converged;) {
      converged = true;
      for (int i = 0; i < m; ++i) {
        Scalar col = companion.col(i).cwiseAbs().sum() - std::abs(companion(i, i));
        Scalar row = companion.row(i).cwiseAbs().sum() - std::abs(companion(i, i));
        if (col == Scalar(0) || row == Scalar(0)) continue;
        Scalar f = 1;
        const Scalar s = col + row;
        while (col < row / 2) { col *= 2; row /= 2; f *= 2; }
        while (col >= row * 2) { col /= 2; row *= 2; f /= 2; }
        if ((col + row) < Scalar(0.95) * s) {
          converged = false;
          d(i) *= f;
          companion.row(i) /= f;
          companion.col(i) *= f;
        }
      }
    }

    Eigen::EigenSolver<Matrix> solver(companion, false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("roots: eigenvalue iteration failed");
    const Polynomial<Scalar> dp = p.derivative();
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
      Complex r = solver.eigenvalues()(i);
      Scalar residual = std::abs(p(r));
      for (int it = 0; it < 3 && residual > Scalar(0); ++it) {
        const Complex slope = dp(r);
        if (slope == Complex(0)) break;
        const Complex candidate = r - p(r) / slope;
        const Scalar candidate_residual = std::abs(p(candidate));
        if (!(candidate_residual < residual)) break;
        r = candidate;
        residual = candidate_residual;
      }
      // Keep real roots of real polynomials exactly real.
      if (std::abs(r.imag()) <= Scalar(1e-14) * std::max(Scalar(1), std::abs(r))) r = Complex(r.real(), 0);
      out.push_back(r);
    }
  }
  for (int i = 0; i < zero_roots; ++i) out.emplace_back(Scalar(0), Scalar(0));
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return out;
}

/// Largest real part over all roots.
template <typename Scalar>
Scalar spectral_abscissa(const Polynomial<Scalar>& p) {
  Scalar worst = -std::numeric_limits<Scalar>::infinity();
  for (const auto& r : roots(p)) worst = std::max(worst, r.real());
  return worst;
}

inline constexpr double kHurwitzMargin = 1e-9;

/// True iff every root lies strictly in the left half-plane (real part
/// below -1e-9). Sign of the leading coefficient is irrelevant.
template <typename Scalar>
bool is_hurwitz(const Polynomial<Scalar>& p) {
  if (p.is_zero()) throw std::invalid_argument("is_hurwitz: zero polynomial");
  if (p.degree() < 1) throw std::invalid_argument("is_hurwitz: degree must be at least 1");
  return spectral_abscissa(p) < Scalar(-kHurwitzMargin);
}

}  // namespace qft::lti
