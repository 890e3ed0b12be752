#include "stabcert/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stabcert {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  Matrix m(values.size(), 1);
  std::copy(values.begin(), values.end(), m.data_.begin());
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("Matrix: dimension mismatch in +");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("Matrix: dimension mismatch in -");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("Matrix: dimension mismatch in *");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("Matrix: dimension mismatch in A*x");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

Matrix block2x2(const Matrix& tl, const Matrix& tr, const Matrix& bl, const Matrix& br) {
  if (tl.rows() != tr.rows() || bl.rows() != br.rows() || tl.cols() != bl.cols() ||
      tr.cols() != br.cols())
    throw std::invalid_argument("block2x2: incompatible block shapes");
  Matrix m(tl.rows() + bl.rows(), tl.cols() + tr.cols());
  const std::size_t r0 = tl.rows();
  const std::size_t c0 = tl.cols();
  for (std::size_t i = 0; i < tl.rows(); ++i) {
    for (std::size_t j = 0; j < tl.cols(); ++j) m(i, j) = tl(i, j);
    for (std::size_t j = 0; j < tr.cols(); ++j) m(i, c0 + j) = tr(i, j);
  }
  for (std::size_t i = 0; i < bl.rows(); ++i) {
    for (std::size_t j = 0; j < bl.cols(); ++j) m(r0 + i, j) = bl(i, j);
    for (std::size_t j = 0; j < br.cols(); ++j) m(r0 + i, c0 + j) = br(i, j);
  }
  return m;
}

// ---------------------------------------------------------------------------

SymMatrix::SymMatrix(const Matrix& m) : m_(m.rows(), m.cols()) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("SymMatrix: input must be square with dim >= 1");
  if (!m.all_finite()) throw std::invalid_argument("SymMatrix: non-finite entry");
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) {
    m_(i, i) = m(i, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
  }
}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SymMatrix(Matrix(rows)) {}

SymMatrix SymMatrix::zero(std::size_t n) { return SymMatrix(Matrix(n, n)); }
SymMatrix SymMatrix::identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return SymMatrix(m);
}

double SymMatrix::quadratic_form(std::span<const double> x) const {
  if (x.size() != dim()) throw std::invalid_argument("quadratic_form: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < dim(); ++j) row += m_(i, j) * x[j];
    s += x[i] * row;
  }
  return s;
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) { return SymMatrix(a.m_ + b.m_); }
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) { return SymMatrix(a.m_ - b.m_); }
SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.m_); }

// ---------------------------------------------------------------------------

Spectrum sym_eigen(const SymMatrix& m) {
  const std::size_t n = m.dim();
  const auto& a = m.matrix();
  if (!a.all_finite()) throw std::invalid_argument("sym_eigen: non-finite entry");
  Eigen::MatrixXd e(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) e(Eigen::Index(i), Eigen::Index(j)) = a(i, j);

  // Eigen returns eigenvalues in increasing order.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e);
  if (solver.info() != Eigen::Success) throw std::runtime_error("sym_eigen: no convergence");

  Spectrum out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = solver.eigenvalues()(Eigen::Index(k));
    for (std::size_t i = 0; i < n; ++i)
      out.vectors(i, k) = solver.eigenvectors()(Eigen::Index(i), Eigen::Index(k));
  }
  return out;
}

double min_eigenvalue(const SymMatrix& m) { return sym_eigen(m).min(); }
double max_eigenvalue(const SymMatrix& m) { return sym_eigen(m).max(); }

bool is_psd(const SymMatrix& m, double tol) { return min_eigenvalue(m) >= -tol; }

bool loewner_leq(const SymMatrix& a, const SymMatrix& b, double tol) {
  if (a.dim() != b.dim()) throw std::invalid_argument("loewner_leq: dimension mismatch");
  return is_psd(b - a, tol);
}

Eig2General eig2_general(double tr, double det) {
  if (!std::isfinite(tr) || !std::isfinite(det))
    throw std::invalid_argument("eig2_general: non-finite input");
  const double disc = tr * tr - 4.0 * det;
  const double scale = std::max(tr * tr, 4.0 * std::abs(det));
  const double snap = 64.0 * std::numeric_limits<double>::epsilon() * scale;

  Eig2General out;
  if (std::abs(disc) <= snap) {
    out.first = out.second = {0.5 * tr, 0.0};
  } else if (disc > 0.0) {
    // Stable pairing: the large-magnitude root from the formula, the other from det.
    const double sq = std::sqrt(disc);
    const double big = 0.5 * (tr + (tr >= 0.0 ? sq : -sq));
    const double small = big != 0.0 ? det / big : 0.0;
    out.first = {big, 0.0};
    out.second = {small, 0.0};
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    out.first = {0.5 * tr, im};
    out.second = {0.5 * tr, -im};
  }
  out.spectral_radius = std::max(std::abs(out.first), std::abs(out.second));
  return out;
}

double spectral_radius_2x2(const Matrix& m) {
  if (m.rows() != 2 || m.cols() != 2) throw std::invalid_argument("spectral_radius_2x2: not 2x2");
  return eig2_general(m(0, 0) + m(1, 1), m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).spectral_radius;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace stabcert
