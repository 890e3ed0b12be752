#pragma once

// Small dense matrix kernels for certificate checks. Everything here is sized
// for the 1..8 dimensional blocks that show up in Lyapunov and LMI problems.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace stabcert {

inline constexpr double kDefaultPsdTol = 1e-9;

/// Row-major dense general matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const double> values);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

  [[nodiscard]] Matrix transpose() const;
  [[nodiscard]] bool all_finite() const;
  [[nodiscard]] double max_abs() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// Stacks [[tl, tr], [bl, br]]; block shapes must agree.
Matrix block2x2(const Matrix& tl, const Matrix& tr, const Matrix& bl, const Matrix& br);

/// Symmetric matrix. Construction symmetrizes (m + m^T) / 2, so entry(i,j) ==
/// entry(j,i) holds bit-exactly; non-finite input is rejected.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);
  SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SymMatrix zero(std::size_t n);
  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> d);

  [[nodiscard]] std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  [[nodiscard]] const Matrix& matrix() const noexcept { return m_; }

  /// x^T M x.
  [[nodiscard]] double quadratic_form(std::span<const double> x) const;

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator*(double s, const SymMatrix& a);
  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  Matrix m_;
};

/// Eigenvalues ascending; eigenvectors are the matching orthonormal columns.
struct Spectrum {
  std::vector<double> values;
  Matrix vectors;

  [[nodiscard]] double min() const { return values.front(); }
  [[nodiscard]] double max() const { return values.back(); }
};

/// Symmetric eigen-decomposition (Eigen's self-adjoint solver).
Spectrum sym_eigen(const SymMatrix& m);

double min_eigenvalue(const SymMatrix& m);
double max_eigenvalue(const SymMatrix& m);

bool is_psd(const SymMatrix& m, double tol = kDefaultPsdTol);

/// a ⪯ b in the Löwner order, i.e. b - a is PSD within tol.
bool loewner_leq(const SymMatrix& a, const SymMatrix& b, double tol = kDefaultPsdTol);

struct Eig2General {
  std::complex<double> first;
  std::complex<double> second;
  double spectral_radius = 0.0;
};

/// Roots of lambda^2 - tr*lambda + det = 0 (eigenvalues of any 2x2 matrix with
/// that trace and determinant). Discriminants within rounding of zero are
/// snapped to a double root.
Eig2General eig2_general(double tr, double det);

/// Spectral radius of a general 2x2 matrix via its trace and determinant.
double spectral_radius_2x2(const Matrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace stabcert
