#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mfc {

// Dense real vector. Sizes in this library are small (state dimension n).
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double value = 0.0) : data_(n, value) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

  static Vector unit(std::size_t n, std::size_t i);

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double s);

  bool operator==(const Vector&) const = default;

 private:
  std::vector<double> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator-(Vector a);
Vector operator*(double s, Vector a);
Vector operator*(Vector a, double s);

double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);
double squared_norm(const Vector& a);
double max_abs(const Vector& a);
bool all_finite(const Vector& a);

// Row-major dense real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Vector row(std::size_t r) const;
  Vector col(std::size_t c) const;
  Matrix transpose() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);
Matrix outer(const Vector& a, const Vector& b);

double max_abs(const Matrix& a);
bool all_finite(const Matrix& a);

// LU factorisation with partial pivoting.
class LuDecomposition {
 public:
  explicit LuDecomposition(Matrix a);

  bool singular() const noexcept { return singular_; }
  Vector solve(const Vector& b) const;
  Matrix inverse() const;
  double determinant() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  bool singular_ = false;
};

// Returns false if `a` is not symmetric positive definite.
bool cholesky_succeeds(const Matrix& a);

// 1-norm condition number estimate via explicit inverse; +inf when singular.
double condition_number(const Matrix& a);

// Controllable canonical integrator chain: ones on the superdiagonal, B = e_n.
struct BrunovskyPair {
  Matrix a;
  Vector b;
};

BrunovskyPair brunovsky_pair(std::size_t n);

// Feedback gain k with char. polynomial of (A - B k^T) equal to prod (s - p_j)
// for the Brunovsky pair of dimension poles.size(). All poles must be < 0.
Vector pole_placement(std::span<const double> poles);

// Closed-loop matrix A - B k^T of the Brunovsky pair.
Matrix brunovsky_closed_loop(const Vector& gain);

// Coefficients c_0..c_{n-1} of the monic char. polynomial
// s^n + c_{n-1} s^{n-1} + ... + c_0 of a square matrix (Faddeev-LeVerrier).
Vector characteristic_polynomial(const Matrix& a);

// Symmetric P > 0 with A^T P + P A = -I via the vectorised linear system.
Matrix solve_lyapunov(const Matrix& a_cl);

// max |A^T P + P A + I|
double lyapunov_residual(const Matrix& a_cl, const Matrix& p);

// g+ = (g^T g)^{-1} g^T, returned as the row's entries.
Vector left_pseudo_inverse(const Vector& g);

// n x (n-1) matrix whose orthonormal columns span the null space of g^T.
Matrix annihilator(const Vector& g);

}  // namespace mfc
