#include "mfc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mfc/error.hpp"

namespace mfc {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::invalid_dimension,
                std::string(what) + ": size mismatch " + std::to_string(a) +
                    " vs " + std::to_string(b));
  }
}

}  // namespace

Vector Vector::unit(std::size_t n, std::size_t i) {
  Vector e(n);
  e[i] = 1.0;
  return e;
}

Vector& Vector::operator+=(const Vector& other) {
  require_same_size(size(), other.size(), "vector +=");
  for (std::size_t i = 0; i < size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  require_same_size(size(), other.size(), "vector -=");
  for (std::size_t i = 0; i < size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator-(Vector a) { return a *= -1.0; }
Vector operator*(double s, Vector a) { return a *= s; }
Vector operator*(Vector a, double s) { return a *= s; }

double dot(const Vector& a, const Vector& b) {
  require_same_size(a.size(), b.size(), "dot");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double squared_norm(const Vector& a) { return dot(a, a); }
double norm(const Vector& a) { return std::sqrt(squared_norm(a)); }

double max_abs(const Vector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const Vector& a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require_same_size(r.size(), cols_, "matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::row(std::size_t r) const {
  Vector v(cols_);
  for (std::size_t c = 0; c < cols_; ++c) v[c] = (*this)(r, c);
  return v;
}

Vector Matrix::col(std::size_t c) const {
  Vector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_size(a.rows(), b.rows(), "matrix +");
  require_same_size(a.cols(), b.cols(), "matrix +");
  Matrix m = a;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m(r, c) += b(r, c);
  return m;
}

Matrix operator-(const Matrix& a, const Matrix& b) { return a + (-1.0) * b; }

Matrix operator*(double s, const Matrix& a) {
  Matrix m = a;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m(r, c) *= s;
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require_same_size(a.cols(), b.rows(), "matrix *");
  Matrix m(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double ark = a(r, k);
      for (std::size_t c = 0; c < b.cols(); ++c) m(r, c) += ark * b(k, c);
    }
  return m;
}

Vector operator*(const Matrix& a, const Vector& x) {
  require_same_size(a.cols(), x.size(), "matrix * vector");
  Vector y(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) sum += a(r, c) * x[c];
    y[r] = sum;
  }
  return y;
}

Matrix outer(const Vector& a, const Vector& b) {
  Matrix m(a.size(), b.size());
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < b.size(); ++c) m(r, c) = a[r] * b[c];
  return m;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m = std::max(m, std::abs(a(r, c)));
  return m;
}

bool all_finite(const Matrix& a) {
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (!std::isfinite(a(r, c))) return false;
  return true;
}

LuDecomposition::LuDecomposition(Matrix a) : lu_(std::move(a)) {
  require_same_size(lu_.rows(), lu_.cols(), "LU");
  const std::size_t n = lu_.rows();
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

  const double scale = std::max(max_abs(lu_), std::numeric_limits<double>::min());
  const double tiny = scale * n * std::numeric_limits<double>::epsilon();

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(lu_(r, k)) > std::abs(lu_(pivot, k))) pivot = r;
    if (std::abs(lu_(pivot, k)) <= tiny) {
      singular_ = true;
      return;
    }
    if (pivot != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(pivot, c));
      std::swap(perm_[k], perm_[pivot]);
      sign_ = -sign_;
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const double factor = lu_(r, k) / lu_(k, k);
      lu_(r, k) = factor;
      for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= factor * lu_(k, c);
    }
  }
}

Vector LuDecomposition::solve(const Vector& b) const {
  if (singular_) throw Error(ErrorKind::invalid_dimension, "LU solve on singular matrix");
  const std::size_t n = lu_.rows();
  require_same_size(n, b.size(), "LU solve");
  Vector y(n);
  for (std::size_t r = 0; r < n; ++r) {
    double sum = b[perm_[r]];
    for (std::size_t c = 0; c < r; ++c) sum -= lu_(r, c) * y[c];
    y[r] = sum;
  }
  for (std::size_t r = n; r-- > 0;) {
    double sum = y[r];
    for (std::size_t c = r + 1; c < n; ++c) sum -= lu_(r, c) * y[c];
    y[r] = sum / lu_(r, r);
  }
  return y;
}

Matrix LuDecomposition::inverse() const {
  const std::size_t n = lu_.rows();
  Matrix inv(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const Vector col = solve(Vector::unit(n, c));
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
  }
  return inv;
}

double LuDecomposition::determinant() const {
  if (singular_) return 0.0;
  double det = sign_;
  for (std::size_t i = 0; i < lu_.rows(); ++i) det *= lu_(i, i);
  return det;
}

bool cholesky_succeeds(const Matrix& a) {
  if (a.rows() != a.cols()) return false;
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) return false;
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double sum = a(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
      l(i, j) = sum / l(j, j);
    }
  }
  return true;
}

namespace {

double one_norm(const Matrix& a) {
  double best = 0.0;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) sum += std::abs(a(r, c));
    best = std::max(best, sum);
  }
  return best;
}

}  // namespace

double condition_number(const Matrix& a) {
  LuDecomposition lu(a);
  if (lu.singular()) return std::numeric_limits<double>::infinity();
  return one_norm(a) * one_norm(lu.inverse());
}

BrunovskyPair brunovsky_pair(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::invalid_dimension, "Brunovsky pair needs n >= 1");
  BrunovskyPair pair{Matrix(n, n), Vector::unit(n, n - 1)};
  for (std::size_t i = 0; i + 1 < n; ++i) pair.a(i, i + 1) = 1.0;
  return pair;
}

Vector pole_placement(std::span<const double> poles) {
  if (poles.empty()) throw Error(ErrorKind::invalid_dimension, "pole placement needs n >= 1");
  for (std::size_t j = 0; j < poles.size(); ++j) {
    if (!(poles[j] < 0.0)) {
      throw Error(ErrorKind::unstable_specification,
                  "pole " + std::to_string(j) + " = " + std::to_string(poles[j]) +
                      " is not strictly negative");
    }
  }
  // coeffs[i] = coefficient of s^i in prod (s - p_j); monic.
  std::vector<double> coeffs{1.0};
  for (double p : poles) {
    std::vector<double> next(coeffs.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      next[i + 1] += coeffs[i];
      next[i] -= p * coeffs[i];
    }
    coeffs = std::move(next);
  }
  // Last row of A - B k^T is -k^T, so k_i is the coefficient of s^(i-1).
  return Vector(std::vector<double>(coeffs.begin(), coeffs.end() - 1));
}

Matrix brunovsky_closed_loop(const Vector& gain) {
  auto [a, b] = brunovsky_pair(gain.size());
  return a - outer(b, gain);
}

Vector characteristic_polynomial(const Matrix& a) {
  require_same_size(a.rows(), a.cols(), "characteristic polynomial");
  const std::size_t n = a.rows();
  // Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k.
  Vector c(n + 1);
  c[n] = 1.0;
  Matrix m(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    Matrix next = a * m;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    m = std::move(next);
    const Matrix am = a * m;
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += am(i, i);
    c[n - k] = -trace / static_cast<double>(k);
  }
  return Vector(std::vector<double>(c.begin(), c.end() - 1));
}

Matrix solve_lyapunov(const Matrix& a_cl) {
  require_same_size(a_cl.rows(), a_cl.cols(), "Lyapunov");
  const std::size_t n = a_cl.rows();
  const std::size_t nn = n * n;
  // Unknown P(i,j) at index i*n+j; equation (i,j) reads
  // sum_k A(k,i) P(k,j) + sum_k P(i,k) A(k,j) = -delta_ij.
  Matrix kron(nn, nn);
  Vector rhs(nn);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      for (std::size_t k = 0; k < n; ++k) {
        kron(row, k * n + j) += a_cl(k, i);
        kron(row, i * n + k) += a_cl(k, j);
      }
      rhs[row] = i == j ? -1.0 : 0.0;
    }
  }
  LuDecomposition lu(std::move(kron));
  if (lu.singular()) {
    throw Error(ErrorKind::not_hurwitz, "vectorised Lyapunov system is singular");
  }
  const Vector vec_p = lu.solve(rhs);
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      p(i, j) = 0.5 * (vec_p[i * n + j] + vec_p[j * n + i]);

  if (!all_finite(p) || !cholesky_succeeds(p)) {
    throw Error(ErrorKind::not_hurwitz, "Lyapunov solution is not positive definite");
  }
  const double residual = lyapunov_residual(a_cl, p);
  if (residual > 1e-10) {
    throw Error(ErrorKind::not_hurwitz,
                "Lyapunov residual " + std::to_string(residual) + " exceeds 1e-10");
  }
  return p;
}

double lyapunov_residual(const Matrix& a_cl, const Matrix& p) {
  return max_abs(a_cl.transpose() * p + p * a_cl + Matrix::identity(a_cl.rows()));
}

Vector left_pseudo_inverse(const Vector& g) {
  const double gg = squared_norm(g);
  if (!(gg > 0.0)) {
    throw Error(ErrorKind::degenerate_input_channel, "input vector field g(x) is zero");
  }
  return (1.0 / gg) * g;
}

Matrix annihilator(const Vector& g) {
  const std::size_t n = g.size();
  const double gnorm = norm(g);
  if (!(gnorm > 0.0)) {
    throw Error(ErrorKind::degenerate_input_channel, "input vector field g(x) is zero");
  }
  if (n == 1) return Matrix(1, 0);

  // Householder reflector Q = I - 2 u u^T with Q e_1 = s g/|g|; the remaining
  // columns of Q are an orthonormal basis of g's orthogonal complement.
  Vector u = (1.0 / gnorm) * g;
  const double sign = u[0] >= 0.0 ? 1.0 : -1.0;
  u[0] += sign;
  const double unorm = norm(u);
  u *= 1.0 / unorm;

  Matrix basis(n, n - 1);
  for (std::size_t c = 1; c < n; ++c)
    for (std::size_t r = 0; r < n; ++r)
      basis(r, c - 1) = (r == c ? 1.0 : 0.0) - 2.0 * u[r] * u[c];
  return basis;
}

}  // namespace mfc
