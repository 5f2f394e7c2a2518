#pragma once

// Dense linear algebra over generic scalars: determinants, adjugates, minors
// indexed by ordered subsets, the Cauchy-Binet and block-Laplace expansions,
// and SVD-based numerical rank.
//
// Indices in the public subset API are 1-based, matching the row/column
// numbering used for (-1)^I sign conventions. Matrix element access is 0-based.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "thetaforms/errors.hpp"

namespace thetaforms {

using Complex = std::complex<double>;

template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {
    if (rows < 0 || cols < 0) throw ShapeError("negative matrix dimension");
  }
  Matrix(int rows, int cols, std::vector<T> row_major)
      : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
      throw ShapeError("entry count does not match rows x cols");
  }
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ == 0 ? 0 : static_cast<int>(rows.begin()->size());
    data_.reserve(static_cast<std::size_t>(rows_ * cols_));
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != cols_) throw ShapeError("ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  const T& operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }

  const std::vector<T>& data() const noexcept { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  template <class U>
  Matrix<U> cast() const {
    Matrix<U> out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(i, j) = U((*this)(i, j));
    return out;
  }

  Matrix& operator+=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }
  friend Matrix operator-(Matrix a) {
    for (auto& x : a.data_) x = -x;
    return a;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw ShapeError("matrix product: inner dimensions differ");
    Matrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const T aik = a(i, k);
        for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator<(const Matrix& a, const Matrix& b) {
    return std::tie(a.rows_, a.cols_, a.data_) < std::tie(b.rows_, b.cols_, b.data_);
  }

 private:
  void require_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("matrix shapes differ");
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using CMatrix = Matrix<Complex>;
using RMatrix = Matrix<double>;
using IntMatrix = Matrix<std::int64_t>;
using CVector = std::vector<Complex>;

/// (-1)^e for any integer e.
constexpr int sign_power(long long e) noexcept { return (e % 2 == 0) ? 1 : -1; }

/// Largest entry magnitude; the "scale" used by relative identity checks.
template <class T>
double max_abs(const Matrix<T>& m) {
  using std::abs;
  double s = 0.0;
  for (const auto& x : m.data()) s = std::max(s, static_cast<double>(abs(x)));
  return s;
}

inline double max_abs(const CVector& v) {
  double s = 0.0;
  for (const auto& x : v) s = std::max(s, std::abs(x));
  return s;
}

template <class T>
double max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("matrix shapes differ");
  using std::abs;
  double s = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    s = std::max(s, static_cast<double>(abs(a.data()[k] - b.data()[k])));
  return s;
}

/// ‖M - Mᵀ‖_max <= rel_tol * max(1, ‖M‖_max).
template <class T>
bool is_symmetric(const Matrix<T>& m, double rel_tol = 0.0) {
  if (!m.is_square()) return false;
  using std::abs;
  const double bound = rel_tol * std::max(1.0, max_abs(m));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j)
      if (static_cast<double>(abs(m(i, j) - m(j, i))) > bound) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Ordered subsets P_k^*(X)

/// Strictly increasing subset I of X_n = {1, ..., n}.
class OrderedSubset {
 public:
  OrderedSubset() = default;
  OrderedSubset(int ambient, std::vector<int> elements)
      : ambient_(ambient), elements_(std::move(elements)) {
    if (ambient_ < 0) throw ShapeError("negative ambient size");
    for (std::size_t k = 0; k < elements_.size(); ++k) {
      if (elements_[k] < 1 || elements_[k] > ambient_)
        throw ShapeError("subset element outside ambient set");
      if (k > 0 && elements_[k] <= elements_[k - 1])
        throw ShapeError("subset elements must be strictly increasing");
    }
  }

  int ambient() const noexcept { return ambient_; }
  int size() const noexcept { return static_cast<int>(elements_.size()); }
  bool empty() const noexcept { return elements_.empty(); }
  const std::vector<int>& elements() const noexcept { return elements_; }
  int operator[](int k) const { return elements_[static_cast<std::size_t>(k)]; }

  bool contains(int x) const {
    return std::binary_search(elements_.begin(), elements_.end(), x);
  }

  /// Sum of elements, the exponent in (-1)^I.
  long long index_sum() const {
    return std::accumulate(elements_.begin(), elements_.end(), 0LL);
  }

  /// Complement in X_n, increasingly ordered.
  OrderedSubset complement() const {
    std::vector<int> c;
    for (int x = 1; x <= ambient_; ++x)
      if (!contains(x)) c.push_back(x);
    return OrderedSubset(ambient_, std::move(c));
  }

  friend bool operator==(const OrderedSubset&, const OrderedSubset&) = default;

 private:
  int ambient_ = 0;
  std::vector<int> elements_;
};

/// All k-element sub-orders of the ordered set `ground`, lexicographic.
inline std::vector<std::vector<int>> ordered_subsets(const std::vector<int>& ground, int k) {
  std::vector<std::vector<int>> out;
  const int n = static_cast<int>(ground.size());
  if (k < 0 || k > n) return out;
  std::vector<int> pick(static_cast<std::size_t>(k));
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    std::vector<int> s;
    s.reserve(pick.size());
    for (int p : pick) s.push_back(ground[static_cast<std::size_t>(p)]);
    out.push_back(std::move(s));
    int t = k - 1;
    while (t >= 0 && pick[static_cast<std::size_t>(t)] == n - k + t) --t;
    if (t < 0) break;
    ++pick[static_cast<std::size_t>(t)];
    for (int u = t + 1; u < k; ++u)
      pick[static_cast<std::size_t>(u)] = pick[static_cast<std::size_t>(u - 1)] + 1;
  }
  return out;
}

/// P_k^*(X_n) as OrderedSubset values.
inline std::vector<OrderedSubset> ordered_subsets(int n, int k) {
  std::vector<int> ground(static_cast<std::size_t>(n));
  std::iota(ground.begin(), ground.end(), 1);
  std::vector<OrderedSubset> out;
  for (auto& s : ordered_subsets(ground, k)) out.emplace_back(n, std::move(s));
  return out;
}

/// Elements of `ground` not in `subset`, keeping ground order.
inline std::vector<int> complement_in(const std::vector<int>& ground,
                                      const std::vector<int>& subset) {
  std::vector<int> c;
  for (int x : ground)
    if (std::find(subset.begin(), subset.end(), x) == subset.end()) c.push_back(x);
  return c;
}

/// Sign of the permutation of X_g \ {i_removed} that sorts the concatenation
/// (I, I^c). Equals (-1)^(sum of ranks of I in the ground set - k(k+1)/2).
inline int subset_sign(int g, int i_removed, const std::vector<int>& subset) {
  std::vector<int> ground;
  for (int x = 1; x <= g; ++x)
    if (x != i_removed) ground.push_back(x);
  long long rank_sum = 0;
  int prev = 0;
  for (int x : subset) {
    if (x == i_removed) throw DomainError("subset_sign: removed index belongs to the subset");
    auto it = std::find(ground.begin(), ground.end(), x);
    if (it == ground.end()) throw DomainError("subset_sign: element outside X_g");
    if (x <= prev) throw DomainError("subset_sign: subset must be strictly increasing");
    prev = x;
    rank_sum += (it - ground.begin()) + 1;
  }
  const long long k = static_cast<long long>(subset.size());
  return sign_power(rank_sum - k * (k + 1) / 2);
}

// ---------------------------------------------------------------------------
// Determinants

namespace detail {

template <class T>
inline constexpr bool is_exact_integer_v = std::is_integral_v<T>;

// Fraction-free Gaussian elimination; exact for integer entries.
template <class T>
T bareiss_det(Matrix<T> m) {
  const int n = m.rows();
  if (n == 0) return T(1);
  int sign = 1;
  T prev(1);
  for (int k = 0; k < n - 1; ++k) {
    if (m(k, k) == T(0)) {
      int p = k + 1;
      while (p < n && m(p, k) == T(0)) ++p;
      if (p == n) return T(0);
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign > 0 ? m(n - 1, n - 1) : T(-m(n - 1, n - 1));
}

template <class T>
T lu_det(Matrix<T> m) {
  using std::abs;
  const int n = m.rows();
  T det(1);
  for (int k = 0; k < n; ++k) {
    int p = k;
    auto best = abs(m(k, k));
    for (int i = k + 1; i < n; ++i) {
      auto a = abs(m(i, k));
      if (a > best) {
        best = a;
        p = i;
      }
    }
    if (best == decltype(best)(0)) return T(0);
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      det = -det;
    }
    const T pivot = m(k, k);
    det *= pivot;
    for (int i = k + 1; i < n; ++i) {
      const T f = m(i, k) / pivot;
      if (f == T(0)) continue;
      for (int j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

}  // namespace detail

/// Determinant. Closed forms for n <= 3, partial-pivot LU above (Bareiss for
/// integer scalars). det of the 0x0 matrix is 1.
template <class T>
T det(const Matrix<T>& m) {
  if (!m.is_square()) throw ShapeError("det: matrix is not square");
  const int n = m.rows();
  if constexpr (detail::is_exact_integer_v<T>) {
    return detail::bareiss_det(m);
  } else {
    switch (n) {
      case 0: return T(1);
      case 1: return m(0, 0);
      case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
      case 3:
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
      default: return detail::lu_det(m);
    }
  }
}

/// Submatrix with the given 0-based rows and columns.
template <class T>
Matrix<T> submatrix(const Matrix<T>& m, const std::vector<int>& rows,
                    const std::vector<int>& cols) {
  Matrix<T> s(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (int a = 0; a < s.rows(); ++a)
    for (int b = 0; b < s.cols(); ++b)
      s(a, b) = m(rows[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
  return s;
}

/// Determinant of the (I, J) submatrix; I, J are 1-based increasing index
/// lists. |I| = 0 gives 1.
template <class T>
T minor_det(const Matrix<T>& m, const std::vector<int>& rows_1b,
            const std::vector<int>& cols_1b) {
  if (rows_1b.size() != cols_1b.size())
    throw ShapeError("minor_det: row and column subsets differ in size");
  std::vector<int> r, c;
  for (int x : rows_1b) {
    if (x < 1 || x > m.rows()) throw ShapeError("minor_det: row index out of range");
    r.push_back(x - 1);
  }
  for (int x : cols_1b) {
    if (x < 1 || x > m.cols()) throw ShapeError("minor_det: column index out of range");
    c.push_back(x - 1);
  }
  return det(submatrix(m, r, c));
}

template <class T>
T minor_det(const Matrix<T>& m, const OrderedSubset& rows, const OrderedSubset& cols) {
  return minor_det(m, rows.elements(), cols.elements());
}

/// Matrix with 0-based row r and column c removed.
template <class T>
Matrix<T> remove_row_col(const Matrix<T>& m, int r, int c) {
  std::vector<int> rows, cols;
  for (int i = 0; i < m.rows(); ++i)
    if (i != r) rows.push_back(i);
  for (int j = 0; j < m.cols(); ++j)
    if (j != c) cols.push_back(j);
  return submatrix(m, rows, cols);
}

/// Transpose of the cofactor matrix: adj(M)_ij = (-1)^(i+j) det(M without
/// row j and column i). adj of a 1x1 matrix is [[1]].
template <class T>
Matrix<T> adjugate(const Matrix<T>& m) {
  if (!m.is_square()) throw ShapeError("adjugate: matrix is not square");
  const int n = m.rows();
  if (n == 0) throw ShapeError("adjugate: empty matrix");
  Matrix<T> adj(n, n);
  if (n == 1) {
    adj(0, 0) = T(1);
    return adj;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      T c = det(remove_row_col(m, j, i));
      adj(i, j) = sign_power(i + j) > 0 ? c : T(-c);
    }
  return adj;
}

/// Solve M X = B by partial-pivot LU. Throws ConditioningError on an exactly
/// zero pivot.
inline CMatrix solve(CMatrix m, CMatrix b) {
  if (!m.is_square() || m.rows() != b.rows()) throw ShapeError("solve: shape mismatch");
  const int n = m.rows();
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
    if (m(p, k) == Complex(0)) throw ConditioningError("solve: singular matrix");
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      for (int j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(p, j));
    }
    for (int i = k + 1; i < n; ++i) {
      const Complex f = m(i, k) / m(k, k);
      for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      for (int j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
    }
  }
  for (int j = 0; j < b.cols(); ++j)
    for (int i = n - 1; i >= 0; --i) {
      Complex s = b(i, j);
      for (int t = i + 1; t < n; ++t) s -= m(i, t) * b(t, j);
      b(i, j) = s / m(i, i);
    }
  return b;
}

inline CMatrix inverse(const CMatrix& m) { return solve(m, CMatrix::identity(m.rows())); }

// ---------------------------------------------------------------------------
// Singular values and rank (Eigen backed)

inline Eigen::MatrixXcd to_eigen(const CMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline CMatrix from_eigen(const Eigen::MatrixXcd& e) {
  CMatrix m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

/// Singular values in decreasing order.
inline std::vector<double> singular_values(const CMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return {};
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m));
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

/// Number of singular values above rel_tol times the largest.
inline int numerical_rank(const CMatrix& m, double rel_tol = 1e-8) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw DomainError("numerical_rank: rel_tol must lie in (0,1)");
  const auto s = singular_values(m);
  if (s.empty() || s.front() == 0.0) return 0;
  return static_cast<int>(std::count_if(s.begin(), s.end(),
                                        [&](double x) { return x > rel_tol * s.front(); }));
}

/// Right null-space basis: singular vectors whose singular value is at most
/// rel_tol times the largest (columns of the returned matrix).
inline CMatrix null_space(const CMatrix& m, double rel_tol = 1e-8) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m), Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) : 0.0;
  std::vector<int> cols;
  for (int k = 0; k < m.cols(); ++k) {
    const double sk = k < s.size() ? s(k) : 0.0;
    if (top == 0.0 || sk <= rel_tol * top) cols.push_back(k);
  }
  const Eigen::MatrixXcd& v = svd.matrixV();
  CMatrix basis(m.cols(), static_cast<int>(cols.size()));
  for (int c = 0; c < basis.cols(); ++c)
    for (int r = 0; r < basis.rows(); ++r) basis(r, c) = v(r, cols[static_cast<std::size_t>(c)]);
  return basis;
}

/// 2-norm condition number; +inf for singular input.
inline double condition_number(const CMatrix& m) {
  const auto s = singular_values(m);
  if (s.empty() || s.back() == 0.0) return std::numeric_limits<double>::infinity();
  return s.front() / s.back();
}

// ---------------------------------------------------------------------------
// Expansion identities

/// |det(AB) - sum_{S in P_m^*(X_n)} det(A_S) det(B^S)| for A m x n, B n x m.
template <class T>
double binet_check(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) throw ShapeError("binet_check: incompatible shapes");
  const int m = a.rows();
  const int n = a.cols();
  std::vector<int> all_rows(static_cast<std::size_t>(m));
  std::iota(all_rows.begin(), all_rows.end(), 0);
  std::vector<int> ground(static_cast<std::size_t>(n));
  std::iota(ground.begin(), ground.end(), 0);
  T sum(0);
  for (const auto& s : ordered_subsets(ground, m))
    sum += det(submatrix(a, all_rows, s)) * det(submatrix(b, s, all_rows));
  using std::abs;
  return static_cast<double>(abs(det(a * b) - sum));
}

/// |det(M) - sum_{I in P_k^*(X_n)} (-1)^(I+J) |M^I_J| |M^{I^c}_{J^c}||.
template <class T>
double laplace_block_expansion_check(const Matrix<T>& m, const OrderedSubset& cols) {
  if (!m.is_square()) throw ShapeError("laplace_block_expansion_check: matrix is not square");
  if (cols.ambient() != m.rows()) throw ShapeError("laplace_block_expansion_check: subset ambient differs from n");
  const OrderedSubset cols_c = cols.complement();
  T sum(0);
  for (const auto& rows : ordered_subsets(m.rows(), cols.size())) {
    T term = minor_det(m, rows, cols) * minor_det(m, rows.complement(), cols_c);
    sum += sign_power(rows.index_sum() + cols.index_sum()) > 0 ? term : T(-term);
  }
  using std::abs;
  return static_cast<double>(abs(det(m) - sum));
}

}  // namespace thetaforms
