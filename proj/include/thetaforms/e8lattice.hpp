#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "thetaforms/errors.hpp"
#include "thetaforms/linalg.hpp"
#include "thetaforms/theta.hpp"

namespace thetaforms {

/// Gram matrix of the E8 lattice in the basis used throughout.
inline IntMatrix zeta_e8() {
  return IntMatrix{{2, 0, 0, 1, 0, 0, 0, 0}, {0, 2, 1, 0, 0, 0, 0, 0}, {0, 1, 2, 1, 0, 0, 0, 0},
                   {1, 0, 1, 2, 1, 0, 0, 0}, {0, 0, 0, 1, 2, 1, 0, 0}, {0, 0, 0, 0, 1, 2, 1, 0},
                   {0, 0, 0, 0, 0, 1, 2, 1}, {0, 0, 0, 0, 0, 0, 1, 2}};
}

/// 4! 6! 8!
inline constexpr std::uint64_t kE8AutomorphismOrder = 696729600ULL;

/// Integer symmetric positive definite matrix, rank <= 8.
class GramMatrix {
 public:
  explicit GramMatrix(IntMatrix m) : m_(std::move(m)) {
    if (!m_.is_square() || m_.rows() < 1 || m_.rows() > 8) throw ShapeError("Gram matrix must be square of size 1..8");
    if (m_ != m_.transpose()) throw DomainError("Gram matrix is not symmetric");
    const int n = m_.rows();
    for (int k = 1; k <= n; ++k) {
      std::vector<int> idx(static_cast<std::size_t>(k));
      std::iota(idx.begin(), idx.end(), 0);
      if (det(submatrix(m_, idx, idx)) <= 0) throw DomainError("Gram matrix is not positive definite");
    }
    // q_ii (x_i + sum_{j>i} q_ij x_j)^2 decomposition for the enumeration bounds
    const int nn = n;
    q_.assign(static_cast<std::size_t>(nn * nn), 0.0);
    std::vector<double> a(static_cast<std::size_t>(nn * nn));
    for (int i = 0; i < nn; ++i)
      for (int j = 0; j < nn; ++j) a[static_cast<std::size_t>(i * nn + j)] = static_cast<double>(m_(i, j));
    for (int i = 0; i < nn; ++i) {
      for (int j = i; j < nn; ++j) q_[static_cast<std::size_t>(i * nn + j)] = a[static_cast<std::size_t>(i * nn + j)];
      for (int j = i + 1; j < nn; ++j) {
        const double qij = q_[static_cast<std::size_t>(i * nn + j)] / q_[static_cast<std::size_t>(i * nn + i)];
        for (int k = j; k < nn; ++k)
          a[static_cast<std::size_t>(j * nn + k)] -= qij * q_[static_cast<std::size_t>(i * nn + k)];
      }
      for (int j = i + 1; j < nn; ++j) q_[static_cast<std::size_t>(i * nn + j)] /= q_[static_cast<std::size_t>(i * nn + i)];
    }
  }

  static GramMatrix e8() { return GramMatrix(zeta_e8()); }

  int rank() const noexcept { return m_.rows(); }
  const IntMatrix& matrix() const noexcept { return m_; }
  bool is_even() const {
    for (int i = 0; i < rank(); ++i)
      if (m_(i, i) % 2 != 0) return false;
    return true;
  }

  std::int64_t inner(const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) const {
    std::int64_t s = 0;
    for (int i = 0; i < rank(); ++i)
      for (int j = 0; j < rank(); ++j) s += x[static_cast<std::size_t>(i)] * m_(i, j) * y[static_cast<std::size_t>(j)];
    return s;
  }

  /// Calls fn(x) for every x with x zeta x^t <= max_norm (including 0).
  /// Bounds come from the floating point decomposition with a safety margin;
  /// the norm passed to fn is recomputed exactly.
  template <class Fn>
  void enumerate(std::int64_t max_norm, Fn&& fn) const {
    const int n = rank();
    std::vector<std::int64_t> x(static_cast<std::size_t>(n), 0);
    std::vector<double> partial(static_cast<std::size_t>(n + 1), 0.0);
    const double limit = static_cast<double>(max_norm) + 1e-6;
    enumerate_level(n - 1, limit, x, partial, max_norm, fn);
  }

 private:
  template <class Fn>
  void enumerate_level(int i, double limit, std::vector<std::int64_t>& x, std::vector<double>& partial,
                       std::int64_t max_norm, Fn& fn) const {
    const int n = rank();
    double c = 0.0;
    for (int j = i + 1; j < n; ++j) c += q_[static_cast<std::size_t>(i * n + j)] * static_cast<double>(x[static_cast<std::size_t>(j)]);
    const double room = limit - partial[static_cast<std::size_t>(i + 1)];
    const double qii = q_[static_cast<std::size_t>(i * n + i)];
    if (room < 0.0) return;
    const double half = std::sqrt(room / qii);
    const auto lo = static_cast<std::int64_t>(std::ceil(-c - half - 1e-9));
    const auto hi = static_cast<std::int64_t>(std::floor(-c + half + 1e-9));
    for (std::int64_t v = lo; v <= hi; ++v) {
      x[static_cast<std::size_t>(i)] = v;
      const double t = static_cast<double>(v) + c;
      partial[static_cast<std::size_t>(i)] = partial[static_cast<std::size_t>(i + 1)] + qii * t * t;
      if (partial[static_cast<std::size_t>(i)] > limit) continue;
      if (i == 0) {
        const std::int64_t norm = inner(x, x);
        if (norm <= max_norm) fn(x, norm);
      } else {
        enumerate_level(i - 1, limit, x, partial, max_norm, fn);
      }
    }
    x[static_cast<std::size_t>(i)] = 0;
  }

  IntMatrix m_;
  std::vector<double> q_;
};

inline constexpr std::int64_t kMaxListedNorm = 8;
inline constexpr std::int64_t kMaxCountedNorm = 40;

/// All x with x zeta x^t = target_norm, in enumeration order.
inline std::vector<std::vector<std::int64_t>> vectors_of_norm(const GramMatrix& zeta, std::int64_t target_norm) {
  if (target_norm < 0) throw DomainError("vectors_of_norm: negative norm");
  if (target_norm > kMaxListedNorm) throw SizeLimitError("vectors_of_norm: norm above 8");
  std::vector<std::vector<std::int64_t>> out;
  zeta.enumerate(target_norm, [&](const std::vector<std::int64_t>& x, std::int64_t norm) {
    if (norm == target_norm) out.push_back(x);
  });
  return out;
}

/// counts[k] = #{x : x zeta x^t = k}, k = 0..max_norm.
inline std::vector<std::uint64_t> norm_counts(const GramMatrix& zeta, std::int64_t max_norm) {
  if (max_norm < 0) throw DomainError("norm_counts: negative norm");
  if (max_norm > kMaxCountedNorm) throw SizeLimitError("norm_counts: norm above 40");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(max_norm + 1), 0);
  zeta.enumerate(max_norm, [&](const std::vector<std::int64_t>&, std::int64_t norm) { ++counts[static_cast<std::size_t>(norm)]; });
  return counts;
}

// Diophantine counting ---------------------------------------------------------

struct SolutionCount {
  IntMatrix target;
  std::uint64_t count = 0;
  std::uint64_t nodes = 0;
  double seconds = 0.0;
};

struct CountOptions {
  std::uint64_t max_nodes = 0;  // 0: unlimited
  int threads = 1;
};

namespace detail {

/// Backtracking over rows of p with p zeta p^t = M. Candidates for each row
/// are bitsets over a common list of lattice vectors; assigning a row
/// intersects the candidate sets of the remaining rows with the vectors
/// having the prescribed inner product.
class RowSolver {
 public:
  RowSolver(const GramMatrix& zeta, const IntMatrix& m) : m_(m), k_(m.rows()) {
    std::map<std::int64_t, std::vector<std::size_t>> by_norm;
    for (int r = 0; r < k_; ++r) by_norm[m(r, r)];
    for (auto& [norm, idx] : by_norm)
      for (auto& x : vectors_of_norm(zeta, norm)) {
        idx.push_back(vecs_.size());
        vecs_.push_back(std::move(x));
      }
    words_ = (vecs_.size() + 63) / 64;
    for (int r = 0; r < k_; ++r) {
      std::vector<std::uint64_t> bits(words_, 0);
      for (std::size_t v : by_norm[m(r, r)]) bits[v / 64] |= std::uint64_t{1} << (v % 64);
      initial_.push_back(std::move(bits));
    }
    // inner product values that occur in M
    std::vector<std::int64_t> values;
    for (int r = 0; r < k_; ++r)
      for (int s = 0; s < k_; ++s)
        if (r != s && std::find(values.begin(), values.end(), m(r, s)) == values.end()) values.push_back(m(r, s));
    std::sort(values.begin(), values.end());
    values_ = values;
    masks_.assign(vecs_.size() * values_.size() * words_, 0);
    for (std::size_t a = 0; a < vecs_.size(); ++a)
      for (std::size_t b = 0; b < vecs_.size(); ++b) {
        const std::int64_t ip = zeta.inner(vecs_[a], vecs_[b]);
        const auto it = std::lower_bound(values_.begin(), values_.end(), ip);
        if (it == values_.end() || *it != ip) continue;
        const std::size_t vi = static_cast<std::size_t>(it - values_.begin());
        masks_[(a * values_.size() + vi) * words_ + b / 64] |= std::uint64_t{1} << (b % 64);
      }
    value_index_.assign(static_cast<std::size_t>(k_ * k_), 0);
    for (int r = 0; r < k_; ++r)
      for (int t = 0; t < k_; ++t)
        if (r != t)
          value_index_[static_cast<std::size_t>(r * k_ + t)] = static_cast<std::size_t>(
              std::lower_bound(values_.begin(), values_.end(), m(r, t)) - values_.begin());
  }

  std::size_t candidate_universe() const noexcept { return vecs_.size(); }

  /// Count with the first row (in the solver's order) restricted to the
  /// candidates whose position among that row's candidates is congruent to
  /// `part` modulo `parts`.
  std::uint64_t count(std::uint64_t& nodes, std::uint64_t max_nodes, int part, int parts) const {
    Workspace ws;
    ws.cand.assign(static_cast<std::size_t>(k_ + 1) * static_cast<std::size_t>(k_) * words_, 0);
    for (int r = 0; r < k_; ++r)
      std::copy(initial_[static_cast<std::size_t>(r)].begin(), initial_[static_cast<std::size_t>(r)].end(),
                ws.cand.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(r) * words_));
    ws.done.assign(static_cast<std::size_t>(k_), false);
    ws.max_nodes = max_nodes;
    const std::uint64_t total = recurse(ws, 0, part, parts);
    nodes = ws.nodes;
    return total;
  }

 private:
  struct Workspace {
    std::vector<std::uint64_t> cand;  // [depth][row][word]
    std::vector<bool> done;
    std::uint64_t nodes = 0;
    std::uint64_t max_nodes = 0;
    std::uint64_t found = 0;
  };

  std::uint64_t* slot(Workspace& ws, int depth, int row) const {
    return ws.cand.data() + (static_cast<std::size_t>(depth) * static_cast<std::size_t>(k_) + static_cast<std::size_t>(row)) * words_;
  }

  const std::uint64_t* mask(std::size_t vec, std::size_t value_index) const {
    return &masks_[(vec * values_.size() + value_index) * words_];
  }

  std::uint64_t popcount(const std::uint64_t* b) const {
    std::uint64_t c = 0;
    for (std::size_t u = 0; u < words_; ++u) c += static_cast<std::uint64_t>(std::popcount(b[u]));
    return c;
  }

  std::uint64_t recurse(Workspace& ws, int depth, int part, int parts) const {
    ++ws.nodes;
    if (ws.max_nodes != 0 && ws.nodes > ws.max_nodes)
      throw BudgetError("diophantine_count: node budget exceeded", ws.found, ws.nodes);
    // most constrained remaining row
    int row = -1;
    std::uint64_t best = ~std::uint64_t{0};
    for (int r = 0; r < k_; ++r) {
      if (ws.done[static_cast<std::size_t>(r)]) continue;
      const std::uint64_t c = popcount(slot(ws, depth, r));
      if (c < best) {
        best = c;
        row = r;
      }
    }
    if (best == 0) return 0;
    if (depth == k_ - 1 && parts == 1) {
      ws.found += best;
      return best;
    }
    ws.done[static_cast<std::size_t>(row)] = true;
    std::uint64_t total = 0;
    const std::uint64_t* mine = slot(ws, depth, row);
    std::uint64_t position = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t word = mine[w];
      while (word != 0) {
        const int bit = std::countr_zero(word);
        word &= word - 1;
        const std::size_t v = w * 64 + static_cast<std::size_t>(bit);
        const bool take = parts == 1 || static_cast<int>(position % static_cast<std::uint64_t>(parts)) == part;
        ++position;
        if (!take) continue;
        if (depth == k_ - 1) {
          ++total;
          ++ws.found;
          continue;
        }
        if (depth == k_ - 2) {
          for (int r = 0; r < k_; ++r) {
            if (ws.done[static_cast<std::size_t>(r)]) continue;
            const std::uint64_t* mk = mask(v, value_index_[static_cast<std::size_t>(row * k_ + r)]);
            const std::uint64_t* src = slot(ws, depth, r);
            std::uint64_t c = 0;
            for (std::size_t u = 0; u < words_; ++u) c += static_cast<std::uint64_t>(std::popcount(src[u] & mk[u]));
            total += c;
            ws.found += c;
          }
          continue;
        }
        for (int r = 0; r < k_; ++r) {
          if (ws.done[static_cast<std::size_t>(r)]) continue;
          const std::uint64_t* mk = mask(v, value_index_[static_cast<std::size_t>(row * k_ + r)]);
          const std::uint64_t* src = slot(ws, depth, r);
          std::uint64_t* dst = slot(ws, depth + 1, r);
          for (std::size_t u = 0; u < words_; ++u) dst[u] = src[u] & mk[u];
        }
        total += recurse(ws, depth + 1, 0, 1);
      }
    }
    ws.done[static_cast<std::size_t>(row)] = false;
    return total;
  }

  IntMatrix m_;
  int k_;
  std::vector<std::vector<std::int64_t>> vecs_;
  std::size_t words_ = 0;
  std::vector<std::vector<std::uint64_t>> initial_;
  std::vector<std::int64_t> values_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::size_t> value_index_;
};

}  // namespace detail

/// Number of integer k x n matrices p with p zeta p^t = M (exact).
/// Rows with M_rr = 0 are forced to vanish; the remaining rows are counted by
/// backtracking, split over `threads` workers by the choice of the first row.
namespace detail {

/// Rows of p with zero target norm are forced to vanish; the count of p for m
/// equals the count for the submatrix on the remaining rows.
struct ForcedZeroReduction {
  bool feasible = true;
  /// Every row is forced to zero: exactly one solution.
  bool trivial = false;
  IntMatrix reduced;
};

inline ForcedZeroReduction forced_zero_reduction(const GramMatrix& zeta, const IntMatrix& m) {
  ForcedZeroReduction out;
  std::vector<int> keep;
  for (int r = 0; r < m.rows(); ++r) {
    if (m(r, r) < 0 || (m(r, r) % 2 != 0 && zeta.is_even())) {
      out.feasible = false;
      return out;
    }
    if (m(r, r) == 0) {
      for (int s = 0; s < m.rows(); ++s)
        if (m(r, s) != 0) {
          out.feasible = false;
          return out;
        }
      continue;
    }
    if (m(r, r) > kMaxListedNorm) throw SizeLimitError("diophantine_count: diagonal entry above 8");
    keep.push_back(r);
  }
  out.trivial = keep.empty();
  if (!out.trivial) out.reduced = submatrix(m, keep, keep);
  return out;
}

}  // namespace detail

inline SolutionCount diophantine_count(const GramMatrix& zeta, const IntMatrix& m, const CountOptions& opts = {}) {
  const auto start = std::chrono::steady_clock::now();
  if (!m.is_square() || m != m.transpose()) throw ShapeError("diophantine_count: target must be symmetric");
  if (m.rows() < 1 || m.rows() > 9) throw SizeLimitError("diophantine_count: target size must lie in [1, 9]");
  SolutionCount res;
  res.target = m;
  const auto reduction = detail::forced_zero_reduction(zeta, m);
  if (!reduction.feasible || reduction.trivial) {
    res.count = reduction.feasible ? 1 : 0;
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
  }
  const IntMatrix& reduced = reduction.reduced;
  const detail::RowSolver solver(zeta, reduced);
  const int parts = std::max(1, opts.threads);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(parts), 0), nodes(static_cast<std::size_t>(parts), 0);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(parts));
  const std::uint64_t budget = opts.max_nodes == 0 ? 0 : std::max<std::uint64_t>(1, opts.max_nodes / static_cast<std::uint64_t>(parts));
  detail::parallel_for(parts, parts, [&](int p) {
    try {
      counts[static_cast<std::size_t>(p)] = solver.count(nodes[static_cast<std::size_t>(p)], budget, p, parts);
    } catch (const BudgetError& e) {
      counts[static_cast<std::size_t>(p)] = e.partial_count();
      nodes[static_cast<std::size_t>(p)] = e.nodes();
      errors[static_cast<std::size_t>(p)] = std::current_exception();
    } catch (...) {
      errors[static_cast<std::size_t>(p)] = std::current_exception();
    }
  });
  for (int p = 0; p < parts; ++p) {
    res.count += counts[static_cast<std::size_t>(p)];
    res.nodes += nodes[static_cast<std::size_t>(p)];
  }
  for (const auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const BudgetError&) {
      throw BudgetError("diophantine_count: node budget exceeded", res.count, res.nodes);
    }
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

/// Ordered pairs (x, y) of lattice vectors with norms M_00, M_11 and inner
/// product M_01: the two-row prefix of the automorphism count.
inline SolutionCount stabilizer_prefix_count(const GramMatrix& zeta, const IntMatrix& m) {
  if (m.rows() < 2) throw ShapeError("stabilizer_prefix_count: need at least two rows");
  return diophantine_count(zeta, submatrix(m, std::vector<int>{0, 1}, std::vector<int>{0, 1}));
}

/// N_M: number of g x 8 integer p with p zeta p^t = M, M a g x g target.
/// Results are memoized per target after removing forced-zero rows, so
/// diag(M', 0) reuses the count for M'.
inline std::uint64_t theta_series_coefficient(const GramMatrix& zeta, int g, const IntMatrix& m, const CountOptions& opts = {}) {
  if (g < 1 || g > 9) throw SizeLimitError("theta_series_coefficient: g must lie in [1, 9]");
  if (m.rows() != g || m.cols() != g) throw ShapeError("theta_series_coefficient: target is not g x g");
  const auto reduction = detail::forced_zero_reduction(zeta, m);
  if (!reduction.feasible) return 0;
  if (reduction.trivial) return 1;
  static std::mutex mu;
  static std::map<std::pair<IntMatrix, IntMatrix>, std::uint64_t> cache;
  const std::pair<IntMatrix, IntMatrix> key{zeta.matrix(), reduction.reduced};
  {
    std::lock_guard<std::mutex> lock(mu);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const std::uint64_t n = diophantine_count(zeta, reduction.reduced, opts).count;
  std::lock_guard<std::mutex> lock(mu);
  cache[key] = n;
  return n;
}

/// T = diag(zeta, 0_{g-8}).
inline IntMatrix padded_target(const IntMatrix& zeta, int g) {
  IntMatrix t(g, g);
  for (int i = 0; i < zeta.rows(); ++i)
    for (int j = 0; j < zeta.cols(); ++j) t(i, j) = zeta(i, j);
  return t;
}

// Igusa cross-check ----------------------------------------------------------------

struct IgusaReport {
  Complex lhs;  // sum_m theta_m^8
  Complex rhs;  // 2 Theta_E8
  double residual = 0.0;
  double scale = 0.0;
  std::int64_t max_norm = 0;
  double tail_bound = 0.0;
  std::vector<std::uint64_t> counts;  // counts[k]: vectors of norm 2k
  double relative() const { return scale > 0.0 ? residual / scale : residual; }
};

/// sum_m theta_m(tau)^8 against 2 sum_x exp(pi i (x zeta x^t) tau) at genus 1;
/// the lattice sum runs over norms 2k <= 2K with K chosen so that the bound
/// 240 zeta(3) sum_{k>K} k^3 |q|^k (N_{2k} = 240 sigma_3(k)) is below tol.
inline IgusaReport cross_check_theta_numeric(const GramMatrix& zeta, const PeriodMatrix& tau, double tol = 1e-12,
                                             const ThetaOptions& opts = {}) {
  if (tau.genus() != 1) throw DomainError("cross_check_theta_numeric: genus 1 only");
  if (!(tol > 0.0)) throw DomainError("cross_check_theta_numeric: tolerance must be positive");
  IgusaReport rep;
  for (const auto& m : enumerate_characteristics(1)) rep.lhs += std::pow(theta(m, tau, {}, opts).value, 8);
  const Complex t = tau(0, 0);
  const double aq = std::exp(-2.0 * kPi * t.imag());
  constexpr double kZeta3 = 1.2020569031595942;
  auto tail = [&](int k0) {
    double s = 0.0;
    for (int k = k0 + 1; k < k0 + 400; ++k) s += std::pow(static_cast<double>(k), 3) * std::pow(aq, k);
    return 240.0 * kZeta3 * s;
  };
  int big_k = 1;
  while (tail(big_k) > tol && 2 * (big_k + 1) <= kMaxCountedNorm) ++big_k;
  rep.tail_bound = tail(big_k);
  if (rep.tail_bound > tol) throw TruncationError("cross_check_theta_numeric: imaginary part too small");
  rep.max_norm = 2 * big_k;
  const auto counts = norm_counts(zeta, rep.max_norm);
  Complex lattice = 0.0;
  for (int k = 0; k <= big_k; ++k) {
    rep.counts.push_back(counts[static_cast<std::size_t>(2 * k)]);
    lattice += static_cast<double>(counts[static_cast<std::size_t>(2 * k)]) * std::exp(2.0 * kPi * kI * t * static_cast<double>(k));
  }
  rep.rhs = 2.0 * lattice;
  rep.residual = std::abs(rep.lhs - rep.rhs);
  rep.scale = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  return rep;
}

}  // namespace thetaforms
