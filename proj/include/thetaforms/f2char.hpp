#pragma once

// Theta characteristics m = [eps, delta] over F_2^g.
//
// Canonical order: eps major, delta minor, each vector read as a binary
// number with bits[0] most significant. This is the column order used by
// every matrix indexed "for all eps in F_2^g".

#include <cstdint>
#include <string>
#include <vector>

#include "thetaforms/errors.hpp"
#include "thetaforms/linalg.hpp"

namespace thetaforms {

inline constexpr int kMaxCharacteristicGenus = 12;

class F2Vector {
 public:
  F2Vector() = default;
  explicit F2Vector(int g) : bits_(static_cast<std::size_t>(g), 0) {}
  explicit F2Vector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_)
      if (b > 1) throw DomainError("F2Vector entries must be 0 or 1");
  }
  F2Vector(std::initializer_list<int> bits) {
    for (int b : bits) {
      if (b != 0 && b != 1) throw DomainError("F2Vector entries must be 0 or 1");
      bits_.push_back(static_cast<std::uint8_t>(b));
    }
  }

  /// Parse a string of '0'/'1' characters, e.g. "01".
  static F2Vector parse(const std::string& s) {
    std::vector<std::uint8_t> bits;
    for (char c : s) {
      if (c != '0' && c != '1') throw ParseError("characteristic string must contain only 0 and 1: " + s);
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return F2Vector(std::move(bits));
  }

  static F2Vector from_index(std::uint64_t index, int g) {
    F2Vector v(g);
    for (int k = 0; k < g; ++k) v.bits_[static_cast<std::size_t>(k)] = (index >> (g - 1 - k)) & 1U;
    return v;
  }

  int size() const noexcept { return static_cast<int>(bits_.size()); }
  int operator[](int k) const { return bits_[static_cast<std::size_t>(k)]; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  bool is_zero() const {
    for (auto b : bits_)
      if (b) return false;
    return true;
  }

  /// Binary value with bits[0] as the most significant bit.
  std::uint64_t index() const {
    std::uint64_t v = 0;
    for (auto b : bits_) v = (v << 1) | b;
    return v;
  }

  std::string str() const {
    std::string s;
    for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  friend F2Vector operator+(const F2Vector& a, const F2Vector& b) {
    require_same_genus(a, b);
    F2Vector c(a.size());
    for (std::size_t k = 0; k < a.bits_.size(); ++k) c.bits_[k] = a.bits_[k] ^ b.bits_[k];
    return c;
  }

  /// Scalar product in F_2.
  friend int dot(const F2Vector& a, const F2Vector& b) {
    require_same_genus(a, b);
    int s = 0;
    for (std::size_t k = 0; k < a.bits_.size(); ++k) s ^= a.bits_[k] & b.bits_[k];
    return s;
  }

  friend bool operator==(const F2Vector&, const F2Vector&) = default;
  friend auto operator<=>(const F2Vector& a, const F2Vector& b) { return a.bits_ <=> b.bits_; }

 private:
  static void require_same_genus(const F2Vector& a, const F2Vector& b) {
    if (a.size() != b.size()) throw ShapeError("F2 vectors of different length");
  }

  std::vector<std::uint8_t> bits_;
};

/// All 2^g vectors of F_2^g in canonical order.
inline std::vector<F2Vector> all_f2_vectors(int g) {
  if (g < 0 || g > kMaxCharacteristicGenus) throw SizeLimitError("genus out of range for F_2^g enumeration");
  std::vector<F2Vector> out;
  out.reserve(std::size_t{1} << g);
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << g); ++i) out.push_back(F2Vector::from_index(i, g));
  return out;
}

enum class Parity { even, odd };
enum class ParityFilter { all, even, odd };

inline const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

class Characteristic {
 public:
  Characteristic() = default;
  Characteristic(F2Vector eps, F2Vector delta) : eps_(std::move(eps)), delta_(std::move(delta)) {
    if (eps_.size() != delta_.size()) throw ShapeError("eps and delta differ in length");
  }

  static Characteristic parse(const std::string& eps, const std::string& delta) {
    return Characteristic(F2Vector::parse(eps), F2Vector::parse(delta));
  }

  int genus() const noexcept { return eps_.size(); }
  const F2Vector& eps() const noexcept { return eps_; }
  const F2Vector& delta() const noexcept { return delta_; }

  Parity parity() const { return dot(eps_, delta_) == 0 ? Parity::even : Parity::odd; }
  bool is_odd() const { return parity() == Parity::odd; }
  bool is_even() const { return parity() == Parity::even; }

  /// eps.index() * 2^g + delta.index().
  std::uint64_t index() const { return (eps_.index() << genus()) | delta_.index(); }

  std::string str() const { return "[" + eps_.str() + "," + delta_.str() + "]"; }

  friend Characteristic operator+(const Characteristic& a, const Characteristic& b) {
    return Characteristic(a.eps_ + b.eps_, a.delta_ + b.delta_);
  }

  /// Characteristic of the block-diagonal product: m1 (+) m2.
  friend Characteristic direct_sum(const Characteristic& a, const Characteristic& b) {
    auto cat = [](const F2Vector& x, const F2Vector& y) {
      auto bits = x.bits();
      bits.insert(bits.end(), y.bits().begin(), y.bits().end());
      return F2Vector(std::move(bits));
    };
    return Characteristic(cat(a.eps_, b.eps_), cat(a.delta_, b.delta_));
  }

  friend bool operator==(const Characteristic&, const Characteristic&) = default;
  friend auto operator<=>(const Characteristic& a, const Characteristic& b) {
    if (auto c = a.eps_ <=> b.eps_; c != 0) return c;
    return a.delta_ <=> b.delta_;
  }

 private:
  F2Vector eps_;
  F2Vector delta_;
};

inline Parity characteristic_parity(const Characteristic& m) { return m.parity(); }

inline std::uint64_t count_even_characteristics(int g) {
  return (std::uint64_t{1} << (g - 1)) * ((std::uint64_t{1} << g) + 1);
}
inline std::uint64_t count_odd_characteristics(int g) {
  return (std::uint64_t{1} << (g - 1)) * ((std::uint64_t{1} << g) - 1);
}

/// Characteristics of genus g in canonical order, optionally filtered by parity.
inline std::vector<Characteristic> enumerate_characteristics(int g, ParityFilter filter = ParityFilter::all) {
  if (g < 1 || g > kMaxCharacteristicGenus)
    throw SizeLimitError("enumerate_characteristics: genus must lie in [1, 12]");
  const auto vecs = all_f2_vectors(g);
  std::vector<Characteristic> out;
  for (const auto& e : vecs)
    for (const auto& d : vecs) {
      Characteristic m(e, d);
      if (filter == ParityFilter::all || (filter == ParityFilter::even) == m.is_even())
        out.push_back(std::move(m));
    }
  return out;
}

/// Two-torsion point x_m = (eps tau + delta) / 2 (the fixed representative).
struct TwoTorsionPoint {
  Characteristic characteristic;
  CVector coords;
};

inline TwoTorsionPoint two_torsion_point(const Characteristic& m, const CMatrix& tau) {
  const int g = m.genus();
  if (tau.rows() != g || tau.cols() != g) throw ShapeError("two_torsion_point: genus mismatch");
  CVector x(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) {
    Complex s = 0.5 * m.delta()[i];
    for (int j = 0; j < g; ++j) s += 0.5 * m.eps()[j] * tau(j, i);
    x[static_cast<std::size_t>(i)] = s;
  }
  return {m, std::move(x)};
}

}  // namespace thetaforms
