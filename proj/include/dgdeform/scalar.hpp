#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dgdeform {

namespace mp = boost::multiprecision;

struct FieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact rational scalar. Thin value wrapper so the Eigen-facing overload set
// stays ours (cpp_rational's own converting constructors clash with Eigen's
// scalar promotion machinery).
class Rat {
 public:
  Rat() = default;
  Rat(long long n) : v_(n) {}
  Rat(long long n, long long d) : v_(mp::cpp_int(n), mp::cpp_int(d)) {}

  const mp::cpp_rational& value() const { return v_; }
  bool is_zero() const { return v_.is_zero(); }

  friend Rat operator+(const Rat& a, const Rat& b) { return Rat(a.v_ + b.v_); }
  friend Rat operator-(const Rat& a, const Rat& b) { return Rat(a.v_ - b.v_); }
  friend Rat operator*(const Rat& a, const Rat& b) { return Rat(a.v_ * b.v_); }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.v_.is_zero()) throw FieldError("division by zero");
    return Rat(a.v_ / b.v_);
  }
  Rat operator-() const { return Rat(-v_); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

  Rat inverse() const { return Rat(1) / *this; }

  std::string str() const { return v_.str(); }
  friend std::ostream& operator<<(std::ostream& os, const Rat& a) { return os << a.v_; }

  static std::optional<Rat> parse(const std::string& s) {
    try {
      Rat r;
      r.v_.assign(s);
      return r;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

 private:
  explicit Rat(mp::cpp_rational v) : v_(std::move(v)) {}
  mp::cpp_rational v_;
};

inline Rat abs(const Rat& a) { return a < Rat(0) ? -a : a; }

// Prime-field scalar with the modulus carried per element. A default
// constructed value has modulus 0 ("not yet attached to a field") and behaves
// as a plain integer until it meets a modular operand; this is what lets
// Eigen's Scalar(0)/Scalar(1) constants mix with field elements.
class Fp {
 public:
  Fp() = default;
  Fp(long long x) : v_(x) {}
  Fp(long long x, std::uint32_t p) : p_(p) { v_ = norm(x, p); }

  std::int64_t rep() const { return v_; }
  std::uint32_t modulus() const { return p_; }
  bool is_zero() const { return v_ == 0; }

  friend Fp operator+(const Fp& a, const Fp& b) {
    std::uint32_t p = join(a, b);
    if (!p) return Fp(a.v_ + b.v_);
    return Fp(norm(a.v_, p) + norm(b.v_, p), p);
  }
  friend Fp operator-(const Fp& a, const Fp& b) {
    std::uint32_t p = join(a, b);
    if (!p) return Fp(a.v_ - b.v_);
    return Fp(norm(a.v_, p) - norm(b.v_, p), p);
  }
  friend Fp operator*(const Fp& a, const Fp& b) {
    std::uint32_t p = join(a, b);
    if (!p) return Fp(a.v_ * b.v_);
    return Fp(norm(a.v_, p) * norm(b.v_, p), p);
  }
  friend Fp operator/(const Fp& a, const Fp& b) { return a * b.inverse(); }
  Fp operator-() const { return p_ ? Fp(-v_, p_) : Fp(-v_); }
  Fp& operator+=(const Fp& o) { return *this = *this + o; }
  Fp& operator-=(const Fp& o) { return *this = *this - o; }
  Fp& operator*=(const Fp& o) { return *this = *this * o; }
  Fp& operator/=(const Fp& o) { return *this = *this / o; }

  friend bool operator==(const Fp& a, const Fp& b) {
    std::uint32_t p = join(a, b);
    if (!p) return a.v_ == b.v_;
    return norm(a.v_, p) == norm(b.v_, p);
  }
  friend bool operator!=(const Fp& a, const Fp& b) { return !(a == b); }
  // Order on canonical representatives; only used by generic pivoting and
  // container code, no field meaning.
  friend bool operator<(const Fp& a, const Fp& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Fp& a, const Fp& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Fp& a, const Fp& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Fp& a, const Fp& b) { return a.v_ >= b.v_; }

  Fp inverse() const {
    if (!p_) {
      if (v_ == 1 || v_ == -1) return *this;
      throw FieldError("inverse of untagged integer");
    }
    if (v_ == 0) throw FieldError("division by zero");
    // extended Euclid
    std::int64_t a = v_, b = p_, x0 = 1, x1 = 0;
    while (b) {
      std::int64_t q = a / b;
      a -= q * b; std::swap(a, b);
      x0 -= q * x1; std::swap(x0, x1);
    }
    return Fp(x0, p_);
  }

  std::string str() const { return std::to_string(v_); }
  friend std::ostream& operator<<(std::ostream& os, const Fp& a) { return os << a.v_; }

 private:
  static std::int64_t norm(std::int64_t x, std::uint32_t p) {
    std::int64_t m = static_cast<std::int64_t>(p);
    std::int64_t r = x % m;
    return r < 0 ? r + m : r;
  }
  static std::uint32_t join(const Fp& a, const Fp& b) {
    if (a.p_ && b.p_ && a.p_ != b.p_) throw FieldError("mixed field moduli");
    return a.p_ ? a.p_ : b.p_;
  }
  std::int64_t v_ = 0;
  std::uint32_t p_ = 0;
};

inline Fp abs(const Fp& a) { return a; }

inline bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Runtime field descriptor: rationals when p == 0, else F_p.
struct FieldSpec {
  std::uint32_t p = 0;

  bool rational() const { return p == 0; }
  std::string str() const { return p ? "F" + std::to_string(p) : "Q"; }

  static std::optional<FieldSpec> parse(const std::string& s) {
    if (s == "Q" || s == "q") return FieldSpec{0};
    if (s.size() >= 2 && (s[0] == 'F' || s[0] == 'f')) {
      std::uint64_t v = 0;
      for (std::size_t i = 1; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
        v = v * 10 + (s[i] - '0');
        if (v >= (1ull << 31)) return std::nullopt;
      }
      if (!is_prime(static_cast<std::uint32_t>(v))) return std::nullopt;
      return FieldSpec{static_cast<std::uint32_t>(v)};
    }
    return std::nullopt;
  }
};

template <class K>
K scalar_from_int(long long n, const FieldSpec& f);
template <>
inline Rat scalar_from_int<Rat>(long long n, const FieldSpec&) { return Rat(n); }
template <>
inline Fp scalar_from_int<Fp>(long long n, const FieldSpec& f) { return Fp(n, f.p); }

template <class K>
std::optional<K> scalar_parse(const std::string& s, const FieldSpec& f);

template <>
inline std::optional<Rat> scalar_parse<Rat>(const std::string& s, const FieldSpec&) {
  return Rat::parse(s);
}
template <>
inline std::optional<Fp> scalar_parse<Fp>(const std::string& s, const FieldSpec& f) {
  if (s.empty()) return std::nullopt;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return std::nullopt;
  long long v = 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
    v = v * 10 + (s[i] - '0');
    if (v > (1ll << 40)) v %= f.p;  // keep headroom while accumulating
  }
  if (s[0] == '-') v = -v;
  return Fp(v, f.p);
}

template <class K>
std::string scalar_str(const K& x) { return x.str(); }

}  // namespace dgdeform
