#pragma once

// Exact arithmetic foundation: big integers and rationals (GMP), quadratic
// surds, continued fractions and convergent tables.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "osb/error.hpp"

namespace osb {

using BigInt = mpz_class;

std::string to_string(const BigInt& x);
/// Throws DomainError when `x` does not fit.
std::int64_t to_int64(const BigInt& x);

// ---------------------------------------------------------------------------
// Ratio

/// Canonical rational number: denominator positive, lowest terms.
class Ratio {
 public:
  Ratio() = default;
  Ratio(long n) : value_(n) {}  // NOLINT(google-explicit-constructor)
  explicit Ratio(BigInt n) : value_(std::move(n)) {}
  /// Throws DomainError on a zero denominator.
  Ratio(const BigInt& num, const BigInt& den);

  BigInt num() const { return value_.get_num(); }
  BigInt den() const { return value_.get_den(); }
  const mpq_class& raw() const { return value_; }

  int sign() const { return sgn(value_); }
  BigInt floor() const;
  std::string str() const;  // "p/q", or "p" when q = 1

  friend Ratio operator+(const Ratio& a, const Ratio& b) { return make(a.value_ + b.value_); }
  friend Ratio operator-(const Ratio& a, const Ratio& b) { return make(a.value_ - b.value_); }
  friend Ratio operator*(const Ratio& a, const Ratio& b) { return make(a.value_ * b.value_); }
  friend Ratio operator/(const Ratio& a, const Ratio& b);
  friend Ratio operator-(const Ratio& a) { return make(-a.value_); }

  friend bool operator==(const Ratio& a, const Ratio& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  static Ratio make(mpq_class v) {
    Ratio r;
    r.value_ = std::move(v);
    r.value_.canonicalize();
    return r;
  }
  mpq_class value_;
};

// ---------------------------------------------------------------------------
// Surd

/// Sign of A + B*sqrt(d) for d >= 0, using integer arithmetic only.
int sign_of_radical(const BigInt& a, const BigInt& b, const BigInt& d);

/// (a + b*sqrt(d)) / e in canonical form: e > 0, d squarefree, gcd(a, b, e) = 1,
/// and b = d = 0 whenever the value is rational.
class Surd {
 public:
  Surd() : e_(1) {}
  /// Throws DomainError for e = 0 or d < 0.
  Surd(BigInt a, BigInt b, BigInt d, BigInt e);
  static Surd from_ratio(const Ratio& r);

  const BigInt& a() const { return a_; }
  const BigInt& b() const { return b_; }
  const BigInt& d() const { return d_; }
  const BigInt& e() const { return e_; }

  bool is_rational() const { return b_ == 0; }
  int sign() const;
  BigInt floor() const;
  Surd scaled(const BigInt& j) const;  // j * x
  std::string str() const;  // "(a+b*sqrt(d))/e"

  friend bool operator==(const Surd& x, const Surd& y) = default;

 private:
  BigInt a_, b_, d_, e_;
};

std::strong_ordering compare(const Surd& x, const Ratio& r);
std::strong_ordering compare(const Surd& x, const Surd& y);

// ---------------------------------------------------------------------------
// Continued fractions

/// Partial quotients: a finite list (rational value) or prefix + repeating
/// period (quadratic irrational). Always kept in canonical form:
///   * finite: last quotient >= 2 unless the expansion is a single term;
///   * periodic: shortest period, rotated so the prefix is as short as
///     possible while still holding a_0.
class CFExpansion {
 public:
  CFExpansion() = default;
  /// Validates (a_0 >= 0, later terms >= 1) and normalizes. Throws DomainError.
  CFExpansion(std::vector<BigInt> prefix, std::vector<BigInt> period);

  const std::vector<BigInt>& prefix() const { return prefix_; }
  const std::vector<BigInt>& period() const { return period_; }
  bool is_rational() const { return period_.empty(); }
  /// Index of the last quotient of a finite expansion.
  std::int64_t last_index() const;
  /// a_i; throws DomainError past the end of a finite expansion.
  const BigInt& term(std::int64_t i) const;
  /// Residue of a_i modulo k, in [0, k).
  int term_mod(std::int64_t i, int k) const;
  std::string str() const;  // literal grammar "a0;a1,...;(b1,...)"

  friend bool operator==(const CFExpansion&, const CFExpansion&) = default;

 private:
  std::vector<BigInt> prefix_;
  std::vector<BigInt> period_;
};

/// Euclidean expansion of x >= 0. Throws DomainError for negative input.
CFExpansion cf_from_rational(const Ratio& x);
/// Periodic expansion of an irrational quadratic x > 0. Throws DomainError on a
/// rational or non-positive input.
CFExpansion cf_from_surd(const Surd& x);
/// Closed form of a periodic expansion. Throws DomainError on a finite one.
Surd surd_from_cf(const CFExpansion& cf);
/// Exact value of a finite expansion.
Ratio value_of(const CFExpansion& cf);
/// Value of an arbitrary finite quotient list [t_0; t_1, ..., t_m] (no canonical
/// form required; t_i > 0 for i >= 1).
Ratio value_of_terms(std::span<const BigInt> terms);

// ---------------------------------------------------------------------------
// Convergents

/// Rows (n, p_n, q_n) for n = -2 .. max_index(), seeded p_{-2}=0, p_{-1}=1,
/// q_{-2}=1, q_{-1}=0.
class ConvergentTable {
 public:
  std::int64_t max_index() const { return static_cast<std::int64_t>(p_.size()) - 3; }
  const BigInt& p(std::int64_t n) const { return p_.at(static_cast<std::size_t>(n + 2)); }
  const BigInt& q(std::int64_t n) const { return q_.at(static_cast<std::size_t>(n + 2)); }
  /// Appends row n = max_index()+1 with quotient a.
  void push(const BigInt& a);

 private:
  std::vector<BigInt> p_{0, 1};
  std::vector<BigInt> q_{1, 0};
};

/// Rows -2..n. Throws DomainError if n < -2 or n is past a finite expansion.
ConvergentTable convergents(const CFExpansion& cf, std::int64_t n);

/// Thread-safe lazily extended convergent table. Snapshots are immutable.
class ConvergentCache {
 public:
  explicit ConvergentCache(CFExpansion cf) : cf_(std::move(cf)) {}
  /// A table covering at least rows -2..n.
  std::shared_ptr<const ConvergentTable> upto(std::int64_t n) const;
  const CFExpansion& cf() const { return cf_; }

 private:
  CFExpansion cf_;
  mutable std::mutex mutex_;
  mutable std::shared_ptr<const ConvergentTable> table_;
};

struct CFInterval {
  Ratio center;  // p_depth / q_depth
  Ratio width;   // 1 / (q_depth q_{depth+1}); 0 when the value is exact
};

/// Throws DomainError when depth < 1 or past a finite expansion.
CFInterval eval_cf(const CFExpansion& cf, std::int64_t depth);

struct FundamentalInterval {
  Ratio lo;
  Ratio hi;
  bool open = true;  // the set is (lo, hi) minus the rationals
};

/// Irrationals whose expansion starts with `prefix`.
FundamentalInterval fundamental_interval(std::span<const BigInt> prefix);

// ---------------------------------------------------------------------------
// Literals

/// "p/q" or "p".
Ratio parse_ratio(std::string_view text);
/// "(a+b*sqrt(d))/e" with optional signs; "/e" and the outer parentheses may
/// be omitted.
Surd parse_surd(std::string_view text);
/// "a0;a1,a2,...[;(b1,...,bm)]"; "a0;(b1,...)" for an empty non-periodic part.
CFExpansion parse_cf(std::string_view text);

}  // namespace osb
