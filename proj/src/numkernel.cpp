#include "osb/numkernel.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <utility>

namespace osb {

std::string to_string(const BigInt& x) { return x.get_str(); }

std::int64_t to_int64(const BigInt& x) {
  if (!mpz_fits_slong_p(x.get_mpz_t())) {
    throw DomainError("integer " + x.get_str() + " does not fit in 64 bits");
  }
  return mpz_get_si(x.get_mpz_t());
}

namespace {

BigInt isqrt(const BigInt& x) {
  BigInt r;
  mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
  return r;
}

bool is_square(const BigInt& x) { return mpz_perfect_square_p(x.get_mpz_t()) != 0; }

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

BigInt gcd3(const BigInt& a, const BigInt& b, const BigInt& c) {
  BigInt g = gcd(a, b);
  return gcd(g, c);
}

std::strong_ordering ordering_of(int s) {
  return s < 0 ? std::strong_ordering::less
               : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

}  // namespace

// ---------------------------------------------------------------------------
// Ratio

Ratio::Ratio(const BigInt& num, const BigInt& den) {
  if (den == 0) throw DomainError("zero denominator");
  value_ = mpq_class(num, den);
  value_.canonicalize();
}

Ratio operator/(const Ratio& a, const Ratio& b) {
  if (b.sign() == 0) throw DomainError("division by zero");
  return Ratio::make(a.value_ / b.value_);
}

BigInt Ratio::floor() const { return floor_div(num(), den()); }

std::string Ratio::str() const {
  if (den() == 1) return num().get_str();
  return num().get_str() + "/" + den().get_str();
}

// ---------------------------------------------------------------------------
// Surd

int sign_of_radical(const BigInt& a, const BigInt& b, const BigInt& d) {
  const int sa = sgn(a);
  const int sb = (d == 0) ? 0 : sgn(b);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // Opposite signs: compare a^2 against b^2 d.
  const BigInt lhs = a * a;
  const BigInt rhs = b * b * d;
  const int mag = cmp(lhs, rhs);
  return mag == 0 ? 0 : (mag > 0 ? sa : sb);
}

namespace {

// d = s^2 * r with r squarefree for every prime factor below the trial bound.
std::pair<BigInt, BigInt> split_square(BigInt d) {
  BigInt s = 1;
  if (is_square(d)) return {isqrt(d), 1};
  for (unsigned long p = 2; p < 1000000; ++p) {
    const BigInt pp = BigInt(p) * p;
    if (pp > d) break;
    while (mpz_divisible_ui_p(d.get_mpz_t(), p * 1UL) != 0 &&
           mpz_divisible_p(d.get_mpz_t(), pp.get_mpz_t()) != 0) {
      d /= pp;
      s *= p;
    }
  }
  if (d > 1 && is_square(d)) {
    s *= isqrt(d);
    d = 1;
  }
  return {s, d};
}

}  // namespace

Surd::Surd(BigInt a, BigInt b, BigInt d, BigInt e)
    : a_(std::move(a)), b_(std::move(b)), d_(std::move(d)), e_(std::move(e)) {
  if (e_ == 0) throw DomainError("surd denominator is zero");
  if (d_ < 0) throw DomainError("surd radicand is negative");
  if (e_ < 0) {
    a_ = -a_;
    b_ = -b_;
    e_ = -e_;
  }
  if (b_ != 0 && d_ != 0) {
    auto [s, r] = split_square(d_);
    b_ *= s;
    d_ = r;
    if (d_ == 1) {
      a_ += b_;
      b_ = 0;
    }
  }
  if (b_ == 0 || d_ == 0) {
    b_ = 0;
    d_ = 0;
  }
  const BigInt g = gcd3(a_, b_, e_);
  if (g > 1) {
    a_ /= g;
    b_ /= g;
    e_ /= g;
  }
}

Surd Surd::from_ratio(const Ratio& r) { return Surd(r.num(), 0, 0, r.den()); }

int Surd::sign() const { return sign_of_radical(a_, b_, d_); }

BigInt Surd::floor() const {
  if (is_rational()) return floor_div(a_, e_);
  // floor((a + t)/e) = floor((a + floor(t))/e) for irrational t and e > 0.
  BigInt t = isqrt(b_ * b_ * d_);
  if (b_ < 0) t = -t - 1;
  return floor_div(a_ + t, e_);
}

Surd Surd::scaled(const BigInt& j) const { return Surd(a_ * j, b_ * j, d_, e_); }

std::string Surd::str() const {
  std::ostringstream os;
  os << "(" << a_.get_str() << (b_ < 0 ? "-" : "+") << BigInt(abs(b_)).get_str() << "*sqrt("
     << d_.get_str() << "))/" << e_.get_str();
  return os.str();
}

std::strong_ordering compare(const Surd& x, const Ratio& r) {
  const BigInt p = r.num();
  const BigInt q = r.den();
  return ordering_of(sign_of_radical(q * x.a() - x.e() * p, q * x.b(), x.d()));
}

std::strong_ordering compare(const Surd& x, const Surd& y) {
  // x - y = (A + B sqrt(d1) + C sqrt(d2)) / (e1 e2)
  const BigInt A = x.a() * y.e() - y.a() * x.e();
  if (x.d() == y.d() || x.is_rational() || y.is_rational()) {
    const BigInt& d = x.is_rational() ? y.d() : x.d();
    const BigInt B = x.b() * y.e() - y.b() * x.e();
    return ordering_of(sign_of_radical(A, B, d));
  }
  const BigInt B = x.b() * y.e();
  const BigInt C = -(y.b() * x.e());
  const int sx = sign_of_radical(A, B, x.d());
  const int sc = sgn(C);
  if (sc == 0) return ordering_of(sx);
  if (sx == 0 || sx == sc) return ordering_of(sc);
  // |A + B sqrt(d1)|^2 versus C^2 d2.
  const int mag = sign_of_radical(A * A + B * B * x.d() - C * C * y.d(), 2 * A * B, x.d());
  if (mag == 0) return std::strong_ordering::equal;
  return ordering_of(mag > 0 ? sx : sc);
}

// ---------------------------------------------------------------------------
// CFExpansion

CFExpansion::CFExpansion(std::vector<BigInt> prefix, std::vector<BigInt> period)
    : prefix_(std::move(prefix)), period_(std::move(period)) {
  if (prefix_.empty() && period_.empty()) throw DomainError("empty continued fraction");
  if (prefix_.empty()) {
    prefix_.push_back(period_.front());
    std::rotate(period_.begin(), period_.begin() + 1, period_.end());
  }
  if (prefix_[0] < 0) throw DomainError("a_0 must be non-negative");
  for (std::size_t i = 1; i < prefix_.size(); ++i) {
    if (prefix_[i] < 1) throw DomainError("partial quotient a_" + std::to_string(i) + " must be >= 1");
  }
  for (const auto& b : period_) {
    if (b < 1) throw DomainError("periodic partial quotients must be >= 1");
  }
  if (period_.empty()) {
    if (prefix_.size() > 1 && prefix_.back() == 1) {
      prefix_.pop_back();
      prefix_.back() += 1;
    }
    return;
  }
  const std::size_t n = period_.size();
  for (std::size_t len = 1; len < n; ++len) {
    if (n % len != 0) continue;
    bool repeats = true;
    for (std::size_t i = len; i < n && repeats; ++i) repeats = period_[i] == period_[i - len];
    if (repeats) {
      period_.resize(len);
      break;
    }
  }
  while (prefix_.size() > 1 && prefix_.back() == period_.back()) {
    std::rotate(period_.rbegin(), period_.rbegin() + 1, period_.rend());
    prefix_.pop_back();
  }
}

std::int64_t CFExpansion::last_index() const {
  if (!is_rational()) throw DomainError("periodic expansion has no last index");
  return static_cast<std::int64_t>(prefix_.size()) - 1;
}

const BigInt& CFExpansion::term(std::int64_t i) const {
  if (i < 0) throw DomainError("negative quotient index");
  const auto idx = static_cast<std::size_t>(i);
  if (idx < prefix_.size()) return prefix_[idx];
  if (period_.empty()) throw DomainError("index past the end of a finite expansion");
  return period_[(idx - prefix_.size()) % period_.size()];
}

int CFExpansion::term_mod(std::int64_t i, int k) const {
  BigInt r;
  mpz_fdiv_r_ui(r.get_mpz_t(), term(i).get_mpz_t(), static_cast<unsigned long>(k));
  return static_cast<int>(r.get_si());
}

std::string CFExpansion::str() const {
  std::string out = prefix_[0].get_str();
  if (prefix_.size() > 1) {
    out += ';';
    for (std::size_t i = 1; i < prefix_.size(); ++i) {
      if (i > 1) out += ',';
      out += prefix_[i].get_str();
    }
  }
  if (!period_.empty()) {
    out += ";(";
    for (std::size_t i = 0; i < period_.size(); ++i) {
      if (i > 0) out += ',';
      out += period_[i].get_str();
    }
    out += ')';
  }
  return out;
}

CFExpansion cf_from_rational(const Ratio& x) {
  if (x.sign() < 0) throw DomainError("cf_from_rational: negative input");
  BigInt num = x.num();
  BigInt den = x.den();
  std::vector<BigInt> terms;
  while (den != 0) {
    BigInt q = floor_div(num, den);
    BigInt r = num - q * den;
    terms.push_back(std::move(q));
    num = std::move(den);
    den = std::move(r);
  }
  return CFExpansion(std::move(terms), {});
}

CFExpansion cf_from_surd(const Surd& x) {
  if (x.is_rational()) throw DomainError("cf_from_surd: rational input, use cf_from_rational");
  if (x.sign() <= 0) throw DomainError("cf_from_surd: input must be positive");
  // x = (P + sqrt(D)) / Q with Q | D - P^2.
  BigInt P = x.b() > 0 ? x.a() : BigInt(-x.a());
  BigInt Q = x.b() > 0 ? x.e() : BigInt(-x.e());
  BigInt D = x.b() * x.b() * x.d();
  if ((D - P * P) % Q != 0) {
    const BigInt aq = abs(Q);
    P *= aq;
    D *= aq * aq;
    Q *= aq;
  }
  const BigInt r = isqrt(D);
  std::map<std::pair<BigInt, BigInt>, std::size_t> seen;
  std::vector<BigInt> terms;
  while (true) {
    auto [it, inserted] = seen.emplace(std::make_pair(P, Q), terms.size());
    if (!inserted) {
      const std::size_t start = it->second;
      std::vector<BigInt> prefix(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(start));
      std::vector<BigInt> period(terms.begin() + static_cast<std::ptrdiff_t>(start), terms.end());
      return CFExpansion(std::move(prefix), std::move(period));
    }
    BigInt a = Q > 0 ? floor_div(P + r, Q) : BigInt(-floor_div(P + r, BigInt(-Q)) - 1);
    P = a * Q - P;
    Q = (D - P * P) / Q;
    terms.push_back(std::move(a));
  }
}

Surd surd_from_cf(const CFExpansion& cf) {
  if (cf.is_rational()) throw DomainError("surd_from_cf: finite expansion");
  // Purely periodic tail y = [b_1; ..., b_L, y] = (p y + p') / (q y + q').
  ConvergentTable tail;
  for (const auto& b : cf.period()) tail.push(b);
  const auto L = static_cast<std::int64_t>(cf.period().size());
  const BigInt& p = tail.p(L - 1);
  const BigInt& pp = tail.p(L - 2);
  const BigInt& q = tail.q(L - 1);
  const BigInt& qp = tail.q(L - 2);
  // q y^2 + (q' - p) y - p' = 0, positive root.
  const BigInt A = p - qp;
  const BigInt D = A * A + 4 * q * pp;
  const BigInt E = 2 * q;
  ConvergentTable head;
  for (const auto& a : cf.prefix()) head.push(a);
  const auto m = static_cast<std::int64_t>(cf.prefix().size()) - 1;
  const BigInt& P = head.p(m);
  const BigInt& Pp = head.p(m - 1);
  const BigInt& Q = head.q(m);
  const BigInt& Qp = head.q(m - 1);
  // x = (P y + P') / (Q y + Q'), y = (A + sqrt(D)) / E.
  const BigInt n0 = P * A + Pp * E;
  const BigInt n1 = P;
  const BigInt m0 = Q * A + Qp * E;
  const BigInt m1 = Q;
  return Surd(n0 * m0 - n1 * m1 * D, n1 * m0 - n0 * m1, D, m0 * m0 - m1 * m1 * D);
}

Ratio value_of_terms(std::span<const BigInt> terms) {
  if (terms.empty()) throw DomainError("empty quotient list");
  Ratio x(terms.back());
  for (auto it = terms.rbegin() + 1; it != terms.rend(); ++it) x = Ratio(*it) + Ratio(1) / x;
  return x;
}

Ratio value_of(const CFExpansion& cf) {
  if (!cf.is_rational()) throw DomainError("value_of: periodic expansion has no finite value");
  return value_of_terms(cf.prefix());
}

// ---------------------------------------------------------------------------
// Convergents

void ConvergentTable::push(const BigInt& a) {
  const std::size_t n = p_.size();
  p_.push_back(a * p_[n - 1] + p_[n - 2]);
  q_.push_back(a * q_[n - 1] + q_[n - 2]);
}

ConvergentTable convergents(const CFExpansion& cf, std::int64_t n) {
  if (n < -2) throw DomainError("convergent index below -2");
  if (cf.is_rational() && n > cf.last_index()) {
    throw DomainError("convergent index " + std::to_string(n) + " past a finite expansion");
  }
  ConvergentTable t;
  for (std::int64_t i = 0; i <= n; ++i) t.push(cf.term(i));
  return t;
}

std::shared_ptr<const ConvergentTable> ConvergentCache::upto(std::int64_t n) const {
  std::lock_guard lock(mutex_);
  if (table_ && table_->max_index() >= n) return table_;
  std::int64_t target = std::max<std::int64_t>(n, table_ ? 2 * (table_->max_index() + 1) : 16);
  if (cf_.is_rational()) {
    if (n > cf_.last_index()) throw DomainError("convergent index past a finite expansion");
    target = std::min(target, cf_.last_index());
  }
  auto next = table_ ? std::make_shared<ConvergentTable>(*table_) : std::make_shared<ConvergentTable>();
  for (std::int64_t i = next->max_index() + 1; i <= target; ++i) next->push(cf_.term(i));
  table_ = std::move(next);
  return table_;
}

CFInterval eval_cf(const CFExpansion& cf, std::int64_t depth) {
  if (depth < 1) throw DomainError("eval_cf: depth must be >= 1");
  if (cf.is_rational()) {
    if (depth > cf.last_index()) throw DomainError("eval_cf: depth past a finite expansion");
    if (depth == cf.last_index()) return {value_of(cf), Ratio(0)};
  }
  const ConvergentTable t = convergents(cf, depth + 1);
  return {Ratio(t.p(depth), t.q(depth)), Ratio(BigInt(1), t.q(depth) * t.q(depth + 1))};
}

FundamentalInterval fundamental_interval(std::span<const BigInt> prefix) {
  if (prefix.empty()) throw DomainError("fundamental_interval: empty prefix");
  if (prefix[0] < 0) throw DomainError("fundamental_interval: a_0 must be non-negative");
  for (std::size_t i = 1; i < prefix.size(); ++i) {
    if (prefix[i] < 1) throw DomainError("fundamental_interval: a_i must be >= 1 for i >= 1");
  }
  std::vector<BigInt> bumped(prefix.begin(), prefix.end());
  bumped.back() += 1;
  Ratio x = value_of_terms(prefix);
  Ratio y = value_of_terms(bumped);
  if (y < x) std::swap(x, y);
  return {std::move(x), std::move(y), true};
}

// ---------------------------------------------------------------------------
// Literals

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])) != 0) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= s_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  bool accept(std::string_view word) {
    skip_ws();
    if (s_.substr(pos_, word.size()) != word) return false;
    pos_ += word.size();
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  bool at_digit() { return std::isdigit(static_cast<unsigned char>(peek())) != 0; }
  BigInt natural() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])) != 0) ++pos_;
    if (start == pos_) fail("expected digits");
    return BigInt(std::string(s_.substr(start, pos_ - start)));
  }
  BigInt integer() {
    bool neg = false;
    if (accept('-')) {
      neg = true;
    } else {
      accept('+');
    }
    BigInt v = natural();
    return neg ? BigInt(-v) : v;
  }
  void finish() {
    if (!done()) fail("unexpected trailing input");
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Ratio parse_ratio(std::string_view text) {
  Cursor c(text);
  BigInt num = c.integer();
  BigInt den = 1;
  if (c.accept('/')) {
    den = c.natural();
    if (den == 0) c.fail("zero denominator");
  }
  c.finish();
  return Ratio(num, den);
}

Surd parse_surd(std::string_view text) {
  Cursor c(text);
  const bool paren = c.accept('(');
  BigInt a = 0;
  BigInt b = 0;
  BigInt d = 0;
  bool have_rational = false;
  bool have_radical = false;
  bool first = true;
  while (true) {
    int sign = 1;
    if (c.accept('-')) {
      sign = -1;
    } else if (!c.accept('+') && !first) {
      break;
    }
    first = false;
    BigInt coef = 1;
    bool have_coef = false;
    if (c.at_digit()) {
      coef = c.natural();
      have_coef = true;
    }
    bool radical = false;
    if (have_coef) {
      if (c.accept('*')) {
        if (!c.accept("sqrt")) c.fail("expected 'sqrt'");
        radical = true;
      }
    } else {
      if (!c.accept("sqrt")) c.fail("expected a number or 'sqrt'");
      radical = true;
    }
    if (radical) {
      if (have_radical) c.fail("more than one radical term");
      c.expect('(');
      d = c.natural();
      c.expect(')');
      b = sign * coef;
      have_radical = true;
    } else {
      if (have_rational) c.fail("more than one rational term");
      a = sign * coef;
      have_rational = true;
    }
    if (c.done() || c.peek() == ')' || c.peek() == '/') break;
  }
  if (paren) c.expect(')');
  BigInt e = 1;
  if (c.accept('/')) {
    e = c.integer();
    if (e == 0) c.fail("zero denominator");
  }
  c.finish();
  return Surd(a, b, d, e);
}

CFExpansion parse_cf(std::string_view text) {
  Cursor c(text);
  std::vector<BigInt> prefix{c.natural()};
  std::vector<BigInt> period;
  auto read_list = [&](std::vector<BigInt>& out) {
    out.push_back(c.natural());
    while (c.accept(',')) out.push_back(c.natural());
  };
  if (c.accept(';')) {
    if (c.accept('(')) {
      read_list(period);
      c.expect(')');
    } else {
      read_list(prefix);
      if (c.accept(';')) {
        c.expect('(');
        read_list(period);
        c.expect(')');
      }
    }
  }
  c.finish();
  return CFExpansion(std::move(prefix), std::move(period));
}

}  // namespace osb
