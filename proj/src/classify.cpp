#include "osb/classify.hpp"

#include <mpfr.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

namespace osb {

namespace {

constexpr mpfr_prec_t kPrecision = 160;

int small_modulus(std::int64_t k) {
  if (k < 2 || k > 46340) throw DomainError("modulus k out of range: " + std::to_string(k));
  return static_cast<int>(k);
}

void require_periodic(const CFExpansion& cf) {
  if (cf.is_rational()) throw DomainError("expansion must be periodic (irrational alpha)");
}

bool is_odd(std::int64_t m) { return m % 2 != 0; }

void note(ParityScan& scan, std::int64_t m) {
  auto& slot = is_odd(m) ? scan.odd : scan.even;
  if (!slot) slot = m;
}

std::int64_t mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

class Mpfr {
 public:
  Mpfr() { mpfr_init2(v_, kPrecision); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }
  Ratio exact() const {
    mpq_class q;
    mpfr_get_q(q.get_mpq_t(), v_);
    return Ratio(BigInt(q.get_num()), BigInt(q.get_den()));
  }

 private:
  mpfr_t v_;
};

// One enclosure with J - 1 explicit terms and an Euler-Maclaurin tail for the
// completely monotone f(x) = x^{-s}:
//   sum_{j>=J} f(j) = int_J^inf f + f(J)/2 + s J^{-s-1}/12 - theta s(s+1)(s+2) J^{-s-3}/720,
// 0 < theta < 1. For J >= 64 every tail term decreases in s, so the lower
// bound is evaluated at s_hi (the subtracted term at s_lo) and the upper at s_lo.
Enclosure enclose(const Ratio& c, std::int64_t J) {
  Mpfr c_lo, c_hi, s_lo, s_hi;
  mpfr_set_q(c_lo.get(), c.raw().get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(c_hi.get(), c.raw().get_mpq_t(), MPFR_RNDU);
  mpfr_mul_ui(s_lo.get(), c_lo.get(), 2, MPFR_RNDD);
  mpfr_mul_ui(s_hi.get(), c_hi.get(), 2, MPFR_RNDU);

  Mpfr lo, hi, term, base, exp_lo, exp_hi;
  mpfr_set_ui(lo.get(), 0, MPFR_RNDN);
  mpfr_set_ui(hi.get(), 0, MPFR_RNDN);
  mpfr_neg(exp_lo.get(), s_hi.get(), MPFR_RNDN);  // exact
  mpfr_neg(exp_hi.get(), s_lo.get(), MPFR_RNDN);
  for (std::int64_t j = 1; j < J; ++j) {
    mpfr_set_si(base.get(), j, MPFR_RNDN);
    mpfr_pow(term.get(), base.get(), exp_lo.get(), MPFR_RNDD);
    mpfr_add(lo.get(), lo.get(), term.get(), MPFR_RNDD);
    mpfr_pow(term.get(), base.get(), exp_hi.get(), MPFR_RNDU);
    mpfr_add(hi.get(), hi.get(), term.get(), MPFR_RNDU);
  }
  mpfr_set_si(base.get(), J, MPFR_RNDN);

  // Adds int_J^inf f + f(J)/2 + s J^{-s-1}/12 at exponent s with rounding rnd.
  auto add_head = [&](mpfr_ptr acc, mpfr_ptr s, mpfr_rnd_t rnd) {
    const mpfr_rnd_t other = rnd == MPFR_RNDD ? MPFR_RNDU : MPFR_RNDD;
    Mpfr e, t, den;
    mpfr_neg(e.get(), s, MPFR_RNDN);
    mpfr_pow(t.get(), base.get(), e.get(), rnd);
    mpfr_div_2ui(t.get(), t.get(), 1, rnd);
    mpfr_add(acc, acc, t.get(), rnd);
    mpfr_ui_sub(e.get(), 1, s, rnd);
    mpfr_pow(t.get(), base.get(), e.get(), rnd);
    mpfr_sub_ui(den.get(), s, 1, other);
    mpfr_div(t.get(), t.get(), den.get(), rnd);
    mpfr_add(acc, acc, t.get(), rnd);
    mpfr_neg(e.get(), s, MPFR_RNDN);
    mpfr_sub_ui(e.get(), e.get(), 1, rnd);
    mpfr_pow(t.get(), base.get(), e.get(), rnd);
    mpfr_mul(t.get(), t.get(), s, rnd);
    mpfr_div_ui(t.get(), t.get(), 12, rnd);
    mpfr_add(acc, acc, t.get(), rnd);
  };
  add_head(lo.get(), s_hi.get(), MPFR_RNDD);
  add_head(hi.get(), s_lo.get(), MPFR_RNDU);
  {
    Mpfr e, t, poly;
    mpfr_add_ui(poly.get(), s_lo.get(), 1, MPFR_RNDU);
    mpfr_mul(poly.get(), poly.get(), s_lo.get(), MPFR_RNDU);
    mpfr_add_ui(t.get(), s_lo.get(), 2, MPFR_RNDU);
    mpfr_mul(poly.get(), poly.get(), t.get(), MPFR_RNDU);
    mpfr_neg(e.get(), s_lo.get(), MPFR_RNDN);
    mpfr_sub_ui(e.get(), e.get(), 3, MPFR_RNDU);
    mpfr_pow(t.get(), base.get(), e.get(), MPFR_RNDU);
    mpfr_mul(t.get(), t.get(), poly.get(), MPFR_RNDU);
    mpfr_div_ui(t.get(), t.get(), 720, MPFR_RNDU);
    mpfr_sub(lo.get(), lo.get(), t.get(), MPFR_RNDD);
  }

  Mpfr e;
  // factor 2^{-c}
  Mpfr two, f;
  mpfr_set_ui(two.get(), 2, MPFR_RNDN);
  mpfr_neg(e.get(), c_hi.get(), MPFR_RNDN);
  mpfr_pow(f.get(), two.get(), e.get(), MPFR_RNDD);
  mpfr_mul(lo.get(), lo.get(), f.get(), MPFR_RNDD);
  mpfr_neg(e.get(), c_lo.get(), MPFR_RNDN);
  mpfr_pow(f.get(), two.get(), e.get(), MPFR_RNDU);
  mpfr_mul(hi.get(), hi.get(), f.get(), MPFR_RNDU);

  return {lo.exact(), hi.exact(), J};
}

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::BoundedAbove:
      return "above";
    case Verdict::BoundedBelow:
      return "below";
    case Verdict::Unbounded:
      return "unbounded";
  }
  return "unbounded";
}

ParityScan partial_quotient_scan(const CFExpansion& cf, int k) {
  require_periodic(cf);
  small_modulus(k);
  const auto P = static_cast<std::int64_t>(cf.prefix().size());
  const auto L = static_cast<std::int64_t>(cf.period().size());
  auto tail_divisible = [&](std::int64_t m) {
    const std::int64_t stop = std::max(m + 2, P) + 2 * L;
    for (std::int64_t i = m + 2; i < stop; i += 2) {
      if (cf.term_mod(i, k) != 0) return false;
    }
    return true;
  };

  ParityScan scan;
  CharState s{1, 0};
  std::map<std::tuple<std::int64_t, int, int>, std::int64_t> seen;
  for (std::int64_t m = -1;; ++m) {
    if (m >= 0) s = {s.v, (cf.term_mod(m, k) * s.v + s.u) % k};
    if (s.v == 0 && tail_divisible(m)) note(scan, m);
    if (m >= P - 1) {
      // From here on the future depends only on this key.
      if (!seen.emplace(std::make_tuple(mod(m + 1 - P, 2 * L), s.u, s.v), m).second) break;
    }
  }
  return scan;
}

ParityScan denominator_scan(const CFExpansion& cf, int k) {
  require_periodic(cf);
  small_modulus(k);
  const auto P = static_cast<std::int64_t>(cf.prefix().size());
  const auto L = static_cast<std::int64_t>(cf.period().size());

  // q[n + 1] = q_n mod k for n >= -1.
  std::vector<int> q{0};
  int prev = 1;
  auto extend = [&] {
    const auto n = static_cast<std::int64_t>(q.size()) - 1;  // next index
    const int next = (cf.term_mod(n, k) * q.back() + prev) % k;
    prev = q.back();
    q.push_back(next);
  };

  std::map<std::tuple<std::int64_t, int, int>, std::int64_t> seen;
  std::int64_t start = 0;
  std::int64_t period = 0;
  for (std::int64_t n = -1;; ++n) {
    while (static_cast<std::int64_t>(q.size()) < n + 2) extend();
    if (n >= P - 1) {
      const int before = n >= 0 ? q[static_cast<std::size_t>(n)] : 1;
      auto [it, inserted] =
          seen.emplace(std::make_tuple(mod(n + 1 - P, L), before, q[static_cast<std::size_t>(n + 1)]), n);
      if (!inserted) {
        start = it->second;
        period = n - it->second;
        break;
      }
    }
  }
  const std::int64_t last_m = start + 2 * period;
  while (static_cast<std::int64_t>(q.size()) < last_m + 2 * period + 4) extend();
  auto at = [&](std::int64_t n) { return q[static_cast<std::size_t>(n + 1)]; };

  ParityScan scan;
  for (std::int64_t m = -1; m <= last_m; ++m) {
    bool ok = true;
    const std::int64_t stop = std::max(m, start) + 2 * period;
    for (std::int64_t i = m; i <= stop && ok; i += 2) ok = at(i) == 0;
    if (ok) note(scan, m);
  }
  return scan;
}

QCondition check_q_condition(const CFExpansion& cf, int k, Parity parity) {
  const ParityScan scan = denominator_scan(cf, k);
  const auto& m = parity == Parity::Even ? scan.even : scan.odd;
  return {m.has_value(), m};
}

Classification classify(const CFExpansion& cf, std::int64_t h, std::int64_t k) {
  require_periodic(cf);
  const int kk = small_modulus(k);
  if (h <= 0 || h >= k || std::gcd(h, k) != 1) {
    throw DomainError("c = h/k must satisfy 0 < h < k with gcd(h, k) = 1");
  }
  const ParityScan a = partial_quotient_scan(cf, kk);
  const ParityScan q = denominator_scan(cf, kk);
  if (a.even != q.even || a.odd != q.odd) {
    throw ConsistencyError("classify: partial-quotient and denominator routes disagree for " + cf.str());
  }
  if (a.even && a.odd) {
    throw ConsistencyError("classify: both sides bounded for " + cf.str());
  }
  Classification out;
  if (a.even) {
    out = {Verdict::BoundedAbove, a.even, q.even};
  } else if (a.odd) {
    out = {Verdict::BoundedBelow, a.odd, q.odd};
  }
  return out;
}

nlohmann::json verdict_json(const CFExpansion& cf, std::int64_t h, std::int64_t k,
                            const Classification& c) {
  nlohmann::json out;
  out["alpha"] = cf.str();
  out["h"] = h;
  out["k"] = k;
  out["verdict"] = verdict_name(c.verdict);
  out["witness_m"] = c.witness_m ? nlohmann::json(*c.witness_m) : nlohmann::json(nullptr);
  out["condition2_m"] = c.condition2_m ? nlohmann::json(*c.condition2_m) : nlohmann::json(nullptr);
  return out;
}

CFExpansion construct_member(const Tuple& prefix, int k, Parity parity) {
  small_modulus(k);
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i] < (i == 0 ? 0 : 1)) {
      throw DomainError("prefix entry a_" + std::to_string(i) + " = " + std::to_string(prefix[i]) +
                        " is not a valid partial quotient");
    }
  }
  // Closing each letter's elementary run, innermost first, cancels the prefix
  // down to the empty word, so the result has character (1, 0).
  Tuple word = prefix;
  for (std::size_t i = prefix.size(); i-- > 0;) {
    const std::int64_t runs = elementary_run_length(prefix[i], k);
    const std::int64_t letter = prefix[i] % k == 0 ? k : prefix[i];
    word.insert(word.end(), static_cast<std::size_t>(runs - 1), letter);
  }
  const auto m_of = [&] { return static_cast<std::int64_t>(word.size()) - 1; };
  const bool want_odd = parity == Parity::Odd;
  if (is_odd(m_of()) != want_odd) {
    // (1, 1, k-1) maps (1, 0) back to (1, 0) and flips the parity of m.
    word.insert(word.end(), {1, 1, k - 1});
  }
  if (!is_type_k(word, k)) throw ConsistencyError("construct_member: accumulated word is not of type k");

  std::vector<BigInt> head;
  for (auto a : word) head.emplace_back(static_cast<long>(a));
  CFExpansion cf(std::move(head), {BigInt(1), BigInt(k)});

  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (cf.term(static_cast<std::int64_t>(i)) != prefix[i]) {
      throw ConsistencyError("construct_member: output does not extend the prefix");
    }
  }
  const Classification c = classify(cf, 1, k);
  const Verdict want = want_odd ? Verdict::BoundedBelow : Verdict::BoundedAbove;
  if (c.verdict != want) throw ConsistencyError("construct_member: classify disagrees for " + cf.str());
  return cf;
}

Extrema empirical_extrema(const AlphaHandle& alpha, const Ratio& c, std::int64_t N) {
  if (N < 1) throw DomainError("empirical_extrema: N must be >= 1");
  const DiscrepancyPath path = path_direct(alpha, c, N);
  Extrema e;
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    const std::int64_t v = path.values[i];
    if (v < e.min) {
      e.min = v;
      e.argmin = static_cast<std::int64_t>(i);
    }
    if (v > e.max) {
      e.max = v;
      e.argmax = static_cast<std::int64_t>(i);
    }
  }
  return e;
}

Enclosure g_function(const Ratio& c, const Ratio& tolerance) {
  if (c <= Ratio(1, 2)) throw DomainError("g(c) diverges for c <= 1/2");
  if (tolerance.sign() <= 0) throw DomainError("tolerance must be positive");
  for (std::int64_t J = 64; J <= (std::int64_t{1} << 26); J *= 4) {
    Enclosure e = enclose(c, J);
    if (e.hi - e.lo < tolerance) return e;
  }
  throw ResourceError("g(c): tolerance " + tolerance.str() + " not reached within the term budget");
}

DimBound cstar(const Ratio& tolerance) {
  if (tolerance.sign() <= 0) throw DomainError("tolerance must be positive");
  const Ratio one(1);
  // Refines the enclosure until it excludes 1; returns true when g(c) > 1.
  auto above_one = [&](const Ratio& c, Enclosure& out) {
    for (Ratio tol(1, BigInt(1) << 20);; tol = tol * Ratio(1, 16)) {
      out = g_function(c, tol);
      if (out.lo > one) return true;
      if (out.hi < one) return false;
    }
  };
  DimBound bound;
  bound.lo = Ratio(3, 5);
  bound.hi = Ratio(1);
  if (!above_one(bound.lo, bound.g_lo) || above_one(bound.hi, bound.g_hi)) {
    throw ConsistencyError("cstar: initial bracket does not straddle g = 1");
  }
  bound.samples.emplace_back(bound.lo, bound.g_lo);
  bound.samples.emplace_back(bound.hi, bound.g_hi);
  while (bound.hi - bound.lo >= tolerance) {
    const Ratio mid = (bound.lo + bound.hi) * Ratio(1, 2);
    Enclosure e;
    if (above_one(mid, e)) {
      bound.lo = mid;
      bound.g_lo = e;
    } else {
      bound.hi = mid;
      bound.g_hi = e;
    }
    bound.samples.emplace_back(mid, e);
  }
  return bound;
}

std::string decimal(const Ratio& x, int digits) {
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  const BigInt scaled = (x * Ratio(scale)).floor();
  const bool negative = scaled < 0;
  std::string body = BigInt(abs(scaled)).get_str();
  if (static_cast<int>(body.size()) <= digits) body.insert(0, static_cast<std::size_t>(digits) + 1 - body.size(), '0');
  body.insert(body.size() - static_cast<std::size_t>(digits), ".");
  return (negative ? "-" : "") + body;
}

}  // namespace osb
