#include "osb/discrepancy.hpp"

#include <algorithm>
#include <ostream>
#include <set>

namespace osb {

namespace {

struct Window {
  std::int64_t h;
  std::int64_t k;
};

Window window_of(const Ratio& c) {
  if (c.sign() <= 0 || c >= Ratio(1)) throw DomainError("c must lie in (0, 1), got " + c.str());
  if (c.den() >= BigInt(1) << 31) throw DomainError("denominator of c too large: " + c.str());
  return {c.num().get_si(), c.den().get_si()};
}

BigInt mod_floor(const BigInt& a, const BigInt& m) {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

BigInt div_floor(const BigInt& a, const BigInt& m) {
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

// sum_{i=0}^{n-1} floor((a i + b) / m), m > 0.
BigInt floor_sum(BigInt n, BigInt m, BigInt a, BigInt b) {
  BigInt ans = 0;
  if (a < 0 || a >= m) {
    const BigInt a2 = mod_floor(a, m);
    ans += n * (n - 1) / 2 * ((a - a2) / m);
    a = a2;
  }
  if (b < 0 || b >= m) {
    const BigInt b2 = mod_floor(b, m);
    ans += n * ((b - b2) / m);
    b = b2;
  }
  while (true) {
    if (a >= m) {
      ans += n * (n - 1) / 2 * (a / m);
      a %= m;
    }
    if (b >= m) {
      ans += n * (b / m);
      b %= m;
    }
    const BigInt y_max = a * n + b;
    if (y_max < m) break;
    n = y_max / m;
    b = y_max % m;
    std::swap(m, a);
  }
  return ans;
}

std::optional<std::int64_t> small_crossing(const Crossing& l) {
  if (!l || !mpz_fits_slong_p(l->get_mpz_t())) return std::nullopt;
  return l->get_si();
}

std::string show(const Crossing& l) { return l ? l->get_str() : std::string("inf"); }

DiscrepancyPath accumulate(const Ratio& c, const std::vector<std::uint8_t>& bits) {
  const Window w = window_of(c);
  DiscrepancyPath path{c, std::vector<std::int64_t>(bits.size() + 1, 0)};
  for (std::size_t i = 0; i < bits.size(); ++i) {
    path.values[i + 1] = path.values[i] + w.k * bits[i] - w.h;
  }
  return path;
}

}  // namespace

int DiscrepancyPath::xi_at(std::int64_t n) const {
  const std::int64_t k = c.den().get_si();
  const std::int64_t h = c.num().get_si();
  return static_cast<int>((values.at(static_cast<std::size_t>(n)) -
                           values.at(static_cast<std::size_t>(n - 1)) + h) / k);
}

DiscrepancyPath path_direct(const AlphaHandle& alpha, const Ratio& c, std::int64_t N) {
  if (N < 0) throw DomainError("path length must be >= 0");
  window_of(c);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(N));
  xi_block(alpha, c, 1, bits);
  return accumulate(c, bits);
}

DiscrepancyPath path_direct_serial(const AlphaHandle& alpha, const Ratio& c, std::int64_t N) {
  if (N < 0) throw DomainError("path length must be >= 0");
  window_of(c);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(N));
  xi_block_serial(alpha, c, 1, bits);
  return accumulate(c, bits);
}

BigInt kd_at(const AlphaHandle& alpha, const Ratio& c, const BigInt& M) {
  window_of(c);
  if (M < 0) throw DomainError("kd_at: index must be >= 0");
  if (M == 0) return 0;
  const BigInt h = c.num();
  const BigInt k = c.den();
  // Even level N with q_{N+1} >= k M: there {j alpha} < c iff (j p_N mod q_N) < ceil(h q_N / k).
  const BigInt need = k * M;
  std::int64_t n = 0;
  while (true) {
    auto t = alpha.table(n + 1);
    if (t->q(n + 1) >= need && t->q(n + 1) > M) break;
    n += 2;
  }
  auto t = alpha.table(n + 1);
  const BigInt& p = t->p(n);
  const BigInt& q = t->q(n);
  const BigInt bound = -div_floor(-(h * q), k);
  const BigInt count = floor_sum(M, q, p, p) - floor_sum(M, q, p, p - bound);
  return k * count - h * M;
}

ExtremaTrack running_extrema(const DiscrepancyPath& path) {
  if (path.values.empty()) throw DomainError("running_extrema: empty path");
  ExtremaTrack track;
  track.max.resize(path.values.size());
  track.min.resize(path.values.size());
  std::int64_t hi = path.values[0];
  std::int64_t lo = path.values[0];
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    hi = std::max(hi, path.values[i]);
    lo = std::min(lo, path.values[i]);
    track.max[i] = hi;
    track.min[i] = lo;
  }
  return track;
}

TemplatePair templates(const AlphaHandle& alpha, const Ratio& c, std::int64_t n,
                       std::int64_t max_size) {
  const Window w = window_of(c);
  if (n < 0) throw DomainError("templates: n must be >= 0");
  auto t = alpha.table(n + 1);
  if (t->q(n) > max_size) throw ResourceError("templates: q_n exceeds the size budget");
  const std::int64_t q = t->q(n).get_si();
  if (q % w.k == 0) throw DomainError("templates: k divides q_" + std::to_string(n));

  TemplatePair tp;
  tp.n = n;
  tp.l_n = l_n(alpha, c, n);
  tp.lambda = critical_lambda(alpha, c, n).get_si();
  tp.hat.assign(static_cast<std::size_t>(q) + 1, 0);
  tp.check.assign(static_cast<std::size_t>(q) + 1, 0);

  // Shifted residue s = (j p_n - offset) mod q_n: s < [c q_n] inside the
  // window, s = [c q_n] the critical index, larger outside.
  const std::int64_t offset = n % 2;
  const std::int64_t inside = (w.h * q) / w.k;
  const std::int64_t p_mod = mod_floor(t->p(n), t->q(n)).get_si();
  std::int64_t r = 0;
  for (std::int64_t j = 1; j <= q; ++j) {
    r += p_mod;
    if (r >= q) r -= q;
    const std::int64_t s = (r - offset + q) % q;
    if (s == inside && j != tp.lambda) {
      throw ConsistencyError("templates: critical residue at j = " + std::to_string(j) +
                             " but lambda = " + std::to_string(tp.lambda));
    }
    const std::int64_t xi_hat = s <= inside ? 1 : 0;
    const std::int64_t xi_check = s < inside ? 1 : 0;
    const auto i = static_cast<std::size_t>(j);
    tp.hat[i] = tp.hat[i - 1] + w.k * xi_hat - w.h;
    tp.check[i] = tp.check[i - 1] + w.k * xi_check - w.h;
  }
  return tp;
}

DiscrepancyPath path_recursive(const AlphaHandle& alpha, const Ratio& c, std::int64_t N,
                               std::vector<LevelStep>* trace) {
  const Window w = window_of(c);
  if (N < 0) throw DomainError("path length must be >= 0");

  std::int64_t n = 0;
  while (true) {
    const BigInt next = alpha.q(n + 1);
    if (next * next > N) break;
    ++n;
  }
  const std::int64_t base = std::min<std::int64_t>(alpha.q(n).get_si(), N);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(base));
  xi_block(alpha, c, 1, bits);
  DiscrepancyPath path = accumulate(c, bits);
  path.values.resize(static_cast<std::size_t>(N) + 1, 0);
  auto& v = path.values;
  if (trace) trace->push_back({n, base, false, std::nullopt, 0, base});

  std::int64_t built = base;
  for (; built < N; ++n) {
    auto t = alpha.table(n + 1);
    const std::int64_t q = t->q(n).get_si();
    if (q != built) throw ConsistencyError("path_recursive: level bookkeeping lost");
    const std::int64_t target = t->q(n + 1) < N ? t->q(n + 1).get_si() : N;
    const std::int64_t vq = v[static_cast<std::size_t>(q)];
    LevelStep step{n, q, q % w.k == 0, std::nullopt, 0, target};

    if (step.divisible) {
      if (vq != 0) {
        throw ConsistencyError("path_recursive: k | q_" + std::to_string(n) + " but v_q = " +
                               std::to_string(vq));
      }
      for (std::int64_t idx = q + 1; idx <= target; ++idx) {
        v[static_cast<std::size_t>(idx)] = v[static_cast<std::size_t>((idx - 1) % q + 1)];
      }
    } else {
      const bool even = n % 2 == 0;
      step.l_n = l_n(alpha, c, n);
      step.lambda = critical_lambda(alpha, c, n).get_si();
      const auto ln = small_crossing(step.l_n);
      const bool crossed_at_start = ln && *ln == 0;
      const std::int64_t hq = (w.h * (q % w.k)) % w.k;
      const std::int64_t expected = even == crossed_at_start ? -hq : w.k - hq;
      if (vq != expected) {
        throw ConsistencyError("path_recursive: v_q at level " + std::to_string(n) + " is " +
                               std::to_string(vq) + ", case analysis gives " +
                               std::to_string(expected) + " (l_n = " + show(step.l_n) + ")");
      }
      const int xi_lambda = path.xi_at(step.lambda);
      const int xi_expected = even == crossed_at_start ? 0 : 1;
      if (xi_lambda != xi_expected) {
        throw ConsistencyError("path_recursive: xi at the critical index contradicts l_n at level " +
                               std::to_string(n));
      }
      const std::int64_t sign = even ? -1 : 1;
      const bool lifts = ln && *ln >= 1;
      for (std::int64_t idx = q + 1; idx <= target; ++idx) {
        const std::int64_t l = (idx - 1) / q;
        const std::int64_t j = idx - l * q;
        std::int64_t corr = 0;
        if (lifts && l >= *ln) corr = sign * w.k * (l - *ln + (j >= step.lambda ? 1 : 0));
        v[static_cast<std::size_t>(idx)] = l * vq + v[static_cast<std::size_t>(j)] + corr;
      }
    }
    if (trace) trace->push_back(step);
    built = target;
  }
  return path;
}

BackwardsReport backwards_check(const AlphaHandle& alpha, const Ratio& c, std::int64_t n,
                                std::uint64_t budget, std::uint64_t seed, int samples) {
  const Window w = window_of(c);
  if (n < 0 || n % 2 != 0) throw DomainError("backwards_check: n must be even and >= 0");
  auto t = alpha.table(n + 1);
  const BigInt& q = t->q(n);
  const BigInt& q_prev = t->q(n - 1);
  const BigInt& q_next = t->q(n + 1);
  if (mod_floor(q, c.den()) == 0) throw DomainError("backwards_check: k divides q_n");
  const BigInt a = alpha.cf().term(n + 1);

  BackwardsReport rep;
  rep.n = n;
  rep.l_n = l_n(alpha, c, n);
  const BigInt lambda = critical_lambda(alpha, c, n);
  rep.lambda = lambda.get_si();
  rep.exhaustive = q_next <= BigInt(static_cast<unsigned long>(budget));

  std::optional<DiscrepancyPath> path;
  if (rep.exhaustive) path = path_direct(alpha, c, q_next.get_si());
  auto value = [&](const BigInt& i) -> BigInt {
    if (path) return BigInt(static_cast<long>(path->values[i.get_ui()]));
    return kd_at(alpha, c, i);
  };

  const bool finite_positive = rep.l_n && *rep.l_n >= 1;
  auto guard_printed = [&](const BigInt& j) { return finite_positive && j < lambda && lambda <= q_prev; };
  auto guard_derived = [&](const BigInt& l, const BigInt& j) {
    return finite_positive && *rep.l_n <= l - 1 && j < lambda;
  };
  auto record = [&](IdentityReport& r, const BigInt& lhs, bool rhs, const std::string& where) {
    ++r.evaluated;
    const BigInt want = rhs ? BigInt(w.k) : BigInt(0);
    if (lhs != want && r.pass) {
      r.pass = false;
      r.counterexample = where + ": left " + lhs.get_str() + ", right " + want.get_str();
    }
  };

  if (rep.exhaustive) {
    const auto& v = path->values;
    const std::int64_t qi = q.get_si();
    const std::int64_t qp = q_prev.get_si();
    const std::int64_t qn = q_next.get_si();
    const std::int64_t ai = a.get_si();
    const std::int64_t lam = rep.lambda;
    const std::int64_t ln = finite_positive ? rep.l_n->get_si() : -1;
    const bool guard_tail = finite_positive && lam <= qp;
    auto check = [&](IdentityReport& r, std::int64_t lhs, bool rhs, auto&& where) {
      ++r.evaluated;
      const std::int64_t want = rhs ? w.k : 0;
      if (lhs != want && r.pass) {
        r.pass = false;
        r.counterexample = where() + ": left " + std::to_string(lhs) + ", right " + std::to_string(want);
      }
    };
    for (std::int64_t j = 0; j <= qp; ++j) {
      const std::int64_t lhs = (v[ai * qi + j] - v[qn]) - (v[j] - v[qp]);
      check(rep.first, lhs, guard_tail && j < lam, [&] { return "j=" + std::to_string(j); });
    }
    for (std::int64_t l = 1; l <= ai; ++l) {
      for (std::int64_t j = 0; j <= qi; ++j) {
        const std::int64_t lhs = (v[(l - 1) * qi + j] - v[l * qi]) - (v[j] - v[qi]);
        auto where = [&] { return "l=" + std::to_string(l) + " j=" + std::to_string(j); };
        check(rep.second_printed, lhs, guard_tail && j < lam, where);
        check(rep.second_derived, lhs, finite_positive && ln <= l - 1 && j < lam, where);
      }
    }
    return rep;
  }

  // Boundary indices plus seeded samples, evaluated by floor sums.
  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(static_cast<unsigned long>(seed));
  auto pick = [&](const BigInt& lo, const BigInt& hi, std::initializer_list<BigInt> marks) {
    std::set<BigInt> out;
    if (hi < lo) return out;
    for (const auto& m : marks) {
      for (int d = -1; d <= 1; ++d) {
        const BigInt x = m + d;
        if (x >= lo && x <= hi) out.insert(x);
      }
    }
    for (int s = 0; s < samples; ++s) out.insert(lo + rng.get_z_range(BigInt(hi - lo + 1)));
    return out;
  };

  const BigInt v_next = value(q_next);
  const BigInt v_prev = value(q_prev);
  for (const auto& j : pick(0, q_prev, {BigInt(0), lambda, q_prev})) {
    const BigInt lhs = (value(a * q + j) - v_next) - (value(j) - v_prev);
    record(rep.first, lhs, guard_printed(j), "j=" + j.get_str());
  }

  const BigInt v_q = value(q);
  const std::set<BigInt> js = pick(0, q, {BigInt(0), lambda, q});
  const BigInt ln_mark = rep.l_n ? *rep.l_n : BigInt(1);
  for (const auto& l : pick(1, a, {BigInt(1), ln_mark, ln_mark + 1, a})) {
    const BigInt v_lq = value(l * q);
    for (const auto& j : js) {
      const BigInt lhs = (value((l - 1) * q + j) - v_lq) - (value(j) - v_q);
      const std::string where = "l=" + l.get_str() + " j=" + j.get_str();
      record(rep.second_printed, lhs, guard_printed(j), where);
      record(rep.second_derived, lhs, guard_derived(l, j), where);
    }
  }
  return rep;
}

ResidueReport dqn_residue_check(const AlphaHandle& alpha, const Ratio& c, std::int64_t n_max) {
  const Window w = window_of(c);
  ResidueReport rep;
  for (std::int64_t n = 0; n <= n_max; ++n) {
    ++rep.levels;
    const BigInt q = alpha.q(n);
    const BigInt vq = kd_at(alpha, c, q);
    std::string problem;
    if (mod_floor(q, c.den()) == 0) {
      if (vq != 0) problem = "k | q_n but v_q = " + vq.get_str();
    } else {
      const Crossing ln = l_n(alpha, c, n);
      const bool crossed_at_start = ln && *ln == 0;
      const bool even = n % 2 == 0;
      const bool want_negative = even == crossed_at_start;
      if (abs(vq) >= w.k) {
        problem = "|v_q| = " + vq.get_str() + " >= k";
      } else if (mod_floor(vq + c.num() * q, c.den()) != 0) {
        problem = "v_q = " + vq.get_str() + " not congruent to -h q_n";
      } else if ((vq < 0) != want_negative || vq == 0) {
        problem = "v_q = " + vq.get_str() + " has the wrong sign for l_n = " + show(ln);
      }
    }
    if (!problem.empty()) {
      rep.pass = false;
      rep.counterexample = "n=" + std::to_string(n) + ": " + problem;
      return rep;
    }
  }
  return rep;
}

void write_csv(std::ostream& os, const DiscrepancyPath& path) {
  const ExtremaTrack track = running_extrema(path);
  os << "n,xi_n,kDn,runmax,runmin\n";
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    const int bit = i == 0 ? 0 : path.xi_at(static_cast<std::int64_t>(i));
    os << i << ',' << bit << ',' << path.values[i] << ',' << track.max[i] << ',' << track.min[i] << '\n';
  }
}

}  // namespace osb
