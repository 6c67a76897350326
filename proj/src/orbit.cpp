#include "osb/orbit.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <mutex>

namespace osb {

using i128 = __int128;
using u128 = unsigned __int128;

namespace {

constexpr std::int64_t kChunk = std::int64_t{1} << 14;
constexpr int kMaxRefinements = 512;

void require_window(const Ratio& c) {
  if (c.sign() <= 0 || c >= Ratio(1)) throw DomainError("c must lie in (0, 1), got " + c.str());
}

BigInt mod_floor(const BigInt& a, const BigInt& m) {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

// Locates {j alpha} against num/den (0 < num/den < 1) from r = j p_N mod q_N.
// alpha - p_N/q_N has sign (+) for even N and magnitude < 1/(q_N q_{N+1}), so
// the point lies on a one-sided arc of width j/(q_N q_{N+1}) next to r/q_N.
// Returns -1 (point < c), +1 (point > c) or 0 (not settled at this level).
template <class I>
int locate(const I& j, const I& r, const I& num, const I& den, const I& q, const I& q1, bool even) {
  if (!(j < q1)) return 0;
  I rr = r;
  if (rr == 0 && !even) rr = q;
  I g = num * q - den * rr;
  if (g == 0) return even ? +1 : -1;
  I threshold = (den * j + q1 - 1) / q1;
  I mag = g;
  if (mag < 0) mag = -mag;
  if (mag < threshold) return 0;
  return g > 0 ? -1 : +1;
}

Side frac_compare_convergent(const AlphaHandle& alpha, const BigInt& j, const Ratio& c) {
  const BigInt h = c.num();
  const BigInt k = c.den();
  const BigInt target = 4 * j * k;
  std::int64_t n = 0;
  while (true) {
    auto t = alpha.table(n + 1);
    if (t->q(n) * t->q(n + 1) > target) break;
    ++n;
  }
  for (int round = 0; round < kMaxRefinements; ++round, n += 2) {
    auto t = alpha.table(n + 1);
    const BigInt& q = t->q(n);
    const BigInt r = mod_floor(j * t->p(n), q);
    const int s = locate<BigInt>(j, r, h, k, q, t->q(n + 1), n % 2 == 0);
    if (s != 0) return s < 0 ? Side::Less : Side::Greater;
  }
  throw ConsistencyError("frac_compare: refinement did not settle (point equals threshold?)");
}

Side frac_compare_surd(const AlphaHandle& alpha, const BigInt& j, const Ratio& c) {
  const Surd x = alpha.surd().scaled(j);
  const Ratio threshold = Ratio(x.floor()) + c;
  const auto ord = compare(x, threshold);
  if (ord == std::strong_ordering::equal) {
    throw ConsistencyError("frac_compare: {j alpha} equals c for irrational alpha");
  }
  return ord == std::strong_ordering::less ? Side::Less : Side::Greater;
}

// Fixed refinement level shared by a whole block of indices.
struct FastLevel {
  bool usable = false;
  bool even = true;
  std::uint64_t p_mod = 0;  // p_N mod q_N
  std::uint64_t q = 0;      // q_N
  std::uint64_t q1 = 0;     // q_{N+1}
};

// Smallest N with q_{N+1} >= den * jmax and q_{N+1} > jmax; with that level
// every locate() call settles.
FastLevel pick_level(const AlphaHandle& alpha, std::int64_t jmax, std::int64_t den) {
  FastLevel lv;
  if (den >= (std::int64_t{1} << 40) || jmax >= (std::int64_t{1} << 40)) return lv;
  const BigInt need = BigInt(den) * jmax;
  std::int64_t n = 0;
  while (true) {
    auto t = alpha.table(n + 1);
    if (t->q(n + 1) >= need && t->q(n + 1) > jmax) break;
    ++n;
  }
  auto t = alpha.table(n + 1);
  const BigInt limit = BigInt(1) << 62;
  if (t->q(n + 1) >= limit) return lv;
  lv.usable = true;
  lv.even = n % 2 == 0;
  lv.q = mpz_get_ui(t->q(n).get_mpz_t());
  lv.q1 = mpz_get_ui(t->q(n + 1).get_mpz_t());
  lv.p_mod = mpz_get_ui(mod_floor(t->p(n), t->q(n)).get_mpz_t());
  return lv;
}

class ErrorSlot {
 public:
  void capture() {
    std::lock_guard lock(mutex_);
    if (!error_) error_ = std::current_exception();
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

}  // namespace

// ---------------------------------------------------------------------------
// AlphaHandle

AlphaHandle AlphaHandle::from_cf(CFExpansion cf) {
  if (cf.is_rational()) throw DomainError("alpha must be irrational (periodic expansion)");
  Surd s = surd_from_cf(cf);
  return AlphaHandle(std::make_shared<const State>(std::move(cf), std::move(s), false));
}

AlphaHandle AlphaHandle::from_surd(const Surd& x) {
  CFExpansion cf = cf_from_surd(x);
  return AlphaHandle(std::make_shared<const State>(std::move(cf), x, true));
}

std::int64_t AlphaHandle::level_at_most(const BigInt& bound) const {
  std::int64_t n = 0;
  while (table(n + 1)->q(n + 1) <= bound) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// comparisons

Side frac_compare(const AlphaHandle& alpha, const BigInt& j, const Ratio& c, Backend backend) {
  require_window(c);
  if (j < 1) throw DomainError("frac_compare: j must be >= 1");
  switch (backend) {
    case Backend::Convergent:
      return frac_compare_convergent(alpha, j, c);
    case Backend::Surd:
      return frac_compare_surd(alpha, j, c);
    case Backend::CrossCheck: {
      const Side a = frac_compare_convergent(alpha, j, c);
      const Side b = frac_compare_surd(alpha, j, c);
      if (a != b) {
        throw ConsistencyError("frac_compare back-ends disagree at j = " + j.get_str());
      }
      return a;
    }
  }
  throw DomainError("unknown backend");
}

int xi(const AlphaHandle& alpha, const BigInt& j, const Ratio& c, Backend backend) {
  return frac_compare(alpha, j, c, backend) == Side::Less ? 1 : 0;
}

BigInt cell_index(const AlphaHandle& alpha, const BigInt& j, const BigInt& m) {
  if (m < 1) throw DomainError("cell_index: m must be >= 1");
  const Surd& x = alpha.surd();
  return x.scaled(j * m).floor() - m * x.scaled(j).floor();
}

void xi_block_serial(const AlphaHandle& alpha, const Ratio& c, std::int64_t first,
                     std::span<std::uint8_t> out) {
  require_window(c);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(xi(alpha, BigInt(first) + static_cast<long>(i), c));
  }
}

void xi_block(const AlphaHandle& alpha, const Ratio& c, std::int64_t first,
              std::span<std::uint8_t> out) {
  require_window(c);
  if (first < 1) throw DomainError("xi_block: indices start at 1");
  if (out.empty()) return;
  const auto count = static_cast<std::int64_t>(out.size());
  const std::int64_t jmax = first + count - 1;
  const bool small_c = mpz_fits_slong_p(c.den().get_mpz_t()) != 0;
  const FastLevel lv = small_c ? pick_level(alpha, jmax, c.den().get_si()) : FastLevel{};
  const i128 h = small_c ? c.num().get_si() : 0;
  const i128 k = small_c ? c.den().get_si() : 0;
  const std::int64_t chunks = (count + kChunk - 1) / kChunk;
  ErrorSlot error;

#pragma omp parallel for schedule(static)
  for (std::int64_t ci = 0; ci < chunks; ++ci) {
    try {
      const std::int64_t lo = ci * kChunk;
      const std::int64_t hi = std::min(count, lo + kChunk);
      if (!lv.usable) {
        for (std::int64_t i = lo; i < hi; ++i) {
          out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(xi(alpha, BigInt(first + i), c));
        }
        continue;
      }
      const i128 q = lv.q;
      const i128 q1 = lv.q1;
      std::uint64_t r = static_cast<std::uint64_t>(
          (static_cast<u128>(static_cast<std::uint64_t>(first + lo) % lv.q) * lv.p_mod) % lv.q);
      for (std::int64_t i = lo; i < hi; ++i) {
        const std::int64_t j = first + i;
        const int s = locate<i128>(j, r, h, k, q, q1, lv.even);
        std::uint8_t bit;
        if (s != 0) {
          bit = s < 0 ? 1 : 0;
        } else {
          bit = static_cast<std::uint8_t>(xi(alpha, BigInt(j), c));
        }
        out[static_cast<std::size_t>(i)] = bit;
        r += lv.p_mod;
        if (r >= lv.q) r -= lv.q;
      }
    } catch (...) {
      error.capture();
    }
  }
  error.rethrow();
}

void cell_block(const AlphaHandle& alpha, std::int64_t m, std::int64_t first,
                std::span<std::int64_t> out) {
  if (m < 1) throw DomainError("cell_block: m must be >= 1");
  if (first < 1) throw DomainError("cell_block: indices start at 1");
  if (out.empty()) return;
  const auto count = static_cast<std::int64_t>(out.size());
  const std::int64_t jmax = first + count - 1;
  const FastLevel lv = pick_level(alpha, jmax, m);
  const std::int64_t chunks = (count + kChunk - 1) / kChunk;
  ErrorSlot error;

#pragma omp parallel for schedule(static)
  for (std::int64_t ci = 0; ci < chunks; ++ci) {
    try {
      const std::int64_t lo = ci * kChunk;
      const std::int64_t hi = std::min(count, lo + kChunk);
      std::uint64_t r = 0;
      if (lv.usable) {
        r = static_cast<std::uint64_t>(
            (static_cast<u128>(static_cast<std::uint64_t>(first + lo) % lv.q) * lv.p_mod) % lv.q);
      }
      for (std::int64_t i = lo; i < hi; ++i) {
        const std::int64_t j = first + i;
        bool settled = false;
        std::int64_t cell = 0;
        if (lv.usable) {
          const i128 q = lv.q;
          const i128 q1 = lv.q1;
          const i128 mm = m;
          // Candidate cell from the nearby grid point, then confirm both walls.
          const i128 rr = (r == 0 && !lv.even) ? q : static_cast<i128>(r);
          const i128 t = lv.even ? (mm * rr) / q : (mm * rr - 1) / q;
          bool ok = t >= 0 && t < mm;
          if (ok && t >= 1) ok = locate<i128>(j, r, t, mm, q, q1, lv.even) > 0;
          if (ok && t + 1 <= mm - 1) ok = locate<i128>(j, r, t + 1, mm, q, q1, lv.even) < 0;
          if (ok) {
            settled = true;
            cell = static_cast<std::int64_t>(t);
          }
          r += lv.p_mod;
          if (r >= lv.q) r -= lv.q;
        }
        if (!settled) cell = cell_index(alpha, BigInt(j), BigInt(m)).get_si();
        out[static_cast<std::size_t>(i)] = cell;
      }
    } catch (...) {
      error.capture();
    }
  }
  error.rethrow();
}

// ---------------------------------------------------------------------------
// lambda tables and crossings

LambdaTable lambda_table(const AlphaHandle& alpha, std::int64_t n, std::int64_t max_size) {
  if (n < 0) throw DomainError("lambda_table: n must be >= 0");
  auto t = alpha.table(n);
  if (t->q(n) > max_size) {
    throw ResourceError("lambda_table: q_" + std::to_string(n) + " = " + t->q(n).get_str() +
                        " exceeds the table budget");
  }
  const std::int64_t q = t->q(n).get_si();
  LambdaTable table;
  table.n = n;
  table.entries.resize(static_cast<std::size_t>(q));
  // p_n^{-1} = (-1)^{n-1} q_{n-1} (mod q_n)
  BigInt inv = (n % 2 == 1) ? t->q(n - 1) : BigInt(-t->q(n - 1));
  const auto inv_mod = static_cast<std::uint64_t>(mod_floor(inv, t->q(n)).get_si());
  for (std::int64_t i = 0; i < q; ++i) {
    const auto v = static_cast<std::int64_t>((static_cast<u128>(i) * inv_mod) % static_cast<u128>(q));
    table.entries[static_cast<std::size_t>(i)] = v == 0 ? q : v;
  }
  return table;
}

BigInt lambda_at(const AlphaHandle& alpha, std::int64_t n, const BigInt& i) {
  if (n < 0) throw DomainError("lambda_at: n must be >= 0");
  auto t = alpha.table(n);
  const BigInt& q = t->q(n);
  const BigInt inv = (n % 2 == 1) ? t->q(n - 1) : BigInt(-t->q(n - 1));
  BigInt v = mod_floor(mod_floor(i, q) * inv, q);
  return v == 0 ? q : v;
}

BigInt critical_lambda(const AlphaHandle& alpha, const Ratio& c, std::int64_t n) {
  require_window(c);
  const BigInt q = alpha.q(n);
  BigInt idx;
  mpz_fdiv_q(idx.get_mpz_t(), BigInt(c.num() * q).get_mpz_t(), c.den().get_mpz_t());
  if (n % 2 == 1) {
    idx += 1;
    if (idx == q) idx = 0;
  }
  return lambda_at(alpha, n, idx);
}

Crossing l_n(const AlphaHandle& alpha, const Ratio& c, std::int64_t n) {
  require_window(c);
  if (n < 0) throw DomainError("l_n: n must be >= 0");
  auto t = alpha.table(n + 1);
  const BigInt& q = t->q(n);
  const BigInt& q_next = t->q(n + 1);
  if (mod_floor(q, c.den()) == 0) {
    throw DomainError("l_n is undefined when k divides q_" + std::to_string(n));
  }
  const BigInt lambda = critical_lambda(alpha, c, n);
  if (q_next < lambda) return std::nullopt;
  // The critical points lambda + l q_n move monotonically inside one cell, so
  // the crossing predicate is monotone in l.
  const Side crossing = (n % 2 == 0) ? Side::Greater : Side::Less;
  auto crossed = [&](const BigInt& l) { return frac_compare(alpha, lambda + l * q, c) == crossing; };
  BigInt hi = (q_next - lambda) / q;
  if (!crossed(hi)) return std::nullopt;
  BigInt lo = -1;
  while (hi - lo > 1) {
    const BigInt mid = (lo + hi) / 2;
    if (crossed(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// ---------------------------------------------------------------------------
// three-distance placement

namespace {

std::string describe(std::int64_t j, std::int64_t got, std::int64_t want) {
  return "j=" + std::to_string(j) + " cell=" + std::to_string(got) + " expected " + std::to_string(want);
}

ThreeDistanceReport exhaustive_check(const AlphaHandle& alpha, std::int64_t n, std::int64_t q,
                                     std::int64_t q_next) {
  ThreeDistanceReport rep;
  rep.n = n;
  rep.mode = "exhaustive";
  std::vector<std::int64_t> cells(static_cast<std::size_t>(q_next));
  cell_block(alpha, q, 1, cells);
  rep.points_checked = static_cast<std::uint64_t>(q_next);
  auto cell = [&](std::int64_t j) { return cells[static_cast<std::size_t>(j - 1)]; };

  std::vector<std::int64_t> owner(static_cast<std::size_t>(q), 0);
  for (std::int64_t j = 1; j <= q; ++j) {
    auto& slot = owner[static_cast<std::size_t>(cell(j))];
    if (slot != 0) {
      rep.pass = false;
      rep.counterexample = "cell " + std::to_string(cell(j)) + " holds j=" + std::to_string(slot) +
                           " and j=" + std::to_string(j);
      return rep;
    }
    slot = j;
  }
  const LambdaTable lt = lambda_table(alpha, n);
  for (std::int64_t i = 0; i < q; ++i) {
    const std::int64_t lam = lt.entries[static_cast<std::size_t>(i)];
    const std::int64_t want = (n % 2 == 0) ? i : (i == 0 ? q - 1 : i - 1);
    if (cell(lam) != want) {
      rep.pass = false;
      rep.counterexample = "placement law: " + describe(lam, cell(lam), want);
      return rep;
    }
  }
  for (std::int64_t idx = q + 1; idx <= q_next; ++idx) {
    const std::int64_t j = (idx - 1) % q + 1;
    if (cell(idx) != cell(j)) {
      rep.pass = false;
      rep.counterexample = "block constancy: " + describe(idx, cell(idx), cell(j));
      return rep;
    }
  }
  return rep;
}

ThreeDistanceReport certificate_check(const AlphaHandle& alpha, std::int64_t n) {
  ThreeDistanceReport rep;
  rep.n = n;
  rep.mode = "certificate";
  auto t = alpha.table(n + 1);
  const BigInt& p = t->p(n);
  const BigInt& q = t->q(n);
  const BigInt& q_next = t->q(n + 1);
  const bool even = n % 2 == 0;
  const Ratio center(p, q);
  const Ratio reach = center + Ratio(BigInt(even ? 1 : -1), q * q_next);
  const auto side = compare(alpha.surd(), center);
  const auto bound = compare(alpha.surd(), reach);
  if (gcd(p, q) != 1) {
    rep.pass = false;
    rep.counterexample = "gcd(p_n, q_n) != 1";
    return rep;
  }
  if (side != (even ? std::strong_ordering::greater : std::strong_ordering::less) ||
      bound != (even ? std::strong_ordering::less : std::strong_ordering::greater)) {
    rep.pass = false;
    rep.counterexample = "alpha - p_n/q_n outside (0, (-1)^n/(q_n q_{n+1}))";
    return rep;
  }
  // Direct spot checks at both ends of the first block and at the last lifts.
  std::vector<BigInt> probes;
  for (long j = 1; j <= 64 && q >= j; ++j) {
    probes.emplace_back(j);
    probes.emplace_back(q - j + 1);
    const BigInt jj = q - j + 1;
    if (q_next >= jj) probes.push_back(jj + ((q_next - jj) / q) * q);
  }
  for (const auto& j : probes) {
    const BigInt residue = mod_floor(j * p, q);
    const BigInt want = even ? residue : mod_floor(residue - 1, q);
    const BigInt got = cell_index(alpha, j, q);
    ++rep.points_checked;
    if (got != want) {
      rep.pass = false;
      rep.counterexample = "j=" + j.get_str() + " cell=" + got.get_str() + " expected " + want.get_str();
      return rep;
    }
  }
  return rep;
}

}  // namespace

ThreeDistanceReport three_distance_check(const AlphaHandle& alpha, std::int64_t n,
                                         std::uint64_t exhaustive_budget) {
  if (n < 1) throw DomainError("three_distance_check: n must be >= 1");
  auto t = alpha.table(n + 1);
  const BigInt& q_next = t->q(n + 1);
  if (q_next <= BigInt(static_cast<unsigned long>(exhaustive_budget))) {
    return exhaustive_check(alpha, n, t->q(n).get_si(), q_next.get_si());
  }
  return certificate_check(alpha, n);
}

}  // namespace osb
