#include "doctest.h"

#include <mpfr.h>

#include <numeric>
#include <sstream>

#include "osb/discrepancy.hpp"
#include "osb/error.hpp"

using namespace osb;

namespace {

AlphaHandle silver() { return AlphaHandle::from_surd(parse_surd("(-1+1*sqrt(2))/1")); }
AlphaHandle golden() { return AlphaHandle::from_surd(parse_surd("(-1+1*sqrt(5))/2")); }

// k*D_n by counting {j alpha} < h/k in 512-bit floating point, alpha = (a + sqrt(d)) / e.
std::vector<std::int64_t> float_path(long a, long d, long e, long h, long k, long N) {
  mpfr_t alpha, x, c;
  mpfr_inits2(512, alpha, x, c, static_cast<mpfr_ptr>(nullptr));
  mpfr_sqrt_ui(alpha, static_cast<unsigned long>(d), MPFR_RNDN);
  mpfr_add_si(alpha, alpha, a, MPFR_RNDN);
  mpfr_div_si(alpha, alpha, e, MPFR_RNDN);
  mpfr_set_si(c, h, MPFR_RNDN);
  mpfr_div_si(c, c, k, MPFR_RNDN);
  std::vector<std::int64_t> out{0};
  std::int64_t count = 0;
  for (long j = 1; j <= N; ++j) {
    mpfr_mul_si(x, alpha, j, MPFR_RNDN);
    mpfr_frac(x, x, MPFR_RNDN);
    if (mpfr_less_p(x, c)) ++count;
    out.push_back(k * count - h * j);
  }
  mpfr_clears(alpha, x, c, static_cast<mpfr_ptr>(nullptr));
  return out;
}

}  // namespace

TEST_CASE("direct path fixture") {
  const DiscrepancyPath p = path_direct(silver(), Ratio(1, 2), 7);
  CHECK(p.values == std::vector<std::int64_t>{0, 1, 0, 1, 0, 1, 2, 1});
  CHECK(p.length() == 7);
  CHECK(p.xi_at(6) == 1);
  CHECK(p.xi_at(7) == 0);
  CHECK(path_direct_serial(silver(), Ratio(1, 2), 7).values == p.values);
}

TEST_CASE("direct path against a floating oracle") {
  CHECK(path_direct(silver(), Ratio(3, 7), 5000).values == float_path(-1, 2, 1, 3, 7, 5000));
  CHECK(path_direct(golden(), Ratio(1, 3), 5000).values == float_path(-1, 5, 2, 1, 3, 5000));
  const AlphaHandle t = AlphaHandle::from_surd(parse_surd("(-3+1*sqrt(13))/2"));
  CHECK(path_direct(t, Ratio(4, 5), 5000).values == float_path(-3, 13, 2, 4, 5, 5000));
}

TEST_CASE("parallel and serial direct paths agree") {
  const AlphaHandle a = AlphaHandle::from_cf(parse_cf("0;1,4;(2,5,3)"));
  CHECK(path_direct(a, Ratio(2, 5), 30000).values == path_direct_serial(a, Ratio(2, 5), 30000).values);
}

TEST_CASE("single-index evaluation") {
  const AlphaHandle a = AlphaHandle::from_cf(parse_cf("1;2;(3,1,4)"));
  const Ratio c(5, 7);
  const DiscrepancyPath p = path_direct(a, c, 3000);
  for (std::int64_t M = 0; M <= 3000; M += 7) CHECK(kd_at(a, c, BigInt(M)) == p.values[M]);
}

TEST_CASE("running extrema") {
  const ExtremaTrack t = running_extrema(path_direct(silver(), Ratio(1, 2), 7));
  CHECK(t.max == std::vector<std::int64_t>{0, 1, 1, 1, 1, 1, 2, 2});
  CHECK(t.min == std::vector<std::int64_t>(8, 0));
  const ExtremaTrack long_run = running_extrema(path_direct(silver(), Ratio(1, 2), 10000));
  CHECK(long_run.min[10000] == long_run.min[100]);
}

TEST_CASE("templates") {
  const TemplatePair t = templates(silver(), Ratio(1, 2), 2);
  REQUIRE(t.hat.size() == 6);
  CHECK(t.hat[5] == 1);
  CHECK(t.check[5] == -1);
  CHECK(t.hat[0] == 0);

  const std::vector<std::pair<const char*, Ratio>> cases{
      {"0;(2)", Ratio(1, 2)}, {"0;(1)", Ratio(1, 3)}, {"2;3,3;(3,1,5,1)", Ratio(2, 5)}, {"0;(1,4)", Ratio(5, 7)}};
  for (const auto& [text, c] : cases) {
    const AlphaHandle a = AlphaHandle::from_cf(parse_cf(text));
    const std::int64_t k = c.den().get_si();
    for (std::int64_t n = 0; n <= 8; ++n) {
      if (a.q(n) % c.den() == 0) continue;
      const TemplatePair tp = templates(a, c, n);
      const std::int64_t q = a.q(n).get_si();
      CHECK(tp.hat[q] - tp.check[q] == k);
      // Odd levels cross into the window instead of out of it, so the roles swap.
      const bool crossed_late = !tp.l_n || *tp.l_n >= 1;
      const DiscrepancyPath p = path_direct(a, c, q);
      const bool expect_hat = (n % 2 == 0) == crossed_late;
      CHECK((expect_hat ? tp.hat : tp.check) == p.values);
    }
  }
}

TEST_CASE("recursive reconstruction") {
  for (const Ratio& c : {Ratio(1, 2), Ratio(1, 3), Ratio(2, 3), Ratio(3, 4)}) {
    CHECK(path_recursive(silver(), c, 1000).values == path_direct(silver(), c, 1000).values);
    CHECK(path_recursive(golden(), c, 1000).values == path_direct(golden(), c, 1000).values);
  }
  // q_1 = 2 for sqrt(2)-1, so k = 2 divides it and the level is a pure copy.
  std::vector<LevelStep> trace;
  const DiscrepancyPath r = path_recursive(silver(), Ratio(1, 2), 5000, &trace);
  CHECK(r.values == path_direct(silver(), Ratio(1, 2), 5000).values);
  bool saw_divisible = false;
  for (const LevelStep& s : trace) {
    if (!s.divisible) continue;
    saw_divisible = true;
    CHECK(r.values[s.q] == 0);
    for (std::int64_t j = 0; s.q + j <= s.filled_to && j < s.q; ++j) CHECK(r.values[s.q + j] == r.values[j]);
  }
  CHECK(saw_divisible);
}

TEST_CASE("backwards identities") {
  const BackwardsReport b = backwards_check(silver(), Ratio(1, 2), 2);
  CHECK(b.exhaustive);
  CHECK(b.first.pass);
  CHECK(b.second_derived.pass);
  for (const Ratio& c : {Ratio(1, 2), Ratio(1, 3), Ratio(2, 5)}) {
    for (const char* text : {"0;(1)", "0;(3,1,2)", "1;(1,1,4)"}) {
      const AlphaHandle a = AlphaHandle::from_cf(parse_cf(text));
      for (std::int64_t n = 0; n <= 10; n += 2) {
        if (a.q(n) % c.den() == 0) continue;
        const BackwardsReport r = backwards_check(a, c, n);
        CHECK_MESSAGE(r.first.pass, r.first.counterexample);
        CHECK_MESSAGE(r.second_derived.pass, r.second_derived.counterexample);
      }
    }
  }
}

TEST_CASE("level values") {
  CHECK(dqn_residue_check(silver(), Ratio(1, 2), 8).pass);
  CHECK(dqn_residue_check(golden(), Ratio(2, 5), 12).pass);
  // Even level with no crossing in the first period: D_{q_n} = -{h q_n / k}.
  const AlphaHandle a = golden();
  for (std::int64_t k = 2; k <= 7; ++k) {
    for (std::int64_t h = 1; h < k; ++h) {
      if (std::gcd(h, k) != 1) continue;
      const Ratio c(h, k);
      for (std::int64_t n = 0; n <= 10; n += 2) {
        if (a.q(n) % k == 0) continue;
        const Crossing l = l_n(a, c, n);
        if (!l || *l != 0) continue;
        const std::int64_t q = a.q(n).get_si();
        CHECK(kd_at(a, c, BigInt(q)) == -((h * q) % k));
      }
    }
  }
}

TEST_CASE("csv output") {
  std::ostringstream os;
  write_csv(os, path_direct(silver(), Ratio(1, 2), 3));
  CHECK(os.str() == "n,xi_n,kDn,runmax,runmin\n0,0,0,0,0\n1,1,1,1,0\n2,0,0,1,0\n3,1,1,1,0\n");
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(path_direct(silver(), Ratio(3, 2), 10), DomainError);
  CHECK_THROWS_AS(path_direct(silver(), Ratio(1, 2), -1), DomainError);
}
