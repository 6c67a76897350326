#include "doctest.h"

#include <mpfr.h>

#include "osb/classify.hpp"
#include "osb/error.hpp"

using namespace osb;

TEST_CASE("classification fixtures") {
  const Classification a = classify(parse_cf("0;(2)"), 1, 2);
  CHECK(a.verdict == Verdict::BoundedBelow);
  CHECK(a.witness_m == -1);
  CHECK(a.condition2_m == -1);

  CHECK(classify(parse_cf("0;(1)"), 1, 2).verdict == Verdict::Unbounded);

  const Classification b = classify(parse_cf("0;1,1,1;(2,1)"), 1, 2);
  CHECK(b.verdict == Verdict::BoundedAbove);
  CHECK(b.witness_m == 2);

  CHECK_THROWS_AS(classify(parse_cf("0;(2)"), 2, 4), DomainError);
  CHECK_THROWS_AS(classify(parse_cf("2;3"), 1, 2), DomainError);
}

TEST_CASE("denominator condition") {
  const QCondition odd = check_q_condition(parse_cf("0;(2)"), 2, Parity::Odd);
  CHECK(odd.holds);
  CHECK(odd.m == -1);
  CHECK_FALSE(check_q_condition(parse_cf("0;(2)"), 2, Parity::Even).holds);
  CHECK_FALSE(check_q_condition(parse_cf("0;(1)"), 2, Parity::Odd).holds);
  CHECK_FALSE(check_q_condition(parse_cf("0;(1)"), 2, Parity::Even).holds);
}

TEST_CASE("the partial-quotient witness implies the denominator witness") {
  for (const char* text : {"0;(2)", "0;1,1,1;(2,1)", "1;(4,3)", "0;3;(6,1,6,5)", "2;2,2;(2)", "0;(3,3,1)"}) {
    const CFExpansion cf = parse_cf(text);
    for (int k = 2; k <= 6; ++k) {
      const ParityScan a = partial_quotient_scan(cf, k);
      const ParityScan q = denominator_scan(cf, k);
      if (a.even) CHECK(q.even == a.even);
      if (a.odd) CHECK(q.odd == a.odd);
    }
  }
}

TEST_CASE("verdict json") {
  const CFExpansion cf = parse_cf("0;(2)");
  CHECK(verdict_json(cf, 1, 2, classify(cf, 1, 2)).dump() ==
        R"J({"alpha":"0;(2)","condition2_m":-1,"h":1,"k":2,"verdict":"below","witness_m":-1})J");
  const CFExpansion g = parse_cf("0;(1)");
  CHECK(verdict_json(g, 1, 2, classify(g, 1, 2)).dump() ==
        R"J({"alpha":"0;(1)","condition2_m":null,"h":1,"k":2,"verdict":"unbounded","witness_m":null})J");
}

TEST_CASE("constructed members") {
  const CFExpansion e = construct_member({}, 2, Parity::Odd);
  CHECK(classify(e, 1, 2).verdict == Verdict::BoundedBelow);

  const CFExpansion b = construct_member({0, 1}, 2, Parity::Odd);
  CHECK(b.term(0) == 0);
  CHECK(b.term(1) == 1);
  CHECK(classify(b, 1, 2).verdict == Verdict::BoundedBelow);

  const CFExpansion c = construct_member({3, 1, 4}, 5, Parity::Even);
  CHECK(c.term(0) == 3);
  CHECK(c.term(1) == 1);
  CHECK(c.term(2) == 4);
  for (std::int64_t h = 1; h < 5; ++h) CHECK(classify(c, h, 5).verdict == Verdict::BoundedAbove);

  CHECK_THROWS_AS(construct_member({0, 0}, 2, Parity::Odd), DomainError);
}

TEST_CASE("bounded members have a one-sided path") {
  const AlphaHandle above = AlphaHandle::from_cf(construct_member({0, 2, 1}, 3, Parity::Even));
  const Extrema a1 = empirical_extrema(above, Ratio(1, 3), 200'000);
  const Extrema a2 = empirical_extrema(above, Ratio(1, 3), 3'000'000);
  CHECK(a2.max == a1.max);
  CHECK(a2.min < a1.min);

  const AlphaHandle below = AlphaHandle::from_cf(construct_member({0, 2, 1}, 3, Parity::Odd));
  const Extrema b1 = empirical_extrema(below, Ratio(1, 3), 200'000);
  const Extrema b2 = empirical_extrema(below, Ratio(1, 3), 3'000'000);
  CHECK(b2.min == b1.min);
  CHECK(b2.max > b1.max);
}

TEST_CASE("g enclosures") {
  const Enclosure g1 = g_function(Ratio(1));
  mpfr_t lo, hi;
  mpfr_inits2(256, lo, hi, static_cast<mpfr_ptr>(nullptr));
  mpfr_const_pi(lo, MPFR_RNDD);
  mpfr_const_pi(hi, MPFR_RNDU);
  mpfr_sqr(lo, lo, MPFR_RNDD);
  mpfr_sqr(hi, hi, MPFR_RNDU);
  mpfr_div_ui(lo, lo, 12, MPFR_RNDD);
  mpfr_div_ui(hi, hi, 12, MPFR_RNDU);
  mpq_class qlo, qhi;
  mpfr_get_q(qlo.get_mpq_t(), lo);
  mpfr_get_q(qhi.get_mpq_t(), hi);
  mpfr_clears(lo, hi, static_cast<mpfr_ptr>(nullptr));
  CHECK(g1.lo.raw() <= qlo);
  CHECK(qhi <= g1.hi.raw());
  CHECK(g1.hi - g1.lo < Ratio(1, BigInt(1'000'000'000'000L)));

  const Enclosure g08 = g_function(Ratio(4, 5));
  const Enclosure g09 = g_function(Ratio(9, 10));
  CHECK(g08.lo > g09.hi);
  CHECK(g09.lo > g1.hi);

  // 2^{-0.6} zeta(1.2) = 3.68906863243642770480...
  const Enclosure g06 = g_function(Ratio(3, 5));
  CHECK(decimal(g06.lo, 12) == "3.689068632436");
  CHECK(decimal(g06.hi, 12) == "3.689068632436");
  CHECK(g06.hi - g06.lo < Ratio(1, BigInt(1) << 40));

  CHECK_THROWS_AS(g_function(Ratio(1, 2)), DomainError);
}

TEST_CASE("root bracket") {
  const DimBound d = cstar(Ratio(1, 1'000'000'000));
  CHECK(d.lo > Ratio(1, 2));
  CHECK(d.hi < Ratio(1));
  CHECK(d.hi - d.lo < Ratio(1, 1'000'000'000));
  CHECK(d.g_lo.lo > Ratio(1));
  CHECK(d.g_hi.hi < Ratio(1));
}

TEST_CASE("decimal rendering") {
  CHECK(decimal(Ratio(1, 3), 4) == "0.3333");
  CHECK(decimal(Ratio(7, 2), 2) == "3.50");
}
