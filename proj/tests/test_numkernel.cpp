#include "doctest.h"

#include "osb/error.hpp"
#include "osb/numkernel.hpp"

using namespace osb;

namespace {

std::vector<BigInt> v(std::initializer_list<long> xs) {
  std::vector<BigInt> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

}  // namespace

TEST_CASE("rational expansions") {
  const CFExpansion a = cf_from_rational(Ratio(7, 3));
  CHECK(a.prefix() == v({2, 3}));
  CHECK(a.period().empty());
  CHECK(value_of(a) == Ratio(7, 3));

  const CFExpansion b = cf_from_rational(Ratio(1, 2));
  CHECK(b.prefix() == v({0, 2}));
  CHECK(value_of(b) == Ratio(1, 2));
  CHECK_THROWS_AS(cf_from_rational(Ratio(-1, 2)), DomainError);
}

TEST_CASE("round trip through the Euclidean expansion") {
  for (long p = 0; p < 60; ++p) {
    for (long q = 1; q < 40; ++q) {
      const Ratio x{BigInt(p), BigInt(q)};
      CHECK(value_of(cf_from_rational(x)) == x);
    }
  }
}

TEST_CASE("surd expansions") {
  const CFExpansion s2 = cf_from_surd(parse_surd("(-1+1*sqrt(2))/1"));
  CHECK(s2.prefix() == v({0}));
  CHECK(s2.period() == v({2}));
  const CFExpansion s5 = cf_from_surd(parse_surd("(-1+1*sqrt(5))/2"));
  CHECK(s5.prefix() == v({0}));
  CHECK(s5.period() == v({1}));
  const CFExpansion r2 = cf_from_surd(parse_surd("(0+1*sqrt(2))/1"));
  CHECK(r2.prefix() == v({1}));
  CHECK(r2.period() == v({2}));
  CHECK_THROWS_AS(cf_from_surd(parse_surd("(4+0*sqrt(2))/2")), DomainError);
}

TEST_CASE("surd reconstruction inverts the expansion") {
  for (const char* text : {"0;(2)", "0;(1)", "1;(2)", "2;3,3;(3,1,5,1)", "0;1,1,1;(2,1)", "5;(1,2,3,4)"}) {
    const CFExpansion cf = parse_cf(text);
    CHECK(cf_from_surd(surd_from_cf(cf)) == cf);
  }
}

TEST_CASE("convergent table") {
  const ConvergentTable t = convergents(parse_cf("0;(2)"), 5);
  const std::vector<long> q{1, 2, 5, 12, 29, 70};
  for (int n = 0; n <= 5; ++n) CHECK(t.q(n) == q[n]);
  CHECK(t.p(3) == 5);

  const ConvergentTable empty = convergents(parse_cf("0;(2)"), -1);
  CHECK(empty.p(-2) == 0);
  CHECK(empty.q(-2) == 1);
  CHECK(empty.p(-1) == 1);
  CHECK(empty.q(-1) == 0);

  const ConvergentTable fib = convergents(parse_cf("0;(1)"), 10);
  for (int n = 2; n <= 10; ++n) CHECK(fib.q(n) == fib.q(n - 1) + fib.q(n - 2));
  for (int n = 0; n <= 10; ++n) {
    const BigInt det = fib.p(n) * fib.q(n - 1) - fib.p(n - 1) * fib.q(n);
    CHECK(det == (n % 2 == 0 ? -1 : 1));
  }
}

TEST_CASE("convergent cache grows on demand") {
  ConvergentCache cache(parse_cf("0;(1)"));
  const auto a = cache.upto(5);
  const auto b = cache.upto(40);
  CHECK(a->max_index() >= 5);
  CHECK(b->q(40) == BigInt("165580141"));
}

TEST_CASE("eval_cf brackets the value") {
  const CFInterval i = eval_cf(parse_cf("0;(2)"), 3);
  CHECK(i.center == Ratio(5, 12));
  CHECK(i.width == Ratio(1, 12 * 29));
  const Surd x = parse_surd("(-1+1*sqrt(2))/1");
  CHECK(compare(x, i.center - i.width) == std::strong_ordering::greater);
  CHECK(compare(x, i.center + i.width) == std::strong_ordering::less);

  const CFInterval f = eval_cf(parse_cf("0;(1)"), 4);
  CHECK(f.center == Ratio(3, 5));
  const Surd g = parse_surd("(-1+1*sqrt(5))/2");
  CHECK(compare(g, f.center - f.width) == std::strong_ordering::greater);
  CHECK(compare(g, f.center + f.width) == std::strong_ordering::less);
}

TEST_CASE("fundamental intervals") {
  const FundamentalInterval a = fundamental_interval(v({0, 2}));
  CHECK(a.lo == Ratio(1, 3));
  CHECK(a.hi == Ratio(1, 2));
  const FundamentalInterval b = fundamental_interval(v({0, 1, 1}));
  CHECK(b.lo == Ratio(1, 2));
  CHECK(b.hi == Ratio(2, 3));
}

TEST_CASE("literal parsing") {
  CHECK(parse_ratio("6/4") == Ratio(3, 2));
  CHECK(parse_ratio("-5") == Ratio(-5));
  CHECK(parse_cf("2;3").prefix() == v({2, 3}));
  const CFExpansion c = parse_cf("0;1,1,1;(2,1)");
  const std::vector<long> terms{0, 1, 1, 1, 2, 1, 2, 1, 2};
  for (int i = 0; i < 9; ++i) CHECK(c.term(i) == terms[i]);
  CHECK(c.period().size() == 2);
  CHECK(c.term(4) == 2);
  CHECK(c.term(7) == 1);
  CHECK(c.term_mod(6, 2) == 0);

  CHECK_THROWS_AS(parse_ratio("1/0"), DomainError);
  CHECK_THROWS_AS(parse_cf("0;0,1"), DomainError);
  try {
    parse_surd("(1+2*sqrt(x))/3");
    FAIL("no exception");
  } catch (const ParseError& e) {
    CHECK(e.position() == 10);
  }
}

TEST_CASE("surd comparisons") {
  const Surd x = parse_surd("(-1+1*sqrt(2))/1");
  CHECK(compare(x, Ratio(41, 100)) == std::strong_ordering::greater);
  CHECK(compare(x, Ratio(42, 100)) == std::strong_ordering::less);
  CHECK(x.scaled(BigInt(6)).floor() == 2);
  CHECK(compare(x, parse_surd("(-1+1*sqrt(5))/2")) == std::strong_ordering::less);
}
