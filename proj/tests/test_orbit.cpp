#include "doctest.h"

#include <mpfr.h>

#include "osb/error.hpp"
#include "osb/orbit.hpp"

using namespace osb;

namespace {

AlphaHandle silver() { return AlphaHandle::from_surd(parse_surd("(-1+1*sqrt(2))/1")); }
AlphaHandle golden() { return AlphaHandle::from_surd(parse_surd("(-1+1*sqrt(5))/2")); }

// 1 iff {j alpha} < c, with alpha = (a + sqrt(d)) / e in 512-bit floating point.
int float_xi(long a, long d, long e, long j, long h, long k) {
  mpfr_t x, y;
  mpfr_inits2(512, x, y, static_cast<mpfr_ptr>(nullptr));
  mpfr_sqrt_ui(x, static_cast<unsigned long>(d), MPFR_RNDN);
  mpfr_add_si(x, x, a, MPFR_RNDN);
  mpfr_div_si(x, x, e, MPFR_RNDN);
  mpfr_mul_si(x, x, j, MPFR_RNDN);
  mpfr_frac(x, x, MPFR_RNDN);
  mpfr_set_si(y, h, MPFR_RNDN);
  mpfr_div_si(y, y, k, MPFR_RNDN);
  const int out = mpfr_less_p(x, y) ? 1 : 0;
  mpfr_clears(x, y, static_cast<mpfr_ptr>(nullptr));
  return out;
}

}  // namespace

TEST_CASE("frac_compare fixtures") {
  const AlphaHandle a = silver();
  const Ratio half(1, 2);
  CHECK(frac_compare(a, BigInt(1), half) == Side::Less);
  CHECK(frac_compare(a, BigInt(2), half) == Side::Greater);
  CHECK(frac_compare(a, BigInt(6), half) == Side::Less);
  CHECK(xi(golden(), BigInt(1), half) == 0);

  std::vector<int> seq;
  for (int j = 1; j <= 7; ++j) seq.push_back(xi(a, BigInt(j), half));
  CHECK(seq == std::vector<int>{1, 0, 1, 0, 1, 1, 0});
}

TEST_CASE("comparison back-ends agree with a floating oracle") {
  struct Case {
    const char* surd;
    long a, d, e;
  };
  for (const Case& s : {Case{"(-1+1*sqrt(2))/1", -1, 2, 1}, Case{"(-1+1*sqrt(5))/2", -1, 5, 2},
                        Case{"(-3+1*sqrt(13))/2", -3, 13, 2}, Case{"(-4+1*sqrt(19))/3", -4, 19, 3}}) {
    const AlphaHandle alpha = AlphaHandle::from_surd(parse_surd(s.surd));
    for (long k = 2; k <= 7; ++k) {
      for (long h = 1; h < k; ++h) {
        const Ratio c(h, k);
        for (long j = 1; j <= 300; ++j) {
          const int want = float_xi(s.a, s.d, s.e, j, h, k);
          REQUIRE(xi(alpha, BigInt(j), c, Backend::CrossCheck) == want);
        }
      }
    }
  }
}

TEST_CASE("xi_block matches the serial reference") {
  const AlphaHandle alpha = AlphaHandle::from_cf(parse_cf("2;3,3;(3,1,5,1)"));
  for (const Ratio& c : {Ratio(1, 2), Ratio(3, 7), Ratio(5, 6)}) {
    std::vector<std::uint8_t> par(20000), ser(20000);
    xi_block(alpha, c, 1, par);
    xi_block_serial(alpha, c, 1, ser);
    CHECK(par == ser);
    std::vector<std::uint8_t> far(500), far_ser(500);
    xi_block(alpha, c, 123456789, far);
    xi_block_serial(alpha, c, 123456789, far_ser);
    CHECK(far == far_ser);
  }
}

TEST_CASE("cell indices") {
  const AlphaHandle a = silver();
  std::vector<std::int64_t> cells(50);
  cell_block(a, 5, 1, cells);
  for (int j = 1; j <= 50; ++j) CHECK(cells[j - 1] == cell_index(a, BigInt(j), BigInt(5)));
  CHECK(cell_index(a, BigInt(1), BigInt(5)) == 2);  // {alpha} ~ 0.414
}

TEST_CASE("lambda tables") {
  const AlphaHandle a = silver();
  const LambdaTable t = lambda_table(a, 2);
  CHECK(t.entries == std::vector<std::int64_t>{5, 3, 1, 4, 2});
  for (int i = 0; i < 5; ++i) CHECK(lambda_at(a, 2, BigInt(i)) == t.entries[i]);
  for (std::int64_t n = 0; n <= 8; ++n) CHECK(lambda_table(a, n).entries[0] == a.q(n));

  const AlphaHandle g = golden();
  const LambdaTable f = lambda_table(g, 6);
  for (std::size_t i = 0; i < f.entries.size(); ++i) {
    CHECK(cell_index(g, BigInt(f.entries[i]), g.q(6)) == static_cast<long>(i));
  }
}

TEST_CASE("crossing index") {
  const AlphaHandle a = silver();
  const Crossing l0 = l_n(a, Ratio(1, 2), 0);
  REQUIRE(l0.has_value());
  CHECK(*l0 == 1);
  CHECK_THROWS_AS(l_n(AlphaHandle::from_cf(parse_cf("0;(2)")), Ratio(1, 2), 1), DomainError);
}

TEST_CASE("three-distance placement") {
  CHECK(three_distance_check(silver(), 2).pass);
  CHECK(three_distance_check(golden(), 4).pass);
  const ThreeDistanceReport exh = three_distance_check(golden(), 10);
  CHECK(exh.pass);
  CHECK(exh.mode == "exhaustive");
  const ThreeDistanceReport cert = three_distance_check(golden(), 40, 1000);
  CHECK(cert.pass);
  CHECK(cert.mode == "certificate");
}

TEST_CASE("rational alpha is rejected") {
  CHECK_THROWS_AS(AlphaHandle::from_cf(parse_cf("2;3")), DomainError);
}
