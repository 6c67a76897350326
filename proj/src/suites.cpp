#include "osb/suites.hpp"

#include <mpfr.h>

#include <chrono>
#include <numeric>
#include <sstream>

namespace osb {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string show(const Tuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s + ")";
}

std::string label(const AlphaSample& s) { return "alpha=" + s.cf.str() + " c=" + s.c.str(); }

// Fails the suite with the first problem only.
void fail(SuiteResult& r, const std::string& why) {
  if (r.pass) r.detail = why;
  r.pass = false;
}

}  // namespace

std::vector<AlphaSample> sample_pairs(std::uint64_t seed, int count, int max_entry, int max_k) {
  SeededRng rng(seed);
  std::vector<AlphaSample> out;
  while (static_cast<int>(out.size()) < count) {
    std::vector<BigInt> prefix{BigInt(rng.range(0, max_entry))};
    const auto extra = rng.range(0, 2);
    for (std::int64_t i = 0; i < extra; ++i) prefix.emplace_back(rng.range(1, max_entry));
    std::vector<BigInt> period;
    const auto len = rng.range(1, 4);
    for (std::int64_t i = 0; i < len; ++i) period.emplace_back(rng.range(1, max_entry));
    const auto k = rng.range(2, max_k);
    std::int64_t h = rng.range(1, k - 1);
    while (std::gcd(h, k) != 1) h = rng.range(1, k - 1);
    out.push_back({CFExpansion(std::move(prefix), std::move(period)), Ratio(BigInt(h), BigInt(k))});
  }
  return out;
}

std::vector<CFExpansion> sample_expansions(std::uint64_t seed, int count) {
  SeededRng rng(seed);
  auto entry = [&] {
    if (rng.range(0, 1) == 0) return rng.range(1, 12);
    return rng.range(2, 5) * rng.range(1, 3);
  };
  std::vector<CFExpansion> out;
  while (static_cast<int>(out.size()) < count) {
    std::vector<BigInt> prefix{BigInt(rng.range(0, 1) == 0 ? 0 : entry())};
    const auto extra = rng.range(0, 5);
    for (std::int64_t i = 0; i < extra; ++i) prefix.emplace_back(entry());
    std::vector<BigInt> period;
    const auto len = rng.range(1, 6);
    for (std::int64_t i = 0; i < len; ++i) period.emplace_back(entry());
    out.emplace_back(std::move(prefix), std::move(period));
  }
  return out;
}

void ExclusivityTally::record(const CFExpansion& cf, int k) {
  ++classified;
  const ParityScan a = partial_quotient_scan(cf, k);
  const ParityScan q = denominator_scan(cf, k);
  if ((a.even && a.odd) || (q.even && q.odd)) {
    if (both == 0) example = cf.str() + " k=" + std::to_string(k);
    ++both;
  }
}

// ---------------------------------------------------------------------------

SuiteResult suite_pattern_tables() {
  SuiteResult r;
  r.name = "patterns";
  const auto t0 = Clock::now();
  const std::vector<Tuple> elementary{{0, 0},       {1, 1, 1},         {0, 1, 0, 1},      {1, 0, 1, 0},
                                      {0, 1, 1, 0, 1, 1}, {1, 0, 1, 1, 0, 1}, {1, 1, 0, 1, 1, 0}};
  const std::vector<Tuple> prime{{},        {0},       {1},          {0, 1},       {1, 0},         {1, 1},
                                 {0, 1, 0}, {0, 1, 1}, {1, 0, 1},    {1, 1, 0},    {0, 1, 1, 0},   {1, 0, 1, 1},
                                 {1, 1, 0, 1}, {0, 1, 1, 0, 1}, {1, 0, 1, 1, 0}, {1, 1, 0, 1, 1}};
  const std::vector<Tuple> type_k{{}, {1, 0}, {0, 1, 1}, {1, 1, 0, 1}};
  // Character values under (1,1) -> 0, (1,0) -> 1, (0,1) -> 2.
  const std::vector<std::pair<Tuple, int>> phi{
      {{}, 1},           {{0}, 2},          {{1}, 2},          {{1, 1}, 0},       {{1, 0}, 1},       {{0, 1}, 0},
      {{1, 0, 1}, 2},    {{1, 1, 0}, 0},    {{0, 1, 1}, 1},    {{0, 1, 0}, 0},    {{0, 1, 1, 0}, 2}, {{1, 1, 0, 1}, 1},
      {{1, 0, 1, 1}, 0}, {{0, 1, 1, 0, 1}, 0}, {{1, 1, 0, 1, 1}, 2}, {{1, 0, 1, 1, 0}, 0}};
  auto encode = [](const CharState& s) {
    if (s == CharState{1, 1}) return 0;
    if (s == CharState{1, 0}) return 1;
    if (s == CharState{0, 1}) return 2;
    return -1;
  };

  const auto e = enumerate_elementary(2);
  const auto p = enumerate_prime(2);
  const auto tk = type_k_primes(2);
  if (e != elementary) fail(r, "enumerate_elementary(2) differs from the 7-pattern table");
  if (p != prime) fail(r, "enumerate_prime(2) differs from the 16-pattern table");
  if (tk != type_k) fail(r, "type_k_primes(2) differs from {E, (10), (011), (1101)}");
  if (enumerate_elementary_serial(2) != e || enumerate_prime_serial(2) != p) {
    fail(r, "parallel and serial enumerations differ for k=2");
  }
  int phi_ok = 0;
  for (const auto& [t, value] : phi) {
    if (encode(character(t, 2)) == value) {
      ++phi_ok;
    } else {
      fail(r, "character value of " + show(t) + " differs from the table");
    }
  }
  r.seconds = since(t0);
  if (r.seconds >= 1.0) fail(r, "runtime " + std::to_string(r.seconds) + " s exceeds 1 s");
  r.data = {{"elementary", e.size()}, {"prime", p.size()}, {"type_k_prime", tk.size()},
            {"character_values_matched", phi_ok}, {"group_order", group_order(2)}};
  if (r.pass) r.detail = "7 elementary, 16 prime, 4 type-k primes, 16/16 character values";
  return r;
}

SuiteResult suite_oracle_equivalence(const SuiteOptions& opt, ExclusivityTally* tally) {
  SuiteResult r;
  r.name = "oracle";
  const auto t0 = Clock::now();
  const auto sample = sample_pairs(opt.seed, opt.pairs);
  std::uint64_t compared = 0;
  for (const auto& s : sample) {
    const AlphaHandle alpha = AlphaHandle::from_cf(s.cf);
    const DiscrepancyPath direct = path_direct(alpha, s.c, opt.path_length);
    const DiscrepancyPath recursive = path_recursive(alpha, s.c, opt.path_length);
    compared += direct.values.size();
    if (direct.values != recursive.values) {
      std::size_t n = 0;
      while (direct.values[n] == recursive.values[n]) ++n;
      fail(r, label(s) + ": first divergence at n=" + std::to_string(n));
    }
    if (tally) tally->record(s.cf, static_cast<int>(s.c.den().get_si()));
  }
  r.seconds = since(t0);
  if (r.seconds >= 120) fail(r, "runtime exceeds 2 min");
  r.data = {{"pairs", sample.size()}, {"N", opt.path_length}, {"values_compared", compared}};
  if (r.pass) {
    r.detail = std::to_string(sample.size()) + " pairs, recursive == direct for n <= " +
               std::to_string(opt.path_length);
  }
  return r;
}

SuiteResult suite_level_identities(const SuiteOptions& opt, ExclusivityTally* tally) {
  SuiteResult r;
  r.name = "identities";
  const auto t0 = Clock::now();
  const auto sample = sample_pairs(opt.seed, opt.pairs);
  std::uint64_t three_exhaustive = 0, three_certificate = 0, dqn_levels = 0;
  std::uint64_t first_levels = 0, backwards_exhaustive = 0;
  std::uint64_t printed_fail = 0, derived_fail = 0, second_levels = 0;
  std::string printed_example, derived_example;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& s = sample[i];
    const AlphaHandle alpha = AlphaHandle::from_cf(s.cf);
    for (std::int64_t n = 1; n <= opt.max_level; ++n) {
      const ThreeDistanceReport t = three_distance_check(alpha, n, opt.exhaustive_budget);
      (t.mode == "exhaustive" ? three_exhaustive : three_certificate)++;
      if (!t.pass) fail(r, label(s) + " three-distance n=" + std::to_string(n) + ": " + t.counterexample);
    }
    const ResidueReport d = dqn_residue_check(alpha, s.c, opt.max_level);
    dqn_levels += static_cast<std::uint64_t>(d.levels);
    if (!d.pass) fail(r, label(s) + " residue check: " + d.counterexample);
    for (std::int64_t n = 0; n <= opt.max_level; n += 2) {
      if (alpha.q(n) % s.c.den() == 0) continue;
      const BackwardsReport b = backwards_check(alpha, s.c, n, opt.exhaustive_budget, opt.seed + i);
      ++first_levels;
      ++second_levels;
      if (b.exhaustive) ++backwards_exhaustive;
      if (!b.first.pass) {
        fail(r, label(s) + " backwards identity (1) n=" + std::to_string(n) + ": " + b.first.counterexample);
      }
      if (!b.second_printed.pass) {
        if (printed_fail++ == 0) printed_example = label(s) + " n=" + std::to_string(n) + " " + b.second_printed.counterexample;
      }
      if (!b.second_derived.pass) {
        if (derived_fail++ == 0) derived_example = label(s) + " n=" + std::to_string(n) + " " + b.second_derived.counterexample;
      }
    }
    if (tally) tally->record(s.cf, static_cast<int>(s.c.den().get_si()));
  }
  r.seconds = since(t0);
  r.data = {{"pairs", sample.size()},
            {"three_distance_exhaustive", three_exhaustive},
            {"three_distance_certificate", three_certificate},
            {"residue_levels", dqn_levels},
            {"identity1_levels", first_levels},
            {"backwards_exhaustive_levels", backwards_exhaustive},
            {"identity2_levels", second_levels},
            {"identity2_printed_failures", printed_fail},
            {"identity2_printed_example", printed_example},
            {"identity2_derived_failures", derived_fail},
            {"identity2_derived_example", derived_example}};
  if (r.pass) {
    std::ostringstream os;
    os << "three-distance, residue and identity (1) hold on " << sample.size()
       << " pairs; identity (2) as printed fails on " << printed_fail << "/" << second_levels
       << " levels, derived form fails on " << derived_fail << "/" << second_levels;
    r.detail = os.str();
  }
  return r;
}

SuiteResult suite_route_agreement(const SuiteOptions& opt, ExclusivityTally* tally) {
  SuiteResult r;
  r.name = "routes";
  const auto t0 = Clock::now();
  const auto family = sample_expansions(opt.seed, opt.route_family);
  std::uint64_t above = 0, below = 0, unbounded = 0, checks = 0;
  for (const auto& cf : family) {
    for (int k = 2; k <= 5; ++k) {
      ++checks;
      const ParityScan a = partial_quotient_scan(cf, k);
      const ParityScan q = denominator_scan(cf, k);
      if (a.even != q.even || a.odd != q.odd) {
        fail(r, "routes disagree for " + cf.str() + " k=" + std::to_string(k));
      }
      if (a.even) ++above;
      if (a.odd) ++below;
      if (!a.even && !a.odd) ++unbounded;
      if (tally) tally->record(cf, k);
    }
  }
  r.seconds = since(t0);
  if (r.seconds >= 60) fail(r, "runtime exceeds 1 min");
  r.data = {{"expansions", family.size()}, {"checks", checks}, {"above", above}, {"below", below},
            {"unbounded", unbounded}};
  if (r.pass) {
    std::ostringstream os;
    os << checks << " (cf, k) checks agree with minimal witnesses (" << above << " above, " << below
       << " below, " << unbounded << " unbounded)";
    r.detail = os.str();
  }
  return r;
}

SuiteResult suite_desk_scale(ExclusivityTally* tally) {
  SuiteResult r;
  r.name = "desk";
  const auto t0 = Clock::now();
  const Ratio half(1, 2);

  const AlphaHandle silver = AlphaHandle::from_surd(parse_surd("(-1+1*sqrt(2))/1"));
  const Classification cs = classify(silver.cf(), 1, 2);
  if (tally) tally->record(silver.cf(), 2);
  if (cs.verdict != Verdict::BoundedBelow || cs.witness_m != -1) fail(r, "sqrt(2)-1 is not BoundedBelow with m = -1");
  const ExtremaTrack ts = running_extrema(path_direct(silver, half, 1'000'000));
  const std::int64_t s_min4 = ts.min[10'000], s_min6 = ts.min[1'000'000];
  const std::int64_t s_max3 = ts.max[1'000], s_max6 = ts.max[1'000'000];
  if (s_min6 != s_min4) fail(r, "sqrt(2)-1: min over 1e6 differs from min over 1e4");
  if (!(s_max6 > s_max3)) fail(r, "sqrt(2)-1: max did not grow from 1e3 to 1e6");
  const double t_silver = since(t0);

  const auto t1 = Clock::now();
  const AlphaHandle golden = AlphaHandle::from_surd(parse_surd("(-1+1*sqrt(5))/2"));
  const Classification cg = classify(golden.cf(), 1, 2);
  if (tally) tally->record(golden.cf(), 2);
  if (cg.verdict != Verdict::Unbounded) fail(r, "(sqrt(5)-1)/2 is not Unbounded");
  const ExtremaTrack tg = running_extrema(path_direct(golden, half, 1'000'000));
  const std::int64_t g_min3 = tg.min[1'000], g_min6 = tg.min[1'000'000];
  const std::int64_t g_max3 = tg.max[1'000], g_max6 = tg.max[1'000'000];
  if (!(g_min6 < g_min3) || !(g_max6 > g_max3)) fail(r, "(sqrt(5)-1)/2: extrema did not both grow");
  const double t_golden = since(t1);
  if (t_silver >= 60 || t_golden >= 60) fail(r, "runtime exceeds 1 min");

  r.seconds = since(t0);
  r.data = {{"silver", {{"min_1e4", s_min4}, {"min_1e6", s_min6}, {"max_1e3", s_max3}, {"max_1e6", s_max6}}},
            {"golden", {{"min_1e3", g_min3}, {"min_1e6", g_min6}, {"max_1e3", g_max3}, {"max_1e6", g_max6}}}};
  if (r.pass) {
    std::ostringstream os;
    os << "sqrt(2)-1: min " << s_min4 << " -> " << s_min6 << ", max " << s_max3 << " -> " << s_max6
       << "; (sqrt(5)-1)/2: min " << g_min3 << " -> " << g_min6 << ", max " << g_max3 << " -> " << g_max6
       << " (k-scaled)";
    r.detail = os.str();
  }
  return r;
}

SuiteResult suite_constructor(ExclusivityTally* tally) {
  SuiteResult r;
  r.name = "construct";
  const auto t0 = Clock::now();
  // All prefixes of length <= 4 with entries <= 3 (a_0 may be 0).
  std::vector<Tuple> prefixes{{}};
  for (std::size_t start = 0; start < prefixes.size(); ++start) {
    if (prefixes[start].size() == 4) continue;
    const std::int64_t lo = prefixes[start].empty() ? 0 : 1;
    for (std::int64_t a = lo; a <= 3; ++a) {
      Tuple t = prefixes[start];
      t.push_back(a);
      prefixes.push_back(std::move(t));
    }
  }
  std::uint64_t built = 0;
  for (int k = 2; k <= 3; ++k) {
    for (const auto& b : prefixes) {
      for (Parity parity : {Parity::Even, Parity::Odd}) {
        try {
          const CFExpansion cf = construct_member(b, k, parity);
          const Verdict want = parity == Parity::Odd ? Verdict::BoundedBelow : Verdict::BoundedAbove;
          if (classify(cf, 1, k).verdict != want) fail(r, "verdict mismatch for " + show(b));
          for (std::size_t i = 0; i < b.size(); ++i) {
            if (cf.term(static_cast<std::int64_t>(i)) != b[i]) fail(r, cf.str() + " does not extend " + show(b));
          }
          if (tally) tally->record(cf, k);
          ++built;
        } catch (const std::exception& ex) {
          fail(r, "construct_member" + show(b) + " k=" + std::to_string(k) + ": " + ex.what());
        }
      }
    }
  }
  r.seconds = since(t0);
  if (r.seconds >= 60) fail(r, "runtime exceeds 1 min");
  r.data = {{"prefixes", prefixes.size()}, {"constructed", built}};
  if (r.pass) {
    r.detail = std::to_string(built) + " constructions (" + std::to_string(prefixes.size()) +
               " prefixes x k in {2,3} x both parities) classified as requested";
  }
  return r;
}

SuiteResult suite_dimension() {
  SuiteResult r;
  r.name = "dimension";
  const auto t0 = Clock::now();
  const Enclosure g1 = g_function(Ratio(1));

  // pi^2/12 bracketed with outward rounding at 256 bits.
  mpfr_t pi_lo, pi_hi;
  mpfr_inits2(256, pi_lo, pi_hi, static_cast<mpfr_ptr>(nullptr));
  mpfr_const_pi(pi_lo, MPFR_RNDD);
  mpfr_const_pi(pi_hi, MPFR_RNDU);
  mpfr_sqr(pi_lo, pi_lo, MPFR_RNDD);
  mpfr_sqr(pi_hi, pi_hi, MPFR_RNDU);
  mpfr_div_ui(pi_lo, pi_lo, 12, MPFR_RNDD);
  mpfr_div_ui(pi_hi, pi_hi, 12, MPFR_RNDU);
  mpq_class lo_q, hi_q;
  mpfr_get_q(lo_q.get_mpq_t(), pi_lo);
  mpfr_get_q(hi_q.get_mpq_t(), pi_hi);
  mpfr_clears(pi_lo, pi_hi, static_cast<mpfr_ptr>(nullptr));
  const Ratio target_lo(BigInt(lo_q.get_num()), BigInt(lo_q.get_den()));
  const Ratio target_hi(BigInt(hi_q.get_num()), BigInt(hi_q.get_den()));

  if (!(g1.lo <= target_lo && target_hi <= g1.hi)) fail(r, "g(1) enclosure misses pi^2/12");
  if (!(g1.hi - g1.lo < Ratio(1, BigInt(1'000'000'000'000L)))) fail(r, "g(1) enclosure wider than 1e-12");

  const DimBound d = cstar(Ratio(1, BigInt(1'000'000'000L)));
  if (!(d.lo > Ratio(1, 2) && d.hi < Ratio(1))) fail(r, "c* bracket not inside (1/2, 1)");
  if (!(d.g_lo.lo > Ratio(1))) fail(r, "g(lo) not certified above 1");
  if (!(d.g_hi.hi < Ratio(1))) fail(r, "g(hi) not certified below 1");
  if (!(d.hi - d.lo < Ratio(1, BigInt(1'000'000'000L)))) fail(r, "c* bracket wider than tolerance");

  r.seconds = since(t0);
  if (r.seconds >= 10) fail(r, "runtime exceeds 10 s");
  r.data = {{"g1_lo", decimal(g1.lo, 16)},     {"g1_hi", decimal(g1.hi, 16)},
            {"cstar_lo", decimal(d.lo, 12)},   {"cstar_hi", decimal(d.hi, 12)},
            {"g_lo_lower", decimal(d.g_lo.lo, 12)}, {"g_hi_upper", decimal(d.g_hi.hi, 12)}};
  if (r.pass) {
    r.detail = "g(1) in [" + decimal(g1.lo, 15) + ", " + decimal(g1.hi, 15) + "]; c* in [" + decimal(d.lo, 10) +
               ", " + decimal(d.hi, 10) + "]";
  }
  return r;
}

SuiteResult suite_exclusivity(const ExclusivityTally& tally) {
  SuiteResult r;
  r.name = "exclusivity";
  r.data = {{"classified", tally.classified}, {"both_sides_bounded", tally.both}};
  if (tally.classified == 0) fail(r, "no classified instances were recorded");
  if (tally.both > 0) fail(r, std::to_string(tally.both) + " instances bounded on both sides, e.g. " + tally.example);
  if (r.pass) r.detail = std::to_string(tally.classified) + " classified instances, none bounded on both sides";
  return r;
}

std::vector<std::string> suite_names() {
  return {"patterns", "oracle", "identities", "routes", "desk", "construct", "dimension", "exclusivity", "all"};
}

std::vector<SuiteResult> run_suites(const std::string& which, const SuiteOptions& opt) {
  const auto names = suite_names();
  if (std::find(names.begin(), names.end(), which) == names.end()) {
    throw DomainError("unknown suite '" + which + "'");
  }
  std::vector<SuiteResult> out;
  ExclusivityTally tally;
  const bool all = which == "all";
  const bool excl = which == "exclusivity";
  auto want = [&](const char* name) { return all || excl || which == name; };
  auto keep = [&](SuiteResult r) {
    if (!excl) out.push_back(std::move(r));
  };
  if (all || which == "patterns") out.push_back(suite_pattern_tables());
  if (want("oracle")) keep(suite_oracle_equivalence(opt, &tally));
  if (want("identities")) keep(suite_level_identities(opt, &tally));
  if (want("routes")) keep(suite_route_agreement(opt, &tally));
  if (want("desk")) keep(suite_desk_scale(&tally));
  if (want("construct")) keep(suite_constructor(&tally));
  if (all || which == "dimension") out.push_back(suite_dimension());
  if (all || excl) out.push_back(suite_exclusivity(tally));
  return out;
}

nlohmann::json suite_json(const SuiteResult& r) {
  return {{"suite", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}, {"data", r.data}};
}

}  // namespace osb
