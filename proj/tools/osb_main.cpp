#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "osb/classify.hpp"
#include "osb/error.hpp"
#include "osb/suites.hpp"

using nlohmann::json;
using namespace osb;

namespace {

enum Exit { kOk = 0, kUsage = 1, kComputation = 2, kVerification = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AlphaSpec {
  std::string surd, rational, cf;
};

void add_alpha(CLI::App* cmd, AlphaSpec& spec, bool allow_rational) {
  auto* g = cmd->add_option_group("alpha");
  g->add_option("--surd", spec.surd, "quadratic surd (a+b*sqrt(d))/e");
  if (allow_rational) g->add_option("--rational", spec.rational, "rational p/q");
  g->add_option("--cf", spec.cf, "continued fraction a0;a1,...;(b1,...)");
  g->require_option(1);
}

// Usage errors come from input validation only.
template <class F>
auto validate(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw UsageError(what + ": " + e.what());
  }
}

AlphaHandle irrational_alpha(const AlphaSpec& spec) {
  if (!spec.surd.empty()) return validate("--surd", [&] { return AlphaHandle::from_surd(parse_surd(spec.surd)); });
  return validate("--cf", [&] { return AlphaHandle::from_cf(parse_cf(spec.cf)); });
}

/// --c must be h/k in lowest terms with 0 < h < k.
Ratio window(const std::string& text) {
  const auto slash = text.find('/');
  BigInt h, k;
  if (slash == std::string::npos || h.set_str(text.substr(0, slash), 10) != 0 ||
      k.set_str(text.substr(slash + 1), 10) != 0) {
    throw UsageError("--c: expected h/k, got '" + text + "'");
  }
  if (!(h > 0 && h < k) || gcd(h, k) != 1) {
    throw UsageError("--c: " + text + " is not in lowest terms in (0,1)");
  }
  return Ratio(h, k);
}

Tuple parse_tuple(std::string text) {
  for (char& ch : text) {
    if (ch == '(' || ch == ')' || ch == '[' || ch == ']') ch = ' ';
  }
  Tuple out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    if (b == std::string::npos) continue;
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(item.substr(b), &used);
    } catch (const std::exception&) {
      throw UsageError("tuple: '" + item + "' is not an integer");
    }
    if (item.find_first_not_of(' ', b + used) != std::string::npos) {
      throw UsageError("tuple: '" + item + "' is not an integer");
    }
    out.push_back(v);
  }
  return out;
}

/// Exact value of "p/q", a decimal, or scientific notation such as 1e-9.
Ratio parse_tolerance(const std::string& text) {
  const auto e = text.find_first_of("eE");
  std::string mant = text.substr(0, e);
  long exp10 = 0;
  try {
    if (e != std::string::npos) exp10 = std::stol(text.substr(e + 1));
  } catch (const std::exception&) {
    throw UsageError("--tol: cannot read '" + text + "'");
  }
  Ratio value;
  if (mant.find('/') != std::string::npos) {
    value = validate("--tol", [&] { return parse_ratio(mant); });
  } else {
    const auto dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
      digits.erase(dot, 1);
      exp10 -= static_cast<long>(mant.size() - dot - 1);
    }
    BigInt n;
    if (digits.empty() || n.set_str(digits, 10) != 0) throw UsageError("--tol: cannot read '" + text + "'");
    value = Ratio(n);
  }
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  value = exp10 < 0 ? value / Ratio(scale) : value * Ratio(scale);
  if (value.sign() <= 0) throw UsageError("--tol must be positive");
  return value;
}

json enclosure_json(const Enclosure& e) {
  return {{"lo", e.lo.str()}, {"hi", e.hi.str()}, {"lo_decimal", decimal(e.lo, 15)},
          {"hi_decimal", decimal(e.hi, 15)}, {"terms", e.terms}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"osb: one-sided boundedness of rotation discrepancy"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_path;
  std::uint64_t seed = SuiteOptions{}.seed;
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--seed", seed, "seed for randomized suites");

  AlphaSpec alpha;
  std::string c_text;
  std::int64_t depth = 10, n_steps = 0, k = 2;
  std::string mode = "direct", kind = "elementary", tuple_text, parity = "odd", tol_text = "1e-9", suite = "all";
  std::string g_at;
  std::uint64_t max_nodes = EnumerationBudget{}.max_nodes;
  SuiteOptions opt;

  auto* expand = app.add_subcommand("expand", "continued fraction and convergents");
  add_alpha(expand, alpha, true);
  expand->add_option("--depth", depth, "last convergent index")->check(CLI::NonNegativeNumber);

  auto* path = app.add_subcommand("path", "discrepancy path as CSV");
  add_alpha(path, alpha, false);
  path->add_option("--c", c_text, "window h/k")->required();
  path->add_option("--n", n_steps, "path length N")->required()->check(CLI::PositiveNumber);
  path->add_option("--mode", mode, "recursive|direct|both")->check(CLI::IsMember({"recursive", "direct", "both"}));

  auto* classify_cmd = app.add_subcommand("classify", "one-sided boundedness verdict");
  add_alpha(classify_cmd, alpha, false);
  classify_cmd->add_option("--c", c_text, "window h/k")->required();

  auto* patterns = app.add_subcommand("patterns", "elementary, prime or type-k prime patterns");
  patterns->add_option("--k", k, "modulus")->required()->check(CLI::Range(2, 1 << 20));
  patterns->add_option("--kind", kind, "elementary|prime|type_k_prime")
      ->check(CLI::IsMember({"elementary", "prime", "type_k_prime"}));
  patterns->add_option("--max-nodes", max_nodes, "search node budget");

  auto* decompose = app.add_subcommand("decompose", "prime decomposition of a tuple");
  decompose->add_option("--k", k, "modulus")->required()->check(CLI::Range(2, 1 << 20));
  decompose->add_option("--tuple", tuple_text, "entries, e.g. 0,1,0,1,1,0")->required();

  auto* construct = app.add_subcommand("construct", "bounded member extending a prefix");
  construct->add_option("--k", k, "modulus")->required()->check(CLI::Range(2, 1 << 20));
  construct->add_option("--prefix", tuple_text, "prefix a0,a1,...")->required();
  construct->add_option("--parity", parity, "even (bounded above) | odd (bounded below)")
      ->check(CLI::IsMember({"even", "odd"}));

  auto* dimension = app.add_subcommand("dimension", "root bracket of g(c) = 1");
  dimension->add_option("--tol", tol_text, "bracket width");
  dimension->add_option("--g-at", g_at, "also enclose g at this rational c > 1/2");

  auto* verify = app.add_subcommand("verify", "seeded property suites");
  verify->add_option("--suite", suite, "suite name")->check(CLI::IsMember(suite_names()));
  verify->add_option("--pairs", opt.pairs, "sample size")->check(CLI::PositiveNumber);
  verify->add_option("--path-length", opt.path_length, "N for the oracle suite")->check(CLI::PositiveNumber);
  verify->add_option("--family", opt.route_family, "expansions for the route suite")->check(CLI::PositiveNumber);
  verify->add_option("--max-level", opt.max_level, "highest level n")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  std::ostringstream out;
  int status = kOk;
  try {
    if (*expand) {
      CFExpansion cf;
      if (!alpha.rational.empty()) {
        const Ratio r = validate("--rational", [&] { return parse_ratio(alpha.rational); });
        if (r.sign() < 0) throw UsageError("--rational must be non-negative");
        cf = cf_from_rational(r);
      } else {
        cf = irrational_alpha(alpha).cf();
      }
      const std::int64_t last = cf.is_rational() ? std::min(depth, cf.last_index()) : depth;
      const ConvergentTable t = convergents(cf, last);
      out << "cf: " << cf.str() << "\n";
      out << "n,a_n,p_n,q_n\n";
      for (std::int64_t n = 0; n <= last; ++n) {
        out << n << ',' << cf.term(n) << ',' << t.p(n) << ',' << t.q(n) << "\n";
      }
    } else if (*path) {
      const AlphaHandle a = irrational_alpha(alpha);
      const Ratio c = window(c_text);
      if (mode == "direct") {
        write_csv(out, path_direct(a, c, n_steps));
      } else if (mode == "recursive") {
        write_csv(out, path_recursive(a, c, n_steps));
      } else {
        const DiscrepancyPath d = path_direct(a, c, n_steps);
        const DiscrepancyPath r = path_recursive(a, c, n_steps);
        if (d.values != r.values) {
          std::size_t n = 0;
          while (d.values[n] == r.values[n]) ++n;
          throw VerificationFailure("recursive and direct paths diverge at n=" + std::to_string(n));
        }
        write_csv(out, d);
      }
    } else if (*classify_cmd) {
      const AlphaHandle a = irrational_alpha(alpha);
      const Ratio c = window(c_text);
      const std::int64_t h = c.num().get_si(), kk = c.den().get_si();
      json j = verdict_json(a.cf(), h, kk, classify(a.cf(), h, kk));
      j["seed"] = seed;
      out << dump(j);
    } else if (*patterns) {
      EnumerationBudget budget;
      budget.max_nodes = max_nodes;
      const int kk = static_cast<int>(k);
      std::vector<Tuple> set = kind == "elementary" ? enumerate_elementary(kk, budget)
                               : kind == "prime"    ? enumerate_prime(kk, budget)
                                                    : type_k_primes(kk, budget);
      json j = pattern_set_json(kk, kind, set, group_order(kk, budget));
      j["seed"] = seed;
      out << dump(j);
    } else if (*decompose) {
      const Tuple t = parse_tuple(tuple_text);
      for (auto v : t) {
        if (v < 0) throw UsageError("--tuple entries must be non-negative");
      }
      const Decomposition d = prime_decompose(t, static_cast<int>(k));
      json ins = json::array();
      for (const auto& i : d.insertions) ins.push_back({{"position", i.position}, {"pattern", i.pattern}});
      out << dump({{"k", k},
                   {"input", t},
                   {"core", d.core},
                   {"insertions", ins},
                   {"replay_matches", replay(d) == t},
                   {"seed", seed}});
    } else if (*construct) {
      const Tuple b = parse_tuple(tuple_text);
      const Parity p = parity == "even" ? Parity::Even : Parity::Odd;
      const int kk = static_cast<int>(k);
      const CFExpansion cf = validate("--prefix", [&] { return construct_member(b, kk, p); });
      json j = verdict_json(cf, 1, k, classify(cf, 1, k));
      j["prefix"] = b;
      j["parity"] = parity;
      j["seed"] = seed;
      out << dump(j);
    } else if (*dimension) {
      const Ratio tol = parse_tolerance(tol_text);
      std::optional<Ratio> at;
      if (!g_at.empty()) {
        at = validate("--g-at", [&] { return parse_ratio(g_at); });
        if (!(*at > Ratio(1, 2))) throw UsageError("--g-at must exceed 1/2");
      }
      const DimBound d = cstar(tol);
      json j = {{"tol", tol.str()},
                {"lo", d.lo.str()},
                {"hi", d.hi.str()},
                {"lo_decimal", decimal(d.lo, 12)},
                {"hi_decimal", decimal(d.hi, 12)},
                {"g_lo", enclosure_json(d.g_lo)},
                {"g_hi", enclosure_json(d.g_hi)},
                {"seed", seed}};
      if (at) j["g_at"] = {{"c", at->str()}, {"g", enclosure_json(g_function(*at))}};
      out << dump(j);
    } else if (*verify) {
      opt.seed = seed;
      json suites = json::array();
      bool pass = true;
      for (const auto& r : run_suites(suite, opt)) {
        pass = pass && r.pass;
        suites.push_back(suite_json(r));
        std::cerr << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
      }
      out << dump({{"seed", seed}, {"suite", suite}, {"pass", pass}, {"results", suites}});
      if (!pass) status = kVerification;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return kVerification;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kComputation;
  }

  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!(f << out.str())) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return kComputation;
    }
  }
  return status;
}
