#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "osb/orbit.hpp"
#include "osb/patterns.hpp"

using namespace osb;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  const AlphaHandle alpha = AlphaHandle::from_surd(parse_surd("(-1+1*sqrt(2))/1"));
  const Ratio c(3, 7);
  for (std::int64_t n : {100'000, 1'000'000}) {
    std::vector<std::uint8_t> a(n), b(n);
    const double tp = best_of(3, [&] { xi_block(alpha, c, 1, a); });
    const double ts = best_of(1, [&] { xi_block_serial(alpha, c, 1, b); });
    std::printf("xi_block      n=%-8lld parallel %.4fs  serial %.4fs  speedup %.2fx  %s\n",
                static_cast<long long>(n), tp, ts, ts / tp, a == b ? "match" : "MISMATCH");
  }
  for (int k : {2}) {
    std::vector<Tuple> p, s;
    const double tp = best_of(3, [&] { p = enumerate_prime(k); });
    const double ts = best_of(3, [&] { s = enumerate_prime_serial(k); });
    std::printf("enumerate_prime k=%d  parallel %.4fs  serial %.4fs  speedup %.2fx  %s\n", k, tp, ts, ts / tp,
                p == s ? "match" : "MISMATCH");
  }
  return 0;
}
