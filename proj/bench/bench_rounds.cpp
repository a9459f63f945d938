// Throughput comparison of the serial reference loops against the OpenMP
// kernels for the three Monte-Carlo engines.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "coqkd/confkey/conference.hpp"
#include "coqkd/protocol/rounds.hpp"
#include "coqkd/states/resource.hpp"
#include "coqkd/teleport/teleport.hpp"

using namespace coqkd;

namespace {

double seconds(void (*fn)(bool), bool parallel) {
  const auto start = std::chrono::steady_clock::now();
  fn(parallel);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

constexpr long kRounds = 2000000;

void bench_rounds(bool parallel) {
  protocol::RunOptions opts;
  opts.mode = protocol::RunMode::WithSecurity;
  opts.rounds = kRounds;
  opts.seed = 1;
  opts.parallel = parallel;
  const auto bell = states::bell(states::BellKind::PhiPlus, 'A', 'B');
  const auto r = protocol::run_rounds(bell, opts);
  if (r.key_count == 0) std::printf("unexpected empty run\n");
}

void bench_conference(bool parallel) {
  confkey::ConferenceOptions opts;
  opts.rounds = kRounds;
  opts.seed = 2;
  opts.secure = true;
  opts.parallel = parallel;
  const auto r = confkey::run_conference(0.6, opts);
  if (r.key_count == 0) std::printf("unexpected empty run\n");
}

void bench_teleport(bool parallel) {
  const double f =
      teleport::simulate_roundtrip(0.4, 0.3, 1.0, 0.5, 3, kRounds, parallel);
  if (f <= 0.0) std::printf("unexpected zero fidelity\n");
}

void run(const char* name, void (*fn)(bool)) {
  const double serial = seconds(fn, false);
  const double parallel = seconds(fn, true);
  std::printf("%-12s %9.1f ns/round serial  %9.1f ns/round parallel  "
              "speedup %.2fx\n",
              name, serial * 1e9 / kRounds, parallel * 1e9 / kRounds,
              serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without openmp; both columns run the serial loop\n");
#endif
  std::printf("%ld rounds per engine\n", kRounds);
  run("protocol", bench_rounds);
  run("conference", bench_conference);
  run("teleport", bench_teleport);
  return 0;
}
