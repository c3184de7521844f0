// Benchmark: OpenMP replicate kernel vs the serial reference path, with a
// byte-identity check on the resulting reports.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "concord/report.hpp"
#include "concord/simulation.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation kernel benchmark: serial reference vs OpenMP"};
  std::int64_t replicates = 4000;
  std::uint64_t seed = 7;
  int threads = 0;
  app.add_option("--replicates", replicates, "replicates per cell");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--threads", threads, "worker threads for the parallel run (0 = default)");
  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
  const int max_threads = omp_get_max_threads();
#else
  const int max_threads = 1;
#endif

  std::vector<concord::SimConfig> grid;
  for (int K : {2, 3, 5}) {
    for (std::int64_t n : {50, 100}) {
      for (double kappa : {0.4, 0.8}) {
        concord::SimConfig cfg;
        cfg.scenario.K = K;
        cfg.scenario.n = n;
        cfg.scenario.kappa_target = kappa;
        cfg.replicates = replicates;
        cfg.seed = seed;
        grid.push_back(cfg);
      }
    }
  }

  std::printf("%zu cells x %lld replicates, %d worker thread(s)\n", grid.size(),
              static_cast<long long>(replicates), max_threads);

  const auto t_serial = Clock::now();
  const concord::SimulationReport serial = concord::run_grid_reference(grid);
  const double serial_s = seconds_since(t_serial);

  const auto t_parallel = Clock::now();
  const concord::SimulationReport parallel = concord::run_grid(grid);
  const double parallel_s = seconds_since(t_parallel);

  const std::string serial_csv = concord::report_to_csv(serial);
  const std::string parallel_csv = concord::report_to_csv(parallel);
  const bool identical = serial_csv == parallel_csv;

  std::printf("%-18s %10s %14s\n", "kernel", "time [s]", "cells/s");
  std::printf("%-18s %10.3f %14.1f\n", "serial reference", serial_s,
              grid.size() / serial_s);
  std::printf("%-18s %10.3f %14.1f\n", "openmp", parallel_s, grid.size() / parallel_s);
  std::printf("speedup: %.2fx, reports byte-identical: %s\n", serial_s / parallel_s,
              identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
