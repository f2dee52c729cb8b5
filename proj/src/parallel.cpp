#include "tvreg/parallel.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>

#include <omp.h>

namespace tvreg {
namespace {

std::atomic<int> g_override{0};

int default_workers() {
  int workers = omp_get_max_threads();
  if (const char* env = std::getenv("TVREG_THREADS")) {
    int cap = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), cap);
    if (ec == std::errc() && cap > 0 && cap < workers) workers = cap;
  }
  return workers < 1 ? 1 : workers;
}

}  // namespace

int worker_count() {
  const int forced = g_override.load(std::memory_order_relaxed);
  return forced > 0 ? forced : default_workers();
}

void set_worker_count(int workers) { g_override.store(workers > 0 ? workers : 0); }

ScopedWorkers::ScopedWorkers(int workers) : previous_(g_override.load()) {
  set_worker_count(workers);
}

ScopedWorkers::~ScopedWorkers() { g_override.store(previous_); }

}  // namespace tvreg
