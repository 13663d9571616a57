#include "tcfem/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace tcfem {

namespace {

int env_thread_count() {
  const char* s = std::getenv("TCFEM_NUM_THREADS");
  if (!s) return 1;
  try {
    return std::max(1, std::stoi(s));
  } catch (const std::exception&) {
    return 1;
  }
}

std::atomic<int>& configured() {
  static std::atomic<int> n{env_thread_count()};
  return n;
}

}  // namespace

int thread_count() { return configured().load(std::memory_order_relaxed); }

void set_thread_count(int n) { configured().store(std::max(1, n), std::memory_order_relaxed); }

}  // namespace tcfem
