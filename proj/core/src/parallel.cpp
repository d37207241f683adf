#include "substrat/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace substrat::parallel {
namespace {
std::atomic<int> g_max_threads{1};
}

void set_max_threads(int n) { g_max_threads.store(std::max(1, n)); }

int max_threads() { return g_max_threads.load(); }

int threads_from_environment() {
  const char* raw = std::getenv("SUBSTRAT_THREADS");
  if (raw == nullptr) return 0;
  try {
    return std::max(0, std::stoi(raw));
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace substrat::parallel
