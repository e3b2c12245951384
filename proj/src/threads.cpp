#include "verimech/threads.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace verimech {

std::optional<int> thread_cap_from_env() {
  const char* raw = std::getenv("VERIMECH_THREADS");
  if (raw == nullptr) return std::nullopt;
  try {
    std::size_t used = 0;
    const int n = std::stoi(raw, &used);
    if (used == std::string(raw).size() && n > 0) return n;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

int apply_thread_cap() {
  if (auto cap = thread_cap_from_env()) {
    if (*cap < omp_get_max_threads()) omp_set_num_threads(*cap);
  }
  return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace verimech
