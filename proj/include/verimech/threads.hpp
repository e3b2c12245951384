#pragma once

#include <optional>

namespace verimech {

/// Thread cap read from VERIMECH_THREADS, if set to a positive integer.
std::optional<int> thread_cap_from_env();

/// Applies VERIMECH_THREADS to the OpenMP runtime. Returns the thread count in effect.
int apply_thread_cap();

int max_threads();
void set_threads(int n);

}  // namespace verimech
