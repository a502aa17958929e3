#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace introsumm {

/// Execution policy for batch operations. `serial` is the reference path;
/// `parallel` runs the same per-item work under OpenMP. Items write to
/// disjoint slots, so the two policies produce bit-identical results.
enum class Exec { serial, parallel };

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(const std::string& s);
std::string to_hex(std::uint64_t v);

std::string lower_copy(std::string s);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

/// Whitespace-delimited word count of raw text (budget accounting).
int count_words(const std::string& text);

template <class F>
void for_each_index(int n, Exec exec, F&& fn) {
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) fn(i);
  } else {
    for (int i = 0; i < n; ++i) fn(i);
  }
}

}  // namespace introsumm
