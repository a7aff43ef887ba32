#pragma once
// Small shared helpers: file IO, hashing, logging, bounded parallelism.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace mgtd {

std::string read_file(const std::filesystem::path& path);  // throws DataError
void write_file(const std::filesystem::path& path, std::string_view content);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool contains(std::string_view haystack, std::string_view needle);

// SHA-256 hex digest (cache keys).
std::string sha256_hex(std::string_view data);

// FNV-1a 64-bit (cheap seed mixing, not for cache keys).
std::uint64_t fnv1a64(std::string_view data);

// Current UTC time as RFC 3339 ("2025-01-02T03:04:05Z").
std::string now_rfc3339();

// Thread-safe warning line on stderr, prefixed "[warn] ".
void warn(const std::string& message);

// Runs fn(0..n-1) on at most `limit` worker threads. Rethrows the first
// exception raised by fn after all workers finish.
void parallel_for(std::size_t n, int limit, const std::function<void(std::size_t)>& fn);

// Deterministic xorshift-style generator used where cross-platform
// reproducibility matters (std::shuffle / distributions are not portable).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform integer in [0, bound); bound > 0.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

}  // namespace mgtd
