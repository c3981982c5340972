#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace neurolex::hash {

// 64-bit FNV-1a followed by a splitmix64 finalizer, keyed by `seed`.
// Stable across platforms; used for split and subsample ordering.
std::uint64_t keyed(std::string_view data, std::uint64_t seed);

// Derives a per-item seed from a run seed and an item key.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) {
  return keyed(key, seed ^ 0x9E3779B97F4A7C15ULL);
}

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace neurolex::hash
