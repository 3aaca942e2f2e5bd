#pragma once

// On-disk cache of assembled A, S, M.
//
// Layout: "ITEFMAT1", u64 dimension (little-endian), A, S, M as row-major little-endian
// f64, then a UTF-8 footer of key=value lines (format_version, key, created_by).

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "itef/discretize.hpp"
#include "itef/kernels.hpp"

namespace itef {

inline constexpr int kCacheFormatVersion = 1;

std::uint64_t fnv1a64(std::string_view s);

/// (ω, R, r0, n_r, n_theta, enrichment hash, quadrature signature).
std::string cache_key(const DiscreteSpace& space, const PolarQuadrature& q);
std::filesystem::path cache_file(const std::filesystem::path& dir, const std::string& key);

/// $ITEF_CACHE_DIR, else ./itef-cache.
std::filesystem::path default_cache_dir();

enum class CacheState { Hit, Miss, Stale, Corrupt };
const char* to_string(CacheState s);

struct CacheRead {
  CacheState state = CacheState::Miss;
  Matrices matrices;
  std::string key;  // from the footer, when readable
  int version = 0;
  std::uint64_t dimension = 0;
  std::string detail;
};

/// Stale: readable but another format_version. Corrupt: bad magic, truncated data,
/// unparsable footer, or a key different from `expected_key` (when non-empty).
CacheRead read_cache(const std::filesystem::path& file, const std::string& expected_key = {},
                     bool load_matrices = true);

/// Writes through a temporary file and renames it into place.
void write_cache(const std::filesystem::path& file, const Matrices& m, const std::string& key,
                 int version = kCacheFormatVersion);

struct CacheEntry {
  std::filesystem::path file;
  std::string key;
  std::uint64_t dimension = 0;
  std::uintmax_t bytes = 0;
  CacheState state = CacheState::Hit;
  std::string detail;
};

std::vector<CacheEntry> inspect_cache(const std::filesystem::path& dir);
std::size_t clear_cache(const std::filesystem::path& dir);

/// Loads the matrices when a valid entry exists, otherwise assembles and stores them.
/// `state` receives Hit, or the reason the entry was rebuilt.
OperatorBundle assemble_cached(std::shared_ptr<const DiscreteSpace> space, const PolarQuadrature& q,
                               const std::filesystem::path& dir, CacheState* state = nullptr);

}  // namespace itef
