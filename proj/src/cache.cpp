#include "itef/cache.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace itef {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'I', 'T', 'E', 'F', 'M', 'A', 'T', '1'};
constexpr const char* kSuffix = ".itefmat";

std::string hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string cache_key(const DiscreteSpace& space, const PolarQuadrature& q) {
  std::ostringstream os;
  os << "omega=" << num(space.domain.omega) << ";R=" << num(space.domain.radius)
     << ";r0=" << num(space.domain.cutoff_outer / 2.0) << ";n_r=" << space.n_r
     << ";n_theta=" << space.n_theta << ";dirichlet=" << space.dirichlet
     << ";basis=" << hex(fnv1a64(space.key())) << ";quad=" << q.signature;
  return os.str();
}

fs::path cache_file(const fs::path& dir, const std::string& key) {
  return dir / ("itef-" + hex(fnv1a64(key)) + kSuffix);
}

fs::path default_cache_dir() {
  if (const char* e = std::getenv("ITEF_CACHE_DIR"); e && *e) return fs::path(e);
  return fs::path("itef-cache");
}

const char* to_string(CacheState s) {
  switch (s) {
    case CacheState::Hit: return "ok";
    case CacheState::Miss: return "missing";
    case CacheState::Stale: return "stale";
    case CacheState::Corrupt: return "corrupt";
  }
  return "?";
}

CacheRead read_cache(const fs::path& file, const std::string& expected_key, bool load_matrices) {
  CacheRead out;
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    out.detail = "cannot open";
    return out;
  }
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto corrupt = [&](const std::string& why) {
    out.state = CacheState::Corrupt;
    out.detail = why;
    out.matrices = {};
    return out;
  };
  if (data.size() < 16 || std::memcmp(data.data(), kMagic, 8) != 0) return corrupt("bad magic");
  const std::uint64_t n = get_u64(data.data() + 8);
  out.dimension = n;
  if (n == 0 || n > (1u << 16)) return corrupt("implausible dimension");
  const std::uint64_t payload = 3 * n * n * 8;
  if (data.size() < 16 + payload) return corrupt("truncated matrix data");

  std::map<std::string, std::string> footer;
  std::istringstream ft(data.substr(16 + payload));
  std::string line;
  while (std::getline(ft, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) return corrupt("unparsable footer line");
    footer[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (!footer.count("format_version") || !footer.count("key")) return corrupt("incomplete footer");
  out.key = footer["key"];
  try {
    out.version = std::stoi(footer["format_version"]);
  } catch (const std::exception&) {
    return corrupt("bad format_version");
  }
  if (!expected_key.empty() && out.key != expected_key) return corrupt("key mismatch");
  if (out.version != kCacheFormatVersion) {
    out.state = CacheState::Stale;
    out.detail = "format_version " + std::to_string(out.version);
    return out;
  }
  if (load_matrices) {
    const char* p = data.data() + 16;
    for (Eigen::MatrixXd* m : {&out.matrices.A, &out.matrices.S, &out.matrices.M}) {
      m->resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < m->rows(); ++i) {
        for (Eigen::Index j = 0; j < m->cols(); ++j, p += 8) {
          (*m)(i, j) = std::bit_cast<double>(get_u64(p));
        }
      }
    }
  }
  out.state = CacheState::Hit;
  return out;
}

void write_cache(const fs::path& file, const Matrices& m, const std::string& key, int version) {
  const auto n = static_cast<std::uint64_t>(m.A.rows());
  if (m.S.rows() != m.A.rows() || m.M.rows() != m.A.rows()) {
    throw std::invalid_argument("write_cache: matrix sizes differ");
  }
  std::string out(kMagic, 8);
  out.reserve(16 + 3 * n * n * 8 + key.size() + 64);
  put_u64(out, n);
  for (const Eigen::MatrixXd* x : {&m.A, &m.S, &m.M}) {
    for (Eigen::Index i = 0; i < x->rows(); ++i) {
      for (Eigen::Index j = 0; j < x->cols(); ++j) put_u64(out, std::bit_cast<std::uint64_t>((*x)(i, j)));
    }
  }
  out += "format_version=" + std::to_string(version) + "\n";
  out += "key=" + key + "\n";
  out += "created_by=itef\n";
  if (!file.parent_path().empty()) fs::create_directories(file.parent_path());
  static std::atomic<unsigned> counter{0};
  std::ostringstream suffix;
  suffix << "." << std::hex << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "-" << counter++ << ".tmp";
  const fs::path tmp = file.string() + suffix.str();
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write cache file " + tmp.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, file);
}

std::vector<CacheEntry> inspect_cache(const fs::path& dir) {
  std::vector<CacheEntry> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != kSuffix) continue;
    const CacheRead r = read_cache(e.path(), {}, false);
    CacheEntry c;
    c.file = e.path();
    c.key = r.key;
    c.dimension = r.dimension;
    c.bytes = e.file_size();
    c.state = r.state;
    c.detail = r.detail;
    if (r.state == CacheState::Hit && cache_file(dir, r.key).filename() != e.path().filename()) {
      c.state = CacheState::Corrupt;
      c.detail = "file name does not match key hash";
    }
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.file < b.file; });
  return out;
}

std::size_t clear_cache(const fs::path& dir) {
  std::size_t n = 0;
  if (!fs::is_directory(dir)) return 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == kSuffix || ext == ".tmp")) n += fs::remove(e.path());
  }
  return n;
}

OperatorBundle assemble_cached(std::shared_ptr<const DiscreteSpace> space, const PolarQuadrature& q,
                               const fs::path& dir, CacheState* state) {
  const std::string key = cache_key(*space, q);
  const fs::path file = cache_file(dir, key);
  CacheRead r = read_cache(file, key);
  if (r.state == CacheState::Hit &&
      r.matrices.A.rows() != static_cast<Eigen::Index>(space->dimension())) {
    r.state = CacheState::Corrupt;
  }
  if (state) *state = r.state;
  if (r.state == CacheState::Hit) {
    OperatorBundle b;
    b.A = std::move(r.matrices.A);
    b.S = std::move(r.matrices.S);
    b.M = std::move(r.matrices.M);
    b.space = std::move(space);
    b.quadrature = q;
    b.enriched = b.space->dimension() > b.space->smooth_dimension();
    b.from_cache = true;
    return b;
  }
  OperatorBundle b = assemble(std::move(space), q);
  write_cache(file, {b.A, b.S, b.M}, key);
  return b;
}

}  // namespace itef
