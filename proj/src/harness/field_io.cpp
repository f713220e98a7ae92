#include "nlch/harness/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "nlch/error.hpp"

namespace nlch {

namespace {

constexpr char kMagic[6] = {'N', 'L', 'C', 'H', 'F', '1'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "NLCHF1 I/O assumes a little-endian host");

template <class T>
void put(std::vector<char>& buf, T value) {
  const auto* p = reinterpret_cast<const char*>(&value);
  buf.insert(buf.end(), p, p + sizeof(T));
}

class Cursor {
 public:
  Cursor(const std::vector<char>& buf, const std::filesystem::path& path) : buf_(buf), path_(path) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > buf_.size()) throw IoError(path_.string() + ": truncated header");
    T value;
    std::memcpy(&value, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::size_t position() const { return pos_; }

 private:
  const std::vector<char>& buf_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_field(const ScalarField& f, const std::filesystem::path& path) {
  if (!f.all_finite()) throw IoError("refusing to write non-finite field to " + path.string());
  const Grid& g = f.grid();
  std::vector<char> buf(kMagic, kMagic + 6);
  put(buf, kVersion);
  put(buf, static_cast<std::uint32_t>(g.dim));
  for (int a = 0; a < g.dim; ++a) put(buf, static_cast<std::uint64_t>(g.n[a]));
  for (int a = 0; a < g.dim; ++a) put(buf, g.length[a]);
  const auto values = f.values();
  const auto* p = reinterpret_cast<const char*>(values.data());
  buf.insert(buf.end(), p, p + values.size() * sizeof(double));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

ScalarField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 6 || std::memcmp(buf.data(), kMagic, 6) != 0)
    throw IoError(path.string() + ": not a NLCHF1 file");
  Cursor cur(buf, path);
  for (int i = 0; i < 6; ++i) cur.get<char>();
  const auto version = cur.get<std::uint32_t>();
  if (version != kVersion)
    throw IoError(path.string() + ": unsupported NLCHF1 version " + std::to_string(version));
  const auto dim = cur.get<std::uint32_t>();
  if (dim != 2 && dim != 3) throw IoError(path.string() + ": invalid dimension " + std::to_string(dim));
  std::vector<int> n(dim);
  std::vector<double> length(dim);
  std::uint64_t total = 1;
  for (auto& v : n) {
    const auto s = cur.get<std::uint64_t>();
    if (s < 4 || s > (1u << 20)) throw IoError(path.string() + ": invalid axis size " + std::to_string(s));
    v = static_cast<int>(s);
    total *= s;
  }
  for (auto& v : length) v = cur.get<double>();
  if (buf.size() - cur.position() != total * sizeof(double))
    throw IoError(path.string() + ": payload size mismatch");

  Grid grid;
  try {
    grid = make_grid(static_cast<int>(dim), n, length);
  } catch (const ConfigError& e) {
    throw IoError(path.string() + ": invalid grid metadata: " + e.what());
  }
  ScalarField f(grid);
  std::memcpy(f.values().data(), buf.data() + cur.position(), total * sizeof(double));
  if (!f.all_finite()) throw IoError(path.string() + ": non-finite values in payload");
  return f;
}

}  // namespace nlch
