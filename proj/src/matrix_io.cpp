#include "hsolve/matrix_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "hsolve/errors.hpp"

namespace hsolve {
namespace {

constexpr char kMagic[4] = {'B', 'S', 'P', 'D'};
constexpr unsigned kVersion = 0x01;
// Header sanity caps; anything beyond this is a corrupt header, not a matrix.
constexpr std::uint64_t kMaxSide = 1ull << 32;
constexpr std::uint64_t kMaxBlock = 1ull << 20;

void put_u64_le(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64_le(std::vector<unsigned char>& out, double d) {
  put_u64_le(out, std::bit_cast<std::uint64_t>(d));
}

class Reader {
public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open " + path);
    in_.seekg(0, std::ios::end);
    file_size_ = static_cast<std::uint64_t>(in_.tellg());
    in_.seekg(0, std::ios::beg);
  }

  std::uint64_t file_size() const { return file_size_; }

  void read_exact(unsigned char* dst, std::size_t count,
                  std::uint64_t expected_total) {
    in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in_.gcount()) != count) {
      throw TruncatedFileError(expected_total, file_size_);
    }
  }

  std::uint64_t read_u64_le(std::uint64_t expected_total) {
    unsigned char buf[8];
    read_exact(buf, 8, expected_total);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
  }

private:
  std::ifstream in_;
  std::uint64_t file_size_ = 0;
};

void write_all(const std::string& path, const std::vector<unsigned char>& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace

void save_matrix(const BlockedSPDMatrix& m, const std::string& path) {
  std::vector<unsigned char> buf;
  buf.reserve(5 + 16 + m.value_count() * 8);
  buf.insert(buf.end(), kMagic, kMagic + 4);
  buf.push_back(kVersion);
  put_u64_le(buf, m.n());
  put_u64_le(buf, m.block_size());
  for (std::size_t i = 0; i < m.value_count(); ++i) put_f64_le(buf, m.data()[i]);
  write_all(path, buf);
}

BlockedSPDMatrix load_matrix(const std::string& path) {
  Reader in(path);
  const std::uint64_t header_bytes = 5 + 16;
  unsigned char magic[4];
  in.read_exact(magic, 4, header_bytes);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("bad magic in " + path);
  }
  unsigned char version;
  in.read_exact(&version, 1, header_bytes);
  if (version != kVersion) throw VersionMismatchError(kVersion, version);
  const std::uint64_t n = in.read_u64_le(header_bytes);
  const std::uint64_t b = in.read_u64_le(header_bytes);
  if (n == 0 || b == 0 || n > kMaxSide || b > kMaxBlock) {
    throw FormatError("implausible header (n = " + std::to_string(n) +
                      ", b = " + std::to_string(b) + ") in " + path);
  }
  BlockedSPDMatrix m(n, b);
  const std::uint64_t expected = header_bytes + m.value_count() * 8;
  std::vector<unsigned char> raw(m.value_count() * 8);
  in.read_exact(raw.data(), raw.size(), expected);
  for (std::size_t i = 0; i < m.value_count(); ++i) {
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) {
      v |= static_cast<std::uint64_t>(raw[i * 8 + k]) << (8 * k);
    }
    m.data()[i] = std::bit_cast<double>(v);
  }
  return m;
}

void save_vector(const BlockVector& v, const std::string& path) {
  std::vector<unsigned char> buf;
  buf.reserve(8 + v.n() * 8);
  put_u64_le(buf, v.n());
  for (std::size_t i = 0; i < v.n(); ++i) put_f64_le(buf, v[i]);
  write_all(path, buf);
}

BlockVector load_vector(const std::string& path, std::size_t block_size) {
  Reader in(path);
  const std::uint64_t n = in.read_u64_le(8);
  if (n == 0 || n > kMaxSide) {
    throw FormatError("implausible vector length " + std::to_string(n) +
                      " in " + path);
  }
  BlockVector v(n, block_size);
  const std::uint64_t expected = 8 + n * 8;
  std::vector<unsigned char> raw(n * 8);
  in.read_exact(raw.data(), raw.size(), expected);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) {
      bits |= static_cast<std::uint64_t>(raw[i * 8 + k]) << (8 * k);
    }
    v[i] = std::bit_cast<double>(bits);
  }
  return v;
}

}  // namespace hsolve
