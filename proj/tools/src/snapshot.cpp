#include "sphereflow/cli/snapshot.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "sphereflow/cli/config.hpp"

namespace sphereflow::cli {

namespace {

template <typename T>
void put(std::vector<unsigned char>& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.insert(out.end(), bytes.begin(), bytes.end());
}

class Cursor {
 public:
  Cursor(const std::vector<unsigned char>& data, const std::string& name) : data_(data), name_(name) {}

  template <typename T>
  T get(const char* what) {
    if (data_.size() - pos_ < sizeof(T)) {
      throw FormatError(name_ + ": truncated snapshot while reading " + what);
    }
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), data_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, bytes.data(), sizeof(T));
    return v;
  }

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  const std::vector<unsigned char>& data_;
  const std::string& name_;
  std::size_t pos_ = 4;
};

}  // namespace

void write_snapshot(const Domain& domain, const Field& field, double t, double p,
                    const std::filesystem::path& path) {
  require_conforming(domain, field);
  std::vector<unsigned char> out{'S', 'P', 'H', 'F'};
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(domain.dim()));
  for (int a = 0; a < domain.dim(); ++a) put<std::uint64_t>(out, domain.size(a));
  for (int a = 0; a < domain.dim(); ++a) put<double>(out, domain.length(a));
  put<double>(out, t);
  put<double>(out, p);
  for (double v : field.values()) put<double>(out, v);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

SnapshotFile read_snapshot(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  const std::vector<unsigned char> data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (data.size() < 4 || std::memcmp(data.data(), "SPHF", 4) != 0) {
    throw FormatError(name + ": not a snapshot file (bad magic)");
  }
  Cursor c(data, name);
  const auto version = c.get<std::uint32_t>("version");
  if (version != kSnapshotVersion) {
    throw FormatError(name + ": unsupported snapshot version " + std::to_string(version));
  }
  const auto dim = c.get<std::uint32_t>("dimension");
  if (dim < 1 || dim > 3) throw FormatError(name + ": corrupt header, dimension " + std::to_string(dim));
  std::vector<std::size_t> sizes(dim);
  std::vector<double> lengths(dim);
  for (auto& n : sizes) n = static_cast<std::size_t>(c.get<std::uint64_t>("grid sizes"));
  for (auto& L : lengths) L = c.get<double>("lengths");
  SnapshotFile out;
  out.t = c.get<double>("time");
  out.p = c.get<double>("exponent");
  try {
    out.domain = make_domain(static_cast<int>(dim), lengths, sizes);
  } catch (const InvalidArgument& e) {
    throw FormatError(name + ": corrupt header, " + e.what());
  }
  const std::size_t total = out.domain.total();
  if (c.remaining() != total * sizeof(double)) {
    throw FormatError(name + ": corrupt snapshot, header declares " + std::to_string(total) +
                      " values but the body holds " + std::to_string(c.remaining()) + " bytes");
  }
  std::vector<double> values(total);
  for (auto& v : values) v = c.get<double>("values");
  out.field = Field(out.domain, std::move(values));
  return out;
}

}  // namespace sphereflow::cli
