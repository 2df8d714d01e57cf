#include <lichmp/cli.hpp>
#include <lichmp/error.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace lichmp {

namespace {

constexpr std::array<char, 4> kMagic{'L', 'C', 'H', 'F'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::ostream& out, T v) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw Error(ErrorKind::Io, "truncated field dump " + path.string());
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

}  // namespace

void write_field_binary(const std::filesystem::path& path, const Field& u) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, u.domain().hash());
  put<std::uint64_t>(out, u.size());
  for (double v : u.values()) put<double>(out, v);
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

Field read_field_binary(const std::filesystem::path& path, const DomainPtr& d) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error(ErrorKind::Io, "bad magic in field dump " + path.string());
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kVersion) {
    throw Error(ErrorKind::Io, "unsupported field dump version " + std::to_string(version));
  }
  const auto hash = get<std::uint64_t>(in, path);
  const auto count = get<std::uint64_t>(in, path);
  if (hash != d->hash() || count != d->size()) {
    throw Error(ErrorKind::DomainMismatch, "field dump " + path.string() + " was written for another domain");
  }
  std::vector<double> values(count);
  for (double& v : values) v = get<double>(in, path);
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorKind::Io, "trailing bytes in field dump " + path.string());
  }
  return Field(d, std::move(values));
}

void write_field_csv(const std::filesystem::path& path, const Field& u) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "node,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < u.size(); ++i) out << i << ',' << u[i] << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

Field read_field_csv(const std::filesystem::path& path, const DomainPtr& d) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  Field u(d);
  std::vector<char> set(d->size(), 0);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "node,value" || line.front() == '#') continue;
    std::istringstream ss(line);
    std::size_t idx = 0;
    char comma = 0;
    double v = 0.0;
    if (!(ss >> idx >> comma >> v) || comma != ',') {
      throw Error(ErrorKind::Io, path.string() + ":" + std::to_string(lineno) + ": expected node,value");
    }
    if (idx >= d->size()) {
      throw Error(ErrorKind::Io, path.string() + ":" + std::to_string(lineno) + ": node index out of range");
    }
    u[idx] = v;
    set[idx] = 1;
  }
  return u;
}

Field read_field(const std::filesystem::path& path, const DomainPtr& d) {
  if (path.extension() == ".csv") return read_field_csv(path, d);
  return read_field_binary(path, d);
}

}  // namespace lichmp
