#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "g2flow/lattice.hpp"

namespace g2flow {

namespace {

template <class T>
void put(std::vector<std::uint8_t>& buf, T v) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  buf.insert(buf.end(), raw, raw + sizeof(T));
}

template <class T>
T take(std::span<const std::uint8_t> bytes, std::size_t& off) {
  if (off + sizeof(T) > bytes.size()) throw std::runtime_error("snapshot: truncated data");
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, bytes.data() + off, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  off += sizeof(T);
  T v;
  std::memcpy(&v, raw, sizeof(T));
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const FormField& f) {
  std::vector<std::uint8_t> buf{'G', '2', 'F', '1'};
  const LatticeSpec& s = f.spec();
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(f.degree()));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(s.k()));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(s.n));
  for (double p : s.periods) put<double>(buf, p);
  for (int a : s.active_axes) buf.push_back(static_cast<std::uint8_t>(a + 1));
  buf.reserve(buf.size() + f.data().size() * 8);
  for (double x : f.data()) put<double>(buf, x);
  return buf;
}

FormField decode_snapshot(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), "G2F1", 4) != 0)
    throw std::runtime_error("snapshot: bad magic");
  std::size_t off = 4;
  const auto degree = take<std::uint32_t>(bytes, off);
  const auto k = take<std::uint32_t>(bytes, off);
  const auto n = take<std::uint32_t>(bytes, off);
  if (degree > 7 || k > 3) throw std::runtime_error("snapshot: header out of range");
  LatticeSpec spec;
  spec.n = static_cast<int>(n);
  for (std::uint32_t i = 0; i < k; ++i) spec.periods.push_back(take<double>(bytes, off));
  for (std::uint32_t i = 0; i < k; ++i) {
    if (off >= bytes.size()) throw std::runtime_error("snapshot: truncated data");
    spec.active_axes.push_back(static_cast<int>(bytes[off++]) - 1);
  }
  spec.validate();
  FormField f(spec, static_cast<int>(degree));
  if (bytes.size() - off != f.data().size() * 8) throw std::runtime_error("snapshot: payload size mismatch");
  for (double& x : f.data()) x = take<double>(bytes, off);
  return f;
}

void write_snapshot(const std::string& path, const FormField& f) {
  const auto buf = encode_snapshot(f);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

FormField read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_snapshot(buf);
}

}  // namespace g2flow
