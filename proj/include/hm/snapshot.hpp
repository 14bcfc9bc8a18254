#pragma once

/// Binary snapshot "HMSNAP01": 8-byte magic, then little-endian
///   u32 version = 1, f64 L, u32 n, f64 t, f64 k,
///   n*n f64 samples of u (row-major), n*n f64 samples of w.

#include "hm/elliptic.hpp"
#include "hm/errors.hpp"
#include "hm/spectral_grid.hpp"
#include "hm/time_integration.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace hm {

inline constexpr char snapshot_magic[8] = {'H', 'M', 'S', 'N', 'A', 'P', '0', '1'};
inline constexpr std::uint32_t snapshot_version = 1;

struct Snapshot {
  double L = 0.0;
  std::uint32_t n = 0;
  double t = 0.0;
  double k = 0.0;
  std::vector<double> u;
  std::vector<double> w;
};

namespace detail {

template <class T> void put_le(std::vector<unsigned char> &out, T value) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

template <class T> T get_le(const std::vector<unsigned char> &in, std::size_t &pos) {
  if (pos + sizeof(T) > in.size()) throw SnapshotError("snapshot truncated");
  unsigned char b[sizeof(T)];
  std::memcpy(b, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  pos += sizeof(T);
  T value;
  std::memcpy(&value, b, sizeof(T));
  return value;
}

} // namespace detail

inline Snapshot make_snapshot(const State &s, double k) {
  const GridSpec &g = s.u.grid();
  auto [u, w] = inverse_transform(s.u, s.w);
  auto us = u.samples(), ws = w.samples();
  return {g.L, static_cast<std::uint32_t>(g.n), s.t, k, {us.begin(), us.end()}, {ws.begin(), ws.end()}};
}

inline std::vector<unsigned char> encode_snapshot(const Snapshot &s) {
  std::vector<unsigned char> out(std::begin(snapshot_magic), std::end(snapshot_magic));
  out.reserve(8 + 4 + 8 + 4 + 8 + 8 + 8 * (s.u.size() + s.w.size()));
  detail::put_le(out, snapshot_version);
  detail::put_le(out, s.L);
  detail::put_le(out, s.n);
  detail::put_le(out, s.t);
  detail::put_le(out, s.k);
  for (double v : s.u) detail::put_le(out, v);
  for (double v : s.w) detail::put_le(out, v);
  return out;
}

/// Decodes and validates: finite n*n arrays and w = (I - Laplacian) u to
/// 1e-10 relative to max|w| (absolute when w = 0).
inline Snapshot decode_snapshot(const std::vector<unsigned char> &bytes) {
  if (bytes.size() < 8 || !std::equal(bytes.begin(), bytes.begin() + 8, snapshot_magic))
    throw SnapshotError("not an HMSNAP01 snapshot");
  std::size_t pos = 8;
  const auto version = detail::get_le<std::uint32_t>(bytes, pos);
  if (version != snapshot_version) throw SnapshotError("unsupported snapshot version " + std::to_string(version));
  Snapshot s;
  s.L = detail::get_le<double>(bytes, pos);
  s.n = detail::get_le<std::uint32_t>(bytes, pos);
  s.t = detail::get_le<double>(bytes, pos);
  s.k = detail::get_le<double>(bytes, pos);
  if (!(s.L > 0.0) || s.n < 4 || s.n % 2 != 0 || s.n > 8192) throw SnapshotError("invalid snapshot header");
  const std::size_t count = std::size_t(s.n) * s.n;
  if (bytes.size() != pos + 16 * count) throw SnapshotError("snapshot size does not match its header");
  s.u.resize(count);
  s.w.resize(count);
  for (double &v : s.u) v = detail::get_le<double>(bytes, pos);
  for (double &v : s.w) v = detail::get_le<double>(bytes, pos);
  for (std::size_t i = 0; i < count; ++i)
    if (!std::isfinite(s.u[i]) || !std::isfinite(s.w[i])) throw SnapshotError("snapshot holds non-finite samples");

  const GridSpec g{s.L, static_cast<int>(s.n)};
  const RealField w_check = inverse_transform(apply_helmholtz(forward_transform(RealField(g, s.u))));
  double diff = 0.0, scale = 0.0;
  auto wc = w_check.samples();
  for (std::size_t i = 0; i < count; ++i) {
    diff = std::max(diff, std::abs(wc[i] - s.w[i]));
    scale = std::max(scale, std::abs(s.w[i]));
  }
  if (diff > 1e-10 * (scale > 0.0 ? scale : 1.0))
    throw SnapshotError("snapshot w is not (I - Laplacian) u (defect " + std::to_string(diff) + ")");
  return s;
}

inline void write_snapshot(const std::string &path, const Snapshot &s) {
  const auto bytes = encode_snapshot(s);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SnapshotError("cannot write " + path);
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw SnapshotError("short write to " + path);
}

inline Snapshot read_snapshot(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

/// Spectral state of a snapshot; u is transformed and w rebuilt from it.
inline State to_state(const Snapshot &s) {
  const GridSpec g{s.L, static_cast<int>(s.n)};
  return State::from_u(s.t, forward_transform(RealField(g, s.u)));
}

} // namespace hm
