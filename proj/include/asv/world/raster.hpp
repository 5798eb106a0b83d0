#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "asv/core/errors.hpp"
#include "asv/core/math.hpp"

namespace asv {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

/// Regular grid of water depths (m) with a per-cell flag marking water beyond the opposing lane.
/// Row index grows northward, column index eastward; lookups use the containing cell.
class DepthRaster {
 public:
  DepthRaster() = default;
  DepthRaster(double cell_size, double origin_n, double origin_e, std::uint32_t rows, std::uint32_t cols)
      : cell_(cell_size), origin_n_(origin_n), origin_e_(origin_e), rows_(rows), cols_(cols),
        depth_(static_cast<std::size_t>(rows) * cols, 0.0), beyond_(static_cast<std::size_t>(rows) * cols, 0) {
    if (!(cell_size > 0.0)) throw PreconditionError("raster cell size must be positive");
  }

  double cell_size() const { return cell_; }
  double origin_n() const { return origin_n_; }
  double origin_e() const { return origin_e_; }
  std::uint32_t rows() const { return rows_; }
  std::uint32_t cols() const { return cols_; }

  /// Centre of cell (row, col).
  Vec2 cell_center(std::uint32_t row, std::uint32_t col) const {
    return {origin_n_ + (row + 0.5) * cell_, origin_e_ + (col + 0.5) * cell_};
  }

  bool locate(Vec2 p, std::uint32_t& row, std::uint32_t& col) const {
    const double fr = std::floor((p.n - origin_n_) / cell_);
    const double fc = std::floor((p.e - origin_e_) / cell_);
    if (!(fr >= 0.0) || !(fc >= 0.0) || fr >= rows_ || fc >= cols_) return false;
    row = static_cast<std::uint32_t>(fr);
    col = static_cast<std::uint32_t>(fc);
    return true;
  }

  bool contains(Vec2 p) const {
    std::uint32_t r, c;
    return locate(p, r, c);
  }

  /// Depth at p; 0 outside the grid.
  double depth_at(Vec2 p) const {
    std::uint32_t r, c;
    return locate(p, r, c) ? depth_[index(r, c)] : 0.0;
  }

  bool beyond_opposing(Vec2 p) const {
    std::uint32_t r, c;
    return locate(p, r, c) && beyond_[index(r, c)] != 0;
  }

  double& depth(std::uint32_t row, std::uint32_t col) { return depth_[index(row, col)]; }
  double depth(std::uint32_t row, std::uint32_t col) const { return depth_[index(row, col)]; }
  void set_beyond(std::uint32_t row, std::uint32_t col, bool v) { beyond_[index(row, col)] = v ? 1 : 0; }
  const std::vector<double>& depths() const { return depth_; }
  const std::vector<std::uint8_t>& beyond_flags() const { return beyond_; }

  friend bool operator==(const DepthRaster&, const DepthRaster&) = default;

  // Layout (little-endian): "ASVDEPTH", u32 version = 1, f64 cell size, f64 origin north, f64 origin east,
  // u32 rows, u32 cols, f64 depth[rows*cols] row-major, u8 beyond_flag[rows*cols].
  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write raster '" + path + "'");
    out.write("ASVDEPTH", 8);
    write_pod(out, std::uint32_t{1});
    write_pod(out, cell_);
    write_pod(out, origin_n_);
    write_pod(out, origin_e_);
    write_pod(out, rows_);
    write_pod(out, cols_);
    out.write(reinterpret_cast<const char*>(depth_.data()), static_cast<std::streamsize>(depth_.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(beyond_.data()), static_cast<std::streamsize>(beyond_.size()));
    if (!out) throw FormatError("short write on raster '" + path + "'");
  }

  static DepthRaster load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open raster '" + path + "'");
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "ASVDEPTH", 8) != 0) throw FormatError("'" + path + "' is not a depth raster");
    const auto version = read_pod<std::uint32_t>(in);
    if (version != 1) throw FormatError("unsupported raster version " + std::to_string(version));
    const auto cell = read_pod<double>(in);
    const auto on = read_pod<double>(in);
    const auto oe = read_pod<double>(in);
    const auto rows = read_pod<std::uint32_t>(in);
    const auto cols = read_pod<std::uint32_t>(in);
    DepthRaster r(cell, on, oe, rows, cols);
    in.read(reinterpret_cast<char*>(r.depth_.data()), static_cast<std::streamsize>(r.depth_.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(r.beyond_.data()), static_cast<std::streamsize>(r.beyond_.size()));
    if (!in) throw FormatError("truncated raster '" + path + "'");
    return r;
  }

 private:
  std::size_t index(std::uint32_t r, std::uint32_t c) const { return static_cast<std::size_t>(r) * cols_ + c; }

  template <class T>
  static void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  template <class T>
  static T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError("truncated raster header");
    return v;
  }

  double cell_ = 1.0;
  double origin_n_ = 0.0;
  double origin_e_ = 0.0;
  std::uint32_t rows_ = 0;
  std::uint32_t cols_ = 0;
  std::vector<double> depth_;
  std::vector<std::uint8_t> beyond_;
};

}  // namespace asv
