#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "asv/ais/ais.hpp"
#include "asv/ais/spline.hpp"
#include "asv/dynamics/types.hpp"

namespace asv {

enum class InterpKind { Cubic, Linear };

inline std::string to_string(InterpKind k) { return k == InterpKind::Cubic ? "cubic" : "linear"; }

/// Knot table of one vessel in the local plane: time (s), north/east (m), unwrapped COG (rad), SOG (m/s).
struct TrajectoryKnots {
  std::uint64_t mmsi = 0;
  std::vector<double> t, north, east, cog, sog;

  std::size_t size() const { return t.size(); }
  friend bool operator==(const TrajectoryKnots&, const TrajectoryKnots&) = default;
};

/// Removes 2π jumps so that adjacent samples differ by at most π.
inline std::vector<double> unwrap_angles(const std::vector<double>& a) {
  std::vector<double> out(a);
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double turns = std::round((out[i - 1] + wrap_pi(a[i] - a[i - 1]) - a[i]) / kTwoPi);
    out[i] = turns == 0.0 ? a[i] : a[i] + turns * kTwoPi;
  }
  return out;
}

/// Builds the knot table from one vessel's cleaned, deduplicated records.
inline TrajectoryKnots make_knots(const std::vector<AisRecord>& recs, const LocalTangentPlane& plane) {
  TrajectoryKnots k;
  std::vector<double> cog;
  for (const AisRecord& r : recs) {
    if (!r.complete()) throw PreconditionError("trajectory records must be cleaned first");
    if (k.size() == 0) k.mmsi = *r.mmsi;
    if (*r.mmsi != k.mmsi) throw PreconditionError("trajectory records mix vessels");
    if (k.size() > 0 && !(*r.timestamp > k.t.back())) throw PreconditionError("trajectory records must be strictly increasing in time");
    double n = 0.0, e = 0.0;
    plane.forward(*r.lat, *r.lon, n, e);
    k.t.push_back(*r.timestamp);
    k.north.push_back(n);
    k.east.push_back(e);
    cog.push_back(*r.cog);
    k.sog.push_back(*r.sog);
  }
  k.cog = unwrap_angles(cog);
  return k;
}

class Interpolant {
 public:
  Interpolant() = default;
  Interpolant(const std::vector<double>& x, const std::vector<double>& y, InterpKind k, SplineBoundary b) {
    if (k == InterpKind::Cubic)
      f_ = CubicSpline(x, y, b);
    else
      f_ = LinearInterpolant(x, y);
  }
  double operator()(double x) const {
    return std::visit([x](const auto& f) { return f(x); }, f_);
  }

 private:
  std::variant<LinearInterpolant, CubicSpline> f_;
};

/// Per-quantity interpolants over time for one vessel.
class TrajectorySpline {
 public:
  static constexpr std::size_t kMinCubicKnots = 4;

  explicit TrajectorySpline(TrajectoryKnots k, SplineBoundary b = SplineBoundary::NotAKnot) : k_(std::move(k)) {
    const std::size_t n = k_.size();
    if (n < 2) throw InsufficientData("trajectory needs at least two records");
    kind_ = n >= kMinCubicKnots ? InterpKind::Cubic : InterpKind::Linear;
    north_ = Interpolant(k_.t, k_.north, kind_, b);
    east_ = Interpolant(k_.t, k_.east, kind_, b);
    cog_ = Interpolant(k_.t, k_.cog, kind_, b);
    sog_ = Interpolant(k_.t, k_.sog, kind_, b);
  }

  InterpKind kind() const { return kind_; }
  double t_start() const { return k_.t.front(); }
  double t_end() const { return k_.t.back(); }
  bool contains(double t) const { return t >= t_start() && t <= t_end(); }
  const TrajectoryKnots& knots() const { return k_; }

  double north(double t) const { return north_(t); }
  double east(double t) const { return east_(t); }
  double cog(double t) const { return wrap_2pi(cog_(t)); }
  double sog(double t) const { return sog_(t); }

 private:
  TrajectoryKnots k_;
  InterpKind kind_ = InterpKind::Linear;
  Interpolant north_, east_, cog_, sog_;
};

inline TrajectorySpline fit_trajectory(const std::vector<AisRecord>& recs, const LocalTangentPlane& plane,
                                       SplineBoundary b = SplineBoundary::NotAKnot) {
  if (recs.size() < 2) throw InsufficientData("trajectory needs at least two records");
  return TrajectorySpline(make_knots(recs, plane), b);
}

/// Target state at t: position from the northing/easting splines, heading := COG, surge := SOG.
inline VesselState replay_state(const TrajectorySpline& s, double t) {
  if (!s.contains(t))
    throw OutOfRange("AIS query time " + std::to_string(t) + " outside [" + std::to_string(s.t_start()) + ", " +
                     std::to_string(s.t_end()) + "]");
  VesselState v;
  v.x_n = s.north(t);
  v.y_n = s.east(t);
  v.psi = s.cog(t);
  v.u = s.sog(t);
  return v;
}

// --- artifacts -------------------------------------------------------------------------------------

inline constexpr char kAisMagic[8] = {'A', 'S', 'V', 'A', 'I', 'S', '0', '1'};

/// Binary knot table: magic, u64 MMSI, u64 knot count, then t, north, east, COG, SOG columns as little-endian f64.
inline void write_knots(const std::string& path, const TrajectoryKnots& k) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write '" + path + "'");
  os.write(kAisMagic, 8);
  const std::uint64_t head[2] = {k.mmsi, k.size()};
  os.write(reinterpret_cast<const char*>(head), sizeof head);
  for (const auto* col : {&k.t, &k.north, &k.east, &k.cog, &k.sog})
    os.write(reinterpret_cast<const char*>(col->data()), static_cast<std::streamsize>(col->size() * sizeof(double)));
  if (!os) throw FormatError("failed writing '" + path + "'");
}

inline TrajectoryKnots read_knots(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open '" + path + "'");
  char magic[8];
  std::uint64_t head[2];
  if (!is.read(magic, 8) || std::memcmp(magic, kAisMagic, 8) != 0) throw FormatError("'" + path + "' is not a knot table");
  if (!is.read(reinterpret_cast<char*>(head), sizeof head)) throw FormatError("truncated knot table '" + path + "'");
  if (head[1] > (std::uint64_t{1} << 32)) throw FormatError("implausible knot count in '" + path + "'");
  TrajectoryKnots k;
  k.mmsi = head[0];
  for (auto* col : {&k.t, &k.north, &k.east, &k.cog, &k.sog}) {
    col->resize(head[1]);
    if (!is.read(reinterpret_cast<char*>(col->data()), static_cast<std::streamsize>(head[1] * sizeof(double))))
      throw FormatError("truncated knot table '" + path + "'");
  }
  return k;
}

struct AisPrepareStats {
  std::size_t raw = 0, complete = 0, kept = 0, vessels = 0, skipped_vessels = 0;
};

/// Cleans, deduplicates and projects records, then writes one knot table per vessel with ≥ 2 records and a
/// manifest.json describing them.
inline AisPrepareStats ais_prepare(const std::vector<AisRecord>& raw, const LocalTangentPlane& plane,
                                   const std::filesystem::path& out_dir, double window = 2.0) {
  std::filesystem::create_directories(out_dir);
  AisPrepareStats st;
  st.raw = raw.size();
  const std::vector<AisRecord> c = clean(raw);
  st.complete = c.size();
  const std::vector<AisRecord> d = dedup(c, window);
  st.kept = d.size();
  nlohmann::ordered_json m;
  m["format"] = "ASVAIS01";
  m["origin"] = {{"lat", plane.lat0_deg()}, {"lon", plane.lon0_deg()}};
  m["dedup_window_s"] = window;
  m["vessels"] = nlohmann::json::array();
  for (const auto& [mmsi, recs] : by_vessel(d)) {
    if (recs.size() < 2) {
      ++st.skipped_vessels;
      continue;
    }
    const TrajectoryKnots k = make_knots(recs, plane);
    const std::string file = std::to_string(mmsi) + ".knots";
    write_knots((out_dir / file).string(), k);
    m["vessels"].push_back({{"mmsi", mmsi},
                            {"file", file},
                            {"knots", k.size()},
                            {"t_start", k.t.front()},
                            {"t_end", k.t.back()},
                            {"kind", to_string(k.size() >= TrajectorySpline::kMinCubicKnots ? InterpKind::Cubic : InterpKind::Linear)}});
    ++st.vessels;
  }
  std::ofstream os(out_dir / "manifest.json");
  if (!os) throw FormatError("cannot write manifest in '" + out_dir.string() + "'");
  os << m.dump(2) << '\n';
  return st;
}

/// Loads every trajectory listed in a manifest directory.
inline std::map<std::uint64_t, TrajectorySpline> load_ais_artifacts(const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw FormatError("no manifest.json in '" + dir.string() + "'");
  nlohmann::json m;
  try {
    is >> m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad AIS manifest: ") + e.what());
  }
  if (m.value("format", "") != "ASVAIS01") throw FormatError("unsupported AIS manifest format");
  std::map<std::uint64_t, TrajectorySpline> out;
  for (const auto& v : m.at("vessels")) {
    TrajectoryKnots k = read_knots((dir / v.at("file").get<std::string>()).string());
    if (k.mmsi != v.at("mmsi").get<std::uint64_t>()) throw FormatError("manifest and knot table disagree on MMSI");
    out.emplace(k.mmsi, TrajectorySpline(std::move(k)));
  }
  return out;
}

}  // namespace asv
