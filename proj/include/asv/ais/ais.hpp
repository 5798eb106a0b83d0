#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "asv/core/angles.hpp"
#include "asv/core/errors.hpp"

namespace asv {

inline constexpr double kKnot = 1852.0 / 3600.0;

/// One position report. SOG in m/s, COG in rad.
struct AisRecord {
  std::optional<std::uint64_t> mmsi;
  std::optional<double> timestamp;
  std::string station;
  std::optional<double> lat, lon;
  std::optional<double> sog, cog;
  std::map<std::string, std::string> extra;

  bool complete() const { return mmsi && timestamp && lat && lon && sog && cog; }

  friend bool operator==(const AisRecord&, const AisRecord&) = default;
};

/// Keeps only records with MMSI, time, position, SOG and COG present; order preserved.
inline std::vector<AisRecord> clean(const std::vector<AisRecord>& in) {
  std::vector<AisRecord> out;
  for (const AisRecord& r : in)
    if (r.complete()) out.push_back(r);
  return out;
}

/// Groups by MMSI (ascending), sorts each vessel by time (stable) and drops every record closer than
/// `window` seconds to the last kept one. Records without MMSI or time follow unchanged.
inline std::vector<AisRecord> dedup(const std::vector<AisRecord>& in, double window = 2.0) {
  std::vector<AisRecord> keyed, rest;
  for (const AisRecord& r : in) (r.mmsi && r.timestamp ? keyed : rest).push_back(r);
  std::stable_sort(keyed.begin(), keyed.end(), [](const AisRecord& a, const AisRecord& b) {
    return *a.mmsi != *b.mmsi ? *a.mmsi < *b.mmsi : *a.timestamp < *b.timestamp;
  });
  std::vector<AisRecord> out;
  for (const AisRecord& r : keyed) {
    if (!out.empty() && *out.back().mmsi == *r.mmsi && *r.timestamp - *out.back().timestamp < window) continue;
    out.push_back(r);
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

/// Splits cleaned records into per-vessel streams sorted by time.
inline std::map<std::uint64_t, std::vector<AisRecord>> by_vessel(const std::vector<AisRecord>& in) {
  std::map<std::uint64_t, std::vector<AisRecord>> out;
  for (const AisRecord& r : in)
    if (r.mmsi && r.timestamp) out[*r.mmsi].push_back(r);
  for (auto& [m, v] : out)
    std::stable_sort(v.begin(), v.end(), [](const AisRecord& a, const AisRecord& b) { return *a.timestamp < *b.timestamp; });
  return out;
}

// --- delimited text ---------------------------------------------------------------------------------

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == sep && !quoted) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline std::optional<double> number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Seconds since the epoch from a plain number or an ISO-8601 UTC stamp ("2021-05-01T12:00:03[.5][Z]").
inline std::optional<double> parse_timestamp(const std::string& s) {
  if (auto v = number(s)) return v;
  if (s.size() < 19) return std::nullopt;
  std::tm tm{};
  std::istringstream is(s.substr(0, 19));
  is >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%S");
  if (is.fail()) {
    is.clear();
    is.str(s.substr(0, 19));
    is >> std::get_time(&tm, "%Y-%m-%d %H:%M:%S");
    if (is.fail()) return std::nullopt;
  }
  double frac = 0.0;
  std::string tail = s.substr(19);
  if (!tail.empty() && (tail.back() == 'Z' || tail.back() == 'z')) tail.pop_back();
  if (!tail.empty()) {
    const auto f = number("0" + tail);
    if (!f || tail.front() != '.') return std::nullopt;
    frac = *f;
  }
  return static_cast<double>(timegm(&tm)) + frac;
}

}  // namespace detail

/// Parses delimited text with a header naming at least mmsi, timestamp, lat, lon, sog, cog; `station` is
/// optional and any further column is kept as a static field. SOG is read in knots, COG in degrees; empty
/// fields and the AIS not-available codes (lat 91, lon 181, SOG 102.3, COG 360) count as missing.
inline std::vector<AisRecord> parse_ais_csv(std::istream& is, char sep = ',') {
  std::string line;
  if (!std::getline(is, line)) return {};
  std::vector<std::string> head = detail::split(line, sep);
  for (auto& h : head) std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return std::tolower(c); });
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < head.size(); ++i) col[head[i]] = i;
  for (const char* k : {"mmsi", "timestamp", "lat", "lon", "sog", "cog"})
    if (!col.count(k)) throw FormatError(std::string("AIS header lacks column '") + k + "'");
  std::vector<AisRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> f = detail::split(line, sep);
    if (f.size() != head.size())
      throw FormatError("AIS line " + std::to_string(lineno) + " has " + std::to_string(f.size()) + " fields, expected " +
                        std::to_string(head.size()));
    const auto get = [&](const char* k) { return f[col.at(k)]; };
    AisRecord r;
    if (const auto m = detail::number(get("mmsi")); m && *m > 0 && *m == std::floor(*m)) r.mmsi = static_cast<std::uint64_t>(*m);
    r.timestamp = detail::parse_timestamp(get("timestamp"));
    if (const auto v = detail::number(get("lat")); v && std::abs(*v) <= 90.0) r.lat = v;
    if (const auto v = detail::number(get("lon")); v && std::abs(*v) <= 180.0) r.lon = v;
    if (const auto v = detail::number(get("sog")); v && *v >= 0.0 && *v < 102.25) r.sog = *v * kKnot;
    if (const auto v = detail::number(get("cog")); v && *v >= 0.0 && *v < 360.0) r.cog = deg2rad(*v);
    if (col.count("station")) r.station = get("station");
    for (std::size_t i = 0; i < head.size(); ++i) {
      const std::string& h = head[i];
      if (h != "mmsi" && h != "timestamp" && h != "lat" && h != "lon" && h != "sog" && h != "cog" && h != "station" &&
          !f[i].empty())
        r.extra[h] = f[i];
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<AisRecord> read_ais_csv(const std::string& path, char sep = ',') {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open AIS file '" + path + "'");
  return parse_ais_csv(is, sep);
}

// --- projection ------------------------------------------------------------------------------------

/// WGS-84 local tangent plane anchored at (lat0, lon0): geodetic → (north, east) in metres.
class LocalTangentPlane {
 public:
  LocalTangentPlane(double lat0_deg, double lon0_deg) : lat0_(deg2rad(lat0_deg)), lon0_(deg2rad(lon0_deg)) {
    if (!(std::abs(lat0_deg) <= 90.0) || !(std::abs(lon0_deg) <= 180.0)) throw ConfigError("projection origin out of range");
    ecef(lat0_, lon0_, o_);
  }

  void forward(double lat_deg, double lon_deg, double& north, double& east) const {
    double p[3];
    ecef(deg2rad(lat_deg), deg2rad(lon_deg), p);
    const double d[3] = {p[0] - o_[0], p[1] - o_[1], p[2] - o_[2]};
    const double sl = std::sin(lat0_), cl = std::cos(lat0_), so = std::sin(lon0_), co = std::cos(lon0_);
    east = -so * d[0] + co * d[1];
    north = -sl * co * d[0] - sl * so * d[1] + cl * d[2];
  }

  double lat0_deg() const { return rad2deg(lat0_); }
  double lon0_deg() const { return rad2deg(lon0_); }

 private:
  static void ecef(double lat, double lon, double* out) {
    constexpr double a = 6378137.0, f = 1.0 / 298.257223563, e2 = f * (2.0 - f);
    const double n = a / std::sqrt(1.0 - e2 * std::sin(lat) * std::sin(lat));
    out[0] = n * std::cos(lat) * std::cos(lon);
    out[1] = n * std::cos(lat) * std::sin(lon);
    out[2] = n * (1.0 - e2) * std::sin(lat);
  }

  double lat0_, lon0_;
  double o_[3];
};

}  // namespace asv
