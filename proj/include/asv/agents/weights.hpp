#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "asv/agents/nn.hpp"

namespace asv::nn {

// Layout: "ASVW", u32 version, u32 tensor count, per tensor {u32 name length, name bytes, u32 rows,
// u32 cols}, then every tensor's row-major f64 values in manifest order. Little-endian.
inline constexpr char kWeightsMagic[4] = {'A', 'S', 'V', 'W'};
inline constexpr std::uint32_t kWeightsVersion = 1;

using NamedNetworks = std::vector<std::pair<std::string, ParamList>>;

namespace detail {

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw FormatError("truncated weight artifact: " + path);
  return v;
}

}  // namespace detail

inline void save_weights(const std::string& path, const NamedNetworks& nets, const nlohmann::json& meta = {}) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write weight artifact: " + path);
  std::uint32_t count = 0;
  for (const auto& [prefix, ps] : nets) count += static_cast<std::uint32_t>(ps.size());
  os.write(kWeightsMagic, 4);
  detail::put(os, kWeightsVersion);
  detail::put(os, count);
  nlohmann::json manifest = {{"format", "ASVW"}, {"version", kWeightsVersion}, {"dtype", "f64"}, {"order", "row-major"}};
  manifest["tensors"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& [prefix, ps] : nets) {
    for (const Tensor* t : ps) {
      const std::string name = prefix + t->name;
      detail::put(os, static_cast<std::uint32_t>(name.size()));
      os.write(name.data(), static_cast<std::streamsize>(name.size()));
      detail::put(os, static_cast<std::uint32_t>(t->value.rows()));
      detail::put(os, static_cast<std::uint32_t>(t->value.cols()));
      manifest["tensors"].push_back({{"name", name}, {"shape", {t->value.rows(), t->value.cols()}}, {"offset", offset}});
      offset += static_cast<std::uint64_t>(t->value.size());
    }
  }
  for (const auto& [prefix, ps] : nets)
    for (const Tensor* t : ps)
      os.write(reinterpret_cast<const char*>(t->value.data()), static_cast<std::streamsize>(t->value.size() * sizeof(double)));
  if (!os) throw FormatError("failed writing weight artifact: " + path);
  if (!meta.is_null()) manifest["meta"] = meta;
  std::ofstream js(path + ".json");
  js << manifest.dump(2) << '\n';
}

inline std::map<std::string, Mat> read_weights(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open weight artifact: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kWeightsMagic, 4) != 0) throw FormatError("bad weight artifact magic: " + path);
  if (detail::get<std::uint32_t>(is, path) != kWeightsVersion) throw FormatError("unsupported weight artifact version: " + path);
  const auto count = detail::get<std::uint32_t>(is, path);
  std::vector<std::pair<std::string, std::pair<std::uint32_t, std::uint32_t>>> heads;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = detail::get<std::uint32_t>(is, path);
    if (len > 4096) throw FormatError("implausible tensor name length in " + path);
    std::string name(len, '\0');
    if (!is.read(name.data(), len)) throw FormatError("truncated weight artifact: " + path);
    const auto r = detail::get<std::uint32_t>(is, path);
    const auto c = detail::get<std::uint32_t>(is, path);
    heads.push_back({name, {r, c}});
  }
  std::map<std::string, Mat> out;
  for (const auto& [name, shape] : heads) {
    Mat m(shape.first, shape.second);
    if (!is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double))))
      throw FormatError("truncated weight payload: " + path);
    out.emplace(name, std::move(m));
  }
  return out;
}

/// Loads every listed tensor by full name; a missing tensor or a shape mismatch is a structural error.
inline void load_weights(const std::string& path, const NamedNetworks& nets) {
  const auto stored = read_weights(path);
  for (const auto& [prefix, ps] : nets) {
    for (Tensor* t : ps) {
      const std::string name = prefix + t->name;
      const auto it = stored.find(name);
      if (it == stored.end()) throw StructuralError("weight artifact lacks tensor '" + name + "'");
      if (it->second.rows() != t->value.rows() || it->second.cols() != t->value.cols())
        throw StructuralError("shape mismatch for tensor '" + name + "'");
      t->value = it->second;
    }
  }
}

}  // namespace asv::nn
