#include "uood/manifest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uood/error.hpp"

namespace uood {

using nlohmann::json;

std::string to_string(Shrinkage s) {
  return s == Shrinkage::LedoitWolf ? "ledoit_wolf" : "none";
}

Shrinkage parse_shrinkage(std::string_view text) {
  if (text == "ledoit_wolf") return Shrinkage::LedoitWolf;
  if (text == "none") return Shrinkage::None;
  throw Error(ErrorCode::InvalidArgument, "unknown shrinkage '" + std::string(text) + "'");
}

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << text << '\n';
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadManifest, e.what());
  }
}

std::filesystem::path resolve_existing(const json& obj, const char* key, const std::filesystem::path& base) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw Error(ErrorCode::BadManifest, std::string("missing string field '") + key + "'");
  }
  std::filesystem::path p = obj[key].get<std::string>();
  if (p.is_relative()) p = base / p;
  if (!std::filesystem::exists(p)) throw Error(ErrorCode::Io, "file not found: " + p.string());
  return p;
}

Shrinkage shrinkage_field(const json& obj) {
  if (!obj.contains("shrinkage")) return Shrinkage::LedoitWolf;
  if (!obj["shrinkage"].is_string()) throw Error(ErrorCode::BadManifest, "'shrinkage' must be a string");
  try {
    return parse_shrinkage(obj["shrinkage"].get<std::string>());
  } catch (const Error& e) {
    throw Error(ErrorCode::BadManifest, e.detail());
  }
}

ExperimentManifest parse_one(const json& obj, const std::filesystem::path& base) {
  if (!obj.is_object()) throw Error(ErrorCode::BadManifest, "experiment entry must be an object");
  ExperimentManifest m;
  m.name = obj.value("name", std::string("unnamed"));
  m.train_path = resolve_existing(obj, "train", base);
  m.test_in_path = resolve_existing(obj, "test_in", base);
  m.test_out_path = resolve_existing(obj, "test_out", base);
  m.shrinkage = shrinkage_field(obj);
  return m;
}

std::size_t size_field(const json& obj, const char* key) {
  if (!obj.contains(key)) return 0;
  if (!obj[key].is_number_unsigned()) throw Error(ErrorCode::BadManifest, std::string("'") + key + "' must be >= 0");
  return obj[key].get<std::size_t>();
}

}  // namespace

std::vector<ExperimentManifest> parse_manifests(const std::string& json_text, const std::filesystem::path& base_dir) {
  const json doc = parse_json(json_text);
  std::vector<ExperimentManifest> out;
  if (doc.is_array()) {
    for (const auto& entry : doc) out.push_back(parse_one(entry, base_dir));
  } else {
    out.push_back(parse_one(doc, base_dir));
  }
  if (out.empty()) throw Error(ErrorCode::BadManifest, "manifest lists no experiments");
  return out;
}

std::vector<ExperimentManifest> load_manifests(const std::filesystem::path& path) {
  try {
    return parse_manifests(read_text(path), path.parent_path());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void save_manifest(const ExperimentManifest& m, const std::filesystem::path& path) {
  const json doc = {{"name", m.name},
                    {"train", m.train_path.string()},
                    {"test_in", m.test_in_path.string()},
                    {"test_out", m.test_out_path.string()},
                    {"shrinkage", std::string(to_string(m.shrinkage))}};
  write_text(path, doc.dump(2));
}

ClassSweepManifest load_class_sweep_manifest(const std::filesystem::path& path) {
  const json doc = parse_json(read_text(path));
  const auto base = path.parent_path();
  if (!doc.is_object()) throw Error(ErrorCode::BadManifest, path.string() + ": expected an object");
  ClassSweepManifest m;
  m.name = doc.value("name", std::string("class_sweep"));
  if (!doc.contains("pools") || !doc["pools"].is_array() || doc["pools"].empty()) {
    throw Error(ErrorCode::BadManifest, path.string() + ": 'pools' must be a nonempty array");
  }
  for (const auto& pool : doc["pools"]) {
    m.pools.push_back({resolve_existing(pool, "train", base), resolve_existing(pool, "test", base)});
  }
  m.ood_near = resolve_existing(doc, "ood_near", base);
  m.ood_far = resolve_existing(doc, "ood_far", base);
  if (doc.contains("k_values")) {
    if (!doc["k_values"].is_array()) throw Error(ErrorCode::BadManifest, "'k_values' must be an array");
    for (const auto& k : doc["k_values"]) {
      if (!k.is_number_unsigned()) throw Error(ErrorCode::BadManifest, "k values must be positive integers");
      m.k_values.push_back(k.get<std::size_t>());
    }
  } else {
    for (std::size_t k = 1; k <= m.pools.size(); ++k) m.k_values.push_back(k);
  }
  m.train_size = size_field(doc, "train_size");
  m.test_size = size_field(doc, "test_size");
  m.shrinkage = shrinkage_field(doc);
  return m;
}

void save_class_sweep_manifest(const ClassSweepManifest& m, const std::filesystem::path& path) {
  json pools = json::array();
  for (const auto& p : m.pools) pools.push_back({{"train", p.train.string()}, {"test", p.test.string()}});
  const json doc = {{"name", m.name},
                    {"pools", pools},
                    {"ood_near", m.ood_near.string()},
                    {"ood_far", m.ood_far.string()},
                    {"k_values", m.k_values},
                    {"train_size", m.train_size},
                    {"test_size", m.test_size},
                    {"shrinkage", std::string(to_string(m.shrinkage))}};
  write_text(path, doc.dump(2));
}

}  // namespace uood
