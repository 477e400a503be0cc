#include "phenogen/io/manifest.h"

#include <json.hpp>

#include "phenogen/error.h"
#include "phenogen/hash.h"
#include "phenogen/io/corpus.h"

namespace phenogen::io {

using nlohmann::json;

std::string hash_file(const std::filesystem::path& path) { return hex64(fnv1a(read_file(path))); }

std::string Manifest::to_json() const {
  json j;
  j["version"] = version;
  j["tool_version"] = tool_version;
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  j["data_files"] = json::array();
  for (const auto& f : data_files) j["data_files"].push_back({{"path", f.path}, {"fnv", f.fnv}});
  j["lineage"] = json::array();
  for (const auto& l : lineage) {
    j["lineage"].push_back({{"stage", l.stage}, {"checkpoint", l.checkpoint}, {"hash", l.hash}, {"parent", l.parent}});
  }
  if (frozen_encoder) {
    j["frozen_encoder"] = {{"before", frozen_encoder->first}, {"after", frozen_encoder->second}};
  } else {
    j["frozen_encoder"] = nullptr;
  }
  return j.dump(2) + "\n";
}

Manifest Manifest::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Manifest m;
    m.version = j.at("version").get<int>();
    if (m.version != kManifestVersion) {
      throw Error(Errc::kVersionMismatch, "manifest version " + std::to_string(m.version));
    }
    m.tool_version = j.at("tool_version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& f : j.at("data_files")) m.data_files.push_back({f.at("path"), f.at("fnv")});
    for (const auto& l : j.at("lineage")) m.lineage.push_back({l.at("stage"), l.at("checkpoint"), l.at("hash"), l.at("parent")});
    if (j.contains("frozen_encoder") && !j["frozen_encoder"].is_null()) {
      m.frozen_encoder = {j["frozen_encoder"].at("before").get<std::string>(), j["frozen_encoder"].at("after").get<std::string>()};
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(Errc::kParseFailure, std::string("manifest: ") + e.what());
  }
}

void Manifest::save(const std::filesystem::path& path) const { write_file_atomic(path, to_json()); }

Manifest Manifest::load(const std::filesystem::path& path) { return from_json(read_file(path)); }

std::vector<std::string> Manifest::verify(const std::filesystem::path& base) const {
  std::vector<std::string> problems;
  auto check = [&](const std::string& rel, const std::string& want) {
    const std::filesystem::path p = base / rel;
    if (!std::filesystem::exists(p)) {
      problems.push_back(rel + ": missing");
      return;
    }
    const std::string got = hash_file(p);
    if (got != want) problems.push_back(rel + ": hash " + got + ", manifest records " + want);
  };
  for (const auto& f : data_files) check(f.path, f.fnv);
  for (const auto& l : lineage) {
    if (!l.checkpoint.empty()) check(l.checkpoint, l.hash);
  }
  for (std::size_t i = 1; i < lineage.size(); ++i) {
    if (lineage[i].parent.empty()) continue;
    bool found = false;
    for (std::size_t k = 0; k < i; ++k) found = found || lineage[k].hash == lineage[i].parent;
    if (!found) problems.push_back(lineage[i].stage + ": parent " + lineage[i].parent + " not produced by an earlier stage");
  }
  if (frozen_encoder && frozen_encoder->first != frozen_encoder->second) {
    problems.push_back("molecule encoder changed during a frozen stage");
  }
  return problems;
}

}  // namespace phenogen::io
