#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace phenogen::io {

inline constexpr int kManifestVersion = 1;

struct FileRecord {
  std::string path;
  std::string fnv;  // 16 hex digits
  bool operator==(const FileRecord&) const = default;
};

struct LineageEntry {
  std::string stage;       // pretrain, joint, finetune, sample, evaluate
  std::string checkpoint;  // output artifact of the stage
  std::string hash;        // hex FNV-1a of the artifact
  std::string parent;      // hash of the input checkpoint, empty for roots
  bool operator==(const LineageEntry&) const = default;
};

/// Run manifest written next to every artifact. Stages append to the same
/// manifest so the chain prior → agent can be audited offline.
struct Manifest {
  int version = kManifestVersion;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<FileRecord> data_files;
  std::vector<LineageEntry> lineage;
  /// Hash of the frozen molecule encoder at the start and end of a stage
  /// that must not modify it; equal when the freeze held.
  std::optional<std::pair<std::string, std::string>> frozen_encoder;

  std::string to_json() const;
  static Manifest from_json(const std::string& text);

  void save(const std::filesystem::path& path) const;
  static Manifest load(const std::filesystem::path& path);

  /// Re-hashes every recorded data file and lineage artifact relative to
  /// `base`. Returns human-readable problems; empty when everything matches.
  std::vector<std::string> verify(const std::filesystem::path& base) const;
};

/// Hex FNV-1a of a file's bytes. Throws Error{kIoFailure}.
std::string hash_file(const std::filesystem::path& path);

}  // namespace phenogen::io
