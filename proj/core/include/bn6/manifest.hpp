#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bn6/config.hpp"

namespace bn6 {

/// Library version written into every manifest.
[[nodiscard]] std::string artifact_version();

struct FileRecord {
    std::string name;    ///< relative to the output directory
    std::string sha256;
    /// Set once the file has been rewritten under the same digest: whether the
    /// latest rewrite reproduced the previous bytes. Cached stages keep the flag.
    std::optional<bool> reproduced;
};

struct StageRecord {
    std::vector<FileRecord> files;
    double seconds = 0.0;
    bool cached = false;
    std::string finished_at;  ///< UTC timestamp; manifests are the only place timestamps live
};

struct Verdict {
    int criterion = 0;
    std::string title;
    bool pass = false;
    std::string measured;  ///< what was compared against what
};

struct RunManifest {
    std::string config_text;
    std::string config_digest;
    std::string version;
    std::map<std::string, StageRecord> stages;
    std::vector<Verdict> verdicts;
    std::string created_at;
    std::string updated_at;

    /// Fresh manifest for `cfg`.
    [[nodiscard]] static RunManifest for_config(const RunConfig& cfg);
    /// Reads `dir`/manifest.json; an absent file gives std::nullopt.
    [[nodiscard]] static std::optional<RunManifest> load(const std::filesystem::path& dir);
    void save(const std::filesystem::path& dir);

    /// Records `stage` as having written `files` (hashing them now) and
    /// compares against any earlier hashes for the same files.
    void record_stage(const std::string& stage, const std::filesystem::path& dir,
                      const std::vector<std::string>& files, double seconds, bool cached);
};

[[nodiscard]] std::string file_sha256(const std::filesystem::path& p);
[[nodiscard]] std::string utc_timestamp();

}  // namespace bn6
