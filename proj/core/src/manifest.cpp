#include "bn6/manifest.hpp"

#include <chrono>
#include <ctime>

#include <fmt/format.h>

#include "bn6/errors.hpp"
#include "json_io.hpp"

#ifndef BN6_VERSION
#define BN6_VERSION "0.0.0"
#endif

namespace bn6 {

using detail::Json;

std::string artifact_version() { return BN6_VERSION; }

std::string file_sha256(const std::filesystem::path& p) { return sha256_hex(detail::read_text_file(p)); }

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunManifest RunManifest::for_config(const RunConfig& cfg) {
    RunManifest m;
    m.config_text = canonical_text(cfg);
    m.config_digest = sha256_hex(m.config_text);
    m.version = artifact_version();
    m.created_at = utc_timestamp();
    m.updated_at = m.created_at;
    return m;
}

std::optional<RunManifest> RunManifest::load(const std::filesystem::path& dir) {
    const auto p = dir / "manifest.json";
    if (!std::filesystem::exists(p)) return std::nullopt;
    const Json j = detail::read_json_file(p);
    RunManifest m;
    try {
        m.config_text = j.at("config").get<std::string>();
        m.config_digest = j.at("config_digest").get<std::string>();
        m.version = j.at("artifact_version").get<std::string>();
        m.created_at = j.value("created_at", "");
        m.updated_at = j.value("updated_at", "");
        for (const auto& [name, s] : j.at("stages").items()) {
            StageRecord r;
            r.seconds = s.value("seconds", 0.0);
            r.cached = s.value("cached", false);
            r.finished_at = s.value("finished_at", "");
            for (const auto& f : s.at("files")) {
                FileRecord fr;
                fr.name = f.at("name").get<std::string>();
                fr.sha256 = f.at("sha256").get<std::string>();
                if (f.contains("reproduced") && f["reproduced"].is_boolean()) fr.reproduced = f["reproduced"].get<bool>();
                r.files.push_back(std::move(fr));
            }
            m.stages.emplace(name, std::move(r));
        }
        for (const auto& v : j.value("verdicts", Json::array())) {
            Verdict vd;
            vd.criterion = v.at("criterion").get<int>();
            vd.title = v.at("title").get<std::string>();
            vd.pass = v.at("pass").get<bool>();
            vd.measured = v.at("measured").get<std::string>();
            m.verdicts.push_back(std::move(vd));
        }
    } catch (const Json::exception& e) {
        throw Error(fmt::format("{}: malformed manifest ({})", p.string(), e.what()));
    }
    if (sha256_hex(m.config_text) != m.config_digest)
        throw Error(fmt::format("{}: config digest does not match the stored config", p.string()));
    return m;
}

void RunManifest::save(const std::filesystem::path& dir) {
    updated_at = utc_timestamp();
    Json j;
    j["artifact_version"] = version;
    j["config_digest"] = config_digest;
    j["config"] = config_text;
    j["created_at"] = created_at;
    j["updated_at"] = updated_at;
    Json st = Json::object();
    for (const auto& [name, r] : stages) {
        Json s;
        Json files = Json::array();
        for (const auto& f : r.files) {
            Json fj;
            fj["name"] = f.name;
            fj["sha256"] = f.sha256;
            fj["reproduced"] = f.reproduced ? Json(*f.reproduced) : Json(nullptr);
            files.push_back(std::move(fj));
        }
        s["files"] = std::move(files);
        s["seconds"] = r.seconds;
        s["cached"] = r.cached;
        s["finished_at"] = r.finished_at;
        st[name] = std::move(s);
    }
    j["stages"] = std::move(st);
    Json vs = Json::array();
    for (const auto& v : verdicts) {
        Json vj;
        vj["criterion"] = v.criterion;
        vj["title"] = v.title;
        vj["pass"] = v.pass;
        vj["measured"] = v.measured;
        vs.push_back(std::move(vj));
    }
    j["verdicts"] = std::move(vs);
    detail::write_text_file(dir / "manifest.json", detail::dump_json(j));
}

void RunManifest::record_stage(const std::string& stage, const std::filesystem::path& dir,
                               const std::vector<std::string>& files, double seconds, bool cached) {
    StageRecord next;
    next.seconds = seconds;
    next.cached = cached;
    next.finished_at = utc_timestamp();
    const auto prev = stages.find(stage);
    for (const auto& name : files) {
        FileRecord f;
        f.name = name;
        f.sha256 = file_sha256(dir / name);
        if (prev != stages.end()) {
            for (const auto& old : prev->second.files) {
                if (old.name != name) continue;
                f.reproduced = cached ? old.reproduced : std::optional<bool>(old.sha256 == f.sha256);
            }
        }
        next.files.push_back(std::move(f));
    }
    stages[stage] = std::move(next);
}

}  // namespace bn6
