#pragma once

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sreview {

/// Append-only per-submission event log. With an empty directory the store
/// keeps everything in memory.
///
/// On disk: `<dir>/<submission_id>/events.jsonl`, one JSON record per line,
/// `seq` numbered from 1; `snapshot.json` alongside is derived and never read back.
class EventStore {
public:
    explicit EventStore(std::filesystem::path dir = {});

    bool persistent() const { return !dir_.empty(); }
    const std::filesystem::path& dir() const { return dir_; }

    /// Number of events recorded for the submission (0 if unknown).
    std::uint64_t version(const std::string& submission_id) const;

    /// Appends `record` as event number expected_version + 1. Throws
    /// VersionConflict if another writer got there first.
    void append(const std::string& submission_id, std::uint64_t expected_version, const nlohmann::ordered_json& record);

    void write_snapshot(const std::string& submission_id, const nlohmann::ordered_json& snapshot) const;

    /// Every stored log, keyed by submission id; records are in seq order.
    std::map<std::string, std::vector<nlohmann::json>> load_all() const;

    static std::vector<nlohmann::json> read_log(const std::filesystem::path& file);

private:
    std::filesystem::path dir_;
    std::map<std::string, std::vector<std::string>> memory_;
    std::map<std::string, std::uint64_t> versions_;
};

} // namespace sreview
