#include "sreview/event_store.hpp"

#include "sreview/error.hpp"
#include "sreview/text.hpp"

#include <algorithm>
#include <fstream>

namespace sreview {

namespace fs = std::filesystem;

EventStore::EventStore(fs::path dir) : dir_(std::move(dir))
{
    if (dir_.empty()) return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::StorageFailure, "cannot create store " + dir_.string() + ": " + ec.message());
    for (const auto& [id, records] : load_all()) versions_[id] = records.size();
}

std::uint64_t EventStore::version(const std::string& submission_id) const
{
    auto it = versions_.find(submission_id);
    return it == versions_.end() ? 0 : it->second;
}

void EventStore::append(const std::string& submission_id, std::uint64_t expected_version,
                        const nlohmann::ordered_json& record)
{
    const auto current = version(submission_id);
    if (current != expected_version)
        throw Error(ErrorCode::VersionConflict, "submission " + submission_id + " is at version " +
                                                    std::to_string(current) + ", expected " +
                                                    std::to_string(expected_version) + "; reload and retry");
    if (record.value("seq", std::uint64_t{0}) != current + 1)
        throw Error(ErrorCode::StorageFailure, "record sequence number does not follow the log");
    const auto line = record.dump();
    if (persistent()) {
        const auto sub_dir = dir_ / submission_id;
        std::error_code ec;
        fs::create_directories(sub_dir, ec);
        if (ec) throw Error(ErrorCode::StorageFailure, "cannot create " + sub_dir.string() + ": " + ec.message());
        std::ofstream out(sub_dir / "events.jsonl", std::ios::binary | std::ios::app);
        out << line << '\n';
        out.flush();
        if (!out) throw Error(ErrorCode::StorageFailure, "cannot append to log of " + submission_id);
    } else {
        memory_[submission_id].push_back(line);
    }
    versions_[submission_id] = current + 1;
}

void EventStore::write_snapshot(const std::string& submission_id, const nlohmann::ordered_json& snapshot) const
{
    if (!persistent()) return;
    const auto target = dir_ / submission_id / "snapshot.json";
    const auto tmp = dir_ / submission_id / "snapshot.json.tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << snapshot.dump(2) << '\n';
        if (!out) throw Error(ErrorCode::StorageFailure, "cannot write snapshot for " + submission_id);
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw Error(ErrorCode::StorageFailure, "cannot install snapshot for " + submission_id + ": " + ec.message());
}

std::vector<nlohmann::json> EventStore::read_log(const fs::path& file)
{
    std::vector<nlohmann::json> out;
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::StorageFailure, "cannot read " + file.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::StorageFailure, file.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (out.back().value("seq", std::uint64_t{0}) != out.size())
            throw Error(ErrorCode::StorageFailure, file.string() + ":" + std::to_string(line_no) + ": sequence gap");
    }
    return out;
}

std::map<std::string, std::vector<nlohmann::json>> EventStore::load_all() const
{
    std::map<std::string, std::vector<nlohmann::json>> out;
    if (!persistent()) {
        for (const auto& [id, lines] : memory_)
            for (const auto& l : lines) out[id].push_back(nlohmann::json::parse(l));
        return out;
    }
    if (!fs::is_directory(dir_)) return out;
    for (const auto& entry : fs::directory_iterator(dir_)) {
        if (!entry.is_directory()) continue;
        const auto log = entry.path() / "events.jsonl";
        if (!fs::exists(log)) continue;
        out[entry.path().filename().string()] = read_log(log);
    }
    return out;
}

} // namespace sreview
