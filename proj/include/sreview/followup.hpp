#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sreview {

enum class VenueKind { Journal, Conference };

/// Reduced outcome of one essential item, ordered from best to worst.
enum class Status { Met, JustifiedDeviation, FixableMinor, FixableRevision, Fatal };

inline constexpr Status kAllStatuses[] = {Status::Met, Status::JustifiedDeviation,
                                          Status::FixableMinor, Status::FixableRevision,
                                          Status::Fatal};

struct ItemStatus {
    Status status = Status::Met;
    std::optional<std::string> note; // never set for Met

    bool operator==(const ItemStatus&) const = default;
};

enum class AnswerKind { YesNo, Choice, FreeText };

std::string_view to_string(VenueKind k);
std::string_view to_string(Status s);
std::string_view to_string(AnswerKind k);
VenueKind parse_venue_kind(std::string_view s);
Status parse_status(std::string_view s);
AnswerKind parse_answer_kind(std::string_view s);

inline constexpr std::size_t kMaxCapturedText = 2000;

/// Edge key used by FreeText nodes, which have exactly one successor.
inline constexpr std::string_view kNextEdge = "next";

struct FollowUpNode {
    std::string node_id;
    std::string prompt;
    AnswerKind answer_kind = AnswerKind::YesNo;
    std::map<std::string, std::string> edges; // answer -> node_id
    std::optional<Status> leaf_status;
    bool capture_text = false;

    bool is_leaf() const { return leaf_status.has_value(); }
    bool operator==(const FollowUpNode&) const = default;
};

/// Diagnostic questions revealed below an essential item once the reviewer
/// answers "no" to the item itself.
struct FollowUpTree {
    std::string tree_id;
    std::map<std::string, FollowUpNode> nodes;
    std::string root;

    const FollowUpNode& node(const std::string& id) const;
    bool operator==(const FollowUpTree&) const = default;
};

using TreeCatalog = std::map<std::string, FollowUpTree>;

/// The canonical deviation tree. Journals get the extra "fixable without
/// repeating data collection" question; conferences go straight to Fatal.
FollowUpTree default_tree(VenueKind venue_kind);

/// Problems found in a tree; empty when the tree is usable.
std::vector<std::string> check_tree(const FollowUpTree& tree);

/// Parses the INI-like tree definition format. Throws Error(InvalidTree).
FollowUpTree parse_tree(std::string_view text);
std::string serialize_tree(const FollowUpTree& tree);

} // namespace sreview
