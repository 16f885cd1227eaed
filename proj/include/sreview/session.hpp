#pragma once

#include "sreview/followup.hpp"
#include "sreview/form.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sreview {

/// Node id of the attribute question itself ("does the paper have X?").
/// Yes finalizes the item as Met; no enters the item's follow-up tree.
inline constexpr std::string_view kRootNode = "root";

struct Answer {
    AnswerKind kind = AnswerKind::YesNo;
    std::string value;

    static Answer yes() { return {AnswerKind::YesNo, "yes"}; }
    static Answer no() { return {AnswerKind::YesNo, "no"}; }
    static Answer choice(std::string label) { return {AnswerKind::Choice, std::move(label)}; }
    static Answer text(std::string t) { return {AnswerKind::FreeText, std::move(t)}; }

    bool operator==(const Answer&) const = default;
};

/// One form item as a reviewer sees it, with its follow-up tree resolved.
struct PlanItem {
    std::string key;
    std::string text;
    Category category = Category::Essential;
    bool adhoc = false;
    std::optional<FollowUpTree> tree; // essential items only

    bool operator==(const PlanItem&) const = default;
};

struct SessionPlan {
    std::string form_id;
    VenueKind venue_kind = VenueKind::Journal;
    std::vector<PlanItem> items;

    const PlanItem* find(std::string_view key) const;
    bool operator==(const SessionPlan&) const = default;
};

/// Resolves each essential item's custom tree (or the venue default).
/// Throws InvalidTree when a referenced tree is missing from `trees`.
SessionPlan make_plan(const ReviewForm& form, VenueKind venue_kind, const TreeCatalog& trees);

struct NodeRef {
    std::string item_key;
    std::string node_id;

    auto operator<=>(const NodeRef&) const = default;
};

enum class SessionState { Open, Complete };
std::string_view to_string(SessionState s);

enum class EventType { Answer, Mark, Comment, Complete, Reopen };

/// One entry of the append-only answer log.
struct SessionEvent {
    EventType type = EventType::Answer;
    std::string item_key;
    std::string node_id;
    Answer answer;
    bool present = false;
    std::string text;
    std::int64_t timestamp_ms = 0;

    bool operator==(const SessionEvent&) const = default;
};

struct Session {
    std::string session_id;
    std::string form_id;
    std::string reviewer_id;
    VenueKind venue_kind = VenueKind::Journal;
    std::shared_ptr<const SessionPlan> plan;
    std::map<NodeRef, Answer> answers;
    std::set<NodeRef> revealed;
    std::map<std::string, bool> desirable_marks;
    std::string comments; // non-binding; never read by the decision engine
    SessionState state = SessionState::Open;
    std::vector<SessionEvent> history;

    bool operator==(const Session& o) const;
};

Session start_session(const ReviewForm& form, const std::string& reviewer_id, VenueKind venue_kind,
                      const TreeCatalog& trees, const std::string& session_id);
Session start_session(std::shared_ptr<const SessionPlan> plan, const std::string& reviewer_id,
                      const std::string& session_id);

Session answer(const Session& s, const std::string& item_key, const std::string& node_id, const Answer& a,
               std::int64_t timestamp_ms = 0);
Session mark_attribute(const Session& s, const std::string& item_key, bool present, std::int64_t timestamp_ms = 0);
Session set_comments(const Session& s, const std::string& text, std::int64_t timestamp_ms = 0);
Session complete(const Session& s, std::int64_t timestamp_ms = 0);
Session reopen(const Session& s, std::int64_t timestamp_ms = 0);

std::optional<ItemStatus> item_status(const Session& s, const std::string& item_key);
bool is_completable(const Session& s);

/// The revealed node still waiting for an answer, if any.
std::optional<std::string> pending_node(const Session& s, const std::string& item_key);

/// Looks up a prompt node, including the synthetic attribute question.
FollowUpNode node_for(const PlanItem& item, const std::string& node_id);

Session apply_event(const Session& s, const SessionEvent& e);

std::string export_session_log(const Session& s);
Session replay_session_log(std::string_view log);

nlohmann::ordered_json session_to_json(const Session& s);
nlohmann::ordered_json tree_to_json(const FollowUpTree& t);
FollowUpTree tree_from_json(const nlohmann::json& j);
nlohmann::ordered_json plan_to_json(const SessionPlan& p);
SessionPlan plan_from_json(const nlohmann::json& j);
nlohmann::ordered_json event_to_json(const SessionEvent& e);
SessionEvent event_from_json(const nlohmann::json& j);

} // namespace sreview
