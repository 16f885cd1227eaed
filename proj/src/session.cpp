#include "sreview/session.hpp"

#include "sreview/error.hpp"
#include "sreview/text.hpp"

#include <sstream>

namespace sreview {

const PlanItem* SessionPlan::find(std::string_view key) const
{
    for (const auto& item : items)
        if (item.key == key) return &item;
    return nullptr;
}

SessionPlan make_plan(const ReviewForm& form, VenueKind venue_kind, const TreeCatalog& trees)
{
    SessionPlan plan;
    plan.form_id = form.form_id;
    plan.venue_kind = venue_kind;
    for (const auto& fi : form.items) {
        PlanItem item{fi.key, fi.text, fi.category, fi.adhoc, std::nullopt};
        if (fi.category == Category::Essential) {
            if (fi.followup_tree_ref) {
                auto it = trees.find(*fi.followup_tree_ref);
                if (it == trees.end())
                    throw Error(ErrorCode::InvalidTree, "item " + fi.key + " refers to unknown tree '" +
                                                            *fi.followup_tree_ref + "'");
                item.tree = it->second;
            } else {
                item.tree = default_tree(venue_kind);
            }
        }
        plan.items.push_back(std::move(item));
    }
    return plan;
}

std::string_view to_string(SessionState s)
{
    return s == SessionState::Open ? "open" : "complete";
}

bool Session::operator==(const Session& o) const
{
    bool plans_equal = (plan == o.plan) || (plan && o.plan && *plan == *o.plan);
    return plans_equal && session_id == o.session_id && form_id == o.form_id && reviewer_id == o.reviewer_id &&
           venue_kind == o.venue_kind && answers == o.answers && revealed == o.revealed &&
           desirable_marks == o.desirable_marks && comments == o.comments && state == o.state &&
           history == o.history;
}

namespace {

const std::string kRoot{kRootNode};

const PlanItem& plan_item(const Session& s, const std::string& key)
{
    const auto* item = s.plan->find(key);
    if (!item) throw Error(ErrorCode::UnknownItem, "no item '" + key + "' in form " + s.form_id);
    return *item;
}

void require_open(const Session& s)
{
    if (s.state != SessionState::Open) throw Error(ErrorCode::SessionClosed, "session " + s.session_id + " is complete");
}

std::size_t utf8_length(const std::string& s)
{
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

struct Walk {
    std::vector<std::string> path; // revealed internal nodes, root first
    std::optional<ItemStatus> status;
};

// Follows recorded answers from the attribute question down to a leaf, or to
// the first unanswered node.
Walk walk_item(const Session& s, const PlanItem& item)
{
    Walk w;
    std::string cur = kRoot;
    std::optional<std::string> note;
    for (;;) {
        w.path.push_back(cur);
        auto it = s.answers.find({item.key, cur});
        if (it == s.answers.end()) return w;
        const Answer& a = it->second;
        if (cur == kRoot) {
            if (a.value == "yes") {
                w.status = ItemStatus{Status::Met, std::nullopt};
                return w;
            }
            cur = item.tree->root;
        } else {
            const auto& node = item.tree->node(cur);
            if (node.capture_text) note = a.value;
            const std::string edge = node.answer_kind == AnswerKind::FreeText ? std::string(kNextEdge) : a.value;
            cur = node.edges.at(edge);
        }
        const auto& next = item.tree->node(cur);
        if (next.is_leaf()) {
            w.status = ItemStatus{*next.leaf_status, note};
            return w;
        }
    }
}

void check_answer(const FollowUpNode& node, const Answer& a)
{
    if (a.kind != node.answer_kind)
        throw Error(ErrorCode::WrongAnswerKind, "node '" + node.node_id + "' expects a " +
                                                    std::string(to_string(node.answer_kind)) + " answer");
    switch (a.kind) {
    case AnswerKind::YesNo:
        if (a.value != "yes" && a.value != "no")
            throw Error(ErrorCode::WrongAnswerKind, "yes/no answer must be 'yes' or 'no'");
        break;
    case AnswerKind::Choice:
        if (!node.edges.count(a.value))
            throw Error(ErrorCode::WrongAnswerKind, "'" + a.value + "' is not a choice of node '" + node.node_id + "'");
        break;
    case AnswerKind::FreeText:
        if (node.capture_text && trim(a.value).empty())
            throw Error(ErrorCode::WrongAnswerKind, "node '" + node.node_id + "' requires a short explanation");
        if (utf8_length(a.value) > kMaxCapturedText)
            throw Error(ErrorCode::TextTooLong, "explanations are limited to " + std::to_string(kMaxCapturedText) +
                                                    " characters");
        break;
    }
}

} // namespace

FollowUpNode node_for(const PlanItem& item, const std::string& node_id)
{
    if (!item.tree) throw Error(ErrorCode::WrongCategory, item.key + " has no follow-up questions");
    if (node_id == kRoot) {
        FollowUpNode n;
        n.node_id = kRoot;
        n.prompt = item.text;
        n.answer_kind = AnswerKind::YesNo;
        n.edges = {{"yes", ""}, {"no", item.tree->root}};
        return n;
    }
    return item.tree->node(node_id);
}

Session start_session(const ReviewForm& form, const std::string& reviewer_id, VenueKind venue_kind,
                      const TreeCatalog& trees, const std::string& session_id)
{
    return start_session(std::make_shared<const SessionPlan>(make_plan(form, venue_kind, trees)), reviewer_id,
                         session_id);
}

Session start_session(std::shared_ptr<const SessionPlan> plan, const std::string& reviewer_id,
                      const std::string& session_id)
{
    Session s;
    s.session_id = session_id;
    s.form_id = plan->form_id;
    s.reviewer_id = reviewer_id;
    s.venue_kind = plan->venue_kind;
    for (const auto& item : plan->items)
        if (item.category == Category::Essential) s.revealed.insert({item.key, kRoot});
    s.plan = std::move(plan);
    return s;
}

Session answer(const Session& s, const std::string& item_key, const std::string& node_id, const Answer& a,
               std::int64_t timestamp_ms)
{
    require_open(s);
    const auto& item = plan_item(s, item_key);
    if (item.category != Category::Essential)
        throw Error(ErrorCode::WrongCategory, item_key + " is " + std::string(to_string(item.category)) +
                                                  "; mark it present or absent instead");
    if (!s.revealed.count({item_key, node_id}))
        throw Error(ErrorCode::NotRevealed, "prompt " + item_key + "#" + node_id + " has not been revealed");
    check_answer(node_for(item, node_id), a);

    Session next = s;
    next.answers[{item_key, node_id}] = a;

    // Re-derive the path; a changed answer hides everything below it.
    auto w = walk_item(next, item);
    std::set<std::string> on_path(w.path.begin(), w.path.end());
    for (auto it = next.revealed.lower_bound({item_key, ""}); it != next.revealed.end() && it->item_key == item_key;)
        it = on_path.count(it->node_id) ? std::next(it) : next.revealed.erase(it);
    for (auto it = next.answers.lower_bound({item_key, ""}); it != next.answers.end() && it->first.item_key == item_key;)
        it = on_path.count(it->first.node_id) ? std::next(it) : next.answers.erase(it);
    for (const auto& n : w.path) next.revealed.insert({item_key, n});

    SessionEvent e;
    e.type = EventType::Answer;
    e.item_key = item_key;
    e.node_id = node_id;
    e.answer = a;
    e.timestamp_ms = timestamp_ms;
    next.history.push_back(std::move(e));
    return next;
}

Session mark_attribute(const Session& s, const std::string& item_key, bool present, std::int64_t timestamp_ms)
{
    require_open(s);
    const auto& item = plan_item(s, item_key);
    if (item.category == Category::Essential)
        throw Error(ErrorCode::WrongCategory, item_key + " is essential; answer its question instead");
    Session next = s;
    next.desirable_marks[item_key] = present;
    SessionEvent e;
    e.type = EventType::Mark;
    e.item_key = item_key;
    e.present = present;
    e.timestamp_ms = timestamp_ms;
    next.history.push_back(std::move(e));
    return next;
}

Session set_comments(const Session& s, const std::string& text, std::int64_t timestamp_ms)
{
    require_open(s);
    Session next = s;
    next.comments = text;
    SessionEvent e;
    e.type = EventType::Comment;
    e.text = text;
    e.timestamp_ms = timestamp_ms;
    next.history.push_back(std::move(e));
    return next;
}

bool is_completable(const Session& s)
{
    for (const auto& item : s.plan->items) {
        if (item.category == Category::Essential) {
            if (!item_status(s, item.key)) return false;
        } else if (!s.desirable_marks.count(item.key)) {
            return false;
        }
    }
    return true;
}

Session complete(const Session& s, std::int64_t timestamp_ms)
{
    require_open(s);
    for (const auto& item : s.plan->items) {
        if (item.category == Category::Essential ? !item_status(s, item.key).has_value()
                                                 : !s.desirable_marks.count(item.key))
            throw Error(ErrorCode::IncompleteSession, "item " + item.key + " is not finished");
    }
    Session next = s;
    next.state = SessionState::Complete;
    SessionEvent e;
    e.type = EventType::Complete;
    e.timestamp_ms = timestamp_ms;
    next.history.push_back(std::move(e));
    return next;
}

Session reopen(const Session& s, std::int64_t timestamp_ms)
{
    if (s.state == SessionState::Open) return s;
    Session next = s;
    next.state = SessionState::Open;
    SessionEvent e;
    e.type = EventType::Reopen;
    e.timestamp_ms = timestamp_ms;
    next.history.push_back(std::move(e));
    return next;
}

std::optional<ItemStatus> item_status(const Session& s, const std::string& item_key)
{
    const auto& item = plan_item(s, item_key);
    if (item.category != Category::Essential) return std::nullopt;
    return walk_item(s, item).status;
}

std::optional<std::string> pending_node(const Session& s, const std::string& item_key)
{
    const auto& item = plan_item(s, item_key);
    if (item.category != Category::Essential) return std::nullopt;
    auto w = walk_item(s, item);
    if (w.status) return std::nullopt;
    return w.path.back();
}

Session apply_event(const Session& s, const SessionEvent& e)
{
    switch (e.type) {
    case EventType::Answer: return answer(s, e.item_key, e.node_id, e.answer, e.timestamp_ms);
    case EventType::Mark: return mark_attribute(s, e.item_key, e.present, e.timestamp_ms);
    case EventType::Comment: return set_comments(s, e.text, e.timestamp_ms);
    case EventType::Complete: return complete(s, e.timestamp_ms);
    case EventType::Reopen: return reopen(s, e.timestamp_ms);
    }
    return s;
}

// --- serialization ----------------------------------------------------------

namespace {

std::string_view event_type_name(EventType t)
{
    switch (t) {
    case EventType::Answer: return "answer";
    case EventType::Mark: return "mark";
    case EventType::Comment: return "comment";
    case EventType::Complete: return "complete";
    case EventType::Reopen: return "reopen";
    }
    return "answer";
}

EventType parse_event_type(const std::string& s)
{
    for (auto t : {EventType::Answer, EventType::Mark, EventType::Comment, EventType::Complete, EventType::Reopen})
        if (event_type_name(t) == s) return t;
    throw Error(ErrorCode::InvalidRequest, "unknown session event '" + s + "'");
}

} // namespace

nlohmann::ordered_json tree_to_json(const FollowUpTree& t)
{
    nlohmann::ordered_json j;
    j["tree_id"] = t.tree_id;
    j["root"] = t.root;
    j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& [id, n] : t.nodes) {
        nlohmann::ordered_json jn;
        jn["node_id"] = id;
        if (n.is_leaf()) {
            jn["leaf"] = to_string(*n.leaf_status);
        } else {
            jn["kind"] = to_string(n.answer_kind);
            jn["prompt"] = n.prompt;
            jn["capture"] = n.capture_text;
            nlohmann::ordered_json edges = nlohmann::ordered_json::object();
            for (const auto& [label, target] : n.edges) edges[label] = target;
            jn["edges"] = std::move(edges);
        }
        j["nodes"].push_back(std::move(jn));
    }
    return j;
}

FollowUpTree tree_from_json(const nlohmann::json& j)
{
    FollowUpTree t;
    t.tree_id = j.at("tree_id").get<std::string>();
    t.root = j.at("root").get<std::string>();
    for (const auto& jn : j.at("nodes")) {
        FollowUpNode n;
        n.node_id = jn.at("node_id").get<std::string>();
        if (jn.contains("leaf")) {
            n.leaf_status = parse_status(jn["leaf"].get<std::string>());
        } else {
            n.answer_kind = parse_answer_kind(jn.at("kind").get<std::string>());
            n.prompt = jn.at("prompt").get<std::string>();
            n.capture_text = jn.value("capture", false);
            for (const auto& [label, target] : jn.at("edges").items()) n.edges[label] = target.get<std::string>();
        }
        t.nodes.emplace(n.node_id, std::move(n));
    }
    auto problems = check_tree(t);
    if (!problems.empty()) throw Error(ErrorCode::InvalidTree, problems.front());
    return t;
}

nlohmann::ordered_json plan_to_json(const SessionPlan& p)
{
    nlohmann::ordered_json j;
    j["form_id"] = p.form_id;
    j["venue_kind"] = to_string(p.venue_kind);
    j["items"] = nlohmann::ordered_json::array();
    for (const auto& item : p.items) {
        nlohmann::ordered_json ji;
        ji["key"] = item.key;
        ji["text"] = item.text;
        ji["category"] = to_string(item.category);
        ji["adhoc"] = item.adhoc;
        if (item.tree) ji["tree"] = tree_to_json(*item.tree);
        j["items"].push_back(std::move(ji));
    }
    return j;
}

SessionPlan plan_from_json(const nlohmann::json& j)
{
    SessionPlan p;
    p.form_id = j.at("form_id").get<std::string>();
    p.venue_kind = parse_venue_kind(j.at("venue_kind").get<std::string>());
    for (const auto& ji : j.at("items")) {
        PlanItem item;
        item.key = ji.at("key").get<std::string>();
        item.text = ji.at("text").get<std::string>();
        item.category = parse_category(ji.at("category").get<std::string>());
        item.adhoc = ji.value("adhoc", false);
        if (ji.contains("tree")) item.tree = tree_from_json(ji["tree"]);
        if ((item.category == Category::Essential) != item.tree.has_value())
            throw Error(ErrorCode::InvalidTree, "item " + item.key + ": only essential items carry a tree");
        p.items.push_back(std::move(item));
    }
    return p;
}

nlohmann::ordered_json event_to_json(const SessionEvent& e)
{
    nlohmann::ordered_json j;
    j["type"] = event_type_name(e.type);
    j["ts"] = e.timestamp_ms;
    switch (e.type) {
    case EventType::Answer:
        j["item_key"] = e.item_key;
        j["node_id"] = e.node_id;
        j["kind"] = to_string(e.answer.kind);
        j["value"] = e.answer.value;
        break;
    case EventType::Mark:
        j["item_key"] = e.item_key;
        j["present"] = e.present;
        break;
    case EventType::Comment:
        j["text"] = e.text;
        break;
    case EventType::Complete:
    case EventType::Reopen:
        break;
    }
    return j;
}

SessionEvent event_from_json(const nlohmann::json& j)
{
    SessionEvent e;
    e.type = parse_event_type(j.at("type").get<std::string>());
    e.timestamp_ms = j.value("ts", std::int64_t{0});
    switch (e.type) {
    case EventType::Answer:
        e.item_key = j.at("item_key").get<std::string>();
        e.node_id = j.at("node_id").get<std::string>();
        e.answer.kind = parse_answer_kind(j.at("kind").get<std::string>());
        e.answer.value = j.at("value").get<std::string>();
        break;
    case EventType::Mark:
        e.item_key = j.at("item_key").get<std::string>();
        e.present = j.at("present").get<bool>();
        break;
    case EventType::Comment:
        e.text = j.at("text").get<std::string>();
        break;
    case EventType::Complete:
    case EventType::Reopen:
        break;
    }
    return e;
}

std::string export_session_log(const Session& s)
{
    std::string out;
    nlohmann::ordered_json start;
    start["type"] = "start";
    start["format"] = "sreview-session 1";
    start["session_id"] = s.session_id;
    start["reviewer_id"] = s.reviewer_id;
    start["plan"] = plan_to_json(*s.plan);
    out += start.dump() + "\n";
    std::uint64_t seq = 0;
    for (const auto& e : s.history) {
        auto j = event_to_json(e);
        nlohmann::ordered_json line;
        line["seq"] = ++seq;
        for (auto& [k, v] : j.items()) line[k] = v;
        out += line.dump() + "\n";
    }
    return out;
}

Session replay_session_log(std::string_view log)
{
    std::istringstream in{std::string(log)};
    std::string line;
    std::optional<Session> s;
    std::uint64_t expected_seq = 0;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& ex) {
            throw Error(ErrorCode::InvalidRequest, "session log line " + std::to_string(line_no) + ": " + ex.what());
        }
        if (!s) {
            if (j.value("type", "") != "start")
                throw Error(ErrorCode::InvalidRequest, "session log must begin with a start record");
            auto plan = std::make_shared<const SessionPlan>(plan_from_json(j.at("plan")));
            s = start_session(std::move(plan), j.at("reviewer_id").get<std::string>(),
                              j.at("session_id").get<std::string>());
            continue;
        }
        auto seq = j.at("seq").get<std::uint64_t>();
        if (seq != ++expected_seq)
            throw Error(ErrorCode::ReplayDivergence, "session log sequence gap at line " + std::to_string(line_no));
        s = apply_event(*s, event_from_json(j));
    }
    if (!s) throw Error(ErrorCode::InvalidRequest, "empty session log");
    return *s;
}

nlohmann::ordered_json session_to_json(const Session& s)
{
    nlohmann::ordered_json j;
    j["session_id"] = s.session_id;
    j["form_id"] = s.form_id;
    j["reviewer_id"] = s.reviewer_id;
    j["venue_kind"] = to_string(s.venue_kind);
    j["state"] = to_string(s.state);
    j["completable"] = is_completable(s);
    j["comments"] = s.comments;
    j["items"] = nlohmann::ordered_json::array();
    for (const auto& item : s.plan->items) {
        nlohmann::ordered_json ji;
        ji["key"] = item.key;
        ji["category"] = to_string(item.category);
        ji["text"] = item.text;
        ji["adhoc"] = item.adhoc;
        if (item.category == Category::Essential) {
            auto w = walk_item(s, item);
            ji["prompts"] = nlohmann::ordered_json::array();
            for (const auto& node_id : w.path) {
                auto node = node_for(item, node_id);
                nlohmann::ordered_json jp;
                jp["node_id"] = node_id;
                jp["prompt"] = node.prompt;
                jp["kind"] = to_string(node.answer_kind);
                if (node.answer_kind == AnswerKind::Choice) {
                    jp["choices"] = nlohmann::ordered_json::array();
                    for (const auto& [label, _] : node.edges) jp["choices"].push_back(label);
                }
                jp["capture"] = node.capture_text;
                auto a = s.answers.find({item.key, node_id});
                jp["answer"] = a == s.answers.end() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(a->second.value);
                ji["prompts"].push_back(std::move(jp));
            }
            if (w.status) {
                ji["status"] = to_string(w.status->status);
                ji["note"] = w.status->note ? nlohmann::ordered_json(*w.status->note) : nlohmann::ordered_json(nullptr);
            } else {
                ji["status"] = nullptr;
                ji["note"] = nullptr;
            }
        } else {
            auto m = s.desirable_marks.find(item.key);
            ji["present"] = m == s.desirable_marks.end() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(m->second);
        }
        j["items"].push_back(std::move(ji));
    }
    return j;
}

} // namespace sreview
