#include "sreview/decision.hpp"

#include "sreview/error.hpp"
#include "sreview/text.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

namespace sreview {

std::string_view to_string(Aggregation a)
{
    return a == Aggregation::WorstCase ? "worst-case" : "majority";
}

std::string_view to_string(Outcome o)
{
    switch (o) {
    case Outcome::Accept: return "accept";
    case Outcome::InviteRevision: return "invite-revision";
    case Outcome::Reject: return "reject";
    }
    return "accept";
}

std::string_view to_string(LetterKind k)
{
    switch (k) {
    case LetterKind::ReviewSummary: return "review-summary";
    case LetterKind::RevisionTodoList: return "revision-todo-list";
    case LetterKind::RejectionReasons: return "rejection-reasons";
    }
    return "review-summary";
}

Aggregation parse_aggregation(std::string_view s)
{
    auto v = to_lower(trim(s));
    if (v == "worst-case" || v == "worstcase") return Aggregation::WorstCase;
    if (v == "majority") return Aggregation::Majority;
    throw Error(ErrorCode::InvalidConfig, "unknown aggregation '" + std::string(s) + "'");
}

Outcome parse_outcome(std::string_view s)
{
    for (auto o : {Outcome::Accept, Outcome::InviteRevision, Outcome::Reject})
        if (to_string(o) == s) return o;
    throw Error(ErrorCode::InvalidRequest, "unknown outcome '" + std::string(s) + "'");
}

namespace {

LetterKind parse_letter_kind(std::string_view s)
{
    for (auto k : {LetterKind::ReviewSummary, LetterKind::RevisionTodoList, LetterKind::RejectionReasons})
        if (to_string(k) == s) return k;
    throw Error(ErrorCode::InvalidRequest, "unknown letter kind '" + std::string(s) + "'");
}

bool acceptable(Status s)
{
    return s == Status::Met || s == Status::JustifiedDeviation || s == Status::FixableMinor;
}

} // namespace

void VenueRules::check() const
{
    if (reviewers_required < 1) throw Error(ErrorCode::InvalidConfig, "reviewers_required must be at least 1");
    if (nomination_threshold < 1) throw Error(ErrorCode::InvalidConfig, "nomination_threshold must be at least 1");
    if (agreement_policy) {
        const auto& p = *agreement_policy;
        if (p.threshold < -1.0 || p.threshold > 1.0) throw Error(ErrorCode::InvalidConfig, "threshold must lie in [-1, 1]");
        if (p.metric == Metric::PercentAgreement && p.threshold < 0.0)
            throw Error(ErrorCode::InvalidConfig, "percent agreement threshold must lie in [0, 1]");
    }
}

Status combine_statuses(const std::vector<Status>& statuses, Aggregation aggregation)
{
    if (statuses.empty()) throw Error(ErrorCode::NotEnoughSessions, "no statuses to combine");
    if (aggregation == Aggregation::WorstCase) return *std::max_element(statuses.begin(), statuses.end());

    std::array<int, std::size(kAllStatuses)> counts{};
    for (Status s : statuses) ++counts[static_cast<std::size_t>(s)];
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i)
        if (counts[i] >= counts[best]) best = i; // ties go to the worse status
    return static_cast<Status>(best);
}

std::vector<ConsensusItem> aggregate(const std::vector<Session>& sessions, const VenueRules& rules)
{
    if (sessions.size() < static_cast<std::size_t>(std::max(rules.reviewers_required, 1)))
        throw Error(ErrorCode::NotEnoughSessions, "need " + std::to_string(rules.reviewers_required) +
                                                      " completed sessions, got " + std::to_string(sessions.size()));
    std::set<std::string> reviewers;
    for (const auto& s : sessions) {
        if (s.form_id != sessions.front().form_id)
            throw Error(ErrorCode::FormMismatch, s.session_id + " reviews form " + s.form_id + ", expected " +
                                                     sessions.front().form_id);
        if (s.state != SessionState::Complete)
            throw Error(ErrorCode::IncompleteSession, "session " + s.session_id + " is not complete");
        if (!reviewers.insert(s.reviewer_id).second)
            throw Error(ErrorCode::DuplicateReviewer, "reviewer " + s.reviewer_id + " has two sessions");
    }

    std::vector<ConsensusItem> out;
    for (const auto& item : sessions.front().plan->items) {
        if (item.category != Category::Essential) continue;
        ConsensusItem c;
        c.item_key = item.key;
        std::vector<Status> statuses;
        for (const auto& s : sessions) {
            auto st = item_status(s, item.key);
            if (!st) throw Error(ErrorCode::IncompleteSession, s.session_id + " has no status for " + item.key);
            c.per_reviewer[s.reviewer_id] = *st;
            statuses.push_back(st->status);
        }
        c.disputed = std::any_of(statuses.begin(), statuses.end(), [&](Status s) { return s != statuses.front(); });
        c.status = combine_statuses(statuses, rules.aggregation);
        out.push_back(std::move(c));
    }
    return out;
}

int unanimous_present_count(const std::vector<Session>& sessions)
{
    if (sessions.empty()) return 0;
    int count = 0;
    for (const auto& item : sessions.front().plan->items) {
        if (item.category == Category::Essential) continue;
        bool all = std::all_of(sessions.begin(), sessions.end(), [&](const Session& s) {
            auto it = s.desirable_marks.find(item.key);
            return it != s.desirable_marks.end() && it->second;
        });
        if (all) ++count;
    }
    return count;
}

Verdict decide_journal(const std::vector<ConsensusItem>& consensus, const std::vector<Session>&,
                       const VenueRules& rules)
{
    if (rules.venue_kind != VenueKind::Journal) throw Error(ErrorCode::WrongVenueKind, "journal rules required");
    Verdict v;
    const bool all_ok = std::all_of(consensus.begin(), consensus.end(), [](const auto& c) { return acceptable(c.status); });
    const bool any_fatal = std::any_of(consensus.begin(), consensus.end(), [](const auto& c) { return c.status == Status::Fatal; });
    if (all_ok) {
        v.outcome = Outcome::Accept;
        for (const auto& c : consensus)
            if (c.status != Status::Met) v.basis.push_back({c.item_key, c.status});
    } else if (!any_fatal) {
        v.outcome = Outcome::InviteRevision;
        for (const auto& c : consensus)
            if (c.status == Status::FixableRevision) v.basis.push_back({c.item_key, c.status});
    } else {
        v.outcome = Outcome::Reject;
        for (const auto& c : consensus)
            if (c.status == Status::Fatal) v.basis.push_back({c.item_key, c.status});
    }
    return v;
}

Verdict decide_conference(const std::vector<ConsensusItem>& consensus, const std::vector<Session>& sessions,
                          const VenueRules& rules)
{
    if (rules.venue_kind != VenueKind::Conference) throw Error(ErrorCode::WrongVenueKind, "conference rules required");
    Verdict v;
    const bool all_ok = std::all_of(consensus.begin(), consensus.end(), [](const auto& c) { return acceptable(c.status); });
    if (all_ok) {
        v.outcome = Outcome::Accept;
        for (const auto& c : consensus)
            if (c.status != Status::Met) v.basis.push_back({c.item_key, c.status});
        v.nominated = unanimous_present_count(sessions) >= rules.nomination_threshold;
    } else {
        // Single-stage review: anything beyond modest editing is a rejection.
        v.outcome = Outcome::Reject;
        for (const auto& c : consensus)
            if (!acceptable(c.status)) v.basis.push_back({c.item_key, c.status});
    }
    return v;
}

Verdict decide(const std::vector<ConsensusItem>& consensus, const std::vector<Session>& sessions,
               const VenueRules& rules)
{
    return rules.venue_kind == VenueKind::Journal ? decide_journal(consensus, sessions, rules)
                                                  : decide_conference(consensus, sessions, rules);
}

DecisionLetter generate_letter(const Verdict& verdict, const std::vector<ConsensusItem>& consensus,
                               const std::vector<Session>& sessions)
{
    for (const auto& b : verdict.basis) {
        auto it = std::find_if(consensus.begin(), consensus.end(), [&](const auto& c) { return c.item_key == b.item_key; });
        if (it == consensus.end() || it->status != b.status)
            throw Error(ErrorCode::ConsensusMismatch, "verdict basis item " + b.item_key + " does not match the consensus");
    }
    if (verdict.nominated && verdict.outcome != Outcome::Accept)
        throw Error(ErrorCode::ConsensusMismatch, "only accepted papers can be nominated");
    if (sessions.empty()) throw Error(ErrorCode::ConsensusMismatch, "letters need the reviewers' sessions");
    const auto& plan = *sessions.front().plan;
    for (const auto& s : sessions)
        if (s.form_id != plan.form_id) throw Error(ErrorCode::FormMismatch, "sessions use different forms");

    auto entry_for = [&](const ConsensusItem& c) {
        const auto* item = plan.find(c.item_key);
        if (!item) throw Error(ErrorCode::ConsensusMismatch, "consensus item " + c.item_key + " is not on the form");
        LetterEntry e{c.item_key, item->text, c.status, std::nullopt};
        // Notes from the reviewers who reached the consensus status, in session order.
        std::vector<std::string> notes;
        for (const auto& s : sessions) {
            auto it = c.per_reviewer.find(s.reviewer_id);
            if (it == c.per_reviewer.end() || it->second.status != c.status || !it->second.note) continue;
            if (std::find(notes.begin(), notes.end(), *it->second.note) == notes.end()) notes.push_back(*it->second.note);
        }
        if (!notes.empty()) {
            std::string joined;
            for (std::size_t i = 0; i < notes.size(); ++i) joined += (i ? "\n" : "") + notes[i];
            e.note = joined;
        }
        return e;
    };

    DecisionLetter letter;
    switch (verdict.outcome) {
    case Outcome::Accept:
        letter.kind = LetterKind::ReviewSummary;
        letter.preamble = "The manuscript meets the venue's rules for acceptance.";
        if (verdict.nominated) letter.preamble += " It is nominated for a distinguished paper award.";
        for (const auto& c : consensus) letter.entries.push_back(entry_for(c));
        break;
    case Outcome::InviteRevision:
        letter.kind = LetterKind::RevisionTodoList;
        letter.preamble = "A revision is invited. Completing every item on this list is sufficient for acceptance; "
                          "one person will check the list and there is no further round of review.";
        for (const auto& c : consensus)
            if (c.status == Status::FixableRevision) letter.entries.push_back(entry_for(c));
        break;
    case Outcome::Reject:
        letter.kind = LetterKind::RejectionReasons;
        letter.preamble = "The manuscript does not meet the venue's rules for acceptance for the reasons below.";
        for (const auto& b : verdict.basis) {
            auto it = std::find_if(consensus.begin(), consensus.end(), [&](const auto& c) { return c.item_key == b.item_key; });
            letter.entries.push_back(entry_for(*it));
        }
        break;
    }
    for (const auto& s : sessions)
        if (!trim(s.comments).empty()) letter.comments.push_back({s.reviewer_id, s.comments});
    return letter;
}

RevisionCheck verify_revision(const DecisionLetter& todo, const std::map<std::string, bool>& checker_marks)
{
    if (todo.kind != LetterKind::RevisionTodoList)
        throw Error(ErrorCode::WrongLetterKind, "only a revision to-do list can be checked");
    for (const auto& [key, _] : checker_marks) {
        bool known = std::any_of(todo.entries.begin(), todo.entries.end(), [&](const auto& e) { return e.item_key == key; });
        if (!known) throw Error(ErrorCode::UnknownItemKey, "'" + key + "' is not on the to-do list");
    }
    RevisionCheck result;
    for (const auto& e : todo.entries) {
        auto it = checker_marks.find(e.item_key);
        if (it == checker_marks.end() || !it->second) result.open_items.push_back(e.item_key);
    }
    result.accepted = result.open_items.empty();
    return result;
}

// --- export -----------------------------------------------------------------

namespace {

nlohmann::ordered_json optional_string(const std::optional<std::string>& s)
{
    return s ? nlohmann::ordered_json(*s) : nlohmann::ordered_json(nullptr);
}

} // namespace

nlohmann::ordered_json consensus_to_json(const std::vector<ConsensusItem>& consensus)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : consensus) {
        nlohmann::ordered_json j;
        j["item_key"] = c.item_key;
        j["status"] = to_string(c.status);
        j["disputed"] = c.disputed;
        nlohmann::ordered_json per = nlohmann::ordered_json::object();
        for (const auto& [reviewer, st] : c.per_reviewer)
            per[reviewer] = {{"status", to_string(st.status)}, {"note", optional_string(st.note)}};
        j["per_reviewer"] = std::move(per);
        arr.push_back(std::move(j));
    }
    return arr;
}

nlohmann::ordered_json verdict_to_json(const Verdict& v)
{
    nlohmann::ordered_json j;
    j["outcome"] = to_string(v.outcome);
    j["nominated"] = v.nominated;
    j["basis"] = nlohmann::ordered_json::array();
    for (const auto& b : v.basis) j["basis"].push_back({{"item_key", b.item_key}, {"status", to_string(b.status)}});
    return j;
}

Verdict verdict_from_json(const nlohmann::json& j)
{
    Verdict v;
    v.outcome = parse_outcome(j.at("outcome").get<std::string>());
    v.nominated = j.at("nominated").get<bool>();
    for (const auto& b : j.at("basis"))
        v.basis.push_back({b.at("item_key").get<std::string>(), parse_status(b.at("status").get<std::string>())});
    return v;
}

nlohmann::ordered_json letter_to_json(const DecisionLetter& l)
{
    nlohmann::ordered_json j;
    j["kind"] = to_string(l.kind);
    j["preamble"] = l.preamble;
    j["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : l.entries)
        j["entries"].push_back({{"item_key", e.item_key},
                                {"text", e.text},
                                {"status", to_string(e.status)},
                                {"note", optional_string(e.note)}});
    j["non_binding_comments"] = nlohmann::ordered_json::array();
    for (const auto& c : l.comments)
        j["non_binding_comments"].push_back({{"reviewer_id", c.reviewer_id}, {"text", c.text}});
    return j;
}

DecisionLetter letter_from_json(const nlohmann::json& j)
{
    DecisionLetter l;
    l.kind = parse_letter_kind(j.at("kind").get<std::string>());
    l.preamble = j.at("preamble").get<std::string>();
    for (const auto& e : j.at("entries")) {
        LetterEntry entry;
        entry.item_key = e.at("item_key").get<std::string>();
        entry.text = e.at("text").get<std::string>();
        entry.status = parse_status(e.at("status").get<std::string>());
        if (!e.at("note").is_null()) entry.note = e["note"].get<std::string>();
        l.entries.push_back(std::move(entry));
    }
    for (const auto& c : j.at("non_binding_comments"))
        l.comments.push_back({c.at("reviewer_id").get<std::string>(), c.at("text").get<std::string>()});
    return l;
}

std::string letter_to_text(const Verdict& v, const DecisionLetter& l)
{
    std::ostringstream out;
    out << "Outcome: " << to_string(v.outcome) << "\n";
    out << "Nominated: " << (v.nominated ? "yes" : "no") << "\n";
    out << "Letter: " << to_string(l.kind) << "\n\n";
    out << l.preamble << "\n";
    if (!l.entries.empty()) out << "\n";
    int n = 0;
    for (const auto& e : l.entries) {
        out << ++n << ". [" << e.item_key << "] " << e.text << " (" << to_string(e.status) << ")\n";
        if (e.note) {
            std::istringstream notes(*e.note);
            std::string line;
            while (std::getline(notes, line)) out << "   Note: " << line << "\n";
        }
    }
    if (!l.comments.empty()) {
        out << "\nNon-binding reviewer comments (these do not affect the decision):\n";
        for (const auto& c : l.comments) out << "- " << c.reviewer_id << ": " << c.text << "\n";
    }
    return out.str();
}

nlohmann::ordered_json rules_to_json(const VenueRules& r)
{
    nlohmann::ordered_json j;
    j["kind"] = to_string(r.venue_kind);
    j["reviewers"] = r.reviewers_required;
    j["aggregation"] = to_string(r.aggregation);
    j["nomination_threshold"] = r.nomination_threshold;
    if (r.agreement_policy) {
        j["agreement"] = {{"metric", to_string(r.agreement_policy->metric)},
                          {"threshold", r.agreement_policy->threshold},
                          {"scope", to_string(r.agreement_policy->scope)},
                          {"degenerate_pass", r.agreement_policy->treat_degenerate_as_pass}};
    } else {
        j["agreement"] = nullptr;
    }
    return j;
}

VenueRules rules_from_json(const nlohmann::json& j)
{
    VenueRules r;
    r.venue_kind = parse_venue_kind(j.at("kind").get<std::string>());
    r.reviewers_required = j.at("reviewers").get<int>();
    r.aggregation = parse_aggregation(j.at("aggregation").get<std::string>());
    r.nomination_threshold = j.at("nomination_threshold").get<int>();
    if (j.at("agreement").is_null()) {
        r.agreement_policy.reset();
    } else {
        const auto& a = j["agreement"];
        ThresholdPolicy p;
        p.metric = parse_metric(a.at("metric").get<std::string>());
        p.threshold = a.at("threshold").get<double>();
        p.scope = parse_scope(a.at("scope").get<std::string>());
        p.treat_degenerate_as_pass = a.at("degenerate_pass").get<bool>();
        r.agreement_policy = p;
    }
    r.check();
    return r;
}

VenueRules parse_venue_rules(std::string_view text)
{
    VenueRules r;
    ThresholdPolicy policy;
    bool agreement = true;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::InvalidConfig, "rules line " + std::to_string(line_no) + ": expected key = value");
        auto key = to_lower(trim(std::string_view(t).substr(0, eq)));
        auto value = trim(std::string_view(t).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        auto as_int = [&]() {
            try {
                std::size_t used = 0;
                int v = std::stoi(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
                return v;
            } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidConfig, "rules line " + std::to_string(line_no) + ": '" + key + "' must be an integer");
            }
        };
        auto as_bool = [&]() {
            auto v = to_lower(value);
            if (v == "true" || v == "yes" || v == "on") return true;
            if (v == "false" || v == "no" || v == "off") return false;
            throw Error(ErrorCode::InvalidConfig, "rules line " + std::to_string(line_no) + ": '" + key + "' must be true or false");
        };
        if (key == "kind") r.venue_kind = parse_venue_kind(value);
        else if (key == "reviewers") r.reviewers_required = as_int();
        else if (key == "nomination_threshold") r.nomination_threshold = as_int();
        else if (key == "aggregation") r.aggregation = parse_aggregation(value);
        else if (key == "agreement") agreement = as_bool();
        else if (key == "metric") policy.metric = parse_metric(value);
        else if (key == "scope") policy.scope = parse_scope(value);
        else if (key == "degenerate_pass") policy.treat_degenerate_as_pass = as_bool();
        else if (key == "threshold") {
            try {
                std::size_t used = 0;
                policy.threshold = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidConfig, "rules line " + std::to_string(line_no) + ": threshold must be a number");
            }
        } else {
            throw Error(ErrorCode::InvalidConfig, "rules line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (agreement) r.agreement_policy = policy;
    else r.agreement_policy.reset();
    r.check();
    return r;
}

std::string format_venue_rules(const VenueRules& r)
{
    std::ostringstream out;
    out << "kind = " << to_string(r.venue_kind) << "\n";
    out << "reviewers = " << r.reviewers_required << "\n";
    out << "aggregation = " << to_string(r.aggregation) << "\n";
    out << "nomination_threshold = " << r.nomination_threshold << "\n";
    out << "agreement = " << (r.agreement_policy ? "true" : "false") << "\n";
    if (r.agreement_policy) {
        out << "metric = " << to_string(r.agreement_policy->metric) << "\n";
        out << "threshold = " << r.agreement_policy->threshold << "\n";
        out << "scope = " << to_string(r.agreement_policy->scope) << "\n";
        out << "degenerate_pass = " << (r.agreement_policy->treat_degenerate_as_pass ? "true" : "false") << "\n";
    }
    return out.str();
}

} // namespace sreview
