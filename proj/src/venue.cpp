#include "sreview/venue.hpp"

#include "sreview/error.hpp"
#include "sreview/text.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <mutex>
#include <set>

namespace sreview {

std::string_view to_string(SubmissionStatus s)
{
    switch (s) {
    case SubmissionStatus::Submitted: return "submitted";
    case SubmissionStatus::Triaged: return "triaged";
    case SubmissionStatus::UnderReview: return "under-review";
    case SubmissionStatus::AwaitingThird: return "awaiting-third";
    case SubmissionStatus::Decided: return "decided";
    case SubmissionStatus::RevisionInvited: return "revision-invited";
    case SubmissionStatus::RevisionVerified: return "revision-verified";
    }
    return "submitted";
}

namespace {

using ojson = nlohmann::ordered_json;

std::vector<std::string> strings(const nlohmann::json& j)
{
    return j.get<std::vector<std::string>>();
}

ojson checks_to_json(const std::vector<TriageCheck>& checks)
{
    auto arr = ojson::array();
    for (const auto& c : checks) arr.push_back({{"text", c.text}, {"pass", c.pass}});
    return arr;
}

std::vector<TriageCheck> checks_from_json(const nlohmann::json& j)
{
    std::vector<TriageCheck> out;
    for (const auto& c : j) out.push_back({c.at("text").get<std::string>(), c.at("pass").get<bool>()});
    return out;
}

bool valid_submission_id(const std::string& id)
{
    if (id.empty() || id.size() > 64) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    });
}

std::vector<Session> sessions_in_order(const ReviewAssignment& a, const std::map<std::string, Session>& sessions,
                                       std::size_t limit)
{
    std::vector<Session> out;
    for (const auto& reviewer : a.reviewer_ids) {
        if (out.size() == limit) break;
        out.push_back(sessions.at(a.sessions.at(reviewer)));
    }
    return out;
}

bool all_complete(const std::vector<Session>& sessions)
{
    return std::all_of(sessions.begin(), sessions.end(), [](const Session& s) { return s.state == SessionState::Complete; });
}

std::optional<AgreementReport> agreement_for(const VenueRules& rules, const std::vector<Session>& original)
{
    if (!rules.agreement_policy || original.size() < 2) return std::nullopt;
    const auto& p = *rules.agreement_policy;
    return evaluate_threshold(ratings_from_sessions(original, p.scope), p);
}

struct Decision {
    std::vector<ConsensusItem> consensus;
    Verdict verdict;
    DecisionLetter letter;
};

Decision decide_all(const VenueRules& rules, const std::vector<Session>& sessions)
{
    Decision d;
    d.consensus = aggregate(sessions, rules);
    d.verdict = decide(d.consensus, sessions, rules);
    d.letter = generate_letter(d.verdict, d.consensus, sessions);
    return d;
}

bool is_review_phase(SubmissionStatus s)
{
    return s == SubmissionStatus::UnderReview || s == SubmissionStatus::AwaitingThird;
}

} // namespace

nlohmann::ordered_json submission_to_json(const Submission& s)
{
    ojson j;
    j["submission_id"] = s.submission_id;
    j["title"] = s.title;
    j["declared_methods"] = declaration_to_json(s.declared_methods);
    j["status"] = to_string(s.status);
    j["form_id"] = s.form_id ? ojson(*s.form_id) : ojson(nullptr);
    j["adhoc_fallback"] = s.adhoc_fallback;
    j["unresolved_methods"] = s.unresolved_methods;
    j["adhoc_items"] = s.adhoc_items;
    return j;
}

nlohmann::ordered_json triage_to_json(const TriageRecord& t)
{
    ojson j;
    j["submission_id"] = t.submission_id;
    j["triager_id"] = t.triager_id;
    j["initial_checks"] = checks_to_json(t.initial_checks);
    j["original_methods"] = declaration_to_json(t.original_methods);
    j["corrected_methods"] = t.corrected_methods ? declaration_to_json(*t.corrected_methods) : ojson(nullptr);
    j["adhoc_items"] = t.adhoc_items;
    j["passed"] = t.passed;
    return j;
}

nlohmann::ordered_json assignment_to_json(const ReviewAssignment& a)
{
    ojson j;
    j["submission_id"] = a.submission_id;
    j["reviewer_ids"] = a.reviewer_ids;
    ojson sessions = ojson::object();
    for (const auto& reviewer : a.reviewer_ids) sessions[reviewer] = a.sessions.at(reviewer);
    j["sessions"] = std::move(sessions);
    return j;
}

nlohmann::ordered_json decision_to_json(const DecisionResult& d)
{
    ojson j;
    j["status"] = to_string(d.status);
    j["agreement"] = d.agreement ? report_to_json(*d.agreement) : ojson(nullptr);
    j["consensus"] = consensus_to_json(d.consensus);
    j["verdict"] = d.verdict ? verdict_to_json(*d.verdict) : ojson(nullptr);
    j["letter"] = d.letter ? letter_to_json(*d.letter) : ojson(nullptr);
    return j;
}

VenueService::VenueService(Registry registry, VenueRules rules, std::filesystem::path store_dir, Clock clock)
    : registry_(std::move(registry)), rules_(std::move(rules)), store_(std::move(store_dir)), clock_(std::move(clock))
{
    rules_.check();
    if (!clock_) {
        clock_ = [] {
            using namespace std::chrono;
            return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
        };
    }
    replay_all();
}

std::vector<std::string> VenueService::initial_checks() const
{
    if (const auto* g = registry_.find(registry_.general_id)) return g->initial_checks;
    return {};
}

const VenueService::Record& VenueService::record(const std::string& submission_id) const
{
    auto it = records_.find(submission_id);
    if (it == records_.end()) throw Error(ErrorCode::UnknownSubmission, "no submission '" + submission_id + "'");
    return it->second;
}

const std::string& VenueService::owner_of(const std::string& session_id) const
{
    auto it = session_index_.find(session_id);
    if (it == session_index_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + session_id + "'");
    return it->second;
}

std::vector<Session> VenueService::original_sessions(const Record& r) const
{
    if (!r.assignment) return {};
    return sessions_in_order(*r.assignment, r.sessions, static_cast<std::size_t>(r.rules.reviewers_required));
}

// --- event application -------------------------------------------------------

static bool same(const ojson& computed, const nlohmann::json& recorded)
{
    return nlohmann::json(computed) == recorded;
}

VenueService::Record VenueService::apply(const Record* current, const nlohmann::json& event)
{
    const auto type = event.at("type").get<std::string>();
    const auto& data = event.at("data");

    if (type == "submitted") {
        if (current) throw Error(ErrorCode::DuplicateSubmission, "submission already exists");
        Record r;
        r.submission.submission_id = data.at("submission_id").get<std::string>();
        r.submission.title = data.at("title").get<std::string>();
        r.submission.declared_methods = declaration_from_json(data.at("declaration"));
        r.submission.adhoc_fallback = data.at("adhoc_fallback").get<bool>();
        r.submission.unresolved_methods = strings(data.at("unresolved_methods"));
        r.submission.status = SubmissionStatus::Submitted;
        r.rules = rules_from_json(data.at("rules"));
        r.version = 1;
        return r;
    }
    if (!current) throw Error(ErrorCode::UnknownSubmission, "event '" + type + "' before submission");
    Record r = *current;
    r.version = current->version + 1;
    auto& sub = r.submission;

    if (type == "triage") {
        if (sub.status != SubmissionStatus::Submitted)
            throw Error(ErrorCode::NotSubmitted, sub.submission_id + " is " + std::string(to_string(sub.status)));
        TriageRecord t;
        t.submission_id = sub.submission_id;
        t.triager_id = data.at("triager_id").get<std::string>();
        t.initial_checks = checks_from_json(data.at("checks"));
        t.original_methods = sub.declared_methods;
        if (!data.at("corrected").is_null()) t.corrected_methods = declaration_from_json(data["corrected"]);
        t.adhoc_items = strings(data.at("adhoc_items"));
        t.passed = data.at("passed").get<bool>();
        if (t.passed) {
            r.form = form_from_json(data.at("form"));
            sub.form_id = r.form->form_id;
            sub.adhoc_items = t.adhoc_items;
            if (t.corrected_methods) sub.declared_methods = *t.corrected_methods;
            sub.unresolved_methods = strings(data.at("unresolved_methods"));
            sub.status = SubmissionStatus::Triaged;
        }
        r.triage.push_back(std::move(t));
        return r;
    }

    if (type == "reviewers") {
        const bool third = data.at("third").get<bool>();
        const auto reviewers = strings(data.at("reviewer_ids"));
        const auto session_ids = strings(data.at("session_ids"));
        if (reviewers.size() != session_ids.size()) throw Error(ErrorCode::InvalidRequest, "reviewer/session count mismatch");
        if (!third) {
            if (sub.status != SubmissionStatus::Triaged)
                throw Error(ErrorCode::WrongState, "reviews can only open on a triaged submission");
            if (reviewers.size() != static_cast<std::size_t>(r.rules.reviewers_required))
                throw Error(ErrorCode::InvalidRequest, "venue requires exactly " + std::to_string(r.rules.reviewers_required) + " reviewers");
            r.assignment = ReviewAssignment{sub.submission_id, {}, {}};
        } else {
            if (sub.status != SubmissionStatus::AwaitingThird || !r.assignment ||
                r.assignment->reviewer_ids.size() != static_cast<std::size_t>(r.rules.reviewers_required) || reviewers.size() != 1)
                throw Error(ErrorCode::WrongState, "a third reviewer is only recruited after an agreement shortfall");
        }
        auto plan = std::make_shared<const SessionPlan>(plan_from_json(data.at("plan")));
        if (!r.form || plan->form_id != r.form->form_id) throw Error(ErrorCode::FormMismatch, "session plan does not match the form");
        for (std::size_t i = 0; i < reviewers.size(); ++i) {
            if (reviewers[i].empty()) throw Error(ErrorCode::InvalidRequest, "empty reviewer id");
            if (r.assignment->sessions.count(reviewers[i]))
                throw Error(ErrorCode::DuplicateReviewer, "reviewer " + reviewers[i] + " is already assigned");
            r.assignment->reviewer_ids.push_back(reviewers[i]);
            r.assignment->sessions[reviewers[i]] = session_ids[i];
            r.sessions.emplace(session_ids[i], start_session(plan, reviewers[i], session_ids[i]));
        }
        if (!third) sub.status = SubmissionStatus::UnderReview;
        return r;
    }

    if (type == "session") {
        const auto session_id = data.at("session_id").get<std::string>();
        auto it = r.sessions.find(session_id);
        if (it == r.sessions.end()) throw Error(ErrorCode::UnknownSession, "no session '" + session_id + "'");
        if (!is_review_phase(sub.status))
            throw Error(ErrorCode::WrongState, "sessions are frozen once a decision is made");
        it->second = apply_event(it->second, event_from_json(data.at("event")));
        return r;
    }

    if (type == "awaiting_third") {
        if (sub.status != SubmissionStatus::UnderReview) throw Error(ErrorCode::WrongState, "not under review");
        auto original = sessions_in_order(*r.assignment, r.sessions, static_cast<std::size_t>(r.rules.reviewers_required));
        if (!all_complete(original)) throw Error(ErrorCode::SessionsIncomplete, "reviews are not complete");
        auto report = agreement_for(r.rules, original);
        if (!report || report->recommendation != Recommendation::RecruitThirdReviewer)
            throw Error(ErrorCode::ReplayDivergence, "agreement does not call for a third reviewer");
        if (!same(report_to_json(*report), data.at("agreement")))
            throw Error(ErrorCode::ReplayDivergence, "recorded agreement differs from recomputed agreement");
        r.agreement = report;
        sub.status = SubmissionStatus::AwaitingThird;
        return r;
    }

    if (type == "decided") {
        if (!is_review_phase(sub.status)) throw Error(ErrorCode::WrongState, "not under review");
        auto all = sessions_in_order(*r.assignment, r.sessions, r.assignment->reviewer_ids.size());
        if (!all_complete(all)) throw Error(ErrorCode::SessionsIncomplete, "reviews are not complete");
        if (sub.status == SubmissionStatus::UnderReview) {
            auto report = agreement_for(r.rules, all);
            if (report && report->recommendation == Recommendation::RecruitThirdReviewer)
                throw Error(ErrorCode::ReplayDivergence, "agreement shortfall must escalate before a decision");
            r.agreement = report;
        }
        auto d = decide_all(r.rules, all);
        if (!same(verdict_to_json(d.verdict), data.at("verdict")) || !same(letter_to_json(d.letter), data.at("letter")))
            throw Error(ErrorCode::ReplayDivergence, "recorded verdict differs from recomputed verdict");
        r.consensus = std::move(d.consensus);
        r.verdict = std::move(d.verdict);
        r.letter = std::move(d.letter);
        sub.status = r.verdict->outcome == Outcome::InviteRevision ? SubmissionStatus::RevisionInvited
                                                                  : SubmissionStatus::Decided;
        return r;
    }

    if (type == "revision_check") {
        if (sub.status != SubmissionStatus::RevisionInvited)
            throw Error(ErrorCode::WrongState, "no revision is awaiting a check");
        const auto checker = data.at("checker_id").get<std::string>();
        if (checker.empty()) throw Error(ErrorCode::InvalidRequest, "checker id is required");
        if (r.revision_checker && *r.revision_checker != checker)
            throw Error(ErrorCode::CheckerMismatch, "this revision is checked by " + *r.revision_checker);
        const auto marks = data.at("marks").get<std::map<std::string, bool>>();
        auto check = verify_revision(*r.letter, marks);
        if (check.accepted != data.at("accepted").get<bool>() || check.open_items != strings(data.at("open_items")))
            throw Error(ErrorCode::ReplayDivergence, "recorded revision check differs from recomputed check");
        r.revision_checker = checker;
        r.revision_checks.push_back(check);
        if (check.accepted) sub.status = SubmissionStatus::RevisionVerified;
        return r;
    }

    throw Error(ErrorCode::ReplayDivergence, "unknown event type '" + type + "'");
}

VenueService::Record VenueService::commit(const std::string& submission_id, Version expected, const std::string& type,
                                          nlohmann::ordered_json data)
{
    const auto version = store_.version(submission_id);
    if (expected && *expected != version)
        throw Error(ErrorCode::VersionConflict, "submission " + submission_id + " is at version " + std::to_string(version) +
                                                    ", expected " + std::to_string(*expected) + "; reload and retry");
    ojson event;
    event["seq"] = version + 1;
    event["ts"] = clock_();
    event["type"] = type;
    event["data"] = std::move(data);

    auto it = records_.find(submission_id);
    Record next = apply(it == records_.end() ? nullptr : &it->second, nlohmann::json::parse(event.dump()));
    store_.append(submission_id, version, event);
    for (const auto& [sid, _] : next.sessions) session_index_[sid] = submission_id;
    auto& stored = records_[submission_id] = std::move(next);
    store_.write_snapshot(submission_id, export_record(stored));
    return stored;
}

void VenueService::replay_all()
{
    for (const auto& [id, events] : store_.load_all()) {
        std::optional<Record> current;
        for (const auto& e : events) {
            try {
                current = apply(current ? &*current : nullptr, e);
            } catch (const Error& err) {
                throw Error(ErrorCode::ReplayDivergence, "replaying " + id + " event " +
                                                             std::to_string(e.value("seq", 0)) + ": " + err.what());
            }
        }
        if (!current) continue;
        for (const auto& [sid, _] : current->sessions) session_index_[sid] = id;
        records_[id] = std::move(*current);
    }
}

// --- operations --------------------------------------------------------------

Submission VenueService::ingest_submission(const SubmissionMeta& meta, const MethodDeclaration& decl, Version expected)
{
    std::unique_lock lock(mutex_);
    std::string id = meta.submission_id;
    if (id.empty()) {
        for (std::size_t n = records_.size() + 1;; ++n) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "sub-%04zu", n);
            if (!records_.count(buf)) {
                id = buf;
                break;
            }
        }
    }
    if (!valid_submission_id(id))
        throw Error(ErrorCode::InvalidRequest, "submission id must use [a-z0-9_-] and at most 64 characters");
    if (records_.count(id)) throw Error(ErrorCode::DuplicateSubmission, "submission '" + id + "' already exists");

    std::vector<std::string> unresolved;
    std::set<std::string> seen;
    for (const auto& m : decl.method_ids) {
        if (!seen.insert(m).second) throw Error(ErrorCode::InvalidDeclaration, "'" + m + "' is declared twice");
        if (!registry_.find(m)) {
            if (!meta.adhoc_fallback) throw Error(ErrorCode::UnknownStandardId, "no standard with id '" + m + "'");
            unresolved.push_back(m);
        }
    }
    MethodDeclaration known = decl;
    std::erase_if(known.method_ids, [&](const std::string& m) { return !registry_.find(m); });
    check_declaration(known, registry_);

    ojson data;
    data["submission_id"] = id;
    data["title"] = meta.title;
    data["declaration"] = declaration_to_json(decl);
    data["adhoc_fallback"] = meta.adhoc_fallback;
    data["unresolved_methods"] = unresolved;
    data["rules"] = rules_to_json(rules_);
    return commit(id, expected, "submitted", std::move(data)).submission;
}

AuthorChecklist VenueService::checklist(const std::string& submission_id) const
{
    std::shared_lock lock(mutex_);
    const auto& r = record(submission_id);
    if (r.form) return author_checklist(*r.form);
    MethodDeclaration known = r.submission.declared_methods;
    std::erase_if(known.method_ids, [&](const std::string& m) { return !registry_.find(m); });
    return author_checklist(compose_form(known, registry_));
}

TriageRecord VenueService::run_triage(const std::string& submission_id, const std::string& triager_id,
                                      const std::vector<TriageCheck>& checks,
                                      const std::optional<MethodDeclaration>& corrected,
                                      const std::vector<std::string>& adhoc_items, Version expected)
{
    std::unique_lock lock(mutex_);
    const auto& r = record(submission_id);
    if (r.submission.status != SubmissionStatus::Submitted)
        throw Error(ErrorCode::NotSubmitted, submission_id + " is " + std::string(to_string(r.submission.status)));
    if (trim(triager_id).empty()) throw Error(ErrorCode::InvalidRequest, "triager id is required");

    std::vector<std::string> failed;
    for (const auto& required : initial_checks()) {
        auto it = std::find_if(checks.begin(), checks.end(), [&](const auto& c) { return c.text == required; });
        if (it == checks.end() || !it->pass) failed.push_back(required);
    }
    for (const auto& c : checks)
        if (!c.pass && std::find(failed.begin(), failed.end(), c.text) == failed.end()) failed.push_back(c.text);

    ojson data;
    data["triager_id"] = triager_id;
    data["checks"] = checks_to_json(checks);
    data["corrected"] = corrected ? declaration_to_json(*corrected) : ojson(nullptr);
    data["adhoc_items"] = adhoc_items;
    data["passed"] = failed.empty();

    if (!failed.empty()) {
        commit(submission_id, expected, "triage", std::move(data));
        std::string list;
        for (const auto& f : failed) list += (list.empty() ? "" : "; ") + f;
        throw Error(ErrorCode::ChecksFailed, "returned to authors; failed checks: " + list);
    }

    const MethodDeclaration decl = corrected ? *corrected : r.submission.declared_methods;
    std::vector<std::string> unresolved;
    MethodDeclaration known = decl;
    for (const auto& m : decl.method_ids)
        if (!registry_.find(m)) unresolved.push_back(m);
    if (!unresolved.empty() && !r.submission.adhoc_fallback)
        throw Error(ErrorCode::UnknownStandardId, "no standard with id '" + unresolved.front() + "'");
    if (!unresolved.empty() && adhoc_items.empty())
        throw Error(ErrorCode::AdhocItemsRequired, "no standard exists for '" + unresolved.front() +
                                                       "'; attach ad-hoc essential items");
    std::erase_if(known.method_ids, [&](const std::string& m) { return !registry_.find(m); });
    auto form = compose_form(known, registry_, adhoc_items);
    data["unresolved_methods"] = unresolved;
    data["form"] = form_to_json(form);
    return commit(submission_id, expected, "triage", std::move(data)).triage.back();
}

ReviewAssignment VenueService::open_reviews(const std::string& submission_id, const std::vector<std::string>& reviewer_ids,
                                            Version expected)
{
    std::unique_lock lock(mutex_);
    const auto& r = record(submission_id);
    if (r.submission.status != SubmissionStatus::Triaged)
        throw Error(ErrorCode::WrongState, submission_id + " is " + std::string(to_string(r.submission.status)) +
                                               "; reviews open after triage");
    std::set<std::string> unique(reviewer_ids.begin(), reviewer_ids.end());
    if (unique.size() != reviewer_ids.size()) throw Error(ErrorCode::DuplicateReviewer, "a reviewer is listed twice");
    if (reviewer_ids.size() != static_cast<std::size_t>(r.rules.reviewers_required))
        throw Error(ErrorCode::InvalidRequest, "venue requires exactly " + std::to_string(r.rules.reviewers_required) + " reviewers");

    std::vector<std::string> session_ids;
    for (std::size_t i = 0; i < reviewer_ids.size(); ++i)
        session_ids.push_back(submission_id + "-s" + std::to_string(i + 1));
    ojson data;
    data["third"] = false;
    data["reviewer_ids"] = reviewer_ids;
    data["session_ids"] = session_ids;
    data["plan"] = plan_to_json(make_plan(*r.form, r.rules.venue_kind, registry_.trees));
    return *commit(submission_id, expected, "reviewers", std::move(data)).assignment;
}

ReviewAssignment VenueService::add_third_reviewer(const std::string& submission_id, const std::string& reviewer_id,
                                                  Version expected)
{
    std::unique_lock lock(mutex_);
    const auto& r = record(submission_id);
    if (r.submission.status != SubmissionStatus::AwaitingThird)
        throw Error(ErrorCode::WrongState, "a third reviewer is only recruited after an agreement shortfall");
    if (r.assignment->sessions.count(reviewer_id))
        throw Error(ErrorCode::DuplicateReviewer, "reviewer " + reviewer_id + " is already assigned");
    ojson data;
    data["third"] = true;
    data["reviewer_ids"] = {reviewer_id};
    data["session_ids"] = {submission_id + "-s" + std::to_string(r.assignment->reviewer_ids.size() + 1)};
    data["plan"] = plan_to_json(*r.sessions.begin()->second.plan);
    return *commit(submission_id, expected, "reviewers", std::move(data)).assignment;
}

Session VenueService::session_event(const std::string& session_id, const SessionEvent& e, Version expected)
{
    std::unique_lock lock(mutex_);
    const auto submission_id = owner_of(session_id);
    const auto& r = record(submission_id);
    if (!is_review_phase(r.submission.status))
        throw Error(ErrorCode::WrongState, "sessions are frozen once a decision is made");
    SessionEvent stamped = e;
    stamped.timestamp_ms = clock_();
    apply_event(r.sessions.at(session_id), stamped); // validate before writing anything
    ojson data;
    data["session_id"] = session_id;
    data["event"] = event_to_json(stamped);
    return commit(submission_id, expected, "session", std::move(data)).sessions.at(session_id);
}

Session VenueService::answer(const std::string& session_id, const std::string& item_key, const std::string& node_id,
                             const Answer& a, Version expected)
{
    SessionEvent e;
    e.type = EventType::Answer;
    e.item_key = item_key;
    e.node_id = node_id;
    e.answer = a;
    return session_event(session_id, e, expected);
}

Session VenueService::mark(const std::string& session_id, const std::string& item_key, bool present, Version expected)
{
    SessionEvent e;
    e.type = EventType::Mark;
    e.item_key = item_key;
    e.present = present;
    return session_event(session_id, e, expected);
}

Session VenueService::comment(const std::string& session_id, const std::string& text, Version expected)
{
    SessionEvent e;
    e.type = EventType::Comment;
    e.text = text;
    return session_event(session_id, e, expected);
}

Session VenueService::complete_session(const std::string& session_id, Version expected)
{
    SessionEvent e;
    e.type = EventType::Complete;
    return session_event(session_id, e, expected);
}

Session VenueService::reopen_session(const std::string& session_id, Version expected)
{
    SessionEvent e;
    e.type = EventType::Reopen;
    return session_event(session_id, e, expected);
}

AgreementReport VenueService::agreement(const std::string& submission_id) const
{
    std::shared_lock lock(mutex_);
    const auto& r = record(submission_id);
    if (!r.assignment) throw Error(ErrorCode::WrongState, "no reviews have been opened");
    auto original = original_sessions(r);
    const auto policy = r.rules.agreement_policy.value_or(ThresholdPolicy{});
    return evaluate_threshold(ratings_from_sessions(original, policy.scope), policy);
}

DecisionResult VenueService::finalize_decision(const std::string& submission_id, Version expected)
{
    std::unique_lock lock(mutex_);
    const auto& r = record(submission_id);
    const auto status = r.submission.status;
    if (!is_review_phase(status))
        throw Error(ErrorCode::WrongState, submission_id + " is " + std::string(to_string(status)));

    auto original = original_sessions(r);
    if (!all_complete(original)) throw Error(ErrorCode::SessionsIncomplete, "required reviews are not complete");

    if (status == SubmissionStatus::UnderReview) {
        auto report = agreement_for(r.rules, original);
        if (report && report->recommendation == Recommendation::RecruitThirdReviewer) {
            ojson data;
            data["agreement"] = report_to_json(*report);
            const auto& next = commit(submission_id, expected, "awaiting_third", std::move(data));
            DecisionResult result;
            result.status = next.submission.status;
            result.agreement = next.agreement;
            return result;
        }
    } else if (r.assignment->reviewer_ids.size() <= static_cast<std::size_t>(r.rules.reviewers_required)) {
        throw Error(ErrorCode::AwaitingThirdReviewer, "agreement is below threshold; recruit a third reviewer first");
    }

    auto all = sessions_in_order(*r.assignment, r.sessions, r.assignment->reviewer_ids.size());
    if (!all_complete(all)) throw Error(ErrorCode::SessionsIncomplete, "the third review is not complete");
    auto d = decide_all(r.rules, all);
    ojson data;
    data["verdict"] = verdict_to_json(d.verdict);
    data["letter"] = letter_to_json(d.letter);
    const auto& next = commit(submission_id, expected, "decided", std::move(data));
    DecisionResult result;
    result.status = next.submission.status;
    result.agreement = next.agreement;
    result.consensus = next.consensus;
    result.verdict = next.verdict;
    result.letter = next.letter;
    return result;
}

RevisionOutcome VenueService::verify_revision_completion(const std::string& submission_id, const std::string& checker_id,
                                                         const std::map<std::string, bool>& marks, Version expected)
{
    std::unique_lock lock(mutex_);
    const auto& r = record(submission_id);
    if (r.submission.status != SubmissionStatus::RevisionInvited)
        throw Error(ErrorCode::WrongState, submission_id + " is " + std::string(to_string(r.submission.status)));
    if (trim(checker_id).empty()) throw Error(ErrorCode::InvalidRequest, "checker id is required");
    if (r.revision_checker && *r.revision_checker != checker_id)
        throw Error(ErrorCode::CheckerMismatch, "this revision is checked by " + *r.revision_checker);
    auto check = verify_revision(*r.letter, marks);
    ojson data;
    data["checker_id"] = checker_id;
    ojson jm = ojson::object();
    for (const auto& [k, v] : marks) jm[k] = v;
    data["marks"] = std::move(jm);
    data["accepted"] = check.accepted;
    data["open_items"] = check.open_items;
    const auto& next = commit(submission_id, expected, "revision_check", std::move(data));
    return {next.submission.status, next.revision_checks.back()};
}

// --- queries -------------------------------------------------------------------

Submission VenueService::submission(const std::string& submission_id) const
{
    std::shared_lock lock(mutex_);
    return record(submission_id).submission;
}

std::vector<std::string> VenueService::submission_ids() const
{
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : records_) out.push_back(id);
    return out;
}

Session VenueService::session(const std::string& session_id) const
{
    std::shared_lock lock(mutex_);
    return record(owner_of(session_id)).sessions.at(session_id);
}

std::string VenueService::session_log(const std::string& session_id) const
{
    return export_session_log(session(session_id));
}

std::string VenueService::submission_of_session(const std::string& session_id) const
{
    std::shared_lock lock(mutex_);
    return owner_of(session_id);
}

ReviewForm VenueService::form(const std::string& form_id) const
{
    std::shared_lock lock(mutex_);
    for (const auto& [_, r] : records_)
        if (r.form && r.form->form_id == form_id) return *r.form;
    throw Error(ErrorCode::UnknownForm, "no form '" + form_id + "'");
}

std::optional<TriageRecord> VenueService::last_triage(const std::string& submission_id) const
{
    std::shared_lock lock(mutex_);
    const auto& r = record(submission_id);
    if (r.triage.empty()) return std::nullopt;
    return r.triage.back();
}

std::optional<ReviewAssignment> VenueService::assignment(const std::string& submission_id) const
{
    std::shared_lock lock(mutex_);
    return record(submission_id).assignment;
}

DecisionResult VenueService::decision(const std::string& submission_id) const
{
    std::shared_lock lock(mutex_);
    const auto& r = record(submission_id);
    DecisionResult d;
    d.status = r.submission.status;
    d.agreement = r.agreement;
    d.consensus = r.consensus;
    d.verdict = r.verdict;
    d.letter = r.letter;
    return d;
}

std::uint64_t VenueService::version(const std::string& submission_id) const
{
    std::shared_lock lock(mutex_);
    return record(submission_id).version;
}

nlohmann::ordered_json VenueService::export_record(const Record& r)
{
    ojson j;
    j["version"] = r.version;
    j["submission"] = submission_to_json(r.submission);
    j["rules"] = rules_to_json(r.rules);
    j["triage"] = ojson::array();
    for (const auto& t : r.triage) j["triage"].push_back(triage_to_json(t));
    j["form"] = r.form ? form_to_json(*r.form) : ojson(nullptr);
    j["assignment"] = r.assignment ? assignment_to_json(*r.assignment) : ojson(nullptr);
    j["sessions"] = ojson::array();
    if (r.assignment) {
        for (const auto& reviewer : r.assignment->reviewer_ids) {
            const auto& s = r.sessions.at(r.assignment->sessions.at(reviewer));
            auto js = session_to_json(s);
            js["log"] = export_session_log(s);
            j["sessions"].push_back(std::move(js));
        }
    }
    j["agreement"] = r.agreement ? report_to_json(*r.agreement) : ojson(nullptr);
    j["consensus"] = consensus_to_json(r.consensus);
    j["verdict"] = r.verdict ? verdict_to_json(*r.verdict) : ojson(nullptr);
    j["letter"] = r.letter ? letter_to_json(*r.letter) : ojson(nullptr);
    j["revision_checker"] = r.revision_checker ? ojson(*r.revision_checker) : ojson(nullptr);
    j["revision_checks"] = ojson::array();
    for (const auto& c : r.revision_checks)
        j["revision_checks"].push_back({{"accepted", c.accepted}, {"open_items", c.open_items}});
    return j;
}

nlohmann::ordered_json VenueService::export_state(const std::string& submission_id) const
{
    std::shared_lock lock(mutex_);
    return export_record(record(submission_id));
}

std::string VenueService::export_hash(const std::string& submission_id) const
{
    return hex64(fnv1a64(export_state(submission_id).dump()));
}

} // namespace sreview
