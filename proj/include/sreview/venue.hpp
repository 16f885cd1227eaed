#pragma once

#include "sreview/decision.hpp"
#include "sreview/event_store.hpp"
#include "sreview/form.hpp"
#include "sreview/session.hpp"
#include "sreview/standards.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace sreview {

enum class SubmissionStatus { Submitted, Triaged, UnderReview, AwaitingThird, Decided, RevisionInvited, RevisionVerified };
std::string_view to_string(SubmissionStatus s);

struct SubmissionMeta {
    std::string submission_id; // generated when empty
    std::string title;
    bool adhoc_fallback = false; // allow declared methods that have no standard
};

struct Submission {
    std::string submission_id;
    std::string title;
    MethodDeclaration declared_methods;
    SubmissionStatus status = SubmissionStatus::Submitted;
    std::optional<std::string> form_id;
    bool adhoc_fallback = false;
    std::vector<std::string> unresolved_methods;
    std::vector<std::string> adhoc_items;

    bool operator==(const Submission&) const = default;
};

struct TriageCheck {
    std::string text;
    bool pass = false;

    bool operator==(const TriageCheck&) const = default;
};

struct TriageRecord {
    std::string submission_id;
    std::string triager_id;
    std::vector<TriageCheck> initial_checks;
    MethodDeclaration original_methods;
    std::optional<MethodDeclaration> corrected_methods;
    std::vector<std::string> adhoc_items;
    bool passed = false;

    bool operator==(const TriageRecord&) const = default;
};

struct ReviewAssignment {
    std::string submission_id;
    std::vector<std::string> reviewer_ids;
    std::map<std::string, std::string> sessions; // reviewer_id -> session_id

    bool operator==(const ReviewAssignment&) const = default;
};

struct DecisionResult {
    SubmissionStatus status = SubmissionStatus::UnderReview;
    std::optional<AgreementReport> agreement;
    std::vector<ConsensusItem> consensus;
    std::optional<Verdict> verdict;
    std::optional<DecisionLetter> letter;
};

struct RevisionOutcome {
    SubmissionStatus status = SubmissionStatus::RevisionInvited;
    RevisionCheck check;
};

nlohmann::ordered_json submission_to_json(const Submission& s);
nlohmann::ordered_json triage_to_json(const TriageRecord& t);
nlohmann::ordered_json assignment_to_json(const ReviewAssignment& a);
nlohmann::ordered_json decision_to_json(const DecisionResult& d);

/// Orchestrates the structured-review workflow for one venue over an
/// event-sourced store. Every state change is an appended event; opening a
/// service on an existing store replays the logs.
class VenueService {
public:
    using Clock = std::function<std::int64_t()>;
    using Version = std::optional<std::uint64_t>;

    VenueService(Registry registry, VenueRules rules, std::filesystem::path store_dir = {}, Clock clock = {});

    const Registry& registry() const { return registry_; }
    const VenueRules& rules() const { return rules_; }
    std::vector<std::string> initial_checks() const;

    Submission ingest_submission(const SubmissionMeta& meta, const MethodDeclaration& decl, Version expected = {});
    AuthorChecklist checklist(const std::string& submission_id) const;
    TriageRecord run_triage(const std::string& submission_id, const std::string& triager_id,
                            const std::vector<TriageCheck>& checks,
                            const std::optional<MethodDeclaration>& corrected = std::nullopt,
                            const std::vector<std::string>& adhoc_items = {}, Version expected = {});
    ReviewAssignment open_reviews(const std::string& submission_id, const std::vector<std::string>& reviewer_ids,
                                  Version expected = {});
    ReviewAssignment add_third_reviewer(const std::string& submission_id, const std::string& reviewer_id,
                                        Version expected = {});

    Session answer(const std::string& session_id, const std::string& item_key, const std::string& node_id,
                   const Answer& a, Version expected = {});
    Session mark(const std::string& session_id, const std::string& item_key, bool present, Version expected = {});
    Session comment(const std::string& session_id, const std::string& text, Version expected = {});
    Session complete_session(const std::string& session_id, Version expected = {});
    Session reopen_session(const std::string& session_id, Version expected = {});

    AgreementReport agreement(const std::string& submission_id) const;
    DecisionResult finalize_decision(const std::string& submission_id, Version expected = {});
    RevisionOutcome verify_revision_completion(const std::string& submission_id, const std::string& checker_id,
                                               const std::map<std::string, bool>& marks, Version expected = {});

    Submission submission(const std::string& submission_id) const;
    std::vector<std::string> submission_ids() const;
    Session session(const std::string& session_id) const;
    std::string session_log(const std::string& session_id) const;
    std::string submission_of_session(const std::string& session_id) const;
    ReviewForm form(const std::string& form_id) const;
    std::optional<TriageRecord> last_triage(const std::string& submission_id) const;
    std::optional<ReviewAssignment> assignment(const std::string& submission_id) const;
    DecisionResult decision(const std::string& submission_id) const;
    std::uint64_t version(const std::string& submission_id) const;

    /// Canonical JSON of everything known about a submission.
    nlohmann::ordered_json export_state(const std::string& submission_id) const;
    std::string export_hash(const std::string& submission_id) const;

private:
    struct Record {
        Submission submission;
        VenueRules rules;
        std::vector<TriageRecord> triage;
        std::optional<ReviewForm> form;
        std::optional<ReviewAssignment> assignment;
        std::map<std::string, Session> sessions;
        std::optional<AgreementReport> agreement;
        std::vector<ConsensusItem> consensus;
        std::optional<Verdict> verdict;
        std::optional<DecisionLetter> letter;
        std::optional<std::string> revision_checker;
        std::vector<RevisionCheck> revision_checks;
        std::uint64_t version = 0;
    };

    Registry registry_;
    VenueRules rules_;
    EventStore store_;
    Clock clock_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, Record> records_;
    std::map<std::string, std::string> session_index_; // session_id -> submission_id

    const Record& record(const std::string& submission_id) const;
    const std::string& owner_of(const std::string& session_id) const;

    // Validates and applies one event to a copy of `current`; shared by live
    // operations and replay, so both follow exactly the same transitions.
    static Record apply(const Record* current, const nlohmann::json& event);
    Record commit(const std::string& submission_id, Version expected, const std::string& type, nlohmann::ordered_json data);
    Session session_event(const std::string& session_id, const SessionEvent& e, Version expected);
    std::vector<Session> original_sessions(const Record& r) const;

    static nlohmann::ordered_json export_record(const Record& r);
    void replay_all();
};

} // namespace sreview
