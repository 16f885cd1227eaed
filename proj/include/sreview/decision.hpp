#pragma once

#include "sreview/agreement.hpp"
#include "sreview/session.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sreview {

enum class Aggregation { WorstCase, Majority };
enum class Outcome { Accept, InviteRevision, Reject };
enum class LetterKind { ReviewSummary, RevisionTodoList, RejectionReasons };

std::string_view to_string(Aggregation a);
std::string_view to_string(Outcome o);
std::string_view to_string(LetterKind k);
Aggregation parse_aggregation(std::string_view s);
Outcome parse_outcome(std::string_view s);

struct VenueRules {
    VenueKind venue_kind = VenueKind::Journal;
    int reviewers_required = 2;
    std::optional<ThresholdPolicy> agreement_policy = ThresholdPolicy{};
    int nomination_threshold = 3;
    Aggregation aggregation = Aggregation::WorstCase;

    void check() const; // throws InvalidConfig
    bool operator==(const VenueRules&) const = default;
};

struct ConsensusItem {
    std::string item_key;
    Status status = Status::Met;
    std::map<std::string, ItemStatus> per_reviewer;
    bool disputed = false;

    bool operator==(const ConsensusItem&) const = default;
};

struct BasisEntry {
    std::string item_key;
    Status status = Status::Met;

    bool operator==(const BasisEntry&) const = default;
};

struct Verdict {
    Outcome outcome = Outcome::Accept;
    bool nominated = false;
    std::vector<BasisEntry> basis;

    bool operator==(const Verdict&) const = default;
};

struct LetterEntry {
    std::string item_key;
    std::string text;
    Status status = Status::Met;
    std::optional<std::string> note;

    bool operator==(const LetterEntry&) const = default;
};

struct ReviewerComment {
    std::string reviewer_id;
    std::string text;

    bool operator==(const ReviewerComment&) const = default;
};

struct DecisionLetter {
    LetterKind kind = LetterKind::ReviewSummary;
    std::string preamble;
    std::vector<LetterEntry> entries;
    // Free-form comments, reproduced verbatim and kept apart from the entries.
    std::vector<ReviewerComment> comments;

    bool operator==(const DecisionLetter&) const = default;
};

struct RevisionCheck {
    bool accepted = false;
    std::vector<std::string> open_items;

    bool operator==(const RevisionCheck&) const = default;
};

/// Combines one status per reviewer. WorstCase takes the maximum under
/// Met < JustifiedDeviation < FixableMinor < FixableRevision < Fatal; Majority
/// takes the modal status, breaking ties toward the worse status.
Status combine_statuses(const std::vector<Status>& statuses, Aggregation aggregation);

std::vector<ConsensusItem> aggregate(const std::vector<Session>& sessions, const VenueRules& rules);

Verdict decide_journal(const std::vector<ConsensusItem>& consensus, const std::vector<Session>& sessions,
                       const VenueRules& rules);
Verdict decide_conference(const std::vector<ConsensusItem>& consensus, const std::vector<Session>& sessions,
                          const VenueRules& rules);
Verdict decide(const std::vector<ConsensusItem>& consensus, const std::vector<Session>& sessions,
               const VenueRules& rules);

/// Number of Desirable/Extraordinary items every reviewer marked present.
int unanimous_present_count(const std::vector<Session>& sessions);

DecisionLetter generate_letter(const Verdict& verdict, const std::vector<ConsensusItem>& consensus,
                               const std::vector<Session>& sessions);

RevisionCheck verify_revision(const DecisionLetter& todo, const std::map<std::string, bool>& checker_marks);

nlohmann::ordered_json consensus_to_json(const std::vector<ConsensusItem>& consensus);
nlohmann::ordered_json verdict_to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j);
nlohmann::ordered_json letter_to_json(const DecisionLetter& l);
DecisionLetter letter_from_json(const nlohmann::json& j);
std::string letter_to_text(const Verdict& v, const DecisionLetter& l);
nlohmann::ordered_json rules_to_json(const VenueRules& r);
VenueRules rules_from_json(const nlohmann::json& j);

/// Venue rules file: `key = value` lines (kind, reviewers, metric, threshold,
/// scope, degenerate_pass, nomination_threshold, aggregation, agreement).
VenueRules parse_venue_rules(std::string_view text);
std::string format_venue_rules(const VenueRules& r);

} // namespace sreview
