#pragma once

#include "sreview/session.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sreview {

/// Nominal ratings: values[r][u] indexes into `domain`, or is empty when rater
/// r gave no rating for unit u.
struct RatingsMatrix {
    std::vector<std::string> raters;
    std::vector<std::string> units;
    std::vector<std::string> domain;
    std::vector<std::vector<std::optional<std::size_t>>> values;

    bool has_missing() const;

    /// Builds a matrix from string labels; the domain is the sorted set of labels used
    /// unless `domain` is given.
    static RatingsMatrix from_labels(std::vector<std::string> raters, std::vector<std::string> units,
                                     const std::vector<std::vector<std::optional<std::string>>>& labels,
                                     std::vector<std::string> domain = {});
};

enum class Metric { PercentAgreement, CohenKappa, KrippendorffAlpha };
enum class AgreementScope { EssentialRootAnswers, EssentialStatuses };
enum class Recommendation { Sufficient, RecruitThirdReviewer };

std::string_view to_string(Metric m);
std::string_view to_string(AgreementScope s);
std::string_view to_string(Recommendation r);
Metric parse_metric(std::string_view s);
AgreementScope parse_scope(std::string_view s);

struct ThresholdPolicy {
    Metric metric = Metric::CohenKappa;
    double threshold = 0.6;
    AgreementScope scope = AgreementScope::EssentialRootAnswers;
    bool treat_degenerate_as_pass = true;

    bool operator==(const ThresholdPolicy&) const = default;
};

/// A statistic that may be undefined (zero expected disagreement).
struct Statistic {
    std::optional<double> value;
    bool degenerate = false;
};

struct AgreementReport {
    double percent = 0.0;
    std::optional<double> kappa;
    std::optional<double> alpha;
    bool degenerate = false;
    Recommendation recommendation = Recommendation::Sufficient;
    Metric metric = Metric::CohenKappa;
    double threshold = 0.0;
};

/// Two raters, no missing values.
double percent_agreement(const RatingsMatrix& m);

/// Share of agreeing rater pairs among all within-unit pairs; works with any
/// number of raters and missing values.
double pairwise_agreement(const RatingsMatrix& m);

Statistic cohen_kappa(const RatingsMatrix& m);
Statistic krippendorff_alpha(const RatingsMatrix& m);

AgreementReport evaluate_threshold(const RatingsMatrix& m, const ThresholdPolicy& p);

/// One rater per session, one unit per essential item in form order.
RatingsMatrix ratings_from_sessions(const std::vector<Session>& sessions, AgreementScope scope);

/// Delimited text: header `rater,<unit>...`, one row per rater, `NA` for missing.
RatingsMatrix parse_ratings(std::string_view text);
std::string format_ratings(const RatingsMatrix& m);

nlohmann::ordered_json report_to_json(const AgreementReport& r);

} // namespace sreview
