#include "sreview/agreement.hpp"

#include "sreview/error.hpp"
#include "sreview/text.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace sreview {

bool RatingsMatrix::has_missing() const
{
    for (const auto& row : values)
        for (const auto& v : row)
            if (!v) return true;
    return false;
}

RatingsMatrix RatingsMatrix::from_labels(std::vector<std::string> raters, std::vector<std::string> units,
                                         const std::vector<std::vector<std::optional<std::string>>>& labels,
                                         std::vector<std::string> domain)
{
    if (domain.empty()) {
        std::set<std::string> used;
        for (const auto& row : labels)
            for (const auto& v : row)
                if (v) used.insert(*v);
        domain.assign(used.begin(), used.end());
    }
    RatingsMatrix m;
    m.raters = std::move(raters);
    m.units = std::move(units);
    m.domain = std::move(domain);
    for (const auto& row : labels) {
        std::vector<std::optional<std::size_t>> out;
        for (const auto& v : row) {
            if (!v) {
                out.emplace_back();
                continue;
            }
            auto it = std::find(m.domain.begin(), m.domain.end(), *v);
            if (it == m.domain.end()) throw Error(ErrorCode::InvalidRatings, "rating '" + *v + "' is outside the domain");
            out.emplace_back(static_cast<std::size_t>(it - m.domain.begin()));
        }
        m.values.push_back(std::move(out));
    }
    return m;
}

std::string_view to_string(Metric m)
{
    switch (m) {
    case Metric::PercentAgreement: return "percent";
    case Metric::CohenKappa: return "kappa";
    case Metric::KrippendorffAlpha: return "alpha";
    }
    return "kappa";
}

std::string_view to_string(AgreementScope s)
{
    return s == AgreementScope::EssentialRootAnswers ? "essential-root" : "essential-status";
}

std::string_view to_string(Recommendation r)
{
    return r == Recommendation::Sufficient ? "sufficient" : "recruit-third-reviewer";
}

Metric parse_metric(std::string_view s)
{
    auto v = to_lower(trim(s));
    if (v == "percent" || v == "percent-agreement") return Metric::PercentAgreement;
    if (v == "kappa" || v == "cohen-kappa") return Metric::CohenKappa;
    if (v == "alpha" || v == "krippendorff-alpha") return Metric::KrippendorffAlpha;
    throw Error(ErrorCode::InvalidConfig, "unknown agreement metric '" + std::string(s) + "'");
}

AgreementScope parse_scope(std::string_view s)
{
    auto v = to_lower(trim(s));
    if (v == "essential-root") return AgreementScope::EssentialRootAnswers;
    if (v == "essential-status") return AgreementScope::EssentialStatuses;
    throw Error(ErrorCode::InvalidConfig, "unknown agreement scope '" + std::string(s) + "'");
}

namespace {

void check_shape(const RatingsMatrix& m)
{
    if (m.raters.size() < 2) throw Error(ErrorCode::InvalidRatings, "need at least two raters");
    if (m.units.empty()) throw Error(ErrorCode::InvalidRatings, "need at least one unit");
    if (m.values.size() != m.raters.size()) throw Error(ErrorCode::InvalidRatings, "one row per rater expected");
    for (const auto& row : m.values) {
        if (row.size() != m.units.size()) throw Error(ErrorCode::InvalidRatings, "ragged ratings row");
        for (const auto& v : row)
            if (v && *v >= m.domain.size()) throw Error(ErrorCode::InvalidRatings, "rating outside the domain");
    }
}

void check_two_complete(const RatingsMatrix& m)
{
    check_shape(m);
    if (m.raters.size() != 2)
        throw Error(ErrorCode::RaterCountUnsupported, "statistic needs exactly two raters, got " + std::to_string(m.raters.size()));
    if (m.has_missing()) throw Error(ErrorCode::MissingValues, "statistic needs a rating from both raters on every unit");
}

} // namespace

double percent_agreement(const RatingsMatrix& m)
{
    check_two_complete(m);
    std::size_t same = 0;
    for (std::size_t u = 0; u < m.units.size(); ++u)
        if (*m.values[0][u] == *m.values[1][u]) ++same;
    return static_cast<double>(same) / static_cast<double>(m.units.size());
}

double pairwise_agreement(const RatingsMatrix& m)
{
    check_shape(m);
    std::size_t pairs = 0, same = 0;
    for (std::size_t u = 0; u < m.units.size(); ++u) {
        for (std::size_t a = 0; a < m.raters.size(); ++a) {
            for (std::size_t b = a + 1; b < m.raters.size(); ++b) {
                if (!m.values[a][u] || !m.values[b][u]) continue;
                ++pairs;
                if (*m.values[a][u] == *m.values[b][u]) ++same;
            }
        }
    }
    if (pairs == 0) throw Error(ErrorCode::NoPairableValues, "no unit was rated by two raters");
    return static_cast<double>(same) / static_cast<double>(pairs);
}

Statistic cohen_kappa(const RatingsMatrix& m)
{
    check_two_complete(m);
    const auto n = static_cast<long long>(m.units.size());
    const std::size_t k = m.domain.size();
    std::vector<long long> first(k, 0), second(k, 0);
    long long agree = 0;
    for (std::size_t u = 0; u < m.units.size(); ++u) {
        auto a = *m.values[0][u], b = *m.values[1][u];
        ++first[a];
        ++second[b];
        if (a == b) ++agree;
    }
    // kappa = (p_o - p_e) / (1 - p_e), scaled by n^2 to stay in integers.
    long long marginal = 0;
    for (std::size_t c = 0; c < k; ++c) marginal += first[c] * second[c];
    const long long denom = n * n - marginal;
    if (denom == 0) return {std::nullopt, true};
    return {static_cast<double>(n * agree - marginal) / static_cast<double>(denom), false};
}

Statistic krippendorff_alpha(const RatingsMatrix& m)
{
    check_shape(m);
    const std::size_t k = m.domain.size();
    std::vector<std::vector<double>> coincidence(k, std::vector<double>(k, 0.0));
    for (std::size_t u = 0; u < m.units.size(); ++u) {
        std::vector<std::size_t> counts(k, 0);
        std::size_t mu = 0;
        for (const auto& row : m.values)
            if (row[u]) {
                ++counts[*row[u]];
                ++mu;
            }
        if (mu < 2) continue;
        const double w = 1.0 / static_cast<double>(mu - 1);
        for (std::size_t c = 0; c < k; ++c) {
            if (!counts[c]) continue;
            for (std::size_t d = 0; d < k; ++d) {
                if (!counts[d]) continue;
                const double pairs = c == d ? static_cast<double>(counts[c] * (counts[c] - 1))
                                            : static_cast<double>(counts[c] * counts[d]);
                coincidence[c][d] += pairs * w;
            }
        }
    }
    std::vector<double> marginals(k, 0.0);
    double n = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t d = 0; d < k; ++d) marginals[c] += coincidence[c][d];
        n += marginals[c];
    }
    if (n < 2.0) throw Error(ErrorCode::NoPairableValues, "no unit was rated by two raters");

    double observed = 0.0, expected = 0.0;
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t d = 0; d < k; ++d)
            if (c != d) {
                observed += coincidence[c][d];
                expected += marginals[c] * marginals[d];
            }
    if (expected == 0.0) return {std::nullopt, true};
    return {1.0 - (n - 1.0) * observed / expected, false};
}

AgreementReport evaluate_threshold(const RatingsMatrix& m, const ThresholdPolicy& p)
{
    if (p.metric == Metric::PercentAgreement && (p.threshold < 0.0 || p.threshold > 1.0))
        throw Error(ErrorCode::InvalidConfig, "percent agreement threshold must lie in [0, 1]");
    if (p.threshold < -1.0 || p.threshold > 1.0) throw Error(ErrorCode::InvalidConfig, "threshold must lie in [-1, 1]");

    AgreementReport r;
    r.metric = p.metric;
    r.threshold = p.threshold;

    const bool two_complete = m.raters.size() == 2 && !m.has_missing();
    std::optional<Statistic> kappa, alpha;
    Statistic selected;
    switch (p.metric) {
    case Metric::PercentAgreement:
        r.percent = two_complete ? percent_agreement(m) : pairwise_agreement(m);
        selected = {r.percent, false};
        break;
    case Metric::CohenKappa:
        kappa = cohen_kappa(m);
        selected = *kappa;
        break;
    case Metric::KrippendorffAlpha:
        alpha = krippendorff_alpha(m);
        selected = *alpha;
        break;
    }
    if (p.metric != Metric::PercentAgreement) r.percent = two_complete ? percent_agreement(m) : pairwise_agreement(m);
    if (!kappa && two_complete) kappa = cohen_kappa(m);
    if (!alpha) {
        try {
            alpha = krippendorff_alpha(m);
        } catch (const Error&) {
        }
    }
    if (kappa) r.kappa = kappa->value;
    if (alpha) r.alpha = alpha->value;
    r.degenerate = selected.degenerate;

    if (selected.value) {
        r.recommendation = *selected.value < p.threshold ? Recommendation::RecruitThirdReviewer : Recommendation::Sufficient;
    } else {
        r.recommendation = (p.treat_degenerate_as_pass && r.percent == 1.0) ? Recommendation::Sufficient
                                                                             : Recommendation::RecruitThirdReviewer;
    }
    return r;
}

RatingsMatrix ratings_from_sessions(const std::vector<Session>& sessions, AgreementScope scope)
{
    if (sessions.empty()) throw Error(ErrorCode::InvalidRatings, "no sessions");
    std::vector<std::string> raters, units;
    for (const auto& s : sessions) {
        if (s.form_id != sessions.front().form_id) throw Error(ErrorCode::FormMismatch, "sessions use different forms");
        raters.push_back(s.reviewer_id);
    }
    for (const auto& item : sessions.front().plan->items)
        if (item.category == Category::Essential) units.push_back(item.key);

    std::vector<std::string> domain;
    if (scope == AgreementScope::EssentialRootAnswers) {
        domain = {"no", "yes"};
    } else {
        for (Status st : kAllStatuses) domain.emplace_back(to_string(st));
    }

    std::vector<std::vector<std::optional<std::string>>> labels;
    for (const auto& s : sessions) {
        std::vector<std::optional<std::string>> row;
        for (const auto& key : units) {
            if (scope == AgreementScope::EssentialRootAnswers) {
                auto it = s.answers.find({key, std::string(kRootNode)});
                row.push_back(it == s.answers.end() ? std::nullopt : std::optional<std::string>(it->second.value));
            } else {
                auto st = item_status(s, key);
                row.push_back(st ? std::optional<std::string>(std::string(to_string(st->status))) : std::nullopt);
            }
        }
        labels.push_back(std::move(row));
    }
    return RatingsMatrix::from_labels(std::move(raters), std::move(units), labels, std::move(domain));
}

RatingsMatrix parse_ratings(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<std::string> units, raters;
    std::vector<std::vector<std::optional<std::string>>> labels;
    bool header = false;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const char sep = t.find('\t') != std::string::npos ? '\t' : ',';
        auto cells = split(t, sep);
        for (auto& c : cells) c = trim(c);
        if (!header) {
            if (cells.size() < 2) throw Error(ErrorCode::InvalidRatings, "header needs at least one unit");
            units.assign(cells.begin() + 1, cells.end());
            header = true;
            continue;
        }
        if (cells.size() != units.size() + 1)
            throw Error(ErrorCode::InvalidRatings, "row for '" + cells[0] + "' has " + std::to_string(cells.size() - 1) +
                                                       " ratings, expected " + std::to_string(units.size()));
        raters.push_back(cells[0]);
        std::vector<std::optional<std::string>> row;
        for (std::size_t i = 1; i < cells.size(); ++i) {
            if (cells[i] == "NA") row.emplace_back();
            else if (cells[i].empty()) throw Error(ErrorCode::InvalidRatings, "empty cell; use NA for missing ratings");
            else row.emplace_back(cells[i]);
        }
        labels.push_back(std::move(row));
    }
    if (!header) throw Error(ErrorCode::InvalidRatings, "ratings file is empty");
    auto m = RatingsMatrix::from_labels(std::move(raters), std::move(units), labels);
    check_shape(m);
    return m;
}

std::string format_ratings(const RatingsMatrix& m)
{
    std::ostringstream out;
    out << "rater";
    for (const auto& u : m.units) out << "," << u;
    out << "\n";
    for (std::size_t r = 0; r < m.raters.size(); ++r) {
        out << m.raters[r];
        for (const auto& v : m.values[r]) out << "," << (v ? m.domain[*v] : std::string("NA"));
        out << "\n";
    }
    return out.str();
}

nlohmann::ordered_json report_to_json(const AgreementReport& r)
{
    nlohmann::ordered_json j;
    j["metric"] = to_string(r.metric);
    j["threshold"] = r.threshold;
    j["percent"] = r.percent;
    j["kappa"] = r.kappa ? nlohmann::ordered_json(*r.kappa) : nlohmann::ordered_json(nullptr);
    j["alpha"] = r.alpha ? nlohmann::ordered_json(*r.alpha) : nlohmann::ordered_json(nullptr);
    j["degenerate"] = r.degenerate;
    j["recommendation"] = to_string(r.recommendation);
    return j;
}

} // namespace sreview
