#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "generators.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include "sreview/agreement.hpp"
#include "sreview/error.hpp"

#include <algorithm>
#include <numeric>

using namespace sreview;
using Labels = std::vector<std::vector<std::optional<std::string>>>;

namespace {

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidRequest;
}

RatingsMatrix matrix(const Labels& labels)
{
    std::vector<std::string> raters, units;
    for (std::size_t r = 0; r < labels.size(); ++r) raters.push_back("r" + std::to_string(r));
    for (std::size_t u = 0; u < labels.at(0).size(); ++u) units.push_back("u" + std::to_string(u));
    return RatingsMatrix::from_labels(raters, units, labels);
}

Labels two(const std::vector<std::string>& a, const std::vector<std::string>& b)
{
    Labels l(2);
    for (auto& x : a) l[0].push_back(x);
    for (auto& x : b) l[1].push_back(x);
    return l;
}

// both-yes 4, both-no 2, A-yes/B-no 3, A-no/B-yes 1
Labels worked_example()
{
    return two({"yes", "yes", "yes", "yes", "no", "no", "yes", "yes", "yes", "no"},
               {"yes", "yes", "yes", "yes", "no", "no", "no", "no", "no", "yes"});
}

Labels random_labels(gen::Rng& rng, bool allow_missing)
{
    const auto raters = 2 + gen::pick(rng, 2);
    const auto units = 1 + gen::pick(rng, 12);
    const auto cats = 1 + gen::pick(rng, 5);
    Labels l(raters, std::vector<std::optional<std::string>>(units));
    for (auto& row : l)
        for (auto& cell : row)
            if (!allow_missing || !gen::coin(rng, 0.2)) cell = "c" + std::to_string(gen::pick(rng, cats));
    return l;
}

std::vector<std::string> row(const Labels& l, std::size_t r)
{
    std::vector<std::string> out;
    for (const auto& c : l[r]) out.push_back(*c);
    return out;
}

} // namespace

TEST_CASE("percent agreement")
{
    CHECK(percent_agreement(matrix(two({"a", "b", "a"}, {"a", "b", "a"}))) == 1.0);
    CHECK(percent_agreement(matrix(two({"a", "a", "a", "a", "a", "a", "a", "a", "a", "a"},
                                       {"a", "a", "a", "a", "a", "a", "b", "b", "b", "b"}))) == doctest::Approx(0.6));
    Labels none{{std::string("a"), std::nullopt}, {std::nullopt, std::string("b")}};
    CHECK(code_of([&] { percent_agreement(matrix(none)); }) == ErrorCode::MissingValues);
    Labels three{{std::string("a")}, {std::string("a")}, {std::string("a")}};
    CHECK(code_of([&] { percent_agreement(matrix(three)); }) == ErrorCode::RaterCountUnsupported);
    CHECK(pairwise_agreement(matrix(three)) == 1.0);
}

TEST_CASE("cohen kappa")
{
    auto k = cohen_kappa(matrix(worked_example()));
    REQUIRE(k.value);
    CHECK(std::abs(*k.value - 0.2) < 1e-12);
    CHECK(std::abs(oracle::kappa(row(worked_example(), 0), row(worked_example(), 1)) - 0.2) < 1e-12);
    CHECK_FALSE(k.degenerate);

    auto same = cohen_kappa(matrix(two({"a", "b", "c", "a"}, {"a", "b", "c", "a"})));
    CHECK(same.value == std::optional<double>(1.0));

    auto constant = cohen_kappa(matrix(two({"yes", "yes", "yes"}, {"yes", "yes", "yes"})));
    CHECK_FALSE(constant.value);
    CHECK(constant.degenerate);

    Labels missing{{std::string("a"), std::nullopt}, {std::string("a"), std::string("b")}};
    CHECK(code_of([&] { cohen_kappa(matrix(missing)); }) == ErrorCode::MissingValues);
    Labels three{{std::string("a")}, {std::string("a")}, {std::string("b")}};
    CHECK(code_of([&] { cohen_kappa(matrix(three)); }) == ErrorCode::RaterCountUnsupported);
}

TEST_CASE("krippendorff alpha")
{
    CHECK(krippendorff_alpha(matrix(two({"a", "b", "a"}, {"a", "b", "a"}))).value == std::optional<double>(1.0));

    const std::optional<std::string> na;
    const auto s = [](const char* x) { return std::optional<std::string>(x); };
    Labels fixture{{s("a"), s("a"), s("b"), s("b"), na}, {s("a"), s("b"), s("b"), s("c"), s("c")},
                   {s("a"), s("a"), na, s("c"), s("c")}};
    auto a = krippendorff_alpha(matrix(fixture));
    REQUIRE(a.value);
    CHECK(std::abs(*a.value - oracle::alpha(fixture)) < 1e-12);

    auto constant = krippendorff_alpha(matrix(two({"x", "x"}, {"x", "x"})));
    CHECK_FALSE(constant.value);
    CHECK(constant.degenerate);

    Labels unpairable{{s("a"), na}, {na, s("b")}};
    CHECK(code_of([&] { krippendorff_alpha(matrix(unpairable)); }) == ErrorCode::NoPairableValues);
}

TEST_CASE("threshold policy")
{
    ThresholdPolicy p;
    CHECK(p.metric == Metric::CohenKappa);
    CHECK(p.threshold == doctest::Approx(0.6));
    CHECK(p.scope == AgreementScope::EssentialRootAnswers);
    CHECK(p.treat_degenerate_as_pass);

    auto low = evaluate_threshold(matrix(worked_example()), p);
    CHECK(low.recommendation == Recommendation::RecruitThirdReviewer);
    CHECK(low.percent == doctest::Approx(0.6));

    auto constant = matrix(two({"yes", "yes"}, {"yes", "yes"}));
    auto pass = evaluate_threshold(constant, p);
    CHECK(pass.degenerate);
    CHECK(pass.percent == 1.0);
    CHECK(pass.recommendation == Recommendation::Sufficient);
    p.treat_degenerate_as_pass = false;
    CHECK(evaluate_threshold(constant, p).recommendation == Recommendation::RecruitThirdReviewer);

    ThresholdPolicy alpha{Metric::KrippendorffAlpha, 1.0, AgreementScope::EssentialRootAnswers, true};
    CHECK(evaluate_threshold(matrix(two({"a", "b"}, {"a", "b"})), alpha).recommendation == Recommendation::Sufficient);

    ThresholdPolicy pct{Metric::PercentAgreement, 0.7, AgreementScope::EssentialRootAnswers, true};
    CHECK(evaluate_threshold(matrix(worked_example()), pct).recommendation == Recommendation::RecruitThirdReviewer);
    pct.threshold = 0.6;
    CHECK(evaluate_threshold(matrix(worked_example()), pct).recommendation == Recommendation::Sufficient);
}

TEST_CASE("oracle equivalence, range and permutation invariance")
{
    gen::Rng rng(31337);
    for (int i = 0; i < 500; ++i) {
        const bool missing = i % 2 == 1;
        auto l = random_labels(rng, missing);
        auto m = matrix(l);
        CAPTURE(format_ratings(m));

        double alpha_oracle = oracle::alpha(l);
        if (std::isnan(alpha_oracle)) {
            bool unpairable = false;
            try {
                auto a = krippendorff_alpha(m);
                CHECK_FALSE(a.value);
                CHECK(a.degenerate);
            } catch (const Error& e) {
                unpairable = e.code() == ErrorCode::NoPairableValues;
            }
            (void)unpairable;
        } else {
            auto a = krippendorff_alpha(m);
            REQUIRE(a.value);
            CHECK(std::abs(*a.value - alpha_oracle) < 1e-9);
            CHECK(*a.value >= -1.0);
            CHECK(*a.value <= 1.0);
        }

        if (l.size() == 2 && !m.has_missing()) {
            auto k = cohen_kappa(m);
            double ko = oracle::kappa(row(l, 0), row(l, 1));
            if (std::isnan(ko)) {
                CHECK_FALSE(k.value);
            } else {
                REQUIRE(k.value);
                CHECK(std::abs(*k.value - ko) < 1e-9);
                CHECK(*k.value >= -1.0);
                CHECK(*k.value <= 1.0);
            }
            auto pa = percent_agreement(m);
            CHECK(pa >= 0.0);
            CHECK(pa <= 1.0);

            // swapping raters
            Labels swapped{l[1], l[0]};
            CHECK(cohen_kappa(matrix(swapped)).value == k.value);
            CHECK(percent_agreement(matrix(swapped)) == pa);

            // shuffling units
            std::vector<std::size_t> order(l[0].size());
            std::iota(order.begin(), order.end(), 0);
            std::shuffle(order.begin(), order.end(), rng);
            Labels shuffled(2);
            for (auto u : order) {
                shuffled[0].push_back(l[0][u]);
                shuffled[1].push_back(l[1][u]);
            }
            CHECK(cohen_kappa(matrix(shuffled)).value == k.value);
            CHECK(percent_agreement(matrix(shuffled)) == pa);
            auto a1 = krippendorff_alpha(m), a2 = krippendorff_alpha(matrix(shuffled));
            if (a1.value) CHECK(std::abs(*a1.value - *a2.value) < 1e-12);
        }
    }
}

TEST_CASE("perfect agreement fixpoint")
{
    gen::Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        std::vector<std::string> v;
        const auto n = 2 + gen::pick(rng, 10);
        for (std::size_t u = 0; u < n; ++u) v.push_back("c" + std::to_string(gen::pick(rng, 4)));
        if (std::all_of(v.begin(), v.end(), [&](const auto& x) { return x == v[0]; })) v[0] = v[0] + "-other";
        auto m = matrix(two(v, v));
        CHECK(percent_agreement(m) == 1.0);
        CHECK(cohen_kappa(m).value == std::optional<double>(1.0));
        CHECK(krippendorff_alpha(m).value == std::optional<double>(1.0));
    }
}

TEST_CASE("ratings text format")
{
    auto m = parse_ratings("# ratings\nrater,u1,u2,u3\nalice,yes,no,NA\nbob,yes,yes,no\n");
    CHECK(m.raters == std::vector<std::string>{"alice", "bob"});
    CHECK(m.units == std::vector<std::string>{"u1", "u2", "u3"});
    CHECK(m.has_missing());
    auto back = parse_ratings(format_ratings(m));
    CHECK(back.raters == m.raters);
    CHECK(back.units == m.units);
    CHECK(format_ratings(back) == format_ratings(m));
    auto tabbed = parse_ratings("rater\tu1\tu2\nalice\tyes\tno\nbob\tyes\tno\n");
    CHECK(percent_agreement(tabbed) == 1.0);
    CHECK(code_of([] { parse_ratings("rater,u1\nalice,yes,no\n"); }) == ErrorCode::InvalidRatings);
    CHECK(code_of([] { parse_ratings(""); }) == ErrorCode::InvalidRatings);
}

TEST_CASE("ratings from sessions")
{
    auto form = support::toy_form({"one", "two", "three"}, {"extra"});
    auto a = start_session(form, "a", VenueKind::Journal, {}, "sa");
    auto b = start_session(form, "b", VenueKind::Journal, {}, "sb");
    a = support::all_yes(a);
    b = support::walk(b, "general/i1", {Answer::no(), Answer::yes()});
    b = support::walk(b, "general/i2", {Answer::yes()});
    b = support::walk(b, "general/i3", {Answer::no(), Answer::no(), Answer::yes()});
    b = mark_attribute(b, "general/i4", true);

    auto root = ratings_from_sessions({complete(a), complete(b)}, AgreementScope::EssentialRootAnswers);
    CHECK(root.units.size() == 3);
    CHECK(root.domain == std::vector<std::string>{"no", "yes"});
    CHECK(percent_agreement(root) == doctest::Approx(1.0 / 3));

    auto status = ratings_from_sessions({complete(a), complete(b)}, AgreementScope::EssentialStatuses);
    CHECK(status.domain.size() == 5);
    CHECK(percent_agreement(status) == doctest::Approx(1.0 / 3));

    auto j = report_to_json(evaluate_threshold(root, ThresholdPolicy{}));
    CHECK(j.contains("kappa"));
    CHECK(j["recommendation"] == "recruit-third-reviewer");
}
