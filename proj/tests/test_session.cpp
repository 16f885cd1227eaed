#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "generators.hpp"
#include "support.hpp"

#include "sreview/error.hpp"
#include "sreview/session.hpp"

using namespace sreview;
using support::walk;

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

std::set<std::string> revealed_nodes(const Session& s, const std::string& key)
{
    std::set<std::string> out;
    for (const auto& ref : s.revealed)
        if (ref.item_key == key) out.insert(ref.node_id);
    return out;
}

Session toy(VenueKind venue = VenueKind::Journal, std::vector<std::string> ess = {"first", "second"},
            std::vector<std::string> des = {"nice"})
{
    return start_session(support::toy_form(ess, des), "rev-A", venue, {}, "s1");
}

const std::string kFirst = "general/i1";
const std::string kSecond = "general/i2";
const std::string kNice = "general/i3";

} // namespace

TEST_CASE("start_session reveals one root prompt per essential item")
{
    auto s = toy();
    CHECK(s.revealed.size() == 2);
    CHECK(revealed_nodes(s, kFirst) == std::set<std::string>{"root"});
    CHECK(s.desirable_marks.empty());
    CHECK(s.answers.empty());
    CHECK(s.reviewer_id == "rev-A");
    CHECK(s.state == SessionState::Open);
    CHECK_FALSE(is_completable(s));

    auto empty = start_session(ReviewForm{}, "rev-B", VenueKind::Journal, {}, "s2");
    CHECK(is_completable(empty));
    CHECK(complete(empty).state == SessionState::Complete);
}

TEST_CASE("answer paths through the default journal tree")
{
    auto s = toy();
    SUBCASE("root yes is Met with no reveals")
    {
        auto t = answer(s, kFirst, "root", Answer::yes());
        CHECK(item_status(t, kFirst)->status == Status::Met);
        CHECK(revealed_nodes(t, kFirst) == std::set<std::string>{"root"});
    }
    SUBCASE("no then justified")
    {
        auto t = walk(s, kFirst, {Answer::no(), Answer::yes()});
        CHECK(item_status(t, kFirst)->status == Status::JustifiedDeviation);
    }
    SUBCASE("no, no, yes is fixable in the camera-ready copy")
    {
        auto t = walk(s, kFirst, {Answer::no(), Answer::no(), Answer::yes()});
        CHECK(item_status(t, kFirst)->status == Status::FixableMinor);
        CHECK_FALSE(item_status(t, kFirst)->note);
    }
    SUBCASE("limitations path captures the note")
    {
        auto t = walk(s, kFirst, {Answer::no(), Answer::no(), Answer::no(), Answer::yes(),
                                  Answer::text("missing threats to construct validity")});
        auto st = item_status(t, kFirst);
        REQUIRE(st);
        CHECK(st->status == Status::FixableRevision);
        CHECK(st->note == std::optional<std::string>("missing threats to construct validity"));
    }
    SUBCASE("cannot be fixed without new data is fatal")
    {
        auto t = walk(s, kFirst, {Answer::no(), Answer::no(), Answer::no(), Answer::no(), Answer::text("no control group")});
        CHECK(item_status(t, kFirst)->status == Status::Fatal);
    }
    SUBCASE("unanswered and partially answered items have no status")
    {
        CHECK_FALSE(item_status(s, kFirst));
        CHECK_FALSE(item_status(walk(s, kFirst, {Answer::no()}), kFirst));
        CHECK(code_of([&] { item_status(s, "nope"); }) == ErrorCode::UnknownItem);
    }
}

TEST_CASE("default conference tree")
{
    auto s = toy(VenueKind::Conference);
    CHECK(item_status(walk(s, kFirst, {Answer::no(), Answer::yes()}), kFirst)->status == Status::JustifiedDeviation);
    auto fatal = walk(s, kFirst, {Answer::no(), Answer::no(), Answer::no(), Answer::text("needs a new study")});
    CHECK(item_status(fatal, kFirst)->status == Status::Fatal);
    CHECK(item_status(walk(s, kFirst, {Answer::no(), Answer::no(), Answer::yes()}), kFirst)->status == Status::FixableMinor);
}

TEST_CASE("answer errors")
{
    auto s = toy();
    CHECK(code_of([&] { answer(s, kFirst, "justified", Answer::yes()); }) == ErrorCode::NotRevealed);
    CHECK(code_of([&] { answer(s, kFirst, "root", Answer::text("x")); }) == ErrorCode::WrongAnswerKind);
    CHECK(code_of([&] { answer(s, kFirst, "root", Answer{AnswerKind::YesNo, "maybe"}); }) == ErrorCode::WrongAnswerKind);
    CHECK(code_of([&] { answer(s, kNice, "root", Answer::yes()); }) == ErrorCode::WrongCategory);
    CHECK(code_of([&] { answer(s, "missing", "root", Answer::yes()); }) == ErrorCode::UnknownItem);

    auto at_note = walk(s, kFirst, {Answer::no(), Answer::no(), Answer::no(), Answer::yes()});
    CHECK(code_of([&] { answer(at_note, kFirst, "revision-note", Answer::text("   ")); }) == ErrorCode::WrongAnswerKind);
    CHECK(code_of([&] { answer(at_note, kFirst, "revision-note", Answer::text(std::string(2001, 'a'))); }) ==
          ErrorCode::TextTooLong);
    // the bound counts characters, not bytes
    std::string accented;
    for (int i = 0; i < 2000; ++i) accented += "é";
    CHECK(item_status(answer(at_note, kFirst, "revision-note", Answer::text(accented)), kFirst)->status ==
          Status::FixableRevision);

    CHECK(code_of([&] { complete(s); }) == ErrorCode::IncompleteSession);
    auto done = complete(support::all_yes(s));
    CHECK(code_of([&] { answer(done, kFirst, "root", Answer::no()); }) == ErrorCode::SessionClosed);
    CHECK(code_of([&] { mark_attribute(done, kNice, true); }) == ErrorCode::SessionClosed);
    CHECK(reopen(done).state == SessionState::Open);
}

TEST_CASE("marks on desirable items")
{
    auto s = toy();
    auto t = mark_attribute(s, kNice, true);
    CHECK(t.desirable_marks.at(kNice) == true);
    t = mark_attribute(t, kNice, false);
    CHECK(t.desirable_marks.at(kNice) == false);
    CHECK(code_of([&] { mark_attribute(s, kFirst, true); }) == ErrorCode::WrongCategory);
}

TEST_CASE("re-answering purges the abandoned path")
{
    auto s = walk(toy(), kFirst, {Answer::no(), Answer::no(), Answer::no(), Answer::yes(), Answer::text("note")});
    CHECK(revealed_nodes(s, kFirst).size() == 5);
    auto yes = answer(s, kFirst, "root", Answer::yes());
    CHECK(item_status(yes, kFirst)->status == Status::Met);
    CHECK(revealed_nodes(yes, kFirst) == std::set<std::string>{"root"});
    for (const auto& [ref, a] : yes.answers) CHECK_FALSE((ref.item_key == kFirst && ref.node_id != "root"));

    auto changed = answer(s, kFirst, "camera-ready", Answer::yes());
    CHECK(item_status(changed, kFirst)->status == Status::FixableMinor);
    CHECK(revealed_nodes(changed, kFirst) == std::set<std::string>{"root", "justified", "camera-ready"});
}

TEST_CASE("custom tree from the fixture corpus")
{
    const auto& r = support::fixtures();
    auto form = compose_form({{"experiment"}, {}}, r);
    auto s = start_session(form, "rev", VenueKind::Journal, r.trees, "s");
    const std::string key = "experiment/uses-random-assignment";
    CHECK(node_for(*s.plan->find(key), "root").prompt == "uses random assignment");
    auto t = walk(s, key, {Answer::no(), Answer::no(), Answer::choice("quasi-experiment"), Answer::yes()});
    CHECK(item_status(t, key)->status == Status::FixableMinor);
    t = walk(s, key, {Answer::no(), Answer::no(), Answer::choice("self-selected"), Answer::text("confounded")});
    CHECK(item_status(t, key)->status == Status::Fatal);
    CHECK(code_of([&] { walk(s, key, {Answer::no(), Answer::no(), Answer::choice("lottery")}); }) == ErrorCode::WrongAnswerKind);
    CHECK(code_of([&] { start_session(form, "rev", VenueKind::Journal, {}, "s"); }) == ErrorCode::InvalidTree);
}

TEST_CASE("reveal discipline over random answer sequences")
{
    const auto& r = support::fixtures();
    auto form = compose_form({{"experiment"}, {"information-visualization"}}, r);
    gen::Rng rng(99);
    for (int round = 0; round < 200; ++round) {
        auto s = start_session(form, "rev", round % 2 ? VenueKind::Conference : VenueKind::Journal, r.trees, "s");
        for (int step = 0; step < 60; ++step) {
            // pick any revealed node, including already answered ones
            auto it = s.revealed.begin();
            std::advance(it, static_cast<long>(gen::pick(rng, s.revealed.size())));
            const auto ref = *it;
            const auto& item = *s.plan->find(ref.item_key);
            const auto before = revealed_nodes(s, ref.item_key);
            if (ref.node_id == kRootNode) {
                auto prev = s.answers.find(ref);
                const bool was_no = prev != s.answers.end() && prev->second == Answer::no();
                const bool yes = gen::coin(rng);
                s = answer(s, ref.item_key, ref.node_id, yes ? Answer::yes() : Answer::no());
                auto after = revealed_nodes(s, ref.item_key);
                if (yes) {
                    CHECK(after == std::set<std::string>{"root"});
                    CHECK(item_status(s, ref.item_key)->status == Status::Met);
                } else if (was_no) {
                    CHECK(after == before); // repeating an answer keeps the path
                } else {
                    CHECK(after == std::set<std::string>{"root", item.tree->root});
                }
            } else {
                gen::answer_step(rng, s, item);
            }
            // every answered node is revealed; every item keeps its root prompt
            for (const auto& [aref, a] : s.answers) CHECK(s.revealed.count(aref) == 1);
            for (const auto& pi : s.plan->items)
                if (pi.category == Category::Essential) CHECK(s.revealed.count({pi.key, "root"}) == 1);
        }
    }
}

TEST_CASE("all-yes sessions reveal zero follow-ups")
{
    const auto& r = support::fixtures();
    auto s = support::all_yes(start_session(compose_form({{"experiment"}, {}}, r), "rev", VenueKind::Journal, r.trees, "s"));
    for (const auto& ref : s.revealed) CHECK(ref.node_id == "root");
    CHECK(is_completable(s));
}

TEST_CASE("status totality and log replay over random sessions")
{
    const auto& r = support::fixtures();
    auto form = compose_form({{"experiment", "case-study"}, {"sampling"}}, r, {"describes the calibration rig"});
    gen::Rng rng(4242);
    for (int round = 0; round < 100; ++round) {
        auto s = start_session(form, "reviewer-" + std::to_string(round), VenueKind::Journal, r.trees, "s" + std::to_string(round));
        std::int64_t ts = 1000;
        for (const auto& item : s.plan->items) {
            if (item.category == Category::Essential)
                while (gen::answer_step(rng, s, item, 0.4, ts++)) {}
            else
                s = mark_attribute(s, item.key, gen::coin(rng), ts++);
        }
        if (gen::coin(rng)) s = set_comments(s, gen::words(rng, 0, 20), ts++);
        for (const auto& item : s.plan->items)
            if (item.category == Category::Essential) CHECK(item_status(s, item.key).has_value());
        s = complete(s, ts++);

        auto log = export_session_log(s);
        auto back = replay_session_log(log);
        CHECK(back == s);
        CHECK(export_session_log(back) == log);
        CHECK(back.history.size() == s.history.size());
    }
}

TEST_CASE("comments never change statuses")
{
    auto s = walk(toy(), kFirst, {Answer::no(), Answer::yes()});
    auto c = set_comments(s, "I would have used a different design.");
    CHECK(item_status(c, kFirst) == item_status(s, kFirst));
    CHECK(c.comments == "I would have used a different design.");
}

TEST_CASE("replay detects tampering")
{
    auto s = complete(support::all_yes(toy()));
    auto log = export_session_log(s);
    // drop the second record
    auto first_nl = log.find('\n');
    auto second_nl = log.find('\n', first_nl + 1);
    auto tampered = log.substr(0, first_nl + 1) + log.substr(second_nl + 1);
    CHECK(code_of([&] { replay_session_log(tampered); }) == ErrorCode::ReplayDivergence);
    CHECK_THROWS(replay_session_log("not json\n"));
}

TEST_CASE("session json exposes prompts for revealed nodes only")
{
    auto s = walk(toy(), kFirst, {Answer::no()});
    auto j = session_to_json(s);
    CHECK(j["session_id"] == "s1");
    auto dumped = j.dump();
    CHECK(dumped.find("Is this deviation justified in the context of this study?") != std::string::npos);
    CHECK(dumped.find("Would this problem be easy to fix") == std::string::npos);
}
