#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "support.hpp"

#include "sreview/error.hpp"
#include "sreview/form.hpp"
#include "sreview/text.hpp"

#include <set>

using namespace sreview;

namespace {

std::vector<std::string> ids(const std::vector<const Standard*>& v)
{
    std::vector<std::string> out;
    for (const auto* s : v) out.push_back(s->id);
    return out;
}

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidRequest;
}

Standard method(const std::string& id, std::vector<AttributeItem> items, StandardKind kind = StandardKind::MethodSpecific)
{
    Standard s;
    s.id = id;
    s.name = id;
    s.kind = kind;
    s.attributes = std::move(items);
    return s;
}

} // namespace

TEST_CASE("resolve_standards puts General first, then methods, then supplements")
{
    const auto& r = support::fixtures();
    CHECK(ids(resolve_standards({{"case-study"}, {}}, r)) == std::vector<std::string>{"general", "case-study"});
    CHECK(ids(resolve_standards({{"experiment"}, {"information-visualization"}}, r)) ==
          std::vector<std::string>{"general", "experiment", "information-visualization"});
    CHECK(ids(resolve_standards({{"systematic-review", "questionnaire-survey"}, {"multi-methodology"}}, r)) ==
          std::vector<std::string>{"general", "systematic-review", "questionnaire-survey", "multi-methodology"});
}

TEST_CASE("declaration errors")
{
    const auto& r = support::fixtures();
    CHECK(code_of([&] { compose_form({{"unknown-method"}, {}}, r); }) == ErrorCode::UnknownStandardId);
    CHECK(code_of([&] { compose_form({{"information-visualization"}, {}}, r); }) == ErrorCode::WrongStandardKind);
    CHECK(code_of([&] { compose_form({{}, {"experiment"}}, r); }) == ErrorCode::WrongStandardKind);
    CHECK(code_of([&] { compose_form({{"experiment", "experiment"}, {}}, r); }) == ErrorCode::InvalidDeclaration);
    CHECK(code_of([&] { compose_form({{"general"}, {}}, r); }) == ErrorCode::WrongStandardKind);
}

TEST_CASE("empty declaration yields exactly the General Standard")
{
    const auto& r = support::fixtures();
    auto form = compose_form({}, r);
    const auto& g = r.general();
    REQUIRE(form.items.size() == g.attributes.size());
    for (std::size_t i = 0; i < form.items.size(); ++i) {
        CHECK(form.items[i].text == g.attributes[i].text);
        CHECK(form.items[i].key == "general/" + g.attributes[i].item_id);
        CHECK(form.items[i].provenance.size() == 1);
    }
}

TEST_CASE("shared item text merges into one item with two provenance entries")
{
    const auto& r = support::fixtures();
    auto form = compose_form({{"experiment", "case-study"}, {}}, r);
    std::vector<const FormItem*> hits;
    for (const auto& it : form.items)
        if (normalize_text(it.text) == "states a clear research question") hits.push_back(&it);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0]->provenance.size() == 2);
    CHECK(hits[0]->provenance[0].standard_id == "experiment");
    CHECK(hits[0]->provenance[1].standard_id == "case-study");
    CHECK(hits[0]->key == "experiment/states-a-clear-research-question");
}

TEST_CASE("experiment plus information visualization matches the union oracle count")
{
    const auto& r = support::fixtures();
    auto form = compose_form({{"experiment"}, {"information-visualization"}}, r);
    auto expected = oracle::set_union(support::kFixtures, {"general", "experiment", "information-visualization"});
    std::size_t duplicates = 0;
    for (const auto& u : expected) duplicates += u.sources.size() - 1;
    CHECK(duplicates >= 1);
    CHECK(form.items.size() == r.get("general").attributes.size() + r.get("experiment").attributes.size() +
                                   r.get("information-visualization").attributes.size() - duplicates);
    CHECK(form.items.size() == expected.size());
}

TEST_CASE("conflicts between standards")
{
    Registry r;
    r.general_id = "general";
    r.add(method("general", {{"g", "general item", Category::Essential, {}, {}, false}}, StandardKind::General));
    r.add(method("a", {{"x", "Shared text.", Category::Essential, {}, {}, false}}));
    r.add(method("b", {{"y", "shared text", Category::Desirable, {}, {}, false}}));
    r.add(method("c", {{"x", "different words", Category::Essential, {}, {}, true}}));
    r.add(method("d", {{"z", "shared   TEXT", Category::Essential, {}, std::string("other"), false}}));
    r.add(method("e", {{"x", "shared text!", Category::Essential, {}, {}, true}}));
    r.trees["other"] = default_tree(VenueKind::Journal);
    r.trees["other"].tree_id = "other";

    CHECK(code_of([&] { compose_form({{"a", "b"}, {}}, r); }) == ErrorCode::CategoryConflict);
    CHECK(code_of([&] { compose_form({{"a", "d"}, {}}, r); }) == ErrorCode::TreeConflict);
    // same anchor, different text
    auto rc = r;
    rc.standards["a"].attributes[0].anchored = true;
    CHECK(code_of([&] { compose_form({{"a", "c"}, {}}, rc); }) == ErrorCode::TextConflict);
    // same anchor and same normalized text merges
    auto merged = compose_form({{"a", "e"}, {}}, rc);
    CHECK(merged.items.size() == 2);
    CHECK(merged.items[1].provenance.size() == 2);
}

TEST_CASE("ad-hoc items are flagged essential items after the supplements")
{
    const auto& r = support::fixtures();
    auto form = compose_form({{}, {"sampling"}}, r, {"Describes the prototype's calibration procedure"});
    const auto& last = form.items.back();
    CHECK(last.adhoc);
    CHECK(last.category == Category::Essential);
    CHECK(last.key == "adhoc/describes-the-prototypes-calibration-procedure");
    CHECK(last.provenance.at(0).standard_id == kAdhocSource);
    CHECK(export_form_text(form).find("| adhoc") != std::string::npos);
    // an ad-hoc item repeating an existing criterion merges into it
    auto dup = compose_form({}, r, {"Explains why the problem is important."});
    CHECK(dup.items.size() == r.general().attributes.size());
    const auto* merged = dup.find("general/explains-why-the-problem-is-important");
    REQUIRE(merged != nullptr);
    CHECK(merged->provenance.size() == 2);
    CHECK(merged->provenance[1].standard_id == kAdhocSource);
    CHECK(code_of([&] { compose_form({}, r, {"   "}); }) == ErrorCode::InvalidDeclaration);
}

TEST_CASE("author checklist mirrors the form")
{
    const auto& r = support::fixtures();
    auto one = support::toy_form({"only item"});
    auto c1 = author_checklist(one);
    REQUIRE(c1.entries.size() == 1);
    CHECK(c1.entries[0].key == one.items[0].key);

    auto form = compose_form({{"experiment"}, {}}, r);
    auto c = author_checklist(form);
    CHECK(c.form_id == form.form_id);
    REQUIRE(c.entries.size() == form.items.size());
    for (std::size_t i = 0; i < c.entries.size(); ++i) {
        CHECK(c.entries[i].key == form.items[i].key);
        CHECK(c.entries[i].text == form.items[i].text);
        CHECK(c.entries[i].category == form.items[i].category);
    }

    ReviewForm empty;
    CHECK(author_checklist(empty).entries.empty());
}

TEST_CASE("composition properties over every declaration in the fixture corpus")
{
    const auto& r = support::fixtures();
    std::vector<std::string> methods, supplements;
    for (const auto& [id, s] : r.standards) {
        if (s.kind == StandardKind::MethodSpecific) methods.push_back(id);
        if (s.kind == StandardKind::Supplement) supplements.push_back(id);
    }
    // every subset of up to two methods combined with every subset of supplements
    std::vector<std::vector<std::string>> method_sets{{}};
    for (std::size_t i = 0; i < methods.size(); ++i) {
        method_sets.push_back({methods[i]});
        for (std::size_t j = 0; j < methods.size(); ++j)
            if (i != j) method_sets.push_back({methods[i], methods[j]});
    }
    for (const auto& ms : method_sets) {
        for (unsigned mask = 0; mask < (1u << supplements.size()); ++mask) {
            MethodDeclaration decl{ms, {}};
            for (std::size_t k = 0; k < supplements.size(); ++k)
                if (mask & (1u << k)) decl.supplement_ids.push_back(supplements[k]);
            auto form = compose_form(decl, r);
            CAPTURE(export_form_text(form));

            // idempotence and determinism
            CHECK(compose_form(decl, r) == form);
            CHECK(export_form_text(compose_form(decl, r)) == export_form_text(form));

            // dedup soundness and unique keys
            std::set<std::string> texts, keys;
            for (const auto& it : form.items) {
                CHECK(texts.insert(normalize_text(it.text)).second);
                CHECK(keys.insert(it.key).second);
                CHECK_FALSE(it.provenance.empty());
            }

            // general items first
            const auto general_n = r.general().attributes.size();
            for (std::size_t i = 0; i < general_n; ++i) CHECK(form.items[i].provenance[0].standard_id == "general");

            // monotonicity: adding any missing supplement keeps every key
            for (std::size_t k = 0; k < supplements.size(); ++k) {
                if (mask & (1u << k)) continue;
                auto bigger = decl;
                bigger.supplement_ids.push_back(supplements[k]);
                std::set<std::string> bigger_keys;
                for (const auto& it : compose_form(bigger, r).items) bigger_keys.insert(it.key);
                CHECK(std::includes(bigger_keys.begin(), bigger_keys.end(), keys.begin(), keys.end()));
            }

            // checklist parity
            auto c = author_checklist(form);
            REQUIRE(c.entries.size() == form.items.size());
            for (std::size_t i = 0; i < c.entries.size(); ++i) CHECK(c.entries[i].key == form.items[i].key);

            // serialization
            CHECK(form_from_json(nlohmann::json::parse(form_to_json(form).dump())) == form);
        }
    }
}

TEST_CASE("form id depends on content only")
{
    const auto& r = support::fixtures();
    auto a = compose_form({{"experiment"}, {}}, r);
    auto b = compose_form({{"case-study"}, {}}, r);
    CHECK(a.form_id != b.form_id);
    CHECK(a.form_id.rfind("form-", 0) == 0);
    auto text = export_form_text(a);
    CHECK(text.rfind("sreview-form 1\n", 0) == 0);
    CHECK(text.find("experiment/uses-random-assignment | Essential | uses random assignment | "
                    "experiment/uses-random-assignment | tree=random-assignment") != std::string::npos);
}

TEST_CASE("declaration json")
{
    MethodDeclaration d{{"a", "b"}, {"c"}};
    CHECK(declaration_from_json(nlohmann::json::parse(declaration_to_json(d).dump())).method_ids == d.method_ids);
    CHECK(declaration_from_json(nlohmann::json::parse(declaration_to_json(d).dump())).supplement_ids == d.supplement_ids);
}
