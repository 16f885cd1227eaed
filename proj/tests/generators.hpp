#pragma once
// Random inputs for property tests. Seeds are fixed so failures reproduce.

#include "sreview/session.hpp"
#include "sreview/standards.hpp"

#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace gen {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline const std::vector<std::string>& vocabulary()
{
    static const std::vector<std::string> words = {
        "reports", "the", "sample", "size", "justifies", "analysis", "describes", "data", "collection", "threats",
        "validity", "uses", "appropriate", "statistical", "tests", "participants", "explains", "context", "Study",
        "Design", "method", "results", "limitations", "of", "and", "a", "research", "question", "clearly", "states",
        "procedure", "coding", "(if", "any)", "e.g.", "effect", "sizes", "artifact", "replication", "package",
        "naïve", "über", "résumé", "tool-supported", "pre-registered", "100%", "2x2", "R", "Python", "in-depth"};
    return words;
}

inline std::string words(Rng& rng, std::size_t min, std::size_t max)
{
    const auto& v = vocabulary();
    const auto n = min + pick(rng, max - min + 1);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += (i ? " " : "") + v[pick(rng, v.size())];
    return out;
}

inline std::string slug_word(Rng& rng, const char* prefix)
{
    return std::string(prefix) + std::to_string(pick(rng, 1000000));
}

/// A syntactically valid standard document written directly as markdown,
/// exercising optional front matter, anchors, tags, repeated category
/// headings, wrapped paragraphs and continuation lines.
inline std::string markdown_document(Rng& rng)
{
    std::ostringstream out;
    const bool supplement = coin(rng, 0.2);
    std::vector<std::string> anchored_essentials;
    std::set<std::string> used_ids;

    struct Item {
        std::string category, text, anchor, tags;
        std::string continuation;
    };
    std::vector<Item> items;
    const char* cats[] = {"Essential", "Desirable", "Extraordinary"};
    const auto n_items = (supplement ? 0 : 1) + pick(rng, 9);
    for (std::size_t i = 0; i < n_items; ++i) {
        Item it;
        it.category = i == 0 && !supplement ? "Essential" : cats[pick(rng, 3)];
        // a unique token inside the first six words keeps derived ids distinct
        auto token = "w" + std::to_string(i) + "x" + std::to_string(pick(rng, 1000));
        auto before = words(rng, 0, 4);
        it.text = (before.empty() ? "" : before + " ") + token + " " + words(rng, 0, 6);
        if (coin(rng, 0.3)) {
            do it.anchor = slug_word(rng, "id-");
            while (!used_ids.insert(it.anchor).second);
            if (it.category == "Essential" && coin(rng)) anchored_essentials.push_back(it.anchor);
        }
        if (coin(rng, 0.2)) it.tags = coin(rng) ? "stats" : "data-analysis, reporting";
        if (coin(rng, 0.1)) it.continuation = words(rng, 1, 3);
        items.push_back(it);
    }

    const bool front = coin(rng, 0.8) || supplement;
    std::vector<std::string> initial_checks;
    if (front) {
        out << "---\n";
        if (coin(rng, 0.7)) out << "id: " << slug_word(rng, "std-") << "\n";
        out << "kind: " << (supplement ? "supplement" : coin(rng) ? "method-specific" : "general") << "\n";
        if (coin(rng, 0.7)) out << "version: " << pick(rng, 5) << "." << pick(rng, 10) << "\n";
        for (const auto& a : anchored_essentials) out << "followup: " << a << " = tree-" << pick(rng, 3) << "\n";
        const auto checks = pick(rng, 3);
        for (std::size_t i = 0; i < checks; ++i) out << "initial_check: " << words(rng, 2, 6) << "\n";
        out << "---\n";
    }
    out << "# " << words(rng, 1, 5) << "\n\n";
    out << words(rng, 3, 12) << "\n";
    if (coin(rng)) out << words(rng, 2, 8) << "\n";
    if (coin(rng, 0.3)) out << "\n" << words(rng, 3, 8) << "\n";

    if (coin(rng)) out << "\n## Application\n\n" << words(rng, 3, 10) << "\n";

    out << "\n## Specific Attributes\n";
    std::string last;
    for (const auto& it : items) {
        if (it.category != last || coin(rng, 0.1)) {
            out << "\n### " << it.category << "\n\n";
            last = it.category;
        }
        if (!it.anchor.empty() || !it.tags.empty()) {
            out << "<!-- ";
            if (!it.anchor.empty()) out << "id: " << it.anchor;
            if (!it.anchor.empty() && !it.tags.empty()) out << "; ";
            if (!it.tags.empty()) out << "tags: " << it.tags;
            out << " -->\n";
        }
        out << "- [ ] " << it.text << "\n";
        if (!it.continuation.empty()) out << "  " << it.continuation << "\n";
    }

    const char* lists[] = {"General Quality Criteria", "Examples of Acceptable Deviations", "Antipatterns",
                           "Invalid Criticisms", "Suggested Readings", "Exemplars"};
    for (const char* heading : lists) {
        if (!coin(rng, 0.4)) continue;
        out << "\n## " << heading << "\n\n";
        const auto n = 1 + pick(rng, 3);
        for (std::size_t i = 0; i < n; ++i) out << "- " << words(rng, 1, 8) << "\n";
    }
    if (coin(rng, 0.4)) out << "\n## Notes\n\n" << words(rng, 2, 10) << "\n\n" << words(rng, 2, 6) << "\n";
    return out.str();
}

/// A random tree with every path to a revision or fatal leaf passing through
/// a capture node.
inline sreview::FollowUpTree followup_tree(Rng& rng, const std::string& id)
{
    using namespace sreview;
    FollowUpTree t;
    t.tree_id = id;
    int counter = 0;
    auto next_id = [&] { return "n" + std::to_string(counter++); };
    std::function<std::string(int)> build = [&](int depth) -> std::string {
        FollowUpNode n;
        n.node_id = next_id();
        if (depth > 2 || (depth > 0 && coin(rng, 0.3))) {
            const Status leaves[] = {Status::JustifiedDeviation, Status::FixableMinor, Status::FixableRevision,
                                     Status::Fatal};
            auto st = leaves[pick(rng, 4)];
            if (st == Status::FixableRevision || st == Status::Fatal) {
                FollowUpNode cap;
                cap.node_id = n.node_id;
                cap.prompt = "why";
                cap.answer_kind = AnswerKind::FreeText;
                cap.capture_text = true;
                FollowUpNode leaf;
                leaf.node_id = next_id();
                leaf.leaf_status = st;
                cap.edges[std::string(kNextEdge)] = leaf.node_id;
                t.nodes[leaf.node_id] = leaf;
                t.nodes[cap.node_id] = cap;
                return cap.node_id;
            }
            n.leaf_status = st;
            t.nodes[n.node_id] = n;
            return n.node_id;
        }
        n.prompt = "question " + n.node_id;
        if (coin(rng, 0.7)) {
            n.answer_kind = AnswerKind::YesNo;
            auto yes = build(depth + 1);
            auto no = build(depth + 1);
            n.edges["yes"] = yes;
            n.edges["no"] = no;
        } else {
            n.answer_kind = AnswerKind::Choice;
            const auto k = 2 + pick(rng, 2);
            for (std::size_t i = 0; i < k; ++i) n.edges["option-" + std::to_string(i)] = build(depth + 1);
        }
        const auto nid = n.node_id;
        t.nodes[nid] = std::move(n);
        return nid;
    };
    t.root = build(0);
    return t;
}

/// Answers the currently pending node of an essential item with a random
/// valid answer. Returns false once the item has a status.
inline bool answer_step(Rng& rng, sreview::Session& s, const sreview::PlanItem& item, double p_yes = 0.5,
                        std::int64_t ts = 0)
{
    using namespace sreview;
    auto node_id = pending_node(s, item.key);
    if (!node_id) return false;
    if (*node_id == kRootNode) {
        s = answer(s, item.key, *node_id, coin(rng, p_yes) ? Answer::yes() : Answer::no(), ts);
        return true;
    }
    auto node = node_for(item, *node_id);
    switch (node.answer_kind) {
    case AnswerKind::YesNo: s = answer(s, item.key, *node_id, coin(rng) ? Answer::yes() : Answer::no(), ts); break;
    case AnswerKind::Choice: {
        auto it = node.edges.begin();
        std::advance(it, static_cast<long>(pick(rng, node.edges.size())));
        s = answer(s, item.key, *node_id, Answer::choice(it->first), ts);
        break;
    }
    case AnswerKind::FreeText: s = answer(s, item.key, *node_id, Answer::text(words(rng, 1, 8)), ts); break;
    }
    return true;
}

/// Answers every item at random and completes the session.
inline sreview::Session complete_randomly(Rng& rng, sreview::Session s, double p_yes = 0.5)
{
    using namespace sreview;
    for (const auto& item : s.plan->items) {
        if (item.category == Category::Essential) {
            while (answer_step(rng, s, item, p_yes)) {}
        } else {
            s = mark_attribute(s, item.key, coin(rng));
        }
    }
    return complete(s);
}

} // namespace gen
