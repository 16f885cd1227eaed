#include "sreview/followup.hpp"

#include "sreview/error.hpp"
#include "sreview/text.hpp"

#include <functional>
#include <set>
#include <sstream>

namespace sreview {

std::string_view to_string(VenueKind k)
{
    return k == VenueKind::Journal ? "journal" : "conference";
}

std::string_view to_string(Status s)
{
    switch (s) {
    case Status::Met: return "Met";
    case Status::JustifiedDeviation: return "JustifiedDeviation";
    case Status::FixableMinor: return "FixableMinor";
    case Status::FixableRevision: return "FixableRevision";
    case Status::Fatal: return "Fatal";
    }
    return "Met";
}

std::string_view to_string(AnswerKind k)
{
    switch (k) {
    case AnswerKind::YesNo: return "yes-no";
    case AnswerKind::Choice: return "choice";
    case AnswerKind::FreeText: return "free-text";
    }
    return "yes-no";
}

VenueKind parse_venue_kind(std::string_view s)
{
    auto v = to_lower(trim(s));
    if (v == "journal") return VenueKind::Journal;
    if (v == "conference") return VenueKind::Conference;
    throw Error(ErrorCode::InvalidConfig, "unknown venue kind '" + std::string(s) + "'");
}

Status parse_status(std::string_view s)
{
    auto v = trim(s);
    for (Status st : kAllStatuses) {
        if (to_lower(to_string(st)) == to_lower(v)) return st;
    }
    throw Error(ErrorCode::InvalidRequest, "unknown item status '" + v + "'");
}

AnswerKind parse_answer_kind(std::string_view s)
{
    auto v = to_lower(trim(s));
    if (v == "yes-no" || v == "yesno" || v == "yes_no") return AnswerKind::YesNo;
    if (v == "choice") return AnswerKind::Choice;
    if (v == "free-text" || v == "freetext" || v == "free_text" || v == "text") return AnswerKind::FreeText;
    throw Error(ErrorCode::WrongAnswerKind, "unknown answer kind '" + v + "'");
}

const FollowUpNode& FollowUpTree::node(const std::string& id) const
{
    auto it = nodes.find(id);
    if (it == nodes.end()) throw Error(ErrorCode::InvalidTree, "tree '" + tree_id + "' has no node '" + id + "'");
    return it->second;
}

namespace {

FollowUpNode question(std::string id, std::string prompt, std::string yes, std::string no)
{
    FollowUpNode n;
    n.node_id = std::move(id);
    n.prompt = std::move(prompt);
    n.answer_kind = AnswerKind::YesNo;
    n.edges = {{"yes", std::move(yes)}, {"no", std::move(no)}};
    return n;
}

FollowUpNode capture(std::string id, std::string prompt, std::string next)
{
    FollowUpNode n;
    n.node_id = std::move(id);
    n.prompt = std::move(prompt);
    n.answer_kind = AnswerKind::FreeText;
    n.capture_text = true;
    n.edges = {{std::string(kNextEdge), std::move(next)}};
    return n;
}

FollowUpNode leaf(std::string id, Status s)
{
    FollowUpNode n;
    n.node_id = std::move(id);
    n.leaf_status = s;
    return n;
}

} // namespace

FollowUpTree default_tree(VenueKind venue_kind)
{
    FollowUpTree t;
    t.root = "justified";
    auto put = [&t](FollowUpNode n) { t.nodes.emplace(n.node_id, std::move(n)); };

    put(question("justified", "Is this deviation justified in the context of this study?",
                 "justified-deviation", "camera-ready"));
    put(leaf("justified-deviation", Status::JustifiedDeviation));
    put(leaf("fixable-minor", Status::FixableMinor));
    put(leaf("fatal", Status::Fatal));

    if (venue_kind == VenueKind::Journal) {
        t.tree_id = "default-journal";
        put(question("camera-ready", "Would this problem be easy to fix in the camera-ready copy?",
                     "fixable-minor", "recollect"));
        put(question("recollect", "Can this problem be fixed without repeating data collection?",
                     "revision-note", "fatal-reason"));
        put(capture("revision-note", "State exactly what is incorrect or missing.", "fixable-revision"));
        put(leaf("fixable-revision", Status::FixableRevision));
        put(capture("fatal-reason", "Explain why this problem cannot be fixed without repeating data collection.",
                    "fatal"));
    } else {
        t.tree_id = "default-conference";
        put(question("camera-ready", "Would this problem be easy to fix in the camera-ready copy?",
                     "fixable-minor", "fatal-reason"));
        put(capture("fatal-reason", "Explain why this problem cannot be fixed by modest editing.", "fatal"));
    }
    return t;
}

std::vector<std::string> check_tree(const FollowUpTree& tree)
{
    std::vector<std::string> problems;
    auto fail = [&](const std::string& where, const std::string& what) {
        problems.push_back(tree.tree_id + "/" + where + ": " + what);
    };

    if (!is_slug(tree.tree_id)) fail("id", "tree id must be a lowercase slug");
    for (const auto& [id, n] : tree.nodes) {
        if (id != n.node_id) fail(id, "node key does not match node_id");
        if (id == "root") fail(id, "'root' is reserved for the attribute question");
        if (n.is_leaf()) {
            if (!n.edges.empty()) fail(id, "leaf has outgoing edges");
            if (*n.leaf_status == Status::Met) fail(id, "Met is only reachable from the attribute question");
            continue;
        }
        if (n.edges.empty()) fail(id, "internal node has no edges and no leaf status");
        if (trim(n.prompt).empty()) fail(id, "internal node has no prompt");
        switch (n.answer_kind) {
        case AnswerKind::YesNo:
            if (n.edges.size() != 2 || !n.edges.count("yes") || !n.edges.count("no"))
                fail(id, "yes/no node needs exactly the edges 'yes' and 'no'");
            break;
        case AnswerKind::FreeText:
            if (n.edges.size() != 1 || !n.edges.count(std::string(kNextEdge)))
                fail(id, "free-text node needs exactly one 'next' edge");
            break;
        case AnswerKind::Choice:
            for (const auto& [label, _] : n.edges)
                if (trim(label).empty()) fail(id, "empty choice label");
            break;
        }
        for (const auto& [label, target] : n.edges)
            if (!tree.nodes.count(target)) fail(id, "edge '" + label + "' targets unknown node '" + target + "'");
    }
    if (!problems.empty()) return problems;

    auto root_it = tree.nodes.find(tree.root);
    if (root_it == tree.nodes.end()) {
        fail("root", "root node '" + tree.root + "' does not exist");
        return problems;
    }
    if (root_it->second.is_leaf()) fail("root", "root must be a question, not a leaf");

    // Cycle detection plus the capture rule: every path into a FixableRevision
    // or Fatal leaf must pass through a text-capturing node.
    std::set<std::string> on_stack, reached;
    bool cyclic = false;
    std::function<void(const std::string&, bool)> walk = [&](const std::string& id, bool captured) {
        if (cyclic) return;
        if (on_stack.count(id)) {
            cyclic = true;
            fail(id, "cycle detected");
            return;
        }
        reached.insert(id);
        const auto& n = tree.nodes.at(id);
        if (n.is_leaf()) {
            auto s = *n.leaf_status;
            if ((s == Status::FixableRevision || s == Status::Fatal) && !captured)
                fail(id, "path reaches " + std::string(to_string(s)) + " without a text capture");
            return;
        }
        on_stack.insert(id);
        for (const auto& [_, target] : n.edges) walk(target, captured || n.capture_text);
        on_stack.erase(id);
    };
    walk(tree.root, false);
    if (!cyclic) {
        for (const auto& [id, _] : tree.nodes)
            if (!reached.count(id)) fail(id, "unreachable from root");
    }
    return problems;
}

FollowUpTree parse_tree(std::string_view text)
{
    FollowUpTree tree;
    FollowUpNode* current = nullptr;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    auto bad = [&](const std::string& what) {
        return Error(ErrorCode::InvalidTree, "line " + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw bad("unterminated section header");
            auto id = trim(std::string_view(line).substr(1, line.size() - 2));
            if (id.empty()) throw bad("empty node id");
            auto [it, inserted] = tree.nodes.try_emplace(id);
            if (!inserted) throw bad("duplicate node '" + id + "'");
            current = &it->second;
            current->node_id = id;
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw bad("expected 'key = value'");
        auto key = trim(std::string_view(line).substr(0, eq));
        auto value = trim(std::string_view(line).substr(eq + 1));

        if (!current) {
            if (key == "id") tree.tree_id = value;
            else if (key == "root") tree.root = value;
            else throw bad("unknown header key '" + key + "'");
            continue;
        }
        if (key == "kind") {
            try {
                current->answer_kind = parse_answer_kind(value);
            } catch (const Error&) {
                throw bad("unknown node kind '" + value + "'");
            }
        } else if (key == "prompt") {
            current->prompt = value;
        } else if (key == "capture") {
            current->capture_text = (to_lower(value) == "true" || value == "1");
        } else if (key == "leaf") {
            try {
                current->leaf_status = parse_status(value);
            } catch (const Error&) {
                throw bad("unknown leaf status '" + value + "'");
            }
        } else if (key == "next") {
            current->edges[std::string(kNextEdge)] = value;
        } else if (key.rfind("on ", 0) == 0) {
            auto label = trim(std::string_view(key).substr(3));
            if (label.empty()) throw bad("empty answer label");
            current->edges[label] = value;
        } else {
            throw bad("unknown node key '" + key + "'");
        }
    }

    if (tree.tree_id.empty()) throw Error(ErrorCode::InvalidTree, "tree has no id");
    auto problems = check_tree(tree);
    if (!problems.empty()) throw Error(ErrorCode::InvalidTree, problems.front());
    return tree;
}

std::string serialize_tree(const FollowUpTree& tree)
{
    std::ostringstream out;
    out << "id = " << tree.tree_id << "\n";
    out << "root = " << tree.root << "\n";
    for (const auto& [id, n] : tree.nodes) {
        out << "\n[" << id << "]\n";
        if (n.is_leaf()) {
            out << "leaf = " << to_string(*n.leaf_status) << "\n";
            continue;
        }
        out << "kind = " << to_string(n.answer_kind) << "\n";
        out << "prompt = " << n.prompt << "\n";
        if (n.capture_text) out << "capture = true\n";
        for (const auto& [label, target] : n.edges) {
            if (n.answer_kind == AnswerKind::FreeText) out << "next = " << target << "\n";
            else out << "on " << label << " = " << target << "\n";
        }
    }
    return out.str();
}

} // namespace sreview
