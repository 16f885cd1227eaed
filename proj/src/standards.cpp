#include "sreview/standards.hpp"

#include "sreview/error.hpp"
#include "sreview/text.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace sreview {

std::string_view to_string(StandardKind k)
{
    switch (k) {
    case StandardKind::General: return "general";
    case StandardKind::MethodSpecific: return "method-specific";
    case StandardKind::Supplement: return "supplement";
    }
    return "general";
}

std::string_view to_string(Category c)
{
    switch (c) {
    case Category::Essential: return "Essential";
    case Category::Desirable: return "Desirable";
    case Category::Extraordinary: return "Extraordinary";
    }
    return "Essential";
}

StandardKind parse_standard_kind(std::string_view s)
{
    auto v = to_lower(trim(s));
    v.erase(std::remove(v.begin(), v.end(), '-'), v.end());
    v.erase(std::remove(v.begin(), v.end(), '_'), v.end());
    if (v == "general") return StandardKind::General;
    if (v == "methodspecific" || v == "method") return StandardKind::MethodSpecific;
    if (v == "supplement") return StandardKind::Supplement;
    throw Error(ErrorCode::MalformedDocument, "unknown standard kind '" + std::string(s) + "'");
}

Category parse_category(std::string_view s)
{
    auto v = to_lower(trim(s));
    if (v == "essential") return Category::Essential;
    if (v == "desirable") return Category::Desirable;
    if (v == "extraordinary") return Category::Extraordinary;
    throw Error(ErrorCode::UnknownCategoryHeading, "'" + std::string(s) + "' is not Essential, Desirable or Extraordinary");
}

const AttributeItem* Standard::find_item(std::string_view item_id) const
{
    for (const auto& a : attributes)
        if (a.item_id == item_id) return &a;
    return nullptr;
}

std::size_t Standard::count(Category c) const
{
    return static_cast<std::size_t>(
        std::count_if(attributes.begin(), attributes.end(), [c](const auto& a) { return a.category == c; }));
}

const Standard* Registry::find(const std::string& id) const
{
    auto it = standards.find(id);
    return it == standards.end() ? nullptr : &it->second;
}

const Standard& Registry::get(const std::string& id) const
{
    if (const auto* s = find(id)) return *s;
    throw Error(ErrorCode::UnknownStandardId, "no standard with id '" + id + "'");
}

void Registry::add(Standard s)
{
    auto id = s.id;
    if (!standards.emplace(id, std::move(s)).second)
        throw Error(ErrorCode::DuplicateStandardId, "standard '" + id + "' is defined twice");
}

namespace {

enum class Section {
    Definition,
    Application,
    SpecificAttributes,
    QualityCriteria,
    Deviations,
    Antipatterns,
    InvalidCriticisms,
    SuggestedReadings,
    Exemplars,
    Notes,
};

struct SectionName {
    Section section;
    std::string_view heading;
};

constexpr SectionName kSections[] = {
    {Section::Application, "Application"},
    {Section::SpecificAttributes, "Specific Attributes"},
    {Section::QualityCriteria, "General Quality Criteria"},
    {Section::Deviations, "Examples of Acceptable Deviations"},
    {Section::Antipatterns, "Antipatterns"},
    {Section::InvalidCriticisms, "Invalid Criticisms"},
    {Section::SuggestedReadings, "Suggested Readings"},
    {Section::Exemplars, "Exemplars"},
    {Section::Notes, "Notes"},
};

bool is_text_section(Section s)
{
    return s == Section::Definition || s == Section::Application || s == Section::Notes;
}

struct Anchor {
    std::optional<std::string> id;
    std::vector<std::string> tags;
};

bool is_comment(const std::string& line)
{
    return line.rfind("<!--", 0) == 0 && line.size() >= 7 && line.compare(line.size() - 3, 3, "-->") == 0;
}

std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    for (auto& part : split(s, ',')) {
        auto t = trim(part);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

Anchor parse_anchor(const std::string& line, int line_no)
{
    Anchor a;
    auto body = std::string_view(line).substr(4, line.size() - 7);
    for (auto& field : split(body, ';')) {
        auto f = trim(field);
        if (f.empty()) continue;
        auto colon = f.find(':');
        if (colon == std::string::npos)
            throw Error(ErrorCode::MalformedDocument, "line " + std::to_string(line_no) + ": anchor field '" + f + "' has no ':'");
        auto key = to_lower(trim(std::string_view(f).substr(0, colon)));
        auto value = trim(std::string_view(f).substr(colon + 1));
        if (key == "id") {
            if (!is_slug(value))
                throw Error(ErrorCode::MalformedDocument, "line " + std::to_string(line_no) + ": anchor id '" + value + "' is not a slug");
            a.id = value;
        } else if (key == "tags") {
            a.tags = split_list(value);
        } else {
            throw Error(ErrorCode::MalformedDocument, "line " + std::to_string(line_no) + ": unknown anchor field '" + key + "'");
        }
    }
    return a;
}

// "- [ ] text", "- [x] text", "- text" (also with '*'). Returns nullopt if not a list line.
std::optional<std::string> list_item_text(const std::string& line, bool checkbox)
{
    if (line.size() < 2 || (line[0] != '-' && line[0] != '*') || line[1] != ' ') return std::nullopt;
    auto rest = trim(std::string_view(line).substr(2));
    if (checkbox && rest.size() >= 3 && rest[0] == '[' && rest[2] == ']' &&
        (rest[1] == ' ' || rest[1] == 'x' || rest[1] == 'X'))
        rest = trim(std::string_view(rest).substr(3));
    return rest;
}

std::string join_paragraphs(const std::vector<std::string>& lines)
{
    std::string out, para;
    auto flush = [&] {
        if (para.empty()) return;
        if (!out.empty()) out += "\n\n";
        out += para;
        para.clear();
    };
    for (const auto& l : lines) {
        auto t = trim(l);
        if (t.empty()) {
            flush();
            continue;
        }
        if (!para.empty()) para += ' ';
        para += t;
    }
    flush();
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text)
    {
        std::string normalized;
        normalized.reserve(text.size());
        for (char c : text)
            if (c != '\r') normalized.push_back(c);
        std::istringstream in(normalized);
        std::string line;
        while (std::getline(in, line)) lines_.push_back(line);
    }

    Standard run()
    {
        bool any = std::any_of(lines_.begin(), lines_.end(), [](const auto& l) { return !trim(l).empty(); });
        if (!any) throw Error(ErrorCode::EmptyDocument, "document is empty");

        skip_blank();
        if (pos_ < lines_.size() && trim(lines_[pos_]) == "---") front_matter();
        skip_blank();
        if (pos_ >= lines_.size() || lines_[pos_].rfind("# ", 0) != 0)
            throw bad("expected '# <Name>' title line");
        std::string title = trim(std::string_view(lines_[pos_]).substr(2));
        if (title.empty()) throw bad("empty title");
        s_.name = title;
        ++pos_;
        body();
        finish();
        return std::move(s_);
    }

private:
    std::vector<std::string> lines_;
    std::size_t pos_ = 0;
    Standard s_;
    bool has_id_ = false;
    std::vector<std::pair<std::string, std::string>> followups_;

    Error bad(const std::string& what) const
    {
        return Error(ErrorCode::MalformedDocument, "line " + std::to_string(pos_ + 1) + ": " + what);
    }

    void skip_blank()
    {
        while (pos_ < lines_.size() && trim(lines_[pos_]).empty()) ++pos_;
    }

    void front_matter()
    {
        ++pos_;
        for (; pos_ < lines_.size(); ++pos_) {
            auto line = trim(lines_[pos_]);
            if (line == "---") {
                ++pos_;
                return;
            }
            if (line.empty() || line[0] == '#') continue;
            auto colon = line.find(':');
            if (colon == std::string::npos) throw bad("front matter line needs 'key: value'");
            auto key = to_lower(trim(std::string_view(line).substr(0, colon)));
            auto value = trim(std::string_view(line).substr(colon + 1));
            if (key == "id") {
                s_.id = value;
                has_id_ = true;
            } else if (key == "kind") {
                s_.kind = parse_standard_kind(value);
            } else if (key == "version") {
                s_.version = value;
            } else if (key == "followup") {
                auto eq = value.find('=');
                if (eq == std::string::npos) throw bad("followup needs '<item-id> = <tree-id>'");
                followups_.emplace_back(trim(std::string_view(value).substr(0, eq)),
                                        trim(std::string_view(value).substr(eq + 1)));
            } else if (key == "initial_check") {
                s_.initial_checks.push_back(value);
            } else {
                throw bad("unknown front matter key '" + key + "'");
            }
        }
        throw Error(ErrorCode::MalformedDocument, "front matter is not closed with '---'");
    }

    std::vector<std::string>* list_for(Section s)
    {
        switch (s) {
        case Section::QualityCriteria: return &s_.quality_criteria;
        case Section::Deviations: return &s_.acceptable_deviations;
        case Section::Antipatterns: return &s_.antipatterns;
        case Section::InvalidCriticisms: return &s_.invalid_criticisms;
        case Section::SuggestedReadings: return &s_.suggested_readings;
        case Section::Exemplars: return &s_.exemplars;
        default: return nullptr;
        }
    }

    std::string* text_for(Section s)
    {
        switch (s) {
        case Section::Definition: return &s_.definition;
        case Section::Application: return &s_.application;
        case Section::Notes: return &s_.notes;
        default: return nullptr;
        }
    }

    void body()
    {
        Section section = Section::Definition;
        std::set<Section> seen;
        std::vector<std::string> text_lines;
        std::optional<Category> category;
        std::optional<Anchor> pending;
        std::string* continuation = nullptr; // last list entry, for wrapped lines

        auto close_section = [&] {
            if (pending) throw bad("anchor is not followed by an attribute item");
            if (is_text_section(section)) *text_for(section) = join_paragraphs(text_lines);
            text_lines.clear();
            category.reset();
            continuation = nullptr;
        };

        for (; pos_ < lines_.size(); ++pos_) {
            const std::string line = trim(lines_[pos_]);
            const bool indented = !lines_[pos_].empty() && (lines_[pos_][0] == ' ' || lines_[pos_][0] == '\t');

            if (line.rfind("# ", 0) == 0) throw bad("only one '# ' title is allowed");
            if (line.rfind("## ", 0) == 0) {
                close_section();
                auto heading = trim(std::string_view(line).substr(3));
                auto it = std::find_if(std::begin(kSections), std::end(kSections),
                                       [&](const SectionName& n) { return to_lower(n.heading) == to_lower(heading); });
                if (it == std::end(kSections)) throw bad("unknown section '" + heading + "'");
                if (!seen.insert(it->section).second) throw bad("section '" + heading + "' appears twice");
                section = it->section;
                continue;
            }
            if (line.rfind("### ", 0) == 0) {
                if (section != Section::SpecificAttributes) throw bad("'###' headings belong under Specific Attributes");
                if (pending) throw bad("anchor is not followed by an attribute item");
                auto heading = trim(std::string_view(line).substr(4));
                try {
                    category = parse_category(heading);
                } catch (const Error&) {
                    throw Error(ErrorCode::UnknownCategoryHeading,
                                "line " + std::to_string(pos_ + 1) + ": unknown category '" + heading + "'");
                }
                continuation = nullptr;
                continue;
            }

            if (is_text_section(section)) {
                text_lines.push_back(line);
                continue;
            }

            if (line.empty()) {
                continuation = nullptr;
                continue;
            }

            if (section == Section::SpecificAttributes) {
                if (is_comment(line)) {
                    if (pending) throw bad("two anchors in a row");
                    pending = parse_anchor(line, static_cast<int>(pos_ + 1));
                    continuation = nullptr;
                    continue;
                }
                auto text = list_item_text(line, true);
                if (!text) {
                    if (continuation && indented) {
                        *continuation += ' ' + line;
                        continue;
                    }
                    throw bad("expected '- [ ] <text>' attribute item");
                }
                if (!category) throw bad("attribute item before any category heading");
                if (text->empty()) throw bad("attribute item has no text");
                AttributeItem item;
                item.text = *text;
                item.category = *category;
                if (pending) {
                    item.tags = pending->tags;
                    if (pending->id) {
                        item.item_id = *pending->id;
                        item.anchored = true;
                    }
                    pending.reset();
                }
                s_.attributes.push_back(std::move(item));
                continuation = &s_.attributes.back().text;
                continue;
            }

            auto* list = list_for(section);
            auto text = list_item_text(line, false);
            if (!text) {
                if (continuation && indented) {
                    *continuation += ' ' + line;
                    continue;
                }
                throw bad("expected '- <text>' list entry");
            }
            list->push_back(*text);
            continuation = &list->back();
        }
        close_section();
        if (!seen.count(Section::SpecificAttributes) && s_.kind != StandardKind::Supplement)
            throw Error(ErrorCode::MissingSection, "'" + s_.name + "' has no 'Specific Attributes' section");
    }

    void finish()
    {
        if (!has_id_) s_.id = slugify(s_.name);

        // Derived ids are computed after continuation lines are folded in.
        std::set<std::string> ids;
        for (auto& item : s_.attributes) {
            if (!item.anchored) item.item_id = slugify(item.text);
            if (!ids.insert(item.item_id).second)
                throw Error(ErrorCode::DuplicateItemId, "item id '" + item.item_id + "' appears twice in '" + s_.id + "'");
        }
        for (const auto& [item_id, tree_id] : followups_) {
            auto it = std::find_if(s_.attributes.begin(), s_.attributes.end(),
                                   [&](const auto& a) { return a.item_id == item_id; });
            if (it == s_.attributes.end())
                throw Error(ErrorCode::MalformedDocument, "followup refers to unknown item '" + item_id + "'");
            it->followup_tree_ref = tree_id;
        }
    }
};

// A paragraph that would be re-read as markup cannot survive serialization.
bool representable_paragraphs(const std::string& text)
{
    if (text.empty()) return true;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find("\n\n", start);
        auto para = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
        if (para.empty() || para != trim(para) || para.find('\n') != std::string::npos) return false;
        if (para[0] == '#' || para.rfind("- ", 0) == 0 || para.rfind("* ", 0) == 0 || para == "---") return false;
        if (end == std::string::npos) break;
        start = end + 2;
    }
    return true;
}

bool representable_line(const std::string& text)
{
    return !text.empty() && text == trim(text) && text.find('\n') == std::string::npos;
}

} // namespace

Standard parse_standard(std::string_view text)
{
    return Parser(text).run();
}

std::vector<Diagnostic> validate_standard(const Standard& s, const Registry& r)
{
    std::vector<Diagnostic> out;
    auto diag = [&](std::string field, std::string rule) { out.push_back({std::move(field), std::move(rule)}); };

    if (s.id.empty()) diag("id", "must not be empty");
    else if (!is_slug(s.id)) diag("id", "must be a lowercase slug");
    if (!representable_line(s.name)) diag("name", "must be a non-empty single line");
    if (trim(s.version).empty()) diag("version", "must not be empty");

    if (s.kind != StandardKind::Supplement && s.count(Category::Essential) == 0)
        diag("attributes", "no essential attributes");
    if (s.kind == StandardKind::General && !r.general_id.empty() && s.id != r.general_id)
        diag("kind", "registry designates '" + r.general_id + "' as the General Standard");

    std::set<std::string> ids;
    const Standard* general = (r.general_id.empty() || s.id == r.general_id) ? nullptr : r.find(r.general_id);
    for (const auto& item : s.attributes) {
        const std::string field = "attributes[" + item.item_id + "]";
        if (!is_slug(item.item_id)) diag(field, "item id must be a lowercase slug");
        if (!ids.insert(item.item_id).second) diag(field, "duplicate item id");
        if (!representable_line(item.text)) diag(field, "text must be a non-empty single line");
        for (const auto& tag : item.tags)
            if (tag.empty() || tag.find_first_of(",;") != std::string::npos || tag.find("-->") != std::string::npos)
                diag(field, "tag '" + tag + "' is not representable");
        if (item.followup_tree_ref) {
            if (item.category != Category::Essential) diag(field, "only essential items carry follow-up trees");
            else if (!r.trees.count(*item.followup_tree_ref))
                diag(field, "unknown follow-up tree '" + *item.followup_tree_ref + "'");
        }
        if (general) {
            auto norm = normalize_text(item.text);
            for (const auto& g : general->attributes)
                if (normalize_text(g.text) == norm)
                    diag(field, "duplicates General Standard item '" + g.item_id + "'");
        }
    }

    if (!representable_paragraphs(s.definition)) diag("definition", "text is not representable as paragraphs");
    if (!representable_paragraphs(s.application)) diag("application", "text is not representable as paragraphs");
    if (!representable_paragraphs(s.notes)) diag("notes", "text is not representable as paragraphs");
    auto check_list = [&](const char* field, const std::vector<std::string>& list) {
        for (const auto& e : list)
            if (!representable_line(e)) diag(field, "entries must be non-empty single lines");
    };
    check_list("quality_criteria", s.quality_criteria);
    check_list("acceptable_deviations", s.acceptable_deviations);
    check_list("antipatterns", s.antipatterns);
    check_list("invalid_criticisms", s.invalid_criticisms);
    check_list("suggested_readings", s.suggested_readings);
    check_list("exemplars", s.exemplars);
    check_list("initial_checks", s.initial_checks);
    return out;
}

std::string serialize_standard(const Standard& s)
{
    std::ostringstream out;
    out << "---\n";
    out << "id: " << s.id << "\n";
    out << "kind: " << to_string(s.kind) << "\n";
    out << "version: " << s.version << "\n";
    for (const auto& item : s.attributes)
        if (item.followup_tree_ref) out << "followup: " << item.item_id << " = " << *item.followup_tree_ref << "\n";
    for (const auto& check : s.initial_checks) out << "initial_check: " << check << "\n";
    out << "---\n";
    out << "# " << s.name << "\n";
    if (!s.definition.empty()) out << "\n" << s.definition << "\n";

    auto text_section = [&](std::string_view heading, const std::string& text) {
        if (text.empty()) return;
        out << "\n## " << heading << "\n\n" << text << "\n";
    };
    auto list_section = [&](std::string_view heading, const std::vector<std::string>& list) {
        if (list.empty()) return;
        out << "\n## " << heading << "\n\n";
        for (const auto& e : list) out << "- " << e << "\n";
    };

    text_section("Application", s.application);

    if (s.kind != StandardKind::Supplement || !s.attributes.empty()) {
        out << "\n## Specific Attributes\n";
        std::optional<Category> current;
        for (const auto& item : s.attributes) {
            if (current != item.category) {
                current = item.category;
                out << "\n### " << to_string(item.category) << "\n\n";
            }
            std::vector<std::string> fields;
            if (item.anchored) fields.push_back("id: " + item.item_id);
            if (!item.tags.empty()) {
                std::string tags = "tags: ";
                for (std::size_t i = 0; i < item.tags.size(); ++i) tags += (i ? ", " : "") + item.tags[i];
                fields.push_back(tags);
            }
            if (!fields.empty()) {
                out << "<!-- ";
                for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "; " : "") << fields[i];
                out << " -->\n";
            }
            out << "- [ ] " << item.text << "\n";
        }
    }

    list_section("General Quality Criteria", s.quality_criteria);
    list_section("Examples of Acceptable Deviations", s.acceptable_deviations);
    list_section("Antipatterns", s.antipatterns);
    list_section("Invalid Criticisms", s.invalid_criticisms);
    list_section("Suggested Readings", s.suggested_readings);
    list_section("Exemplars", s.exemplars);
    text_section("Notes", s.notes);
    return out.str();
}

std::vector<Diagnostic> validate_registry(const Registry& r)
{
    std::vector<Diagnostic> out;
    std::size_t generals = 0;
    for (const auto& [id, s] : r.standards)
        if (s.kind == StandardKind::General) ++generals;
    if (generals != 1) out.push_back({"registry", "expected exactly one General standard, found " + std::to_string(generals)});
    if (r.general_id.empty()) out.push_back({"registry.general", "no General Standard designated"});
    else if (!r.find(r.general_id)) out.push_back({"registry.general", "designated General Standard '" + r.general_id + "' not found"});
    else if (r.general().kind != StandardKind::General)
        out.push_back({"registry.general", "'" + r.general_id + "' is not of kind general"});

    for (const auto& [id, tree] : r.trees)
        for (auto& p : check_tree(tree)) out.push_back({"trees[" + id + "]", p});
    for (const auto& [id, s] : r.standards)
        for (auto& d : validate_standard(s, r)) out.push_back({id + "." + d.field, d.rule});
    return out;
}

namespace {

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::StorageFailure, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> read_manifest(const std::filesystem::path& p)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(read_file(p));
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidConfig, p.string() + ": expected key = \"value\"");
        auto key = trim(std::string_view(t).substr(0, eq));
        auto value = trim(std::string_view(t).substr(eq + 1));
        if (value.size() < 2 || value.front() != '"' || value.back() != '"')
            throw Error(ErrorCode::InvalidConfig, p.string() + ": value of '" + key + "' must be quoted");
        kv[key] = value.substr(1, value.size() - 2);
    }
    return kv;
}

std::vector<std::filesystem::path> files_with_extension(const std::filesystem::path& dir, std::string_view ext)
{
    std::vector<std::filesystem::path> out;
    if (!std::filesystem::is_directory(dir)) return out;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

Registry load_registry(const std::filesystem::path& dir)
{
    auto manifest_path = dir / "registry.toml";
    if (!std::filesystem::exists(manifest_path))
        throw Error(ErrorCode::InvalidConfig, "missing manifest " + manifest_path.string());
    auto manifest = read_manifest(manifest_path);

    Registry r;
    r.general_id = manifest.count("general") ? manifest["general"] : "";
    auto trees_dir = dir / (manifest.count("trees") ? manifest["trees"] : "trees");

    for (const auto& p : files_with_extension(dir, ".md")) {
        try {
            r.add(parse_standard(read_file(p)));
        } catch (const Error& e) {
            throw Error(e.code(), p.filename().string() + ": " + e.what());
        }
    }
    for (const auto& p : files_with_extension(trees_dir, ".tree")) {
        FollowUpTree t;
        try {
            t = parse_tree(read_file(p));
        } catch (const Error& e) {
            throw Error(e.code(), p.filename().string() + ": " + e.what());
        }
        auto id = t.tree_id;
        if (!r.trees.emplace(id, std::move(t)).second)
            throw Error(ErrorCode::InvalidTree, "tree '" + id + "' is defined twice");
    }
    return r;
}

} // namespace sreview
