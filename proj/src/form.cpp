#include "sreview/form.hpp"

#include "sreview/error.hpp"
#include "sreview/text.hpp"

#include <set>
#include <sstream>
#include <unordered_map>

namespace sreview {

const FormItem* ReviewForm::find(std::string_view key) const
{
    for (const auto& item : items)
        if (item.key == key) return &item;
    return nullptr;
}

void check_declaration(const MethodDeclaration& decl, const Registry& r)
{
    auto check = [&](const std::vector<std::string>& ids, StandardKind expected) {
        std::set<std::string> seen;
        for (const auto& id : ids) {
            if (!seen.insert(id).second)
                throw Error(ErrorCode::InvalidDeclaration, "'" + id + "' is declared twice");
            const auto& s = r.get(id);
            if (s.kind != expected)
                throw Error(ErrorCode::WrongStandardKind,
                            "'" + id + "' is a " + std::string(to_string(s.kind)) + " standard, not " +
                                std::string(to_string(expected)));
        }
    };
    check(decl.method_ids, StandardKind::MethodSpecific);
    check(decl.supplement_ids, StandardKind::Supplement);
}

std::vector<const Standard*> resolve_standards(const MethodDeclaration& decl, const Registry& r)
{
    check_declaration(decl, r);
    std::vector<const Standard*> out{&r.general()};
    for (const auto& id : decl.method_ids) out.push_back(&r.get(id));
    for (const auto& id : decl.supplement_ids) out.push_back(&r.get(id));
    return out;
}

namespace {

class Composer {
public:
    void add(const std::string& source, const AttributeItem& item, bool adhoc)
    {
        auto norm = normalize_text(item.text);
        if (auto it = by_text_.find(norm); it != by_text_.end()) {
            merge(form_.items[it->second], source, item);
            return;
        }
        if (item.anchored) {
            if (auto it = by_anchor_.find(item.item_id); it != by_anchor_.end()) {
                const auto& prev = form_.items[it->second];
                throw Error(ErrorCode::TextConflict, "anchor '" + item.item_id + "' in '" + source +
                                                         "' names a different criterion than " + prev.key);
            }
        }
        FormItem fi;
        fi.key = source + "/" + item.item_id;
        fi.text = item.text;
        fi.category = item.category;
        fi.provenance.push_back({source, item.item_id});
        fi.followup_tree_ref = item.followup_tree_ref;
        fi.adhoc = adhoc;
        if (form_.find(fi.key)) throw Error(ErrorCode::InvalidDeclaration, "item key '" + fi.key + "' is not unique");
        by_text_[norm] = form_.items.size();
        if (item.anchored) by_anchor_[item.item_id] = form_.items.size();
        form_.items.push_back(std::move(fi));
    }

    ReviewForm finish(std::vector<SourceStandard> sources)
    {
        form_.source_standards = std::move(sources);
        form_.form_id.clear();
        form_.form_id = "form-" + hex64(fnv1a64(export_form_text(form_)));
        return std::move(form_);
    }

private:
    ReviewForm form_;
    std::unordered_map<std::string, std::size_t> by_text_;
    std::unordered_map<std::string, std::size_t> by_anchor_;

    static void merge(FormItem& existing, const std::string& source, const AttributeItem& item)
    {
        if (existing.category != item.category)
            throw Error(ErrorCode::CategoryConflict, "'" + item.text + "' is " + std::string(to_string(existing.category)) +
                                                         " in " + existing.provenance.front().standard_id + " but " +
                                                         std::string(to_string(item.category)) + " in " + source);
        if (existing.followup_tree_ref != item.followup_tree_ref)
            throw Error(ErrorCode::TreeConflict, "'" + item.text + "' has different follow-up trees in " +
                                                     existing.provenance.front().standard_id + " and " + source);
        existing.provenance.push_back({source, item.item_id});
    }
};

std::string escape_field(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '|' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

} // namespace

ReviewForm compose_form(const MethodDeclaration& decl, const Registry& r)
{
    return compose_form(decl, r, {});
}

ReviewForm compose_form(const MethodDeclaration& decl, const Registry& r, const std::vector<std::string>& adhoc_items)
{
    Composer composer;
    std::vector<SourceStandard> sources;
    for (const auto* s : resolve_standards(decl, r)) {
        sources.push_back({s->id, s->version});
        for (const auto& item : s->attributes) composer.add(s->id, item, false);
    }
    for (const auto& text : adhoc_items) {
        AttributeItem item;
        item.text = trim(text);
        if (item.text.empty()) throw Error(ErrorCode::InvalidDeclaration, "ad-hoc item has no text");
        item.item_id = slugify(item.text);
        item.category = Category::Essential;
        composer.add(std::string(kAdhocSource), item, true);
    }
    return composer.finish(std::move(sources));
}

AuthorChecklist author_checklist(const ReviewForm& form)
{
    AuthorChecklist c;
    c.form_id = form.form_id;
    for (const auto& item : form.items) c.entries.push_back({item.key, item.text, item.category});
    return c;
}

std::string export_form_text(const ReviewForm& form)
{
    std::ostringstream out;
    out << "sreview-form 1\n";
    out << "form: " << form.form_id << "\n";
    for (const auto& s : form.source_standards) out << "source: " << s.id << "@" << s.version << "\n";
    for (const auto& item : form.items) {
        out << item.key << " | " << to_string(item.category) << " | " << escape_field(item.text) << " | ";
        for (std::size_t i = 0; i < item.provenance.size(); ++i)
            out << (i ? "," : "") << item.provenance[i].standard_id << "/" << item.provenance[i].item_id;
        if (item.followup_tree_ref) out << " | tree=" << *item.followup_tree_ref;
        if (item.adhoc) out << " | adhoc";
        out << "\n";
    }
    return out.str();
}

nlohmann::ordered_json form_to_json(const ReviewForm& form)
{
    nlohmann::ordered_json j;
    j["form_id"] = form.form_id;
    j["source_standards"] = nlohmann::ordered_json::array();
    for (const auto& s : form.source_standards) j["source_standards"].push_back({{"id", s.id}, {"version", s.version}});
    j["items"] = nlohmann::ordered_json::array();
    for (const auto& item : form.items) {
        nlohmann::ordered_json ji;
        ji["key"] = item.key;
        ji["category"] = to_string(item.category);
        ji["text"] = item.text;
        ji["provenance"] = nlohmann::ordered_json::array();
        for (const auto& p : item.provenance)
            ji["provenance"].push_back({{"standard_id", p.standard_id}, {"item_id", p.item_id}});
        if (item.followup_tree_ref) ji["followup_tree_ref"] = *item.followup_tree_ref;
        else ji["followup_tree_ref"] = nullptr;
        ji["adhoc"] = item.adhoc;
        j["items"].push_back(std::move(ji));
    }
    return j;
}

ReviewForm form_from_json(const nlohmann::json& j)
{
    ReviewForm f;
    f.form_id = j.at("form_id").get<std::string>();
    for (const auto& s : j.at("source_standards"))
        f.source_standards.push_back({s.at("id").get<std::string>(), s.at("version").get<std::string>()});
    for (const auto& ji : j.at("items")) {
        FormItem item;
        item.key = ji.at("key").get<std::string>();
        item.category = parse_category(ji.at("category").get<std::string>());
        item.text = ji.at("text").get<std::string>();
        for (const auto& p : ji.at("provenance"))
            item.provenance.push_back({p.at("standard_id").get<std::string>(), p.at("item_id").get<std::string>()});
        if (ji.contains("followup_tree_ref") && !ji["followup_tree_ref"].is_null())
            item.followup_tree_ref = ji["followup_tree_ref"].get<std::string>();
        item.adhoc = ji.value("adhoc", false);
        f.items.push_back(std::move(item));
    }
    return f;
}

nlohmann::ordered_json checklist_to_json(const AuthorChecklist& c)
{
    nlohmann::ordered_json j;
    j["form_id"] = c.form_id;
    j["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : c.entries)
        j["entries"].push_back({{"key", e.key}, {"category", to_string(e.category)}, {"text", e.text}});
    return j;
}

std::string export_checklist_text(const AuthorChecklist& c)
{
    std::ostringstream out;
    out << "Pre-submission checklist (" << c.form_id << ")\n";
    std::optional<Category> current;
    for (const auto& e : c.entries) {
        if (current != e.category) {
            current = e.category;
            out << "\n" << to_string(e.category) << "\n";
        }
        out << "- [ ] " << e.text << "  (" << e.key << ")\n";
    }
    return out.str();
}

nlohmann::ordered_json declaration_to_json(const MethodDeclaration& d)
{
    return {{"methods", d.method_ids}, {"supplements", d.supplement_ids}};
}

MethodDeclaration declaration_from_json(const nlohmann::json& j)
{
    MethodDeclaration d;
    if (j.contains("methods")) d.method_ids = j["methods"].get<std::vector<std::string>>();
    if (j.contains("supplements")) d.supplement_ids = j["supplements"].get<std::vector<std::string>>();
    return d;
}

} // namespace sreview
