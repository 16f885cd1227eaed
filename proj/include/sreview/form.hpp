#pragma once

#include "sreview/standards.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace sreview {

struct MethodDeclaration {
    std::vector<std::string> method_ids;
    std::vector<std::string> supplement_ids;

    bool operator==(const MethodDeclaration&) const = default;
};

struct Provenance {
    std::string standard_id;
    std::string item_id;

    bool operator==(const Provenance&) const = default;
};

/// Provenance standard id used for triager-authored items.
inline constexpr std::string_view kAdhocSource = "adhoc";

struct FormItem {
    std::string key;
    std::string text;
    Category category = Category::Essential;
    std::vector<Provenance> provenance;
    std::optional<std::string> followup_tree_ref;
    bool adhoc = false;

    bool operator==(const FormItem&) const = default;
};

struct SourceStandard {
    std::string id;
    std::string version;

    bool operator==(const SourceStandard&) const = default;
};

struct ReviewForm {
    std::string form_id;
    std::vector<FormItem> items;
    std::vector<SourceStandard> source_standards;

    const FormItem* find(std::string_view key) const;
    bool operator==(const ReviewForm&) const = default;
};

struct ChecklistEntry {
    std::string key;
    std::string text;
    Category category = Category::Essential;

    bool operator==(const ChecklistEntry&) const = default;
};

struct AuthorChecklist {
    std::string form_id;
    std::vector<ChecklistEntry> entries;

    bool operator==(const AuthorChecklist&) const = default;
};

/// Checks ids resolve, kinds match their list, and lists carry no duplicates.
void check_declaration(const MethodDeclaration& decl, const Registry& r);

/// [General] + methods (declaration order) + supplements (declaration order).
std::vector<const Standard*> resolve_standards(const MethodDeclaration& decl, const Registry& r);

ReviewForm compose_form(const MethodDeclaration& decl, const Registry& r);

/// Same as compose_form, with triager-authored essential items appended after
/// the supplements. Each ad-hoc item is flagged and evaluated with the default tree.
ReviewForm compose_form(const MethodDeclaration& decl, const Registry& r,
                        const std::vector<std::string>& adhoc_items);

AuthorChecklist author_checklist(const ReviewForm& form);

/// Line-oriented export: `key | category | text | provenance-list`.
std::string export_form_text(const ReviewForm& form);
nlohmann::ordered_json form_to_json(const ReviewForm& form);
ReviewForm form_from_json(const nlohmann::json& j);
nlohmann::ordered_json checklist_to_json(const AuthorChecklist& c);
std::string export_checklist_text(const AuthorChecklist& c);

nlohmann::ordered_json declaration_to_json(const MethodDeclaration& d);
MethodDeclaration declaration_from_json(const nlohmann::json& j);

} // namespace sreview
