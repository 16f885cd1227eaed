#pragma once

#include "sreview/followup.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sreview {

enum class StandardKind { General, MethodSpecific, Supplement };
enum class Category { Essential, Desirable, Extraordinary };

std::string_view to_string(StandardKind k);
std::string_view to_string(Category c);
StandardKind parse_standard_kind(std::string_view s);
Category parse_category(std::string_view s);

struct AttributeItem {
    std::string item_id;
    std::string text;
    Category category = Category::Essential;
    std::vector<std::string> tags;
    std::optional<std::string> followup_tree_ref;
    bool anchored = false; // item_id came from an explicit <!-- id: ... --> anchor

    bool operator==(const AttributeItem&) const = default;
};

struct Standard {
    std::string id;
    std::string name;
    StandardKind kind = StandardKind::MethodSpecific;
    std::string version = "1";
    std::string definition;
    std::string application;
    std::vector<AttributeItem> attributes;
    std::vector<std::string> quality_criteria;
    std::vector<std::string> acceptable_deviations;
    std::vector<std::string> antipatterns;
    std::vector<std::string> invalid_criticisms;
    std::vector<std::string> suggested_readings;
    std::vector<std::string> exemplars;
    std::string notes;
    // Front-matter only; seeded into venue triage for the General Standard.
    std::vector<std::string> initial_checks;

    const AttributeItem* find_item(std::string_view item_id) const;
    std::size_t count(Category c) const;
    bool operator==(const Standard&) const = default;
};

struct Registry {
    std::map<std::string, Standard> standards;
    std::string general_id;
    TreeCatalog trees;

    const Standard& get(const std::string& id) const; // throws UnknownStandardId
    const Standard* find(const std::string& id) const;
    const Standard& general() const { return get(general_id); }

    /// Adds a standard; throws DuplicateStandardId.
    void add(Standard s);
};

struct Diagnostic {
    std::string field;
    std::string rule;

    bool operator==(const Diagnostic&) const = default;
};

Standard parse_standard(std::string_view text);
std::vector<Diagnostic> validate_standard(const Standard& s, const Registry& r);
std::string serialize_standard(const Standard& s);

/// Registry-wide checks: exactly one General standard, every standard valid.
std::vector<Diagnostic> validate_registry(const Registry& r);

/// Loads `registry.toml` plus every `*.md` in `dir` and every `trees/*.tree`.
Registry load_registry(const std::filesystem::path& dir);

} // namespace sreview
