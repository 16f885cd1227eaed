#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sreview {

/// Lowercase, collapse whitespace, trim, strip terminal punctuation.
/// Two item texts that normalize equal are treated as the same criterion.
std::string normalize_text(std::string_view text);

/// Slug built from the first six words of `text` ("item" if nothing survives).
std::string slugify(std::string_view text);

/// True for non-empty strings over [a-z0-9-].
bool is_slug(std::string_view s);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool starts_with_ci(std::string_view s, std::string_view prefix);

/// Compares dotted version strings numerically segment by segment; returns <0, 0, >0.
int compare_versions(std::string_view a, std::string_view b);

// FNV-1a, 64-bit. Stable across platforms; used for content ids and export hashes.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

} // namespace sreview
