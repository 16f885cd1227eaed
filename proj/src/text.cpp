#include "sreview/text.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

namespace sreview {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_terminal_punct(char c)
{
    return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
}

} // namespace

std::string trim(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

bool starts_with_ci(std::string_view s, std::string_view prefix)
{
    if (s.size() < prefix.size()) return false;
    return to_lower(s.substr(0, prefix.size())) == to_lower(prefix);
}

std::string normalize_text(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    while (!out.empty() && (is_terminal_punct(out.back()) || is_space(out.back()))) out.pop_back();
    return out;
}

std::string slugify(std::string_view text)
{
    std::istringstream words{std::string(text)};
    std::string word, slug;
    for (int taken = 0; taken < 6 && words >> word; ++taken) {
        std::string clean;
        for (char c : word) {
            auto uc = static_cast<unsigned char>(c);
            if (std::isalnum(uc) && uc < 0x80) clean.push_back(static_cast<char>(std::tolower(uc)));
        }
        if (clean.empty()) continue;
        if (!slug.empty()) slug.push_back('-');
        slug += clean;
    }
    return slug.empty() ? "item" : slug;
}

bool is_slug(std::string_view s)
{
    if (s.empty()) return false;
    for (char c : s) {
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-')) return false;
    }
    return true;
}

int compare_versions(std::string_view a, std::string_view b)
{
    auto pa = split(a, '.');
    auto pb = split(b, '.');
    const std::size_t n = std::max(pa.size(), pb.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::string sa = i < pa.size() ? pa[i] : "0";
        std::string sb = i < pb.size() ? pb[i] : "0";
        bool na = !sa.empty() && sa.find_first_not_of("0123456789") == std::string::npos;
        bool nb = !sb.empty() && sb.find_first_not_of("0123456789") == std::string::npos;
        if (na && nb) {
            // compare as numbers without overflow: strip leading zeros, then length, then lexically
            auto strip = [](const std::string& x) {
                auto p = x.find_first_not_of('0');
                return p == std::string::npos ? std::string("0") : x.substr(p);
            };
            sa = strip(sa);
            sb = strip(sb);
            if (sa.size() != sb.size()) return sa.size() < sb.size() ? -1 : 1;
        }
        if (sa != sb) return sa < sb ? -1 : 1;
    }
    return 0;
}

std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace sreview
