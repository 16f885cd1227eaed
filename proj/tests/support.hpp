#pragma once

#include "sreview/form.hpp"
#include "sreview/session.hpp"
#include "sreview/standards.hpp"

#include <string>
#include <vector>

namespace support {

inline const std::string kFixtures = SREVIEW_FIXTURE_DIR;
inline const std::string kConfig = SREVIEW_CONFIG_DIR;

inline const sreview::Registry& fixtures()
{
    static const sreview::Registry r = sreview::load_registry(kFixtures);
    return r;
}

/// Walks an essential item from its root, answering each pending node in turn.
inline sreview::Session walk(sreview::Session s, const std::string& key, const std::vector<sreview::Answer>& answers)
{
    for (const auto& a : answers) {
        auto node = sreview::pending_node(s, key);
        if (!node) throw std::logic_error("item " + key + " already has a status");
        s = sreview::answer(s, key, *node, a);
    }
    return s;
}

/// Answers yes to every essential item and marks every other item.
inline sreview::Session all_yes(sreview::Session s, bool present = false)
{
    for (const auto& item : s.plan->items) {
        if (item.category == sreview::Category::Essential) s = sreview::answer(s, item.key, "root", sreview::Answer::yes());
        else s = sreview::mark_attribute(s, item.key, present);
    }
    return s;
}

/// A form built from plain texts: essential items first, then desirable ones.
inline sreview::ReviewForm toy_form(const std::vector<std::string>& essential, const std::vector<std::string>& desirable = {})
{
    sreview::Registry r;
    sreview::Standard g;
    g.id = "general";
    g.name = "General";
    g.kind = sreview::StandardKind::General;
    for (const auto& t : essential) g.attributes.push_back({"", t, sreview::Category::Essential, {}, {}, false});
    for (const auto& t : desirable) g.attributes.push_back({"", t, sreview::Category::Desirable, {}, {}, false});
    for (std::size_t i = 0; i < g.attributes.size(); ++i) g.attributes[i].item_id = "i" + std::to_string(i + 1);
    r.general_id = "general";
    r.add(g);
    return sreview::compose_form({}, r);
}

} // namespace support
