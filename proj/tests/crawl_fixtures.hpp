#pragma once

#include <string>

#include "linkmap/fetch.hpp"

namespace linkmap::testing {

inline std::string page_url(const std::string& domain, int i) {
    return i == 0 ? "https://" + domain + "/" : "https://" + domain + "/p" + std::to_string(i);
}

inline std::string anchor(const std::string& href) { return "<a href=\"" + href + "\">link</a>\n"; }

/// root -> p1 -> ... -> p(n-1), each page linking only to the next.
inline void add_chain_site(FixtureFetcher& f, const std::string& domain, int n) {
    for (int i = 0; i < n; ++i) {
        std::string html = "<html><body>";
        if (i + 1 < n) html += anchor("/p" + std::to_string(i + 1));
        f.add_page(page_url(domain, i), html + "</body></html>");
    }
}

/// root <-> p1.
inline void add_cycle_site(FixtureFetcher& f, const std::string& domain) {
    f.add_page(page_url(domain, 0), anchor("/p1"));
    f.add_page(page_url(domain, 1), anchor("/") + anchor(page_url(domain, 0)));
}

/// Every page links to every other page plus one external site each.
inline void add_mesh_site(FixtureFetcher& f, const std::string& domain, int n) {
    for (int i = 0; i < n; ++i) {
        std::string html;
        for (int j = 0; j < n; ++j)
            if (j != i) html += anchor(page_url(domain, j));
        html += anchor("https://ext" + std::to_string(i) + ".org/from-" + std::to_string(i));
        f.add_page(page_url(domain, i), html);
    }
}

} // namespace linkmap::testing
