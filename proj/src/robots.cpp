#include "linkmap/robots.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

namespace linkmap {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string product_token(std::string_view user_agent) {
    auto end = user_agent.find_first_of("/ ");
    return lower(user_agent.substr(0, end));
}

struct Group {
    std::vector<std::string> agents;
    std::vector<std::pair<std::string, bool>> rules;
    long crawl_delay_ms = 0;
};

} // namespace

RobotsRules RobotsRules::parse(std::string_view text, std::string_view user_agent) {
    std::vector<Group> groups;
    bool last_was_agent = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            if (eol == text.size()) break;
            continue;
        }
        auto key = lower(trim(line.substr(0, colon)));
        auto value = trim(line.substr(colon + 1));

        if (key == "user-agent") {
            if (!last_was_agent || groups.empty()) groups.emplace_back();
            groups.back().agents.push_back(lower(value));
            last_was_agent = true;
        } else {
            last_was_agent = false;
            if (groups.empty()) continue;
            if (key == "allow" || key == "disallow") {
                if (!value.empty()) groups.back().rules.emplace_back(std::string(value), key == "allow");
            } else if (key == "crawl-delay") {
                char* end = nullptr;
                std::string v(value);
                double seconds = std::strtod(v.c_str(), &end);
                if (end != v.c_str() && seconds > 0) groups.back().crawl_delay_ms = static_cast<long>(seconds * 1000);
            }
        }
        if (eol == text.size()) break;
    }

    const auto token = product_token(user_agent);
    std::size_t best_len = 0;
    std::vector<const Group*> selected;
    for (const auto& g : groups) {
        for (const auto& agent : g.agents) {
            if (agent == "*" || agent.empty() || !token.starts_with(agent)) continue;
            if (agent.size() > best_len) {
                best_len = agent.size();
                selected.clear();
            }
            if (agent.size() == best_len) selected.push_back(&g);
        }
    }
    if (selected.empty())
        for (const auto& g : groups)
            if (std::find(g.agents.begin(), g.agents.end(), "*") != g.agents.end()) selected.push_back(&g);

    RobotsRules rules;
    for (const auto* g : selected) {
        for (const auto& [pattern, allow] : g->rules) rules.rules_.push_back({pattern, allow});
        rules.crawl_delay_ms_ = std::max(rules.crawl_delay_ms_, g->crawl_delay_ms);
    }
    return rules;
}

RobotsRules RobotsRules::for_status(int status) {
    RobotsRules rules;
    rules.disallow_all_ = status >= 500;
    return rules;
}

bool RobotsRules::matches(std::string_view pattern, std::string_view path) {
    bool anchored = !pattern.empty() && pattern.back() == '$';
    if (anchored) pattern.remove_suffix(1);
    // Glob match with '*' as "any run"; unanchored patterns are prefix matches.
    std::size_t p = 0, s = 0, star_p = std::string_view::npos, star_s = 0;
    while (true) {
        if (p == pattern.size()) {
            if (!anchored || s == path.size()) return true;
        } else if (pattern[p] == '*') {
            star_p = p++;
            star_s = s;
            continue;
        } else if (s < path.size() && pattern[p] == path[s]) {
            ++p;
            ++s;
            continue;
        }
        if (star_p == std::string_view::npos || star_s >= path.size()) return false;
        p = star_p + 1;
        s = ++star_s;
    }
}

bool RobotsRules::allowed(std::string_view path) const {
    if (disallow_all_) return false;
    if (path == "/robots.txt") return true;
    std::size_t best_len = 0;
    bool verdict = true;
    bool found = false;
    for (const auto& rule : rules_) {
        if (!matches(rule.pattern, path)) continue;
        if (!found || rule.pattern.size() > best_len || (rule.pattern.size() == best_len && rule.allow)) {
            best_len = rule.pattern.size();
            verdict = rule.allow;
            found = true;
        }
    }
    return verdict;
}

} // namespace linkmap
