#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace linkmap {

/// Parsed robots.txt. Matching follows the de-facto standard: the group for
/// the most specific matching user-agent token applies (else "*"), the
/// longest matching Allow/Disallow pattern wins, Allow wins ties, and
/// patterns support '*' wildcards and a trailing '$' anchor.
class RobotsRules {
public:
    /// Rules that allow everything (missing or unreachable robots.txt).
    RobotsRules() = default;

    static RobotsRules parse(std::string_view text, std::string_view user_agent);

    /// Rules for a 4xx/5xx robots.txt: 4xx allows all, 5xx disallows all.
    static RobotsRules for_status(int status);

    bool allowed(std::string_view path_and_query) const;

    /// Crawl-delay for the selected group in milliseconds, 0 when absent.
    long crawl_delay_ms() const noexcept { return crawl_delay_ms_; }

private:
    struct Rule {
        std::string pattern;
        bool allow;
    };
    std::vector<Rule> rules_;
    long crawl_delay_ms_ = 0;
    bool disallow_all_ = false;

    static bool matches(std::string_view pattern, std::string_view path);
};

} // namespace linkmap
