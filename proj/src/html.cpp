#include "linkmap/html.hpp"

#include <cctype>
#include <optional>
#include <unordered_set>

#include "linkmap/url.hpp"

namespace linkmap {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool iequals_at(std::string_view text, std::size_t pos, std::string_view word) {
    if (pos + word.size() > text.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i)
        if (lower(text[pos + i]) != word[i]) return false;
    return true;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

struct Attribute {
    std::string name;
    std::string value;
};

struct Tag {
    std::string name;
    std::vector<Attribute> attributes;

    std::optional<std::string> attr(std::string_view key) const {
        for (const auto& a : attributes)
            if (a.name == key) return a.value;
        return std::nullopt;
    }
};

// Minimal HTML tokenizer: yields start tags and skips comments, doctypes,
// end tags and raw-text element content.
class TagScanner {
public:
    explicit TagScanner(std::string_view html) : html_(html) {}

    std::optional<Tag> next() {
        while (pos_ < html_.size()) {
            auto lt = html_.find('<', pos_);
            if (lt == std::string_view::npos) break;
            pos_ = lt + 1;
            if (html_.compare(lt, 4, "<!--") == 0) {
                auto end = html_.find("-->", lt + 4);
                pos_ = end == std::string_view::npos ? html_.size() : end + 3;
            } else if (pos_ < html_.size() && (html_[pos_] == '!' || html_[pos_] == '?' || html_[pos_] == '/')) {
                auto end = html_.find('>', pos_);
                pos_ = end == std::string_view::npos ? html_.size() : end + 1;
            } else if (pos_ < html_.size() && std::isalpha(static_cast<unsigned char>(html_[pos_]))) {
                Tag tag = read_tag();
                if (tag.name == "script" || tag.name == "style" || tag.name == "textarea" || tag.name == "title" ||
                    tag.name == "xmp")
                    skip_raw_text(tag.name);
                return tag;
            }
        }
        return std::nullopt;
    }

private:
    Tag read_tag() {
        Tag tag;
        while (pos_ < html_.size() && !is_space(html_[pos_]) && html_[pos_] != '/' && html_[pos_] != '>')
            tag.name.push_back(lower(html_[pos_++]));
        while (pos_ < html_.size()) {
            while (pos_ < html_.size() && (is_space(html_[pos_]) || html_[pos_] == '/')) ++pos_;
            if (pos_ >= html_.size()) break;
            if (html_[pos_] == '>') {
                ++pos_;
                break;
            }
            Attribute attr;
            while (pos_ < html_.size() && !is_space(html_[pos_]) && html_[pos_] != '/' && html_[pos_] != '>' &&
                   (html_[pos_] != '=' || attr.name.empty()))
                attr.name.push_back(lower(html_[pos_++]));
            while (pos_ < html_.size() && is_space(html_[pos_])) ++pos_;
            if (pos_ < html_.size() && html_[pos_] == '=') {
                ++pos_;
                while (pos_ < html_.size() && is_space(html_[pos_])) ++pos_;
                if (pos_ < html_.size() && (html_[pos_] == '"' || html_[pos_] == '\'')) {
                    char quote = html_[pos_++];
                    auto end = html_.find(quote, pos_);
                    if (end == std::string_view::npos) end = html_.size();
                    attr.value = decode_html_entities(html_.substr(pos_, end - pos_));
                    pos_ = end == html_.size() ? end : end + 1;
                } else {
                    auto start = pos_;
                    while (pos_ < html_.size() && !is_space(html_[pos_]) && html_[pos_] != '>') ++pos_;
                    attr.value = decode_html_entities(html_.substr(start, pos_ - start));
                }
            }
            tag.attributes.push_back(std::move(attr));
        }
        return tag;
    }

    void skip_raw_text(const std::string& name) {
        while (pos_ < html_.size()) {
            auto lt = html_.find("</", pos_);
            if (lt == std::string_view::npos) {
                pos_ = html_.size();
                return;
            }
            pos_ = lt + 2;
            if (iequals_at(html_, pos_, name)) {
                auto end = html_.find('>', pos_);
                pos_ = end == std::string_view::npos ? html_.size() : end + 1;
                return;
            }
        }
    }

    std::string_view html_;
    std::size_t pos_ = 0;
};

} // namespace

std::string decode_html_entities(std::string_view text) {
    struct Named {
        std::string_view name;
        char32_t cp;
    };
    static constexpr Named kNamed[] = {{"amp", '&'},  {"lt", '<'},      {"gt", '>'},
                                       {"quot", '"'}, {"apos", '\''},   {"nbsp", 0xA0}};
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '&') {
            out.push_back(text[i]);
            continue;
        }
        std::size_t j = i + 1;
        if (j < text.size() && text[j] == '#') {
            ++j;
            bool hex = j < text.size() && (text[j] == 'x' || text[j] == 'X');
            if (hex) ++j;
            std::size_t digits_start = j;
            char32_t cp = 0;
            while (j < text.size() && (hex ? std::isxdigit(static_cast<unsigned char>(text[j]))
                                           : std::isdigit(static_cast<unsigned char>(text[j])))) {
                int d = std::isdigit(static_cast<unsigned char>(text[j])) ? text[j] - '0' : lower(text[j]) - 'a' + 10;
                if (cp < 0x110000) cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(d);
                ++j;
            }
            if (j > digits_start) {
                append_utf8(out, cp);
                i = (j < text.size() && text[j] == ';') ? j : j - 1;
                continue;
            }
        } else {
            bool matched = false;
            for (const auto& entity : kNamed) {
                if (text.compare(j, entity.name.size(), entity.name) == 0) {
                    append_utf8(out, entity.cp);
                    std::size_t end = j + entity.name.size();
                    i = (end < text.size() && text[end] == ';') ? end : end - 1;
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
        }
        out.push_back('&');
    }
    return out;
}

std::vector<std::string> extract_hyperlinks(std::string_view html, std::string_view base_url) {
    std::vector<std::string> links;
    auto document = parse_absolute_url(base_url);
    if (!document) return links;

    std::vector<std::string> hrefs;
    std::optional<Url> base;
    TagScanner scanner(html);
    while (auto tag = scanner.next()) {
        if (tag->name == "a") {
            if (auto href = tag->attr("href")) hrefs.push_back(std::move(*href));
        } else if (tag->name == "base" && !base) {
            if (auto href = tag->attr("href")) {
                if (auto ref = parse_url_reference(*href)) {
                    auto resolved = resolve_reference(*document, *ref);
                    if (resolved.is_http()) base = std::move(resolved);
                }
            }
        }
    }

    const Url& effective_base = base ? *base : *document;
    std::unordered_set<std::string> seen;
    for (const auto& href : hrefs) {
        auto ref = parse_url_reference(href);
        if (!ref) continue;
        auto resolved = resolve_reference(effective_base, *ref);
        if (!resolved.is_http() || resolved.host.empty()) continue;
        resolved.fragment.reset();
        auto text = resolved.str();
        if (seen.insert(text).second) links.push_back(std::move(text));
    }
    return links;
}

} // namespace linkmap
