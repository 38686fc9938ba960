#include "linkmap/url.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>

namespace linkmap {
namespace {

bool is_scheme_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
}

char to_lower_ascii(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), to_lower_ascii);
    return out;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string percent_decode(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            int hi = hex_value(s[i + 1]);
            int lo = hex_value(s[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>(hi * 16 + lo));
                i += 2;
                continue;
            }
        }
        out.push_back(s[i]);
    }
    return out;
}

// Escapes control bytes, space, and non-ASCII bytes so that every URL the
// library emits is plain printable ASCII.
std::string escape_unsafe(std::string_view s) {
    static constexpr char digits[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        auto c = static_cast<unsigned char>(ch);
        if (c <= 0x20 || c >= 0x7F || c == '"' || c == '<' || c == '>' || c == '`') {
            out.push_back('%');
            out.push_back(digits[c >> 4]);
            out.push_back(digits[c & 0xF]);
        } else {
            out.push_back(ch);
        }
    }
    return out;
}

std::optional<std::u32string> decode_utf8(std::string_view s) {
    std::u32string out;
    for (std::size_t i = 0; i < s.size();) {
        auto c = static_cast<unsigned char>(s[i]);
        char32_t cp;
        int extra;
        if (c < 0x80) {
            cp = c;
            extra = 0;
        } else if ((c & 0xE0) == 0xC0) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            cp = c & 0x07;
            extra = 3;
        } else {
            return std::nullopt;
        }
        if (i + extra >= s.size()) return std::nullopt;
        for (int k = 1; k <= extra; ++k) {
            auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return std::nullopt;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
        static constexpr std::array<char32_t, 4> min_for_len{0, 0x80, 0x800, 0x10000};
        if (cp < min_for_len[extra]) return std::nullopt;
        out.push_back(cp);
        i += 1 + extra;
    }
    return out;
}

// Punycode parameters (RFC 3492 section 5).
constexpr std::uint32_t kBase = 36;
constexpr std::uint32_t kTMin = 1;
constexpr std::uint32_t kTMax = 26;
constexpr std::uint32_t kSkew = 38;
constexpr std::uint32_t kDamp = 700;
constexpr std::uint32_t kInitialBias = 72;
constexpr std::uint32_t kInitialN = 128;

char punycode_digit(std::uint32_t d) {
    return d < 26 ? static_cast<char>('a' + d) : static_cast<char>('0' + d - 26);
}

std::uint32_t adapt(std::uint32_t delta, std::uint32_t num_points, bool first_time) {
    delta = first_time ? delta / kDamp : delta / 2;
    delta += delta / num_points;
    std::uint32_t k = 0;
    while (delta > ((kBase - kTMin) * kTMax) / 2) {
        delta /= kBase - kTMin;
        k += kBase;
    }
    return k + (kBase - kTMin + 1) * delta / (delta + kSkew);
}

bool valid_host_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

void normalize_http(Url& u) {
    if (!u.is_http()) return;
    if ((u.scheme == "http" && u.port == "80") || (u.scheme == "https" && u.port == "443"))
        u.port.clear();
    if (u.has_authority && u.path.empty()) u.path = "/";
}

std::string merge_paths(const Url& base, std::string_view ref_path) {
    if (base.has_authority && base.path.empty()) return "/" + std::string(ref_path);
    auto slash = base.path.rfind('/');
    if (slash == std::string::npos) return std::string(ref_path);
    return base.path.substr(0, slash + 1) + std::string(ref_path);
}

} // namespace

std::optional<std::string> punycode_encode(std::u32string_view input) {
    std::string out;
    for (char32_t c : input)
        if (c < 0x80) out.push_back(static_cast<char>(c));
    const auto basic = static_cast<std::uint32_t>(out.size());
    std::uint32_t handled = basic;
    if (basic > 0) out.push_back('-');

    std::uint32_t n = kInitialN;
    std::uint32_t delta = 0;
    std::uint32_t bias = kInitialBias;
    const auto total = static_cast<std::uint32_t>(input.size());
    while (handled < total) {
        std::uint32_t m = UINT32_MAX;
        for (char32_t c : input)
            if (c >= n && c < m) m = c;
        if ((m - n) > (UINT32_MAX - delta) / (handled + 1)) return std::nullopt;
        delta += (m - n) * (handled + 1);
        n = m;
        for (char32_t c : input) {
            if (c < n && ++delta == 0) return std::nullopt;
            if (c == n) {
                std::uint32_t q = delta;
                for (std::uint32_t k = kBase;; k += kBase) {
                    std::uint32_t t = k <= bias ? kTMin : (k >= bias + kTMax ? kTMax : k - bias);
                    if (q < t) break;
                    out.push_back(punycode_digit(t + (q - t) % (kBase - t)));
                    q = (q - t) / (kBase - t);
                }
                out.push_back(punycode_digit(q));
                bias = adapt(delta, handled + 1, handled == basic);
                delta = 0;
                ++handled;
            }
        }
        ++delta;
        ++n;
    }
    return out;
}

std::optional<std::string> host_to_ascii(std::string_view host) {
    std::string decoded = percent_decode(host);
    if (!decoded.empty() && decoded.back() == '.') decoded.pop_back();
    if (decoded.empty()) return std::nullopt;

    std::string out;
    std::size_t start = 0;
    while (start <= decoded.size()) {
        auto dot = decoded.find('.', start);
        if (dot == std::string::npos) dot = decoded.size();
        std::string_view label(decoded.data() + start, dot - start);
        if (label.empty()) return std::nullopt;

        bool ascii = std::all_of(label.begin(), label.end(),
                                 [](char c) { return static_cast<unsigned char>(c) < 0x80; });
        std::string ascii_label;
        if (ascii) {
            ascii_label = lower_ascii(label);
        } else {
            auto cps = decode_utf8(label);
            if (!cps) return std::nullopt;
            for (auto& cp : *cps)
                if (cp < 0x80) cp = static_cast<char32_t>(to_lower_ascii(static_cast<char>(cp)));
            auto encoded = punycode_encode(*cps);
            if (!encoded) return std::nullopt;
            ascii_label = "xn--" + *encoded;
        }
        if (!std::all_of(ascii_label.begin(), ascii_label.end(), valid_host_char)) return std::nullopt;
        if (ascii_label.size() > 63) return std::nullopt;

        if (!out.empty()) out.push_back('.');
        out += ascii_label;
        start = dot + 1;
        if (dot == decoded.size()) break;
    }
    return out;
}

bool is_ip_literal(std::string_view host) {
    if (!host.empty() && host.front() == '[') return true;
    auto dot = host.rfind('.');
    std::string_view last = dot == std::string_view::npos ? host : host.substr(dot + 1);
    if (last.empty()) return false;
    if (last.size() > 2 && last[0] == '0' && (last[1] == 'x' || last[1] == 'X'))
        return std::all_of(last.begin() + 2, last.end(),
                           [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
    return std::all_of(last.begin(), last.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::string remove_dot_segments(std::string_view path) {
    std::string input(path);
    std::string output;
    auto pop_last_segment = [&output] {
        auto slash = output.rfind('/');
        output.erase(slash == std::string::npos ? 0 : slash);
    };
    while (!input.empty()) {
        if (input.starts_with("../")) {
            input.erase(0, 3);
        } else if (input.starts_with("./")) {
            input.erase(0, 2);
        } else if (input.starts_with("/./")) {
            input.erase(0, 2);
        } else if (input == "/.") {
            input = "/";
        } else if (input.starts_with("/../")) {
            input.erase(0, 3);
            pop_last_segment();
        } else if (input == "/..") {
            input = "/";
            pop_last_segment();
        } else if (input == "." || input == "..") {
            input.clear();
        } else {
            auto next = input.find('/', input[0] == '/' ? 1 : 0);
            if (next == std::string::npos) next = input.size();
            output.append(input, 0, next);
            input.erase(0, next);
        }
    }
    return output;
}

std::optional<Url> parse_url_reference(std::string_view text) {
    // Trim C0 controls and spaces, drop embedded tab/newline.
    while (!text.empty() && static_cast<unsigned char>(text.front()) <= 0x20) text.remove_prefix(1);
    while (!text.empty() && static_cast<unsigned char>(text.back()) <= 0x20) text.remove_suffix(1);
    std::string s;
    s.reserve(text.size());
    for (char c : text)
        if (c != '\t' && c != '\r' && c != '\n') s.push_back(c);

    Url u;
    std::size_t pos = 0;
    auto first_delim = s.find_first_of(":/?#");
    if (first_delim != std::string::npos && s[first_delim] == ':' && first_delim > 0) {
        std::string_view scheme(s.data(), first_delim);
        if (!std::isalpha(static_cast<unsigned char>(scheme[0])) ||
            !std::all_of(scheme.begin(), scheme.end(), is_scheme_char))
            return std::nullopt;
        u.scheme = lower_ascii(scheme);
        pos = first_delim + 1;
    }

    if (u.scheme.empty() || u.is_http()) {
        auto end = s.find_first_of("?#", pos);
        if (end == std::string::npos) end = s.size();
        std::replace(s.begin() + static_cast<std::ptrdiff_t>(pos), s.begin() + static_cast<std::ptrdiff_t>(end), '\\', '/');
    }

    if (s.compare(pos, 2, "//") == 0) {
        u.has_authority = true;
        pos += 2;
        auto end = s.find_first_of("/?#", pos);
        if (end == std::string::npos) end = s.size();
        std::string_view authority(s.data() + pos, end - pos);
        pos = end;

        auto at = authority.rfind('@');
        if (at != std::string_view::npos) {
            u.userinfo = std::string(authority.substr(0, at));
            authority.remove_prefix(at + 1);
        }
        std::string_view host_part = authority;
        std::string_view port_part;
        if (!authority.empty() && authority.front() == '[') {
            auto close = authority.find(']');
            if (close == std::string_view::npos) return std::nullopt;
            host_part = authority.substr(0, close + 1);
            auto rest = authority.substr(close + 1);
            if (!rest.empty()) {
                if (rest.front() != ':') return std::nullopt;
                port_part = rest.substr(1);
            }
            u.host = lower_ascii(host_part);
        } else {
            auto colon = authority.rfind(':');
            if (colon != std::string_view::npos) {
                host_part = authority.substr(0, colon);
                port_part = authority.substr(colon + 1);
            }
            if (!host_part.empty()) {
                auto ascii = host_to_ascii(host_part);
                if (!ascii) return std::nullopt;
                u.host = std::move(*ascii);
            }
        }
        if (!std::all_of(port_part.begin(), port_part.end(),
                         [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            return std::nullopt;
        if (!port_part.empty()) {
            auto first_nonzero = port_part.find_first_not_of('0');
            std::string_view digits =
                first_nonzero == std::string_view::npos ? std::string_view("0") : port_part.substr(first_nonzero);
            if (digits.size() > 5 || std::stoul(std::string(digits)) > 65535) return std::nullopt;
            u.port = std::string(digits);
        }
        if (u.is_http() && u.host.empty()) return std::nullopt;
    }

    auto path_end = s.find_first_of("?#", pos);
    if (path_end == std::string::npos) path_end = s.size();
    u.path = escape_unsafe(std::string_view(s).substr(pos, path_end - pos));
    pos = path_end;
    if (pos < s.size() && s[pos] == '?') {
        auto q_end = s.find('#', pos);
        if (q_end == std::string::npos) q_end = s.size();
        u.query = escape_unsafe(std::string_view(s).substr(pos + 1, q_end - pos - 1));
        pos = q_end;
    }
    if (pos < s.size() && s[pos] == '#') u.fragment = s.substr(pos + 1);

    if (u.has_authority && u.is_absolute()) u.path = remove_dot_segments(u.path);
    normalize_http(u);
    return u;
}

std::optional<Url> parse_absolute_url(std::string_view text) {
    auto u = parse_url_reference(text);
    if (!u || !u->is_absolute()) return std::nullopt;
    return u;
}

Url resolve_reference(const Url& base, const Url& ref) {
    Url t;
    if (!ref.scheme.empty()) {
        t = ref;
        t.path = remove_dot_segments(ref.path);
    } else {
        if (ref.has_authority) {
            t.has_authority = true;
            t.userinfo = ref.userinfo;
            t.host = ref.host;
            t.port = ref.port;
            t.path = remove_dot_segments(ref.path);
            t.query = ref.query;
        } else {
            if (ref.path.empty()) {
                t.path = base.path;
                t.query = ref.query ? ref.query : base.query;
            } else {
                t.path = ref.path.front() == '/' ? remove_dot_segments(ref.path)
                                                 : remove_dot_segments(merge_paths(base, ref.path));
                t.query = ref.query;
            }
            t.has_authority = base.has_authority;
            t.userinfo = base.userinfo;
            t.host = base.host;
            t.port = base.port;
        }
        t.scheme = base.scheme;
    }
    t.fragment = ref.fragment;
    normalize_http(t);
    return t;
}

std::string Url::str() const {
    std::string out;
    if (!scheme.empty()) out += scheme + ":";
    if (has_authority) {
        out += "//";
        if (!userinfo.empty()) out += userinfo + "@";
        out += host;
        if (!port.empty()) out += ":" + port;
    }
    out += path;
    if (query) out += "?" + *query;
    if (fragment) out += "#" + *fragment;
    return out;
}

std::string Url::origin() const {
    std::string out = scheme + "://" + host;
    if (!port.empty()) out += ":" + port;
    return out;
}

std::string Url::request_target() const {
    std::string out = path.empty() ? "/" : path;
    if (query) out += "?" + *query;
    return out;
}

} // namespace linkmap
