#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace linkmap {

/// A parsed URL reference. Components follow RFC 3986; `has_authority`
/// distinguishes "scheme:path" from "scheme://host/path".
struct Url {
    std::string scheme;   // lowercase, empty for relative references
    bool has_authority = false;
    std::string userinfo;
    std::string host;     // lowercase; IDN labels punycode-encoded; IPv6 keeps brackets
    std::string port;     // digits only, empty when absent or default
    std::string path;
    std::optional<std::string> query;
    std::optional<std::string> fragment;

    bool is_absolute() const noexcept { return !scheme.empty(); }
    bool is_http() const noexcept { return scheme == "http" || scheme == "https"; }

    /// Serialized form. Default ports are already dropped at parse time.
    std::string str() const;
    /// scheme://host[:port]
    std::string origin() const;
    /// path[?query], never empty for http(s) URLs.
    std::string request_target() const;

    bool operator==(const Url&) const = default;
};

/// Parses any URI reference (absolute or relative). Returns nullopt when the
/// text cannot be a reference at all (bad scheme, bad port, bad host).
/// Leading/trailing whitespace and embedded tab/CR/LF are removed, and for
/// http(s) backslashes are read as slashes, matching browser behaviour.
std::optional<Url> parse_url_reference(std::string_view text);

/// Parses an absolute URL; nullopt for relative references.
std::optional<Url> parse_absolute_url(std::string_view text);

/// RFC 3986 section 5.2 reference resolution.
Url resolve_reference(const Url& base, const Url& ref);

/// Removes "." and ".." segments from a path.
std::string remove_dot_segments(std::string_view path);

/// Converts a host to its ASCII form: percent-decoding, ASCII lowercasing,
/// and punycode ("xn--") encoding of labels that carry non-ASCII code points.
/// A single trailing dot is removed. Returns nullopt for hosts that contain
/// empty labels, invalid UTF-8, or forbidden characters.
std::optional<std::string> host_to_ascii(std::string_view host);

/// RFC 3492 punycode encoding of a sequence of Unicode code points.
std::optional<std::string> punycode_encode(std::u32string_view input);

/// True for bracketed IPv6 literals and for hosts whose last label is
/// numeric (IPv4 in any of its dotted/decimal/hex spellings).
bool is_ip_literal(std::string_view ascii_host);

} // namespace linkmap
