#pragma once

#include <compare>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>

#include "linkmap/error.hpp"

namespace linkmap {

/// Canonical domain identifier: lowercase ASCII, punycode-encoded, no
/// scheme, port or path. Node identity in every graph.
class DomainKey {
public:
    DomainKey() = default;

    /// Validates an already-canonical name (as read back from files).
    /// Throws InvalidArgument for empty, dotless, or non-canonical text.
    static DomainKey from_canonical(std::string_view name);

    const std::string& str() const noexcept { return name_; }
    bool empty() const noexcept { return name_.empty(); }

    auto operator<=>(const DomainKey&) const = default;
    bool operator==(const DomainKey&) const = default;

private:
    explicit DomainKey(std::string name) : name_(std::move(name)) {}
    std::string name_;

    friend class DomainCanonicalizer;
};

using MultiTenantSuffixes = std::set<std::string>;

/// Platforms hosting many independent sites under one registrable domain.
MultiTenantSuffixes default_multi_tenant_suffixes();

/// Public-suffix lookup over a PSL-format rule list (normal, wildcard and
/// exception rules). Only the ICANN section of the bundled list is loaded.
class PublicSuffixList {
public:
    /// Parses PSL text. When `icann_only` is set, parsing stops at the
    /// "===END ICANN DOMAINS===" marker.
    static PublicSuffixList parse(std::string_view text, bool icann_only = true);

    /// The list compiled into the library.
    static const PublicSuffixList& bundled();

    /// Public suffix of an ASCII host (default rule "*" when nothing matches).
    std::string public_suffix(std::string_view host) const;

    /// Public suffix plus one label; empty when the host is itself a suffix.
    std::string registrable_domain(std::string_view host) const;

    std::size_t rule_count() const noexcept { return rules_.size() + wildcards_.size() + exceptions_.size(); }

private:
    std::unordered_set<std::string> rules_;
    std::unordered_set<std::string> wildcards_;  // "*.x.y" stored as "x.y"
    std::unordered_set<std::string> exceptions_; // "!a.x.y" stored as "a.x.y"
};

/// Why canonicalize_url rejected its input.
enum class CanonicalizeFailure { NotAbsolute, NonHttpScheme, UnparsableHost, IpLiteral, SingleLabelHost, PublicSuffixHost };

class CanonicalizeError : public InvalidArgument {
public:
    CanonicalizeError(CanonicalizeFailure reason, const std::string& what) : InvalidArgument(what), reason_(reason) {}
    CanonicalizeFailure reason() const noexcept { return reason_; }

private:
    CanonicalizeFailure reason_;
};

/// Maps URLs and hosts to DomainKeys: registrable domain by default, one
/// extra label kept for hosts under a multi-tenant suffix.
class DomainCanonicalizer {
public:
    explicit DomainCanonicalizer(MultiTenantSuffixes multi_tenant = default_multi_tenant_suffixes(),
                                 const PublicSuffixList& psl = PublicSuffixList::bundled());

    DomainKey canonicalize_url(std::string_view url) const;
    DomainKey canonicalize_host(std::string_view host) const;

    const MultiTenantSuffixes& multi_tenant_suffixes() const noexcept { return multi_tenant_; }

private:
    MultiTenantSuffixes multi_tenant_;
    const PublicSuffixList* psl_;
};

/// Throws CanonicalizeError on non-http(s) schemes, unparsable or IP-literal hosts.
DomainKey canonicalize_url(std::string_view url, const MultiTenantSuffixes& multi_tenant_suffixes);

} // namespace linkmap

template <>
struct std::hash<linkmap::DomainKey> {
    std::size_t operator()(const linkmap::DomainKey& d) const noexcept { return std::hash<std::string>{}(d.str()); }
};
