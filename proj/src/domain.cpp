#include "linkmap/domain.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "linkmap/url.hpp"

namespace linkmap {

// Generated at configure time from data/public_suffix_list.dat.
extern const char* const kBundledPublicSuffixList;

namespace {

std::vector<std::string_view> split_labels(std::string_view host) {
    std::vector<std::string_view> labels;
    std::size_t start = 0;
    while (true) {
        auto dot = host.find('.', start);
        labels.push_back(host.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return labels;
}

// Suffix of `host` starting at label index `i`.
std::string_view suffix_from(std::string_view host, const std::vector<std::string_view>& labels, std::size_t i) {
    return host.substr(static_cast<std::size_t>(labels[i].data() - host.data()));
}

} // namespace

DomainKey DomainKey::from_canonical(std::string_view name) {
    if (name.empty()) throw InvalidArgument("empty domain");
    auto ascii = host_to_ascii(name);
    if (!ascii || *ascii != name) throw InvalidArgument("not a canonical domain: " + std::string(name));
    if (name.find('.') == std::string_view::npos) throw InvalidArgument("single-label domain: " + std::string(name));
    if (is_ip_literal(name)) throw InvalidArgument("IP literal is not a domain: " + std::string(name));
    return DomainKey(std::string(name));
}

MultiTenantSuffixes default_multi_tenant_suffixes() {
    return {"blogspot.com", "substack.com", "tumblr.com", "weebly.com", "wix.com", "wixsite.com", "wordpress.com"};
}

PublicSuffixList PublicSuffixList::parse(std::string_view text, bool icann_only) {
    PublicSuffixList psl;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;

        if (icann_only && line.find("===END ICANN DOMAINS===") != std::string_view::npos) break;
        // A rule is the first whitespace-delimited token on a line.
        auto ws = line.find_first_of(" \t\r");
        if (ws != std::string_view::npos) line = line.substr(0, ws);
        if (line.empty() || line.starts_with("//")) continue;

        bool exception = false;
        bool wildcard = false;
        if (line.front() == '!') {
            exception = true;
            line.remove_prefix(1);
        } else if (line.starts_with("*.")) {
            wildcard = true;
            line.remove_prefix(2);
        }
        auto ascii = host_to_ascii(line);
        if (!ascii) continue;
        if (exception)
            psl.exceptions_.insert(std::move(*ascii));
        else if (wildcard)
            psl.wildcards_.insert(std::move(*ascii));
        else
            psl.rules_.insert(std::move(*ascii));
    }
    return psl;
}

const PublicSuffixList& PublicSuffixList::bundled() {
    static const PublicSuffixList list = parse(kBundledPublicSuffixList, true);
    return list;
}

std::string PublicSuffixList::public_suffix(std::string_view host) const {
    auto labels = split_labels(host);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::string candidate(suffix_from(host, labels, i));
        if (exceptions_.contains(candidate)) return std::string(suffix_from(host, labels, i + 1));
        if (rules_.contains(candidate)) return candidate;
        if (i + 1 < labels.size() && wildcards_.contains(std::string(suffix_from(host, labels, i + 1))))
            return candidate;
    }
    return std::string(labels.back());
}

std::string PublicSuffixList::registrable_domain(std::string_view host) const {
    auto suffix = public_suffix(host);
    if (suffix.size() >= host.size()) return {};
    auto head = host.substr(0, host.size() - suffix.size() - 1);
    auto dot = head.rfind('.');
    return std::string(dot == std::string_view::npos ? head : head.substr(dot + 1)) + "." + suffix;
}

DomainCanonicalizer::DomainCanonicalizer(MultiTenantSuffixes multi_tenant, const PublicSuffixList& psl)
    : psl_(&psl) {
    for (const auto& s : multi_tenant) {
        auto ascii = host_to_ascii(s);
        if (!ascii) throw InvalidArgument("invalid multi-tenant suffix: " + s);
        multi_tenant_.insert(std::move(*ascii));
    }
}

DomainKey DomainCanonicalizer::canonicalize_host(std::string_view raw_host) const {
    std::string host(raw_host);
    if (!host.empty() && host.front() == '[')
        throw CanonicalizeError(CanonicalizeFailure::IpLiteral, "IP-literal host: " + host);
    auto ascii = host_to_ascii(host);
    if (!ascii) throw CanonicalizeError(CanonicalizeFailure::UnparsableHost, "unparsable host: " + host);
    if (is_ip_literal(*ascii)) throw CanonicalizeError(CanonicalizeFailure::IpLiteral, "IP-literal host: " + host);
    if (ascii->find('.') == std::string::npos)
        throw CanonicalizeError(CanonicalizeFailure::SingleLabelHost, "single-label host: " + host);

    // Longest matching multi-tenant suffix keeps exactly one extra label.
    const std::string* best = nullptr;
    for (const auto& suffix : multi_tenant_) {
        if (ascii->size() > suffix.size() + 1 && ascii->ends_with(suffix) &&
            (*ascii)[ascii->size() - suffix.size() - 1] == '.' && (!best || suffix.size() > best->size()))
            best = &suffix;
    }
    if (best) {
        std::string_view head(ascii->data(), ascii->size() - best->size() - 1);
        auto dot = head.rfind('.');
        auto label = dot == std::string_view::npos ? head : head.substr(dot + 1);
        return DomainKey(std::string(label) + "." + *best);
    }

    auto registrable = psl_->registrable_domain(*ascii);
    if (registrable.empty())
        throw CanonicalizeError(CanonicalizeFailure::PublicSuffixHost, "host is a public suffix: " + host);
    return DomainKey(std::move(registrable));
}

DomainKey DomainCanonicalizer::canonicalize_url(std::string_view text) const {
    auto url = parse_url_reference(text);
    if (!url) throw CanonicalizeError(CanonicalizeFailure::UnparsableHost, "unparsable URL: " + std::string(text));
    if (!url->is_absolute())
        throw CanonicalizeError(CanonicalizeFailure::NotAbsolute, "not an absolute URL: " + std::string(text));
    if (!url->is_http())
        throw CanonicalizeError(CanonicalizeFailure::NonHttpScheme, "non-http scheme: " + url->scheme);
    if (url->host.empty())
        throw CanonicalizeError(CanonicalizeFailure::UnparsableHost, "missing host: " + std::string(text));
    return canonicalize_host(url->host);
}

DomainKey canonicalize_url(std::string_view url, const MultiTenantSuffixes& multi_tenant_suffixes) {
    return DomainCanonicalizer(multi_tenant_suffixes).canonicalize_url(url);
}

} // namespace linkmap
