#include <gtest/gtest.h>

#include <random>

#include "linkmap/domain.hpp"

using namespace linkmap;

namespace {

CanonicalizeFailure failure_of(const std::string& url) {
    try {
        canonicalize_url(url, default_multi_tenant_suffixes());
    } catch (const CanonicalizeError& e) {
        return e.reason();
    }
    ADD_FAILURE() << "expected rejection of " << url;
    return CanonicalizeFailure::NotAbsolute;
}

} // namespace

TEST(Canonicalize, StripsCaseWwwPathAndFragment) {
    EXPECT_EQ(canonicalize_url("https://WWW.Example.com/path#frag", {}).str(), "example.com");
    EXPECT_EQ(canonicalize_url("http://user:pw@news.example.com:8080/a?b=c", {}).str(), "example.com");
}

TEST(Canonicalize, MultiTenantKeepsOneLabel) {
    MultiTenantSuffixes mt = {"wordpress.com"};
    EXPECT_EQ(canonicalize_url("https://wqth.wordpress.com/2020/x", mt).str(), "wqth.wordpress.com");
    EXPECT_EQ(canonicalize_url("https://a.wqth.wordpress.com/", mt).str(), "wqth.wordpress.com");
    EXPECT_EQ(canonicalize_url("https://wordpress.com/", mt).str(), "wordpress.com");
    // Without the suffix configured the platform collapses to its registrable domain.
    EXPECT_EQ(canonicalize_url("https://wqth.wordpress.com/2020/x", {}).str(), "wordpress.com");
}

TEST(Canonicalize, PublicSuffixRules) {
    EXPECT_EQ(canonicalize_url("https://www.bbc.co.uk/news", {}).str(), "bbc.co.uk");
    EXPECT_EQ(canonicalize_url("https://a.b.example.com.au/", {}).str(), "example.com.au");
    // Unknown TLD falls back to the implicit "*" rule.
    EXPECT_EQ(canonicalize_url("http://www.site.test/", {}).str(), "site.test");
}

TEST(Canonicalize, IdnHostsArePunycoded) {
    EXPECT_EQ(canonicalize_url("https://www.b\xC3\xBC" "cher.de/", {}).str(), "xn--bcher-kva.de");
}

TEST(Canonicalize, Rejections) {
    EXPECT_EQ(failure_of("ftp://example.com/a"), CanonicalizeFailure::NonHttpScheme);
    EXPECT_EQ(failure_of("mailto:z@a.com"), CanonicalizeFailure::NonHttpScheme);
    EXPECT_EQ(failure_of("/just/a/path"), CanonicalizeFailure::NotAbsolute);
    EXPECT_EQ(failure_of("http://192.168.0.1/"), CanonicalizeFailure::IpLiteral);
    EXPECT_EQ(failure_of("http://[::1]:8080/"), CanonicalizeFailure::IpLiteral);
    EXPECT_EQ(failure_of("http://localhost/"), CanonicalizeFailure::SingleLabelHost);
    EXPECT_EQ(failure_of("http://co.uk/"), CanonicalizeFailure::PublicSuffixHost);
    EXPECT_EQ(failure_of("http://exa mple.com/"), CanonicalizeFailure::UnparsableHost);
}

TEST(Canonicalize, IdempotentOnOwnOutput) {
    const std::vector<std::string> urls = {
        "https://WWW.Example.com/path#frag", "https://wqth.wordpress.com/2020/x", "http://x.y.bbc.co.uk/",
        "https://b\xC3\xBC" "cher.de/", "http://a.blogspot.com/p", "https://deep.sub.site.test:8080/"};
    DomainCanonicalizer canon;
    for (const auto& url : urls) {
        auto key = canon.canonicalize_url(url);
        EXPECT_EQ(canon.canonicalize_url("https://" + key.str() + "/"), key) << url;
        EXPECT_EQ(canon.canonicalize_url("http://" + key.str()), key) << url;
    }
}

TEST(PublicSuffix, WildcardAndExceptionRules) {
    auto psl = PublicSuffixList::parse("// comment\ncom\n*.ck\n!www.ck\nuk\nco.uk\n");
    EXPECT_EQ(psl.public_suffix("a.b.com"), "com");
    EXPECT_EQ(psl.public_suffix("x.foo.ck"), "foo.ck");
    EXPECT_EQ(psl.public_suffix("www.ck"), "ck");
    EXPECT_EQ(psl.registrable_domain("a.b.foo.ck"), "b.foo.ck");
    EXPECT_EQ(psl.registrable_domain("www.ck"), "www.ck");
    EXPECT_EQ(psl.registrable_domain("co.uk"), "");
    EXPECT_EQ(psl.registrable_domain("x.y.co.uk"), "y.co.uk");
}

TEST(PublicSuffix, BundledListStopsAtIcannSection) {
    const auto& psl = PublicSuffixList::bundled();
    EXPECT_GT(psl.rule_count(), 5000u);
    // blogspot.com lives in the private section and must not be a suffix here.
    EXPECT_EQ(psl.registrable_domain("foo.blogspot.com"), "blogspot.com");
}

TEST(DomainKey, FromCanonicalValidates) {
    EXPECT_EQ(DomainKey::from_canonical("example.com").str(), "example.com");
    EXPECT_THROW(DomainKey::from_canonical(""), InvalidArgument);
    EXPECT_THROW(DomainKey::from_canonical("Example.com"), InvalidArgument);
    EXPECT_THROW(DomainKey::from_canonical("localhost"), InvalidArgument);
    EXPECT_THROW(DomainKey::from_canonical("10.0.0.1"), InvalidArgument);
}
