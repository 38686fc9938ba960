#include <gtest/gtest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "crawl_fixtures.hpp"
#include "linkmap/crawler.hpp"
#include "test_util.hpp"

using namespace linkmap;
using linkmap::testing::anchor;
using linkmap::testing::D;
using linkmap::testing::page_url;

namespace {

CrawlConfig fixture_config() {
    CrawlConfig c;
    c.per_host_min_delay_ms = 0;
    c.respect_robots = false;
    return c;
}

PolitenessOptions politeness(const CrawlConfig& c) {
    return {c.per_host_min_delay_ms, c.respect_robots, c.user_agent};
}

struct Harness {
    FixtureFetcher site;
    ManualClock clock{1'600'000'000'000, 5};
    FetchLog log;
    CrawlConfig config = fixture_config();

    CrawlResult crawl(const std::string& domain) {
        PoliteFetcher polite(site, clock, politeness(config), &log);
        return deep_crawl(D(domain), polite, config);
    }
    HopExpansion expand(const std::vector<std::string>& seeds) {
        PoliteFetcher polite(site, clock, politeness(config), &log);
        return hop_expand(seeds, polite, config);
    }
};

} // namespace

TEST(DeepCrawl, ChainStopsAfterFifteenHops) {
    Harness h;
    linkmap::testing::add_chain_site(h.site, "chain.test", 20);
    auto r = h.crawl("chain.test");
    std::set<std::string> expected;
    for (int i = 0; i <= 15; ++i) expected.insert(page_url("chain.test", i));
    EXPECT_EQ(r.pages_visited, expected);
    EXPECT_EQ(r.pages_visited.size(), 16u);
    EXPECT_EQ(r.hop_reached, 15);
    EXPECT_EQ(h.site.request_count(page_url("chain.test", 16)), 0u);
    // p16 is still collected as a URL: it was linked from p15.
    EXPECT_TRUE(r.collected_urls.contains(page_url("chain.test", 16)));
}

TEST(DeepCrawl, MaxHopsIsConfigurable) {
    Harness h;
    linkmap::testing::add_chain_site(h.site, "chain.test", 20);
    h.config.max_hops = 0;
    EXPECT_EQ(h.crawl("chain.test").pages_visited.size(), 1u);
    h.config.max_hops = 3;
    auto r = h.crawl("chain.test");
    EXPECT_EQ(r.pages_visited.size(), 4u);
    EXPECT_EQ(r.hop_reached, 3);
}

TEST(DeepCrawl, SinglePageWithExternalLink) {
    Harness h;
    h.site.add_page("https://a.test/", anchor("https://ext.com/a"));
    auto r = h.crawl("a.test");
    EXPECT_EQ(r.pages_visited, (std::set<std::string>{"https://a.test/"}));
    ASSERT_EQ(r.external_edges.size(), 1u);
    EXPECT_EQ(r.external_edges.begin()->first, D("ext.com"));
    EXPECT_EQ(r.collected_urls, (std::set<std::string>{"https://ext.com/a"}));
    auto g = r.graph();
    EXPECT_TRUE(g.has_edge(D("a.test"), D("ext.com")));
    EXPECT_EQ(g.edge_count(), 1u);
    EXPECT_EQ(h.site.request_count("https://ext.com/a"), 0u);
}

TEST(DeepCrawl, CycleTerminates) {
    Harness h;
    linkmap::testing::add_cycle_site(h.site, "cyc.test");
    auto r = h.crawl("cyc.test");
    EXPECT_EQ(r.pages_visited, (std::set<std::string>{"https://cyc.test/", "https://cyc.test/p1"}));
    EXPECT_EQ(h.site.request_count("https://cyc.test/"), 1u);
}

TEST(DeepCrawl, MeshVisitsEachPageOnceAndNeverLeavesDomain) {
    Harness h;
    linkmap::testing::add_mesh_site(h.site, "mesh.test", 8);
    auto r = h.crawl("mesh.test");
    EXPECT_EQ(r.pages_visited.size(), 8u);
    for (const auto& req : h.site.requests()) {
        EXPECT_EQ(canonicalize_url(req, {}), D("mesh.test")) << req;
        EXPECT_EQ(h.site.request_count(req), 1u) << req;
    }
    EXPECT_EQ(r.external_edges.size(), 8u);
}

TEST(DeepCrawl, SubdomainsOfTheSameDomainAreInternal) {
    Harness h;
    h.site.add_page("https://site.test/", anchor("https://www.site.test/about") + anchor("https://other.test/"));
    h.site.add_page("https://www.site.test/about", anchor("https://news.site.test/x"));
    h.site.add_page("https://news.site.test/x", "");
    auto r = h.crawl("site.test");
    EXPECT_EQ(r.pages_visited.size(), 3u);
    EXPECT_EQ(r.external_edges.size(), 1u);
}

TEST(DeepCrawl, MultiTenantSitesStayApart) {
    Harness h;
    h.site.add_page("https://alpha.wordpress.com/", anchor("/post") + anchor("https://beta.wordpress.com/"));
    h.site.add_page("https://alpha.wordpress.com/post", "");
    auto r = h.crawl("alpha.wordpress.com");
    EXPECT_EQ(r.pages_visited.size(), 2u);
    EXPECT_TRUE(r.external_edges.contains(D("beta.wordpress.com")));
    EXPECT_EQ(h.site.request_count("https://beta.wordpress.com/"), 0u);
}

TEST(DeepCrawl, FallsBackToHttpHomepage) {
    Harness h;
    h.site.add_failure("https://plain.test/", "tls");
    h.site.add_page("http://plain.test/", anchor("/next"));
    h.site.add_page("http://plain.test/next", "");
    auto r = h.crawl("plain.test");
    EXPECT_EQ(r.pages_visited, (std::set<std::string>{"http://plain.test/", "http://plain.test/next"}));
    EXPECT_EQ(r.homepage_status, "200");
}

TEST(DeepCrawl, UnreachableHomepageGivesEmptyResult) {
    Harness h;
    h.site.add_failure("https://down.test/", "connect");
    h.site.add_failure("http://down.test/", "connect");
    auto r = h.crawl("down.test");
    EXPECT_TRUE(r.pages_visited.empty());
    EXPECT_TRUE(r.collected_urls.empty());
    EXPECT_TRUE(r.external_edges.empty());
    EXPECT_EQ(r.homepage_status, "error:connect");
}

TEST(DeepCrawl, FollowsInternalRedirectsAndStopsAtExternalOnes) {
    Harness h;
    h.site.add_page("https://r.test/", anchor("/old") + anchor("/gone"));
    h.site.add_redirect("https://r.test/old", "/new");
    h.site.add_page("https://r.test/new", "");
    h.site.add_redirect("https://r.test/gone", "https://elsewhere.test/landing");
    auto r = h.crawl("r.test");
    EXPECT_TRUE(r.pages_visited.contains("https://r.test/new"));
    EXPECT_TRUE(r.external_edges.contains(D("elsewhere.test")));
    EXPECT_EQ(h.site.request_count("https://elsewhere.test/landing"), 0u);
}

TEST(DeepCrawl, RedirectLoopIsBounded) {
    Harness h;
    h.site.add_page("https://loop.test/", anchor("/a"));
    for (int i = 0; i < 10; ++i)
        h.site.add_redirect("https://loop.test/r" + std::to_string(i), "/r" + std::to_string(i + 1));
    h.site.add_redirect("https://loop.test/a", "/r0");
    auto r = h.crawl("loop.test");
    EXPECT_LE(h.site.requests().size(), 1u + 1u + 5u);
    EXPECT_FALSE(r.pages_visited.contains("https://loop.test/r9"));
}

TEST(DeepCrawl, PageBudgetCapsVisitedPages) {
    Harness h;
    linkmap::testing::add_mesh_site(h.site, "mesh.test", 10);
    h.config.max_pages_per_domain = 4;
    EXPECT_EQ(h.crawl("mesh.test").pages_visited.size(), 4u);
}

TEST(DeepCrawl, RobotsDisallowedPagesAreSkippedAndCounted) {
    Harness h;
    h.config.respect_robots = true;
    h.site.add_page("https://bot.test/robots.txt", "User-agent: *\nDisallow: /private\n");
    h.site.add_page("https://bot.test/", anchor("/private/a") + anchor("/public"));
    h.site.add_page("https://bot.test/public", "");
    h.site.add_page("https://bot.test/private/a", "");
    auto r = h.crawl("bot.test");
    EXPECT_EQ(r.pages_visited, (std::set<std::string>{"https://bot.test/", "https://bot.test/public"}));
    EXPECT_EQ(r.robots_skipped, 1u);
    EXPECT_EQ(h.site.request_count("https://bot.test/private/a"), 0u);
    EXPECT_EQ(h.site.request_count("https://bot.test/robots.txt"), 1u);
}

TEST(DeepCrawl, PerHostDelayIsRespected) {
    Harness h;
    h.config.per_host_min_delay_ms = 1000;
    h.config.max_concurrency = 4;
    linkmap::testing::add_mesh_site(h.site, "mesh.test", 6);
    h.site.add_page("https://mesh.test/p1", anchor("https://www.mesh.test/w"));
    h.site.add_page("https://www.mesh.test/w", "");
    h.crawl("mesh.test");
    std::map<std::string, std::vector<Millis>> per_host;
    for (const auto& rec : h.log.records()) per_host[parse_absolute_url(rec.url)->host].push_back(rec.fetched_at);
    ASSERT_GE(per_host["mesh.test"].size(), 6u);
    for (auto& [host, times] : per_host) {
        std::sort(times.begin(), times.end());
        for (std::size_t i = 1; i < times.size(); ++i) EXPECT_GE(times[i] - times[i - 1], 1000) << host;
    }
}

TEST(DeepCrawl, ResultIndependentOfConcurrency) {
    auto run = [](int concurrency) {
        Harness h;
        h.config.max_concurrency = concurrency;
        linkmap::testing::add_mesh_site(h.site, "mesh.test", 7);
        h.site.add_page("https://mesh.test/p2", anchor("https://a.mesh.test/") + anchor("https://b.mesh.test/"));
        h.site.add_page("https://a.mesh.test/", anchor("https://x.org/") + anchor("https://b.mesh.test/deep"));
        h.site.add_page("https://b.mesh.test/", anchor("https://y.org/"));
        h.site.add_page("https://b.mesh.test/deep", anchor("https://z.org/"));
        auto r = h.crawl("mesh.test");
        return std::tuple(r.pages_visited, r.collected_urls, r.graph().nodes());
    };
    auto baseline = run(1);
    for (int c : {2, 8})
        for (int rep = 0; rep < 3; ++rep) EXPECT_EQ(run(c), baseline);
}

TEST(DeepCrawl, FetchLogJsonLines) {
    Harness h;
    h.site.add_page("https://a.test/", "hello");
    h.crawl("a.test");
    std::ostringstream out;
    h.log.write_jsonl(out);
    auto j = nlohmann::json::parse(out.str());
    EXPECT_EQ(j["url"], "https://a.test/");
    EXPECT_EQ(j["status"], "200");
    EXPECT_EQ(j["bytes"], 5);
    EXPECT_TRUE(j.contains("fetched_at"));
    EXPECT_TRUE(j.contains("duration_ms"));
}

TEST(DeepCrawl, InvalidConfigRejected) {
    Harness h;
    h.config.max_hops = -1;
    EXPECT_THROW(h.crawl("a.test"), InvalidArgument);
}

TEST(HopExpand, TwoHopChain) {
    Harness h;
    h.site.add_page("https://seed.test/", anchor("https://b.com/x"));
    h.site.add_page("https://b.com/x", anchor("https://c.com/y"));
    auto r = h.expand({"https://seed.test/"});
    EXPECT_EQ(r.hop1_links, (std::set<std::string>{"https://b.com/x"}));
    EXPECT_EQ(r.hop2_links, (std::set<std::string>{"https://c.com/y"}));
    EXPECT_EQ(r.graph.edge_count(), 2u);
    EXPECT_TRUE(r.graph.has_edge(D("seed.test"), D("b.com")));
    EXPECT_TRUE(r.graph.has_edge(D("b.com"), D("c.com")));
    EXPECT_EQ(h.site.request_count("https://c.com/y"), 0u);
}

TEST(HopExpand, SeedWithoutLinks) {
    Harness h;
    h.site.add_page("https://seed.test/", "<p>nothing here</p>");
    auto r = h.expand({"https://seed.test/"});
    EXPECT_TRUE(r.hop1_links.empty());
    EXPECT_TRUE(r.hop2_links.empty());
    EXPECT_EQ(r.graph.edge_count(), 0u);
}

TEST(HopExpand, SharedLinkFetchedOnce) {
    Harness h;
    h.site.add_page("https://s1.test/", anchor("https://b.com/x"));
    h.site.add_page("https://s2.test/", anchor("https://b.com/x"));
    h.site.add_page("https://b.com/x", "");
    auto r = h.expand({"https://s1.test/", "https://s2.test/"});
    EXPECT_EQ(r.hop1_links.size(), 1u);
    EXPECT_EQ(h.site.request_count("https://b.com/x"), 1u);
    EXPECT_TRUE(r.graph.has_edge(D("s1.test"), D("b.com")));
    EXPECT_TRUE(r.graph.has_edge(D("s2.test"), D("b.com")));
}

TEST(HopExpand, FailuresAreRecordedNotFatal) {
    Harness h;
    h.site.add_page("https://seed.test/", anchor("https://dead.com/") + anchor("https://alive.com/"));
    h.site.add_failure("https://dead.com/", "timeout");
    h.site.add_page("https://alive.com/", anchor("https://deeper.com/"));
    auto r = h.expand({"https://seed.test/", "not a url"});
    EXPECT_EQ(r.failures.at("https://dead.com/"), "error:timeout");
    EXPECT_TRUE(r.failures.contains("not a url"));
    EXPECT_TRUE(r.graph.has_edge(D("alive.com"), D("deeper.com")));
}

TEST(HopExpand, InventoryRecordsHopAndSource) {
    Harness h;
    h.site.add_page("https://seed.test/", anchor("https://b.com/x"));
    h.site.add_page("https://b.com/x", anchor("https://c.com/y"));
    auto r = h.expand({"https://seed.test/"});
    ASSERT_EQ(r.inventory.size(), 2u);
    EXPECT_EQ(r.inventory[0].hop, 1);
    EXPECT_EQ(r.inventory[0].source, "https://seed.test/");
    EXPECT_EQ(r.inventory[1].hop, 2);
    EXPECT_EQ(r.inventory[1].domain, "c.com");
    std::ostringstream out;
    write_inventory_jsonl(out, r.inventory);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
              R"({"url":"https://b.com/x","domain":"b.com","hop":1,"source":"https://seed.test/"})");
}

TEST(HopExpand, EmptySeedListRejected) {
    Harness h;
    EXPECT_THROW(h.expand({}), InvalidArgument);
}
