#pragma once

#include <cstdio>
#include <map>
#include <random>
#include <string>

#include "linkmap/features.hpp"

namespace linkmap::testing {

inline DomainKey named(const char* fmt, int i) {
    char buf[48];
    std::snprintf(buf, sizeof buf, fmt, i);
    return DomainKey::from_canonical(buf);
}

struct FeatureSpecFixture {
    HyperlinkGraph graph;
    DomainSet community;
    std::size_t expected_targets = 0;
};

/// Community of `members`; `a_only` + `both` outsiders link to 3..7 members,
/// `b_only` + `both` outsiders are linked from 3..7 members, and `decoys`
/// touch exactly one member each way so they lose every top-k cut.
inline FeatureSpecFixture feature_spec_fixture(int members, int a_only, int b_only, int both, int decoys) {
    FeatureSpecFixture f;
    for (int i = 0; i < members; ++i) {
        f.community.insert(named("q%04d.org", i));
        f.graph.add_node(named("q%04d.org", i));
    }
    auto member = [&](int i) { return named("q%04d.org", i % members); };
    auto link_in = [&](const DomainKey& o, int salt) {
        for (int k = 0; k < 3 + salt % 5; ++k) f.graph.add_edge(o, member(salt * 7 + k), 0);
    };
    auto link_out = [&](const DomainKey& o, int salt) {
        for (int k = 0; k < 3 + salt % 5; ++k) f.graph.add_edge(member(salt * 11 + k), o, 0);
    };
    for (int i = 0; i < a_only; ++i) link_in(named("a%04d.com", i), i);
    for (int i = 0; i < b_only; ++i) link_out(named("b%04d.com", i), i);
    for (int i = 0; i < both; ++i) {
        link_in(named("x%04d.com", i), i);
        link_out(named("x%04d.com", i), i + 1);
    }
    for (int i = 0; i < decoys; ++i) {
        f.graph.add_edge(named("z%04d.com", i), member(i), 0);
        f.graph.add_edge(member(i + 1), named("z%04d.com", i), 0);
    }
    f.expected_targets = static_cast<std::size_t>(a_only + b_only + both + members);
    return f;
}

struct ClassifierFixture {
    HyperlinkGraph graph;
    DomainSet community;
    std::map<DomainKey, ClassLabel> labels;
};

/// Labeled domains link to `planted` community members according to their
/// class (positives yes, negatives no) with each bit flipped with probability
/// `noise`, plus uninformative links to other members and to shared hubs.
inline ClassifierFixture classifier_fixture(int positives, int negatives, int planted, double noise, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    ClassifierFixture f;
    const int members = planted + 30, hubs = 50;
    for (int i = 0; i < members; ++i) f.community.insert(named("q%03d.org", i));
    for (int i = 0; i < members; ++i)
        for (int j = 0; j < members; ++j)
            if (i != j && coin(rng) < 0.3) f.graph.add_edge(named("q%03d.org", i), named("q%03d.org", j), 0);
    for (int h = 0; h < hubs; ++h)
        for (int i = 0; i < members; ++i) {
            if (coin(rng) < 0.2) f.graph.add_edge(named("h%03d.net", h), named("q%03d.org", i), 0);
            if (coin(rng) < 0.2) f.graph.add_edge(named("q%03d.org", i), named("h%03d.net", h), 0);
        }
    auto add_domain = [&](const DomainKey& d, bool positive) {
        f.graph.add_node(d);
        for (int p = 0; p < planted; ++p)
            if (positive != (coin(rng) < noise)) f.graph.add_edge(d, named("q%03d.org", p), 0);
        for (int i = planted; i < members; ++i)
            if (coin(rng) < 0.1) f.graph.add_edge(d, named("q%03d.org", i), 0);
        for (int h = 0; h < hubs; ++h)
            if (coin(rng) < 0.1) f.graph.add_edge(d, named("h%03d.net", h), 0);
        f.labels[d] = positive ? ClassLabel::Misinformation : ClassLabel::Authentic;
    };
    for (int i = 0; i < positives; ++i) add_domain(named("m%03d.com", i), true);
    for (int i = 0; i < negatives; ++i) add_domain(named("n%03d.com", i), false);
    return f;
}

} // namespace linkmap::testing
