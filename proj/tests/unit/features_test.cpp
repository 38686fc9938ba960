#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "classifier_fixtures.hpp"
#include "linkmap/error.hpp"
#include "linkmap/features.hpp"
#include "test_util.hpp"

using namespace linkmap;
using linkmap::testing::D;

TEST(FeatureSpec, DedupArithmetic) {
    // community {c1,c2,c3}; o1 and o2 link in, o2 and o3 are linked to
    HyperlinkGraph g;
    g.add_edge(D("o1.com"), D("c1.com"), 0);
    g.add_edge(D("o1.com"), D("c2.com"), 0);
    g.add_edge(D("o2.com"), D("c1.com"), 0);
    g.add_edge(D("c1.com"), D("o2.com"), 0);
    g.add_edge(D("c2.com"), D("o2.com"), 0);
    g.add_edge(D("c3.com"), D("o3.com"), 0);
    g.add_edge(D("o4.com"), D("c3.com"), 0);
    DomainSet community{D("c1.com"), D("c2.com"), D("c3.com")};
    auto spec = build_connection_feature_spec(g, community, 2);
    // A = [o1 (2), o2 (1, beats o4 by name)], B = [o2 (2), o3 (1)], overlap o2
    std::vector<DomainKey> expected{D("o1.com"), D("o2.com"), D("o3.com"), D("c1.com"), D("c2.com"), D("c3.com")};
    EXPECT_EQ(spec.connection_targets, expected);
    EXPECT_EQ(spec.connection_targets.size(), 2u + 2u + 3u - 1u);
}

TEST(FeatureSpec, IsolatedCommunityGivesSortedMembers) {
    HyperlinkGraph g;
    for (auto d : {"z.com", "a.com", "m.com"}) g.add_node(D(d));
    g.add_edge(D("a.com"), D("z.com"), 0);
    g.add_edge(D("x.com"), D("y.com"), 0);
    auto spec = build_connection_feature_spec(g, {D("z.com"), D("a.com"), D("m.com")});
    EXPECT_EQ(spec.connection_targets, (std::vector<DomainKey>{D("a.com"), D("m.com"), D("z.com")}));
}

TEST(FeatureSpec, FourHundredNinetyColumns) {
    auto f = linkmap::testing::feature_spec_fixture(324, 66, 66, 34, 50);
    auto spec = build_connection_feature_spec(f.graph, f.community, 100);
    EXPECT_EQ(spec.connection_targets.size(), 490u);
    EXPECT_EQ(spec.connection_targets.size(), f.expected_targets);
    DomainSet unique(spec.connection_targets.begin(), spec.connection_targets.end());
    EXPECT_EQ(unique.size(), spec.connection_targets.size());
    for (const auto& t : spec.connection_targets) EXPECT_NE(t.str()[0], 'z');
}

TEST(FeatureSpec, Errors) {
    HyperlinkGraph g;
    g.add_node(D("a.com"));
    EXPECT_THROW(build_connection_feature_spec(g, {}), InvalidArgument);
    EXPECT_THROW(build_connection_feature_spec(g, {D("a.com")}, 0), InvalidArgument);
    EXPECT_THROW(build_connection_feature_spec(g, {D("b.com")}), NotFound);
}

TEST(Featurize, DirectedBits) {
    HyperlinkGraph g;
    g.add_node(D("d.com"));
    g.add_edge(D("t2.com"), D("d.com"), 0);
    FeatureSpec spec{{D("t1.com"), D("t2.com")}, {}};
    EXPECT_EQ(featurize(g, D("d.com"), spec), (std::vector<double>{0, 0}));
    g.add_edge(D("d.com"), D("t1.com"), 0);
    g.add_edge(D("d.com"), D("t2.com"), 0);
    EXPECT_EQ(featurize(g, D("d.com"), spec), (std::vector<double>{1, 1}));
    EXPECT_EQ(featurize(g, D("t2.com"), spec), (std::vector<double>{0, 0}));
    EXPECT_THROW(featurize(g, D("nope.com"), spec), NotFound);
}

TEST(Metadata, ParseAndEncode) {
    std::istringstream in(
        "domain,registrar,time_since_registration,as_number\n"
        "a.com,GoDaddy,100,13335\n"
        "b.com,\"Name, Inc\",,\n"
        "c.com,GoDaddy,5.5,1\n");
    auto table = read_metadata_csv(in);
    ASSERT_EQ(table.size(), 3u);
    EXPECT_EQ(*table.at(D("a.com")).time_since_registration, 100);
    EXPECT_FALSE(table.at(D("b.com")).time_since_registration);
    EXPECT_EQ(*table.at(D("b.com")).registrar, "Name, Inc");

    auto names = metadata_feature_names(table, 1);
    EXPECT_EQ(names.size(), 6u * 2 + 2);
    EXPECT_EQ(names[names.size() - 2], "registrar=GoDaddy");

    HyperlinkGraph g;
    for (auto d : {"a.com", "b.com", "c.com"}) g.add_node(D(d));
    FeatureSpec spec{{}, names};
    auto xa = featurize(g, D("a.com"), spec, &table.at(D("a.com")));
    auto xb = featurize(g, D("b.com"), spec, &table.at(D("b.com")));
    EXPECT_EQ(xa[0], 100);  // time_since_registration
    EXPECT_EQ(xa[1], 0);    // ...:missing
    EXPECT_TRUE(std::isnan(xb[0]));
    EXPECT_EQ(xb[1], 1);
    EXPECT_EQ(xb[6], 5);  // domain_length falls back to the name
    EXPECT_EQ(xb[7], 0);
    EXPECT_EQ(xa[12], 1);
    EXPECT_EQ(xb[12], 0);
    EXPECT_EQ(xb[13], 0);
    auto none = featurize(g, D("c.com"), spec, nullptr);
    EXPECT_EQ(none[13], 1);
}

TEST(Metadata, RejectsBadInput) {
    std::istringstream unknown("domain,whois_color\na.com,red\n");
    EXPECT_THROW(read_metadata_csv(unknown), ParseError);
    std::istringstream negative("domain,time_since_update\na.com,-1\n");
    EXPECT_THROW(read_metadata_csv(negative), ParseError);
    std::istringstream bad("domain,as_number\na.com,12x\n");
    EXPECT_THROW(read_metadata_csv(bad), ParseError);
    std::istringstream dup("domain,as_number\na.com,1\na.com,2\n");
    EXPECT_THROW(read_metadata_csv(dup), ParseError);
}

TEST(Dataset, BuildWriteReadRoundTrip) {
    auto f = linkmap::testing::classifier_fixture(20, 20, 5, 0.1, 1);
    f.labels[D("absent.com")] = ClassLabel::Authentic;
    auto spec = build_connection_feature_spec(f.graph, f.community, 10);
    std::istringstream meta_in("domain,as_number,registrar\nm000.com,7,R\nn000.com,,\n");
    auto meta = read_metadata_csv(meta_in);
    spec.metadata_features = metadata_feature_names(meta);
    auto built = build_dataset(f.graph, f.labels, spec, &meta);
    EXPECT_EQ(built.missing_from_graph, std::vector<DomainKey>{D("absent.com")});
    EXPECT_EQ(built.data.rows.size(), 40u);
    EXPECT_EQ(built.data.positives(), 20u);

    std::ostringstream first;
    write_dataset_csv(first, built.data);
    std::istringstream in(first.str());
    auto back = read_dataset_csv(in, spec);
    std::ostringstream second;
    write_dataset_csv(second, back);
    EXPECT_EQ(first.str(), second.str());

    FeatureSpec other = spec;
    other.connection_targets.pop_back();
    std::istringstream again(first.str());
    EXPECT_THROW(read_dataset_csv(again, other), ParseError);

    auto spec_back = parse_feature_spec_json(feature_spec_json(spec));
    EXPECT_EQ(spec_back, spec);
}

TEST(ClassLabels, Csv) {
    std::istringstream in("domain,label\na.com,misinformation\nb.com,authentic\n");
    auto labels = read_class_labels_csv(in);
    EXPECT_EQ(labels.at(D("a.com")), ClassLabel::Misinformation);
    std::istringstream bad("domain,label\na.com,maybe\n");
    EXPECT_THROW(read_class_labels_csv(bad), ParseError);
}

namespace {

LabeledDataset balanced(int per_class) {
    LabeledDataset d;
    d.spec.connection_targets = {D("t.com")};
    for (int i = 0; i < 2 * per_class; ++i)
        d.rows.push_back({D(linkmap::testing::node_name(i)), {static_cast<double>(i % 2)}, i % 2});
    return d;
}

DomainSet domains(const LabeledDataset& d) {
    DomainSet out;
    for (const auto& r : d.rows) out.insert(r.domain);
    return out;
}

} // namespace

TEST(Split, StratifiedCounts) {
    auto [train, test] = split_train_test(balanced(100), 0.7, 1);
    EXPECT_EQ(train.positives(), 70u);
    EXPECT_EQ(train.negatives(), 70u);
    EXPECT_EQ(test.positives(), 30u);
    EXPECT_EQ(test.negatives(), 30u);
}

TEST(Split, SeedDeterminism) {
    auto data = balanced(50);
    auto a = split_train_test(data, 0.7, 9);
    auto b = split_train_test(data, 0.7, 9);
    auto c = split_train_test(data, 0.7, 10);
    EXPECT_EQ(domains(a.first), domains(b.first));
    EXPECT_NE(domains(a.first), domains(c.first));
    EXPECT_EQ(c.first.positives(), a.first.positives());
    DomainSet all = domains(a.first);
    for (const auto& d : domains(a.second)) EXPECT_TRUE(all.insert(d).second);
    EXPECT_EQ(all.size(), 100u);
}

TEST(Split, Errors) {
    EXPECT_THROW(split_train_test(balanced(5), 0.0, 1), InvalidArgument);
    EXPECT_THROW(split_train_test(balanced(5), 1.0, 1), InvalidArgument);
    EXPECT_THROW(split_train_test(balanced(1), 0.5, 1), InvalidArgument);
    auto [train, test] = split_train_test(balanced(2), 0.99, 1);
    EXPECT_EQ(test.rows.size(), 2u);
}
