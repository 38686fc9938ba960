#include "linkmap/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "linkmap/error.hpp"
#include "linkmap/io.hpp"
#include "linkmap/random.hpp"

namespace linkmap {

namespace {

const std::vector<std::string> kNumericFields = {"time_since_registration", "time_to_expiration", "time_since_update",
                                                 "domain_length",           "domain_life_span",   "as_number"};
const std::string kRegistrar = "registrar";
const std::string kMissingSuffix = ":missing";
const std::string kLinkPrefix = "link:";

using NumericField = std::optional<double> DomainMetadata::*;

NumericField numeric_field(std::string_view name) {
    if (name == "time_since_registration") return &DomainMetadata::time_since_registration;
    if (name == "time_to_expiration") return &DomainMetadata::time_to_expiration;
    if (name == "time_since_update") return &DomainMetadata::time_since_update;
    if (name == "domain_length") return &DomainMetadata::domain_length;
    if (name == "domain_life_span") return &DomainMetadata::domain_life_span;
    if (name == "as_number") return &DomainMetadata::as_number;
    return nullptr;
}

bool is_day_field(std::string_view name) { return name.starts_with("time_") || name == "domain_life_span"; }

std::vector<DomainKey> top_by_count(const std::map<DomainKey, std::size_t>& counts, std::size_t k) {
    std::vector<std::pair<DomainKey, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<DomainKey> out;
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].first);
    return out;
}

std::optional<double> metadata_value(const DomainKey& d, const DomainMetadata* meta, std::string_view field) {
    std::optional<double> v;
    if (meta) v = meta->*numeric_field(field);
    if (!v && field == "domain_length") v = static_cast<double>(d.str().size());
    return v;
}

double parse_number(const std::string& text, const std::string& source, std::size_t line) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError(source, line, "bad number '" + text + "'");
    }
}

std::vector<std::string> read_csv_record(std::istream& in, std::size_t& lineno) {
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) return parse_csv_line(line);
    }
    return {};
}

} // namespace

std::vector<std::string> FeatureSpec::column_names() const {
    std::vector<std::string> out;
    for (const auto& t : connection_targets) out.push_back(kLinkPrefix + t.str());
    out.insert(out.end(), metadata_features.begin(), metadata_features.end());
    return out;
}

FeatureSpec build_connection_feature_spec(const HyperlinkGraph& g, const DomainSet& community, std::size_t k) {
    if (community.empty()) throw InvalidArgument("feature spec: empty community");
    if (k < 1) throw InvalidArgument("feature spec: k must be >= 1");
    std::map<DomainKey, std::size_t> links_to_community, linked_from_community;
    for (const auto& c : community) {
        if (!g.contains(c)) throw NotFound("not-in-graph: " + c.str());
        for (const auto& o : g.in_neighbors(c))
            if (!community.contains(o)) ++links_to_community[o];
        for (const auto& o : g.out_neighbors(c))
            if (!community.contains(o)) ++linked_from_community[o];
    }
    FeatureSpec spec;
    DomainSet seen;
    auto append = [&](const DomainKey& d) {
        if (seen.insert(d).second) spec.connection_targets.push_back(d);
    };
    for (const auto& d : top_by_count(links_to_community, k)) append(d);
    for (const auto& d : top_by_count(linked_from_community, k)) append(d);
    for (const auto& d : community) append(d);
    return spec;
}

MetadataTable read_metadata_csv(std::istream& in, const std::string& source_name) {
    std::size_t lineno = 0;
    auto header = read_csv_record(in, lineno);
    if (header.empty()) throw ParseError(source_name, 1, "missing header");
    std::optional<std::size_t> domain_col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto& h = header[i];
        if (h == "domain") domain_col = i;
        else if (h != kRegistrar && !numeric_field(h)) throw ParseError(source_name, lineno, "unknown column '" + h + "'");
    }
    if (!domain_col) throw ParseError(source_name, lineno, "missing domain column");

    MetadataTable table;
    for (auto row = read_csv_record(in, lineno); !row.empty(); row = read_csv_record(in, lineno)) {
        if (row.size() != header.size()) throw ParseError(source_name, lineno, "wrong field count");
        DomainKey d;
        try {
            d = DomainKey::from_canonical(row[*domain_col]);
        } catch (const Error& e) {
            throw ParseError(source_name, lineno, e.what());
        }
        DomainMetadata meta;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i == *domain_col || row[i].empty()) continue;
            if (header[i] == kRegistrar) {
                meta.registrar = row[i];
                continue;
            }
            double v = parse_number(row[i], source_name, lineno);
            if (v < 0 && (is_day_field(header[i]) || header[i] == "domain_length"))
                throw ParseError(source_name, lineno, header[i] + " must be >= 0");
            meta.*numeric_field(header[i]) = v;
        }
        if (!table.emplace(d, std::move(meta)).second) throw ParseError(source_name, lineno, "duplicate domain " + d.str());
    }
    return table;
}

MetadataTable load_metadata_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    return read_metadata_csv(in, path);
}

std::vector<std::string> metadata_feature_names(const MetadataTable& table, std::size_t max_registrars) {
    std::vector<std::string> names;
    for (const auto& f : kNumericFields) {
        names.push_back(f);
        names.push_back(f + kMissingSuffix);
    }
    std::map<std::string, std::size_t> registrar_counts;
    for (const auto& [d, m] : table)
        if (m.registrar) ++registrar_counts[*m.registrar];
    std::vector<std::pair<std::string, std::size_t>> ranked(registrar_counts.begin(), registrar_counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (std::size_t i = 0; i < ranked.size() && i < max_registrars; ++i) names.push_back(kRegistrar + "=" + ranked[i].first);
    names.push_back(kRegistrar + kMissingSuffix);
    return names;
}

std::vector<double> featurize(const HyperlinkGraph& g, const DomainKey& d, const FeatureSpec& spec,
                              const DomainMetadata* meta) {
    const auto& out = g.out_neighbors(d);
    std::vector<double> x;
    x.reserve(spec.size());
    for (const auto& t : spec.connection_targets) x.push_back(out.contains(t) ? 1.0 : 0.0);
    for (const auto& name : spec.metadata_features) {
        if (name == kRegistrar + kMissingSuffix) {
            x.push_back(meta && meta->registrar ? 0.0 : 1.0);
        } else if (name.starts_with(kRegistrar + "=")) {
            x.push_back(meta && meta->registrar && *meta->registrar == name.substr(kRegistrar.size() + 1) ? 1.0 : 0.0);
        } else if (name.ends_with(kMissingSuffix) && numeric_field(name.substr(0, name.size() - kMissingSuffix.size()))) {
            x.push_back(metadata_value(d, meta, name.substr(0, name.size() - kMissingSuffix.size())) ? 0.0 : 1.0);
        } else if (numeric_field(name)) {
            x.push_back(metadata_value(d, meta, name).value_or(kMissing));
        } else {
            throw InvalidArgument("unknown metadata feature '" + name + "'");
        }
    }
    return x;
}

std::string to_string(ClassLabel label) { return label == ClassLabel::Misinformation ? "misinformation" : "authentic"; }

ClassLabel parse_class_label(std::string_view text) {
    if (text == "misinformation") return ClassLabel::Misinformation;
    if (text == "authentic") return ClassLabel::Authentic;
    throw InvalidArgument("class label must be misinformation or authentic, got '" + std::string(text) + "'");
}

std::size_t LabeledDataset::positives() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const LabeledRow& r) { return r.label == 1; }));
}

std::map<DomainKey, ClassLabel> read_class_labels_csv(std::istream& in, const std::string& source_name) {
    std::size_t lineno = 0;
    auto header = read_csv_record(in, lineno);
    if (header != std::vector<std::string>{"domain", "label"}) throw ParseError(source_name, 1, "expected header domain,label");
    std::map<DomainKey, ClassLabel> out;
    for (auto row = read_csv_record(in, lineno); !row.empty(); row = read_csv_record(in, lineno)) {
        if (row.size() != 2) throw ParseError(source_name, lineno, "expected domain,label");
        try {
            auto d = DomainKey::from_canonical(row[0]);
            if (!out.emplace(d, parse_class_label(row[1])).second)
                throw ParseError(source_name, lineno, "duplicate domain " + row[0]);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(source_name, lineno, e.what());
        }
    }
    return out;
}

DatasetBuild build_dataset(const HyperlinkGraph& g, const std::map<DomainKey, ClassLabel>& labels,
                           const FeatureSpec& spec, const MetadataTable* metadata) {
    DatasetBuild out;
    out.data.spec = spec;
    for (const auto& [d, label] : labels) {
        if (!g.contains(d)) {
            out.missing_from_graph.push_back(d);
            continue;
        }
        const DomainMetadata* meta = nullptr;
        if (metadata) {
            auto it = metadata->find(d);
            if (it != metadata->end()) meta = &it->second;
        }
        out.data.rows.push_back({d, featurize(g, d, spec, meta), static_cast<int>(label)});
    }
    return out;
}

void write_dataset_csv(std::ostream& out, const LabeledDataset& data) {
    out << "domain,label";
    for (const auto& name : data.spec.column_names()) out << ',' << csv_field(name);
    out << '\n';
    for (const auto& row : data.rows) {
        out << csv_field(row.domain.str()) << ',' << to_string(static_cast<ClassLabel>(row.label));
        for (double v : row.features) {
            out << ',';
            if (std::isnan(v)) continue;
            if (v == 0.0 || v == 1.0) out << (v == 1.0 ? '1' : '0');
            else out << format_double(v);
        }
        out << '\n';
    }
}

LabeledDataset read_dataset_csv(std::istream& in, const FeatureSpec& spec, const std::string& source_name) {
    std::size_t lineno = 0;
    auto header = read_csv_record(in, lineno);
    auto expected = spec.column_names();
    expected.insert(expected.begin(), {"domain", "label"});
    if (header != expected) throw ParseError(source_name, 1, "header does not match the feature spec");
    LabeledDataset data;
    data.spec = spec;
    for (auto row = read_csv_record(in, lineno); !row.empty(); row = read_csv_record(in, lineno)) {
        if (row.size() != expected.size()) throw ParseError(source_name, lineno, "wrong field count");
        LabeledRow r;
        try {
            r.domain = DomainKey::from_canonical(row[0]);
            r.label = static_cast<int>(parse_class_label(row[1]));
        } catch (const Error& e) {
            throw ParseError(source_name, lineno, e.what());
        }
        for (std::size_t i = 2; i < row.size(); ++i)
            r.features.push_back(row[i].empty() ? kMissing : parse_number(row[i], source_name, lineno));
        data.rows.push_back(std::move(r));
    }
    return data;
}

std::string feature_spec_json(const FeatureSpec& spec) {
    nlohmann::ordered_json j;
    j["format"] = "featurespec v1";
    j["connection_targets"] = nlohmann::json::array();
    for (const auto& t : spec.connection_targets) j["connection_targets"].push_back(t.str());
    j["metadata_features"] = spec.metadata_features;
    return j.dump(2) + "\n";
}

FeatureSpec parse_feature_spec_json(std::string_view text) {
    FeatureSpec spec;
    try {
        auto j = nlohmann::json::parse(text);
        if (j.at("format") != "featurespec v1") throw ParseError("feature spec: unsupported format");
        DomainSet seen;
        for (const auto& t : j.at("connection_targets")) {
            auto d = DomainKey::from_canonical(t.get<std::string>());
            if (!seen.insert(d).second) throw ParseError("feature spec: duplicate target " + d.str());
            spec.connection_targets.push_back(d);
        }
        spec.metadata_features = j.at("metadata_features").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("feature spec: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("feature spec: ") + e.what());
    }
    return spec;
}

std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& data, double train_frac,
                                                           std::uint64_t seed) {
    if (!(train_frac > 0 && train_frac < 1)) throw InvalidArgument("train_frac must be in (0, 1)");
    std::pair<LabeledDataset, LabeledDataset> out;
    out.first.spec = out.second.spec = data.spec;
    for (int cls : {0, 1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < data.rows.size(); ++i)
            if (data.rows[i].label == cls) idx.push_back(i);
        if (idx.size() < 2) throw InvalidArgument("split_train_test: class " + std::to_string(cls) + " has fewer than 2 rows");
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return data.rows[a].domain < data.rows[b].domain; });
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
        shuffle_in_place(idx, rng);
        auto n_train = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(idx.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        for (std::size_t i = 0; i < idx.size(); ++i) (i < n_train ? out.first : out.second).rows.push_back(data.rows[idx[i]]);
    }
    auto by_domain = [](const LabeledRow& a, const LabeledRow& b) { return a.domain < b.domain; };
    std::sort(out.first.rows.begin(), out.first.rows.end(), by_domain);
    std::sort(out.second.rows.begin(), out.second.rows.end(), by_domain);
    return out;
}

} // namespace linkmap
