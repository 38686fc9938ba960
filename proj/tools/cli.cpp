#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "linkmap/centrality.hpp"
#include "linkmap/config.hpp"
#include "linkmap/crawler.hpp"
#include "linkmap/discovery.hpp"
#include "linkmap/error.hpp"
#include "linkmap/features.hpp"
#include "linkmap/forest.hpp"
#include "linkmap/io.hpp"
#include "linkmap/labels.hpp"
#include "linkmap/service.hpp"
#include "linkmap/stats.hpp"

namespace linkmap::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

/// Missing or contradictory arguments; exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    return in;
}

template <class Fn>
void write_output(const std::string& path, Fn&& fn) {
    std::ostringstream buf;
    fn(buf);
    write_file_atomic(path, buf.str());
}

std::string pick(const std::string& flag, const std::string& configured, const char* what) {
    if (!flag.empty()) return flag;
    if (!configured.empty()) return configured;
    throw UsageError(std::string("no ") + what + " given (flag or [paths] entry)");
}

/// One domain per line; blank lines and `#` comments skipped.
DomainSet read_domain_list(const std::string& path) {
    DomainSet out;
    auto in = open_in(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        auto start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        try {
            out.insert(DomainKey::from_canonical(line.substr(start)));
        } catch (const InvalidArgument& e) {
            throw ParseError(path, lineno, e.what());
        }
    }
    return out;
}

std::vector<double> read_numbers(const std::string& path) {
    std::vector<double> out;
    auto in = open_in(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        if (line.empty()) continue;
        double v = 0;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc() || ptr != line.data() + line.size()) throw ParseError(path, lineno, "not a number: " + line);
        out.push_back(v);
    }
    return out;
}

struct Context {
    std::string config_path;
    std::optional<ProjectConfig> config;
    std::ostream& out;
    std::ostream& err;

    const ProjectConfig& project() {
        if (!config) config = config_path.empty() ? ProjectConfig{} : load_project_config(config_path);
        return *config;
    }

    /// Seeds plus every domain whose active label is confirmed_community.
    DomainSet confirmed(const std::string& labels_flag) {
        const auto& c = project();
        DomainSet set(c.seeds.begin(), c.seeds.end());
        const auto labels = labels_flag.empty() ? c.paths.labels : labels_flag;
        if (!labels.empty() && fs::exists(labels)) {
            LabelStore store(labels);
            for (const auto& d : store.with_label(ReviewLabel::ConfirmedCommunity)) set.insert(d);
        }
        return set;
    }
};

HttpFetcherOptions fetcher_options(const CrawlConfig& crawl, const std::vector<std::string>& resolve) {
    HttpFetcherOptions o;
    o.user_agent = crawl.user_agent;
    o.timeout_ms = crawl.fetch_timeout_ms;
    o.max_body_bytes = crawl.max_body_bytes;
    for (const auto& r : resolve) {
        auto eq = r.find('=');
        if (eq == std::string::npos) throw UsageError("--resolve expects host=ip:port, got " + r);
        o.resolve_overrides[r.substr(0, eq)] = r.substr(eq + 1);
    }
    return o;
}

void add_crawl_seeds(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("crawl-seeds", "Fetch seed pages and their links two hops out");
    auto pages = std::make_shared<std::string>();
    auto graph_out = std::make_shared<std::string>();
    auto inventory = std::make_shared<std::string>();
    auto resolve = std::make_shared<std::vector<std::string>>();
    cmd->add_option("--pages", *pages, "File of seed page URLs (default: each seed's homepage)");
    cmd->add_option("--out", *graph_out, "Graph file to write");
    cmd->add_option("--inventory", *inventory, "URL inventory JSON-lines to write");
    cmd->add_option("--resolve", *resolve, "host=ip:port connection override");
    cmd->callback([=, &ctx] {
        const auto& c = ctx.project();
        std::vector<std::string> seed_pages;
        if (!pages->empty()) {
            auto in = open_in(*pages);
            std::string line;
            while (std::getline(in, line))
                if (!line.empty() && line[0] != '#') seed_pages.push_back(line);
        } else {
            c.require_seeds();
            for (const auto& s : c.seeds) seed_pages.push_back("https://" + s.str() + "/");
        }
        const auto out_path = pick(*graph_out, c.paths.graph, "output graph");
        HttpFetcher http(fetcher_options(c.crawl, *resolve));
        SystemClock clock;
        PoliteFetcher polite(http, clock, {c.crawl.per_host_min_delay_ms, c.crawl.respect_robots, c.crawl.user_agent});
        auto expansion = hop_expand(seed_pages, polite, c.crawl);
        save_hlg(out_path, expansion.graph);
        const auto inv = inventory->empty() ? c.paths.inventory : *inventory;
        if (!inv.empty()) write_output(inv, [&](std::ostream& o) { write_inventory_jsonl(o, expansion.inventory); });
        ojson j;
        j["seed_pages"] = seed_pages.size();
        j["hop1_links"] = expansion.hop1_links.size();
        j["hop2_links"] = expansion.hop2_links.size();
        j["failures"] = expansion.failures.size();
        j["nodes"] = expansion.graph.node_count();
        j["edges"] = expansion.graph.edge_count();
        ctx.out << j.dump() << "\n";
    });
}

void add_deep_crawl(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("deep-crawl", "Breadth-first crawl of each domain's internal pages");
    auto domains = std::make_shared<std::string>();
    auto partners = std::make_shared<bool>(false);
    auto graph_in = std::make_shared<std::string>();
    auto graph_out = std::make_shared<std::string>();
    auto inventory = std::make_shared<std::string>();
    auto resolve = std::make_shared<std::vector<std::string>>();
    cmd->add_option("--domains", *domains, "File of domains to crawl (default: the seeds)");
    cmd->add_flag("--partners", *partners, "Crawl the seeds' bidirectional partners in the input graph");
    cmd->add_option("--graph", *graph_in, "Existing graph to extend");
    cmd->add_option("--out", *graph_out, "Graph file to write (default: the input graph)");
    cmd->add_option("--inventory", *inventory, "URL inventory JSON-lines to write");
    cmd->add_option("--resolve", *resolve, "host=ip:port connection override");
    cmd->callback([=, &ctx] {
        const auto& c = ctx.project();
        const auto in_path = graph_in->empty() ? c.paths.graph : *graph_in;
        HyperlinkGraph graph;
        if (!in_path.empty() && fs::exists(in_path)) graph = load_hlg(in_path);
        DomainSet targets;
        if (!domains->empty()) {
            targets = read_domain_list(*domains);
        } else {
            c.require_seeds();
            DomainSet seeds(c.seeds.begin(), c.seeds.end());
            targets = *partners ? bidirectional_partners(graph, seeds) : seeds;
        }
        const auto out_path = pick(*graph_out, in_path, "output graph");
        HttpFetcher http(fetcher_options(c.crawl, *resolve));
        SystemClock clock;
        PoliteFetcher polite(http, clock, {c.crawl.per_host_min_delay_ms, c.crawl.respect_robots, c.crawl.user_agent});
        std::vector<UrlInventoryEntry> all_inventory;
        std::size_t pages = 0;
        for (const auto& d : targets) {
            auto result = deep_crawl(d, polite, c.crawl);
            pages += result.pages_visited.size();
            graph = merge(graph, result.graph());
            all_inventory.insert(all_inventory.end(), result.inventory.begin(), result.inventory.end());
            ctx.err << d.str() << ": " << result.pages_visited.size() << " pages, " << result.external_edges.size()
                    << " external domains, homepage " << result.homepage_status << "\n";
        }
        save_hlg(out_path, graph);
        const auto inv = inventory->empty() ? c.paths.inventory : *inventory;
        if (!inv.empty()) write_output(inv, [&](std::ostream& o) { write_inventory_jsonl(o, all_inventory); });
        ojson j;
        j["domains"] = targets.size();
        j["pages"] = pages;
        j["nodes"] = graph.node_count();
        j["edges"] = graph.edge_count();
        ctx.out << j.dump() << "\n";
    });
}

void add_graph(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("graph", "Graph file utilities");
    cmd->require_subcommand(1);
    auto* merge_cmd = cmd->add_subcommand("merge", "Union of graph files");
    auto inputs = std::make_shared<std::vector<std::string>>();
    auto out = std::make_shared<std::string>();
    merge_cmd->add_option("inputs", *inputs, "Graph files")->required();
    merge_cmd->add_option("-o,--out", *out, "Merged graph file")->required();
    merge_cmd->callback([=, &ctx] {
        HyperlinkGraph g;
        for (const auto& p : *inputs) g = merge(g, load_hlg(p));
        save_hlg(*out, g);
        ctx.out << "nodes " << g.node_count() << "\nedges " << g.edge_count() << "\n";
    });
    auto* stats_cmd = cmd->add_subcommand("stats", "Node and edge counts");
    auto file = std::make_shared<std::string>();
    stats_cmd->add_option("graph", *file, "Graph file");
    stats_cmd->callback([=, &ctx] {
        auto g = load_hlg(pick(*file, ctx.project().paths.graph, "graph"));
        std::size_t isolated = 0;
        for (const auto& d : g.nodes()) isolated += g.out_neighbors(d).empty() && g.in_neighbors(d).empty();
        ctx.out << "nodes " << g.node_count() << "\nedges " << g.edge_count() << "\nisolated " << isolated << "\n";
    });
}

void add_discover(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("discover", "Rank candidates by neighborhood overlap with confirmed domains");
    auto graph = std::make_shared<std::string>();
    auto confirmed = std::make_shared<std::string>();
    auto labels = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto k = std::make_shared<int>(0);
    auto mode = std::make_shared<std::string>();
    auto threads = std::make_shared<unsigned>(0);
    cmd->add_option("--graph", *graph, "Graph file");
    cmd->add_option("--confirmed", *confirmed, "File of confirmed domains (default: seeds plus confirmed labels)");
    cmd->add_option("--labels", *labels, "Label store");
    cmd->add_option("--out", *out, "Candidate CSV to write");
    cmd->add_option("-k", *k, "Candidates kept per confirmed domain");
    cmd->add_option("--mode", *mode, "Neighborhood: out, in or union");
    cmd->add_option("--threads", *threads, "Worker threads (0 = all cores)");
    cmd->callback([=, &ctx] {
        const auto& c = ctx.project();
        auto g = load_hlg(pick(*graph, c.paths.graph, "graph"));
        DomainSet set = confirmed->empty() ? ctx.confirmed(*labels) : read_domain_list(*confirmed);
        if (set.empty()) throw UsageError("no confirmed domains: give --confirmed or seeds in the config");
        DiscoveryOptions o;
        o.k = *k > 0 ? *k : c.discovery.k;
        o.mode = mode->empty() ? c.discovery.mode : parse_neighborhood_mode(*mode);
        o.threads = *threads > 0 ? *threads : c.discovery.threads;
        auto list = candidate_pipeline(g, set, o);
        write_output(pick(*out, c.paths.candidates, "candidate output"), [&](std::ostream& s) { write_candidates_csv(s, list); });
        ctx.out << candidates_summary_json(list) << "\n";
    });
}

void add_hits(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("hits", "Hub and authority scores");
    auto graph = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto top = std::make_shared<std::size_t>(10);
    auto norm = std::make_shared<std::string>("l2");
    auto tol = std::make_shared<double>(1e-10);
    auto max_iter = std::make_shared<int>(1000);
    auto threads = std::make_shared<unsigned>(1);
    cmd->add_option("--graph", *graph, "Graph file");
    cmd->add_option("--out", *out, "Score CSV to write");
    cmd->add_option("--top", *top, "Rows in the printed hub and authority tables");
    cmd->add_option("--norm", *norm, "Per-iteration normalization: l2 or l1");
    cmd->add_option("--tol", *tol, "Convergence tolerance");
    cmd->add_option("--max-iter", *max_iter, "Iteration cap");
    cmd->add_option("--threads", *threads, "Worker threads");
    cmd->callback([=, &ctx] {
        const auto& c = ctx.project();
        auto g = load_hlg(pick(*graph, c.paths.graph, "graph"));
        HitsOptions o;
        if (*norm == "l1") o.norm = HitsNorm::L1;
        else if (*norm != "l2") throw UsageError("--norm must be l1 or l2");
        o.tol = *tol;
        o.max_iter = *max_iter;
        o.threads = *threads;
        auto scores = hits(g, o);
        const auto path = out->empty() ? c.paths.hits : *out;
        if (!path.empty()) write_output(path, [&](std::ostream& s) { write_hits_csv(s, scores); });
        if (!scores.converged) ctx.err << "warning: no convergence after " << scores.iterations << " iterations\n";
        if (*top > 0) {
            ctx.out << "top hubs\n";
            write_ranked_table(ctx.out, top_hubs(scores, *top));
            ctx.out << "top authorities\n";
            write_ranked_table(ctx.out, top_authorities(scores, *top));
        }
    });
}

void add_features(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("features", "Classifier feature matrices");
    cmd->require_subcommand(1);
    auto* build = cmd->add_subcommand("build", "Build the feature spec and labeled matrix");
    auto graph = std::make_shared<std::string>();
    auto community = std::make_shared<std::string>();
    auto store = std::make_shared<std::string>();
    auto classes = std::make_shared<std::string>();
    auto metadata = std::make_shared<std::string>();
    auto k = std::make_shared<std::size_t>(100);
    auto max_registrars = std::make_shared<std::size_t>(20);
    auto out_dir = std::make_shared<std::string>();
    build->add_option("--graph", *graph, "Graph file");
    build->add_option("--community", *community, "File of community domains (default: seeds plus confirmed labels)");
    build->add_option("--labels", *store, "Label store");
    build->add_option("--classes", *classes, "CSV domain,label with misinformation/authentic")->required();
    build->add_option("--metadata", *metadata, "Registration metadata CSV");
    build->add_option("-k", *k, "Top in- and out-linked outsiders kept");
    build->add_option("--max-registrars", *max_registrars, "Registrar one-hot width");
    build->add_option("--out-dir", *out_dir, "Directory for featurespec.json and dataset.csv")->required();
    build->callback([=, &ctx] {
        const auto& c = ctx.project();
        auto g = load_hlg(pick(*graph, c.paths.graph, "graph"));
        DomainSet members = community->empty() ? ctx.confirmed(*store) : read_domain_list(*community);
        if (members.empty()) throw UsageError("no community domains");
        auto spec = build_connection_feature_spec(g, members, *k);
        std::optional<MetadataTable> meta;
        const auto meta_path = metadata->empty() ? c.paths.metadata : *metadata;
        if (!meta_path.empty() && fs::exists(meta_path)) {
            meta = load_metadata_csv(meta_path);
            spec.metadata_features = metadata_feature_names(*meta, *max_registrars);
        }
        auto in = open_in(*classes);
        auto labels = read_class_labels_csv(in, *classes);
        auto built = build_dataset(g, labels, spec, meta ? &*meta : nullptr);
        fs::create_directories(*out_dir);
        write_file_atomic((fs::path(*out_dir) / "featurespec.json").string(), feature_spec_json(spec));
        write_output((fs::path(*out_dir) / "dataset.csv").string(), [&](std::ostream& s) { write_dataset_csv(s, built.data); });
        for (const auto& d : built.missing_from_graph) ctx.err << "not in graph: " << d.str() << "\n";
        ojson j;
        j["connection_targets"] = spec.connection_targets.size();
        j["metadata_features"] = spec.metadata_features.size();
        j["rows"] = built.data.rows.size();
        j["positives"] = built.data.positives();
        j["missing_from_graph"] = built.missing_from_graph.size();
        ctx.out << j.dump() << "\n";
    });
}

LabeledDataset load_dataset(const std::string& dir_or_file, const std::string& spec_flag, FeatureSpec* spec_out = nullptr) {
    fs::path dataset = dir_or_file;
    fs::path spec_path = spec_flag;
    if (fs::is_directory(dataset)) {
        if (spec_path.empty()) spec_path = dataset / "featurespec.json";
        dataset /= "dataset.csv";
    }
    if (spec_path.empty()) spec_path = dataset.parent_path() / "featurespec.json";
    auto spec = parse_feature_spec_json(read_file(spec_path.string()));
    auto in = open_in(dataset.string());
    auto data = read_dataset_csv(in, spec, dataset.string());
    if (spec_out) *spec_out = spec;
    return data;
}

void add_train(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("train", "Split, search hyperparameters, and fit the random forest");
    auto dataset = std::make_shared<std::string>();
    auto spec = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto iters = std::make_shared<int>(0);
    auto folds = std::make_shared<int>(0);
    auto frac = std::make_shared<double>(0);
    auto seed = std::make_shared<std::optional<std::uint64_t>>();
    auto threads = std::make_shared<unsigned>(0);
    cmd->add_option("--dataset", *dataset, "dataset.csv or the features directory")->required();
    cmd->add_option("--spec", *spec, "featurespec.json (default: next to the dataset)");
    cmd->add_option("--out", *out, "Model file")->required();
    cmd->add_option("--search-iters", *iters, "Random search draws");
    cmd->add_option("--folds", *folds, "Cross-validation folds");
    cmd->add_option("--train-frac", *frac, "Training share of each class");
    cmd->add_option("--seed", *seed, "Master seed");
    cmd->add_option("--threads", *threads, "Worker threads (0 = all cores)");
    cmd->callback([=, &ctx] {
        const auto& c = ctx.project();
        auto data = load_dataset(*dataset, *spec);
        SearchOptions o;
        o.search_iters = *iters > 0 ? *iters : c.classifier.search_iters;
        o.folds = *folds > 0 ? *folds : c.classifier.folds;
        o.master_seed = seed->value_or(c.classifier.master_seed);
        o.threads = *threads > 0 ? *threads : c.classifier.threads;
        const double train_frac = *frac > 0 ? *frac : c.classifier.train_frac;
        auto [train, test] = split_train_test(data, train_frac, o.master_seed);
        auto result = train_random_forest(train, o);
        for (const auto& r : test.rows) result.model.holdout.push_back(r.domain);
        save_forest(*out, result.model);
        const auto& best = result.trials[result.best];
        ojson j;
        j["train_rows"] = train.rows.size();
        j["holdout_rows"] = test.rows.size();
        j["cv_accuracy"] = best.mean_accuracy;
        j["n_trees"] = best.params.n_trees;
        j["max_depth"] = best.params.max_depth ? ojson(*best.params.max_depth) : ojson(nullptr);
        j["min_samples_leaf"] = best.params.min_samples_leaf;
        j["features_per_split"] = to_string(best.params.features_per_split);
        ctx.out << j.dump() << "\n";
    });
}

void add_evaluate(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("evaluate", "Score a model on its holdout rows");
    auto model_path = std::make_shared<std::string>();
    auto dataset = std::make_shared<std::string>();
    auto spec = std::make_shared<std::string>();
    auto all_rows = std::make_shared<bool>(false);
    auto out = std::make_shared<std::string>();
    auto curves = std::make_shared<std::string>();
    auto top = std::make_shared<std::size_t>(20);
    cmd->add_option("--model", *model_path, "Model file")->required();
    cmd->add_option("--dataset", *dataset, "dataset.csv or the features directory")->required();
    cmd->add_option("--spec", *spec, "featurespec.json (default: next to the dataset)");
    cmd->add_flag("--all", *all_rows, "Score every row instead of the stored holdout");
    cmd->add_option("--out", *out, "Report JSON (default: stdout)");
    cmd->add_option("--curves", *curves, "ROC and PR points CSV");
    cmd->add_option("--top", *top, "Feature importances listed");
    cmd->callback([=, &ctx] {
        auto model = load_forest(*model_path);
        auto data = load_dataset(*dataset, *spec);
        if (!*all_rows && !model.holdout.empty()) {
            std::set<DomainKey> keep(model.holdout.begin(), model.holdout.end());
            std::erase_if(data.rows, [&](const LabeledRow& r) { return !keep.contains(r.domain); });
            if (data.rows.size() != keep.size())
                throw InvalidArgument("dataset lacks " + std::to_string(keep.size() - data.rows.size()) + " holdout rows");
        }
        auto report = evaluate_model(model, data, *top);
        auto text = evaluation_json(report);
        if (out->empty()) ctx.out << text << "\n";
        else write_file_atomic(*out, text + "\n");
        if (!curves->empty()) write_file_atomic(*curves, curve_points_csv(report));
        if (!out->empty())
            ctx.out << "rows " << report.rows << "\nroc_auc " << format_double(report.roc_auc) << "\npr_auc "
                    << format_double(report.pr_auc) << "\n";
    });
}

void add_stats(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("stats", "Statistical tests and series");
    cmd->require_subcommand(1);

    auto* mwu = cmd->add_subcommand("mwu", "Mann-Whitney U test on two samples");
    auto a = std::make_shared<std::string>();
    auto b = std::make_shared<std::string>();
    mwu->add_option("a", *a, "File with one number per line")->required();
    mwu->add_option("b", *b, "File with one number per line")->required();
    mwu->callback([=, &ctx] {
        auto xa = read_numbers(*a), xb = read_numbers(*b);
        auto r = mann_whitney_u(xa, xb);
        ojson j;
        j["n_a"] = xa.size();
        j["n_b"] = xb.size();
        j["u_a"] = r.u_a;
        j["u_b"] = r.u_b;
        j["p_two_sided"] = r.p_two_sided;
        j["method"] = to_string(r.method);
        ctx.out << j.dump() << "\n";
    });

    auto* corr = cmd->add_subcommand("pearson", "Pearson correlation of two paired series");
    auto x = std::make_shared<std::string>();
    auto y = std::make_shared<std::string>();
    corr->add_option("x", *x, "File with one number per line")->required();
    corr->add_option("y", *y, "File with one number per line")->required();
    corr->callback([=, &ctx] {
        auto xs = read_numbers(*x), ys = read_numbers(*y);
        ojson j;
        j["n"] = xs.size();
        j["r"] = pearson(xs, ys);
        ctx.out << j.dump() << "\n";
    });

    auto* pop = cmd->add_subcommand("popularity", "Community members in the top ranks per snapshot");
    auto snapshots = std::make_shared<std::string>();
    auto community = std::make_shared<std::string>();
    auto labels = std::make_shared<std::string>();
    auto threshold = std::make_shared<int>(1000000);
    pop->add_option("--snapshots", *snapshots, "Directory of ranks-YYYY-MM-DD.csv files");
    pop->add_option("--community", *community, "File of community domains (default: seeds plus confirmed labels)");
    pop->add_option("--labels", *labels, "Label store");
    pop->add_option("--threshold", *threshold, "Rank cutoff");
    pop->callback([=, &ctx] {
        const auto& c = ctx.project();
        auto snaps = load_rank_snapshots(pick(*snapshots, c.paths.snapshots, "snapshots directory"), c.crawl.multi_tenant_suffixes);
        DomainSet members = community->empty() ? ctx.confirmed(*labels) : read_domain_list(*community);
        if (members.empty()) throw UsageError("no community domains");
        auto counts = popularity_series(snaps, members, *threshold);
        auto medians = median_rank_series(snaps, members);
        std::map<std::string, double> median_by_date;
        for (const auto& p : medians.points) median_by_date[format_date(p.date)] = p.median;
        ctx.out << "date,count,median_rank\n";
        for (const auto& p : counts) {
            auto key = format_date(p.date);
            auto it = median_by_date.find(key);
            ctx.out << key << "," << p.count << "," << (it == median_by_date.end() ? "" : format_double(it->second)) << "\n";
        }
    });
}

void add_serve(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("serve", "HTTP API and static files for candidate review");
    auto host = std::make_shared<std::string>("127.0.0.1");
    auto port = std::make_shared<int>(8080);
    cmd->add_option("--host", *host, "Bind address");
    cmd->add_option("--port", *port, "Port (0 picks a free one)");
    cmd->callback([=, &ctx] {
        const auto& c = ctx.project();
        auto graph = load_hlg(pick("", c.paths.graph, "graph"));
        auto cand_in = open_in(pick("", c.paths.candidates, "candidate list"));
        auto candidates = read_candidates_csv(cand_in, c.paths.candidates);
        LabelStore store(pick("", c.paths.labels, "label store"));
        ReviewServiceOptions o;
        o.seeds = c.seeds;
        o.plans_dir = c.paths.plans.empty() ? (fs::path(c.paths.labels).parent_path() / "plans").string() : c.paths.plans;
        if (!c.paths.hits.empty() && fs::exists(c.paths.hits)) {
            auto in = open_in(c.paths.hits);
            o.hits = read_hits_csv(in, c.paths.hits);
        }
        if (!c.paths.inventory.empty() && fs::exists(c.paths.inventory)) {
            auto in = open_in(c.paths.inventory);
            o.sample_urls = sample_urls_by_domain(read_inventory_jsonl(in, c.paths.inventory), o.max_sample_urls);
        }
        o.static_dir = c.paths.static_dir;
        ReviewService service(graph, std::move(candidates), store, o);
        httplib::Server server;
        service.mount(server);
        const int bound = *port == 0 ? server.bind_to_any_port(*host) : (server.bind_to_port(*host, *port) ? *port : -1);
        if (bound < 0) throw Error("cannot bind " + *host + ":" + std::to_string(*port));
        ctx.out << "listening on http://" << *host << ":" << bound << "\n" << std::flush;
        server.listen_after_bind();
    });
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hyperlink-graph discovery, centrality and classification pipeline", "linkmap"};
    app.require_subcommand(1);
    app.fallthrough();
    Context ctx{"", std::nullopt, out, err};
    app.add_option("--config", ctx.config_path, "Project TOML file");

    add_crawl_seeds(app, ctx);
    add_deep_crawl(app, ctx);
    add_graph(app, ctx);
    add_discover(app, ctx);
    add_hits(app, ctx);
    add_features(app, ctx);
    add_train(app, ctx);
    add_evaluate(app, ctx);
    add_stats(app, ctx);
    add_serve(app, ctx);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "linkmap: usage: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        err << "linkmap: usage: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "linkmap: error: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "linkmap: error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "linkmap: error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace linkmap::cli
