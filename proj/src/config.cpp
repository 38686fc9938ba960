#include "linkmap/config.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include <toml.hpp>

#include "linkmap/error.hpp"
#include "linkmap/io.hpp"

namespace linkmap {

namespace fs = std::filesystem;

void ProjectConfig::require_seeds() const {
    if (seeds.empty()) throw InvalidArgument("config lists no seeds");
}

namespace {

class Reader {
public:
    Reader(const toml::table& table, std::string prefix, const std::string& source)
        : table_(table), prefix_(std::move(prefix)), source_(source) {}

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        const toml::node* node = table_.get(key);
        if (!node) return;
        if constexpr (std::is_same_v<T, bool>) {
            auto v = node->value_exact<bool>();
            if (!v) bad(key, "a boolean");
            out = *v;
        } else if constexpr (std::is_same_v<T, std::string>) {
            auto v = node->value_exact<std::string>();
            if (!v) bad(key, "a string");
            out = *v;
        } else if constexpr (std::is_floating_point_v<T>) {
            auto v = node->value<double>();
            if (!v) bad(key, "a number");
            out = *v;
        } else {
            auto v = node->value_exact<std::int64_t>();
            if (!v) bad(key, "an integer");
            if (*v < 0 && std::is_unsigned_v<T>) bad(key, "a non-negative integer");
            out = static_cast<T>(*v);
        }
    }

    std::vector<std::string> strings(const char* key) {
        seen_.insert(key);
        std::vector<std::string> out;
        const toml::node* node = table_.get(key);
        if (!node) return out;
        const auto* arr = node->as_array();
        if (!arr) bad(key, "an array of strings");
        for (const auto& item : *arr) {
            auto v = item.value_exact<std::string>();
            if (!v) bad(key, "an array of strings");
            out.push_back(*v);
        }
        return out;
    }

    bool has(const char* key) const { return table_.contains(key); }
    void mark(const char* key) { seen_.insert(key); }

    void finish() const {
        for (const auto& [key, node] : table_)
            if (!seen_.contains(std::string(key.str())))
                throw ParseError(source_ + ": unknown key " + prefix_ + std::string(key.str()));
    }

    [[noreturn]] void bad(const char* key, const char* what) const {
        throw ParseError(source_ + ": " + prefix_ + key + " must be " + what);
    }

private:
    const toml::table& table_;
    std::string prefix_;
    const std::string& source_;
    std::set<std::string> seen_;
};

const toml::table& section(const toml::table& root, const char* name, const std::string& source) {
    static const toml::table empty;
    const toml::node* node = root.get(name);
    if (!node) return empty;
    if (!node->is_table()) throw ParseError(source + ": [" + name + "] must be a table");
    return *node->as_table();
}

std::string resolve(const std::string& value, const std::string& base_dir, const char* key, const std::string& source) {
    if (value.empty()) return value;
    fs::path p(value);
    if (p.is_relative()) p = fs::path(base_dir) / p;
    p = p.lexically_normal();
    auto parent = p.parent_path();
    if (!parent.empty() && !fs::is_directory(parent))
        throw InvalidArgument(source + ": paths." + key + " is in a missing directory " + parent.string());
    return p.string();
}

} // namespace

ProjectConfig parse_project_config(std::string_view toml_text, const std::string& base_dir, const std::string& source) {
    toml::table root;
    try {
        root = toml::parse(toml_text, source);
    } catch (const toml::parse_error& e) {
        throw ParseError(source, e.source().begin.line, std::string(e.description()));
    }
    ProjectConfig c;
    Reader top(root, "", source);

    const auto& crawl_table = section(root, "crawl", source);
    Reader crawl(crawl_table, "crawl.", source);
    crawl.get("max_hops", c.crawl.max_hops);
    crawl.get("max_pages_per_domain", c.crawl.max_pages_per_domain);
    crawl.get("per_host_min_delay_ms", c.crawl.per_host_min_delay_ms);
    crawl.get("fetch_timeout_ms", c.crawl.fetch_timeout_ms);
    crawl.get("max_body_bytes", c.crawl.max_body_bytes);
    crawl.get("user_agent", c.crawl.user_agent);
    crawl.get("respect_robots", c.crawl.respect_robots);
    crawl.get("max_redirects", c.crawl.max_redirects);
    crawl.get("max_concurrency", c.crawl.max_concurrency);
    if (crawl.has("multi_tenant_suffixes")) {
        c.crawl.multi_tenant_suffixes.clear();
        for (auto& s : crawl.strings("multi_tenant_suffixes")) c.crawl.multi_tenant_suffixes.insert(s);
    } else {
        crawl.strings("multi_tenant_suffixes");
    }
    crawl.finish();
    c.crawl.validate();

    DomainCanonicalizer canon(c.crawl.multi_tenant_suffixes);
    for (const auto& s : top.strings("seeds")) {
        try {
            c.seeds.push_back(s.find("://") == std::string::npos ? canon.canonicalize_host(s) : canon.canonicalize_url(s));
        } catch (const InvalidArgument& e) {
            throw ParseError(source + ": seed " + s + ": " + e.what());
        }
    }
    std::sort(c.seeds.begin(), c.seeds.end());
    c.seeds.erase(std::unique(c.seeds.begin(), c.seeds.end()), c.seeds.end());

    Reader discovery(section(root, "discovery", source), "discovery.", source);
    discovery.get("k", c.discovery.k);
    std::string mode = to_string(c.discovery.mode);
    discovery.get("neighborhood", mode);
    c.discovery.mode = parse_neighborhood_mode(mode);
    discovery.get("threads", c.discovery.threads);
    discovery.finish();
    if (c.discovery.k < 1) throw InvalidArgument(source + ": discovery.k must be >= 1");

    Reader classifier(section(root, "classifier", source), "classifier.", source);
    classifier.get("search_iters", c.classifier.search_iters);
    classifier.get("folds", c.classifier.folds);
    classifier.get("train_frac", c.classifier.train_frac);
    classifier.get("master_seed", c.classifier.master_seed);
    classifier.get("threads", c.classifier.threads);
    classifier.finish();
    if (c.classifier.search_iters < 1) throw InvalidArgument(source + ": classifier.search_iters must be >= 1");
    if (c.classifier.folds < 2) throw InvalidArgument(source + ": classifier.folds must be >= 2");
    if (!(c.classifier.train_frac > 0 && c.classifier.train_frac < 1))
        throw InvalidArgument(source + ": classifier.train_frac must be in (0, 1)");

    Reader paths(section(root, "paths", source), "paths.", source);
    auto path = [&](const char* key, std::string& out) {
        paths.get(key, out);
        out = resolve(out, base_dir, key, source);
    };
    path("graph", c.paths.graph);
    path("labels", c.paths.labels);
    path("metadata", c.paths.metadata);
    path("snapshots", c.paths.snapshots);
    path("candidates", c.paths.candidates);
    path("hits", c.paths.hits);
    path("inventory", c.paths.inventory);
    path("plans", c.paths.plans);
    path("static", c.paths.static_dir);
    paths.finish();

    for (const char* name : {"crawl", "discovery", "classifier", "paths"}) top.mark(name);
    top.finish();
    return c;
}

ProjectConfig load_project_config(const std::string& path) {
    auto base = fs::absolute(path).parent_path().string();
    return parse_project_config(read_file(path), base, path);
}

} // namespace linkmap
