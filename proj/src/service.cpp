#include "linkmap/service.hpp"

#include <filesystem>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "linkmap/crawler.hpp"
#include "linkmap/error.hpp"
#include "linkmap/io.hpp"

namespace linkmap {

namespace {

using ojson = nlohmann::ordered_json;

HttpReply json_reply(int status, const ojson& body) { return {status, body.dump(), "application/json"}; }

HttpReply error_reply(int status, const std::string& message) {
    ojson j;
    j["error"] = message;
    return json_reply(status, j);
}

ojson domain_array(const DomainSet& set) {
    ojson arr = ojson::array();
    for (const auto& d : set) arr.push_back(d.str());
    return arr;
}

} // namespace

std::map<DomainKey, std::vector<std::string>> sample_urls_by_domain(const std::vector<UrlInventoryEntry>& inventory,
                                                                    std::size_t per_domain) {
    std::map<DomainKey, std::vector<std::string>> out;
    for (const auto& e : inventory) {
        if (e.domain.empty()) continue;
        DomainKey d;
        try {
            d = DomainKey::from_canonical(e.domain);
        } catch (const InvalidArgument&) {
            continue;
        }
        auto& urls = out[d];
        if (urls.size() < per_domain && std::find(urls.begin(), urls.end(), e.url) == urls.end()) urls.push_back(e.url);
    }
    return out;
}

ReviewService::ReviewService(const HyperlinkGraph& graph, CandidateList candidates, LabelStore& store,
                             ReviewServiceOptions options)
    : graph_(graph), candidates_(std::move(candidates)), store_(store), options_(std::move(options)),
      seeds_(options_.seeds.begin(), options_.seeds.end()) {
    if (!options_.clock) options_.clock = utc_now;
    for (const auto& row : candidates_.scores) {
        auto& list = scores_by_candidate_[row.candidate];
        if (list.empty()) candidate_order_.push_back(row.candidate);
        list.push_back(&row);
    }
}

std::optional<DomainKey> ReviewService::known_domain(std::string_view text) const {
    DomainKey d;
    try {
        d = DomainKey::from_canonical(text);
    } catch (const InvalidArgument&) {
        return std::nullopt;
    }
    if (graph_.contains(d) || scores_by_candidate_.contains(d)) return d;
    return std::nullopt;
}

HttpReply ReviewService::list_candidates(const std::optional<std::string>& status) const {
    std::optional<ReviewLabel> filter;
    if (status) {
        filter = parse_review_label(*status);
        if (!filter) return error_reply(400, "unknown status " + *status);
    }
    ojson out = ojson::array();
    for (const auto& d : candidate_order_) {
        auto record = store_.active(d);
        const ReviewLabel label = record ? record->label : ReviewLabel::Pending;
        if (filter && *filter != label) continue;
        ojson item;
        item["domain"] = d.str();
        ojson scores = ojson::array();
        for (const auto* row : scores_by_candidate_.at(d)) {
            ojson s;
            s["seed"] = row->seed.str();
            s["ssc"] = row->ssc;
            s["rank"] = row->rank_within_seed;
            scores.push_back(std::move(s));
        }
        item["scores"] = std::move(scores);
        item["status"] = to_string(label);
        item["revision"] = record ? record->revision : 0;
        out.push_back(std::move(item));
    }
    return json_reply(200, out);
}

HttpReply ReviewService::domain_context(std::string_view domain) const {
    auto d = known_domain(domain);
    if (!d) return error_reply(404, "unknown domain " + std::string(domain));
    ojson out;
    const bool in_graph = graph_.contains(*d);
    out["domain"] = d->str();
    out["in_neighbors"] = in_graph ? domain_array(graph_.in_neighbors(*d)) : ojson::array();
    out["out_neighbors"] = in_graph ? domain_array(graph_.out_neighbors(*d)) : ojson::array();
    ojson urls = ojson::array();
    if (auto it = options_.sample_urls.find(*d); it != options_.sample_urls.end())
        for (std::size_t i = 0; i < it->second.size() && i < options_.max_sample_urls; ++i) urls.push_back(it->second[i]);
    out["sample_urls"] = std::move(urls);
    out["hub"] = nullptr;
    out["authority"] = nullptr;
    if (options_.hits) {
        if (auto h = options_.hits->hub.find(*d); h != options_.hits->hub.end()) out["hub"] = h->second;
        if (auto a = options_.hits->authority.find(*d); a != options_.hits->authority.end()) out["authority"] = a->second;
    }
    auto record = store_.active(*d);
    out["status"] = to_string(record ? record->label : ReviewLabel::Pending);
    out["revision"] = record ? record->revision : 0;
    return json_reply(200, out);
}

HttpReply ReviewService::post_label(std::string_view domain, std::string_view body) {
    auto d = known_domain(domain);
    if (!d) return error_reply(404, "unknown domain " + std::string(domain));
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception&) {
        return error_reply(400, "body is not valid JSON");
    }
    if (!j.is_object()) return error_reply(400, "body must be a JSON object");

    LabelRecord record;
    record.domain = *d;
    auto label = j.find("label");
    if (label == j.end() || !label->is_string()) return error_reply(400, "label is required");
    auto parsed = parse_review_label(label->get<std::string>());
    if (!parsed) return error_reply(400, "unknown label " + label->get<std::string>());
    record.label = *parsed;
    if (auto c = j.find("category"); c != j.end() && !c->is_null()) {
        if (!c->is_string()) return error_reply(400, "category must be a string");
        auto category = parse_site_category(c->get<std::string>());
        if (!category) return error_reply(400, "unknown category " + c->get<std::string>());
        record.category = category;
    }
    if (record.category && record.label != ReviewLabel::ConfirmedCommunity)
        return error_reply(400, "category is only valid with confirmed_community");
    auto annotator = j.find("annotator");
    if (annotator == j.end() || !annotator->is_string() || annotator->get<std::string>().empty())
        return error_reply(400, "annotator is required");
    record.annotator = annotator->get<std::string>();
    if (auto notes = j.find("notes"); notes != j.end() && !notes->is_null()) {
        if (!notes->is_string()) return error_reply(400, "notes must be a string");
        record.notes = notes->get<std::string>();
    }
    auto revision = j.find("revision");
    if (revision == j.end() || !revision->is_number_integer()) return error_reply(400, "revision is required");
    record.labeled_at = options_.clock();

    try {
        ojson out;
        out["revision"] = store_.append(std::move(record), revision->get<std::int64_t>());
        return json_reply(200, out);
    } catch (const Conflict& e) {
        ojson out;
        out["error"] = e.what();
        out["revision"] = store_.revision(*d);
        return json_reply(409, out);
    }
}

HttpReply ReviewService::new_iteration() {
    std::lock_guard lock(iteration_mu_);
    DomainSet next = seeds_;
    for (const auto& d : store_.with_label(ReviewLabel::ConfirmedCommunity)) next.insert(d);
    const auto added = next.size() - seeds_.size();

    if (options_.plans_dir.empty()) return error_reply(500, "no plans directory configured");
    std::filesystem::create_directories(options_.plans_dir);
    std::string path;
    for (int i = 1;; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "crawl-plan-%03d.json", i);
        path = (std::filesystem::path(options_.plans_dir) / name).string();
        if (!std::filesystem::exists(path)) break;
    }
    ojson plan;
    plan["seeds"] = domain_array(next);
    plan["created_at"] = format_utc(options_.clock());
    write_file_atomic(path, plan.dump(2) + "\n");
    seeds_ = std::move(next);

    ojson out;
    out["new_seed_count"] = added;
    out["crawl_plan_path"] = path;
    return json_reply(200, out);
}

HttpReply ReviewService::health() const {
    ojson out;
    out["status"] = "ok";
    return json_reply(200, out);
}

void ReviewService::mount(httplib::Server& server) {
    auto send = [](httplib::Response& res, const HttpReply& reply) {
        res.status = reply.status;
        res.set_content(reply.body, reply.content_type.c_str());
    };
    server.Get("/api/health", [this, send](const httplib::Request&, httplib::Response& res) { send(res, health()); });
    server.Get("/api/candidates", [this, send](const httplib::Request& req, httplib::Response& res) {
        std::optional<std::string> status;
        if (req.has_param("status")) status = req.get_param_value("status");
        send(res, list_candidates(status));
    });
    server.Get(R"(/api/domains/([^/]+)/context)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, domain_context(req.matches[1].str()));
    });
    server.Post(R"(/api/domains/([^/]+)/label)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, post_label(req.matches[1].str(), req.body));
    });
    server.Post("/api/iterations", [this, send](const httplib::Request&, httplib::Response& res) { send(res, new_iteration()); });
    server.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            send(res, error_reply(500, e.what()));
        }
    });
    if (!options_.static_dir.empty() && std::filesystem::is_directory(options_.static_dir))
        server.set_mount_point("/", options_.static_dir);
}

} // namespace linkmap
