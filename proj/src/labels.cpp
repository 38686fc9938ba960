#include "linkmap/labels.hpp"

#include <array>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "linkmap/error.hpp"

namespace linkmap {

namespace {

constexpr std::array<std::pair<ReviewLabel, std::string_view>, 5> kLabels{{
    {ReviewLabel::ConfirmedCommunity, "confirmed_community"},
    {ReviewLabel::Rejected, "rejected"},
    {ReviewLabel::Misinformation, "misinformation"},
    {ReviewLabel::Authentic, "authentic"},
    {ReviewLabel::Pending, "pending"},
}};

constexpr std::array<std::pair<SiteCategory, std::string_view>, 5> kCategories{{
    {SiteCategory::DropSite, "drop_site"},
    {SiteCategory::NewsResearch, "news_research"},
    {SiteCategory::Merchandise, "merchandise"},
    {SiteCategory::SocialClone, "social_clone"},
    {SiteCategory::NonUs, "non_us"},
}};

template <class E, std::size_t N>
std::string name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
    for (const auto& [v, name] : table)
        if (v == value) return std::string(name);
    return "?";
}

template <class E, std::size_t N>
std::optional<E> value_of(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view text) {
    for (const auto& [v, name] : table)
        if (name == text) return v;
    return std::nullopt;
}

} // namespace

std::string to_string(ReviewLabel label) { return name_of(kLabels, label); }
std::optional<ReviewLabel> parse_review_label(std::string_view text) { return value_of(kLabels, text); }
std::string to_string(SiteCategory category) { return name_of(kCategories, category); }
std::optional<SiteCategory> parse_site_category(std::string_view text) { return value_of(kCategories, text); }

void validate_label_record(const LabelRecord& r) {
    if (r.domain.empty()) throw InvalidArgument("label record without a domain");
    if (r.category && r.label != ReviewLabel::ConfirmedCommunity)
        throw InvalidArgument("category is only valid with confirmed_community");
    if (r.revision < 1) throw InvalidArgument("revision must be positive");
}

std::string label_record_json(const LabelRecord& r) {
    nlohmann::ordered_json j;
    j["domain"] = r.domain.str();
    j["label"] = to_string(r.label);
    if (r.category) j["category"] = to_string(*r.category);
    j["annotator"] = r.annotator;
    j["labeled_at"] = format_utc(r.labeled_at);
    j["notes"] = r.notes;
    j["revision"] = r.revision;
    return j.dump();
}

LabelRecord parse_label_record(std::string_view line, const std::string& source, std::size_t lineno) {
    auto fail = [&](const std::string& what) { return ParseError(source, lineno, what); };
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw fail(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw fail("label record must be an object");
    auto text = [&](const char* key) -> std::string {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) throw fail(std::string("missing string field ") + key);
        return it->get<std::string>();
    };
    LabelRecord r;
    try {
        r.domain = DomainKey::from_canonical(text("domain"));
    } catch (const InvalidArgument& e) {
        throw fail(e.what());
    }
    auto label = parse_review_label(text("label"));
    if (!label) throw fail("unknown label");
    r.label = *label;
    if (j.contains("category")) {
        auto category = parse_site_category(text("category"));
        if (!category) throw fail("unknown category");
        r.category = category;
    }
    r.annotator = text("annotator");
    auto at = parse_utc(text("labeled_at"));
    if (!at) throw fail("labeled_at must be YYYY-MM-DDTHH:MM:SSZ");
    r.labeled_at = *at;
    r.notes = text("notes");
    auto rev = j.find("revision");
    if (rev == j.end() || !rev->is_number_integer()) throw fail("missing integer field revision");
    r.revision = rev->get<std::int64_t>();
    try {
        validate_label_record(r);
    } catch (const InvalidArgument& e) {
        throw fail(e.what());
    }
    return r;
}

std::vector<LabelRecord> read_label_records(std::string_view text, const std::string& source) {
    std::vector<LabelRecord> out;
    std::map<DomainKey, std::int64_t> revisions;
    std::size_t lineno = 0;
    for (auto line : split(text, '\n')) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        auto r = parse_label_record(line, source, lineno);
        auto& rev = revisions[r.domain];
        if (r.revision != rev + 1)
            throw ParseError(source, lineno, "revision " + std::to_string(r.revision) + " for " + r.domain.str() +
                                                 " does not follow " + std::to_string(rev));
        rev = r.revision;
        out.push_back(std::move(r));
    }
    return out;
}

std::string write_label_records(const std::vector<LabelRecord>& records) {
    std::string out;
    for (const auto& r : records) out += label_record_json(r) + "\n";
    return out;
}

LabelStore::LabelStore(std::string path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
        contents_ = read_file(path_);
        records_ = read_label_records(contents_, path_);
        for (std::size_t i = 0; i < records_.size(); ++i) active_[records_[i].domain] = i;
    }
}

std::int64_t LabelStore::append(LabelRecord record, std::int64_t expected_revision) {
    std::lock_guard lock(mu_);
    auto it = active_.find(record.domain);
    const std::int64_t current = it == active_.end() ? 0 : records_[it->second].revision;
    if (expected_revision != current)
        throw Conflict("stale revision for " + record.domain.str() + ": expected " + std::to_string(current) + ", got " +
                       std::to_string(expected_revision));
    record.revision = current + 1;
    validate_label_record(record);
    std::string next = contents_ + label_record_json(record) + "\n";
    write_file_atomic(path_, next, fault_);
    contents_ = std::move(next);
    active_[record.domain] = records_.size();
    records_.push_back(std::move(record));
    return current + 1;
}

std::int64_t LabelStore::revision(const DomainKey& domain) const {
    std::lock_guard lock(mu_);
    auto it = active_.find(domain);
    return it == active_.end() ? 0 : records_[it->second].revision;
}

std::optional<LabelRecord> LabelStore::active(const DomainKey& domain) const {
    std::lock_guard lock(mu_);
    auto it = active_.find(domain);
    if (it == active_.end()) return std::nullopt;
    return records_[it->second];
}

std::vector<LabelRecord> LabelStore::records() const {
    std::lock_guard lock(mu_);
    return records_;
}

DomainSet LabelStore::with_label(ReviewLabel label) const {
    std::lock_guard lock(mu_);
    DomainSet out;
    for (const auto& [domain, index] : active_)
        if (records_[index].label == label) out.insert(domain);
    return out;
}

void LabelStore::set_fault(Fault fault) {
    std::lock_guard lock(mu_);
    fault_ = std::move(fault);
}

} // namespace linkmap
