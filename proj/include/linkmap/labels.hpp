#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linkmap/graph.hpp"
#include "linkmap/io.hpp"

namespace linkmap {

enum class ReviewLabel { ConfirmedCommunity, Rejected, Misinformation, Authentic, Pending };

std::string to_string(ReviewLabel label);
std::optional<ReviewLabel> parse_review_label(std::string_view text);

enum class SiteCategory { DropSite, NewsResearch, Merchandise, SocialClone, NonUs };

std::string to_string(SiteCategory category);
std::optional<SiteCategory> parse_site_category(std::string_view text);

/// One analyst decision. `revision` counts the records for this domain,
/// starting at 1; the latest one is active.
struct LabelRecord {
    DomainKey domain;
    ReviewLabel label = ReviewLabel::Pending;
    std::optional<SiteCategory> category;
    std::string annotator;
    Timestamp labeled_at = 0;
    std::string notes;
    std::int64_t revision = 1;

    bool operator==(const LabelRecord&) const = default;
};

/// Throws InvalidArgument when a category accompanies anything but
/// confirmed_community.
void validate_label_record(const LabelRecord& r);

std::string label_record_json(const LabelRecord& r);
LabelRecord parse_label_record(std::string_view line, const std::string& source = "<labels>", std::size_t lineno = 0);

/// Parses a whole JSON-lines file and checks revisions run 1, 2, ... per domain.
std::vector<LabelRecord> read_label_records(std::string_view text, const std::string& source = "<labels>");
std::string write_label_records(const std::vector<LabelRecord>& records);

/// Append-only label history in one JSON-lines file. Every append rewrites
/// the file through a temp file and rename, so a crash leaves either the old
/// or the new contents. Appends are serialized; a stale revision is rejected.
class LabelStore {
public:
    using Fault = std::function<void(AtomicWriteStage)>;

    /// Loads `path`; a missing file is an empty store.
    explicit LabelStore(std::string path);

    /// Appends a record for `domain` if `expected_revision` is the domain's
    /// current revision (0 when unlabeled). Returns the new revision.
    /// Throws Conflict on a stale revision; nothing is written then.
    std::int64_t append(LabelRecord record, std::int64_t expected_revision);

    std::int64_t revision(const DomainKey& domain) const;
    std::optional<LabelRecord> active(const DomainKey& domain) const;
    std::vector<LabelRecord> records() const;
    /// Domains whose active label is `label`.
    DomainSet with_label(ReviewLabel label) const;

    const std::string& path() const noexcept { return path_; }
    /// Test hook called at each stage of the next writes.
    void set_fault(Fault fault);

private:
    std::string path_;
    mutable std::mutex mu_;
    std::vector<LabelRecord> records_;
    std::map<DomainKey, std::size_t> active_;
    std::string contents_;
    Fault fault_;
};

} // namespace linkmap
