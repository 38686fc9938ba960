#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace linkmap {

/// Collects the href of every <a> element, resolved against `base_url` or
/// the document's first <base href>. Results are absolute http(s) URLs with
/// fragments removed, deduplicated in first-occurrence order. Malformed
/// markup is parsed best-effort and never rejected.
std::vector<std::string> extract_hyperlinks(std::string_view html, std::string_view base_url);

/// Decodes the character references that show up in attribute values
/// (named entities for markup characters, decimal and hex references).
std::string decode_html_entities(std::string_view text);

} // namespace linkmap
