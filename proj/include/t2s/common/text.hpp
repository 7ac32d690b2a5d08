#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace t2s::text {

// Unicode-aware helpers over UTF-8. Classification and case mapping use the
// C.UTF-8 locale when the C library provides it and fall back to ASCII rules
// (treating every non-ASCII code point as a word character) otherwise.

/// Lowercase word tokens: maximal runs of alphanumeric code points.
std::vector<std::string> tokenize(std::string_view utf8);

std::string to_lower(std::string_view utf8);

std::string trim(std::string_view s);

/// Trim and replace every whitespace run with a single space.
std::string collapse_whitespace(std::string_view s);

bool starts_with_icase(std::string_view s, std::string_view prefix);
bool equals_icase(std::string_view a, std::string_view b);

/// Longest prefix of `s` that is at most `maxBytes` long and does not split a
/// UTF-8 sequence.
std::string_view utf8_prefix(std::string_view s, std::size_t maxBytes);

/// Local name of an IRI: the part after the last '#', '/' or ':'.
std::string iri_local_name(std::string_view iri);

/// Split a camelCase / snake_case local name into space separated words
/// ("populationTotal" -> "population Total").
std::string split_identifier(std::string_view name);

}  // namespace t2s::text
