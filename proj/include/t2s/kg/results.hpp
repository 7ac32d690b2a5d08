#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "t2s/common/result.hpp"
#include "t2s/kg/rdf.hpp"

namespace t2s::kg {

using Binding = std::map<std::string, RdfTerm>;

/// Parsed SPARQL query results. SELECT results populate `rows`; ASK results
/// populate `boolean` and leave `variables`/`rows` empty.
struct SparqlResultSet {
    std::vector<std::string> variables;
    std::vector<Binding> rows;
    std::optional<bool> boolean;
    bool truncated = false;
    std::size_t originalRowCount = 0;

    bool is_ask() const { return boolean.has_value(); }
};

/// Parses an application/sparql-results+json document. The error string
/// describes why the body is not a valid results document.
Result<SparqlResultSet, std::string> parse_sparql_results_json(std::string_view body);

/// Caps `rows` at maxRows, recording the original count.
void cap_rows(SparqlResultSet& results, std::size_t maxRows);

}  // namespace t2s::kg
