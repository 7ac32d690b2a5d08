#include "t2s/kg/results.hpp"

#include <algorithm>

#include <json.hpp>

namespace t2s::kg {

namespace {

using nlohmann::json;

Result<RdfTerm, std::string> parse_term(const json& node) {
    if (!node.is_object()) return std::string("binding value is not an object");
    const auto type = node.find("type");
    const auto value = node.find("value");
    if (type == node.end() || !type->is_string()) return std::string("binding lacks a type");
    if (value == node.end() || !value->is_string()) return std::string("binding lacks a value");

    const auto& typeName = type->get_ref<const std::string&>();
    const auto& lexical = value->get_ref<const std::string&>();
    if (typeName == "uri") return RdfTerm::iri(lexical);
    if (typeName == "bnode") return RdfTerm::blank(lexical);
    if (typeName == "literal" || typeName == "typed-literal") {
        RdfTerm term = RdfTerm::literal(lexical);
        if (const auto lang = node.find("xml:lang"); lang != node.end() && lang->is_string()) {
            term.language = lang->get<std::string>();
        } else if (const auto dt = node.find("datatype"); dt != node.end() && dt->is_string()) {
            if (dt->get_ref<const std::string&>() != vocab::kXsdString) {
                term.datatype = dt->get<std::string>();
            }
        }
        return term;
    }
    return "unknown binding type '" + typeName + "'";
}

}  // namespace

Result<SparqlResultSet, std::string> parse_sparql_results_json(std::string_view body) {
    json doc = json::parse(body.begin(), body.end(), nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) return std::string("response body is not JSON");
    if (!doc.is_object()) return std::string("results document is not a JSON object");

    SparqlResultSet out;
    if (const auto boolean = doc.find("boolean"); boolean != doc.end()) {
        if (!boolean->is_boolean()) return std::string("'boolean' is not true/false");
        out.boolean = boolean->get<bool>();
        return out;
    }

    const auto head = doc.find("head");
    if (head == doc.end() || !head->is_object()) return std::string("missing 'head' object");
    if (const auto vars = head->find("vars"); vars != head->end()) {
        if (!vars->is_array()) return std::string("'head.vars' is not an array");
        for (const auto& v : *vars) {
            if (!v.is_string()) return std::string("variable name is not a string");
            out.variables.push_back(v.get<std::string>());
        }
    }

    const auto results = doc.find("results");
    if (results == doc.end() || !results->is_object()) return std::string("missing 'results' object");
    const auto bindings = results->find("bindings");
    if (bindings == results->end() || !bindings->is_array()) {
        return std::string("missing 'results.bindings' array");
    }

    out.rows.reserve(bindings->size());
    for (const auto& row : *bindings) {
        if (!row.is_object()) return std::string("binding row is not an object");
        Binding binding;
        for (const auto& [name, value] : row.items()) {
            auto term = parse_term(value);
            if (!term) return "variable '" + name + "': " + term.error();
            // Keep the header a superset of every bound variable.
            if (std::find(out.variables.begin(), out.variables.end(), name) == out.variables.end()) {
                out.variables.push_back(name);
            }
            binding.emplace(name, std::move(term).value());
        }
        out.rows.push_back(std::move(binding));
    }
    out.originalRowCount = out.rows.size();
    return out;
}

void cap_rows(SparqlResultSet& results, std::size_t maxRows) {
    results.originalRowCount = results.rows.size();
    if (results.rows.size() > maxRows) {
        results.rows.resize(maxRows);
        results.truncated = true;
    }
}

}  // namespace t2s::kg
