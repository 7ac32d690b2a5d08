#include "t2s/kg/rdf.hpp"

#include <array>
#include <cctype>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace t2s::kg {

namespace {

std::string_view strip_brackets(std::string_view text) {
    if (text.size() >= 2 && text.front() == '<' && text.back() == '>') {
        return text.substr(1, text.size() - 2);
    }
    return text;
}

}  // namespace

bool Iri::is_valid(std::string_view text) {
    if (text.empty()) return false;
    const auto colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) return false;
    if (!std::isalpha(static_cast<unsigned char>(text[0]))) return false;
    for (std::size_t i = 1; i < colon; ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return false;
    }
    for (unsigned char c : text) {
        if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' ||
            c == '\\' || c == '^' || c == '`') {
            return false;
        }
    }
    return true;
}

Iri::Iri(std::string value) : value_(std::move(value)) {
    if (!is_valid(value_)) throw std::invalid_argument("not an absolute IRI: " + value_);
}

std::optional<Iri> Iri::parse(std::string_view text) {
    const auto inner = strip_brackets(text);
    if (!is_valid(inner)) return std::nullopt;
    return Iri(std::string(inner));
}

std::string escape_string_literal(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string RdfTerm::to_ntriples() const {
    switch (kind) {
        case TermKind::Iri: return "<" + lexical + ">";
        case TermKind::Blank: return "_:" + lexical;
        case TermKind::Literal: {
            std::string out = "\"" + escape_string_literal(lexical) + "\"";
            if (language) {
                out += "@" + *language;
            } else if (datatype && *datatype != vocab::kXsdString) {
                out += "^^<" + *datatype + ">";
            }
            return out;
        }
    }
    return lexical;
}

bool term_less(const RdfTerm& a, const RdfTerm& b) {
    return std::tie(a.kind, a.lexical, a.language, a.datatype) <
           std::tie(b.kind, b.lexical, b.language, b.datatype);
}

std::optional<std::string> expand_known_prefix(std::string_view prefixedName) {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 10> kPrefixes{{
        {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
        {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
        {"owl", "http://www.w3.org/2002/07/owl#"},
        {"xsd", "http://www.w3.org/2001/XMLSchema#"},
        {"dbo", "http://dbpedia.org/ontology/"},
        {"dbr", "http://dbpedia.org/resource/"},
        {"dbp", "http://dbpedia.org/property/"},
        {"foaf", "http://xmlns.com/foaf/0.1/"},
        {"skos", "http://www.w3.org/2004/02/skos/core#"},
        {"schema", "http://schema.org/"},
    }};
    const auto colon = prefixedName.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    const auto prefix = prefixedName.substr(0, colon);
    for (const auto& [name, ns] : kPrefixes) {
        if (name == prefix) return std::string(ns) + std::string(prefixedName.substr(colon + 1));
    }
    return std::nullopt;
}

}  // namespace t2s::kg
