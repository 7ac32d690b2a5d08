#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace t2s::kg {

/// Absolute IRI, stored without angle brackets.
class Iri {
public:
    /// Throws std::invalid_argument when `value` is not an absolute IRI.
    explicit Iri(std::string value);

    /// Accepts "scheme:rest" with or without surrounding angle brackets.
    static std::optional<Iri> parse(std::string_view text);
    static bool is_valid(std::string_view text);

    const std::string& str() const { return value_; }
    /// "<value>", the form SPARQL and N-Triples require.
    std::string to_sparql() const { return "<" + value_ + ">"; }

    auto operator<=>(const Iri&) const = default;

private:
    std::string value_;
};

enum class TermKind { Iri, Literal, Blank };

/// RDF term as returned in SPARQL results. A literal carries a language tag or
/// a datatype, never both.
struct RdfTerm {
    TermKind kind = TermKind::Literal;
    std::string lexical;
    std::optional<std::string> language;
    std::optional<std::string> datatype;

    static RdfTerm iri(std::string value) { return {TermKind::Iri, std::move(value), {}, {}}; }
    static RdfTerm blank(std::string label) { return {TermKind::Blank, std::move(label), {}, {}}; }
    static RdfTerm literal(std::string lexical) {
        return {TermKind::Literal, std::move(lexical), {}, {}};
    }
    static RdfTerm lang_literal(std::string lexical, std::string lang) {
        return {TermKind::Literal, std::move(lexical), std::move(lang), {}};
    }
    static RdfTerm typed_literal(std::string lexical, std::string datatype) {
        return {TermKind::Literal, std::move(lexical), {}, std::move(datatype)};
    }

    bool is_iri() const { return kind == TermKind::Iri; }
    bool is_literal() const { return kind == TermKind::Literal; }

    /// N-Triples / SPARQL surface syntax.
    std::string to_ntriples() const;

    bool operator==(const RdfTerm&) const = default;
};

/// Total order: kind, lexical form, language, datatype.
bool term_less(const RdfTerm& a, const RdfTerm& b);

std::string escape_string_literal(std::string_view s);

/// Expands well-known prefixed names ("dbr:Berlin", "rdfs:label") to full
/// IRIs. Returns nullopt for unknown prefixes.
std::optional<std::string> expand_known_prefix(std::string_view prefixedName);

namespace vocab {
inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view kRdfsComment = "http://www.w3.org/2000/01/rdf-schema#comment";
inline constexpr std::string_view kRdfsDomain = "http://www.w3.org/2000/01/rdf-schema#domain";
inline constexpr std::string_view kRdfsRange = "http://www.w3.org/2000/01/rdf-schema#range";
inline constexpr std::string_view kOwlClass = "http://www.w3.org/2002/07/owl#Class";
inline constexpr std::string_view kOwlObjectProperty = "http://www.w3.org/2002/07/owl#ObjectProperty";
inline constexpr std::string_view kOwlDatatypeProperty =
    "http://www.w3.org/2002/07/owl#DatatypeProperty";
inline constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view kRdfLangString =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
}  // namespace vocab

}  // namespace t2s::kg
