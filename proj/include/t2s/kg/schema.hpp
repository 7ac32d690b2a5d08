#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "t2s/kg/rdf.hpp"

namespace t2s::kg {

enum class SchemaKind { Class, ObjectProperty, DatatypeProperty };

std::string_view to_string(SchemaKind kind);
std::optional<SchemaKind> parse_schema_kind(std::string_view name);
inline bool is_property(SchemaKind kind) { return kind != SchemaKind::Class; }

/// One indexed schema entity. `text` is "label comment" (comment omitted when
/// absent) and is what both retrieval arms see.
struct SchemaDocument {
    Iri iri;
    SchemaKind kind = SchemaKind::Class;
    std::string label;
    std::optional<std::string> comment;
    std::optional<Iri> domain;
    std::optional<Iri> range;
    std::string text;

    bool operator==(const SchemaDocument&) const = default;
};

/// Builds a document, deriving `text`. An empty label falls back to the
/// IRI's local name split into words.
SchemaDocument make_schema_document(Iri iri, SchemaKind kind, std::string label,
                                    std::optional<std::string> comment,
                                    std::optional<Iri> domain = std::nullopt,
                                    std::optional<Iri> range = std::nullopt);

}  // namespace t2s::kg
