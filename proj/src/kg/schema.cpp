#include "t2s/kg/schema.hpp"

#include "t2s/common/text.hpp"

namespace t2s::kg {

std::string_view to_string(SchemaKind kind) {
    switch (kind) {
        case SchemaKind::Class: return "class";
        case SchemaKind::ObjectProperty: return "objectProperty";
        case SchemaKind::DatatypeProperty: return "datatypeProperty";
    }
    return "";
}

std::optional<SchemaKind> parse_schema_kind(std::string_view name) {
    if (name == "class") return SchemaKind::Class;
    if (name == "objectProperty") return SchemaKind::ObjectProperty;
    if (name == "datatypeProperty") return SchemaKind::DatatypeProperty;
    return std::nullopt;
}

SchemaDocument make_schema_document(Iri iri, SchemaKind kind, std::string label,
                                    std::optional<std::string> comment, std::optional<Iri> domain,
                                    std::optional<Iri> range) {
    label = text::trim(label);
    if (comment) {
        comment = text::trim(*comment);
        if (comment->empty()) comment.reset();
    }
    if (label.empty()) label = text::split_identifier(text::iri_local_name(iri.str()));

    SchemaDocument doc{std::move(iri), kind, std::move(label), std::move(comment),
                       std::move(domain), std::move(range), {}};
    doc.text = doc.comment ? doc.label + " " + *doc.comment : doc.label;
    return doc;
}

}  // namespace t2s::kg
