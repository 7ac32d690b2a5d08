#include "t2s/kg/endpoint.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "t2s/common/http_client.hpp"
#include "t2s/common/text.hpp"

namespace t2s::kg {

namespace {

constexpr std::size_t kMaxErrorMessageBytes = 2000;

bool contains_icase(std::string_view haystack, std::string_view needle) {
    const std::string h = text::to_lower(haystack);
    return h.find(needle) != std::string::npos;
}

std::string error_message_from_body(std::string_view body) {
    const auto doc = nlohmann::json::parse(body.begin(), body.end(), nullptr, false);
    if (!doc.is_discarded() && doc.is_object()) {
        for (const char* key : {"exception", "message", "error"}) {
            if (const auto it = doc.find(key); it != doc.end() && it->is_string()) {
                return std::string(text::utf8_prefix(it->get<std::string>(), kMaxErrorMessageBytes));
            }
        }
    }
    std::string trimmed = text::trim(body);
    if (trimmed.empty()) return "(empty response body)";
    return std::string(text::utf8_prefix(trimmed, kMaxErrorMessageBytes));
}

EndpointError from_failure(const http::Failure& failure) {
    switch (failure.kind) {
        case http::FailureKind::Timeout:
            return {EndpointError::Kind::Timeout, "request timed out (" + failure.message + ")", 0};
        case http::FailureKind::InvalidUrl:
        case http::FailureKind::Connection:
        case http::FailureKind::Other:
            break;
    }
    return {EndpointError::Kind::Transport, "endpoint unreachable: " + failure.message, 0};
}

const std::string* iri_of(const Binding& row, const std::string& var) {
    const auto it = row.find(var);
    if (it == row.end() || !it->second.is_iri()) return nullptr;
    return &it->second.lexical;
}

const RdfTerm* term_of(const Binding& row, const std::string& var) {
    const auto it = row.find(var);
    return it == row.end() ? nullptr : &it->second;
}

// Picks the literal in the preferred language, then an untagged one, then the
// smallest remaining one.
std::optional<std::string> pick_literal(const std::set<std::pair<std::string, std::string>>& literals,
                                        const std::string& preferredLanguage) {
    // Entries are (language or "", lexical).
    const std::pair<std::string, std::string>* untagged = nullptr;
    for (const auto& entry : literals) {
        if (entry.first == preferredLanguage) return entry.second;
        if (entry.first.empty() && untagged == nullptr) untagged = &entry;
    }
    if (untagged != nullptr) return untagged->second;
    if (!literals.empty()) return literals.begin()->second;
    return std::nullopt;
}

std::string sparql_string(std::string_view s) { return "\"" + escape_string_literal(s) + "\""; }

}  // namespace

std::string_view to_string(EndpointError::Kind kind) {
    switch (kind) {
        case EndpointError::Kind::Syntax: return "syntax";
        case EndpointError::Kind::Timeout: return "timeout";
        case EndpointError::Kind::Transport: return "transport";
        case EndpointError::Kind::MalformedResults: return "malformed-results";
    }
    return "";
}

Result<SparqlResultSet, EndpointError> classify_response(int status, std::string_view body) {
    if (status >= 200 && status < 300) {
        auto parsed = parse_sparql_results_json(body);
        if (!parsed) {
            return EndpointError{EndpointError::Kind::MalformedResults, parsed.error(), status};
        }
        return std::move(parsed).value();
    }
    const std::string message = error_message_from_body(body);
    if (status == 400) return EndpointError{EndpointError::Kind::Syntax, message, status};
    if (status == 408 || status == 504) return EndpointError{EndpointError::Kind::Timeout, message, status};
    // Some stores report parse failures as 500.
    if (status >= 500 && status < 600 &&
        (contains_icase(message, "syntax error") || contains_icase(message, "parse error") ||
         contains_icase(message, "lexical error"))) {
        return EndpointError{EndpointError::Kind::Syntax, message, status};
    }
    return EndpointError{EndpointError::Kind::Transport,
                         "HTTP " + std::to_string(status) + ": " + message, status};
}

SparqlClient::SparqlClient(EndpointConfig config) : config_(std::move(config)) {}

Result<SparqlResultSet, EndpointError> SparqlClient::execute_uncapped(
    std::string_view query, std::optional<std::chrono::milliseconds> timeout) {
    if (text::trim(query).empty()) {
        return EndpointError{EndpointError::Kind::Syntax, "empty query", 0};
    }

    http::Request request;
    request.timeout = timeout ? std::min(*timeout, config_.requestTimeout) : config_.requestTimeout;
    request.headers.emplace_back("Accept", "application/sparql-results+json");

    const std::string encoded = http::form_encode({{"query", std::string(query)}});
    const char separator = config_.queryUrl.find('?') == std::string::npos ? '?' : '&';
    std::string getUrl = config_.queryUrl + separator + encoded;
    if (getUrl.size() <= config_.maxGetUrlLength) {
        request.method = http::Method::Get;
        request.url = std::move(getUrl);
    } else {
        request.method = http::Method::Post;
        request.url = config_.queryUrl;
        request.body = encoded;
        request.contentType = "application/x-www-form-urlencoded";
    }

    auto response = http::send(request);
    if (!response) return from_failure(response.error());
    return classify_response(response->status, response->body);
}

Result<SparqlResultSet, EndpointError> SparqlClient::execute(
    std::string_view query, std::optional<std::chrono::milliseconds> timeout) {
    auto results = execute_uncapped(query, timeout);
    if (results && !results->is_ask()) cap_rows(*results, config_.maxRows);
    return results;
}

std::string outgoing_edges_query(const Iri& entity) {
    return "SELECT ?p ?o WHERE { " + entity.to_sparql() + " ?p ?o }";
}

std::string property_examples_query(const Iri& property) {
    return "SELECT ?s ?o WHERE { ?s " + property.to_sparql() + " ?o } LIMIT " +
           std::to_string(kPropertyExampleLimit);
}

Result<EntityExcerpt, EndpointError> SparqlClient::outgoing_edges(
    const Iri& entity, std::optional<std::chrono::milliseconds> timeout) {
    auto results = execute_uncapped(outgoing_edges_query(entity), timeout);
    if (!results) return std::move(results).error();

    EntityExcerpt excerpt{entity, {}, false, 0};
    for (const auto& row : results->rows) {
        const auto* predicate = iri_of(row, "p");
        const auto* object = term_of(row, "o");
        if (predicate == nullptr || object == nullptr) continue;
        auto iri = Iri::parse(*predicate);
        if (!iri) continue;
        excerpt.edges.push_back(Edge{std::move(*iri), *object});
    }

    auto key = [](const Edge& e) {
        return std::tie(e.predicate, e.object.lexical, e.object.kind, e.object.language,
                        e.object.datatype);
    };
    std::sort(excerpt.edges.begin(), excerpt.edges.end(),
              [&](const Edge& a, const Edge& b) { return key(a) < key(b); });
    excerpt.edges.erase(std::unique(excerpt.edges.begin(), excerpt.edges.end(),
                                    [&](const Edge& a, const Edge& b) { return key(a) == key(b); }),
                        excerpt.edges.end());

    excerpt.totalEdges = excerpt.edges.size();
    if (excerpt.edges.size() > config_.maxExcerptEdges) {
        excerpt.edges.erase(excerpt.edges.begin() + static_cast<std::ptrdiff_t>(config_.maxExcerptEdges),
                            excerpt.edges.end());
        excerpt.truncated = true;
    }
    return excerpt;
}

Result<std::vector<PropertyExample>, EndpointError> SparqlClient::property_examples(
    const Iri& property, std::optional<std::chrono::milliseconds> timeout) {
    auto results = execute(property_examples_query(property), timeout);
    if (!results) return std::move(results).error();

    std::vector<PropertyExample> examples;
    for (const auto& row : results->rows) {
        const auto* subject = term_of(row, "s");
        const auto* object = term_of(row, "o");
        if (subject == nullptr || object == nullptr) continue;
        examples.push_back({*subject, *object});
        if (examples.size() == kPropertyExampleLimit) break;
    }
    return examples;
}

// ---------------------------------------------------------------------------

std::string schema_harvest_query(SchemaKind kind, std::size_t limit, std::size_t offset) {
    std::string_view typeIri = vocab::kOwlClass;
    if (kind == SchemaKind::ObjectProperty) typeIri = vocab::kOwlObjectProperty;
    if (kind == SchemaKind::DatatypeProperty) typeIri = vocab::kOwlDatatypeProperty;

    std::string q = "SELECT ?s ?label ?comment ?domain ?range WHERE {\n";
    q += "  ?s <" + std::string(vocab::kRdfType) + "> <" + std::string(typeIri) + "> .\n";
    q += "  FILTER(isIRI(?s))\n";
    q += "  OPTIONAL { ?s <" + std::string(vocab::kRdfsLabel) + "> ?label }\n";
    q += "  OPTIONAL { ?s <" + std::string(vocab::kRdfsComment) + "> ?comment }\n";
    q += "  OPTIONAL { ?s <" + std::string(vocab::kRdfsDomain) + "> ?domain }\n";
    q += "  OPTIONAL { ?s <" + std::string(vocab::kRdfsRange) + "> ?range }\n";
    q += "}\nORDER BY ?s ?label ?comment ?domain ?range\n";
    q += "LIMIT " + std::to_string(limit) + " OFFSET " + std::to_string(offset);
    return q;
}

std::string entity_harvest_query(const std::optional<std::string>& languageFilter,
                                 std::size_t limit, std::size_t offset) {
    std::string q = "SELECT ?s ?label ?comment WHERE {\n";
    q += "  ?s <" + std::string(vocab::kRdfsLabel) + "> ?label .\n";
    q += "  FILTER(isIRI(?s))\n";
    q += "  FILTER NOT EXISTS { ?s <" + std::string(vocab::kRdfType) + "> ?schemaType . ";
    q += "FILTER(?schemaType IN (<" + std::string(vocab::kOwlClass) + ">, <" +
         std::string(vocab::kOwlObjectProperty) + ">, <" + std::string(vocab::kOwlDatatypeProperty) +
         ">)) }\n";
    if (languageFilter) {
        q += "  FILTER(lang(?label) = " + sparql_string(*languageFilter) + " || lang(?label) = \"\")\n";
    }
    q += "  OPTIONAL { ?s <" + std::string(vocab::kRdfsComment) + "> ?comment }\n";
    q += "}\nORDER BY ?s ?label ?comment\n";
    q += "LIMIT " + std::to_string(limit) + " OFFSET " + std::to_string(offset);
    return q;
}

namespace {

struct SchemaAccumulator {
    SchemaKind kind;
    std::set<std::pair<std::string, std::string>> labels;
    std::set<std::pair<std::string, std::string>> comments;
    std::set<std::string> domains;
    std::set<std::string> ranges;
};

void add_literal(std::set<std::pair<std::string, std::string>>& into, const RdfTerm* term) {
    if (term == nullptr || !term->is_literal()) return;
    into.emplace(term->language.value_or(""), term->lexical);
}

}  // namespace

Result<std::vector<SchemaDocument>, HarvestError> harvest_schema(SparqlClient& client,
                                                                 const HarvestOptions& options) {
    std::map<std::string, SchemaAccumulator> entities;
    for (SchemaKind kind :
         {SchemaKind::Class, SchemaKind::ObjectProperty, SchemaKind::DatatypeProperty}) {
        for (std::size_t offset = 0;; offset += options.pageSize) {
            auto page = client.execute_uncapped(schema_harvest_query(kind, options.pageSize, offset));
            if (!page) return HarvestError{std::move(page).error(), entities.size()};
            for (const auto& row : page->rows) {
                const auto* s = iri_of(row, "s");
                if (s == nullptr || !Iri::is_valid(*s)) continue;
                auto [it, inserted] = entities.try_emplace(*s, SchemaAccumulator{kind, {}, {}, {}, {}});
                // An IRI declared with several schema types keeps the first.
                if (it->second.kind != kind) continue;
                add_literal(it->second.labels, term_of(row, "label"));
                add_literal(it->second.comments, term_of(row, "comment"));
                if (const auto* d = iri_of(row, "domain"); d && Iri::is_valid(*d)) it->second.domains.insert(*d);
                if (const auto* r = iri_of(row, "range"); r && Iri::is_valid(*r)) it->second.ranges.insert(*r);
            }
            if (page->rows.size() < options.pageSize) break;
        }
    }

    std::vector<SchemaDocument> docs;
    docs.reserve(entities.size());
    for (auto& [iri, acc] : entities) {
        auto label = pick_literal(acc.labels, options.preferredLanguage);
        auto comment = pick_literal(acc.comments, options.preferredLanguage);
        std::optional<Iri> domain;
        std::optional<Iri> range;
        if (is_property(acc.kind) && !acc.domains.empty()) domain = Iri(*acc.domains.begin());
        if (is_property(acc.kind) && !acc.ranges.empty()) range = Iri(*acc.ranges.begin());
        docs.push_back(make_schema_document(Iri(iri), acc.kind, label.value_or(""), std::move(comment),
                                            std::move(domain), std::move(range)));
    }
    return docs;
}

namespace {

struct PendingSubject {
    std::string iri;
    // label term key (language, lexical) in first-seen order
    std::vector<std::pair<std::string, std::string>> labels;
    std::set<std::pair<std::string, std::string>> comments;
};

std::size_t flush_subject(PendingSubject& pending,
                          const std::function<void(const HarvestedEntity&)>& sink) {
    if (pending.iri.empty()) return 0;
    std::size_t yielded = 0;
    for (const auto& [lang, lexical] : pending.labels) {
        std::string label = text::trim(lexical);
        if (label.empty()) continue;
        HarvestedEntity entity{Iri(pending.iri), std::move(label),
                               lang.empty() ? std::nullopt : std::optional<std::string>(lang),
                               pick_literal(pending.comments, lang)};
        sink(entity);
        ++yielded;
    }
    pending = PendingSubject{};
    return yielded;
}

}  // namespace

Result<std::size_t, HarvestError> harvest_entities(
    SparqlClient& client, const std::optional<std::string>& languageFilter,
    const std::function<void(const HarvestedEntity&)>& sink, const HarvestOptions& options) {
    std::size_t yielded = 0;
    PendingSubject pending;
    for (std::size_t offset = 0;; offset += options.pageSize) {
        auto page = client.execute_uncapped(entity_harvest_query(languageFilter, options.pageSize, offset));
        if (!page) return HarvestError{std::move(page).error(), yielded};
        for (const auto& row : page->rows) {
            const auto* s = iri_of(row, "s");
            const auto* label = term_of(row, "label");
            if (s == nullptr || label == nullptr || !label->is_literal() || !Iri::is_valid(*s)) continue;
            if (*s != pending.iri) {
                yielded += flush_subject(pending, sink);
                pending.iri = *s;
            }
            std::pair<std::string, std::string> key{label->language.value_or(""), label->lexical};
            if (std::find(pending.labels.begin(), pending.labels.end(), key) == pending.labels.end()) {
                pending.labels.push_back(std::move(key));
            }
            add_literal(pending.comments, term_of(row, "comment"));
        }
        if (page->rows.size() < options.pageSize) break;
    }
    yielded += flush_subject(pending, sink);
    return yielded;
}

}  // namespace t2s::kg
