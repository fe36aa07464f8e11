#pragma once

// Source-faithful capture of a parsed specification: raw definitions with
// verbatim cell content plus the parsed view, shared by the grid and AASX
// ingest paths so the transformer and the linter can treat both alike.

#include <optional>
#include <string>
#include <vector>

#include "smtkit/finding.hpp"
#include "smtkit/model.hpp"

namespace smtkit {

struct RawFieldRow {
    // verbatim cell content, kept for audit
    std::string idShortCell;
    std::string semanticCell;
    std::string valueCell;
    std::string cardinalityCell;

    // parsed view
    IdShortSpec idShort;
    ElementKind kind = ElementKind::Property;
    std::optional<std::string> rawValueType;
    std::optional<std::string> typeRef; // definition name for container rows
    std::optional<SemanticId> semanticId;
    std::string description;
    std::vector<std::string> notes;
    std::vector<ExampleValue> examples;
    std::optional<Cardinality> cardinality;
    bool instantiated = false; // carried concrete values inside a template
    std::string location;

    // set by note interpretation during the transform passes
    bool allowsUserIdShort = false;
    std::vector<SemanticId> alternativeSemanticIds;
    bool advisoryFlags = false;

    bool operator==(const RawFieldRow&) const = default;
};

struct RawDefinition {
    std::string name; // sanitized idShort base
    IdShortSpec idShort;
    ElementKind kind = ElementKind::SubmodelElementCollection;
    std::optional<SemanticId> semanticId;
    std::string description;
    std::vector<std::string> notes;
    std::optional<std::string> version;          // stated on the definition, verbatim
    std::vector<std::string> fragmentTargets;    // non-empty marks a fragment definition
    std::optional<std::string> parent;           // enclosing definition, when nested
    std::vector<RawFieldRow> rows;
    std::string location;
    bool allowsUserIdShort = false;
    bool advisoryFlags = false;

    bool operator==(const RawDefinition&) const = default;
};

struct ExtractedSpec {
    std::string specNumber;
    std::string title;
    std::string version; // verbatim ("2-0", "1.0", ...); empty = not stated
    std::string source;
    std::string sourceKind; // "grid" or "aasx"
    std::vector<RawDefinition> submodelDefs;
    std::vector<RawDefinition> typeDefs;
    std::vector<Finding> findings;

    // populated by the transform passes, empty straight after ingestion
    std::vector<EnumType> enums;
    std::vector<Import> imports;

    bool operator==(const ExtractedSpec&) const = default;
};

// Lossless sidecar form used by the CLI between pipeline stages.
std::string extracted_to_json(const ExtractedSpec& spec);
ExtractedSpec extracted_from_json(const std::string& text);

} // namespace smtkit
