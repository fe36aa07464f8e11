#pragma once

// Intermediary meta-model between specification ingestion and code
// generation: versioned models of record types, fields and enumerations,
// plus validation and a deterministic text form (.smtm) with a round-trip
// guarantee.

#include <optional>
#include <string>
#include <vector>

namespace smtkit {

enum class SemanticScheme { Iri, Irdi, Local };

struct SemanticId {
    SemanticScheme scheme = SemanticScheme::Local;
    std::string value;                  // full identifier, no whitespace
    std::optional<std::string> version; // e.g. "1/0" or "002" when derivable

    bool operator==(const SemanticId&) const = default;
};

// Classifies a raw identifier token into IRI/IRDI/LOCAL and derives the
// trailing version segment when one is recognizable.
SemanticId classify_semantic_id(const std::string& token);

// Identifier with the trailing version segment removed, for registry lookups.
std::string semantic_id_without_version(const SemanticId& id);

struct Cardinality {
    int min = 0;
    std::optional<int> max; // absent = unbounded

    bool required() const { return min >= 1; }
    bool multi_valued() const { return !max || *max > 1; }

    bool operator==(const Cardinality&) const = default;
};

// Canonical rendering: "min..max", "*" standing in for an unbounded max.
std::string render_cardinality(const Cardinality& card);

enum class ValueKind {
    String,
    LangString,
    Integer,
    NonNegativeInteger,
    Float,
    Double,
    Boolean,
    Date,
    DateTime,
    Duration,
    AnyUri,
    Decimal,
};

std::string_view value_kind_name(ValueKind kind);
std::optional<ValueKind> value_kind_from_name(const std::string& name);

struct CanonicalValueType {
    ValueKind kind = ValueKind::String;
    std::string raw; // original spelling, preserved verbatim

    bool operator==(const CanonicalValueType&) const = default;
};

enum class ElementKind {
    Property,
    MultiLanguageProperty,
    File,
    Blob,
    Range,
    ReferenceElement,
    RelationshipElement,
    AnnotatedRelationshipElement,
    SubmodelElementCollection,
    Entity,
    Submodel,
};

std::string_view element_kind_name(ElementKind kind);
std::optional<ElementKind> element_kind_from_name(const std::string& name);
bool is_container_kind(ElementKind kind);

enum class Placeholder { None, Counting, Arbitrary, Variable, FreeText };

std::string_view placeholder_name(Placeholder placeholder);

struct IdShortSpec {
    std::string base;
    Placeholder placeholder = Placeholder::None;
    std::optional<std::string> placeholderText; // digits for Counting, text for FreeText
    std::optional<std::string> displayName;     // verbatim name when base had to be sanitized

    bool operator==(const IdShortSpec&) const = default;
};

// True iff name matches [a-zA-Z][a-zA-Z0-9_]*.
bool is_legal_identifier(const std::string& name);

// Removes non-identifier characters; returns empty when nothing survives.
std::string sanitize_identifier(const std::string& name);

struct ExampleValue {
    std::string text;
    std::optional<std::string> language; // lowercase ISO-639-1
    std::optional<std::string> unit;

    bool operator==(const ExampleValue&) const = default;
};

struct AasField {
    IdShortSpec idShort;
    ElementKind kind = ElementKind::Property;
    std::optional<CanonicalValueType> valueType; // for value-carrying kinds
    std::optional<std::string> typeRef;          // named type, "spec:Name" when imported
    std::optional<SemanticId> semanticId;
    std::vector<SemanticId> alternativeSemanticIds;
    Cardinality cardinality;
    std::string description;
    std::vector<std::string> notes;
    std::vector<ExampleValue> examples;
    bool allowsUserIdShort = false;
    bool ordered = false;       // position within parent is significant
    bool advisoryFlags = false; // flags above were derived from notes, not normative text

    bool operator==(const AasField&) const = default;
};

struct RecordType {
    std::string name;
    ElementKind kind = ElementKind::SubmodelElementCollection; // container subset
    std::optional<SemanticId> semanticId;
    std::string description;
    std::vector<AasField> fields; // declaration order is significant
    bool allowsUserIdShort = false;

    bool operator==(const RecordType&) const = default;
};

struct EnumLiteral {
    std::string name;
    std::string value;
    std::optional<SemanticId> semanticId;

    bool operator==(const EnumLiteral&) const = default;
};

struct EnumType {
    std::string name;
    std::vector<EnumLiteral> literals;
    bool open = false; // open enumerations admit values outside the literal set
    CanonicalValueType valueType;

    bool operator==(const EnumType&) const = default;
};

struct Version {
    int major = 1;
    int minor = 0;

    bool operator==(const Version&) const = default;
};

std::string render_version(const Version& version);

struct Import {
    std::string specNumber;
    Version version;

    bool operator==(const Import&) const = default;
};

struct Model {
    std::string specNumber; // e.g. "02006"
    std::optional<Version> version;
    std::string title;
    std::vector<Import> imports;
    std::vector<RecordType> submodels; // kind == Submodel
    std::vector<RecordType> types;
    std::vector<EnumType> enums;

    bool operator==(const Model&) const = default;
};

struct Violation {
    std::string code; // stable identifier, e.g. "UNRESOLVED_TYPE"
    std::string path;
    std::string message;

    bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

// Checks the model invariants: resolvable type references, unique names,
// declared version, value types on properties, enum literal uniqueness,
// identifier legality. Violations are data; an empty report means valid.
ValidationReport validate_model(const Model& model);

// Deterministic text form. Throws Error{InvalidModel} when validation fails.
std::string serialize_model(const Model& model);

// Inverse of serialize_model. Throws Error{SyntaxError} with line/column on
// malformed input and Error{InvalidModel} when the parsed model is invalid.
Model parse_model(const std::string& text);

} // namespace smtkit
