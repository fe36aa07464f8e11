#include "smtkit/model.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>

#include "smtkit/error.hpp"
#include "smtkit/finding.hpp"

namespace smtkit {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::MalformedGrid: return "MALFORMED_GRID";
    case ErrorCode::NoTablesFound: return "NO_TABLES_FOUND";
    case ErrorCode::OrphanContinuation: return "ORPHAN_CONTINUATION";
    case ErrorCode::EmptyIdShort: return "EMPTY_IDSHORT";
    case ErrorCode::UnparseableCardinality: return "UNPARSEABLE_CARDINALITY";
    case ErrorCode::NotAnAasx: return "NOT_AN_AASX";
    case ErrorCode::UnknownDialect: return "UNKNOWN_DIALECT";
    case ErrorCode::XmlMalformed: return "XML_MALFORMED";
    case ErrorCode::SyntaxError: return "SYNTAX_ERROR";
    case ErrorCode::InvalidModel: return "INVALID_MODEL";
    case ErrorCode::TransformFailed: return "TRANSFORM_FAILED";
    case ErrorCode::TemplateError: return "TEMPLATE_ERROR";
    case ErrorCode::UnsupportedKind: return "UNSUPPORTED_KIND";
    case ErrorCode::EmptySourceSet: return "EMPTY_SOURCESET";
    case ErrorCode::UnknownFormat: return "UNKNOWN_FORMAT";
    case ErrorCode::Usage: return "USAGE";
    }
    return "UNKNOWN";
}

std::string_view severity_name(Severity severity) {
    switch (severity) {
    case Severity::Info: return "INFO";
    case Severity::Warning: return "WARNING";
    case Severity::Error: return "ERROR";
    }
    return "UNKNOWN";
}

const std::vector<FindingRule>& finding_catalog() {
    static const std::vector<FindingRule> catalog = {
        {FindingCode::MissingSpecVersion, "MISSING_SPEC_VERSION", Severity::Error,
         "source does not state the specification version it targets"},
        {FindingCode::MissingCardinality, "MISSING_CARDINALITY", Severity::Warning,
         "element states no cardinality"},
        {FindingCode::MissingValueType, "MISSING_VALUE_TYPE", Severity::Warning,
         "property states no value type"},
        {FindingCode::MissingSemanticId, "MISSING_SEMANTICID", Severity::Warning,
         "element states no semanticId"},
        {FindingCode::MixedCardinalityNotation, "MIXED_CARDINALITY_NOTATION", Severity::Warning,
         "two cardinality notations used within one source"},
        {FindingCode::TypeFallback, "TYPE_FALLBACK", Severity::Warning,
         "unknown value type spelling mapped to String"},
        {FindingCode::IllegalIdShort, "ILLEGAL_IDSHORT", Severity::Warning,
         "idShort is not a legal identifier and was sanitized"},
        {FindingCode::UnseparatedCellContent, "UNSEPARATED_CELL_CONTENT", Severity::Info,
         "semanticId and description shared one run and were separated heuristically"},
        {FindingCode::InstantiatedInTemplate, "INSTANTIATED_IN_TEMPLATE", Severity::Warning,
         "template mixes in instantiated example elements"},
        {FindingCode::NoteWithoutFlag, "NOTE_WITHOUT_FLAG", Severity::Info,
         "note matched no interpretation pattern"},
        {FindingCode::UnparseableCardinality, "UNPARSEABLE_CARDINALITY", Severity::Warning,
         "cardinality text matches no known notation"},
        {FindingCode::UrlHealed, "URL_HEALED", Severity::Info,
         "identifier URL split by a line break was re-joined"},
        {FindingCode::AmbiguousUnitForm, "AMBIGUOUS_UNIT_FORM", Severity::Info,
         "starred unit form parsed like the plain bracket form"},
        {FindingCode::UnmatchedRegion, "UNMATCHED_REGION", Severity::Info,
         "non-empty grid region matched no table layout"},
        {FindingCode::SkippedElement, "SKIPPED_ELEMENT", Severity::Warning,
         "element kind outside scope was not extracted"},
        {FindingCode::UnresolvedReference, "UNRESOLVED_REFERENCE", Severity::Warning,
         "internal reference target not found in the package"},
        {FindingCode::FragmentCollision, "FRAGMENT_COLLISION", Severity::Error,
         "fragment field collides with an existing field; first definition wins"},
        {FindingCode::UnknownFragmentTarget, "UNKNOWN_FRAGMENT_TARGET", Severity::Error,
         "fragment names a target type that does not exist"},
        {FindingCode::TypeFromSemanticId, "TYPE_FROM_SEMANTICID", Severity::Info,
         "missing value type filled in by semanticId resolution"},
        {FindingCode::SpecVersionMismatch, "SPEC_VERSION_MISMATCH", Severity::Warning,
         "stated specification versions disagree between sources"},
        {FindingCode::DefaultSubstituted, "DEFAULT_SUBSTITUTED", Severity::Info,
         "example value unusable for its type; default substituted"},
    };
    return catalog;
}

std::string_view finding_code_name(FindingCode code) {
    for (const auto& rule : finding_catalog()) {
        if (rule.code == code) return rule.name;
    }
    return "UNKNOWN";
}

Severity finding_default_severity(FindingCode code) {
    for (const auto& rule : finding_catalog()) {
        if (rule.code == code) return rule.severity;
    }
    return Severity::Info;
}

namespace {

const std::regex kIriPattern(R"(^[A-Za-z][A-Za-z0-9+.-]*://\S+$|^urn:\S+$)");
// ECLASS style 0173-1#02-AAO677#002 and IEC CDD style 0112/2///61987#ABA827#003
const std::regex kIrdiPattern(R"(^\d{4}[-/][0-9A-Za-z#/._-]*#[0-9A-Za-z#/._-]+$)");
const std::regex kIriVersionTail(R"(/(\d{1,2})/(\d{1,2})(/[A-Za-z0-9_.-]*)?$)");
const std::regex kIrdiVersionTail(R"(#(\d{3})$)");

} // namespace

SemanticId classify_semantic_id(const std::string& token) {
    SemanticId id;
    id.value = token;
    std::smatch m;
    if (std::regex_match(token, kIriPattern)) {
        id.scheme = SemanticScheme::Iri;
        if (std::regex_search(token, m, kIriVersionTail)) {
            id.version = m[1].str() + "/" + m[2].str();
        }
    } else if (std::regex_match(token, kIrdiPattern)) {
        id.scheme = SemanticScheme::Irdi;
        if (std::regex_search(token, m, kIrdiVersionTail)) {
            id.version = m[1].str();
        }
    } else {
        id.scheme = SemanticScheme::Local;
    }
    return id;
}

std::string semantic_id_without_version(const SemanticId& id) {
    std::smatch m;
    if (id.scheme == SemanticScheme::Iri && std::regex_search(id.value, m, kIriVersionTail)) {
        return id.value.substr(0, static_cast<size_t>(m.position(0))) + m[3].str();
    }
    if (id.scheme == SemanticScheme::Irdi && std::regex_search(id.value, m, kIrdiVersionTail)) {
        return id.value.substr(0, static_cast<size_t>(m.position(0)));
    }
    return id.value;
}

std::string render_cardinality(const Cardinality& card) {
    std::string out = std::to_string(card.min) + "..";
    out += card.max ? std::to_string(*card.max) : "*";
    return out;
}

std::string render_version(const Version& version) {
    return std::to_string(version.major) + "." + std::to_string(version.minor);
}

namespace {

struct ValueKindName {
    ValueKind kind;
    std::string_view name;
};

constexpr ValueKindName kValueKindNames[] = {
    {ValueKind::String, "String"},
    {ValueKind::LangString, "LangString"},
    {ValueKind::Integer, "Integer"},
    {ValueKind::NonNegativeInteger, "NonNegativeInteger"},
    {ValueKind::Float, "Float"},
    {ValueKind::Double, "Double"},
    {ValueKind::Boolean, "Boolean"},
    {ValueKind::Date, "Date"},
    {ValueKind::DateTime, "DateTime"},
    {ValueKind::Duration, "Duration"},
    {ValueKind::AnyUri, "AnyUri"},
    {ValueKind::Decimal, "Decimal"},
};

struct ElementKindName {
    ElementKind kind;
    std::string_view name;
};

constexpr ElementKindName kElementKindNames[] = {
    {ElementKind::Property, "Property"},
    {ElementKind::MultiLanguageProperty, "MultiLanguageProperty"},
    {ElementKind::File, "File"},
    {ElementKind::Blob, "Blob"},
    {ElementKind::Range, "Range"},
    {ElementKind::ReferenceElement, "ReferenceElement"},
    {ElementKind::RelationshipElement, "RelationshipElement"},
    {ElementKind::AnnotatedRelationshipElement, "AnnotatedRelationshipElement"},
    {ElementKind::SubmodelElementCollection, "SubmodelElementCollection"},
    {ElementKind::Entity, "Entity"},
    {ElementKind::Submodel, "Submodel"},
};

} // namespace

std::string_view value_kind_name(ValueKind kind) {
    for (const auto& e : kValueKindNames) {
        if (e.kind == kind) return e.name;
    }
    return "String";
}

std::optional<ValueKind> value_kind_from_name(const std::string& name) {
    for (const auto& e : kValueKindNames) {
        if (e.name == name) return e.kind;
    }
    return std::nullopt;
}

std::string_view element_kind_name(ElementKind kind) {
    for (const auto& e : kElementKindNames) {
        if (e.kind == kind) return e.name;
    }
    return "Property";
}

std::optional<ElementKind> element_kind_from_name(const std::string& name) {
    for (const auto& e : kElementKindNames) {
        if (e.name == name) return e.kind;
    }
    return std::nullopt;
}

bool is_container_kind(ElementKind kind) {
    return kind == ElementKind::Submodel || kind == ElementKind::SubmodelElementCollection ||
           kind == ElementKind::Entity;
}

std::string_view placeholder_name(Placeholder placeholder) {
    switch (placeholder) {
    case Placeholder::None: return "none";
    case Placeholder::Counting: return "counting";
    case Placeholder::Arbitrary: return "arbitrary";
    case Placeholder::Variable: return "variable";
    case Placeholder::FreeText: return "freetext";
    }
    return "none";
}

bool is_legal_identifier(const std::string& name) {
    if (name.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(name[0]))) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

std::string sanitize_identifier(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') out += c;
    }
    while (!out.empty() && !std::isalpha(static_cast<unsigned char>(out.front()))) {
        out.erase(out.begin());
    }
    return out;
}

namespace {

void add_violation(ValidationReport& report, std::string code, std::string path,
                   std::string message) {
    report.push_back(Violation{std::move(code), std::move(path), std::move(message)});
}

void validate_fields(const Model& model, const RecordType& record,
                     const std::set<std::string>& localNames,
                     const std::set<std::string>& importedSpecs, ValidationReport& report) {
    std::set<std::string> seenBases;
    for (const auto& field : record.fields) {
        const std::string path = record.name + "." + field.idShort.base;
        if (!seenBases.insert(field.idShort.base).second) {
            add_violation(report, "DUPLICATE_FIELD_NAME", path,
                          "field idShort base appears more than once in " + record.name);
        }
        if (field.idShort.placeholder == Placeholder::None &&
            !is_legal_identifier(field.idShort.base)) {
            add_violation(report, "BAD_IDENTIFIER", path,
                          "idShort base is not a legal identifier: '" + field.idShort.base + "'");
        }
        if (field.kind == ElementKind::Property && !field.valueType && !field.typeRef) {
            add_violation(report, "MISSING_VALUE_TYPE", path,
                          "property field carries no value type");
        }
        if (is_container_kind(field.kind) && !field.typeRef) {
            add_violation(report, "CONTAINER_WITHOUT_TYPE", path,
                          "container field does not reference a record type");
        }
        if (field.typeRef) {
            const std::string& ref = *field.typeRef;
            const auto colon = ref.find(':');
            if (colon != std::string::npos) {
                const std::string spec = ref.substr(0, colon);
                if (!importedSpecs.count(spec)) {
                    add_violation(report, "UNRESOLVED_TYPE", path,
                                  "reference '" + ref + "' names spec " + spec +
                                      " which is not imported");
                }
            } else if (!localNames.count(ref)) {
                add_violation(report, "UNRESOLVED_TYPE", path,
                              "reference '" + ref + "' resolves to no type, enum or import");
            }
        }
        (void)model;
    }
}

} // namespace

ValidationReport validate_model(const Model& model) {
    ValidationReport report;
    if (model.specNumber.empty()) {
        add_violation(report, "MISSING_SPEC_NUMBER", "model", "model declares no spec number");
    }
    if (!model.version) {
        add_violation(report, "MISSING_VERSION", "model", "model declares no version");
    }

    std::set<std::string> localNames;
    std::set<std::string> importedSpecs;
    for (const auto& imp : model.imports) importedSpecs.insert(imp.specNumber);

    auto claim_name = [&](const std::string& name, const char* what) {
        if (name.empty()) {
            add_violation(report, "EMPTY_TYPE_NAME", "model",
                          std::string(what) + " with empty name");
            return;
        }
        if (!localNames.insert(name).second) {
            add_violation(report, "DUPLICATE_TYPE_NAME", name,
                          std::string(what) + " name '" + name + "' is not unique");
        }
    };

    for (const auto& sm : model.submodels) claim_name(sm.name, "submodel");
    for (const auto& ty : model.types) claim_name(ty.name, "type");
    for (const auto& en : model.enums) claim_name(en.name, "enum");

    for (const auto& sm : model.submodels) {
        if (sm.kind != ElementKind::Submodel) {
            add_violation(report, "BAD_SUBMODEL_KIND", sm.name,
                          "submodel entry has kind " + std::string(element_kind_name(sm.kind)));
        }
        validate_fields(model, sm, localNames, importedSpecs, report);
    }
    for (const auto& ty : model.types) {
        if (!is_container_kind(ty.kind) || ty.kind == ElementKind::Submodel) {
            add_violation(report, "BAD_TYPE_KIND", ty.name,
                          "type entry has kind " + std::string(element_kind_name(ty.kind)));
        }
        validate_fields(model, ty, localNames, importedSpecs, report);
    }
    for (const auto& en : model.enums) {
        std::set<std::string> values;
        for (const auto& lit : en.literals) {
            if (!values.insert(lit.value).second) {
                add_violation(report, "DUPLICATE_ENUM_LITERAL", en.name + "." + lit.name,
                              "literal value '" + lit.value + "' appears twice");
            }
        }
    }
    return report;
}

} // namespace smtkit
