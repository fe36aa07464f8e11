#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace smtkit {

enum class Severity { Info, Warning, Error };

// Closed catalog of finding codes. Lint rules and pipeline heuristics both
// draw from this set; the CLI documents it via finding_catalog().
enum class FindingCode {
    // lint rule catalog
    MissingSpecVersion,
    MissingCardinality,
    MissingValueType,
    MissingSemanticId,
    MixedCardinalityNotation,
    TypeFallback,
    IllegalIdShort,
    UnseparatedCellContent,
    InstantiatedInTemplate,
    NoteWithoutFlag,
    // ingest/transform heuristics
    UnparseableCardinality,
    UrlHealed,
    AmbiguousUnitForm,
    UnmatchedRegion,
    SkippedElement,
    UnresolvedReference,
    FragmentCollision,
    UnknownFragmentTarget,
    TypeFromSemanticId,
    SpecVersionMismatch,
    DefaultSubstituted,
};

struct Finding {
    FindingCode code;
    Severity severity;
    std::string source;   // file or model the finding belongs to
    std::string location; // table/element path inside the source
    std::string message;

    bool operator==(const Finding&) const = default;
};

struct FindingRule {
    FindingCode code;
    std::string_view name;
    Severity severity;
    std::string_view summary;
};

std::string_view finding_code_name(FindingCode code);
std::string_view severity_name(Severity severity);
Severity finding_default_severity(FindingCode code);
const std::vector<FindingRule>& finding_catalog();

inline Finding make_finding(FindingCode code, std::string source, std::string location,
                            std::string message) {
    return Finding{code, finding_default_severity(code), std::move(source),
                   std::move(location), std::move(message)};
}

} // namespace smtkit
