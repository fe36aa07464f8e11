#pragma once

// AASX package ingestion: zip container + AAS environment XML in the v2 or
// v3 dialect, normalized into the same ExtractedSpec the grid path produces.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "smtkit/extracted.hpp"
#include "smtkit/model.hpp"
#include "smtkit/xml.hpp"

namespace smtkit::aasx {

struct Part {
    std::string path;
    std::string bytes;
};

struct AasxPackage {
    std::string source;
    std::vector<Part> parts;
    std::vector<size_t> xmlParts; // indices of parts with an AAS root element
};

enum class DialectVersion { V2, V3 };

struct AasDialect {
    DialectVersion version = DialectVersion::V3;
    std::string namespaceUri;

    // element names differing between the dialects for identical concepts
    std::string idElement;         // "identification" / "id"
    std::string langStringElement; // "langString" / "langStringTextType"
    bool wrappedElements = false;  // v2 wraps elements in <submodelElement>
};

// Enumerates parts and identifies AAS XML parts by root-element namespace
// scan. Throws Error{NotAnAasx} when no part qualifies, Error{IoError} on
// container problems.
AasxPackage open_package(const std::filesystem::path& path);
AasxPackage package_from_bytes(std::string zipBytes, const std::string& name);

// Throws Error{UnknownDialect} naming the namespace that was found.
AasDialect detect_dialect(const xml::Node& root);

// Reads a cardinality/multiplicity qualifier off a submodel-element node.
// Unparseable values become findings; an absent qualifier is a legal absence.
std::optional<Cardinality> read_cardinality_qualifier(const xml::Node& element,
                                                      const AasDialect& dialect,
                                                      std::vector<Finding>& findings,
                                                      const std::string& source,
                                                      const std::string& location);

ExtractedSpec parse_environment(const xml::Node& root, const AasDialect& dialect,
                                const std::string& sourceName);

// open + detect + parse on the first AAS XML part, with spec number and
// version cross-checked against the package file name.
ExtractedSpec extract_spec(const AasxPackage& package);

} // namespace smtkit::aasx
