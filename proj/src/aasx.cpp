#include "smtkit/aasx.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>

#include "smtkit/error.hpp"
#include "smtkit/grid.hpp"
#include "smtkit/zip.hpp"

namespace smtkit::aasx {

namespace {

std::string lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool looks_like_xml(const std::string& bytes) {
    size_t i = 0;
    if (bytes.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
    while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
    return i < bytes.size() && bytes[i] == '<';
}

bool is_aas_namespace(const std::string& ns) {
    return ns.find("admin-shell.io/aas/") != std::string::npos;
}

} // namespace

AasxPackage package_from_bytes(std::string zipBytes, const std::string& name) {
    zip::Archive archive = zip::Archive::from_bytes(std::move(zipBytes), name);
    AasxPackage package;
    package.source = name;
    for (const auto& entry : archive.entries()) {
        if (!entry.name.empty() && entry.name.back() == '/') continue; // directory
        Part part;
        part.path = entry.name;
        part.bytes = archive.read(entry);
        package.parts.push_back(std::move(part));
    }
    for (size_t i = 0; i < package.parts.size(); ++i) {
        const auto& part = package.parts[i];
        if (!looks_like_xml(part.bytes)) continue;
        try {
            const xml::Node root = xml::parse(part.bytes);
            if (is_aas_namespace(root.nsUri)) package.xmlParts.push_back(i);
        } catch (const Error&) {
            // not a well-formed XML part; the scan just moves on
        }
    }
    if (package.xmlParts.empty()) {
        throw Error(ErrorCode::NotAnAasx, name + ": no AAS XML part found");
    }
    return package;
}

AasxPackage open_package(const std::filesystem::path& path) {
    zip::Archive archive = zip::Archive::open(path); // throws IoError when unreadable
    AasxPackage package;
    package.source = path.filename().string();
    for (const auto& entry : archive.entries()) {
        if (!entry.name.empty() && entry.name.back() == '/') continue;
        Part part;
        part.path = entry.name;
        part.bytes = archive.read(entry);
        package.parts.push_back(std::move(part));
    }
    for (size_t i = 0; i < package.parts.size(); ++i) {
        const auto& part = package.parts[i];
        if (!looks_like_xml(part.bytes)) continue;
        try {
            const xml::Node root = xml::parse(part.bytes);
            if (is_aas_namespace(root.nsUri)) package.xmlParts.push_back(i);
        } catch (const Error&) {
        }
    }
    if (package.xmlParts.empty()) {
        throw Error(ErrorCode::NotAnAasx, package.source + ": no AAS XML part found");
    }
    return package;
}

AasDialect detect_dialect(const xml::Node& root) {
    AasDialect dialect;
    dialect.namespaceUri = root.nsUri;
    if (root.nsUri.find("/aas/2/0") != std::string::npos) {
        dialect.version = DialectVersion::V2;
        dialect.idElement = "identification";
        dialect.langStringElement = "langString";
        dialect.wrappedElements = true;
        return dialect;
    }
    if (root.nsUri.find("/aas/3/0") != std::string::npos) {
        dialect.version = DialectVersion::V3;
        dialect.idElement = "id";
        dialect.langStringElement = "langStringTextType";
        dialect.wrappedElements = false;
        return dialect;
    }
    throw Error(ErrorCode::UnknownDialect, "root element namespace '" + root.nsUri + "'");
}

namespace {

struct QualifierView {
    std::string type;
    std::string value;
};

// Qualifier lists appear with varying wrapper nesting across dialects and
// exporters; probe qualifier/qualifiers wrappers a few levels deep.
void collect_qualifiers_into(const xml::Node& node, std::vector<QualifierView>& out, int depth) {
    for (const auto& child : node.children) {
        if (child.localName != "qualifier" && child.localName != "qualifiers") continue;
        if (child.localName == "qualifier" && child.child("type")) {
            QualifierView view;
            view.type = child.child("type")->trimmed_text();
            if (const auto* v = child.child("value")) view.value = v->trimmed_text();
            out.push_back(std::move(view));
        } else if (depth < 3) {
            collect_qualifiers_into(child, out, depth + 1);
        }
    }
}

std::vector<QualifierView> collect_qualifiers(const xml::Node& element) {
    std::vector<QualifierView> out;
    collect_qualifiers_into(element, out, 0);
    return out;
}

// key text for v2, key/value for v3; keys flattened to one identifier string
std::string flatten_reference(const xml::Node& refNode) {
    std::vector<std::string> keyValues;
    std::vector<const xml::Node*> stack{&refNode};
    while (!stack.empty()) {
        const xml::Node* node = stack.back();
        stack.pop_back();
        if (node->localName == "key") {
            if (const auto* value = node->child("value")) {
                keyValues.push_back(value->trimmed_text());
            } else {
                keyValues.push_back(node->trimmed_text());
            }
            continue;
        }
        for (auto it = node->children.rbegin(); it != node->children.rend(); ++it) {
            stack.push_back(&*it);
        }
    }
    std::string out;
    for (const auto& v : keyValues) {
        if (v.empty()) continue;
        if (!out.empty()) out += "/";
        out += v;
    }
    return out;
}

std::optional<SemanticId> read_semantic_id(const xml::Node& element) {
    const xml::Node* sem = element.child("semanticId");
    if (!sem) return std::nullopt;
    const std::string flat = flatten_reference(*sem);
    if (flat.empty()) return std::nullopt;
    return classify_semantic_id(flat);
}

// multi-language text: v2 <langString lang="en">, v3 <langStringTextType>
// with <language>/<text> children; English preferred, else the first entry.
std::string read_lang_text(const xml::Node& parent, const AasDialect& dialect,
                           std::vector<std::pair<std::string, std::string>>* all = nullptr) {
    std::string first;
    std::string english;
    for (const auto& child : parent.children) {
        std::string lang;
        std::string text;
        if (child.localName == dialect.langStringElement || child.localName == "langString" ||
            child.localName == "langStringTextType") {
            if (const auto* langNode = child.child("language")) {
                lang = lower(langNode->trimmed_text());
                if (const auto* textNode = child.child("text")) text = textNode->trimmed_text();
            } else {
                if (const auto* attr = child.attribute("lang")) lang = lower(*attr);
                text = child.trimmed_text();
            }
        } else {
            continue;
        }
        if (all) all->emplace_back(lang, text);
        if (first.empty()) first = text;
        if (english.empty() && lang == "en") english = text;
    }
    return english.empty() ? first : english;
}

const std::map<std::string, ElementKind>& element_name_table() {
    static const std::map<std::string, ElementKind> table = {
        {"property", ElementKind::Property},
        {"multiLanguageProperty", ElementKind::MultiLanguageProperty},
        {"file", ElementKind::File},
        {"blob", ElementKind::Blob},
        {"range", ElementKind::Range},
        {"referenceElement", ElementKind::ReferenceElement},
        {"relationshipElement", ElementKind::RelationshipElement},
        {"annotatedRelationshipElement", ElementKind::AnnotatedRelationshipElement},
        {"submodelElementCollection", ElementKind::SubmodelElementCollection},
        {"entity", ElementKind::Entity},
    };
    return table;
}

struct EnvironmentWalker {
    const AasDialect& dialect;
    ExtractedSpec& spec;
    std::map<std::string, std::string> conceptDescriptions; // id -> description text
    std::set<std::string> defNames;

    std::string unique_def_name(const std::string& base) {
        std::string name = base.empty() ? "Unnamed" : base;
        int suffix = 2;
        while (!defNames.insert(name).second) {
            name = (base.empty() ? "Unnamed" : base) + "_" + std::to_string(suffix++);
        }
        return name;
    }

    void load_concept_descriptions(const xml::Node& root) {
        const xml::Node* list = root.child("conceptDescriptions");
        if (!list) return;
        for (const auto& cd : list->children) {
            if (cd.localName != "conceptDescription") continue;
            std::string id;
            if (const auto* idNode = cd.child(dialect.idElement)) {
                id = idNode->trimmed_text();
            } else if (const auto* anyId = cd.child("identification")) {
                id = anyId->trimmed_text();
            }
            if (id.empty()) continue;

            std::string text;
            if (const auto* desc = cd.child("description")) {
                text = read_lang_text(*desc, dialect);
            }
            // IEC 61360 data specification: preferredName, else definition
            std::vector<const xml::Node*> stack{&cd};
            std::string preferred;
            std::string definition;
            while (!stack.empty()) {
                const xml::Node* node = stack.back();
                stack.pop_back();
                if (node->localName == "preferredName" && preferred.empty()) {
                    preferred = read_lang_text(*node, dialect);
                } else if (node->localName == "definition" && definition.empty()) {
                    definition = read_lang_text(*node, dialect);
                }
                for (const auto& child : node->children) stack.push_back(&child);
            }
            if (text.empty()) text = definition.empty() ? preferred : definition;
            if (!text.empty()) conceptDescriptions[id] = text;
        }
    }

    // element nodes of a container, unwrapping v2 <submodelElement> wrappers
    std::vector<const xml::Node*> element_nodes(const xml::Node& container) {
        std::vector<const xml::Node*> out;
        for (const auto& child : container.children) {
            if (dialect.wrappedElements && child.localName == "submodelElement") {
                for (const auto& inner : child.children) out.push_back(&inner);
            } else {
                out.push_back(&child);
            }
        }
        return out;
    }

    std::string element_location(const std::string& parentPath, const std::string& idShort) {
        return parentPath.empty() ? idShort : parentPath + "." + idShort;
    }

    void walk_submodel(const xml::Node& sm) {
        RawDefinition def;
        const auto* idShortNode = sm.child("idShort");
        const std::string idShort = idShortNode ? idShortNode->trimmed_text() : "";
        auto parsed = grid::parse_id_short_cell(idShort.empty() ? "Submodel" : idShort);
        def.idShort = parsed.idShort;
        def.name = unique_def_name(def.idShort.base);
        def.kind = ElementKind::Submodel;
        def.semanticId = read_semantic_id(sm);
        if (const auto* desc = sm.child("description")) {
            def.description = read_lang_text(*desc, dialect);
        }
        def.location = def.name;
        if (const auto* admin = sm.child("administration")) {
            std::string version;
            if (const auto* v = admin->child("version")) version = v->trimmed_text();
            if (const auto* r = admin->child("revision")) {
                if (!version.empty() && !r->trimmed_text().empty()) {
                    version += "." + r->trimmed_text();
                }
            }
            if (!version.empty()) def.version = version;
        }

        if (const auto* elements = sm.child("submodelElements")) {
            walk_children(*elements, def, def.name);
        }
        merge_instantiated(def);
        spec.submodelDefs.push_back(std::move(def));
    }

    void walk_children(const xml::Node& container, RawDefinition& def, const std::string& path) {
        for (const xml::Node* node : element_nodes(container)) {
            walk_element(*node, def, path);
        }
    }

    void walk_element(const xml::Node& node, RawDefinition& parentDef, const std::string& path) {
        const auto& table = element_name_table();
        const auto kindIt = table.find(node.localName);
        const auto* idShortNode = node.child("idShort");
        const std::string idShort = idShortNode ? idShortNode->trimmed_text() : "";
        const std::string location = element_location(path, idShort.empty() ? "?" : idShort);

        if (kindIt == table.end()) {
            spec.findings.push_back(make_finding(FindingCode::SkippedElement, spec.source, location,
                                                 "element <" + node.localName +
                                                     "> is outside the supported element kinds"));
            return;
        }

        RawFieldRow row;
        row.location = location;
        row.kind = kindIt->second;
        if (idShort.empty()) {
            spec.findings.push_back(make_finding(FindingCode::SkippedElement, spec.source, location,
                                                 "element without idShort skipped"));
            return;
        }
        auto parsed = grid::parse_id_short_cell(idShort);
        row.idShort = parsed.idShort;
        if (row.idShort.displayName) {
            spec.findings.push_back(make_finding(FindingCode::IllegalIdShort, spec.source, location,
                                                 "idShort '" + *row.idShort.displayName +
                                                     "' sanitized to '" + row.idShort.base + "'"));
        }
        row.idShortCell = idShort;
        row.semanticId = read_semantic_id(node);
        if (row.semanticId) row.semanticCell = row.semanticId->value;

        if (const auto* desc = node.child("description")) {
            row.description = read_lang_text(*desc, dialect);
        }
        if (row.description.empty() && row.semanticId) {
            if (auto it = conceptDescriptions.find(row.semanticId->value);
                it != conceptDescriptions.end()) {
                row.description = it->second;
            }
        }

        row.cardinality =
            read_cardinality_qualifier(node, dialect, spec.findings, spec.source, location);
        for (const auto& q : collect_qualifiers(node)) {
            const std::string type = lower(q.type);
            if (type.find("cardinality") != std::string::npos ||
                type.find("multiplicity") != std::string::npos) {
                row.cardinalityCell = q.value; // raw notation, kept for audit
                break;
            }
        }

        if (const auto* vt = node.child("valueType")) {
            const std::string raw = vt->trimmed_text();
            if (!raw.empty()) {
                row.rawValueType = raw;
                row.valueCell = raw;
            }
        }

        switch (row.kind) {
        case ElementKind::SubmodelElementCollection:
        case ElementKind::Entity: {
            RawDefinition def;
            def.idShort = row.idShort;
            def.name = unique_def_name(def.idShort.base);
            def.kind = row.kind;
            def.semanticId = row.semanticId;
            def.description = row.description;
            def.parent = parentDef.name;
            def.location = location;
            const xml::Node* childContainer =
                row.kind == ElementKind::Entity ? node.child("statements") : node.child("value");
            if (childContainer) walk_children(*childContainer, def, location);
            merge_instantiated(def);
            row.typeRef = def.name;
            spec.typeDefs.push_back(std::move(def));
            break;
        }
        case ElementKind::MultiLanguageProperty: {
            if (const auto* value = node.child("value")) {
                std::vector<std::pair<std::string, std::string>> all;
                read_lang_text(*value, dialect, &all);
                for (const auto& [lang, text] : all) {
                    if (text.empty()) continue;
                    ExampleValue ex;
                    ex.text = text;
                    if (!lang.empty()) ex.language = lang;
                    row.examples.push_back(std::move(ex));
                }
            }
            break;
        }
        default: {
            if (const auto* value = node.child("value")) {
                const std::string text = value->trimmed_text();
                if (!text.empty()) {
                    ExampleValue ex;
                    ex.text = text;
                    row.examples.push_back(std::move(ex));
                }
            }
            break;
        }
        }

        // example values may also live in dedicated qualifiers
        for (const auto& q : collect_qualifiers(node)) {
            if (lower(q.type).find("example") != std::string::npos && !q.value.empty()) {
                ExampleValue ex;
                ex.text = q.value;
                row.examples.push_back(std::move(ex));
            }
        }

        parentDef.rows.push_back(std::move(row));
    }

    // rows like Phone01/Phone02 with concrete values collapse into one
    // Counting field; the linter reports the template/example mix
    void merge_instantiated(RawDefinition& def) {
        static const std::regex suffixed(R"(^(.*?[A-Za-z_])(\d{2,})$)");
        std::map<std::string, std::vector<size_t>> groups;
        for (size_t i = 0; i < def.rows.size(); ++i) {
            std::smatch m;
            const std::string& base = def.rows[i].idShort.base;
            if (def.rows[i].idShort.placeholder == Placeholder::None &&
                std::regex_match(base, m, suffixed) && !def.rows[i].examples.empty()) {
                groups[m[1]].push_back(i);
            }
        }
        std::set<size_t> drop;
        for (auto& [prefix, indices] : groups) {
            if (indices.size() < 2) continue;
            auto structure_matches = [&](const RawFieldRow& a, const RawFieldRow& b) {
                return a.kind == b.kind && a.rawValueType == b.rawValueType &&
                       a.semanticId == b.semanticId;
            };
            bool uniform = true;
            for (size_t k = 1; k < indices.size(); ++k) {
                if (!structure_matches(def.rows[indices[0]], def.rows[indices[k]])) {
                    uniform = false;
                    break;
                }
            }
            if (!uniform) continue;

            RawFieldRow& keeper = def.rows[indices[0]];
            std::smatch m;
            std::regex_match(keeper.idShort.base, m, suffixed);
            const std::string digits = m[2];
            keeper.idShort.base = prefix;
            keeper.idShort.placeholder = Placeholder::Counting;
            keeper.idShort.placeholderText = std::string(digits.size(), '0');
            keeper.instantiated = true;
            for (size_t k = 1; k < indices.size(); ++k) {
                RawFieldRow& gone = def.rows[indices[k]];
                for (auto& ex : gone.examples) keeper.examples.push_back(ex);
                drop.insert(indices[k]);
            }
        }
        if (drop.empty()) return;
        std::vector<RawFieldRow> kept;
        for (size_t i = 0; i < def.rows.size(); ++i) {
            if (!drop.count(i)) kept.push_back(std::move(def.rows[i]));
        }
        def.rows = std::move(kept);
    }
};

} // namespace

std::optional<Cardinality> read_cardinality_qualifier(const xml::Node& element,
                                                      const AasDialect& dialect,
                                                      std::vector<Finding>& findings,
                                                      const std::string& source,
                                                      const std::string& location) {
    (void)dialect; // qualifier shape is probed structurally in both dialects
    for (const auto& q : collect_qualifiers(element)) {
        const std::string type = lower(q.type);
        if (type.find("cardinality") == std::string::npos &&
            type.find("multiplicity") == std::string::npos) {
            continue;
        }
        try {
            return grid::parse_cardinality(q.value);
        } catch (const Error&) {
            findings.push_back(make_finding(FindingCode::UnparseableCardinality, source, location,
                                            "cannot parse qualifier value '" + q.value + "'"));
            return std::nullopt;
        }
    }
    return std::nullopt;
}

ExtractedSpec parse_environment(const xml::Node& root, const AasDialect& dialect,
                                const std::string& sourceName) {
    ExtractedSpec spec;
    spec.source = sourceName;
    spec.sourceKind = "aasx";

    EnvironmentWalker walker{dialect, spec, {}, {}};
    walker.load_concept_descriptions(root);

    const xml::Node* submodels = root.child("submodels");
    if (submodels) {
        for (const auto& sm : submodels->children) {
            if (sm.localName == "submodel") walker.walk_submodel(sm);
        }
    }
    if (spec.submodelDefs.empty()) {
        throw Error(ErrorCode::XmlMalformed, sourceName + ": environment contains no submodel");
    }

    if (spec.title.empty()) spec.title = spec.submodelDefs.front().name;
    for (const auto& def : spec.submodelDefs) {
        if (def.version) {
            spec.version = *def.version;
            break;
        }
    }
    return spec;
}

ExtractedSpec extract_spec(const AasxPackage& package) {
    const Part& part = package.parts[package.xmlParts.front()];
    xml::Node root = xml::parse(part.bytes);
    const AasDialect dialect = detect_dialect(root);
    ExtractedSpec spec = parse_environment(root, dialect, package.source);

    std::smatch m;
    static const std::regex specNum(R"((\d{5}))");
    if (std::regex_search(package.source, m, specNum)) {
        spec.specNumber = m[1];
    } else {
        // IDTA convention embeds the spec number in the identifiers
        for (const auto& def : spec.submodelDefs) {
            if (def.semanticId && std::regex_search(def.semanticId->value, m, specNum)) {
                spec.specNumber = m[1];
                break;
            }
        }
    }
    static const std::regex fileVersion(R"(\d{5}-(\d+)-(\d+))");
    if (std::regex_search(package.source, m, fileVersion)) {
        const std::string fromFile = m[1].str() + "." + m[2].str();
        if (spec.version.empty()) {
            spec.version = fromFile;
        } else {
            // normalize "x.y" vs "x-y" before comparing
            std::string stated = spec.version;
            std::replace(stated.begin(), stated.end(), '-', '.');
            if (stated != fromFile) {
                spec.findings.push_back(make_finding(
                    FindingCode::SpecVersionMismatch, spec.source, "environment",
                    "package name says version " + fromFile + " but the environment states " +
                        spec.version));
            }
        }
    }
    return spec;
}

} // namespace smtkit::aasx
