#include "smtkit/extracted.hpp"

#include <json.hpp>

#include "smtkit/error.hpp"

// Sidecar JSON form of ExtractedSpec. Internal pipeline format: written by
// `ingest`, read back by `transform` and `lint`; round-trips losslessly.

namespace smtkit {

namespace {

using nlohmann::ordered_json;

ordered_json semantic_to_json(const SemanticId& id) {
    ordered_json j;
    j["scheme"] = id.scheme == SemanticScheme::Iri    ? "iri"
                  : id.scheme == SemanticScheme::Irdi ? "irdi"
                                                      : "local";
    j["value"] = id.value;
    if (id.version) j["version"] = *id.version;
    return j;
}

SemanticId semantic_from_json(const ordered_json& j) {
    SemanticId id;
    const std::string scheme = j.at("scheme").get<std::string>();
    id.scheme = scheme == "iri"    ? SemanticScheme::Iri
                : scheme == "irdi" ? SemanticScheme::Irdi
                                   : SemanticScheme::Local;
    id.value = j.at("value").get<std::string>();
    if (j.contains("version")) id.version = j["version"].get<std::string>();
    return id;
}

ordered_json row_to_json(const RawFieldRow& row) {
    ordered_json j;
    j["cells"] = {row.idShortCell, row.semanticCell, row.valueCell, row.cardinalityCell};
    j["base"] = row.idShort.base;
    j["placeholder"] = std::string(placeholder_name(row.idShort.placeholder));
    if (row.idShort.placeholderText) j["placeholderText"] = *row.idShort.placeholderText;
    if (row.idShort.displayName) j["displayName"] = *row.idShort.displayName;
    j["kind"] = std::string(element_kind_name(row.kind));
    if (row.rawValueType) j["rawValueType"] = *row.rawValueType;
    if (row.typeRef) j["typeRef"] = *row.typeRef;
    if (row.semanticId) j["semanticId"] = semantic_to_json(*row.semanticId);
    if (!row.description.empty()) j["description"] = row.description;
    if (!row.notes.empty()) j["notes"] = row.notes;
    if (!row.examples.empty()) {
        ordered_json examples = ordered_json::array();
        for (const auto& ex : row.examples) {
            ordered_json je;
            je["text"] = ex.text;
            if (ex.language) je["language"] = *ex.language;
            if (ex.unit) je["unit"] = *ex.unit;
            examples.push_back(std::move(je));
        }
        j["examples"] = std::move(examples);
    }
    if (row.cardinality) {
        j["cardinality"] = render_cardinality(*row.cardinality);
    }
    if (row.instantiated) j["instantiated"] = true;
    j["location"] = row.location;
    if (row.allowsUserIdShort) j["allowsUserIdShort"] = true;
    if (!row.alternativeSemanticIds.empty()) {
        ordered_json alts = ordered_json::array();
        for (const auto& alt : row.alternativeSemanticIds) alts.push_back(semantic_to_json(alt));
        j["alternativeSemanticIds"] = std::move(alts);
    }
    if (row.advisoryFlags) j["advisory"] = true;
    return j;
}

RawFieldRow row_from_json(const ordered_json& j) {
    RawFieldRow row;
    const auto& cells = j.at("cells");
    row.idShortCell = cells.at(0).get<std::string>();
    row.semanticCell = cells.at(1).get<std::string>();
    row.valueCell = cells.at(2).get<std::string>();
    row.cardinalityCell = cells.at(3).get<std::string>();
    row.idShort.base = j.at("base").get<std::string>();
    const std::string ph = j.at("placeholder").get<std::string>();
    row.idShort.placeholder = ph == "counting"    ? Placeholder::Counting
                              : ph == "arbitrary" ? Placeholder::Arbitrary
                              : ph == "variable"  ? Placeholder::Variable
                              : ph == "freetext"  ? Placeholder::FreeText
                                                  : Placeholder::None;
    if (j.contains("placeholderText"))
        row.idShort.placeholderText = j["placeholderText"].get<std::string>();
    if (j.contains("displayName")) row.idShort.displayName = j["displayName"].get<std::string>();
    if (auto kind = element_kind_from_name(j.at("kind").get<std::string>())) row.kind = *kind;
    if (j.contains("rawValueType")) row.rawValueType = j["rawValueType"].get<std::string>();
    if (j.contains("typeRef")) row.typeRef = j["typeRef"].get<std::string>();
    if (j.contains("semanticId")) row.semanticId = semantic_from_json(j["semanticId"]);
    if (j.contains("description")) row.description = j["description"].get<std::string>();
    if (j.contains("notes")) row.notes = j["notes"].get<std::vector<std::string>>();
    if (j.contains("examples")) {
        for (const auto& je : j["examples"]) {
            ExampleValue ex;
            ex.text = je.at("text").get<std::string>();
            if (je.contains("language")) ex.language = je["language"].get<std::string>();
            if (je.contains("unit")) ex.unit = je["unit"].get<std::string>();
            row.examples.push_back(std::move(ex));
        }
    }
    if (j.contains("cardinality")) {
        const std::string card = j["cardinality"].get<std::string>();
        Cardinality c;
        const auto dots = card.find("..");
        c.min = std::stoi(card.substr(0, dots));
        const std::string maxPart = card.substr(dots + 2);
        if (maxPart != "*") c.max = std::stoi(maxPart);
        row.cardinality = c;
    }
    if (j.contains("instantiated")) row.instantiated = j["instantiated"].get<bool>();
    row.location = j.at("location").get<std::string>();
    if (j.contains("allowsUserIdShort")) row.allowsUserIdShort = j["allowsUserIdShort"].get<bool>();
    if (j.contains("alternativeSemanticIds")) {
        for (const auto& ja : j["alternativeSemanticIds"]) {
            row.alternativeSemanticIds.push_back(semantic_from_json(ja));
        }
    }
    if (j.contains("advisory")) row.advisoryFlags = j["advisory"].get<bool>();
    return row;
}

ordered_json def_to_json(const RawDefinition& def) {
    ordered_json j;
    j["name"] = def.name;
    j["base"] = def.idShort.base;
    j["placeholder"] = std::string(placeholder_name(def.idShort.placeholder));
    if (def.idShort.placeholderText) j["placeholderText"] = *def.idShort.placeholderText;
    if (def.idShort.displayName) j["displayName"] = *def.idShort.displayName;
    j["kind"] = std::string(element_kind_name(def.kind));
    if (def.semanticId) j["semanticId"] = semantic_to_json(*def.semanticId);
    if (!def.description.empty()) j["description"] = def.description;
    if (!def.notes.empty()) j["notes"] = def.notes;
    if (def.version) j["version"] = *def.version;
    if (!def.fragmentTargets.empty()) j["appliesTo"] = def.fragmentTargets;
    if (def.parent) j["parent"] = *def.parent;
    j["location"] = def.location;
    if (def.allowsUserIdShort) j["allowsUserIdShort"] = true;
    if (def.advisoryFlags) j["advisory"] = true;
    ordered_json rows = ordered_json::array();
    for (const auto& row : def.rows) rows.push_back(row_to_json(row));
    j["rows"] = std::move(rows);
    return j;
}

RawDefinition def_from_json(const ordered_json& j) {
    RawDefinition def;
    def.name = j.at("name").get<std::string>();
    def.idShort.base = j.at("base").get<std::string>();
    const std::string ph = j.at("placeholder").get<std::string>();
    def.idShort.placeholder = ph == "counting"    ? Placeholder::Counting
                              : ph == "arbitrary" ? Placeholder::Arbitrary
                              : ph == "variable"  ? Placeholder::Variable
                              : ph == "freetext"  ? Placeholder::FreeText
                                                  : Placeholder::None;
    if (j.contains("placeholderText"))
        def.idShort.placeholderText = j["placeholderText"].get<std::string>();
    if (j.contains("displayName")) def.idShort.displayName = j["displayName"].get<std::string>();
    if (auto kind = element_kind_from_name(j.at("kind").get<std::string>())) def.kind = *kind;
    if (j.contains("semanticId")) def.semanticId = semantic_from_json(j["semanticId"]);
    if (j.contains("description")) def.description = j["description"].get<std::string>();
    if (j.contains("notes")) def.notes = j["notes"].get<std::vector<std::string>>();
    if (j.contains("version")) def.version = j["version"].get<std::string>();
    if (j.contains("appliesTo")) def.fragmentTargets = j["appliesTo"].get<std::vector<std::string>>();
    if (j.contains("parent")) def.parent = j["parent"].get<std::string>();
    def.location = j.at("location").get<std::string>();
    if (j.contains("allowsUserIdShort")) def.allowsUserIdShort = j["allowsUserIdShort"].get<bool>();
    if (j.contains("advisory")) def.advisoryFlags = j["advisory"].get<bool>();
    for (const auto& jr : j.at("rows")) def.rows.push_back(row_from_json(jr));
    return def;
}

ordered_json finding_to_json(const Finding& finding) {
    ordered_json j;
    j["code"] = std::string(finding_code_name(finding.code));
    j["severity"] = std::string(severity_name(finding.severity));
    j["source"] = finding.source;
    j["location"] = finding.location;
    j["message"] = finding.message;
    return j;
}

Finding finding_from_json(const ordered_json& j) {
    Finding f{};
    const std::string code = j.at("code").get<std::string>();
    for (const auto& rule : finding_catalog()) {
        if (rule.name == code) {
            f.code = rule.code;
            break;
        }
    }
    const std::string sev = j.at("severity").get<std::string>();
    f.severity = sev == "ERROR" ? Severity::Error : sev == "WARNING" ? Severity::Warning
                                                                     : Severity::Info;
    f.source = j.at("source").get<std::string>();
    f.location = j.at("location").get<std::string>();
    f.message = j.at("message").get<std::string>();
    return f;
}

} // namespace

std::string extracted_to_json(const ExtractedSpec& spec) {
    ordered_json j;
    j["specNumber"] = spec.specNumber;
    j["title"] = spec.title;
    j["version"] = spec.version;
    j["source"] = spec.source;
    j["sourceKind"] = spec.sourceKind;
    ordered_json submodels = ordered_json::array();
    for (const auto& def : spec.submodelDefs) submodels.push_back(def_to_json(def));
    j["submodels"] = std::move(submodels);
    ordered_json types = ordered_json::array();
    for (const auto& def : spec.typeDefs) types.push_back(def_to_json(def));
    j["types"] = std::move(types);
    ordered_json findings = ordered_json::array();
    for (const auto& f : spec.findings) findings.push_back(finding_to_json(f));
    j["findings"] = std::move(findings);
    if (!spec.enums.empty()) {
        ordered_json enums = ordered_json::array();
        for (const auto& en : spec.enums) {
            ordered_json je;
            je["name"] = en.name;
            je["open"] = en.open;
            je["valueKind"] = std::string(value_kind_name(en.valueType.kind));
            je["valueRaw"] = en.valueType.raw;
            ordered_json literals = ordered_json::array();
            for (const auto& lit : en.literals) {
                ordered_json jl;
                jl["name"] = lit.name;
                jl["value"] = lit.value;
                if (lit.semanticId) jl["semanticId"] = semantic_to_json(*lit.semanticId);
                literals.push_back(std::move(jl));
            }
            je["literals"] = std::move(literals);
            enums.push_back(std::move(je));
        }
        j["enums"] = std::move(enums);
    }
    if (!spec.imports.empty()) {
        ordered_json imports = ordered_json::array();
        for (const auto& imp : spec.imports) {
            ordered_json ji;
            ji["specNumber"] = imp.specNumber;
            ji["version"] = render_version(imp.version);
            imports.push_back(std::move(ji));
        }
        j["imports"] = std::move(imports);
    }
    return j.dump(2) + "\n";
}

ExtractedSpec extracted_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
        ExtractedSpec spec;
        spec.specNumber = j.at("specNumber").get<std::string>();
        spec.title = j.at("title").get<std::string>();
        spec.version = j.at("version").get<std::string>();
        spec.source = j.at("source").get<std::string>();
        spec.sourceKind = j.at("sourceKind").get<std::string>();
        for (const auto& jd : j.at("submodels")) spec.submodelDefs.push_back(def_from_json(jd));
        for (const auto& jd : j.at("types")) spec.typeDefs.push_back(def_from_json(jd));
        for (const auto& jf : j.at("findings")) spec.findings.push_back(finding_from_json(jf));
        if (j.contains("enums")) {
            for (const auto& je : j["enums"]) {
                EnumType en;
                en.name = je.at("name").get<std::string>();
                en.open = je.at("open").get<bool>();
                if (auto kind = value_kind_from_name(je.at("valueKind").get<std::string>())) {
                    en.valueType.kind = *kind;
                }
                en.valueType.raw = je.at("valueRaw").get<std::string>();
                for (const auto& jl : je.at("literals")) {
                    EnumLiteral lit;
                    lit.name = jl.at("name").get<std::string>();
                    lit.value = jl.at("value").get<std::string>();
                    if (jl.contains("semanticId")) lit.semanticId = semantic_from_json(jl["semanticId"]);
                    en.literals.push_back(std::move(lit));
                }
                spec.enums.push_back(std::move(en));
            }
        }
        if (j.contains("imports")) {
            for (const auto& ji : j["imports"]) {
                Import imp;
                imp.specNumber = ji.at("specNumber").get<std::string>();
                const std::string v = ji.at("version").get<std::string>();
                const auto dot = v.find('.');
                imp.version.major = std::stoi(v.substr(0, dot));
                imp.version.minor = dot == std::string::npos ? 0 : std::stoi(v.substr(dot + 1));
                spec.imports.push_back(std::move(imp));
            }
        }
        return spec;
    } catch (const ordered_json::exception& e) {
        throw Error(ErrorCode::SyntaxError, std::string("extracted spec sidecar: ") + e.what());
    }
}

} // namespace smtkit
