#include "smtkit/transform.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>

#include "smtkit/error.hpp"
#include "smtkit/grid.hpp"

namespace smtkit::transform {

namespace {

std::string lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    lines.push_back(current);
    return lines;
}

template <typename Fn> void for_each_def(ExtractedSpec& spec, Fn&& fn) {
    for (auto& def : spec.submodelDefs) fn(def);
    for (auto& def : spec.typeDefs) fn(def);
}

} // namespace

// ---------------------------------------------------------------------------
// "or" reuse expansion

namespace {

std::vector<std::string> split_on_or(const std::string& nameLine) {
    std::vector<std::string> names;
    const std::string sep = " or ";
    size_t start = 0;
    for (;;) {
        const size_t at = nameLine.find(sep, start);
        if (at == std::string::npos) {
            names.push_back(trim(nameLine.substr(start)));
            break;
        }
        names.push_back(trim(nameLine.substr(start, at - start)));
        start = at + sep.size();
    }
    names.erase(std::remove_if(names.begin(), names.end(),
                               [](const std::string& n) { return n.empty(); }),
                names.end());
    return names;
}

} // namespace

ExtractedSpec split_or_idshorts(const ExtractedSpec& spec) {
    ExtractedSpec out = spec;
    for_each_def(out, [&](RawDefinition& def) {
        std::vector<RawFieldRow> rows;
        for (const auto& row : def.rows) {
            const std::string nameLine = split_lines(row.idShortCell)[0];
            const auto names = split_on_or(nameLine);
            if (names.size() < 2) {
                rows.push_back(row);
                continue;
            }
            const auto scan = grid::scan_semantic_tokens(row.semanticCell);
            const bool positional = scan.tokens.size() == names.size();
            // with several identifiers in the cell the original single-token
            // parse left the others inside the description; recompute it
            std::string description = row.description;
            std::vector<std::string> notes = row.notes;
            if (scan.tokens.size() > 1) {
                const auto residueParse = grid::parse_semantic_cell(scan.residue);
                description = residueParse.description;
                notes = residueParse.notes;
            }
            for (size_t i = 0; i < names.size(); ++i) {
                RawFieldRow clone = row;
                clone.idShortCell = names[i];
                const auto idParse = grid::parse_id_short_cell(names[i]);
                clone.idShort = idParse.idShort;
                clone.description = description;
                clone.notes = notes;
                if (positional) {
                    clone.semanticId = classify_semantic_id(scan.tokens[i]);
                } else if (!scan.tokens.empty()) {
                    clone.semanticId = classify_semantic_id(scan.tokens[0]);
                }
                rows.push_back(std::move(clone));
            }
        }
        def.rows = std::move(rows);
    });
    return out;
}

// ---------------------------------------------------------------------------
// fragment merging

ExtractedSpec merge_fragments(const ExtractedSpec& spec, std::vector<Finding>& findings) {
    ExtractedSpec out = spec;

    std::vector<RawDefinition> fragments;
    auto strip_fragments = [&](std::vector<RawDefinition>& defs) {
        std::vector<RawDefinition> kept;
        for (auto& def : defs) {
            if (def.fragmentTargets.empty()) {
                kept.push_back(std::move(def));
            } else {
                fragments.push_back(std::move(def));
            }
        }
        defs = std::move(kept);
    };
    strip_fragments(out.submodelDefs);
    strip_fragments(out.typeDefs);

    for (const auto& fragment : fragments) {
        for (const auto& targetName : fragment.fragmentTargets) {
            RawDefinition* target = nullptr;
            for_each_def(out, [&](RawDefinition& def) {
                if (!target && def.name == targetName) target = &def;
            });
            if (!target) {
                findings.push_back(make_finding(FindingCode::UnknownFragmentTarget, out.source,
                                                fragment.name,
                                                "fragment '" + fragment.name +
                                                    "' targets unknown type '" + targetName + "'"));
                continue;
            }
            for (const auto& row : fragment.rows) {
                const bool collides =
                    std::any_of(target->rows.begin(), target->rows.end(),
                                [&](const RawFieldRow& existing) {
                                    return existing.idShort.base == row.idShort.base;
                                });
                if (collides) {
                    findings.push_back(make_finding(
                        FindingCode::FragmentCollision, out.source,
                        targetName + "." + row.idShort.base,
                        "fragment '" + fragment.name + "' redefines '" + row.idShort.base +
                            "' in '" + targetName + "'; first definition wins"));
                    continue;
                }
                target->rows.push_back(row);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// note interpretation

NoteEffect classify_note(const std::string& note) {
    const std::string l = lower(note);
    if (l.find("idshort") != std::string::npos &&
        (l.find("can be chosen") != std::string::npos || l.find("arbitrar") != std::string::npos)) {
        return NoteEffect::AllowsUserIdShort;
    }
    if (l.find("semanticid") != std::string::npos &&
        (l.find("alternativ") != std::string::npos || l.find("allowed") != std::string::npos ||
         l.find("admissib") != std::string::npos)) {
        return NoteEffect::AlternativeSemanticIds;
    }
    static const std::regex intro(R"((one of|allowed values|either)\s*:?)",
                                  std::regex::icase);
    if (std::regex_search(l, intro)) return NoteEffect::Enumeration;
    static const std::regex tokenMeaning(R"(^\S+\s+:\s+.+$)");
    if (std::regex_match(trim(note), tokenMeaning)) return NoteEffect::Enumeration;
    if (l.find("other values") != std::string::npos || l.find("extensib") != std::string::npos) {
        return NoteEffect::Enumeration;
    }
    return NoteEffect::None;
}

ExtractedSpec interpret_notes(const ExtractedSpec& spec) {
    ExtractedSpec out = spec;
    for_each_def(out, [&](RawDefinition& def) {
        for (const auto& note : def.notes) {
            if (classify_note(note) == NoteEffect::AllowsUserIdShort) {
                def.allowsUserIdShort = true;
                def.advisoryFlags = true;
            }
        }
        for (auto& row : def.rows) {
            for (const auto& note : row.notes) {
                switch (classify_note(note)) {
                case NoteEffect::AllowsUserIdShort:
                    row.allowsUserIdShort = true;
                    row.advisoryFlags = true;
                    break;
                case NoteEffect::AlternativeSemanticIds: {
                    const auto scan = grid::scan_semantic_tokens(note);
                    for (const auto& token : scan.tokens) {
                        const SemanticId id = classify_semantic_id(token);
                        if (row.semanticId && *row.semanticId == id) continue;
                        if (std::find(row.alternativeSemanticIds.begin(),
                                      row.alternativeSemanticIds.end(),
                                      id) == row.alternativeSemanticIds.end()) {
                            row.alternativeSemanticIds.push_back(id);
                            row.advisoryFlags = true;
                        }
                    }
                    break;
                }
                default:
                    break;
                }
            }
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// enumeration extraction

namespace {

std::string literal_name_for(const std::string& value, const std::set<std::string>& taken) {
    std::string name;
    for (char c : value) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        } else {
            name += '_';
        }
    }
    while (!name.empty() && name.front() == '_') name.erase(name.begin());
    if (name.empty() || std::isdigit(static_cast<unsigned char>(name.front()))) {
        name = "V" + name;
    }
    std::string candidate = name;
    int suffix = 2;
    while (taken.count(candidate)) candidate = name + "_" + std::to_string(suffix++);
    return candidate;
}

std::string strip_quotes(const std::string& s) {
    std::string t = trim(s);
    if (t.size() >= 2 && ((t.front() == '"' && t.back() == '"') ||
                          (t.front() == '\'' && t.back() == '\''))) {
        return trim(t.substr(1, t.size() - 2));
    }
    return t;
}

const std::regex kEnumIntro(R"((one of|allowed values|either)\s*:?\s*(.*))", std::regex::icase);
const std::regex kTokenMeaning(R"(^(\S+)\s+:\s+(.+)$)");
const std::regex kOpenPhrase(R"(other values|extensib)", std::regex::icase);

struct EnumCandidate {
    std::vector<EnumLiteral> literals;
    bool open = false;
};

std::optional<EnumCandidate> detect_enum(const RawFieldRow& row) {
    EnumCandidate candidate;
    std::vector<std::string> lines;
    for (const auto& note : row.notes) {
        for (const auto& l : split_lines(note)) lines.push_back(l);
    }
    for (const auto& l : split_lines(row.description)) lines.push_back(l);

    std::set<std::string> names;
    std::set<std::string> seenValues;
    auto add_literal = [&](const std::string& token, const std::string& meaning) {
        EnumLiteral lit;
        const SemanticId id = classify_semantic_id(token);
        if (id.scheme != SemanticScheme::Local) {
            lit.semanticId = id;
            lit.value = strip_quotes(meaning);
        } else {
            lit.value = strip_quotes(token);
        }
        if (lit.value.empty() || !seenValues.insert(lit.value).second) return;
        lit.name = literal_name_for(lit.value, names);
        names.insert(lit.name);
        candidate.literals.push_back(std::move(lit));
    };

    for (const auto& rawLine : lines) {
        const std::string line = trim(rawLine);
        if (line.empty()) continue;
        if (std::regex_search(line, kOpenPhrase)) candidate.open = true;

        std::smatch m;
        if (std::regex_search(line, m, kEnumIntro) && !trim(m[2]).empty()) {
            // value list up to a ';' clause, split on ',' and ' or '
            std::string valuesPart = trim(m[2]);
            const auto semi = valuesPart.find(';');
            if (semi != std::string::npos) valuesPart = valuesPart.substr(0, semi);
            std::string normalized;
            size_t i = 0; // replace " or " separators with commas
            while (i < valuesPart.size()) {
                if (valuesPart.compare(i, 4, " or ") == 0) {
                    normalized += ',';
                    i += 4;
                } else {
                    normalized += valuesPart[i++];
                }
            }
            std::string piece;
            for (char c : normalized + ",") {
                if (c == ',') {
                    const std::string value = strip_quotes(piece);
                    if (!value.empty()) add_literal(value, value);
                    piece.clear();
                } else {
                    piece += c;
                }
            }
            continue;
        }
        if (std::regex_match(line, m, kTokenMeaning)) {
            add_literal(trim(m[1]), trim(m[2]));
        }
    }

    if (candidate.literals.size() < 2) return std::nullopt;
    return candidate;
}

} // namespace

ExtractedSpec extract_enums(const ExtractedSpec& spec) {
    ExtractedSpec out = spec;
    std::set<std::string> enumNames;
    for (const auto& en : out.enums) enumNames.insert(en.name);

    for_each_def(out, [&](RawDefinition& def) {
        for (auto& row : def.rows) {
            if (row.kind != ElementKind::Property || row.typeRef) continue;
            const auto candidate = detect_enum(row);
            if (!candidate) continue;

            std::string name = row.idShort.base + "Values";
            int suffix = 2;
            while (enumNames.count(name)) {
                name = row.idShort.base + "Values_" + std::to_string(suffix++);
            }
            enumNames.insert(name);

            EnumType en;
            en.name = name;
            en.literals = candidate->literals;
            en.open = candidate->open;
            en.valueType = row.rawValueType
                               ? grid::normalize_type(*row.rawValueType, row.kind).type
                               : CanonicalValueType{ValueKind::String, "String"};
            out.enums.push_back(std::move(en));
            row.typeRef = name;
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// semanticId resolution against the registry

ExtractedSpec resolve_semantic_ids(const ExtractedSpec& spec, const SemanticRegistry& registry,
                                   std::vector<Finding>& findings) {
    ExtractedSpec out = spec;
    auto add_import = [&](const std::string& specNumber, const Version& version) {
        for (const auto& imp : out.imports) {
            if (imp.specNumber == specNumber) return;
        }
        out.imports.push_back(Import{specNumber, version});
    };

    for_each_def(out, [&](RawDefinition& def) {
        for (auto& row : def.rows) {
            if (!row.semanticId) continue;
            const RegistryEntry* entry = registry.lookup(*row.semanticId);
            if (!entry || entry->specNumber == out.specNumber) continue;
            if (entry->isType && is_container_kind(row.kind)) {
                row.typeRef = entry->specNumber + ":" + entry->ownerName;
                add_import(entry->specNumber, entry->version);
            } else if (row.kind == ElementKind::Property && !row.rawValueType && !row.typeRef &&
                       entry->valueType) {
                row.rawValueType = std::string(value_kind_name(entry->valueType->kind));
                findings.push_back(make_finding(
                    FindingCode::TypeFromSemanticId, out.source, row.location,
                    "value type " + std::string(value_kind_name(entry->valueType->kind)) +
                        " filled in from " + entry->specNumber + " via semanticId"));
            }
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// name uniquification

ExtractedSpec uniquify_names(const ExtractedSpec& spec, std::vector<RenameEntry>& renames) {
    ExtractedSpec out = spec;

    // resolve container references to definition indices before renaming;
    // among same-named definitions prefer the declared child, then the next
    // definition in document order
    std::vector<RawDefinition*> defs;
    for (auto& def : out.submodelDefs) defs.push_back(&def);
    for (auto& def : out.typeDefs) defs.push_back(&def);

    struct RowRef {
        RawFieldRow* row;
        size_t defIndex; // target definition
    };
    std::vector<RowRef> links;
    std::set<std::string> enumNames;
    for (const auto& en : out.enums) enumNames.insert(en.name);

    for (size_t d = 0; d < defs.size(); ++d) {
        for (auto& row : defs[d]->rows) {
            if (!row.typeRef || row.typeRef->find(':') != std::string::npos) continue;
            if (enumNames.count(*row.typeRef)) continue;
            std::vector<size_t> candidates;
            for (size_t t = 0; t < defs.size(); ++t) {
                if (defs[t]->name == *row.typeRef) candidates.push_back(t);
            }
            if (candidates.empty()) continue;
            std::optional<size_t> target;
            for (size_t t : candidates) {
                if (defs[t]->parent && *defs[t]->parent == defs[d]->name) {
                    target = t;
                    break;
                }
            }
            if (!target) {
                for (size_t t : candidates) {
                    if (t > d) {
                        target = t;
                        break;
                    }
                }
            }
            if (!target) target = candidates.front();
            links.push_back(RowRef{&row, *target});
        }
    }

    std::set<std::string> taken(enumNames.begin(), enumNames.end());
    auto claim = [&](std::string& name, const std::string& path) {
        if (taken.insert(name).second) return;
        int suffix = 2;
        std::string candidate;
        do {
            candidate = name + "_" + std::to_string(suffix++);
        } while (!taken.insert(candidate).second);
        renames.push_back(RenameEntry{path, name, candidate});
        name = candidate;
    };

    for (auto* def : defs) claim(def->name, def->location.empty() ? def->name : def->location);
    for (auto& en : out.enums) {
        // enum names were claimed up front; nothing to do unless a def took
        // the name first, which claim() above prevents by construction
        (void)en;
    }
    for (const auto& link : links) link.row->typeRef = defs[link.defIndex]->name;

    for (auto* def : defs) {
        std::set<std::string> bases;
        for (auto& row : def->rows) {
            std::string base = row.idShort.base;
            if (bases.insert(base).second) continue;
            int suffix = 2;
            std::string candidate;
            do {
                candidate = base + "_" + std::to_string(suffix++);
            } while (!bases.insert(candidate).second);
            renames.push_back(
                RenameEntry{def->name + "." + base, base, candidate});
            row.idShort.base = candidate;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// model assembly

namespace {

std::optional<Version> parse_spec_version(std::string text) {
    text = trim(text);
    if (!text.empty() && (text[0] == 'v' || text[0] == 'V')) text = text.substr(1);
    std::replace(text.begin(), text.end(), '-', '.');
    static const std::regex pattern(R"(^(\d+)(?:\.(\d+))?$)");
    std::smatch m;
    if (!std::regex_match(text, m, pattern)) return std::nullopt;
    Version v;
    v.major = std::stoi(m[1]);
    v.minor = m[2].matched ? std::stoi(m[2]) : 0;
    return v;
}

AasField row_to_field(const RawFieldRow& row, const ExtractedSpec& spec,
                      std::vector<Finding>& findings) {
    AasField field;
    field.idShort = row.idShort;
    field.kind = row.kind;
    field.semanticId = row.semanticId;
    field.alternativeSemanticIds = row.alternativeSemanticIds;
    field.cardinality = row.cardinality.value_or(Cardinality{0, {}});
    field.description = row.description;
    field.notes = row.notes;
    field.examples = row.examples;
    field.allowsUserIdShort = row.allowsUserIdShort;
    field.advisoryFlags = row.advisoryFlags;

    if (is_container_kind(field.kind)) {
        field.typeRef = row.typeRef ? *row.typeRef : row.idShort.base;
        return field;
    }
    if (row.typeRef) {
        field.typeRef = *row.typeRef;
        return field;
    }
    if (field.kind == ElementKind::MultiLanguageProperty) {
        field.valueType =
            CanonicalValueType{ValueKind::LangString, row.rawValueType.value_or("LangString")};
        return field;
    }
    if (row.rawValueType) {
        const auto norm = grid::normalize_type(*row.rawValueType, row.kind);
        field.valueType = norm.type;
        if (norm.fallback) {
            findings.push_back(make_finding(FindingCode::TypeFallback, spec.source, row.location,
                                            "unknown value type spelling '" + *row.rawValueType +
                                                "' mapped to String"));
        }
        return field;
    }
    if (field.kind == ElementKind::Property) {
        field.valueType = CanonicalValueType{ValueKind::String, "String"};
        findings.push_back(make_finding(FindingCode::MissingValueType, spec.source, row.location,
                                        "property '" + row.idShort.base +
                                            "' has no value type; String assumed"));
    }
    return field;
}

} // namespace

TransformResult build_model(const ExtractedSpec& input, const SemanticRegistry& registry) {
    TransformResult result;
    result.findings = input.findings;

    ExtractedSpec spec = split_or_idshorts(input);
    spec = merge_fragments(spec, result.findings);
    spec = interpret_notes(spec);
    spec = extract_enums(spec);
    spec = resolve_semantic_ids(spec, registry, result.findings);
    spec = uniquify_names(spec, result.renames);

    Model& model = result.model;
    model.specNumber = spec.specNumber;
    model.title = spec.title;
    model.enums = spec.enums;
    model.imports = spec.imports;
    if (auto version = parse_spec_version(spec.version)) {
        model.version = *version;
    } else {
        model.version = Version{1, 0};
        result.findings.push_back(make_finding(
            FindingCode::MissingSpecVersion, spec.source, "document",
            spec.version.empty() ? "source states no specification version; 1.0 assumed"
                                 : "unparseable version '" + spec.version + "'; 1.0 assumed"));
    }

    auto build_record = [&](const RawDefinition& def) {
        RecordType record;
        record.name = def.name;
        record.kind = def.kind;
        record.semanticId = def.semanticId;
        record.description = def.description;
        record.allowsUserIdShort = def.allowsUserIdShort;
        for (const auto& row : def.rows) {
            record.fields.push_back(row_to_field(row, spec, result.findings));
        }
        return record;
    };
    for (const auto& def : spec.submodelDefs) model.submodels.push_back(build_record(def));
    for (const auto& def : spec.typeDefs) model.types.push_back(build_record(def));

    // dangling local container references become empty placeholder types
    std::set<std::string> known;
    for (const auto& sm : model.submodels) known.insert(sm.name);
    for (const auto& ty : model.types) known.insert(ty.name);
    for (const auto& en : model.enums) known.insert(en.name);
    auto patch_refs = [&](RecordType& record) {
        for (const auto& field : record.fields) {
            if (!field.typeRef || field.typeRef->find(':') != std::string::npos) continue;
            if (known.count(*field.typeRef)) continue;
            RecordType placeholder;
            placeholder.name = *field.typeRef;
            placeholder.kind = ElementKind::SubmodelElementCollection;
            model.types.push_back(placeholder);
            known.insert(placeholder.name);
            result.findings.push_back(make_finding(
                FindingCode::UnresolvedReference, spec.source,
                record.name + "." + field.idShort.base,
                "no definition found for referenced type '" + *field.typeRef +
                    "'; empty placeholder type created"));
        }
    };
    for (auto& sm : model.submodels) patch_refs(sm);
    for (size_t i = 0; i < model.types.size(); ++i) {
        RecordType copy = model.types[i]; // patch_refs may grow model.types
        patch_refs(copy);
        model.types[i] = std::move(copy);
    }

    const ValidationReport report = validate_model(model);
    if (!report.empty()) {
        std::string detail;
        for (const auto& v : report) {
            if (!detail.empty()) detail += "; ";
            detail += v.code + " at " + v.path;
        }
        throw Error(ErrorCode::TransformFailed, detail);
    }
    return result;
}

} // namespace smtkit::transform
