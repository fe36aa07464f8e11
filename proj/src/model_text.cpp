#include <charconv>
#include <sstream>
#include <string>
#include <vector>

#include "smtkit/error.hpp"
#include "smtkit/model.hpp"

// Text form of the intermediary model (.smtm): line oriented, UTF-8, LF.
// Block keywords `model`, `import`, `enum`, `record`, `submodel`, `field`;
// attribute lines inside blocks; `end` closes a block. Serialization is a
// pure function of the model value, so equal models give identical bytes.

namespace smtkit {

namespace {

std::string quote(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string scheme_name(SemanticScheme scheme) {
    switch (scheme) {
    case SemanticScheme::Iri: return "iri";
    case SemanticScheme::Irdi: return "irdi";
    case SemanticScheme::Local: return "local";
    }
    return "local";
}

std::string semantic_clause(const char* keyword, const SemanticId& id) {
    std::string out = std::string(keyword) + " " + scheme_name(id.scheme) + " " + id.value;
    if (id.version) out += " version " + quote(*id.version);
    return out;
}

std::string type_clause(const CanonicalValueType& type) {
    std::string out = "type " + std::string(value_kind_name(type.kind));
    if (type.raw != value_kind_name(type.kind)) out += " raw " + quote(type.raw);
    return out;
}

void write_field(std::ostringstream& out, const AasField& field) {
    out << "  field " << quote(field.idShort.base) << " kind "
        << element_kind_name(field.kind) << "\n";
    if (field.idShort.placeholder != Placeholder::None) {
        out << "    placeholder " << placeholder_name(field.idShort.placeholder);
        if (field.idShort.placeholderText) out << " " << quote(*field.idShort.placeholderText);
        out << "\n";
    }
    if (field.idShort.displayName) out << "    displayName " << quote(*field.idShort.displayName) << "\n";
    if (field.valueType) out << "    " << type_clause(*field.valueType) << "\n";
    if (field.typeRef) out << "    ref " << *field.typeRef << "\n";
    if (field.semanticId) out << "    " << semantic_clause("semanticId", *field.semanticId) << "\n";
    for (const auto& alt : field.alternativeSemanticIds) {
        out << "    " << semantic_clause("altSemanticId", alt) << "\n";
    }
    out << "    cardinality " << render_cardinality(field.cardinality) << "\n";
    if (!field.description.empty()) out << "    description " << quote(field.description) << "\n";
    for (const auto& note : field.notes) out << "    note " << quote(note) << "\n";
    for (const auto& ex : field.examples) {
        out << "    example " << quote(ex.text);
        if (ex.language) out << " lang " << *ex.language;
        if (ex.unit) out << " unit " << quote(*ex.unit);
        out << "\n";
    }
    if (field.allowsUserIdShort) out << "    allowsUserIdShort\n";
    if (field.ordered) out << "    ordered\n";
    if (field.advisoryFlags) out << "    advisory\n";
    out << "  end\n";
}

void write_record(std::ostringstream& out, const RecordType& record, bool isSubmodel) {
    out << "\n" << (isSubmodel ? "submodel " : "record ") << record.name;
    if (!isSubmodel) out << " kind " << element_kind_name(record.kind);
    out << "\n";
    if (record.semanticId) out << "  " << semantic_clause("semanticId", *record.semanticId) << "\n";
    if (!record.description.empty()) out << "  description " << quote(record.description) << "\n";
    if (record.allowsUserIdShort) out << "  allowsUserIdShort\n";
    for (const auto& field : record.fields) write_field(out, field);
    out << "end\n";
}

} // namespace

std::string serialize_model(const Model& model) {
    ValidationReport report = validate_model(model);
    if (!report.empty()) {
        std::string detail = report.front().code + " at " + report.front().path;
        if (report.size() > 1) detail += " (+" + std::to_string(report.size() - 1) + " more)";
        throw Error(ErrorCode::InvalidModel, "cannot serialize invalid model: " + detail);
    }

    std::ostringstream out;
    out << "model " << model.specNumber << " version " << render_version(*model.version) << "\n";
    if (!model.title.empty()) out << "title " << quote(model.title) << "\n";
    for (const auto& imp : model.imports) {
        out << "import " << imp.specNumber << " version " << render_version(imp.version) << "\n";
    }
    for (const auto& en : model.enums) {
        out << "\nenum " << en.name << " " << type_clause(en.valueType);
        if (en.open) out << " open";
        out << "\n";
        for (const auto& lit : en.literals) {
            out << "  literal " << lit.name << " value " << quote(lit.value);
            if (lit.semanticId) out << " " << semantic_clause("semanticId", *lit.semanticId);
            out << "\n";
        }
        out << "end\n";
    }
    for (const auto& ty : model.types) write_record(out, ty, false);
    for (const auto& sm : model.submodels) write_record(out, sm, true);
    return out.str();
}

namespace {

struct Token {
    std::string text;
    bool quoted = false;
    size_t column = 0;
};

class LineCursor {
public:
    explicit LineCursor(const std::string& text) {
        std::string current;
        for (char c : text) {
            if (c == '\n') {
                lines_.push_back(current);
                current.clear();
            } else {
                current += c;
            }
        }
        if (!current.empty()) lines_.push_back(current);
    }

    [[noreturn]] void fail(const std::string& message, size_t column = 1) const {
        throw Error(ErrorCode::SyntaxError, "line " + std::to_string(index_ + 1) + ", column " +
                                                std::to_string(column) + ": " + message);
    }

    // Tokenizes the next non-blank, non-comment line; returns false at EOF.
    bool next(std::vector<Token>& tokens) {
        while (index_ + 1 < lines_.size() || (!consumed_ && index_ < lines_.size())) {
            if (consumed_) ++index_;
            consumed_ = true;
            const std::string& line = lines_[index_];
            tokens.clear();
            tokenize(line, tokens);
            if (!tokens.empty()) return true;
        }
        return false;
    }

private:
    void tokenize(const std::string& line, std::vector<Token>& tokens) const {
        size_t i = 0;
        while (i < line.size()) {
            if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
                ++i;
                continue;
            }
            if (line[i] == '#') return; // comment to end of line
            Token tok;
            tok.column = i + 1;
            if (line[i] == '"') {
                tok.quoted = true;
                ++i;
                bool closed = false;
                while (i < line.size()) {
                    char c = line[i];
                    if (c == '\\') {
                        if (i + 1 >= line.size()) fail("dangling escape", i + 1);
                        char esc = line[i + 1];
                        switch (esc) {
                        case 'n': tok.text += '\n'; break;
                        case 't': tok.text += '\t'; break;
                        case 'r': tok.text += '\r'; break;
                        case '"': tok.text += '"'; break;
                        case '\\': tok.text += '\\'; break;
                        default: fail(std::string("unknown escape \\") + esc, i + 1);
                        }
                        i += 2;
                    } else if (c == '"') {
                        ++i;
                        closed = true;
                        break;
                    } else {
                        tok.text += c;
                        ++i;
                    }
                }
                if (!closed) fail("unterminated string", tok.column);
            } else {
                while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
                    tok.text += line[i];
                    ++i;
                }
            }
            tokens.push_back(std::move(tok));
        }
    }

    std::vector<std::string> lines_;
    size_t index_ = 0;
    bool consumed_ = false;
};

class ModelParser {
public:
    explicit ModelParser(const std::string& text) : cursor_(text) {}

    Model parse() {
        Model model;
        std::vector<Token> tokens;
        if (!cursor_.next(tokens) || tokens[0].text != "model") {
            cursor_.fail("expected 'model' header line");
        }
        parse_model_line(tokens, model);

        bool sawBlock = false;
        while (cursor_.next(tokens)) {
            const std::string& kw = tokens[0].text;
            if (kw == "title" && !sawBlock) {
                model.title = expect_string(tokens, 1, "title");
            } else if (kw == "import" && !sawBlock) {
                Import imp;
                imp.specNumber = expect_token(tokens, 1, "import spec number");
                expect_keyword(tokens, 2, "version");
                imp.version = parse_version(expect_token(tokens, 3, "import version"), tokens[3].column);
                model.imports.push_back(std::move(imp));
            } else if (kw == "enum") {
                sawBlock = true;
                model.enums.push_back(parse_enum(tokens));
            } else if (kw == "record") {
                sawBlock = true;
                model.types.push_back(parse_record(tokens, false));
            } else if (kw == "submodel") {
                sawBlock = true;
                model.submodels.push_back(parse_record(tokens, true));
            } else {
                cursor_.fail("unknown keyword '" + kw + "'", tokens[0].column);
            }
        }
        return model;
    }

private:
    void parse_model_line(const std::vector<Token>& tokens, Model& model) {
        model.specNumber = expect_token(tokens, 1, "spec number");
        if (tokens.size() >= 4) {
            expect_keyword(tokens, 2, "version");
            model.version = parse_version(expect_token(tokens, 3, "version"), tokens[3].column);
        } else if (tokens.size() != 2) {
            cursor_.fail("malformed model header");
        }
    }

    EnumType parse_enum(std::vector<Token>& tokens) {
        EnumType en;
        en.name = expect_token(tokens, 1, "enum name");
        size_t i = 2;
        expect_keyword(tokens, i++, "type");
        en.valueType = parse_type_clause(tokens, i);
        if (i < tokens.size() && tokens[i].text == "open") {
            en.open = true;
            ++i;
        }
        if (i != tokens.size()) cursor_.fail("trailing tokens on enum line", tokens[i].column);

        while (cursor_.next(tokens)) {
            if (tokens[0].text == "end") return en;
            if (tokens[0].text != "literal") {
                cursor_.fail("expected 'literal' or 'end'", tokens[0].column);
            }
            EnumLiteral lit;
            lit.name = expect_token(tokens, 1, "literal name");
            expect_keyword(tokens, 2, "value");
            lit.value = expect_string(tokens, 3, "literal value");
            size_t j = 4;
            if (j < tokens.size() && tokens[j].text == "semanticId") {
                ++j;
                lit.semanticId = parse_semantic(tokens, j);
            }
            if (j != tokens.size()) cursor_.fail("trailing tokens on literal line", tokens[j].column);
            en.literals.push_back(std::move(lit));
        }
        cursor_.fail("unterminated enum block");
    }

    RecordType parse_record(std::vector<Token>& tokens, bool isSubmodel) {
        RecordType record;
        record.name = expect_token(tokens, 1, "record name");
        if (isSubmodel) {
            record.kind = ElementKind::Submodel;
            if (tokens.size() != 2) cursor_.fail("trailing tokens on submodel line");
        } else {
            expect_keyword(tokens, 2, "kind");
            record.kind = parse_kind(expect_token(tokens, 3, "record kind"), tokens[3].column);
            if (tokens.size() != 4) cursor_.fail("trailing tokens on record line");
        }

        while (cursor_.next(tokens)) {
            const std::string& kw = tokens[0].text;
            if (kw == "end") return record;
            if (kw == "semanticId") {
                size_t i = 1;
                record.semanticId = parse_semantic(tokens, i);
            } else if (kw == "description") {
                record.description = expect_string(tokens, 1, "description");
            } else if (kw == "allowsUserIdShort") {
                record.allowsUserIdShort = true;
            } else if (kw == "field") {
                record.fields.push_back(parse_field(tokens));
            } else {
                cursor_.fail("unknown record attribute '" + kw + "'", tokens[0].column);
            }
        }
        cursor_.fail("unterminated record block");
    }

    AasField parse_field(std::vector<Token>& tokens) {
        AasField field;
        field.idShort.base = expect_string(tokens, 1, "field base");
        expect_keyword(tokens, 2, "kind");
        field.kind = parse_kind(expect_token(tokens, 3, "field kind"), tokens[3].column);
        if (tokens.size() != 4) cursor_.fail("trailing tokens on field line");

        while (cursor_.next(tokens)) {
            const std::string& kw = tokens[0].text;
            if (kw == "end") return field;
            if (kw == "placeholder") {
                const std::string name = expect_token(tokens, 1, "placeholder kind");
                if (name == "counting") field.idShort.placeholder = Placeholder::Counting;
                else if (name == "arbitrary") field.idShort.placeholder = Placeholder::Arbitrary;
                else if (name == "variable") field.idShort.placeholder = Placeholder::Variable;
                else if (name == "freetext") field.idShort.placeholder = Placeholder::FreeText;
                else cursor_.fail("unknown placeholder '" + name + "'", tokens[1].column);
                if (tokens.size() > 2) field.idShort.placeholderText = expect_string(tokens, 2, "placeholder text");
            } else if (kw == "displayName") {
                field.idShort.displayName = expect_string(tokens, 1, "display name");
            } else if (kw == "type") {
                size_t i = 1;
                field.valueType = parse_type_clause(tokens, i);
                if (i != tokens.size()) cursor_.fail("trailing tokens on type line", tokens[i].column);
            } else if (kw == "ref") {
                field.typeRef = expect_token(tokens, 1, "type reference");
            } else if (kw == "semanticId") {
                size_t i = 1;
                field.semanticId = parse_semantic(tokens, i);
            } else if (kw == "altSemanticId") {
                size_t i = 1;
                field.alternativeSemanticIds.push_back(parse_semantic(tokens, i));
            } else if (kw == "cardinality") {
                field.cardinality = parse_cardinality_token(expect_token(tokens, 1, "cardinality"),
                                                           tokens[1].column);
            } else if (kw == "description") {
                field.description = expect_string(tokens, 1, "description");
            } else if (kw == "note") {
                field.notes.push_back(expect_string(tokens, 1, "note"));
            } else if (kw == "example") {
                ExampleValue ex;
                ex.text = expect_string(tokens, 1, "example text");
                size_t i = 2;
                while (i < tokens.size()) {
                    if (tokens[i].text == "lang") {
                        ex.language = expect_token(tokens, i + 1, "language code");
                        i += 2;
                    } else if (tokens[i].text == "unit") {
                        ex.unit = expect_string(tokens, i + 1, "unit");
                        i += 2;
                    } else {
                        cursor_.fail("unknown example attribute", tokens[i].column);
                    }
                }
                field.examples.push_back(std::move(ex));
            } else if (kw == "allowsUserIdShort") {
                field.allowsUserIdShort = true;
            } else if (kw == "ordered") {
                field.ordered = true;
            } else if (kw == "advisory") {
                field.advisoryFlags = true;
            } else {
                cursor_.fail("unknown field attribute '" + kw + "'", tokens[0].column);
            }
        }
        cursor_.fail("unterminated field block");
    }

    CanonicalValueType parse_type_clause(const std::vector<Token>& tokens, size_t& i) {
        CanonicalValueType type;
        const std::string name = expect_token(tokens, i, "value kind");
        auto kind = value_kind_from_name(name);
        if (!kind) cursor_.fail("unknown value kind '" + name + "'", tokens[i].column);
        type.kind = *kind;
        type.raw = name;
        ++i;
        if (i < tokens.size() && tokens[i].text == "raw") {
            type.raw = expect_string(tokens, i + 1, "raw spelling");
            i += 2;
        }
        return type;
    }

    SemanticId parse_semantic(const std::vector<Token>& tokens, size_t& i) {
        SemanticId id;
        const std::string scheme = expect_token(tokens, i, "semantic scheme");
        if (scheme == "iri") id.scheme = SemanticScheme::Iri;
        else if (scheme == "irdi") id.scheme = SemanticScheme::Irdi;
        else if (scheme == "local") id.scheme = SemanticScheme::Local;
        else cursor_.fail("unknown semantic scheme '" + scheme + "'", tokens[i].column);
        id.value = expect_token(tokens, i + 1, "semantic identifier");
        i += 2;
        if (i < tokens.size() && tokens[i].text == "version") {
            id.version = expect_string(tokens, i + 1, "semantic version");
            i += 2;
        }
        return id;
    }

    ElementKind parse_kind(const std::string& name, size_t column) {
        auto kind = element_kind_from_name(name);
        if (!kind) cursor_.fail("unknown element kind '" + name + "'", column);
        return *kind;
    }

    Version parse_version(const std::string& text, size_t column) {
        Version v;
        const auto dot = text.find('.');
        try {
            if (dot == std::string::npos) {
                v.major = std::stoi(text);
                v.minor = 0;
            } else {
                v.major = std::stoi(text.substr(0, dot));
                v.minor = std::stoi(text.substr(dot + 1));
            }
        } catch (const std::exception&) {
            cursor_.fail("malformed version '" + text + "'", column);
        }
        return v;
    }

    Cardinality parse_cardinality_token(const std::string& text, size_t column) {
        Cardinality card;
        const auto dots = text.find("..");
        try {
            if (dots == std::string::npos) cursor_.fail("malformed cardinality", column);
            card.min = std::stoi(text.substr(0, dots));
            const std::string maxPart = text.substr(dots + 2);
            if (maxPart != "*") card.max = std::stoi(maxPart);
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            cursor_.fail("malformed cardinality '" + text + "'", column);
        }
        return card;
    }

    const std::string& expect_token(const std::vector<Token>& tokens, size_t i, const char* what) {
        if (i >= tokens.size()) cursor_.fail(std::string("missing ") + what);
        return tokens[i].text;
    }

    const std::string& expect_string(const std::vector<Token>& tokens, size_t i, const char* what) {
        if (i >= tokens.size() || !tokens[i].quoted) {
            cursor_.fail(std::string("expected quoted ") + what);
        }
        return tokens[i].text;
    }

    void expect_keyword(const std::vector<Token>& tokens, size_t i, const char* keyword) {
        if (i >= tokens.size() || tokens[i].text != keyword) {
            cursor_.fail(std::string("expected '") + keyword + "'");
        }
    }

    LineCursor cursor_;
};

} // namespace

Model parse_model(const std::string& text) {
    ModelParser parser(text);
    Model model = parser.parse();
    ValidationReport report = validate_model(model);
    if (!report.empty()) {
        std::string detail = report.front().code + " at " + report.front().path;
        if (report.size() > 1) detail += " (+" + std::to_string(report.size() - 1) + " more)";
        throw Error(ErrorCode::InvalidModel, detail);
    }
    return model;
}

} // namespace smtkit
