#include "smtkit/grid.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "smtkit/error.hpp"

namespace smtkit::grid {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
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

bool contains_ci(const std::string& haystack, const std::string& needle) {
    return lower(haystack).find(lower(needle)) != std::string::npos;
}

} // namespace

// ---------------------------------------------------------------------------
// grid loading

namespace {

[[noreturn]] void malformed(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::MalformedGrid, where + ": " + what);
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known) {
            if (it.key() == k) {
                ok = true;
                break;
            }
        }
        if (!ok) malformed(where, "unknown key '" + it.key() + "'");
    }
}

} // namespace

TableGrid parse_grid_json(const std::string& text, const std::string& sourceName) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        malformed(sourceName, e.what());
    }
    if (!doc.is_object()) malformed(sourceName, "top level is not an object");
    reject_unknown_keys(doc, {"sheets"}, sourceName);
    if (!doc.contains("sheets") || !doc["sheets"].is_array()) {
        malformed(sourceName, "missing required key 'sheets'");
    }

    TableGrid grid;
    size_t si = 0;
    for (const auto& jsheet : doc["sheets"]) {
        const std::string where = sourceName + ": sheets[" + std::to_string(si) + "]";
        if (!jsheet.is_object()) malformed(where, "sheet is not an object");
        reject_unknown_keys(jsheet, {"name", "rows"}, where);
        if (!jsheet.contains("name") || !jsheet["name"].is_string()) {
            malformed(where, "missing required key 'name'");
        }
        if (!jsheet.contains("rows") || !jsheet["rows"].is_array()) {
            malformed(where, "missing required key 'rows'");
        }
        Sheet sheet;
        sheet.name = jsheet["name"].get<std::string>();
        size_t ri = 0;
        for (const auto& jrow : jsheet["rows"]) {
            const std::string rwhere = where + ".rows[" + std::to_string(ri) + "]";
            if (!jrow.is_array()) malformed(rwhere, "row is not an array");
            std::vector<Cell> row;
            size_t ci = 0;
            for (const auto& jcell : jrow) {
                const std::string cwhere = rwhere + "[" + std::to_string(ci) + "]";
                if (!jcell.is_object()) malformed(cwhere, "cell is not an object");
                reject_unknown_keys(jcell, {"text", "font_size"}, cwhere);
                if (!jcell.contains("text") || !jcell["text"].is_string()) {
                    malformed(cwhere, "missing required key 'text'");
                }
                Cell cell;
                cell.text = jcell["text"].get<std::string>();
                if (jcell.contains("font_size")) {
                    if (!jcell["font_size"].is_number()) malformed(cwhere, "font_size is not a number");
                    cell.fontSize = jcell["font_size"].get<double>();
                }
                row.push_back(std::move(cell));
                ++ci;
            }
            sheet.rows.push_back(std::move(row));
            ++ri;
        }
        grid.sheets.push_back(std::move(sheet));
        ++si;
    }
    return grid;
}

TableGrid load_grid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_grid_json(buffer.str(), path.filename().string());
}

// ---------------------------------------------------------------------------
// table detection

namespace {

bool is_footnote(const Cell& cell) {
    return cell.fontSize && *cell.fontSize < kFootnoteThresholdPt;
}

// Cell texts with footnote-sized cells blanked out.
std::vector<std::string> effective_cells(const std::vector<Cell>& row) {
    std::vector<std::string> out;
    out.reserve(row.size());
    for (const auto& cell : row) out.push_back(is_footnote(cell) ? std::string() : cell.text);
    while (!out.empty() && trim(out.back()).empty()) out.pop_back();
    return out;
}

size_t count_nonempty(const std::vector<std::string>& cells) {
    size_t n = 0;
    for (const auto& c : cells) {
        if (!trim(c).empty()) ++n;
    }
    return n;
}

bool row_is_blank(const std::vector<Cell>& row) {
    return std::all_of(row.begin(), row.end(),
                       [](const Cell& c) { return trim(c.text).empty(); });
}

// Entire row is footnote material: non-empty cells exist but all are small.
bool row_is_footnote(const std::vector<Cell>& row) {
    bool sawContent = false;
    for (const auto& cell : row) {
        if (trim(cell.text).empty()) continue;
        sawContent = true;
        if (!is_footnote(cell)) return false;
    }
    return sawContent;
}

bool has_cardinality_header(const std::vector<std::string>& cells) {
    for (const auto& c : cells) {
        const std::string t = lower(trim(c));
        if (t.rfind("card", 0) == 0 || t.find("cardinality") != std::string::npos ||
            t.find("multiplicity") != std::string::npos) {
            return true;
        }
    }
    return false;
}

bool has_idshort_header(const std::vector<std::string>& cells) {
    for (const auto& c : cells) {
        if (contains_ci(c, "idshort")) return true;
    }
    return false;
}

const std::vector<std::string>& twocol_start_keys() {
    static const std::vector<std::string> keys = {"idshort", "semanticid", "version",
                                                  "specnumber", "spec number", "spec", "title"};
    return keys;
}

std::string normalize_key(const std::string& cell) {
    std::string t = lower(trim(cell));
    while (!t.empty() && (t.back() == ':' || t.back() == '.')) t.pop_back();
    return trim(t);
}

bool is_twocol_start(const std::vector<std::string>& cells) {
    if (cells.empty() || count_nonempty(cells) > 2) return false;
    const std::string key = normalize_key(cells[0]);
    if (key.empty()) return false;
    const auto& keys = twocol_start_keys();
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

// A pure-keyword row continuing a four-column header, e.g.
// ["", "Description", "example", ""].
bool is_header_continuation(const std::vector<std::string>& cells) {
    if (cells.empty() || !trim(cells[0]).empty()) return false;
    static const std::vector<std::string> words = {"description", "example",    "card",
                                                   "cardinality", "semanticid", "idshort",
                                                   "value type",  "valuetype"};
    bool sawWord = false;
    for (size_t i = 1; i < cells.size(); ++i) {
        const std::string key = normalize_key(cells[i]);
        if (key.empty()) continue;
        if (std::find(words.begin(), words.end(), key) == words.end()) return false;
        sawWord = true;
    }
    return sawWord;
}

// Normalizes a raw row to exactly `width` logical cells: overflow joins the
// last cell, missing cells pad with "".
std::vector<std::string> logical_cells(const std::vector<std::string>& cells, size_t width) {
    std::vector<std::string> out(cells.begin(),
                                 cells.begin() + std::min(cells.size(), width));
    out.resize(width);
    for (size_t i = width; i < cells.size(); ++i) {
        if (trim(cells[i]).empty()) continue;
        if (!out[width - 1].empty()) out[width - 1] += "\n";
        out[width - 1] += cells[i];
    }
    return out;
}

} // namespace

std::vector<SpecTable> detect_tables(const TableGrid& grid, std::vector<Finding>* findings) {
    std::vector<SpecTable> tables;
    for (const auto& sheet : grid.sheets) {
        size_t i = 0;
        const size_t n = sheet.rows.size();
        while (i < n) {
            if (row_is_blank(sheet.rows[i]) || row_is_footnote(sheet.rows[i])) {
                ++i;
                continue;
            }
            const auto cells = effective_cells(sheet.rows[i]);

            // four-column region
            const bool headerHere = has_idshort_header(cells) &&
                                    (has_cardinality_header(cells) ||
                                     (i + 1 < n && has_cardinality_header(
                                                       effective_cells(sheet.rows[i + 1]))));
            if (headerHere) {
                SpecTable table;
                table.kind = TableKind::FourColumn;
                table.originSheet = sheet.name;
                table.originRowIndex = static_cast<int>(i);
                table.headerRows.push_back(logical_cells(cells, 4));
                ++i;
                if (i < n) {
                    const auto next = effective_cells(sheet.rows[i]);
                    if ((!has_cardinality_header(table.headerRows[0]) &&
                         has_cardinality_header(next)) ||
                        is_header_continuation(next)) {
                        table.headerRows.push_back(logical_cells(next, 4));
                        ++i;
                    }
                }
                while (i < n) {
                    if (row_is_blank(sheet.rows[i])) break;
                    if (row_is_footnote(sheet.rows[i])) {
                        ++i; // footnotes never terminate a region
                        continue;
                    }
                    const auto body = effective_cells(sheet.rows[i]);
                    if (body.empty()) {
                        ++i;
                        continue;
                    }
                    const bool nextHeader = has_idshort_header(body) &&
                                            (has_cardinality_header(body) ||
                                             (i + 1 < n && has_cardinality_header(effective_cells(
                                                               sheet.rows[i + 1]))));
                    if (nextHeader || is_twocol_start(body)) break;
                    table.bodyRows.push_back(logical_cells(body, 4));
                    ++i;
                }
                tables.push_back(std::move(table));
                continue;
            }

            // two-column region
            if (is_twocol_start(cells)) {
                SpecTable table;
                table.kind = TableKind::TwoColumn;
                table.originSheet = sheet.name;
                table.originRowIndex = static_cast<int>(i);
                table.headerRows.push_back(logical_cells(cells, 2));
                ++i;
                while (i < n) {
                    if (row_is_blank(sheet.rows[i])) break;
                    if (row_is_footnote(sheet.rows[i])) {
                        ++i;
                        continue;
                    }
                    const auto body = effective_cells(sheet.rows[i]);
                    if (body.empty()) {
                        ++i;
                        continue;
                    }
                    if (count_nonempty(body) > 2 || trim(body[0]).empty()) break;
                    if (has_idshort_header(body) &&
                        (has_cardinality_header(body) ||
                         (i + 1 < n &&
                          has_cardinality_header(effective_cells(sheet.rows[i + 1]))))) {
                        break;
                    }
                    table.bodyRows.push_back(logical_cells(body, 2));
                    ++i;
                }
                tables.push_back(std::move(table));
                continue;
            }

            if (findings) {
                findings->push_back(make_finding(
                    FindingCode::UnmatchedRegion, "", sheet.name + "!r" + std::to_string(i + 1),
                    "row matches no table layout: '" + trim(cells.empty() ? "" : cells[0]) + "'"));
            }
            ++i;
        }
    }
    return tables;
}

SpecTable rejoin_rows(const SpecTable& table) {
    if (table.kind != TableKind::FourColumn) return table;
    SpecTable out = table;
    out.bodyRows.clear();
    for (const auto& row : table.bodyRows) {
        const bool continuation = trim(row[0]).empty() && count_nonempty(row) > 0;
        if (!continuation) {
            out.bodyRows.push_back(row);
            continue;
        }
        if (out.bodyRows.empty()) {
            throw Error(ErrorCode::OrphanContinuation,
                        table.originSheet + "!r" + std::to_string(table.originRowIndex + 1) +
                            ": first body row is a continuation");
        }
        auto& prev = out.bodyRows.back();
        for (size_t c = 0; c < 4; ++c) {
            if (trim(row[c]).empty()) continue;
            if (!prev[c].empty()) prev[c] += "\n";
            prev[c] += row[c];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// cardinality

Cardinality parse_cardinality(const std::string& text) {
    std::string t = trim(text);
    if (!t.empty() && t.front() == '[' && t.back() == ']') {
        t = trim(t.substr(1, t.size() - 2));
    }
    if (t.empty()) {
        throw Error(ErrorCode::UnparseableCardinality, "'" + text + "'");
    }

    static const std::map<std::string, Cardinality> keywords = {
        {"one", {1, 1}},        {"zerotoone", {0, 1}},
        {"onetomany", {1, {}}}, {"zerotomany", {0, {}}},
    };
    std::string folded = lower(t);
    folded.erase(std::remove_if(folded.begin(), folded.end(),
                                [](unsigned char c) { return std::isspace(c); }),
                 folded.end());
    if (auto it = keywords.find(folded); it != keywords.end()) return it->second;

    if (folded == "*") return Cardinality{0, {}};

    static const std::regex range(R"(^(\d+)\.\.(\d+|\*|n)$)", std::regex::icase);
    std::smatch m;
    if (std::regex_match(folded, m, range)) {
        Cardinality card;
        card.min = std::stoi(m[1]);
        const std::string maxPart = lower(m[2]);
        if (maxPart != "*" && maxPart != "n") {
            card.max = std::stoi(maxPart);
            if (*card.max < card.min) {
                throw Error(ErrorCode::UnparseableCardinality,
                            "'" + text + "' (max below min)");
            }
        }
        return card;
    }

    static const std::regex bare(R"(^\d+$)");
    if (std::regex_match(folded, bare)) {
        const int v = std::stoi(folded);
        return Cardinality{v, v};
    }

    throw Error(ErrorCode::UnparseableCardinality, "'" + text + "'");
}

// ---------------------------------------------------------------------------
// idShort cell

IdShortParse parse_id_short_cell(const std::string& text) {
    if (trim(text).empty()) throw Error(ErrorCode::EmptyIdShort, "idShort cell is empty");

    IdShortParse out;
    auto lines = split_lines(text);
    std::string nameLine = trim(lines[0]);
    for (size_t i = 1; i < lines.size(); ++i) {
        std::string extra = trim(lines[i]);
        if (extra.empty()) continue;
        if (extra.size() >= 2 && extra.front() == '[' && extra.back() == ']') {
            extra = trim(extra.substr(1, extra.size() - 2));
        }
        if (!extra.empty()) out.inlineExamples.push_back(extra);
    }

    // trailing bracketed fragment on the name line is an example, not a name
    static const std::regex trailingBracket(R"(^(.*?)\s*\[([^\]]+)\]\s*$)");
    std::smatch m;
    if (std::regex_match(nameLine, m, trailingBracket) && nameLine.find('{') == std::string::npos) {
        nameLine = trim(m[1]);
        out.inlineExamples.insert(out.inlineExamples.begin(), trim(m[2]));
    }

    std::string base = nameLine;
    static const std::regex braced(R"(^(.*?)\{([^}]*)\}\s*(.*)$)");
    if (std::regex_match(nameLine, m, braced)) {
        base = trim(m[1]);
        const std::string inner = trim(m[2]);
        const std::string innerLower = lower(inner);
        if (std::all_of(inner.begin(), inner.end(),
                        [](unsigned char c) { return std::isdigit(c); }) &&
            !inner.empty()) {
            out.idShort.placeholder = Placeholder::Counting;
            out.idShort.placeholderText = inner;
        } else if (innerLower == "arbitrary") {
            out.idShort.placeholder = Placeholder::Arbitrary;
        } else if (innerLower == "variable") {
            out.idShort.placeholder = Placeholder::Variable;
        } else {
            out.idShort.placeholder = Placeholder::FreeText;
            out.idShort.placeholderText = inner;
        }
        std::string tail = trim(m[3]);
        if (tail.size() >= 2 && tail.front() == '[' && tail.back() == ']') {
            tail = trim(tail.substr(1, tail.size() - 2));
        }
        if (!tail.empty()) out.inlineExamples.push_back(tail);
    }

    if (is_legal_identifier(base)) {
        out.idShort.base = base;
    } else {
        out.idShort.base = sanitize_identifier(base);
        out.idShort.displayName = nameLine;
    }
    return out;
}

// ---------------------------------------------------------------------------
// semantic cell

namespace {

bool is_url_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) ||
           std::string("/:#._~%+=&?@!$'()*,;[]-").find(c) != std::string::npos;
}

bool is_separator_char(char c) {
    return std::string("/-_.#:=").find(c) != std::string::npos;
}

// Re-joins identifier runs that extraction broke across a line break at a
// non-space boundary. A break after a letter followed by an uppercase run is
// kept: that is where a description starts.
std::string heal_urls(const std::string& text, bool& healed) {
    std::string out;
    size_t i = 0;
    size_t tokenStart = std::string::npos; // start of an identifier token in progress
    auto token_in_progress = [&](size_t end) {
        if (tokenStart == std::string::npos) return false;
        const std::string token = out.substr(tokenStart, end - tokenStart);
        // an IRDI already carrying its #ddd version tail is complete; the
        // next line starts something new
        static const std::regex completeIrdi(R"(^\d{4}[-/].*#\d{3}$)");
        if (std::regex_match(token, completeIrdi)) return false;
        return token.rfind("http://", 0) == 0 || token.rfind("https://", 0) == 0 ||
               token.rfind("urn:", 0) == 0 ||
               (token.size() > 5 && std::isdigit(static_cast<unsigned char>(token[0])) &&
                token.find('#') != std::string::npos);
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            const bool before = !out.empty() && is_url_char(out.back());
            const bool after = i + 1 < text.size() && is_url_char(text[i + 1]);
            bool join = false;
            if (before && after && token_in_progress(out.size())) {
                const char prev = out.back();
                const char next = text[i + 1];
                const bool upperStart = std::isupper(static_cast<unsigned char>(next));
                join = is_separator_char(prev) ||
                       !(std::isalpha(static_cast<unsigned char>(prev)) && upperStart);
            }
            if (join) {
                healed = true;
                ++i; // drop the break, keep concatenating the token
                continue;
            }
            out += c;
            tokenStart = std::string::npos;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            tokenStart = std::string::npos;
        } else if (tokenStart == std::string::npos) {
            tokenStart = out.size();
        }
        out += c;
        ++i;
    }
    return out;
}

const std::regex kLeadingIri(R"(^(https?://\S+|urn:\S+))");
const std::regex kLeadingIrdi(R"(^(\d{4}[-/][0-9A-Za-z#/._-]*#[0-9A-Za-z#/._-]+))");

// "Note:", "Note 1:", "Constraint:" ... but not words like "Notebook".
std::optional<std::string> strip_note_marker(const std::string& line) {
    static const std::string markers[] = {"note", "constraint", "recommendation"};
    const std::string l = lower(line);
    for (const auto& marker : markers) {
        if (l.rfind(marker, 0) != 0) continue;
        size_t i = marker.size();
        if (i < line.size() && std::isalpha(static_cast<unsigned char>(line[i]))) continue;
        while (i < line.size() &&
               (std::isdigit(static_cast<unsigned char>(line[i])) || line[i] == ' ' ||
                line[i] == '\t')) {
            ++i;
        }
        if (i < line.size() && line[i] == ':') ++i;
        return trim(line.substr(i));
    }
    return std::nullopt;
}

} // namespace

SemanticParse parse_semantic_cell(const std::string& text) {
    SemanticParse out;
    bool healed = false;
    const std::string healedText = heal_urls(text, healed);
    out.healedUrl = healed;

    std::string descriptionAccu;
    for (auto& rawLine : split_lines(healedText)) {
        std::string line = trim(rawLine);
        if (line.empty()) continue;

        if (auto note = strip_note_marker(line)) {
            if (!note->empty()) out.notes.push_back(*note);
            continue;
        }

        if (!out.semanticId) {
            std::smatch idm;
            if (std::regex_search(line, idm, kLeadingIri) || std::regex_search(line, idm, kLeadingIrdi)) {
                out.semanticId = classify_semantic_id(idm[1].str());
                const std::string rest = trim(line.substr(static_cast<size_t>(idm.length(0))));
                if (!rest.empty()) {
                    out.unseparated = true;
                    line = rest;
                } else {
                    continue;
                }
            }
        }

        if (!descriptionAccu.empty()) descriptionAccu += "\n";
        descriptionAccu += line;
    }
    out.description = descriptionAccu;
    return out;
}

SemanticTokenScan scan_semantic_tokens(const std::string& text) {
    SemanticTokenScan out;
    bool healed = false;
    const std::string healedText = heal_urls(text, healed);
    for (auto& rawLine : split_lines(healedText)) {
        std::string line = trim(rawLine);
        for (;;) {
            std::smatch m;
            if (std::regex_search(line, m, kLeadingIri) ||
                std::regex_search(line, m, kLeadingIrdi)) {
                out.tokens.push_back(m[1].str());
                line = trim(line.substr(static_cast<size_t>(m.length(0))));
            } else {
                break;
            }
        }
        if (line.empty()) continue;
        if (!out.residue.empty()) out.residue += "\n";
        out.residue += line;
    }
    return out;
}

// ---------------------------------------------------------------------------
// value cell

namespace {

const std::regex kLangLeading(R"(^([A-Za-z]{2}),\s*(.*)$)");
const std::regex kLangPrefix(R"(^@([A-Za-z]{2}):\s*(.*)$)");
const std::regex kLangQuoted(R"re(^"(.*)"\s*@([A-Za-z]{2})$)re");
const std::regex kLangTrailing(R"(^(.*\S)\s*@([A-Za-z]{2})$)");

std::optional<ElementKind> element_kind_from_token(const std::string& token);

const std::regex kUnitTrailingBracket(R"(^(.*\S)\s*\[([^\]\[]+)\](\*?)$)");
const std::regex kUnitKeyword(R"(^(.*\S)\s+unit\s*:\s*(\S+)$)", std::regex::icase);
const std::regex kUnitLeadingBracket(R"(^\[([^\]\[]+)\]\s*(.+)$)");
const std::regex kUnitBare(R"(^([0-9][0-9.,eE+-]*)\s+([A-Za-z\x80-\xff%][A-Za-z0-9\x80-\xff%/*^·²³-]*)$)");

ExampleValue parse_example_chunk(const std::string& chunk, ElementKind kind,
                                 bool& ambiguousUnit) {
    ExampleValue ex;
    std::string rest = trim(chunk);

    std::smatch m;
    if (std::regex_match(rest, m, kLangQuoted)) {
        ex.text = trim(m[1]);
        ex.language = lower(m[2]);
        return ex;
    }
    if (std::regex_match(rest, m, kLangPrefix)) {
        ex.language = lower(m[1]);
        rest = trim(m[2]);
    } else if (std::regex_match(rest, m, kLangLeading)) {
        ex.language = lower(m[1]);
        rest = trim(m[2]);
    } else if (std::regex_match(rest, m, kLangTrailing)) {
        ex.language = lower(m[2]);
        rest = trim(m[1]);
    }

    if (kind != ElementKind::MultiLanguageProperty && !ex.language) {
        if (std::regex_match(rest, m, kUnitTrailingBracket)) {
            ex.unit = trim(m[2]);
            if (m[3].length() > 0) ambiguousUnit = true;
            rest = trim(m[1]);
        } else if (std::regex_match(rest, m, kUnitKeyword)) {
            ex.unit = trim(m[2]);
            rest = trim(m[1]);
        } else if (std::regex_match(rest, m, kUnitLeadingBracket)) {
            ex.unit = trim(m[1]);
            rest = trim(m[2]);
        } else if (std::regex_match(rest, m, kUnitBare)) {
            ex.unit = trim(m[2]);
            rest = trim(m[1]);
        }
    }

    ex.text = rest;
    return ex;
}

// The value-type token is a single word without example markers; everything
// else in the first line is already example text.
bool looks_like_type_token(const std::string& line) {
    const std::string t = trim(line);
    if (t.empty()) return false;
    if (t.find(' ') != std::string::npos || t.find('\t') != std::string::npos) return false;
    if (t.find('@') != std::string::npos || t.find(',') != std::string::npos) return false;
    if (t.front() == '"') return false;
    if (std::isdigit(static_cast<unsigned char>(t.front()))) return false;
    return true;
}

} // namespace

ValueCellParse parse_value_cell(const std::string& text, ElementKind kind) {
    ValueCellParse out;
    auto lines = split_lines(text);
    size_t firstExampleLine = 0;

    const std::string first = trim(lines.empty() ? "" : lines[0]);
    bool moreContent = false;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (!trim(lines[i]).empty()) moreContent = true;
    }
    static const std::regex bracketType(R"(^\[([^\]]+)\]\s*(.*)$)");
    std::smatch m;
    if (std::regex_match(first, m, bracketType) &&
        !normalize_type(trim(m[1]), kind).fallback) {
        out.rawValueType = trim(m[1]);
        firstExampleLine = 1;
        const std::string rest = trim(m[2]);
        if (!rest.empty()) lines.insert(lines.begin() + 1, rest);
    } else if (looks_like_type_token(first) &&
               (moreContent || !normalize_type(first, kind).fallback ||
                element_kind_from_token(first))) {
        // a lone token is a type only when it is a recognizable spelling;
        // with example lines below it the column layout says it is the type
        out.rawValueType = first;
        firstExampleLine = 1;
    }

    std::vector<std::string> chunks;
    for (size_t i = firstExampleLine; i < lines.size(); ++i) {
        std::istringstream lineStream(lines[i]);
        for (std::string part; std::getline(lineStream, part, ';');) {
            if (!trim(part).empty()) chunks.push_back(trim(part));
        }
    }
    for (const auto& chunk : chunks) {
        out.examples.push_back(parse_example_chunk(chunk, kind, out.ambiguousUnitForm));
    }
    return out;
}

// ---------------------------------------------------------------------------
// value type normalization

namespace {

std::string fold_type_key(const std::string& raw) {
    std::string key;
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == '-' || c == '_') continue;
        key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (key.rfind("xsd:", 0) == 0) key = key.substr(4);
    if (key.rfind("xs:", 0) == 0) key = key.substr(3);
    return key;
}

// Alias table over folded spellings (lowercase, no whitespace/-/_, xs: stripped).
const std::map<std::string, ValueKind>& type_aliases() {
    static const std::map<std::string, ValueKind> table = {
        {"string", ValueKind::String},
        {"strings", ValueKind::String},
        {"str", ValueKind::String},
        {"langstring", ValueKind::LangString},
        {"multilanguageproperty", ValueKind::LangString},
        {"mlp", ValueKind::LangString},
        {"int", ValueKind::Integer},
        {"integer", ValueKind::Integer},
        {"integers", ValueKind::Integer},
        {"intger", ValueKind::Integer},
        {"interger", ValueKind::Integer},
        {"long", ValueKind::Integer},
        {"int32", ValueKind::Integer},
        {"int64", ValueKind::Integer},
        {"short", ValueKind::Integer},
        {"nonnegativeinteger", ValueKind::NonNegativeInteger},
        {"unsignedint", ValueKind::NonNegativeInteger},
        {"unsignedinteger", ValueKind::NonNegativeInteger},
        {"uint", ValueKind::NonNegativeInteger},
        {"float", ValueKind::Float},
        {"double", ValueKind::Double},
        {"real", ValueKind::Double},
        {"bool", ValueKind::Boolean},
        {"boolean", ValueKind::Boolean},
        {"booleans", ValueKind::Boolean},
        {"date", ValueKind::Date},
        {"datetime", ValueKind::DateTime},
        {"datetimestamp", ValueKind::DateTime},
        {"timestamp", ValueKind::DateTime},
        {"duration", ValueKind::Duration},
        {"timeduration", ValueKind::Duration},
        {"anyuri", ValueKind::AnyUri},
        {"anyurl", ValueKind::AnyUri},
        {"uri", ValueKind::AnyUri},
        {"url", ValueKind::AnyUri},
        {"iri", ValueKind::AnyUri},
        {"decimal", ValueKind::Decimal},
        {"bigdecimal", ValueKind::Decimal},
        {"number", ValueKind::Decimal},
    };
    return table;
}

} // namespace

TypeNormalization normalize_type(const std::string& raw, ElementKind kind) {
    TypeNormalization out;
    out.type.raw = raw;
    const std::string key = fold_type_key(raw);
    const auto& table = type_aliases();
    if (auto it = table.find(key); it != table.end()) {
        out.type.kind = it->second;
        return out;
    }
    if (kind == ElementKind::MultiLanguageProperty) {
        out.type.kind = ValueKind::LangString;
        return out;
    }
    out.type.kind = ValueKind::String;
    out.fallback = true;
    return out;
}

// ---------------------------------------------------------------------------
// whole-spec extraction

namespace {

std::optional<ElementKind> element_kind_from_token(const std::string& token) {
    const std::string key = fold_type_key(token);
    static const std::map<std::string, ElementKind> table = {
        {"property", ElementKind::Property},
        {"prop", ElementKind::Property},
        {"multilanguageproperty", ElementKind::MultiLanguageProperty},
        {"mlp", ElementKind::MultiLanguageProperty},
        {"file", ElementKind::File},
        {"blob", ElementKind::Blob},
        {"range", ElementKind::Range},
        {"referenceelement", ElementKind::ReferenceElement},
        {"reference", ElementKind::ReferenceElement},
        {"ref", ElementKind::ReferenceElement},
        {"relationshipelement", ElementKind::RelationshipElement},
        {"rel", ElementKind::RelationshipElement},
        {"annotatedrelationshipelement", ElementKind::AnnotatedRelationshipElement},
        {"submodelelementcollection", ElementKind::SubmodelElementCollection},
        {"smc", ElementKind::SubmodelElementCollection},
        {"collection", ElementKind::SubmodelElementCollection},
        {"entity", ElementKind::Entity},
        {"submodel", ElementKind::Submodel},
    };
    if (auto it = table.find(key); it != table.end()) return it->second;
    return std::nullopt;
}

struct TwoColAttrs {
    std::map<std::string, std::string> byKey; // normalized key -> value
    std::vector<std::pair<std::string, std::string>> inOrder;
};

TwoColAttrs collect_twocol(const SpecTable& table) {
    TwoColAttrs attrs;
    auto take = [&](const std::vector<std::string>& row) {
        const std::string key = normalize_key(row[0]);
        const std::string value = trim(row.size() > 1 ? row[1] : "");
        if (key.empty()) return;
        attrs.inOrder.emplace_back(key, value);
        attrs.byKey.emplace(key, value); // first occurrence wins
    };
    for (const auto& row : table.headerRows) take(row);
    for (const auto& row : table.bodyRows) take(row);
    return attrs;
}

const std::regex kAppliesTo(R"(^applies\s+to\s*:?\s*(.+)$)", std::regex::icase);

std::vector<std::string> split_targets(const std::string& list) {
    std::vector<std::string> out;
    std::istringstream stream(list);
    for (std::string part; std::getline(stream, part, ',');) {
        const std::string t = trim(part);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

} // namespace

RawFieldRow parse_field_row(const std::array<std::string, 4>& cells, const std::string& location,
                            std::vector<Finding>& findings, const std::string& source) {
    RawFieldRow row;
    row.idShortCell = cells[0];
    row.semanticCell = cells[1];
    row.valueCell = cells[2];
    row.cardinalityCell = cells[3];
    row.location = location;

    auto idParse = parse_id_short_cell(cells[0]);
    row.idShort = idParse.idShort;
    if (row.idShort.displayName) {
        findings.push_back(make_finding(FindingCode::IllegalIdShort, source, location,
                                        "idShort '" + *row.idShort.displayName +
                                            "' sanitized to '" + row.idShort.base + "'"));
    }

    auto semParse = parse_semantic_cell(cells[1]);
    row.semanticId = semParse.semanticId;
    row.description = semParse.description;
    row.notes = semParse.notes;
    if (semParse.healedUrl) {
        findings.push_back(make_finding(FindingCode::UrlHealed, source, location,
                                        "re-joined identifier split across lines"));
    }
    if (semParse.unseparated) {
        findings.push_back(make_finding(FindingCode::UnseparatedCellContent, source, location,
                                        "semanticId and description separated heuristically"));
    }

    // the value cell may open with the element class instead of a value type
    ValueCellParse valueParse = parse_value_cell(cells[2], ElementKind::Property);
    if (valueParse.rawValueType) {
        if (auto kind = element_kind_from_token(*valueParse.rawValueType)) {
            row.kind = *kind;
            valueParse = parse_value_cell(cells[2], *kind);
        }
    }
    row.rawValueType = valueParse.rawValueType;
    row.examples = valueParse.examples;
    if (valueParse.ambiguousUnitForm) {
        findings.push_back(make_finding(FindingCode::AmbiguousUnitForm, source, location,
                                        "starred unit form treated like plain brackets"));
    }
    for (const auto& inline_ : idParse.inlineExamples) {
        bool ambiguous = false;
        row.examples.push_back(parse_example_chunk(inline_, row.kind, ambiguous));
    }

    if (is_container_kind(row.kind)) {
        row.typeRef = row.idShort.base;
        row.rawValueType.reset();
    }

    const std::string cardText = trim(cells[3]);
    if (!cardText.empty()) {
        try {
            row.cardinality = parse_cardinality(cardText);
        } catch (const Error&) {
            findings.push_back(make_finding(FindingCode::UnparseableCardinality, source, location,
                                            "cannot parse cardinality '" + cardText + "'"));
        }
    }
    return row;
}

ExtractedSpec extract_spec(const TableGrid& grid, const std::string& sourceName) {
    ExtractedSpec spec;
    spec.source = sourceName;
    spec.sourceKind = "grid";

    std::vector<SpecTable> tables = detect_tables(grid, &spec.findings);
    for (auto& finding : spec.findings) finding.source = sourceName;
    if (tables.empty()) {
        throw Error(ErrorCode::NoTablesFound, sourceName + " contains no spec tables");
    }

    std::vector<RawDefinition> defs;
    constexpr size_t kNoDef = static_cast<size_t>(-1);
    size_t currentDef = kNoDef;

    for (const auto& table : tables) {
        const std::string location =
            table.originSheet + "!r" + std::to_string(table.originRowIndex + 1);
        if (table.kind == TableKind::TwoColumn) {
            TwoColAttrs attrs = collect_twocol(table);
            const bool isDocHeader = attrs.byKey.count("specnumber") ||
                                     attrs.byKey.count("spec number") || attrs.byKey.count("spec");
            if (isDocHeader) {
                auto value_of = [&](std::initializer_list<const char*> keys) -> std::string {
                    for (const char* k : keys) {
                        if (auto it = attrs.byKey.find(k); it != attrs.byKey.end()) return it->second;
                    }
                    return "";
                };
                if (spec.specNumber.empty())
                    spec.specNumber = value_of({"specnumber", "spec number", "spec"});
                if (spec.title.empty()) spec.title = value_of({"title"});
                if (spec.version.empty()) spec.version = value_of({"version"});
                continue;
            }
            if (!attrs.byKey.count("idshort")) {
                if (attrs.byKey.count("version") && spec.version.empty()) {
                    spec.version = attrs.byKey["version"];
                } else {
                    spec.findings.push_back(make_finding(FindingCode::UnmatchedRegion, sourceName,
                                                         location,
                                                         "two-column table names no definition"));
                }
                continue;
            }

            RawDefinition def;
            def.location = location;
            auto idParse = parse_id_short_cell(attrs.byKey["idshort"]);
            def.idShort = idParse.idShort;
            def.name = def.idShort.base;
            if (def.idShort.displayName) {
                spec.findings.push_back(make_finding(
                    FindingCode::IllegalIdShort, sourceName, location,
                    "definition idShort '" + *def.idShort.displayName + "' sanitized to '" +
                        def.name + "'"));
            }
            if (auto it = attrs.byKey.find("semanticid"); it != attrs.byKey.end()) {
                auto semParse = parse_semantic_cell(it->second);
                def.semanticId = semParse.semanticId;
                if (semParse.healedUrl) {
                    spec.findings.push_back(make_finding(FindingCode::UrlHealed, sourceName,
                                                         location,
                                                         "re-joined identifier split across lines"));
                }
            }
            if (auto it = attrs.byKey.find("version"); it != attrs.byKey.end()) {
                def.version = it->second;
            }
            if (auto it = attrs.byKey.find("description"); it != attrs.byKey.end()) {
                def.description = it->second;
            }
            if (auto it = attrs.byKey.find("kind"); it != attrs.byKey.end()) {
                if (auto kind = element_kind_from_token(it->second)) def.kind = *kind;
            } else if (auto it2 = attrs.byKey.find("class"); it2 != attrs.byKey.end()) {
                if (auto kind = element_kind_from_token(it2->second)) def.kind = *kind;
            } else {
                def.kind = defs.empty() ? ElementKind::Submodel
                                        : ElementKind::SubmodelElementCollection;
            }
            for (const auto& [key, value] : attrs.inOrder) {
                std::smatch m;
                if (key == "applies to") {
                    def.fragmentTargets = split_targets(value);
                } else if (key == "note" && std::regex_match(value, m, kAppliesTo)) {
                    def.fragmentTargets = split_targets(m[1]);
                } else if (key == "note") {
                    def.notes.push_back(value);
                }
            }
            defs.push_back(std::move(def));
            currentDef = defs.size() - 1;
            continue;
        }

        // four-column field table
        SpecTable joined = rejoin_rows(table);
        if (currentDef == kNoDef) {
            RawDefinition def;
            def.location = location;
            def.name = sanitize_identifier(table.originSheet);
            if (def.name.empty()) def.name = "Unnamed";
            def.idShort.base = def.name;
            def.kind = defs.empty() ? ElementKind::Submodel : ElementKind::SubmodelElementCollection;
            spec.findings.push_back(make_finding(FindingCode::UnmatchedRegion, sourceName, location,
                                                 "field table without preceding header; definition '" +
                                                     def.name + "' synthesized"));
            defs.push_back(std::move(def));
            currentDef = defs.size() - 1;
        }
        int rowIndex = table.originRowIndex + static_cast<int>(table.headerRows.size());
        for (const auto& body : joined.bodyRows) {
            const std::string rowLocation =
                table.originSheet + "!r" + std::to_string(rowIndex + 1);
            std::array<std::string, 4> cells = {body[0], body[1], body[2], body[3]};
            defs[currentDef].rows.push_back(
                parse_field_row(cells, rowLocation, spec.findings, sourceName));
            ++rowIndex;
        }
    }

    for (auto& def : defs) {
        if (def.kind == ElementKind::Submodel) {
            if (spec.version.empty() && def.version) spec.version = *def.version;
            spec.submodelDefs.push_back(std::move(def));
        } else {
            spec.typeDefs.push_back(std::move(def));
        }
    }
    if (spec.specNumber.empty()) {
        std::smatch m;
        static const std::regex specNum(R"((\d{5}))");
        if (std::regex_search(sourceName, m, specNum)) spec.specNumber = m[1];
    }
    return spec;
}

} // namespace smtkit::grid
