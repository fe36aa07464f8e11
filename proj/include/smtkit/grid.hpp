#pragma once

// Table-grid ingestion: the normalized stand-in for PDF-extracted tables.
// Implements the layout detection, row re-joining and cell heuristics that
// turn a grid of cells into an ExtractedSpec.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "smtkit/extracted.hpp"
#include "smtkit/model.hpp"

namespace smtkit::grid {

struct Cell {
    std::string text;
    std::optional<double> fontSize; // points

    bool operator==(const Cell&) const = default;
};

struct Sheet {
    std::string name;
    std::vector<std::vector<Cell>> rows; // may be ragged

    bool operator==(const Sheet&) const = default;
};

struct TableGrid {
    std::vector<Sheet> sheets;

    bool operator==(const TableGrid&) const = default;
};

enum class TableKind { TwoColumn, FourColumn };

struct SpecTable {
    TableKind kind = TableKind::FourColumn;
    std::vector<std::vector<std::string>> headerRows; // 2 rows typical for FourColumn, 1 for TwoColumn
    std::vector<std::vector<std::string>> bodyRows;   // logical cells (4 or 2 per row)
    std::string originSheet;
    int originRowIndex = 0;

    bool operator==(const SpecTable&) const = default;
};

// Cells smaller than this are footnotes and never table content.
inline constexpr double kFootnoteThresholdPt = 8.0;

TableGrid load_grid(const std::filesystem::path& path);
TableGrid parse_grid_json(const std::string& text, const std::string& sourceName);

std::vector<SpecTable> detect_tables(const TableGrid& grid,
                                     std::vector<Finding>* findings = nullptr);

// Merges continuation rows (empty idShort cell, other content present) into
// their predecessor. Idempotent. Throws Error{OrphanContinuation} when the
// first body row is a continuation.
SpecTable rejoin_rows(const SpecTable& table);

// Accepts a..b, [a..b], a..*, a..n, bare integers, "*", and the keyword
// forms One/ZeroToOne/OneToMany/ZeroToMany. Throws Error{UnparseableCardinality}.
Cardinality parse_cardinality(const std::string& text);

struct IdShortParse {
    IdShortSpec idShort;
    std::vector<std::string> inlineExamples;
};

IdShortParse parse_id_short_cell(const std::string& text);

struct SemanticParse {
    std::optional<SemanticId> semanticId;
    std::string description;
    std::vector<std::string> notes;
    bool healedUrl = false;    // a line break inside the identifier was repaired
    bool unseparated = false;  // identifier and description shared one run
};

SemanticParse parse_semantic_cell(const std::string& text);

struct ValueCellParse {
    std::optional<std::string> rawValueType;
    std::vector<ExampleValue> examples;
    bool ambiguousUnitForm = false; // the starred bracket form was seen
};

ValueCellParse parse_value_cell(const std::string& text, ElementKind kind);

struct SemanticTokenScan {
    std::vector<std::string> tokens; // every IRI/IRDI found, in order
    std::string residue;             // remaining text with tokens removed
};

SemanticTokenScan scan_semantic_tokens(const std::string& text);

struct TypeNormalization {
    CanonicalValueType type;
    bool fallback = false; // unknown spelling, String substituted
};

// Total: any spelling maps into the canonical set, unknown ones to String.
TypeNormalization normalize_type(const std::string& raw, ElementKind kind);

// Parses one logical four-column body row into the RawFieldRow view.
RawFieldRow parse_field_row(const std::array<std::string, 4>& cells, const std::string& location,
                            std::vector<Finding>& findings, const std::string& source);

ExtractedSpec extract_spec(const TableGrid& grid, const std::string& sourceName);

} // namespace smtkit::grid
