#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "smtkit/error.hpp"
#include "smtkit/grid.hpp"
#include "support/model_gen.hpp"

using namespace smtkit;
using namespace smtkit::grid;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), ("cannot open " + path).c_str());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string fixture_path(const std::string& name) {
    return std::string(SMTKIT_FIXTURES_DIR) + "/" + name;
}

Cell cell(std::string text, std::optional<double> fontSize = std::nullopt) {
    return Cell{std::move(text), fontSize};
}

TableGrid one_sheet(std::vector<std::vector<Cell>> rows, std::string name = "Sheet1") {
    TableGrid grid;
    grid.sheets.push_back(Sheet{std::move(name), std::move(rows)});
    return grid;
}

const std::vector<Cell> kFourColHeader = {cell("idShort"), cell("semanticId/Description"),
                                          cell("valueType/Example"), cell("card.")};

} // namespace

TEST_CASE("load_grid: cells, rows and font sizes load losslessly") {
    const std::string text = R"({"sheets":[{"name":"S","rows":[
        [{"text":"a"},{"text":"b","font_size":7}],
        [{"text":"c"},{"text":"d"}]]}]})";
    const TableGrid grid = parse_grid_json(text, "inline");
    REQUIRE(grid.sheets.size() == 1);
    REQUIRE(grid.sheets[0].rows.size() == 2);
    CHECK(grid.sheets[0].rows[0][0].text == "a");
    CHECK(grid.sheets[0].rows[0][1].fontSize == 7.0);
    CHECK_FALSE(grid.sheets[0].rows[1][1].fontSize.has_value());
}

TEST_CASE("load_grid: missing required key rejected") {
    try {
        parse_grid_json(R"({"tabs":[]})", "inline");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedGrid);
    }
}

TEST_CASE("load_grid: unknown cell key rejected") {
    const std::string text = R"({"sheets":[{"name":"S","rows":[[{"text":"a","font":9}]]}]})";
    CHECK_THROWS_AS(parse_grid_json(text, "inline"), Error);
}

TEST_CASE("load_grid: missing file is an IO error") {
    try {
        load_grid(fixture_path("does-not-exist.grid.json"));
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
    }
}

TEST_CASE("detect_tables: four-column header in a single row") {
    const TableGrid grid = one_sheet({
        kFourColHeader,
        {cell("Street"), cell("0173-1#02-AAO128#002"), cell("String"), cell("1")},
    });
    const auto tables = detect_tables(grid);
    REQUIRE(tables.size() == 1);
    CHECK(tables[0].kind == TableKind::FourColumn);
    REQUIRE(tables[0].bodyRows.size() == 1);
    CHECK(tables[0].bodyRows[0][0] == "Street");
}

TEST_CASE("detect_tables: two header rows consumed") {
    const TableGrid grid = one_sheet({
        {cell("idShort"), cell("semanticId"), cell("valueType"), cell("card.")},
        {cell(""), cell("Description"), cell("Example"), cell("")},
        {cell("Street"), cell("sem"), cell("String"), cell("1")},
    });
    const auto tables = detect_tables(grid);
    REQUIRE(tables.size() == 1);
    CHECK(tables[0].headerRows.size() == 2);
    REQUIRE(tables[0].bodyRows.size() == 1);
}

TEST_CASE("detect_tables: two-column header/value table") {
    const TableGrid grid = one_sheet({
        {cell("idShort"), cell("ContactInformations")},
        {cell("semanticId"), cell("https://example.com/ids/sm/02902/1/0/ContactInformations")},
    });
    const auto tables = detect_tables(grid);
    REQUIRE(tables.size() == 1);
    CHECK(tables[0].kind == TableKind::TwoColumn);
}

TEST_CASE("detect_tables: empty grid gives empty list") {
    TableGrid grid;
    grid.sheets.push_back(Sheet{"S", {}});
    CHECK(detect_tables(grid).empty());
}

TEST_CASE("detect_tables: footnote-sized rows are excluded from tables") {
    const TableGrid grid = one_sheet({
        kFourColHeader,
        {cell("Street"), cell("sem"), cell("String"), cell("1")},
        {cell("1) see below", 6.0)},
        {cell("City"), cell("sem2"), cell("String"), cell("1")},
    });
    const auto tables = detect_tables(grid);
    REQUIRE(tables.size() == 1);
    REQUIRE(tables[0].bodyRows.size() == 2);
    CHECK(tables[0].bodyRows[1][0] == "City");
}

TEST_CASE("detect_tables: unmatched regions reported as informational findings") {
    std::vector<Finding> findings;
    const TableGrid grid = one_sheet({{cell("just some prose"), cell("x"), cell("y")}});
    CHECK(detect_tables(grid, &findings).empty());
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].code == FindingCode::UnmatchedRegion);
    CHECK(findings[0].severity == Severity::Info);
}

TEST_CASE("rejoin_rows: continuation rows merge into their predecessor") {
    SpecTable table;
    table.kind = TableKind::FourColumn;
    table.bodyRows = {
        {"Street", "sem", "String", "1"},
        {"", "continued description", "", ""},
    };
    const SpecTable joined = rejoin_rows(table);
    REQUIRE(joined.bodyRows.size() == 1);
    CHECK(joined.bodyRows[0][1] == "sem\ncontinued description");
    CHECK(joined.bodyRows[0][0] == "Street");
}

TEST_CASE("rejoin_rows: table without continuations unchanged") {
    SpecTable table;
    table.kind = TableKind::FourColumn;
    table.bodyRows = {{"A", "s", "String", "1"}, {"B", "t", "String", "1"}};
    CHECK(rejoin_rows(table) == table);
}

TEST_CASE("rejoin_rows: orphan continuation rejected") {
    SpecTable table;
    table.kind = TableKind::FourColumn;
    table.bodyRows = {{"", "description without an owner", "", ""}};
    try {
        rejoin_rows(table);
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OrphanContinuation);
    }
}

TEST_CASE("rejoin_rows is idempotent") {
    std::mt19937 rng(11);
    for (int iter = 0; iter < 100; ++iter) {
        SpecTable table;
        table.kind = TableKind::FourColumn;
        const int rows = std::uniform_int_distribution<int>(1, 8)(rng);
        table.bodyRows.push_back({"Name0", "sem", "String", "1"});
        for (int i = 1; i < rows; ++i) {
            if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
                table.bodyRows.push_back({"", "cont", "", ""});
            } else {
                table.bodyRows.push_back({"Name" + std::to_string(i), "sem", "String", "1"});
            }
        }
        const SpecTable once = rejoin_rows(table);
        CHECK(rejoin_rows(once) == once);
    }
}

TEST_CASE("parse_cardinality: notation families") {
    CHECK(parse_cardinality("1..*") == Cardinality{1, {}});
    CHECK(parse_cardinality("[0..1]") == Cardinality{0, 1});
    CHECK(parse_cardinality("[1..*]") == Cardinality{1, {}});
    CHECK(parse_cardinality("1..n") == Cardinality{1, {}});
    CHECK(parse_cardinality("0..2") == Cardinality{0, 2});
    CHECK(parse_cardinality("*") == Cardinality{0, {}});
    CHECK(parse_cardinality("3") == Cardinality{3, 3});
    CHECK(parse_cardinality(" [ 1 .. 5 ] ") == Cardinality{1, 5});
    CHECK(parse_cardinality("One") == Cardinality{1, 1});
    CHECK(parse_cardinality("ZeroToOne") == Cardinality{0, 1});
    CHECK(parse_cardinality("OneToMany") == Cardinality{1, {}});
    CHECK(parse_cardinality("ZeroToMany") == Cardinality{0, {}});
}

TEST_CASE("parse_cardinality: unparseable text carries the raw input") {
    try {
        parse_cardinality("often");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnparseableCardinality);
        CHECK(std::string(e.what()).find("often") != std::string::npos);
    }
}

TEST_CASE("parse_cardinality accepts the canonical-render image") {
    testing::ModelGen gen(99);
    for (int i = 0; i < 500; ++i) {
        const Cardinality c = gen.cardinality();
        CHECK(parse_cardinality(render_cardinality(c)) == c);
    }
}

TEST_CASE("parse_id_short_cell: placeholder forms") {
    auto counting = parse_id_short_cell("ContactInformation{00}");
    CHECK(counting.idShort.base == "ContactInformation");
    CHECK(counting.idShort.placeholder == Placeholder::Counting);
    CHECK(counting.idShort.placeholderText == "00");

    auto plain = parse_id_short_cell("ManufacturerName");
    CHECK(plain.idShort.base == "ManufacturerName");
    CHECK(plain.idShort.placeholder == Placeholder::None);

    auto arbitrary = parse_id_short_cell("Marking{arbitrary}");
    CHECK(arbitrary.idShort.base == "Marking");
    CHECK(arbitrary.idShort.placeholder == Placeholder::Arbitrary);

    auto variable = parse_id_short_cell("Point{variable}");
    CHECK(variable.idShort.placeholder == Placeholder::Variable);

    auto freetext = parse_id_short_cell("Document{name of the file}");
    CHECK(freetext.idShort.placeholder == Placeholder::FreeText);
    CHECK(freetext.idShort.placeholderText == "name of the file");
}

TEST_CASE("parse_id_short_cell: inline example fragments are split off") {
    auto bracketed = parse_id_short_cell("SerialNumber [SN123]");
    CHECK(bracketed.idShort.base == "SerialNumber");
    REQUIRE(bracketed.inlineExamples.size() == 1);
    CHECK(bracketed.inlineExamples[0] == "SN123");

    auto newline = parse_id_short_cell("SerialNumber\nSN123");
    CHECK(newline.idShort.base == "SerialNumber");
    REQUIRE(newline.inlineExamples.size() == 1);
    CHECK(newline.inlineExamples[0] == "SN123");
}

TEST_CASE("parse_id_short_cell: illegal name sanitized with display name") {
    auto parsed = parse_id_short_cell("Cooling-Type");
    CHECK(parsed.idShort.base == "CoolingType");
    CHECK(parsed.idShort.displayName == "Cooling-Type");
}

TEST_CASE("parse_id_short_cell: empty cell rejected") {
    try {
        parse_id_short_cell("  ");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyIdShort);
    }
}

TEST_CASE("parse_semantic_cell: leading URL extracted even without separator") {
    const auto parsed =
        parse_semantic_cell("https://admin-shell.io/zvei/nameplate/1/0/Nameplate Some description");
    REQUIRE(parsed.semanticId.has_value());
    CHECK(parsed.semanticId->value == "https://admin-shell.io/zvei/nameplate/1/0/Nameplate");
    CHECK(parsed.semanticId->scheme == SemanticScheme::Iri);
    CHECK(parsed.description == "Some description");
    CHECK(parsed.unseparated);
}

TEST_CASE("parse_semantic_cell: IRDI followed by description") {
    const auto parsed = parse_semantic_cell("0173-1#02-AAO677#002 Manufacturer name");
    REQUIRE(parsed.semanticId.has_value());
    CHECK(parsed.semanticId->scheme == SemanticScheme::Irdi);
    CHECK(parsed.semanticId->value == "0173-1#02-AAO677#002");
    CHECK(parsed.description == "Manufacturer name");
}

TEST_CASE("parse_semantic_cell: note lines are captured as notes") {
    const auto parsed =
        parse_semantic_cell("some description\nNote: idShort can be chosen arbitrarily");
    CHECK(parsed.description == "some description");
    REQUIRE(parsed.notes.size() == 1);
    CHECK(parsed.notes[0] == "idShort can be chosen arbitrarily");
}

TEST_CASE("parse_semantic_cell: words starting with Note are not notes") {
    const auto parsed = parse_semantic_cell("Notebook holder");
    CHECK(parsed.notes.empty());
    CHECK(parsed.description == "Notebook holder");
}

TEST_CASE("parse_semantic_cell: URL split across a line break is healed") {
    const auto parsed = parse_semantic_cell(
        "https://example.com/ids/pr/02903/2/0/Cool\ningType Cooling type information");
    REQUIRE(parsed.semanticId.has_value());
    CHECK(parsed.semanticId->value == "https://example.com/ids/pr/02903/2/0/CoolingType");
    CHECK(parsed.description == "Cooling type information");
    CHECK(parsed.healedUrl);
}

TEST_CASE("parse_semantic_cell: break before an uppercase word is a real boundary") {
    const auto parsed = parse_semantic_cell(
        "https://example.com/ids/pr/02903/2/0/Street\nSome description");
    REQUIRE(parsed.semanticId.has_value());
    CHECK(parsed.semanticId->value == "https://example.com/ids/pr/02903/2/0/Street");
    CHECK(parsed.description == "Some description");
    CHECK_FALSE(parsed.healedUrl);
}

TEST_CASE("parse_value_cell: type token on the first line") {
    const auto parsed = parse_value_cell("String\nOI-ID: 5432-1/22", ElementKind::Property);
    CHECK(parsed.rawValueType == "String");
    REQUIRE(parsed.examples.size() == 1);
    CHECK(parsed.examples[0].text == "OI-ID: 5432-1/22");
}

TEST_CASE("parse_value_cell: element class token with language-marked example") {
    const auto parsed = parse_value_cell("MultiLanguageProperty\nDetecting the position@en",
                                         ElementKind::MultiLanguageProperty);
    CHECK(parsed.rawValueType == "MultiLanguageProperty");
    REQUIRE(parsed.examples.size() == 1);
    CHECK(parsed.examples[0].text == "Detecting the position");
    CHECK(parsed.examples[0].language == "en");
}

TEST_CASE("parse_value_cell: unit form") {
    const auto parsed = parse_value_cell("Integer\n5 [kg]", ElementKind::Property);
    CHECK(parsed.rawValueType == "Integer");
    REQUIRE(parsed.examples.size() == 1);
    CHECK(parsed.examples[0].text == "5");
    CHECK(parsed.examples[0].unit == "kg");
}

TEST_CASE("parse_value_cell: fixture table of language and unit forms") {
    const auto doc = nlohmann::json::parse(slurp(fixture_path("value_forms.json")));
    for (const auto& jcase : doc.at("cases")) {
        const std::string cellText = jcase.at("cell").get<std::string>();
        CAPTURE(cellText);
        const ElementKind kind =
            *element_kind_from_name(jcase.at("kind").get<std::string>());
        const auto parsed = parse_value_cell(cellText, kind);
        CHECK_FALSE(parsed.rawValueType.has_value());
        const auto& expected = jcase.at("examples");
        REQUIRE(parsed.examples.size() == expected.size());
        for (size_t i = 0; i < parsed.examples.size(); ++i) {
            CHECK(parsed.examples[i].text == expected[i].at("text").get<std::string>());
            if (expected[i].contains("lang")) {
                CHECK(parsed.examples[i].language == expected[i]["lang"].get<std::string>());
            } else {
                CHECK_FALSE(parsed.examples[i].language.has_value());
            }
            if (expected[i].contains("unit")) {
                CHECK(parsed.examples[i].unit == expected[i]["unit"].get<std::string>());
            } else {
                CHECK_FALSE(parsed.examples[i].unit.has_value());
            }
        }
    }
}

TEST_CASE("normalize_type: alias fixture table") {
    const auto doc = nlohmann::json::parse(slurp(fixture_path("type_aliases.json")));
    size_t integerSpellings = 0;
    for (const auto& jcase : doc.at("cases")) {
        const std::string raw = jcase.at("raw").get<std::string>();
        CAPTURE(raw);
        const auto norm = normalize_type(raw, ElementKind::Property);
        CHECK(std::string(value_kind_name(norm.type.kind)) ==
              jcase.at("kind").get<std::string>());
        CHECK(norm.type.raw == raw);
        const bool fallback = jcase.contains("fallback") && jcase["fallback"].get<bool>();
        CHECK(norm.fallback == fallback);
        if (!fallback && norm.type.kind == ValueKind::Integer) ++integerSpellings;
    }
    CHECK(integerSpellings >= 5);
}

TEST_CASE("normalize_type is total over arbitrary strings") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> len(0, 12);
    std::uniform_int_distribution<int> chr(32, 126);
    for (int i = 0; i < 500; ++i) {
        std::string raw;
        const int n = len(rng);
        for (int k = 0; k < n; ++k) raw += static_cast<char>(chr(rng));
        const auto norm = normalize_type(raw, ElementKind::Property);
        CHECK(norm.type.raw == raw);
        CHECK(value_kind_from_name(std::string(value_kind_name(norm.type.kind))).has_value());
    }
}

TEST_CASE("extract_spec: one submodel with three field rows") {
    const TableGrid grid = one_sheet({
        {cell("specNumber"), cell("02906")},
        {cell("title"), cell("Machine Card")},
        {cell("version"), cell("1.0")},
        {},
        {cell("idShort"), cell("MachineCard")},
        {cell("semanticId"), cell("https://example.com/ids/sm/02906/1/0/MachineCard")},
        {},
        kFourColHeader,
        {cell("ModelNumber"), cell("0173-1#02-AAA111#001 Model number"), cell("String\nMC-100"),
         cell("1..1")},
        {cell("SerialNumber"), cell("0173-1#02-AAA112#001"), cell("String"), cell("[0..1]")},
        {cell("Weight"), cell("0173-1#02-AAA113#001"), cell("Decimal\n5 [kg]"), cell("0..1")},
    });
    const ExtractedSpec spec = extract_spec(grid, "inline.grid.json");
    CHECK(spec.specNumber == "02906");
    CHECK(spec.title == "Machine Card");
    CHECK(spec.version == "1.0");
    REQUIRE(spec.submodelDefs.size() == 1);
    CHECK(spec.typeDefs.empty());
    const auto& def = spec.submodelDefs[0];
    CHECK(def.name == "MachineCard");
    REQUIRE(def.rows.size() == 3);
    CHECK(def.rows[0].idShort.base == "ModelNumber");
    CHECK(def.rows[0].cardinality == Cardinality{1, 1});
    CHECK(def.rows[1].cardinality == Cardinality{0, 1});
    CHECK(def.rows[2].examples.size() == 1);
    CHECK(def.rows[2].examples[0].unit == "kg");
    // verbatim cells retained for audit
    CHECK(def.rows[0].valueCell == "String\nMC-100");
    CHECK(def.rows[0].semanticCell == "0173-1#02-AAA111#001 Model number");
}

TEST_CASE("extract_spec: footnote rows inside a table are excluded") {
    const TableGrid grid = one_sheet({
        {cell("idShort"), cell("MachineCard")},
        kFourColHeader,
        {cell("A"), cell("sem"), cell("String"), cell("1")},
        {cell("1) footnote text", 6.5), cell("", 6.5)},
        {cell("B"), cell("sem"), cell("String"), cell("1")},
    });
    const ExtractedSpec spec = extract_spec(grid, "inline.grid.json");
    REQUIRE(spec.submodelDefs.size() == 1);
    CHECK(spec.submodelDefs[0].rows.size() == 2);
}

TEST_CASE("extract_spec: unparseable cardinality becomes a finding, not a failure") {
    const TableGrid grid = one_sheet({
        {cell("idShort"), cell("MachineCard")},
        kFourColHeader,
        {cell("A"), cell("sem"), cell("String"), cell("often")},
    });
    const ExtractedSpec spec = extract_spec(grid, "inline.grid.json");
    REQUIRE(spec.submodelDefs.size() == 1);
    REQUIRE(spec.submodelDefs[0].rows.size() == 1);
    CHECK_FALSE(spec.submodelDefs[0].rows[0].cardinality.has_value());
    bool found = false;
    for (const auto& f : spec.findings) {
        if (f.code == FindingCode::UnparseableCardinality) found = true;
    }
    CHECK(found);
}

TEST_CASE("extract_spec: empty grid raises NO_TABLES_FOUND") {
    TableGrid grid;
    grid.sheets.push_back(Sheet{"S", {}});
    try {
        extract_spec(grid, "empty.grid.json");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoTablesFound);
    }
}

TEST_CASE("extract_spec: continuation rows re-joined before parsing") {
    const TableGrid grid = one_sheet({
        {cell("idShort"), cell("MachineCard")},
        kFourColHeader,
        {cell("Street"), cell("0173-1#02-AAA114#001 street"), cell("String"), cell("1")},
        {cell(""), cell("and house number"), cell(""), cell("")},
    });
    const ExtractedSpec spec = extract_spec(grid, "inline.grid.json");
    REQUIRE(spec.submodelDefs[0].rows.size() == 1);
    const auto& row = spec.submodelDefs[0].rows[0];
    CHECK(row.description == "street\nand house number");
    CHECK(row.semanticCell == "0173-1#02-AAA114#001 street\nand house number");
}

TEST_CASE("extracted spec JSON sidecar round-trips") {
    const TableGrid grid = one_sheet({
        {cell("specNumber"), cell("02906")},
        {cell("idShort"), cell("MachineCard")},
        kFourColHeader,
        {cell("Phone{00}"), cell("0173-1#02-AAA115#001 phone"), cell("String\n+49 123"),
         cell("0..*")},
    });
    const ExtractedSpec spec = extract_spec(grid, "inline.grid.json");
    const ExtractedSpec back = extracted_from_json(extracted_to_json(spec));
    CHECK(back == spec);
}
