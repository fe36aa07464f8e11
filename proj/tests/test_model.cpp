#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "smtkit/error.hpp"
#include "smtkit/model.hpp"
#include "support/model_gen.hpp"

using namespace smtkit;

namespace {

Model minimal_model() {
    Model m;
    m.specNumber = "02906";
    m.version = Version{1, 0};
    RecordType sm;
    sm.name = "MachineCard";
    sm.kind = ElementKind::Submodel;
    m.submodels.push_back(sm);
    return m;
}

Model typed_model() {
    Model m = minimal_model();
    AasField f;
    f.idShort.base = "ModelNumber";
    f.kind = ElementKind::Property;
    f.valueType = CanonicalValueType{ValueKind::String, "String"};
    f.cardinality = Cardinality{1, 1};
    m.submodels[0].fields.push_back(f);
    return m;
}

bool has_violation(const ValidationReport& report, const std::string& code) {
    for (const auto& v : report) {
        if (v.code == code) return true;
    }
    return false;
}

} // namespace

TEST_CASE("validate: well-typed model yields an empty report") {
    CHECK(validate_model(typed_model()).empty());
}

TEST_CASE("validate: unresolved type reference") {
    Model m = minimal_model();
    AasField f;
    f.idShort.base = "Contact";
    f.kind = ElementKind::SubmodelElementCollection;
    f.typeRef = "ContactInformation";
    m.submodels[0].fields.push_back(f);
    const auto report = validate_model(m);
    REQUIRE(report.size() == 1);
    CHECK(report[0].code == "UNRESOLVED_TYPE");
}

TEST_CASE("validate: duplicate type names") {
    Model m = typed_model();
    RecordType marking;
    marking.name = "Marking";
    marking.kind = ElementKind::SubmodelElementCollection;
    m.types.push_back(marking);
    m.types.push_back(marking);
    const auto report = validate_model(m);
    REQUIRE(report.size() == 1);
    CHECK(report[0].code == "DUPLICATE_TYPE_NAME");
}

TEST_CASE("validate: missing version and missing property type") {
    Model m = typed_model();
    m.version.reset();
    m.submodels[0].fields[0].valueType.reset();
    const auto report = validate_model(m);
    CHECK(has_violation(report, "MISSING_VERSION"));
    CHECK(has_violation(report, "MISSING_VALUE_TYPE"));
}

TEST_CASE("validate: qualified reference requires matching import") {
    Model m = minimal_model();
    AasField f;
    f.idShort.base = "Contact";
    f.kind = ElementKind::SubmodelElementCollection;
    f.typeRef = "02902:ContactInformation";
    m.submodels[0].fields.push_back(f);
    CHECK(has_violation(validate_model(m), "UNRESOLVED_TYPE"));
    m.imports.push_back(Import{"02902", Version{1, 0}});
    CHECK(validate_model(m).empty());
}

TEST_CASE("serialize: minimal model structure") {
    const std::string text = serialize_model(minimal_model());
    CHECK(text.find("model 02906 version 1.0\n") == 0);
    size_t submodelCount = 0;
    size_t pos = 0;
    while ((pos = text.find("submodel ", pos)) != std::string::npos) {
        ++submodelCount;
        pos += 9;
    }
    CHECK(submodelCount == 1);
}

TEST_CASE("serialize: import line carries spec number and version") {
    Model m = typed_model();
    m.imports.push_back(Import{"02002", Version{1, 0}});
    const std::string text = serialize_model(m);
    CHECK(text.find("import 02002 version 1.0\n") != std::string::npos);
}

TEST_CASE("serialize: repeated calls are byte-identical") {
    testing::ModelGen gen(7);
    const Model m = gen.model();
    const std::string a = serialize_model(m);
    const std::string b = serialize_model(m);
    const std::string c = serialize_model(m);
    CHECK(a == b);
    CHECK(b == c);
}

TEST_CASE("serialize: invalid model is rejected") {
    Model m = typed_model();
    m.version.reset();
    CHECK_THROWS_AS(serialize_model(m), Error);
    try {
        serialize_model(m);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidModel);
    }
}

TEST_CASE("parse: unknown keyword is a syntax error") {
    try {
        parse_model("model 02906 version 1.0\nbogus line here\n");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SyntaxError);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("parse: missing version line is an invalid model") {
    try {
        parse_model("model 02906\nsubmodel MachineCard\nend\n");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidModel);
    }
}

TEST_CASE("round-trip: serialize then parse is structural identity") {
    const Model fixtures[] = {minimal_model(), typed_model()};
    for (const auto& m : fixtures) {
        CHECK(parse_model(serialize_model(m)) == m);
    }
}

TEST_CASE("round-trip property: random models survive serialize/parse") {
    for (uint32_t seed = 1; seed <= 200; ++seed) {
        testing::ModelGen gen(seed);
        const Model m = gen.model();
        CAPTURE(seed);
        const std::string text = serialize_model(m);
        const Model back = parse_model(text);
        REQUIRE(back == m);
        REQUIRE(serialize_model(back) == text);
    }
}

TEST_CASE("semantic id classification") {
    const SemanticId iri = classify_semantic_id("https://example.com/ids/sm/1/0/Nameplate");
    CHECK(iri.scheme == SemanticScheme::Iri);
    CHECK(iri.version == "1/0");
    CHECK(semantic_id_without_version(iri) == "https://example.com/ids/sm/Nameplate");

    const SemanticId irdi = classify_semantic_id("0173-1#02-AAO677#002");
    CHECK(irdi.scheme == SemanticScheme::Irdi);
    CHECK(irdi.version == "002");
    CHECK(semantic_id_without_version(irdi) == "0173-1#02-AAO677");

    const SemanticId cdd = classify_semantic_id("0112/2///61987#ABA827#003");
    CHECK(cdd.scheme == SemanticScheme::Irdi);

    CHECK(classify_semantic_id("SomeLocalName").scheme == SemanticScheme::Local);
}

TEST_CASE("identifier sanitizing") {
    CHECK(is_legal_identifier("ManufacturerName"));
    CHECK_FALSE(is_legal_identifier("1stThing"));
    CHECK_FALSE(is_legal_identifier("Cooling-Type"));
    CHECK(sanitize_identifier("Cooling-Type") == "CoolingType");
    CHECK(sanitize_identifier("1st Thing") == "stThing");
    CHECK(sanitize_identifier("--") == "");
}
