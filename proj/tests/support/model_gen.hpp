#pragma once

// Deterministic random-model generator for property tests. Produces models
// that satisfy the core invariants by construction.

#include <random>
#include <string>
#include <vector>

#include "smtkit/model.hpp"

namespace smtkit::testing {

class ModelGen {
public:
    explicit ModelGen(uint32_t seed) : rng_(seed) {}

    Model model() {
        Model m;
        m.specNumber = pick_spec_number();
        m.version = Version{int_in(0, 3), int_in(0, 9)};
        if (chance(70)) m.title = "Spec " + m.specNumber;
        const int enums = int_in(0, 2);
        for (int i = 0; i < enums; ++i) m.enums.push_back(enum_type(i));
        const int types = int_in(0, 3);
        for (int i = 0; i < types; ++i) m.types.push_back(record("T" + std::to_string(i), false));
        const int submodels = int_in(1, 2);
        for (int i = 0; i < submodels; ++i) {
            m.submodels.push_back(record("S" + std::to_string(i), true));
        }
        if (chance(40)) {
            m.imports.push_back(Import{"02002", Version{1, 0}});
        }
        // references must resolve: wire some container fields to local types
        for (auto& sm : m.submodels) {
            for (auto& field : sm.fields) {
                if (is_container_kind(field.kind)) {
                    if (!m.types.empty() && chance(80)) {
                        field.typeRef = m.types[static_cast<size_t>(int_in(
                                                    0, static_cast<int>(m.types.size()) - 1))]
                                            .name;
                    } else if (!m.imports.empty()) {
                        field.typeRef = "02002:Imported";
                    } else {
                        field.kind = ElementKind::Property;
                        field.typeRef.reset();
                        field.valueType = CanonicalValueType{ValueKind::String, "String"};
                    }
                } else if (!m.enums.empty() && field.kind == ElementKind::Property && chance(20)) {
                    field.typeRef = m.enums[0].name;
                    field.valueType.reset();
                }
            }
        }
        for (auto& ty : m.types) {
            for (auto& field : ty.fields) {
                if (is_container_kind(field.kind)) {
                    field.kind = ElementKind::Property;
                    field.typeRef.reset();
                    field.valueType = CanonicalValueType{ValueKind::Integer, "int"};
                }
            }
        }
        return m;
    }

    Cardinality cardinality() {
        Cardinality c;
        c.min = int_in(0, 3);
        if (chance(60)) c.max = c.min + int_in(0, 4);
        return c;
    }

private:
    std::string pick_spec_number() {
        return "02" + std::to_string(int_in(100, 999));
    }

    EnumType enum_type(int index) {
        EnumType en;
        en.name = "E" + std::to_string(index);
        en.valueType = CanonicalValueType{ValueKind::String, "String"};
        en.open = chance(30);
        const int n = int_in(1, 4);
        for (int i = 0; i < n; ++i) {
            EnumLiteral lit;
            lit.name = "L" + std::to_string(i);
            lit.value = "value-" + std::to_string(i);
            if (chance(25)) lit.semanticId = semantic_id();
            en.literals.push_back(std::move(lit));
        }
        return en;
    }

    RecordType record(const std::string& name, bool submodel) {
        RecordType r;
        r.name = name;
        r.kind = submodel ? ElementKind::Submodel
                          : (chance(80) ? ElementKind::SubmodelElementCollection
                                        : ElementKind::Entity);
        if (chance(60)) r.semanticId = semantic_id();
        if (chance(50)) r.description = "Description of " + name;
        r.allowsUserIdShort = chance(15);
        const int n = int_in(0, 6);
        for (int i = 0; i < n; ++i) r.fields.push_back(field(name, i));
        return r;
    }

    AasField field(const std::string& owner, int index) {
        AasField f;
        f.idShort.base = owner + "F" + std::to_string(index);
        switch (int_in(0, 9)) {
        case 0: f.kind = ElementKind::MultiLanguageProperty; break;
        case 1: f.kind = ElementKind::File; break;
        case 2: f.kind = ElementKind::SubmodelElementCollection; break;
        case 3: f.kind = ElementKind::Range; break;
        default: f.kind = ElementKind::Property; break;
        }
        if (chance(20)) {
            f.idShort.placeholder = Placeholder::Counting;
            f.idShort.placeholderText = chance(50) ? "00" : "0";
        } else if (chance(10)) {
            f.idShort.placeholder = Placeholder::Arbitrary;
        }
        if (chance(10)) f.idShort.displayName = owner + "-F" + std::to_string(index);
        if (f.kind == ElementKind::Property) {
            const ValueKind kinds[] = {ValueKind::String, ValueKind::Integer, ValueKind::Boolean,
                                       ValueKind::Date, ValueKind::Double, ValueKind::AnyUri};
            const ValueKind kind = kinds[int_in(0, 5)];
            std::string raw(value_kind_name(kind));
            if (chance(30)) raw = "xs:" + raw;
            f.valueType = CanonicalValueType{kind, raw};
        } else if (f.kind == ElementKind::MultiLanguageProperty) {
            f.valueType = CanonicalValueType{ValueKind::LangString, "LangString"};
        }
        if (chance(70)) f.semanticId = semantic_id();
        if (chance(15)) f.alternativeSemanticIds.push_back(semantic_id());
        f.cardinality = cardinality();
        if (chance(50)) f.description = "field " + std::to_string(index);
        if (chance(25)) f.notes.push_back("The idShort can be chosen arbitrarily");
        if (chance(50)) {
            ExampleValue ex;
            ex.text = "sample " + std::to_string(int_in(0, 99));
            if (f.kind == ElementKind::MultiLanguageProperty && chance(70)) ex.language = "en";
            if (chance(25)) ex.unit = "kg";
            f.examples.push_back(std::move(ex));
        }
        f.allowsUserIdShort = chance(10);
        f.ordered = chance(10);
        f.advisoryFlags = chance(20);
        return f;
    }

    SemanticId semantic_id() {
        SemanticId id;
        if (chance(60)) {
            id.scheme = SemanticScheme::Iri;
            id.value = "https://example.com/ids/" + std::to_string(int_in(1, 999)) + "/1/0";
            if (chance(50)) id.version = "1/0";
        } else {
            id.scheme = SemanticScheme::Irdi;
            id.value = "0173-1#02-AAA" + std::to_string(int_in(100, 999)) + "#00" +
                       std::to_string(int_in(1, 9));
            if (chance(50)) id.version = "00" + std::to_string(int_in(1, 9));
        }
        return id;
    }

    bool chance(int percent) { return int_in(1, 100) <= percent; }

    int int_in(int lo, int hi) {
        std::uniform_int_distribution<int> dist(lo, hi);
        return dist(rng_);
    }

    std::mt19937 rng_;
};

} // namespace smtkit::testing
