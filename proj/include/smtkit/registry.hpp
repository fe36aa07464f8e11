#pragma once

// Semantic registry: a directory of .smtm models doubles as the lookup
// source for semanticId resolution across specifications.

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "smtkit/model.hpp"

namespace smtkit::transform {

struct RegistryEntry {
    std::string specNumber;
    Version version;
    std::string ownerName; // type name, or "Type.field" for field entries
    bool isType = false;
    std::optional<CanonicalValueType> valueType; // known value type of a field

    bool operator==(const RegistryEntry&) const = default;
};

class SemanticRegistry {
public:
    SemanticRegistry() = default;

    // Reads every .smtm file in the directory; a missing directory is an
    // empty registry. Files that fail to parse are skipped.
    static SemanticRegistry load(const std::filesystem::path& dir);

    void add_model(const Model& model);

    // Exact match on the identifier, then on the identifier with its
    // trailing version segment stripped. Highest spec version wins.
    const RegistryEntry* lookup(const SemanticId& id) const;

    size_t size() const { return exact_.size(); }

private:
    void insert(const std::string& key, std::map<std::string, RegistryEntry>& into,
                const RegistryEntry& entry);

    std::map<std::string, RegistryEntry> exact_;
    std::map<std::string, RegistryEntry> stripped_;
};

// Registry file layout: <specNumber>-<major>-<minor>.smtm
std::filesystem::path registry_model_path(const std::filesystem::path& dir, const Model& model);

} // namespace smtkit::transform
