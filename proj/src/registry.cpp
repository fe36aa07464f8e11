#include "smtkit/registry.hpp"

#include <fstream>
#include <sstream>

#include "smtkit/error.hpp"

namespace smtkit::transform {

namespace {

bool newer(const Version& a, const Version& b) {
    return a.major != b.major ? a.major > b.major : a.minor > b.minor;
}

} // namespace

SemanticRegistry SemanticRegistry::load(const std::filesystem::path& dir) {
    SemanticRegistry registry;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) return registry;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".smtm") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) continue;
        std::ostringstream buffer;
        buffer << in.rdbuf();
        try {
            registry.add_model(parse_model(buffer.str()));
        } catch (const Error&) {
            // a broken registry file never blocks the current transformation
        }
    }
    return registry;
}

void SemanticRegistry::insert(const std::string& key,
                              std::map<std::string, RegistryEntry>& into,
                              const RegistryEntry& entry) {
    if (key.empty()) return;
    auto it = into.find(key);
    if (it == into.end() || newer(entry.version, it->second.version)) {
        into[key] = entry;
    }
}

void SemanticRegistry::add_model(const Model& model) {
    if (!model.version) return;
    auto add = [&](const SemanticId& id, const RegistryEntry& entry) {
        insert(id.value, exact_, entry);
        insert(semantic_id_without_version(id), stripped_, entry);
    };
    auto add_record = [&](const RecordType& record) {
        if (record.semanticId) {
            add(*record.semanticId,
                RegistryEntry{model.specNumber, *model.version, record.name, true, {}});
        }
        for (const auto& field : record.fields) {
            if (!field.semanticId) continue;
            add(*field.semanticId,
                RegistryEntry{model.specNumber, *model.version,
                              record.name + "." + field.idShort.base, false, field.valueType});
        }
    };
    for (const auto& sm : model.submodels) add_record(sm);
    for (const auto& ty : model.types) add_record(ty);
}

const RegistryEntry* SemanticRegistry::lookup(const SemanticId& id) const {
    if (auto it = exact_.find(id.value); it != exact_.end()) return &it->second;
    const std::string stripped = semantic_id_without_version(id);
    if (auto it = stripped_.find(stripped); it != stripped_.end()) return &it->second;
    return nullptr;
}

std::filesystem::path registry_model_path(const std::filesystem::path& dir, const Model& model) {
    const Version v = model.version.value_or(Version{1, 0});
    return dir / (model.specNumber + "-" + std::to_string(v.major) + "-" +
                  std::to_string(v.minor) + ".smtm");
}

} // namespace smtkit::transform
