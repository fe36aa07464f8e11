#pragma once

// Rewrites an ExtractedSpec into a validated, versioned Model: reuse
// expansion, fragment merging, note interpretation, enumeration extraction,
// semanticId resolution with imports, name uniquification.

#include <string>
#include <vector>

#include "smtkit/extracted.hpp"
#include "smtkit/model.hpp"
#include "smtkit/registry.hpp"

namespace smtkit::transform {

// Rows with an `A or B` idShort expand into one row per name; semanticIds
// distribute positionally when the cell lists one identifier per name.
ExtractedSpec split_or_idshorts(const ExtractedSpec& spec);

// Fragment definitions (header note `applies to: T1, T2`) append their rows
// to every named target; collisions keep the first definition.
ExtractedSpec merge_fragments(const ExtractedSpec& spec, std::vector<Finding>& findings);

enum class NoteEffect { None, AllowsUserIdShort, AlternativeSemanticIds, Enumeration };

// Shared with the linter: which interpretation pattern a note matches.
NoteEffect classify_note(const std::string& note);

ExtractedSpec interpret_notes(const ExtractedSpec& spec);

ExtractedSpec extract_enums(const ExtractedSpec& spec);

ExtractedSpec resolve_semantic_ids(const ExtractedSpec& spec, const SemanticRegistry& registry,
                                   std::vector<Finding>& findings);

struct RenameEntry {
    std::string path;
    std::string from;
    std::string to;

    bool operator==(const RenameEntry&) const = default;
};

ExtractedSpec uniquify_names(const ExtractedSpec& spec, std::vector<RenameEntry>& renames);

struct TransformResult {
    Model model;
    std::vector<Finding> findings;
    std::vector<RenameEntry> renames;
};

// Full pipeline; the resulting model always passes validate_model, otherwise
// Error{TransformFailed} wraps the validation report.
TransformResult build_model(const ExtractedSpec& spec, const SemanticRegistry& registry);

} // namespace smtkit::transform
