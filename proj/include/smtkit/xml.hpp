#pragma once

// Minimal namespace-aware XML DOM, enough for AAS environment files:
// elements, attributes, text, comments, CDATA, character entities.
// Prefixes are resolved to namespace URIs; matching downstream is on
// (local name, namespace URI) so prefix choice never matters.

#include <optional>
#include <string>
#include <vector>

namespace smtkit::xml {

struct Attribute {
    std::string localName;
    std::string nsUri;
    std::string value;
};

struct Node {
    std::string localName;
    std::string nsUri;
    std::vector<Attribute> attributes;
    std::vector<Node> children;
    std::string text; // concatenated direct character data

    const Node* child(const std::string& local) const;
    std::vector<const Node*> children_named(const std::string& local) const;
    const std::string* attribute(const std::string& local) const;
    std::string trimmed_text() const;
};

// Throws Error{XmlMalformed} with line information on bad input.
Node parse(const std::string& text);

} // namespace smtkit::xml
