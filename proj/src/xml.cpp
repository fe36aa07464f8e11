#include "smtkit/xml.hpp"

#include <cctype>
#include <map>

#include "smtkit/error.hpp"

namespace smtkit::xml {

const Node* Node::child(const std::string& local) const {
    for (const auto& c : children) {
        if (c.localName == local) return &c;
    }
    return nullptr;
}

std::vector<const Node*> Node::children_named(const std::string& local) const {
    std::vector<const Node*> out;
    for (const auto& c : children) {
        if (c.localName == local) out.push_back(&c);
    }
    return out;
}

const std::string* Node::attribute(const std::string& local) const {
    for (const auto& a : attributes) {
        if (a.localName == local) return &a.value;
    }
    return nullptr;
}

std::string Node::trimmed_text() const {
    size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return text.substr(b, e - b);
}

namespace {

struct NsScope {
    std::map<std::string, std::string> prefixes; // prefix -> uri, "" = default
};

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    Node parse_document() {
        skip_prolog();
        Node root = parse_element();
        skip_misc();
        if (pos_ != text_.size()) fail("content after document element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        size_t line = 1;
        for (size_t i = 0; i < pos_ && i < text_.size(); ++i) {
            if (text_[i] == '\n') ++line;
        }
        throw Error(ErrorCode::XmlMalformed, "line " + std::to_string(line) + ": " + message);
    }

    bool starts_with(const char* s) const {
        return text_.compare(pos_, std::char_traits<char>::length(s), s) == 0;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void skip_until(const char* terminator) {
        const size_t at = text_.find(terminator, pos_);
        if (at == std::string::npos) fail(std::string("missing ") + terminator);
        pos_ = at + std::char_traits<char>::length(terminator);
    }

    void skip_prolog() {
        // UTF-8 BOM
        if (text_.compare(0, 3, "\xEF\xBB\xBF") == 0) pos_ = 3;
        skip_misc();
    }

    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<?")) {
                skip_until("?>");
            } else if (starts_with("<!--")) {
                skip_until("-->");
            } else if (starts_with("<!DOCTYPE")) {
                // allow an internal subset in brackets
                size_t depth = 0;
                while (pos_ < text_.size()) {
                    const char c = text_[pos_++];
                    if (c == '[') ++depth;
                    else if (c == ']' && depth > 0) --depth;
                    else if (c == '>' && depth == 0) break;
                }
            } else {
                return;
            }
        }
    }

    std::string parse_name() {
        const size_t start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
                c == ':' || static_cast<unsigned char>(c) >= 0x80) {
                ++pos_;
            } else {
                break;
            }
        }
        if (pos_ == start) fail("expected a name");
        return text_.substr(start, pos_ - start);
    }

    std::string decode_entities(const std::string& raw) {
        std::string out;
        size_t i = 0;
        while (i < raw.size()) {
            if (raw[i] != '&') {
                out += raw[i++];
                continue;
            }
            const size_t end = raw.find(';', i);
            if (end == std::string::npos) fail("unterminated entity");
            const std::string entity = raw.substr(i + 1, end - i - 1);
            if (entity == "amp") out += '&';
            else if (entity == "lt") out += '<';
            else if (entity == "gt") out += '>';
            else if (entity == "quot") out += '"';
            else if (entity == "apos") out += '\'';
            else if (!entity.empty() && entity[0] == '#') {
                long code = 0;
                try {
                    code = (entity.size() > 1 && (entity[1] == 'x' || entity[1] == 'X'))
                               ? std::stol(entity.substr(2), nullptr, 16)
                               : std::stol(entity.substr(1));
                } catch (const std::exception&) {
                    fail("bad character reference &" + entity + ";");
                }
                append_utf8(out, static_cast<uint32_t>(code));
            } else {
                fail("unknown entity &" + entity + ";");
            }
            i = end + 1;
        }
        return out;
    }

    static void append_utf8(std::string& out, uint32_t cp) {
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    std::string resolve_ns(const std::string& prefix) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            if (auto found = it->prefixes.find(prefix); found != it->prefixes.end()) {
                return found->second;
            }
        }
        return "";
    }

    Node parse_element() {
        if (pos_ >= text_.size() || text_[pos_] != '<') fail("expected element");
        ++pos_;
        const std::string qname = parse_name();

        // attributes, collecting namespace declarations first
        NsScope scope;
        struct PendingAttr {
            std::string qname;
            std::string value;
        };
        std::vector<PendingAttr> pending;
        bool selfClosing = false;
        for (;;) {
            skip_ws();
            if (pos_ >= text_.size()) fail("unterminated start tag");
            if (text_[pos_] == '>') {
                ++pos_;
                break;
            }
            if (starts_with("/>")) {
                pos_ += 2;
                selfClosing = true;
                break;
            }
            const std::string aname = parse_name();
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != '=') fail("expected '=' after attribute");
            ++pos_;
            skip_ws();
            if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\'')) {
                fail("expected quoted attribute value");
            }
            const char quote = text_[pos_++];
            const size_t end = text_.find(quote, pos_);
            if (end == std::string::npos) fail("unterminated attribute value");
            const std::string value = decode_entities(text_.substr(pos_, end - pos_));
            pos_ = end + 1;

            if (aname == "xmlns") {
                scope.prefixes[""] = value;
            } else if (aname.rfind("xmlns:", 0) == 0) {
                scope.prefixes[aname.substr(6)] = value;
            } else {
                pending.push_back({aname, value});
            }
        }
        scopes_.push_back(scope);

        Node node;
        const auto colon = qname.find(':');
        if (colon == std::string::npos) {
            node.localName = qname;
            node.nsUri = resolve_ns("");
        } else {
            node.localName = qname.substr(colon + 1);
            node.nsUri = resolve_ns(qname.substr(0, colon));
        }
        for (const auto& attr : pending) {
            Attribute a;
            const auto acolon = attr.qname.find(':');
            if (acolon == std::string::npos) {
                a.localName = attr.qname;
                a.nsUri = ""; // unprefixed attributes carry no namespace
            } else {
                a.localName = attr.qname.substr(acolon + 1);
                a.nsUri = resolve_ns(attr.qname.substr(0, acolon));
            }
            a.value = attr.value;
            node.attributes.push_back(std::move(a));
        }

        if (!selfClosing) {
            parse_content(node, qname);
        }
        scopes_.pop_back();
        return node;
    }

    void parse_content(Node& node, const std::string& qname) {
        std::string textAccu;
        for (;;) {
            if (pos_ >= text_.size()) fail("unterminated element <" + qname + ">");
            if (text_[pos_] == '<') {
                if (starts_with("<!--")) {
                    skip_until("-->");
                    continue;
                }
                if (starts_with("<![CDATA[")) {
                    pos_ += 9;
                    const size_t end = text_.find("]]>", pos_);
                    if (end == std::string::npos) fail("unterminated CDATA");
                    textAccu += text_.substr(pos_, end - pos_);
                    pos_ = end + 3;
                    continue;
                }
                if (starts_with("<?")) {
                    skip_until("?>");
                    continue;
                }
                if (starts_with("</")) {
                    pos_ += 2;
                    const std::string closing = parse_name();
                    if (closing != qname) {
                        fail("mismatched closing tag </" + closing + "> for <" + qname + ">");
                    }
                    skip_ws();
                    if (pos_ >= text_.size() || text_[pos_] != '>') fail("malformed closing tag");
                    ++pos_;
                    node.text = decode_entities(textAccu);
                    return;
                }
                node.children.push_back(parse_element());
            } else {
                const size_t next = text_.find('<', pos_);
                if (next == std::string::npos) fail("unterminated element <" + qname + ">");
                textAccu += text_.substr(pos_, next - pos_);
                pos_ = next;
            }
        }
    }

    const std::string& text_;
    size_t pos_ = 0;
    std::vector<NsScope> scopes_;
};

} // namespace

Node parse(const std::string& text) {
    Parser parser(text);
    return parser.parse_document();
}

} // namespace smtkit::xml
