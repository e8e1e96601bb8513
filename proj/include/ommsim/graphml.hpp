#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ommsim/errors.hpp"
#include "ommsim/graph.hpp"

namespace ommsim {

namespace graphml_detail {

struct Attr {
    std::string name;
    std::string value;
};

struct Element {
    std::string name;
    std::vector<Attr> attrs;
    bool self_closing = false;
    bool closing = false; // </name>
    int line = 0;
};

// Minimal XML scanner for the GraphML dialect used here: elements,
// attributes, comments and processing instructions. Text content between
// tags is ignored. Tracks line numbers for error reporting.
class Scanner {
public:
    explicit Scanner(std::istream& in) : in_(in) {}

    int line() const { return line_; }

    // Returns false at end of input.
    bool next(Element& out) {
        for (;;) {
            if (!skip_until_tag()) return false;
            int tag_line = line_;
            expect('<');
            if (peek() == '?') {
                skip_past("?>");
                continue;
            }
            if (peek() == '!') {
                // comment or doctype
                get();
                if (peek() == '-') {
                    skip_past("-->");
                } else {
                    skip_past(">");
                }
                continue;
            }
            out = Element{};
            out.line = tag_line;
            if (peek() == '/') {
                get();
                out.closing = true;
            }
            out.name = read_name();
            if (out.name.empty()) {
                throw ParseError("line " + std::to_string(tag_line) + ": expected element name");
            }
            skip_ws();
            while (peek() != '>' && peek() != '/' && peek() != EOF) {
                Attr a;
                a.name = read_name();
                if (a.name.empty()) {
                    throw ParseError("line " + std::to_string(line_) + ": bad attribute in <" +
                                     out.name + ">");
                }
                skip_ws();
                expect('=');
                skip_ws();
                int quote = get();
                if (quote != '"' && quote != '\'') {
                    throw ParseError("line " + std::to_string(line_) +
                                     ": attribute value must be quoted in <" + out.name + ">");
                }
                for (;;) {
                    int c = get();
                    if (c == EOF) {
                        throw ParseError("line " + std::to_string(line_) +
                                         ": unterminated attribute value in <" + out.name + ">");
                    }
                    if (c == quote) break;
                    a.value.push_back(static_cast<char>(c));
                }
                out.attrs.push_back(std::move(a));
                skip_ws();
            }
            if (peek() == '/') {
                get();
                out.self_closing = true;
            }
            if (get() != '>') {
                throw ParseError("line " + std::to_string(line_) + ": unterminated tag <" +
                                 out.name + ">");
            }
            return true;
        }
    }

private:
    int peek() {
        int c = in_.peek();
        return c;
    }

    int get() {
        int c = in_.get();
        if (c == '\n') ++line_;
        return c;
    }

    void expect(char c) {
        int got = get();
        if (got != c) {
            throw ParseError("line " + std::to_string(line_) + ": expected '" + c + "'");
        }
    }

    void skip_ws() {
        while (std::isspace(peek())) get();
    }

    bool skip_until_tag() {
        for (;;) {
            int c = peek();
            if (c == EOF) return false;
            if (c == '<') return true;
            get();
        }
    }

    void skip_past(const std::string& delim) {
        std::size_t matched = 0;
        for (;;) {
            int c = get();
            if (c == EOF) {
                throw ParseError("line " + std::to_string(line_) + ": unterminated markup");
            }
            if (static_cast<char>(c) == delim[matched]) {
                if (++matched == delim.size()) return;
            } else {
                matched = (static_cast<char>(c) == delim[0]) ? 1 : 0;
            }
        }
    }

    std::string read_name() {
        std::string name;
        for (;;) {
            int c = peek();
            if (c == EOF) break;
            char ch = static_cast<char>(c);
            if (std::isalnum(c) || ch == '_' || ch == '-' || ch == ':' || ch == '.') {
                name.push_back(ch);
                get();
            } else {
                break;
            }
        }
        return name;
    }

    std::istream& in_;
    int line_ = 1;
};

inline const std::string* find_attr(const Element& el, const std::string& name) {
    for (const auto& a : el.attrs) {
        if (a.name == name) return &a.value;
    }
    return nullptr;
}

inline double parse_double(const Element& el, const std::string& attr, const std::string& value) {
    double result = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), result);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw SchemaError("line " + std::to_string(el.line) + ": <" + el.name + "> attribute " +
                          attr + " is not a number: \"" + value + "\"");
    }
    return result;
}

inline NodeId parse_node_id(const Element& el, const std::string& attr, const std::string& value) {
    unsigned long long result = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), result);
    if (ec != std::errc{} || ptr != value.data() + value.size() ||
        result > std::numeric_limits<NodeId>::max()) {
        throw SchemaError("line " + std::to_string(el.line) + ": <" + el.name + "> attribute " +
                          attr + " is not a valid node id: \"" + value + "\"");
    }
    return static_cast<NodeId>(result);
}

inline std::string require_attr(const Element& el, const std::string& name) {
    const std::string* v = find_attr(el, name);
    if (!v) {
        throw SchemaError("line " + std::to_string(el.line) + ": <" + el.name +
                          "> missing attribute " + name);
    }
    return *v;
}

// %.17g round-trips doubles exactly and prints short forms for short values.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace graphml_detail

/// Parses the GraphML dialect where <node> carries id/x/y attributes and
/// <edge> carries source/target/weight attributes. Unknown elements are
/// skipped so conventional <key>/<data> wrappers do not break loading.
inline RoadNetwork load_network(std::istream& in) {
    using namespace graphml_detail;
    Scanner scanner(in);
    Element el;
    std::vector<RoadNetwork::NodeInfo> nodes;
    std::vector<RoadNetwork::EdgeInfo> edges;
    std::vector<int> edge_lines;
    std::set<NodeId> declared;
    bool seen_graph = false;

    while (scanner.next(el)) {
        if (el.closing) continue;
        if (el.name == "graph") {
            seen_graph = true;
        } else if (el.name == "node") {
            NodeId id = parse_node_id(el, "id", require_attr(el, "id"));
            double x = parse_double(el, "x", require_attr(el, "x"));
            double y = parse_double(el, "y", require_attr(el, "y"));
            if (declared.count(id)) {
                throw SchemaError("line " + std::to_string(el.line) + ": duplicate node id " +
                                  std::to_string(id));
            }
            declared.insert(id);
            nodes.push_back({id, x, y});
        } else if (el.name == "edge") {
            NodeId from = parse_node_id(el, "source", require_attr(el, "source"));
            NodeId to = parse_node_id(el, "target", require_attr(el, "target"));
            double w = parse_double(el, "weight", require_attr(el, "weight"));
            edges.push_back({from, to, w});
            edge_lines.push_back(el.line);
        }
    }
    if (!seen_graph) {
        throw ParseError("no <graph> element found");
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        if (!declared.count(e.from) || !declared.count(e.to)) {
            NodeId missing = declared.count(e.from) ? e.to : e.from;
            throw SchemaError("line " + std::to_string(edge_lines[i]) +
                              ": <edge> references undeclared node " + std::to_string(missing));
        }
        if (!(e.weight > 0.0)) {
            throw ValidationError("line " + std::to_string(edge_lines[i]) +
                                  ": <edge> weight must be positive, got " +
                                  format_double(e.weight));
        }
        if (e.from == e.to) {
            throw ValidationError("line " + std::to_string(edge_lines[i]) + ": self-loop edge at " +
                                  std::to_string(e.from));
        }
    }
    return RoadNetwork(std::move(nodes), edges);
}

inline RoadNetwork load_network_from_string(const std::string& text) {
    std::istringstream in(text);
    return load_network(in);
}

/// Byte-deterministic export: nodes sorted by id, edges by (source, target).
inline void save_network(const RoadNetwork& net, std::ostream& out) {
    using graphml_detail::format_double;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<graphml>\n";
    out << "  <graph edgedefault=\"directed\">\n";
    for (const auto& n : net.nodes()) {
        out << "    <node id=\"" << n.id << "\" x=\"" << format_double(n.x) << "\" y=\""
            << format_double(n.y) << "\"/>\n";
    }
    for (const auto& e : net.edges()) {
        out << "    <edge source=\"" << e.from << "\" target=\"" << e.to << "\" weight=\""
            << format_double(e.weight) << "\"/>\n";
    }
    out << "  </graph>\n";
    out << "</graphml>\n";
}

inline std::string save_network_to_string(const RoadNetwork& net) {
    std::ostringstream out;
    save_network(net, out);
    return out.str();
}

} // namespace ommsim
