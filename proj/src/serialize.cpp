#include "gna/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace gna {

namespace {

// Line-oriented tokenizer with positional diagnostics.
class LineReader {
public:
    explicit LineReader(const std::string& text) : text_(text) {}

    // Next non-empty line split into whitespace tokens; false at end of input.
    bool next(std::vector<std::string>& tokens) {
        tokens.clear();
        while (pos_ < text_.size()) {
            std::size_t eol = text_.find('\n', pos_);
            if (eol == std::string::npos) eol = text_.size();
            std::string line = text_.substr(pos_, eol - pos_);
            pos_ = eol + 1;
            ++line_no_;
            std::istringstream ss(line);
            std::string tok;
            while (ss >> tok) tokens.push_back(tok);
            if (!tokens.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("line " + std::to_string(line_no_) + ": " + msg);
    }

    void expect(const std::vector<std::string>& tokens, std::size_t count,
                const char* head) {
        if (tokens.empty() || tokens[0] != head)
            fail(std::string("expected \"") + head + "\" record, got \"" +
                 (tokens.empty() ? "<eof>" : tokens[0]) + "\"");
        if (tokens.size() != count)
            fail(std::string("record \"") + head + "\" takes " +
                 std::to_string(count - 1) + " fields, got " +
                 std::to_string(tokens.size() - 1));
    }

    std::uint64_t to_u64(const std::string& tok) {
        try {
            std::size_t used = 0;
            std::uint64_t v = std::stoull(tok, &used);
            if (used != tok.size()) fail("trailing characters in number \"" + tok + "\"");
            return v;
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            fail("expected an unsigned integer, got \"" + tok + "\"");
        }
    }

    int line_no() const { return line_no_; }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
    int line_no_ = 0;
};

void append_sub(std::ostringstream& out, const SubGna& sub, const char* prefix) {
    out << prefix << "-nodes " << sub.node_count() << "\n";
    for (const auto& [id, rec] : sub.nodes())
        out << "node " << id << " " << rec.state << "\n";
    out << prefix << "-links " << sub.link_count() << "\n";
    for (const auto& [id, rec] : sub.nodes())
        for (const Link& link : rec.out)
            out << "link " << id << " " << link.dst << " " << link.state << "\n";
}

SubGna parse_sub(LineReader& in, std::vector<std::string>& tokens, const char* prefix,
                 bool with_bridges) {
    SubGna sub;
    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 2, (std::string(prefix) + "-nodes").c_str());
    const std::uint64_t n_nodes = in.to_u64(tokens[1]);
    for (std::uint64_t i = 0; i < n_nodes; ++i) {
        if (!in.next(tokens)) in.fail("unexpected end of input");
        in.expect(tokens, 3, "node");
        sub.add_node(in.to_u64(tokens[1]), tokens[2]);
    }
    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 2, (std::string(prefix) + "-links").c_str());
    const std::uint64_t n_links = in.to_u64(tokens[1]);
    for (std::uint64_t i = 0; i < n_links; ++i) {
        if (!in.next(tokens)) in.fail("unexpected end of input");
        in.expect(tokens, 4, "link");
        sub.add_link(in.to_u64(tokens[1]), in.to_u64(tokens[2]), tokens[3]);
    }
    if (with_bridges) {
        if (!in.next(tokens)) in.fail("unexpected end of input");
        in.expect(tokens, 2, "bridges");
        const std::uint64_t n_bridges = in.to_u64(tokens[1]);
        for (std::uint64_t i = 0; i < n_bridges; ++i) {
            if (!in.next(tokens)) in.fail("unexpected end of input");
            in.expect(tokens, 5, "bridge");
            if (tokens[3] != "out" && tokens[3] != "in")
                in.fail("bridge direction must be \"out\" or \"in\"");
            sub.add_bridge(BridgeLink{in.to_u64(tokens[1]), in.to_u64(tokens[2]),
                                      tokens[3] == "out", tokens[4]});
        }
    }
    return sub;
}

}  // namespace

std::string serialize_snapshot(const GnaConfig& config) {
    std::ostringstream out;
    out << "gna-snapshot v1\n";
    out << "mode " << (config.undirected() ? "undirected" : "directed") << "\n";
    out << "time " << config.time() << "\n";
    out << "next-id " << config.next_id() << "\n";
    out << "nodes " << config.node_count() << "\n";
    for (const auto& [id, rec] : config.nodes())
        out << "node " << id << " " << rec.state << "\n";
    out << "links " << config.link_count() << "\n";
    for (const auto& [id, rec] : config.nodes())
        for (const Link& link : rec.out)
            out << "link " << id << " " << link.dst << " " << link.state << "\n";
    out << "end\n";
    return out.str();
}

namespace {

GnaConfig parse_snapshot_body(LineReader& in, std::vector<std::string>& tokens) {
    in.expect(tokens, 2, "gna-snapshot");
    if (tokens[1] != "v1") in.fail("unsupported snapshot version \"" + tokens[1] + "\"");

    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 2, "mode");
    if (tokens[1] != "directed" && tokens[1] != "undirected")
        in.fail("mode must be \"directed\" or \"undirected\"");
    GnaConfig config(tokens[1] == "undirected");

    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 2, "time");
    config.set_time(in.to_u64(tokens[1]));

    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 2, "next-id");
    const std::uint64_t watermark = in.to_u64(tokens[1]);

    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 2, "nodes");
    const std::uint64_t n_nodes = in.to_u64(tokens[1]);
    for (std::uint64_t i = 0; i < n_nodes; ++i) {
        if (!in.next(tokens)) in.fail("unexpected end of input");
        in.expect(tokens, 3, "node");
        const NodeId id = in.to_u64(tokens[1]);
        if (config.has_node(id)) in.fail("duplicate node id " + tokens[1]);
        config.insert_node(id, tokens[2]);
    }

    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 2, "links");
    const std::uint64_t n_links = in.to_u64(tokens[1]);
    for (std::uint64_t i = 0; i < n_links; ++i) {
        if (!in.next(tokens)) in.fail("unexpected end of input");
        in.expect(tokens, 4, "link");
        const NodeId src = in.to_u64(tokens[1]);
        const NodeId dst = in.to_u64(tokens[2]);
        if (!config.has_node(src) || !config.has_node(dst))
            in.fail("link endpoint not declared in the nodes section");
        config.add_link(src, dst, tokens[3]);
    }

    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 1, "end");

    if (watermark < config.next_id())
        in.fail("next-id watermark is below the highest node id");
    config.raise_next_id(watermark);
    if (config.undirected()) config.validate();
    return config;
}

}  // namespace

GnaConfig parse_snapshot(const std::string& text) {
    LineReader in(text);
    std::vector<std::string> tokens;
    if (!in.next(tokens)) in.fail("empty snapshot");
    return parse_snapshot_body(in, tokens);
}

std::string serialize_event(const RewriteEvent& event) {
    std::ostringstream out;
    out << "begin-event\n";
    append_sub(out, event.old_sub, "old");
    out << "bridges " << event.old_sub.bridges().size() << "\n";
    for (const BridgeLink& b : event.old_sub.bridges())
        out << "bridge " << b.inside << " " << b.outside << " "
            << (b.outgoing ? "out" : "in") << " " << b.state << "\n";
    append_sub(out, event.new_sub, "new");
    out << "corr " << event.correspondence.size() << "\n";
    for (const auto& [from, to] : event.correspondence)
        out << "map " << from << " " << to << "\n";
    out << "end-event\n";
    return out.str();
}

namespace {

RewriteEvent parse_event_body(LineReader& in, std::vector<std::string>& tokens) {
    RewriteEvent event;
    event.old_sub = parse_sub(in, tokens, "old", true);
    event.new_sub = parse_sub(in, tokens, "new", false);

    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 2, "corr");
    const std::uint64_t n_corr = in.to_u64(tokens[1]);
    for (std::uint64_t i = 0; i < n_corr; ++i) {
        if (!in.next(tokens)) in.fail("unexpected end of input");
        in.expect(tokens, 3, "map");
        const NodeId from = in.to_u64(tokens[1]);
        const NodeId to = in.to_u64(tokens[2]);
        if (event.correspondence.count(from)) in.fail("duplicate correspondence source");
        event.correspondence[from] = to;
    }
    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 1, "end-event");
    event.validate();
    return event;
}

}  // namespace

std::string serialize_trajectory(const Trajectory& traj) {
    std::ostringstream out;
    out << "gna-trajectory v1\n";
    out << "quiescent " << (traj.quiescent ? 1 : 0) << "\n";
    out << "events " << traj.events.size() << "\n";
    out << "begin-initial\n";
    out << serialize_snapshot(traj.initial);
    out << "end-initial\n";
    for (const RewriteEvent& event : traj.events) out << serialize_event(event);
    out << "end\n";
    return out.str();
}

Trajectory parse_trajectory(const std::string& text) {
    LineReader in(text);
    std::vector<std::string> tokens;
    if (!in.next(tokens)) in.fail("empty trajectory");
    in.expect(tokens, 2, "gna-trajectory");
    if (tokens[1] != "v1") in.fail("unsupported trajectory version \"" + tokens[1] + "\"");

    Trajectory traj;
    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 2, "quiescent");
    if (tokens[1] != "0" && tokens[1] != "1") in.fail("quiescent flag must be 0 or 1");
    traj.quiescent = tokens[1] == "1";

    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 2, "events");
    const std::uint64_t n_events = in.to_u64(tokens[1]);

    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 1, "begin-initial");
    if (!in.next(tokens)) in.fail("unexpected end of input");
    traj.initial = parse_snapshot_body(in, tokens);
    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 1, "end-initial");

    for (std::uint64_t i = 0; i < n_events; ++i) {
        if (!in.next(tokens)) in.fail("unexpected end of input");
        in.expect(tokens, 1, "begin-event");
        traj.events.push_back(parse_event_body(in, tokens));
    }
    if (!in.next(tokens)) in.fail("unexpected end of input");
    in.expect(tokens, 1, "end");

    traj.final_config = traj.config_at(traj.events.size());
    return traj;
}

// ---- GraphML import shim -----------------------------------------------------

namespace {

// Tiny forgiving XML scanner: yields (tag, attributes, is_close, is_selfclose)
// plus text content between tags.  Enough for GraphML-style documents.
struct XmlTag {
    std::string name;
    std::map<std::string, std::string> attrs;
    bool closing = false;
    bool self_closing = false;
};

class XmlScanner {
public:
    explicit XmlScanner(const std::string& text) : text_(text) {}

    // Advances to the next tag.  Text encountered before it is stored in
    // `leading_text`.  Returns false at end of input.
    bool next(XmlTag& tag, std::string& leading_text) {
        leading_text.clear();
        std::size_t lt = text_.find('<', pos_);
        if (lt == std::string::npos) return false;
        leading_text = text_.substr(pos_, lt - pos_);
        std::size_t gt = text_.find('>', lt);
        if (gt == std::string::npos)
            throw ParseError("graphml: unterminated tag near offset " + std::to_string(lt));
        std::string body = text_.substr(lt + 1, gt - lt - 1);
        pos_ = gt + 1;
        if (!body.empty() && (body[0] == '?' || body[0] == '!')) {
            // declaration or comment: skip
            return next(tag, leading_text);
        }
        tag = XmlTag{};
        if (!body.empty() && body[0] == '/') {
            tag.closing = true;
            body.erase(0, 1);
        }
        if (!body.empty() && body.back() == '/') {
            tag.self_closing = true;
            body.pop_back();
        }
        std::istringstream ss(body);
        ss >> tag.name;
        std::string rest;
        std::getline(ss, rest);
        parse_attrs(rest, tag.attrs);
        return true;
    }

private:
    static void parse_attrs(const std::string& text, std::map<std::string, std::string>& out) {
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
            std::size_t eq = text.find('=', i);
            if (eq == std::string::npos) break;
            std::string key = text.substr(i, eq - i);
            while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back())))
                key.pop_back();
            std::size_t q1 = text.find_first_of("\"'", eq);
            if (q1 == std::string::npos) throw ParseError("graphml: unquoted attribute value");
            char quote = text[q1];
            std::size_t q2 = text.find(quote, q1 + 1);
            if (q2 == std::string::npos) throw ParseError("graphml: unterminated attribute value");
            out[key] = text.substr(q1 + 1, q2 - q1 - 1);
            i = q2 + 1;
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

}  // namespace

GnaConfig import_graphml(const std::string& xml_text, const std::string& state_key,
                         const std::string& fallback) {
    XmlScanner scanner(xml_text);
    XmlTag tag;
    std::string text;

    bool in_graph = false;
    bool directed = true;
    struct EdgeRec { std::string src, dst; };
    std::map<std::string, std::string> node_states;  // original id -> state
    std::vector<EdgeRec> edges;

    std::string current_node;   // non-empty while inside a <node> element
    bool pending_state = false; // inside <data key=state_key> of current_node

    while (scanner.next(tag, text)) {
        // the text preceding </data> is the element payload
        if (pending_state && tag.name == "data" && tag.closing) {
            auto b = text.find_first_not_of(" \t\r\n");
            auto e = text.find_last_not_of(" \t\r\n");
            std::string value = (b == std::string::npos) ? "" : text.substr(b, e - b + 1);
            if (!value.empty()) node_states[current_node] = value;
            pending_state = false;
            continue;
        }
        if (tag.name == "graph" && !tag.closing) {
            if (in_graph) throw ParseError("graphml: nested <graph> elements are not supported");
            in_graph = true;
            auto it = tag.attrs.find("edgedefault");
            directed = (it == tag.attrs.end()) || it->second != "undirected";
        } else if (tag.name == "graph" && tag.closing) {
            break;  // only the first graph is read
        } else if (!in_graph) {
            continue;
        } else if (tag.name == "node") {
            if (tag.closing) {
                current_node.clear();
                pending_state = false;
            } else {
                auto it = tag.attrs.find("id");
                if (it == tag.attrs.end()) throw ParseError("graphml: <node> without id");
                if (node_states.count(it->second))
                    throw ParseError("graphml: duplicate node id \"" + it->second + "\"");
                node_states[it->second] = fallback;
                current_node = tag.self_closing ? "" : it->second;
            }
        } else if (tag.name == "edge" && !tag.closing) {
            auto s = tag.attrs.find("source");
            auto d = tag.attrs.find("target");
            if (s == tag.attrs.end() || d == tag.attrs.end())
                throw ParseError("graphml: <edge> without source/target");
            edges.push_back({s->second, d->second});
        } else if (tag.name == "data" && !tag.closing && !current_node.empty() &&
                   !tag.self_closing) {
            auto k = tag.attrs.find("key");
            pending_state = (k != tag.attrs.end() && k->second == state_key);
        }
    }
    if (!in_graph) throw ParseError("graphml: no <graph> element found");

    GnaConfig config(!directed);
    std::map<std::string, NodeId> ids;
    for (const auto& [orig, state] : node_states)
        ids[orig] = config.add_node(state);
    for (const EdgeRec& e : edges) {
        if (!ids.count(e.src) || !ids.count(e.dst))
            throw ParseError("graphml: edge endpoint \"" + e.src + "\"/\"" + e.dst +
                             "\" is not a declared node");
        config.add_link(ids[e.src], ids[e.dst]);
        if (!directed) config.add_link(ids[e.dst], ids[e.src]);
    }
    return config;
}

// ---- file helpers --------------------------------------------------------------

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open \"" + path + "\" for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open \"" + tmp + "\" for writing");
        out << content;
        if (!out) throw IoError("short write to \"" + tmp + "\"");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename \"" + tmp + "\" to \"" + path + "\": " + ec.message());
}

}  // namespace gna
