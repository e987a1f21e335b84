#include "gna/opnet.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "gna/errors.hpp"
#include "gna/serialize.hpp"

namespace gna {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_cells(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

// Comma-separated name list; "-" (or an empty cell) means the empty list.
std::vector<std::string> split_name_list(const std::string& cell,
                                         const std::string& what) {
    if (cell.empty() || cell == "-") return {};
    std::vector<std::string> out;
    for (const auto& item : split_cells(cell, ',')) {
        if (item.empty())
            throw ParseError("empty " + what + " in list '" + cell + "'");
        out.push_back(item);
    }
    return out;
}

long long parse_int_cell(const std::string& cell, const std::string& what) {
    long long v = 0;
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw ParseError("bad " + what + " '" + cell + "'");
    return v;
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (std::isspace(static_cast<unsigned char>(c)) || c == '\'' ||
            c == '"' || c == ',' || c == ';')
            return false;
    return true;
}

const std::array<const char*, 5> kAgentClasses = {
    "sensor", "router", "actor", "database", "controller"};

bool valid_agent_class(const std::string& s) {
    return std::find(kAgentClasses.begin(), kAgentClasses.end(), s) !=
           kAgentClasses.end();
}

// ---------------------------------------------------------------------------
// Condition expressions
// ---------------------------------------------------------------------------

using MaybeValue = std::optional<OpValue>;

struct Operand {
    enum class Kind { literal, source_var, dest_var };
    Kind kind = Kind::literal;
    OpValue literal;
    std::string var;

    MaybeValue fetch(const OpAgent& source, const OpAgent& dest) const {
        const OpAgent* owner = nullptr;
        switch (kind) {
        case Kind::literal: return literal;
        case Kind::source_var: owner = &source; break;
        case Kind::dest_var: owner = &dest; break;
        }
        auto it = owner->knowledge.find(var);
        if (it == owner->knowledge.end()) return std::nullopt;
        return it->second;
    }
};

bool truthy(const MaybeValue& v) {
    if (!v) return false;
    struct Visitor {
        bool operator()(bool b) const { return b; }
        bool operator()(double d) const { return d != 0.0; }
        bool operator()(const std::string& s) const { return !s.empty(); }
    };
    return std::visit(Visitor{}, *v);
}

enum class CmpOp { eq, ne, lt, le, gt, ge };

template <typename T>
bool apply_cmp(const T& a, const T& b, CmpOp op) {
    switch (op) {
    case CmpOp::eq: return a == b;
    case CmpOp::ne: return a != b;
    case CmpOp::lt: return a < b;
    case CmpOp::le: return a <= b;
    case CmpOp::gt: return a > b;
    case CmpOp::ge: return a >= b;
    }
    return false;
}

// Missing operands and mixed-type comparisons are false; booleans support
// equality only.
bool compare_values(const MaybeValue& a, const MaybeValue& b, CmpOp op) {
    if (!a || !b) return false;
    if (a->index() != b->index()) return false;
    if (std::holds_alternative<bool>(*a)) {
        if (op != CmpOp::eq && op != CmpOp::ne) return false;
        return apply_cmp(std::get<bool>(*a), std::get<bool>(*b), op);
    }
    if (std::holds_alternative<double>(*a))
        return apply_cmp(std::get<double>(*a), std::get<double>(*b), op);
    return apply_cmp(std::get<std::string>(*a), std::get<std::string>(*b), op);
}

class TrueCond : public OpCondition {
public:
    bool evaluate(const OpAgent&, const OpAgent&) const override { return true; }
};

class TruthCond : public OpCondition {
public:
    explicit TruthCond(Operand o) : operand_(std::move(o)) {}
    bool evaluate(const OpAgent& s, const OpAgent& d) const override {
        return truthy(operand_.fetch(s, d));
    }

private:
    Operand operand_;
};

class CmpCond : public OpCondition {
public:
    CmpCond(Operand a, CmpOp op, Operand b)
        : a_(std::move(a)), b_(std::move(b)), op_(op) {}
    bool evaluate(const OpAgent& s, const OpAgent& d) const override {
        return compare_values(a_.fetch(s, d), b_.fetch(s, d), op_);
    }

private:
    Operand a_;
    Operand b_;
    CmpOp op_;
};

using CondPtr = std::shared_ptr<const OpCondition>;

class NotCond : public OpCondition {
public:
    explicit NotCond(CondPtr inner) : inner_(std::move(inner)) {}
    bool evaluate(const OpAgent& s, const OpAgent& d) const override {
        return !inner_->evaluate(s, d);
    }

private:
    CondPtr inner_;
};

class AndCond : public OpCondition {
public:
    AndCond(CondPtr a, CondPtr b) : a_(std::move(a)), b_(std::move(b)) {}
    bool evaluate(const OpAgent& s, const OpAgent& d) const override {
        return a_->evaluate(s, d) && b_->evaluate(s, d);
    }

private:
    CondPtr a_;
    CondPtr b_;
};

class OrCond : public OpCondition {
public:
    OrCond(CondPtr a, CondPtr b) : a_(std::move(a)), b_(std::move(b)) {}
    bool evaluate(const OpAgent& s, const OpAgent& d) const override {
        return a_->evaluate(s, d) || b_->evaluate(s, d);
    }

private:
    CondPtr a_;
    CondPtr b_;
};

struct Token {
    enum class Kind {
        word,    // identifier (text)
        number,  // numeric literal (num)
        str,     // quoted string literal (text)
        lparen,
        rparen,
        cmp,      // comparison operator (op)
        kw_and,
        kw_or,
        kw_not,
        end,
    };
    Kind kind = Kind::end;
    std::string text;
    double num = 0.0;
    CmpOp op = CmpOp::eq;
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::vector<Token> lex_condition(const std::string& text) {
    std::vector<Token> toks;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (c == ' ' || c == '\t') {
            ++i;
            continue;
        }
        if (c == '(') {
            toks.push_back({Token::Kind::lparen, "(", 0.0, CmpOp::eq});
            ++i;
            continue;
        }
        if (c == ')') {
            toks.push_back({Token::Kind::rparen, ")", 0.0, CmpOp::eq});
            ++i;
            continue;
        }
        auto two = [&](char a, char b) {
            return c == a && i + 1 < n && text[i + 1] == b;
        };
        if (two('=', '=')) { toks.push_back({Token::Kind::cmp, "==", 0.0, CmpOp::eq}); i += 2; continue; }
        if (two('!', '=')) { toks.push_back({Token::Kind::cmp, "!=", 0.0, CmpOp::ne}); i += 2; continue; }
        if (two('<', '=')) { toks.push_back({Token::Kind::cmp, "<=", 0.0, CmpOp::le}); i += 2; continue; }
        if (two('>', '=')) { toks.push_back({Token::Kind::cmp, ">=", 0.0, CmpOp::ge}); i += 2; continue; }
        if (two('&', '&')) { toks.push_back({Token::Kind::kw_and, "&&", 0.0, CmpOp::eq}); i += 2; continue; }
        if (two('|', '|')) { toks.push_back({Token::Kind::kw_or, "||", 0.0, CmpOp::eq}); i += 2; continue; }
        if (c == '<') { toks.push_back({Token::Kind::cmp, "<", 0.0, CmpOp::lt}); ++i; continue; }
        if (c == '>') { toks.push_back({Token::Kind::cmp, ">", 0.0, CmpOp::gt}); ++i; continue; }
        if (c == '!') { toks.push_back({Token::Kind::kw_not, "!", 0.0, CmpOp::eq}); ++i; continue; }
        if (c == '\'' || c == '"') {
            char quote = c;
            std::size_t end = text.find(quote, i + 1);
            if (end == std::string::npos)
                throw ConfigError("unterminated string in condition '" + text + "'");
            std::string body = text.substr(i + 1, end - i - 1);
            if (body.find(';') != std::string::npos)
                throw ConfigError("';' is not allowed in condition strings");
            toks.push_back({Token::Kind::str, body, 0.0, CmpOp::eq});
            i = end + 1;
            continue;
        }
        bool starts_number =
            std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '-' || c == '.') && i + 1 < n &&
             std::isdigit(static_cast<unsigned char>(text[i + 1])));
        if (starts_number) {
            std::size_t j = i + 1;
            while (j < n) {
                char d = text[j];
                bool exp_sign = (d == '+' || d == '-') &&
                                (text[j - 1] == 'e' || text[j - 1] == 'E');
                if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' ||
                    d == 'e' || d == 'E' || exp_sign) {
                    ++j;
                } else {
                    break;
                }
            }
            std::string cell = text.substr(i, j - i);
            double v = 0.0;
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
                throw ConfigError("bad number '" + cell + "' in condition");
            toks.push_back({Token::Kind::number, cell, v, CmpOp::eq});
            i = j;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i + 1;
            while (j < n && ident_char(text[j])) ++j;
            std::string word = text.substr(i, j - i);
            if (word == "and")
                toks.push_back({Token::Kind::kw_and, word, 0.0, CmpOp::eq});
            else if (word == "or")
                toks.push_back({Token::Kind::kw_or, word, 0.0, CmpOp::eq});
            else if (word == "not")
                toks.push_back({Token::Kind::kw_not, word, 0.0, CmpOp::eq});
            else
                toks.push_back({Token::Kind::word, word, 0.0, CmpOp::eq});
            i = j;
            continue;
        }
        throw ConfigError(std::string("unexpected character '") + c +
                          "' in condition '" + text + "'");
    }
    toks.push_back({Token::Kind::end, "", 0.0, CmpOp::eq});
    return toks;
}

class CondParser {
public:
    explicit CondParser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    CondPtr parse() {
        CondPtr expr = parse_or();
        if (peek().kind != Token::Kind::end)
            throw ConfigError("unexpected '" + peek().text +
                              "' after condition expression");
        return expr;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }

    CondPtr parse_or() {
        CondPtr a = parse_and();
        while (peek().kind == Token::Kind::kw_or) {
            next();
            a = std::make_shared<OrCond>(a, parse_and());
        }
        return a;
    }

    CondPtr parse_and() {
        CondPtr a = parse_factor();
        while (peek().kind == Token::Kind::kw_and) {
            next();
            a = std::make_shared<AndCond>(a, parse_factor());
        }
        return a;
    }

    CondPtr parse_factor() {
        if (peek().kind == Token::Kind::kw_not) {
            next();
            return std::make_shared<NotCond>(parse_factor());
        }
        if (peek().kind == Token::Kind::lparen) {
            next();
            CondPtr e = parse_or();
            if (peek().kind != Token::Kind::rparen)
                throw ConfigError("missing ')' in condition");
            next();
            return e;
        }
        Operand a = parse_operand();
        if (peek().kind == Token::Kind::cmp) {
            CmpOp op = next().op;
            Operand b = parse_operand();
            return std::make_shared<CmpCond>(std::move(a), op, std::move(b));
        }
        return std::make_shared<TruthCond>(std::move(a));
    }

    Operand parse_operand() {
        const Token& t = next();
        Operand o;
        switch (t.kind) {
        case Token::Kind::number:
            o.kind = Operand::Kind::literal;
            o.literal = t.num;
            return o;
        case Token::Kind::str:
            o.kind = Operand::Kind::literal;
            o.literal = t.text;
            return o;
        case Token::Kind::word:
            if (t.text == "true" || t.text == "false") {
                o.kind = Operand::Kind::literal;
                o.literal = (t.text == "true");
                return o;
            }
            if (t.text.rfind("src.", 0) == 0) {
                o.kind = Operand::Kind::source_var;
                o.var = t.text.substr(4);
            } else if (t.text.rfind("dst.", 0) == 0) {
                o.kind = Operand::Kind::dest_var;
                o.var = t.text.substr(4);
            } else {
                o.kind = Operand::Kind::source_var;
                o.var = t.text;
            }
            if (o.var.empty())
                throw ConfigError("empty variable name in condition");
            return o;
        default:
            throw ConfigError("expected a value in condition, found '" +
                              t.text + "'");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// Validation shared by parse_scenario and OpState, so hand-assembled
// scenarios get the same checks as parsed ones.  Compiles any conditions
// that are still null from their source text.
void validate_scenario(OpScenario& sc) {
    if (sc.heterotype_prefix < 1)
        throw ConfigError("heterotype prefix must be at least 1");
    std::set<std::string> ids;
    for (const auto& agent : sc.agents) {
        if (!valid_name(agent.id))
            throw ConfigError("bad agent id '" + agent.id + "'");
        if (!ids.insert(agent.id).second)
            throw ConfigError("duplicate agent id '" + agent.id + "'");
        if (agent.attributes.empty() || !valid_agent_class(agent.attributes[0]))
            throw ConfigError(
                "agent '" + agent.id +
                "': first attribute must be the class (sensor, router, "
                "actor, database or controller)");
        if (agent.attributes.size() < sc.heterotype_prefix)
            throw ConfigError("agent '" + agent.id + "' has " +
                              std::to_string(agent.attributes.size()) +
                              " attributes but the heterotype prefix needs " +
                              std::to_string(sc.heterotype_prefix));
        for (const auto& attr : agent.attributes)
            if (attr.empty())
                throw ConfigError("agent '" + agent.id + "' has an empty attribute");
        for (const auto& [var, value] : agent.knowledge) {
            if (!valid_name(var))
                throw ConfigError("agent '" + agent.id +
                                  "': bad knowledge variable '" + var + "'");
            (void)value;
        }
    }
    for (std::size_t i = 0; i < sc.events.size(); ++i) {
        OpEvent& ev = sc.events[i];
        const std::string where = "event " + std::to_string(i);
        if (!ids.count(ev.source))
            throw ConfigError(where + ": unknown source agent '" + ev.source + "'");
        if (!ids.count(ev.dest))
            throw ConfigError(where + ": unknown destination agent '" + ev.dest + "'");
        if (ev.source == ev.dest)
            throw ConfigError(where + ": source and destination must differ");
        if (ev.duration < 1)
            throw ConfigError(where + ": duration must be at least 1");
        if (ev.variation < 0)
            throw ConfigError(where + ": duration variation must be >= 0");
        for (const auto& var : ev.knowledge_required)
            if (!valid_name(var))
                throw ConfigError(where + ": bad required variable '" + var + "'");
        for (const auto& var : ev.knowledge_transferred)
            if (!valid_name(var))
                throw ConfigError(where + ": bad transferred variable '" + var + "'");
        if (!ev.condition) ev.condition = compile_condition(ev.condition_text);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Values and agents
// ---------------------------------------------------------------------------

std::string op_value_to_string(const OpValue& value) {
    struct Visitor {
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(";'\"\n") != std::string::npos)
                throw ConfigError("string value '" + s +
                                  "' contains a character that cannot be "
                                  "serialized (';', quote or newline)");
            return "'" + s + "'";
        }
    };
    return std::visit(Visitor{}, value);
}

OpValue op_value_from_string(const std::string& text) {
    std::string t = trim(text);
    if (t.size() >= 2 && ((t.front() == '\'' && t.back() == '\'') ||
                          (t.front() == '"' && t.back() == '"')))
        return t.substr(1, t.size() - 2);
    if (t == "true") return true;
    if (t == "false") return false;
    double d = 0.0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), d);
    if (res.ec == std::errc() && res.ptr == t.data() + t.size()) return d;
    return t;
}

std::string OpAgent::heterotype(std::size_t prefix_len) const {
    if (prefix_len < 1 || prefix_len > attributes.size())
        throw DomainError("heterotype prefix " + std::to_string(prefix_len) +
                          " out of range for agent '" + id + "' with " +
                          std::to_string(attributes.size()) + " attributes");
    std::string key = attributes[0];
    for (std::size_t i = 1; i < prefix_len; ++i) key += "/" + attributes[i];
    return key;
}

std::string to_string(OpLinkType type) {
    switch (type) {
    case OpLinkType::request: return "request";
    case OpLinkType::flow: return "flow";
    case OpLinkType::task: return "task";
    }
    return "flow";
}

OpLinkType op_link_type_from_string(const std::string& text) {
    if (text == "request") return OpLinkType::request;
    if (text == "flow") return OpLinkType::flow;
    if (text == "task") return OpLinkType::task;
    throw ConfigError("unknown link type '" + text +
                      "' (expected request, flow or task)");
}

std::shared_ptr<const OpCondition> compile_condition(const std::string& text) {
    std::string t = trim(text);
    if (t.empty() || t == "-") return std::make_shared<TrueCond>();
    return CondParser(lex_condition(t)).parse();
}

// ---------------------------------------------------------------------------
// Scenario parsing and serialization
// ---------------------------------------------------------------------------

const OpAgent* OpScenario::find_agent(const std::string& id) const {
    for (const auto& agent : agents)
        if (agent.id == id) return &agent;
    return nullptr;
}

OpScenario parse_scenario(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    OpScenario sc;
    std::map<std::string, std::size_t> index;
    bool header_seen = false;
    bool prefix_seen = false;
    int line_no = 0;

    auto at = [&](const std::string& msg) {
        return msg + " (line " + std::to_string(line_no) + ")";
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header_seen) {
            if (t != "opnet-scenario v1")
                throw ParseError(at("expected header 'opnet-scenario v1', found '" + t + "'"));
            header_seen = true;
            continue;
        }
        std::size_t sp = t.find_first_of(" \t");
        std::string tag = sp == std::string::npos ? t : t.substr(0, sp);
        std::string rest = sp == std::string::npos ? "" : trim(t.substr(sp));

        if (tag == "prefix") {
            if (prefix_seen) throw ParseError(at("duplicate prefix record"));
            prefix_seen = true;
            long long p = parse_int_cell(rest, "prefix length");
            if (p < 1) throw ConfigError(at("heterotype prefix must be at least 1"));
            sc.heterotype_prefix = static_cast<std::size_t>(p);
        } else if (tag == "agent") {
            auto cells = split_cells(rest, ';');
            if (cells.size() != 2)
                throw ParseError(at("agent record needs 2 columns (id ; attributes)"));
            OpAgent agent;
            agent.id = cells[0];
            if (!valid_name(agent.id))
                throw ParseError(at("bad agent id '" + agent.id + "'"));
            if (index.count(agent.id))
                throw ConfigError(at("duplicate agent id '" + agent.id + "'"));
            agent.attributes = split_name_list(cells[1], "attribute");
            if (agent.attributes.empty())
                throw ConfigError(at("agent '" + agent.id + "' needs at least a class attribute"));
            if (!valid_agent_class(agent.attributes[0]))
                throw ConfigError(at("agent '" + agent.id + "': unknown class '" +
                                     agent.attributes[0] + "'"));
            index[agent.id] = sc.agents.size();
            sc.agents.push_back(std::move(agent));
        } else if (tag == "know") {
            auto cells = split_cells(rest, ';');
            if (cells.size() != 3)
                throw ParseError(at("know record needs 3 columns (id ; variable ; value)"));
            auto it = index.find(cells[0]);
            if (it == index.end())
                throw ConfigError(at("know record for undeclared agent '" + cells[0] + "'"));
            if (!valid_name(cells[1]))
                throw ParseError(at("bad variable name '" + cells[1] + "'"));
            OpAgent& agent = sc.agents[it->second];
            if (agent.knowledge.count(cells[1]))
                throw ConfigError(at("variable '" + cells[1] +
                                     "' declared twice for agent '" + cells[0] + "'"));
            agent.knowledge.emplace(cells[1], op_value_from_string(cells[2]));
        } else if (tag == "event") {
            auto cells = split_cells(rest, ';');
            if (cells.size() != 8)
                throw ParseError(at(
                    "event record needs 8 columns (condition ; src ; dst ; type ; "
                    "required ; transferred ; duration ; variation)"));
            OpEvent ev;
            ev.condition_text = cells[0].empty() ? "-" : cells[0];
            ev.source = cells[1];
            ev.dest = cells[2];
            if (!index.count(ev.source))
                throw ConfigError(at("event source '" + ev.source + "' is not declared"));
            if (!index.count(ev.dest))
                throw ConfigError(at("event destination '" + ev.dest + "' is not declared"));
            try {
                ev.type = op_link_type_from_string(cells[3]);
                ev.condition = compile_condition(ev.condition_text);
            } catch (const ConfigError& ex) {
                throw ConfigError(at(ex.what()));
            }
            ev.knowledge_required = split_name_list(cells[4], "required variable");
            ev.knowledge_transferred = split_name_list(cells[5], "transferred variable");
            long long dur = parse_int_cell(cells[6], "duration");
            long long var = parse_int_cell(cells[7], "duration variation");
            if (dur < 1) throw ConfigError(at("duration must be at least 1"));
            if (var < 0) throw ConfigError(at("duration variation must be >= 0"));
            ev.duration = static_cast<int>(dur);
            ev.variation = static_cast<int>(var);
            sc.events.push_back(std::move(ev));
        } else {
            throw ParseError(at("unknown record type '" + tag + "'"));
        }
    }
    if (!header_seen)
        throw ParseError("scenario is empty: missing 'opnet-scenario v1' header");
    validate_scenario(sc);
    return sc;
}

OpScenario load_scenario(const std::string& path) {
    return parse_scenario(read_file(path));
}

std::string serialize_scenario(const OpScenario& scenario) {
    std::ostringstream out;
    out << "opnet-scenario v1\n";
    out << "prefix " << scenario.heterotype_prefix << "\n";
    auto join = [](const std::vector<std::string>& items) {
        if (items.empty()) return std::string("-");
        std::string s;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) s += ",";
            s += items[i];
        }
        return s;
    };
    for (const auto& agent : scenario.agents)
        out << "agent " << agent.id << " ; " << join(agent.attributes) << "\n";
    for (const auto& agent : scenario.agents)
        for (const auto& [var, value] : agent.knowledge)
            out << "know " << agent.id << " ; " << var << " ; "
                << op_value_to_string(value) << "\n";
    for (const auto& ev : scenario.events) {
        std::string cond = trim(ev.condition_text);
        out << "event " << (cond.empty() ? "-" : cond) << " ; " << ev.source
            << " ; " << ev.dest << " ; " << to_string(ev.type) << " ; "
            << join(ev.knowledge_required) << " ; "
            << join(ev.knowledge_transferred) << " ; " << ev.duration << " ; "
            << ev.variation << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

OpState::OpState(OpScenario scenario) : scenario_(std::move(scenario)) {
    validate_scenario(scenario_);
    for (const auto& agent : scenario_.agents) agents_.emplace(agent.id, agent);
    fired_.assign(scenario_.events.size(), 0);
}

bool OpState::executable(std::size_t event_index) const {
    if (event_index >= scenario_.events.size())
        throw DomainError("event index " + std::to_string(event_index) +
                          " out of range");
    const OpEvent& ev = scenario_.events[event_index];
    const OpAgent& src = agents_.at(ev.source);
    const OpAgent& dst = agents_.at(ev.dest);
    for (const auto& var : ev.knowledge_required)
        if (!src.knowledge.count(var)) return false;
    return ev.condition->evaluate(src, dst);
}

bool OpState::fired(std::size_t event_index) const {
    if (event_index >= fired_.size())
        throw DomainError("event index " + std::to_string(event_index) +
                          " out of range");
    return fired_[event_index] != 0;
}

void OpState::tick(Rng& rng) {
    // 1. Activate every not-yet-fired executable event.  The randomness
    // source is consulted only when an event carries nonzero variation, so
    // variation-free scenarios evolve identically under every seed.
    for (std::size_t i = 0; i < scenario_.events.size(); ++i) {
        if (fired_[i] || !executable(i)) continue;
        fired_[i] = 1;
        const OpEvent& ev = scenario_.events[i];
        int counter = ev.duration;
        if (ev.variation > 0) {
            counter = static_cast<int>(
                rng.int_in(ev.duration - ev.variation, ev.duration + ev.variation));
            if (counter < 1) counter = 1;
        }
        active_.emplace(i, counter);
    }

    // 2. Decrement every active countdown (including just-activated ones, so
    // a duration-1 event completes within its activation tick).
    for (auto& [idx, counter] : active_) --counter;

    // 3. Commit finished events in event-table order.
    std::vector<std::size_t> done;
    for (const auto& [idx, counter] : active_)
        if (counter <= 0) done.push_back(idx);
    for (std::size_t idx : done) {
        active_.erase(idx);
        const OpEvent& ev = scenario_.events[idx];
        OpAgent& src = agents_.at(ev.source);
        OpAgent& dst = agents_.at(ev.dest);
        op_nodes_.insert(ev.source);
        op_nodes_.insert(ev.dest);
        ++op_links_[OpLinkKey{ev.source, ev.dest, ev.type}];
        OpCompletion comp;
        comp.tick = clock_ + 1;
        comp.event_index = idx;
        switch (ev.type) {
        case OpLinkType::request:
            for (const auto& var : ev.knowledge_transferred)
                if (auto it = dst.knowledge.find(var); it != dst.knowledge.end()) {
                    src.knowledge[var] = it->second;
                    comp.transferred.push_back(var);
                }
            break;
        case OpLinkType::flow:
            for (const auto& var : ev.knowledge_transferred)
                if (auto it = src.knowledge.find(var); it != src.knowledge.end()) {
                    dst.knowledge[var] = it->second;
                    comp.transferred.push_back(var);
                }
            break;
        case OpLinkType::task:
            dst.tasked = true;
            break;
        }
        completions_.push_back(std::move(comp));
    }

    // 4. Advance the clock.
    ++clock_;
}

bool OpState::quiescent() const {
    if (!active_.empty()) return false;
    for (std::size_t i = 0; i < scenario_.events.size(); ++i)
        if (!fired_[i] && executable(i)) return false;
    return true;
}

long long OpState::run_to_quiescence(Rng& rng, long long max_ticks,
                                     bool* hit_cap) {
    long long ticks = 0;
    while (ticks < max_ticks && !quiescent()) {
        tick(rng);
        ++ticks;
    }
    if (hit_cap) *hit_cap = !quiescent();
    return ticks;
}

const OpAgent& OpState::agent(const std::string& id) const {
    auto it = agents_.find(id);
    if (it == agents_.end()) throw DomainError("unknown agent '" + id + "'");
    return it->second;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double network_entropy(const std::vector<std::string>& heterotypes) {
    if (heterotypes.empty())
        throw DomainError("network entropy is undefined for an empty roster");
    std::map<std::string, std::size_t> counts;
    for (const auto& h : heterotypes) ++counts[h];
    const std::size_t k = counts.size();
    if (k == 1) return 0.0;
    const double n = static_cast<double>(heterotypes.size());
    double s = 0.0;
    for (const auto& [key, count] : counts) {
        const double x = static_cast<double>(count) / n;
        s -= x * std::log(x);
    }
    s /= std::log(static_cast<double>(k));
    return std::clamp(s, 0.0, 1.0);
}

double network_entropy(const std::vector<OpAgent>& agents,
                       std::size_t prefix_len) {
    if (agents.empty())
        throw DomainError("network entropy is undefined for an empty roster");
    std::vector<std::string> keys;
    keys.reserve(agents.size());
    for (const auto& agent : agents) keys.push_back(agent.heterotype(prefix_len));
    return network_entropy(keys);
}

SphereOfInfluence sphere_of_influence(const OpState& st,
                                      const std::string& node) {
    const auto& nodes = st.operational_nodes();
    if (!nodes.count(node))
        throw DomainError("node '" + node + "' is not in the operational network");
    SphereOfInfluence sphere;
    sphere.nodes.insert(node);
    for (const auto& [key, weight] : st.operational_links()) {
        (void)weight;
        if (key.src == node) sphere.nodes.insert(key.dst);
        else if (key.dst == node) sphere.nodes.insert(key.src);
    }
    sphere.degree = sphere.nodes.size() - 1;
    for (const auto& [key, weight] : st.operational_links())
        if (sphere.nodes.count(key.src) && sphere.nodes.count(key.dst))
            sphere.links.emplace(key, weight);
    sphere.fraction =
        static_cast<double>(sphere.nodes.size()) / static_cast<double>(nodes.size());
    return sphere;
}

OpMetrics op_metrics(const OpState& st) {
    OpMetrics m;
    const auto& nodes = st.operational_nodes();
    const auto& links = st.operational_links();
    m.node_count = nodes.size();
    m.link_count = links.size();
    if (!links.empty()) {
        long long lo = std::numeric_limits<long long>::max();
        long long hi = 0;
        long long total = 0;
        for (const auto& [key, weight] : links) {
            (void)key;
            lo = std::min(lo, weight);
            hi = std::max(hi, weight);
            total += weight;
        }
        m.min_weight = lo;
        m.max_weight = hi;
        m.avg_weight = static_cast<double>(total) / static_cast<double>(links.size());
    }
    if (!nodes.empty()) {
        std::vector<std::string> keys;
        keys.reserve(nodes.size());
        for (const auto& id : nodes)
            keys.push_back(st.agent(id).heterotype(st.scenario().heterotype_prefix));
        m.heterotype_count = std::set<std::string>(keys.begin(), keys.end()).size();
        m.entropy = network_entropy(keys);
    }
    return m;
}

std::string op_metrics_csv_header() {
    return "tick,nodes,links,max_weight,min_weight,avg_weight,heterotypes,entropy";
}

std::string op_metrics_csv_row(long long clock, const OpMetrics& metrics) {
    std::ostringstream out;
    out << clock << ',' << metrics.node_count << ',' << metrics.link_count << ','
        << metrics.max_weight << ',' << metrics.min_weight << ','
        << format_double(metrics.avg_weight) << ',' << metrics.heterotype_count
        << ',' << format_double(metrics.entropy);
    return out.str();
}

std::string serialize_opstate(const OpState& st) {
    std::ostringstream out;
    out << "opnet-state v1\n";
    out << "clock " << st.clock() << "\n";
    out << "nodes " << st.operational_nodes().size() << "\n";
    for (const auto& id : st.operational_nodes()) out << "node " << id << "\n";
    out << "links " << st.operational_links().size() << "\n";
    for (const auto& [key, weight] : st.operational_links())
        out << "link " << key.src << " ; " << key.dst << " ; "
            << to_string(key.type) << " ; " << weight << "\n";
    out << "agents " << st.agents().size() << "\n";
    for (const auto& [id, agent] : st.agents()) {
        out << "agent " << id << " ; tasked=" << (agent.tasked ? 1 : 0) << "\n";
        for (const auto& [var, value] : agent.knowledge)
            out << "know " << id << " ; " << var << " ; "
                << op_value_to_string(value) << "\n";
    }
    out << "completions " << st.completions().size() << "\n";
    for (const auto& comp : st.completions()) {
        out << "completion " << comp.tick << " ; " << comp.event_index << " ; ";
        if (comp.transferred.empty()) {
            out << "-";
        } else {
            for (std::size_t i = 0; i < comp.transferred.size(); ++i) {
                if (i) out << ",";
                out << comp.transferred[i];
            }
        }
        out << "\n";
    }
    out << "end\n";
    return out.str();
}

}  // namespace gna
