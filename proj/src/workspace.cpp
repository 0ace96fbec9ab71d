#include "viewforge/workspace.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace viewforge {

std::string Diagnostic::to_string() const {
    std::string out = std::to_string(line) + ":" + std::to_string(column) + ": " + message;
    if (!hint.empty()) out += " (hint: " + hint + ")";
    return out;
}

namespace {

std::string join_diags(const std::vector<Diagnostic>& d) {
    std::string out;
    for (const auto& x : d) out += (out.empty() ? "" : "\n") + x.to_string();
    return out;
}

}  // namespace

ParseError::ParseError(std::vector<Diagnostic> diags) : InputError(join_diags(diags)), diags_(std::move(diags)) {}

namespace {

template <typename T> const T& find_named(const std::vector<T>& items, const std::string& name, const char* kind) {
    for (const auto& x : items)
        if (x.name == name) return x;
    throw InputError(std::string("no ") + kind + " named '" + name + "'");
}

}  // namespace

const ConjunctiveQuery& Workspace::query(const std::string& name) const { return find_named(queries, name, "query"); }
const ConjunctiveQuery& Workspace::secret(const std::string& name) const { return find_named(secrets, name, "secret"); }
const View& Workspace::view(const std::string& name) const { return find_named(views, name, "view"); }
const DView& Workspace::dview(const std::string& name) const { return find_named(dviews, name, "dview"); }

const DInstance& Workspace::instance(const std::string& name) const {
    for (const auto& [n, d] : instances)
        if (n == name) return d;
    throw InputError("no instance named '" + name + "'");
}

namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
    bool line_start = false;
};

struct SyntaxError {
    int line;
    int column;
    std::string message;
    std::string hint;
};

std::vector<Token> tokenize(std::string_view src, std::vector<Diagnostic>& diags) {
    std::vector<Token> out;
    int line = 1, col = 1;
    bool line_start = true;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
                line_start = true;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        t.line_start = line_start;
        line_start = false;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.text = std::string(src.substr(i, j - i));
            t.kind = std::all_of(t.text.begin(), t.text.end(), [](char x) { return std::isdigit(static_cast<unsigned char>(x)); })
                         ? Tok::Number
                         : Tok::Ident;
            advance(j - i);
        } else if (c == '"') {
            std::string s;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < src.size() && src[j] != '\n') {
                if (src[j] == '\\' && j + 1 < src.size()) {
                    s += src[j + 1];
                    j += 2;
                    continue;
                }
                if (src[j] == '"') {
                    closed = true;
                    ++j;
                    break;
                }
                s += src[j++];
            }
            if (!closed) diags.push_back({t.line, t.column, "unterminated string", "close the constant with \""});
            t.kind = Tok::String;
            t.text = s;
            advance(j - i);
        } else {
            static const char* two[] = {":=", "->", "!="};
            t.kind = Tok::Punct;
            bool matched = false;
            for (const char* p : two) {
                if (src.substr(i, 2) == p) {
                    t.text = p;
                    advance(2);
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                if (std::string_view("{}(),./|@=:*").find(c) == std::string_view::npos) {
                    diags.push_back({line, col, std::string("unexpected character '") + c + "'", ""});
                    advance(1);
                    continue;
                }
                t.text = std::string(1, c);
                advance(1);
            }
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.column = col;
    end.line_start = true;
    out.push_back(end);
    return out;
}

const char* kStatements[] = {"source", "replicate", "query", "secret", "rule", "view", "dview", "instance"};

bool is_statement_start(const Token& t) {
    if (t.kind == Tok::End) return true;
    if (t.kind != Tok::Ident || !t.line_start) return false;
    return std::any_of(std::begin(kStatements), std::end(kStatements), [&](const char* k) { return t.text == k; });
}

class Parser {
  public:
    Parser(std::vector<Token> toks, Workspace& ws, std::vector<Diagnostic>& diags)
        : toks_(std::move(toks)), ws_(ws), diags_(diags) {}

    void run() {
        while (peek().kind != Tok::End) {
            const std::size_t start = pos_;
            try {
                statement();
            } catch (const SyntaxError& e) {
                diags_.push_back({e.line, e.column, e.message, e.hint});
                pos_ = std::max(pos_, start + 1);
                while (!is_statement_start(peek())) ++pos_;
            }
        }
    }

    std::vector<Atom> atoms_only(bool constants) {
        auto atoms = atom_list(constants);
        if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "' after the atoms");
        return atoms;
    }

  private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token& next() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }

    [[noreturn]] void fail(const Token& t, const std::string& msg, const std::string& hint = {}) {
        throw SyntaxError{t.line, t.column, msg, hint};
    }

    bool at(const char* punct) const { return peek().kind == Tok::Punct && peek().text == punct; }
    bool at_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }

    void expect(const char* punct, const std::string& hint = {}) {
        if (!at(punct)) fail(peek(), std::string("expected '") + punct + "' but found '" + describe(peek()) + "'", hint);
        next();
    }

    static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

    std::string ident(const std::string& what) {
        if (peek().kind != Tok::Ident) fail(peek(), "expected " + what + " but found '" + describe(peek()) + "'");
        return next().text;
    }

    std::size_t number() {
        if (peek().kind != Tok::Number) fail(peek(), "expected an arity but found '" + describe(peek()) + "'", "write Rel/2");
        return static_cast<std::size_t>(std::stoul(next().text));
    }

    void statement() {
        const Token& kw = peek();
        if (kw.kind != Tok::Ident) fail(kw, "expected a statement but found '" + describe(kw) + "'",
                                         "statements start with source, replicate, query, secret, rule, view, dview or instance");
        if (kw.text == "source") return source();
        if (kw.text == "replicate") return replicate();
        if (kw.text == "query" || kw.text == "secret") return query();
        if (kw.text == "rule") return rule();
        if (kw.text == "view") return view();
        if (kw.text == "dview") return dview();
        if (kw.text == "instance") return instance();
        fail(kw, "unknown statement '" + kw.text + "'",
             "statements start with source, replicate, query, secret, rule, view, dview or instance");
    }

    std::pair<std::string, std::size_t> rel_decl() {
        std::string name = ident("a relation name");
        expect("/", "write Rel/arity");
        return {name, number()};
    }

    void add_relation(const Token& where, RelationSymbol sym) {
        try {
            ws_.schema.add_relation(std::move(sym));
        } catch (const InputError& e) {
            fail(where, e.what(), "declare each relation once, either in one source or in a replicate line");
        }
    }

    void source() {
        next();
        const Token& at_tok = peek();
        std::string id = ident("a source name");
        if (ws_.schema.has_source(id)) fail(at_tok, "source '" + id + "' is declared twice");
        ws_.schema.add_source(id);
        expect("{");
        while (!at("}")) {
            const Token& rt = peek();
            auto [name, arity] = rel_decl();
            add_relation(rt, RelationSymbol{name, arity, {id}});
            if (!at("}")) expect(",");
        }
        next();
    }

    void replicate() {
        next();
        const Token& rt = peek();
        auto [name, arity] = rel_decl();
        if (!at_word("across")) fail(peek(), "expected 'across'", "replicate T/2 across a, b");
        next();
        std::vector<std::string> sources;
        do {
            const Token& st = peek();
            std::string s = ident("a source name");
            if (!ws_.schema.has_source(s)) fail(st, "unknown source '" + s + "'", "declare the source before replicating into it");
            sources.push_back(s);
        } while (at(",") && (next(), true));
        add_relation(rt, RelationSymbol{name, arity, sources});
    }

    Term term(bool constants) {
        const Token& t = peek();
        if (t.kind == Tok::String) return Term::constant(next().text);
        if (t.kind == Tok::Number) return Term::constant(next().text);
        if (t.kind == Tok::Punct && t.text == "*") {
            next();
            return Term::constant("*");
        }
        if (t.kind == Tok::Ident) return constants ? Term::constant(next().text) : Term::variable(next().text);
        fail(t, "expected a term but found '" + describe(t) + "'");
    }

    Atom atom(bool constants) {
        const Token& rt = peek();
        std::string rel = ident("a relation name");
        const auto* sym = ws_.schema.find(rel);
        if (!sym) fail(rt, "unknown relation '" + rel + "'", "declare it in a source block first");
        expect("(", "write atoms as Rel(x, y)");
        std::vector<Term> args;
        while (!at(")")) {
            args.push_back(term(constants));
            if (!at(")")) expect(",");
        }
        next();
        if (args.size() != sym->arity)
            fail(rt, "relation '" + rel + "' has arity " + std::to_string(sym->arity) + " but " +
                         std::to_string(args.size()) + " arguments were given");
        return Atom{rel, std::move(args)};
    }

    std::vector<Atom> atom_list(bool constants) {
        std::vector<Atom> out{atom(constants)};
        while (at(",")) {
            next();
            out.push_back(atom(constants));
        }
        return out;
    }

    std::vector<Term> head_vars() {
        std::vector<Term> out;
        if (!at("(")) return out;
        next();
        while (!at(")")) {
            out.push_back(Term::variable(ident("a variable")));
            if (!at(")")) expect(",");
        }
        next();
        return out;
    }

    template <typename T> void unique(const std::vector<T>& items, const std::string& name, const Token& where,
                                      const char* kind) {
        for (const auto& x : items)
            if (x.name == name) fail(where, std::string(kind) + " '" + name + "' is defined twice");
    }

    void query() {
        bool secret = next().text == "secret";
        const Token& nt = peek();
        ConjunctiveQuery q;
        q.name = ident("a name");
        unique(secret ? ws_.secrets : ws_.queries, q.name, nt, secret ? "secret" : "query");
        q.free_vars = head_vars();
        expect(":=");
        q.atoms = atom_list(false);
        try {
            q.check();
        } catch (const InputError& e) {
            fail(nt, e.what());
        }
        (secret ? ws_.secrets : ws_.queries).push_back(std::move(q));
    }

    void rule() {
        next();
        const Token& nt = peek();
        ExistentialRule r;
        r.name = ident("a rule name");
        unique(ws_.rules, r.name, nt, "rule");
        expect(":=");
        r.body = atom_list(false);
        expect("->", "separate body and head with ->");
        std::vector<Term> declared;
        if (at_word("exists") && peek(1).kind == Tok::Ident) {
            next();
            do {
                declared.push_back(Term::variable(ident("a variable")));
            } while (at(",") && (next(), true));
            expect(".", "end the exists clause with a dot");
        }
        bool equality = (peek().kind == Tok::Ident || peek().kind == Tok::String || peek().kind == Tok::Number ||
                         (peek().kind == Tok::Punct && peek().text == "*")) &&
                        peek(1).kind == Tok::Punct && peek(1).text == "=";
        if (equality) {
            Term a = term(false);
            next();
            Term b = term(false);
            r.equality = std::make_pair(a, b);
        } else {
            r.head = atom_list(false);
        }
        try {
            r.check();
        } catch (const InputError& e) {
            fail(nt, e.what());
        }
        auto ex = r.existential_vars();
        for (const auto& v : declared)
            if (std::find(ex.begin(), ex.end(), v) == ex.end())
                fail(nt, "variable " + v.name() + " is declared existential but occurs in the body or not in the head");
        ws_.rules.push_back(std::move(r));
    }

    void view() {
        next();
        const Token& nt = peek();
        std::string name = ident("a view name");
        unique(ws_.views, name, nt, "view");
        auto head = head_vars();
        expect("@", "write view V(x) @ source := ...");
        const Token& st = peek();
        std::string source = ident("a source name");
        if (!ws_.schema.has_source(source)) fail(st, "unknown source '" + source + "'");
        expect(":=");
        DisjunctiveQuery dq;
        dq.head = head;
        dq.disjuncts.push_back(atom_list(false));
        while (at("|")) {
            next();
            dq.disjuncts.push_back(atom_list(false));
        }
        if (at_word("where") && !(peek(1).kind == Tok::Punct && peek(1).text == "(")) {
            next();
            do {
                Term a = term(false);
                bool eq;
                if (at("=")) {
                    eq = true;
                } else if (at("!=")) {
                    eq = false;
                } else {
                    fail(peek(), "expected = or !=", "write where x!=y, x=z");
                }
                next();
                Term b = term(false);
                dq.guard.push_back({a, b, eq});
            } while (at(",") && (next(), true));
        }
        View v;
        v.name = name;
        v.source = source;
        bool safe = true;
        auto vars = variables_of(dq.disjuncts[0]);
        for (const auto& h : head)
            if (std::find(vars.begin(), vars.end(), h) == vars.end()) safe = false;
        if (dq.disjuncts.size() == 1 && dq.guard.empty() && safe) {
            v.definition = ConjunctiveQuery{name, head, dq.disjuncts[0]};
        } else {
            v.definition = std::move(dq);
        }
        try {
            check_view(v, ws_.schema);
        } catch (const InputError& e) {
            fail(nt, e.what());
        }
        ws_.views.push_back(std::move(v));
    }

    void dview() {
        next();
        const Token& nt = peek();
        DView d;
        d.name = ident("a dview name");
        unique(ws_.dviews, d.name, nt, "dview");
        expect("{");
        while (!at("}")) {
            const Token& vt = peek();
            std::string v = ident("a view name");
            auto it = std::find_if(ws_.views.begin(), ws_.views.end(), [&](const View& x) { return x.name == v; });
            if (it == ws_.views.end()) fail(vt, "unknown view '" + v + "'", "define the view before the dview");
            d.views.push_back(*it);
            if (!at("}")) expect(",");
        }
        next();
        ws_.dviews.push_back(std::move(d));
    }

    void instance() {
        next();
        const Token& nt = peek();
        std::string name = ident("an instance name");
        for (const auto& [n, d] : ws_.instances)
            if (n == name) fail(nt, "instance '" + name + "' is defined twice");
        expect("{");
        DInstance d;
        while (!at("}")) {
            std::string src;
            if (peek().kind == Tok::Ident && peek(1).kind == Tok::Punct && peek(1).text == ":") {
                const Token& st = peek();
                src = next().text;
                next();
                if (!ws_.schema.has_source(src)) fail(st, "unknown source '" + src + "'");
            }
            const Token& at_tok = peek();
            Atom a = atom(true);
            expect(".", "end each fact with a dot");
            const auto& sym = ws_.schema.at(a.relation);
            if (!src.empty()) {
                if (!sym.in_source(src)) fail(at_tok, "relation '" + a.relation + "' does not belong to source '" + src + "'");
                d.add(src, a);
            } else {
                for (const auto& s : sym.sources) d.add(s, a);
            }
        }
        next();
        ws_.instances.emplace_back(name, std::move(d));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Workspace& ws_;
    std::vector<Diagnostic>& diags_;
};

bool bare(const std::string& s) {
    if (s == "*") return true;
    if (s.empty()) return false;
    bool digits = std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    if (digits) return true;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string fact_text(const std::string& rel, const Tuple& t) {
    std::string out = rel + "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ",";
        const auto& x = t[i];
        if (x.is_constant() && !bare(x.name())) {
            std::string esc;
            for (char c : x.name()) {
                if (c == '"' || c == '\\') esc += '\\';
                esc += c;
            }
            out += "\"" + esc + "\"";
        } else {
            out += x.to_string();
        }
    }
    return out + ").";
}

}  // namespace

ParseResult parse_workspace(std::string_view text) {
    ParseResult out;
    auto toks = tokenize(text, out.diagnostics);
    Parser p(std::move(toks), out.workspace, out.diagnostics);
    p.run();
    std::stable_sort(out.diagnostics.begin(), out.diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.line, a.column) < std::tie(b.line, b.column);
    });
    return out;
}

Workspace load_workspace(std::string_view text) {
    auto r = parse_workspace(text);
    if (!r.ok()) throw ParseError(std::move(r.diagnostics));
    return std::move(r.workspace);
}

Workspace load_workspace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_workspace(buf.str());
}

std::vector<Atom> parse_atoms(std::string_view text, const DSchema& schema) {
    std::vector<Diagnostic> diags;
    auto toks = tokenize(text, diags);
    if (!diags.empty()) throw ParseError(diags);
    Workspace ws;
    ws.schema = schema;
    Parser p(std::move(toks), ws, diags);
    try {
        return p.atoms_only(false);
    } catch (const SyntaxError& e) {
        throw ParseError({{e.line, e.column, e.message, e.hint}});
    }
}

std::string print_workspace(const Workspace& ws) {
    std::ostringstream out;
    for (const auto& s : ws.schema.sources()) {
        out << "source " << s << " {";
        bool first = true;
        for (const auto& r : ws.schema.relations()) {
            if (r.replicated() || r.sources.front() != s) continue;
            out << (first ? " " : ", ") << r.name << "/" << r.arity;
            first = false;
        }
        out << (first ? "}" : " }") << "\n";
    }
    for (const auto& r : ws.schema.replicated()) {
        out << "replicate " << r.name << "/" << r.arity << " across ";
        for (std::size_t i = 0; i < r.sources.size(); ++i) out << (i ? ", " : "") << r.sources[i];
        out << "\n";
    }
    for (const auto& q : ws.queries) out << "query " << q.to_string() << "\n";
    for (const auto& q : ws.secrets) out << "secret " << q.to_string() << "\n";
    for (const auto& r : ws.rules) out << "rule " << r.to_string() << "\n";
    for (const auto& v : ws.views) out << v.to_string() << "\n";
    for (const auto& d : ws.dviews) {
        out << "dview " << d.name << " {";
        for (std::size_t i = 0; i < d.views.size(); ++i) out << (i ? ", " : " ") << d.views[i].name;
        out << (d.views.empty() ? "}" : " }") << "\n";
    }
    for (const auto& [name, d] : ws.instances) {
        out << "instance " << name << " {\n";
        Instance g = d.global();
        for (const auto& [rel, tuples] : g.relations()) {
            const auto* sym = ws.schema.find(rel);
            for (const auto& t : tuples) {
                std::vector<std::string> holders;
                for (const auto& s : sym ? sym->sources : std::vector<std::string>{})
                    if (d.local(s).tuples(rel).count(t)) holders.push_back(s);
                if (sym && holders.size() == sym->sources.size()) {
                    out << "  " << fact_text(rel, t) << "\n";
                } else {
                    for (const auto& s : holders) out << "  " << s << ": " << fact_text(rel, t) << "\n";
                }
            }
        }
        out << "}\n";
    }
    return out.str();
}

}  // namespace viewforge
