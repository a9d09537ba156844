#include "frontend/syntax.hpp"

namespace flowaudit::syntax {

namespace {

class StmtParser {
public:
    StmtParser(const std::vector<Token>& toks, std::size_t end) : toks_(toks), end_(end) {}

    std::vector<Stmt> parse_list(std::size_t& i) {
        std::vector<Stmt> out;
        while (i < end_ && !toks_[i].is("}")) {
            out.push_back(parse_stmt(i));
        }
        return out;
    }

    bool modeled = true;

private:
    const std::vector<Token>& toks_;
    std::size_t end_;

    const Token& at(std::size_t i) const { return toks_[i]; }

    // Advances past one balanced (...) group starting at i (which must be '(').
    // Returns the tokens inside the parens.
    std::vector<Token> balanced_parens(std::size_t& i) {
        std::vector<Token> inner;
        if (i >= end_ || !at(i).is("("))
            return inner;
        int depth = 0;
        std::size_t start = i;
        for (; i < end_; ++i) {
            if (at(i).is("("))
                ++depth;
            else if (at(i).is(")")) {
                --depth;
                if (depth == 0) {
                    ++i;
                    break;
                }
            }
            if (i > start)
                inner.push_back(at(i));
        }
        return inner;
    }

    // Collects tokens up to and including the next ';' at depth 0.
    std::vector<Token> to_semicolon(std::size_t& i) {
        std::vector<Token> out;
        int paren = 0, brace = 0, bracket = 0;
        while (i < end_) {
            const Token& t = at(i);
            if (t.is("("))
                ++paren;
            else if (t.is(")"))
                --paren;
            else if (t.is("{"))
                ++brace;
            else if (t.is("}"))
                --brace;
            else if (t.is("["))
                ++bracket;
            else if (t.is("]"))
                --bracket;
            if (t.is(";") && paren <= 0 && brace <= 0 && bracket <= 0) {
                ++i;
                break;
            }
            out.push_back(t);
            ++i;
        }
        return out;
    }

    Stmt parse_stmt(std::size_t& i) {
        Stmt s;
        const Token& t = at(i);
        s.line = t.line;
        s.column = t.column;

        if (t.is("{")) {
            s.kind = StmtKind::Compound;
            ++i;
            s.children = parse_list(i);
            if (i < end_ && at(i).is("}"))
                ++i;
            return s;
        }
        if (t.is(";")) {
            s.kind = StmtKind::Empty;
            ++i;
            return s;
        }
        if (t.kind == TokKind::Keyword) {
            if (t.text == "if") {
                s.kind = StmtKind::If;
                ++i;
                s.tokens = balanced_parens(i);
                s.children.push_back(parse_stmt(i));
                if (i < end_ && at(i).text == "else" && at(i).kind == TokKind::Keyword) {
                    ++i;
                    s.has_else = true;
                    s.else_children.push_back(parse_stmt(i));
                }
                return s;
            }
            if (t.text == "while") {
                s.kind = StmtKind::While;
                ++i;
                s.tokens = balanced_parens(i);
                s.children.push_back(parse_stmt(i));
                return s;
            }
            if (t.text == "do") {
                s.kind = StmtKind::DoWhile;
                ++i;
                s.children.push_back(parse_stmt(i));
                if (i < end_ && at(i).text == "while") {
                    ++i;
                    s.tokens = balanced_parens(i);
                }
                if (i < end_ && at(i).is(";"))
                    ++i;
                return s;
            }
            if (t.text == "for") {
                s.kind = StmtKind::For;
                ++i;
                s.tokens = balanced_parens(i);
                s.children.push_back(parse_stmt(i));
                return s;
            }
            if (t.text == "switch") {
                s.kind = StmtKind::Switch;
                ++i;
                s.tokens = balanced_parens(i);
                s.children.push_back(parse_stmt(i));
                return s;
            }
            if (t.text == "case" || t.text == "default") {
                s.kind = StmtKind::CaseLabel;
                while (i < end_ && !at(i).is(":")) {
                    s.tokens.push_back(at(i));
                    ++i;
                }
                if (i < end_)
                    ++i; // ':'
                return s;
            }
            if (t.text == "return") {
                s.kind = StmtKind::Return;
                s.tokens = to_semicolon(i);
                return s;
            }
            if (t.text == "break") {
                s.kind = StmtKind::Break;
                s.tokens = to_semicolon(i);
                return s;
            }
            if (t.text == "continue") {
                s.kind = StmtKind::Continue;
                s.tokens = to_semicolon(i);
                return s;
            }
            if (t.text == "goto") {
                s.kind = StmtKind::Goto;
                s.tokens = to_semicolon(i);
                modeled = false;
                return s;
            }
        }
        // label: `ident ':'` not followed by '::'-style constructs
        if (t.kind == TokKind::Ident && i + 1 < end_ && at(i + 1).is(":")) {
            s.kind = StmtKind::Label;
            s.tokens.push_back(t);
            i += 2;
            modeled = false;
            return s;
        }

        s.tokens = to_semicolon(i);
        s.kind = classify_simple(s.tokens);
        return s;
    }

    static StmtKind classify_simple(const std::vector<Token>& tokens) {
        if (tokens.empty())
            return StmtKind::Empty;
        const Token& first = tokens.front();
        if (first.kind == TokKind::Keyword && is_type_keyword(first.text))
            return StmtKind::Decl;
        // `Type name ...` with a user-defined type: two leading identifiers,
        // or `Type *name`
        if (first.kind == TokKind::Ident && tokens.size() >= 2) {
            const Token& second = tokens[1];
            if (second.kind == TokKind::Ident)
                return StmtKind::Decl;
            if (second.is("*") && tokens.size() >= 3 &&
                (tokens[2].kind == TokKind::Ident || tokens[2].is("*")))
                return StmtKind::Decl;
        }
        return StmtKind::Expr;
    }
};

} // namespace

BodyParse parse_body(const std::vector<Token>& toks, std::size_t begin, std::size_t end) {
    BodyParse out;
    StmtParser parser(toks, end);
    std::size_t i = begin;
    out.stmts = parser.parse_list(i);
    out.modeled = parser.modeled;
    return out;
}

std::optional<Assignment> assignment_of(const Stmt& stmt) {
    if (stmt.kind != StmtKind::Expr && stmt.kind != StmtKind::Decl && stmt.kind != StmtKind::Return)
        return std::nullopt;
    const auto& toks = stmt.tokens;
    int paren = 0, bracket = 0, brace = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const Token& t = toks[i];
        if (t.is("("))
            ++paren;
        else if (t.is(")"))
            --paren;
        else if (t.is("["))
            ++bracket;
        else if (t.is("]"))
            --bracket;
        else if (t.is("{"))
            ++brace;
        else if (t.is("}"))
            --brace;
        if (!t.is("=") || paren != 0 || bracket != 0 || brace != 0)
            continue;

        // walk left over balanced groups to the assigned name
        std::size_t j = i;
        while (j > 0) {
            const Token& prev = toks[j - 1];
            if (prev.is("]") || prev.is(")")) {
                const std::string open = prev.is("]") ? "[" : "(";
                const std::string close = prev.text;
                int depth = 0;
                while (j > 0) {
                    --j;
                    if (toks[j].text == close)
                        ++depth;
                    else if (toks[j].text == open) {
                        --depth;
                        if (depth == 0)
                            break;
                    }
                }
                continue;
            }
            break;
        }
        if (j == 0)
            return std::nullopt;
        const Token& name = toks[j - 1];
        if (name.kind != TokKind::Ident)
            return std::nullopt;
        Assignment a;
        a.target = name.text;
        a.target_line = name.line;
        a.target_column = name.column;
        a.rhs.assign(toks.begin() + static_cast<long>(i) + 1, toks.end());
        return a;
    }
    return std::nullopt;
}

void walk_statements(const std::vector<Stmt>& stmts, const std::function<void(const Stmt&)>& fn) {
    for (const auto& s : stmts) {
        fn(s);
        walk_statements(s.children, fn);
        walk_statements(s.else_children, fn);
    }
}

} // namespace flowaudit::syntax
