#include "frontend/syntax.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace flowaudit::syntax {

namespace {

const std::unordered_set<std::string>& keywords() {
    static const std::unordered_set<std::string> kw = {
        "if", "else", "while", "for", "do", "switch", "case", "default", "return", "break",
        "continue", "goto", "sizeof", "typedef", "extern", "static", "register", "auto",
        "struct", "union", "enum", "const", "volatile", "inline", "restrict", "signed",
        "unsigned", "void", "char", "short", "int", "long", "float", "double", "_Bool",
        "_Complex", "_Atomic", "_Static_assert", "_Alignas", "_Alignof", "_Noreturn",
        "_Thread_local",
    };
    return kw;
}

const std::unordered_set<std::string>& type_keywords() {
    static const std::unordered_set<std::string> kw = {
        "void", "char", "short", "int", "long", "float", "double", "signed", "unsigned",
        "struct", "union", "enum", "const", "volatile", "static", "extern", "register",
        "inline", "restrict", "_Bool", "auto", "typedef",
    };
    return kw;
}

// Longest-first multi-character operators so '==' never lexes as '=' '='.
const std::array<const char*, 19>& long_puncts() {
    static const std::array<const char*, 19> ops = {
        "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=",
        "==", "!=", "&&", "||", "+=", "-=", "*=", "/=", "%=",
    };
    return ops;
}

} // namespace

bool is_keyword(const std::string& text) { return keywords().count(text) > 0; }
bool is_type_keyword(const std::string& text) { return type_keywords().count(text) > 0; }

std::vector<Token> lex(const std::string& text, int first_line) {
    std::vector<Token> out;
    int line = first_line;
    int col = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();

    auto advance = [&](std::size_t count) {
        for (std::size_t k = 0; k < count && i < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };

    auto at_line_start = [&]() {
        std::size_t j = i;
        while (j > 0 && (text[j - 1] == ' ' || text[j - 1] == '\t'))
            --j;
        return j == 0 || text[j - 1] == '\n';
    };

    while (i < n) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            while (i < n && text[i] != '\n')
                advance(1);
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '*') {
            advance(2);
            while (i + 1 < n && !(text[i] == '*' && text[i + 1] == '/'))
                advance(1);
            advance(2);
            continue;
        }
        if (c == '#' && at_line_start()) {
            // skip the directive, honoring backslash continuations
            while (i < n) {
                if (text[i] == '\n') {
                    std::size_t back = i;
                    bool continued = false;
                    while (back > 0) {
                        char p = text[back - 1];
                        if (p == '\\') {
                            continued = true;
                            break;
                        }
                        if (p == ' ' || p == '\t' || p == '\r') {
                            --back;
                            continue;
                        }
                        break;
                    }
                    advance(1);
                    if (!continued)
                        break;
                    continue;
                }
                advance(1);
            }
            continue;
        }

        Token tok;
        tok.line = line;
        tok.column = col;
        tok.offset = i;

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                advance(1);
            tok.text = text.substr(start, i - start);
            tok.kind = is_keyword(tok.text) ? TokKind::Keyword : TokKind::Ident;
            tok.length = i - start;
            out.push_back(std::move(tok));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t start = i;
            while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '.' ||
                             ((text[i] == '+' || text[i] == '-') && i > start &&
                              (text[i - 1] == 'e' || text[i - 1] == 'E' || text[i - 1] == 'p' ||
                               text[i - 1] == 'P'))))
                advance(1);
            tok.text = text.substr(start, i - start);
            tok.kind = TokKind::Number;
            tok.length = i - start;
            out.push_back(std::move(tok));
            continue;
        }
        if (c == '"' || c == '\'') {
            char quote = c;
            std::size_t start = i;
            advance(1);
            while (i < n && text[i] != quote) {
                if (text[i] == '\\' && i + 1 < n)
                    advance(1);
                advance(1);
            }
            advance(1);
            tok.text = text.substr(start, i - start);
            tok.kind = quote == '"' ? TokKind::String : TokKind::CharLit;
            tok.length = i - start;
            out.push_back(std::move(tok));
            continue;
        }

        tok.kind = TokKind::Punct;
        bool matched = false;
        for (const char* op : long_puncts()) {
            std::size_t len = std::char_traits<char>::length(op);
            if (text.compare(i, len, op) == 0) {
                tok.text = op;
                tok.length = len;
                advance(len);
                matched = true;
                break;
            }
        }
        if (!matched) {
            tok.text = std::string(1, c);
            tok.length = 1;
            advance(1);
        }
        out.push_back(std::move(tok));
    }
    return out;
}

bool contains_token(const std::vector<Token>& tokens, const std::string& text) {
    for (const auto& t : tokens)
        if ((t.kind == TokKind::Ident || t.kind == TokKind::Keyword || t.kind == TokKind::Number) &&
            t.text == text)
            return true;
    return false;
}

} // namespace flowaudit::syntax
