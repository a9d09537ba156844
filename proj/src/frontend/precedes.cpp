#include <cctype>

#include "flowaudit/errors.hpp"
#include "flowaudit/frontend.hpp"
#include "frontend/syntax.hpp"

namespace flowaudit {

const char* to_string(Ordering ordering) {
    switch (ordering) {
    case Ordering::MustPrecede: return "must_precede";
    case Ordering::MayPrecede: return "may_precede";
    case Ordering::CannotPrecede: return "cannot_precede";
    case Ordering::Unknown: return "unknown";
    }
    return "unknown";
}

Ordering statement_precedes(const FunctionRecord& function, const SourceLocation& a,
                            const SourceLocation& b) {
    if (!function.contains_line(a.line))
        throw LocationOutsideFunction(to_string(a) + " not in " + function.name);
    if (!function.contains_line(b.line))
        throw LocationOutsideFunction(to_string(b) + " not in " + function.name);
    if (!function.cfg)
        return Ordering::Unknown;
    if (!function.cfg->modeled())
        return Ordering::Unknown;
    if (a.line == b.line)
        return Ordering::CannotPrecede; // strict ordering; same-line defs are the validator's case

    std::vector<int> na = function.cfg->nodes_at_line(a.line);
    std::vector<int> nb = function.cfg->nodes_at_line(b.line);
    if (na.empty() || nb.empty())
        return Ordering::Unknown; // no statement starts on that line
    na = function.cfg->entry_reachable(na);
    nb = function.cfg->entry_reachable(nb);
    if (na.empty() || nb.empty())
        return Ordering::CannotPrecede; // dead code never executes

    const bool forward = function.cfg->reaches(na, nb);
    if (!forward)
        return Ordering::CannotPrecede;
    const bool backward = function.cfg->reaches(nb, na);
    if (backward)
        return Ordering::MayPrecede; // loop-carried ordering
    if (function.cfg->set_dominates(na, nb))
        return Ordering::MustPrecede;
    return Ordering::MayPrecede; // a branch makes the ordering possible, not mandatory
}

bool is_same_line_definition(const FunctionRecord& function, int line, const std::string& defined,
                             const std::string& used) {
    if (!function.cfg)
        return false;
    const syntax::Stmt* stmt = function.cfg->stmt_at_line(line);
    if (!stmt)
        return false;
    auto assignment = syntax::assignment_of(*stmt);
    if (!assignment || assignment->target != defined)
        return false;
    return syntax::contains_token(assignment->rhs, used);
}

bool is_return_statement_line(const FunctionRecord& function, int line) {
    return function.cfg && function.cfg->is_return_line(line);
}

std::optional<std::string> assignment_target_at_line(const FunctionRecord& function, int line) {
    if (!function.cfg)
        return std::nullopt;
    const syntax::Stmt* stmt = function.cfg->stmt_at_line(line);
    if (!stmt)
        return std::nullopt;
    auto assignment = syntax::assignment_of(*stmt);
    if (!assignment)
        return std::nullopt;
    return assignment->target;
}

bool line_has_token(const FunctionRecord& function, int line, const std::string& token) {
    if (token.empty())
        return false;
    const std::string text = function.line_text(line);
    std::size_t pos = 0;
    auto word_char = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    while ((pos = text.find(token, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !word_char(text[pos - 1]);
        const std::size_t end = pos + token.size();
        const bool right_ok = end >= text.size() || !word_char(text[end]);
        if (left_ok && right_ok)
            return true;
        pos += 1;
    }
    return false;
}

} // namespace flowaudit
