#include "flowaudit/bugspec.hpp"

#include <algorithm>
#include <set>

#include "flowaudit/errors.hpp"
#include "frontend/syntax.hpp"

#include "json.hpp"

namespace flowaudit {

using syntax::Stmt;
using syntax::StmtKind;
using syntax::TokKind;
using syntax::Token;

BugTypeSpec default_bug_spec(BugKind kind) {
    BugTypeSpec spec;
    spec.kind = kind;
    spec.null_literals = {"NULL", "nullptr"};
    spec.alloc_apis = {"malloc", "calloc", "realloc", "strdup"};
    spec.dealloc_apis = {"free"};
    switch (kind) {
    case BugKind::NullDereference:
        spec.name = "npd";
        spec.report_rule = ReportRule::ReportIfSinkReached;
        spec.source_description = "a null value assigned to a pointer";
        spec.sink_description = "a dereference of that pointer";
        break;
    case BugKind::MemoryLeak:
        spec.name = "mlk";
        spec.report_rule = ReportRule::ReportIfNoSinkReached;
        spec.source_description = "a pointer receiving newly allocated memory";
        spec.sink_description = "a deallocation call releasing that pointer";
        break;
    case BugKind::UseAfterFree:
        spec.name = "uaf";
        spec.report_rule = ReportRule::ReportIfSinkReached;
        spec.source_description = "a pointer passed to a deallocation call";
        spec.sink_description = "a later dereference or re-deallocation of that pointer";
        break;
    }
    return spec;
}

BugKind parse_bug_kind(const std::string& name) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "npd")
        return BugKind::NullDereference;
    if (lower == "mlk")
        return BugKind::MemoryLeak;
    if (lower == "uaf")
        return BugKind::UseAfterFree;
    throw UnsupportedBugType(name);
}

const char* bug_kind_name(BugKind kind) {
    switch (kind) {
    case BugKind::NullDereference: return "npd";
    case BugKind::MemoryLeak: return "mlk";
    case BugKind::UseAfterFree: return "uaf";
    }
    return "npd";
}

void apply_bug_config(std::vector<BugTypeSpec>& specs, const std::string& config_json) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(config_json);
    } catch (const std::exception& e) {
        throw ConfigInvalid(std::string("bug-type config: ") + e.what());
    }
    if (!doc.is_object())
        throw ConfigInvalid("bug-type config: top level must be an object keyed by bug name");
    for (auto& spec : specs) {
        if (!doc.contains(spec.name))
            continue;
        const auto& entry = doc.at(spec.name);
        if (!entry.is_object())
            throw ConfigInvalid("bug-type config: entry '" + spec.name + "' must be an object");
        auto load_list = [&](const char* key, std::vector<std::string>& into) {
            if (!entry.contains(key))
                return;
            if (!entry.at(key).is_array())
                throw ConfigInvalid("bug-type config: '" + spec.name + "." + key +
                                    "' must be an array of names");
            into.clear();
            for (const auto& v : entry.at(key))
                into.push_back(v.get<std::string>());
        };
        load_list("alloc_apis", spec.alloc_apis);
        load_list("dealloc_apis", spec.dealloc_apis);
        load_list("null_literals", spec.null_literals);
    }
}

namespace {

/// Strips enclosing parens and leading cast groups; true when what remains
/// is exactly one of the given literal tokens.
const Token* rhs_is_literal(const std::vector<Token>& rhs, const std::vector<std::string>& literals) {
    std::size_t b = 0, e = rhs.size();
    bool changed = true;
    while (changed && b < e) {
        changed = false;
        // whole-range parens
        if (rhs[b].is("(") && rhs[e - 1].is(")")) {
            int depth = 0;
            bool wraps = true;
            for (std::size_t i = b; i < e; ++i) {
                if (rhs[i].is("("))
                    ++depth;
                else if (rhs[i].is(")")) {
                    --depth;
                    if (depth == 0 && i + 1 != e) {
                        wraps = false;
                        break;
                    }
                }
            }
            if (wraps) {
                ++b;
                --e;
                changed = true;
                continue;
            }
        }
        // leading cast group "(type *)"
        if (rhs[b].is("(")) {
            int depth = 0;
            for (std::size_t i = b; i < e; ++i) {
                if (rhs[i].is("("))
                    ++depth;
                else if (rhs[i].is(")")) {
                    --depth;
                    if (depth == 0) {
                        b = i + 1;
                        changed = true;
                        break;
                    }
                }
            }
        }
    }
    if (e != b + 1)
        return nullptr;
    const Token& t = rhs[b];
    if (t.kind != TokKind::Ident && t.kind != TokKind::Keyword && t.kind != TokKind::Number)
        return nullptr;
    for (const auto& lit : literals)
        if (t.text == lit)
            return &t;
    return nullptr;
}

/// First allocation-API call token inside the slice, if any.
const Token* find_alloc_call(const std::vector<Token>& rhs, const std::vector<std::string>& apis) {
    for (std::size_t i = 0; i + 1 < rhs.size(); ++i)
        if (rhs[i].kind == TokKind::Ident && rhs[i + 1].is("(") &&
            std::find(apis.begin(), apis.end(), rhs[i].text) != apis.end())
            return &rhs[i];
    return nullptr;
}

std::string first_identifier(const std::string& text) {
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '_') {
            std::size_t start = i;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                ++i;
            return text.substr(start, i - start);
        }
        ++i;
    }
    return {};
}

/// Base identifier of the postfix chain ending right before token index i:
/// for `a[k]->f` the head is `a`.
const Token* postfix_chain_head(const std::vector<Token>& toks, std::size_t i) {
    std::size_t j = i;
    while (j > 0) {
        const Token& prev = toks[j - 1];
        if (prev.kind == TokKind::Ident) {
            if (j >= 2 && (toks[j - 2].is("->") || toks[j - 2].is("."))) {
                j -= 2;
                continue;
            }
            return &prev;
        }
        if (prev.is("]") || prev.is(")")) {
            const std::string close = prev.text;
            const std::string open = prev.is("]") ? "[" : "(";
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
        return nullptr;
    }
    return nullptr;
}

bool unary_star_context(const std::vector<Token>& toks, std::size_t i) {
    if (i == 0)
        return true;
    const Token& prev = toks[i - 1];
    if (prev.kind == TokKind::Ident || prev.kind == TokKind::Number ||
        prev.kind == TokKind::String || prev.kind == TokKind::CharLit)
        return false; // binary multiply or declarator position
    if (prev.is(")") || prev.is("]"))
        return false;
    if (prev.kind == TokKind::Keyword)
        return prev.is("return"); // `return *p` yes; `int *p` no
    return true; // after an operator, '(', ',', '=', ...
}

struct Occurrence {
    ProgramValue value;
    friend bool operator<(const Occurrence& a, const Occurrence& b) {
        return std::tie(a.value.location, a.value.variable) <
               std::tie(b.value.location, b.value.variable);
    }
    friend bool operator==(const Occurrence& a, const Occurrence& b) {
        return a.value.location == b.value.location && a.value.variable == b.value.variable;
    }
};

void collect_dereferences(const FunctionRecord& fn, std::set<Occurrence>& out) {
    syntax::walk_statements(fn.cfg->body(), [&](const Stmt& stmt) {
        const auto& toks = stmt.tokens;
        auto assignment = syntax::assignment_of(stmt);
        // in declarations, tokens before the initializer are declarators
        std::size_t scan_from = 0;
        if (stmt.kind == StmtKind::Decl) {
            scan_from = toks.size(); // no '=': nothing to scan
            for (std::size_t i = 0; i < toks.size(); ++i)
                if (toks[i].is("=")) {
                    scan_from = i + 1;
                    break;
                }
        }
        for (std::size_t i = scan_from; i < toks.size(); ++i) {
            const Token& t = toks[i];
            if (t.is("*") && i + 1 < toks.size() && unary_star_context(toks, i)) {
                const Token& next = toks[i + 1];
                std::string base;
                if (next.kind == TokKind::Ident)
                    base = next.text;
                else if (next.is("(")) {
                    for (std::size_t j = i + 1; j < toks.size(); ++j)
                        if (toks[j].kind == TokKind::Ident) {
                            base = toks[j].text;
                            break;
                        }
                }
                if (!base.empty())
                    out.insert({{base, {fn.file, t.line, t.column}, fn.id, ValueRole::Sink}});
                continue;
            }
            if (t.is("->")) {
                const Token* head = postfix_chain_head(toks, i);
                if (head)
                    out.insert({{head->text, {fn.file, t.line, t.column}, fn.id, ValueRole::Sink}});
                continue;
            }
            if (t.is("[") && i > 0) {
                const Token* head = postfix_chain_head(toks, i);
                if (head)
                    out.insert({{head->text, {fn.file, t.line, t.column}, fn.id, ValueRole::Sink}});
                continue;
            }
        }
        (void)assignment;
    });
}

void collect_dealloc_arguments(const FunctionRecord& fn, const std::vector<std::string>& apis,
                               ValueRole role, std::set<Occurrence>& out) {
    for (const auto& site : fn.call_sites) {
        if (std::find(apis.begin(), apis.end(), site.callee_name) == apis.end())
            continue;
        if (site.arguments.empty())
            continue;
        const std::string base = first_identifier(site.arguments.front());
        if (base.empty())
            continue;
        out.insert({{base, site.location, fn.id, role}});
    }
}

} // namespace

std::vector<ProgramValue> find_sources(const FunctionInventory& inventory, const BugTypeSpec& bug) {
    std::set<Occurrence> occurrences;
    for (const auto& fn : inventory.functions) {
        if (!fn.cfg)
            continue;
        switch (bug.kind) {
        case BugKind::NullDereference:
            syntax::walk_statements(fn.cfg->body(), [&](const Stmt& stmt) {
                auto assignment = syntax::assignment_of(stmt);
                if (!assignment)
                    return;
                const Token* literal = rhs_is_literal(assignment->rhs, bug.null_literals);
                if (!literal)
                    return;
                occurrences.insert({{literal->text,
                                     {fn.file, literal->line, literal->column},
                                     fn.id,
                                     ValueRole::Source}});
            });
            break;
        case BugKind::MemoryLeak:
            syntax::walk_statements(fn.cfg->body(), [&](const Stmt& stmt) {
                auto assignment = syntax::assignment_of(stmt);
                if (!assignment)
                    return;
                if (!find_alloc_call(assignment->rhs, bug.alloc_apis))
                    return;
                occurrences.insert({{assignment->target,
                                     {fn.file, assignment->target_line, assignment->target_column},
                                     fn.id,
                                     ValueRole::Source}});
            });
            break;
        case BugKind::UseAfterFree:
            collect_dealloc_arguments(fn, bug.dealloc_apis, ValueRole::Source, occurrences);
            break;
        }
    }
    std::vector<ProgramValue> out;
    for (const auto& occ : occurrences)
        out.push_back(occ.value);
    return out;
}

std::vector<ProgramValue> find_sinks(const FunctionInventory& inventory, const BugTypeSpec& bug) {
    std::set<Occurrence> occurrences;
    for (const auto& fn : inventory.functions) {
        if (!fn.cfg)
            continue;
        switch (bug.kind) {
        case BugKind::NullDereference:
            collect_dereferences(fn, occurrences);
            break;
        case BugKind::MemoryLeak:
            collect_dealloc_arguments(fn, bug.dealloc_apis, ValueRole::Sink, occurrences);
            break;
        case BugKind::UseAfterFree: {
            collect_dereferences(fn, occurrences);
            collect_dealloc_arguments(fn, bug.dealloc_apis, ValueRole::Sink, occurrences);
            break;
        }
        }
    }
    std::vector<ProgramValue> out;
    for (const auto& occ : occurrences)
        out.push_back({occ.value.variable, occ.value.location, occ.value.function, ValueRole::Sink});
    return out;
}

} // namespace flowaudit
