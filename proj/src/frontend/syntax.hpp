#pragma once

// Internal to the syntax frontend: token stream, statement tree and the
// per-function control-flow graph. Parsing is compilation-free and
// tolerant: unparseable regions are reported upward, never fatal.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace flowaudit::syntax {

enum class TokKind { Ident, Keyword, Number, String, CharLit, Punct };

struct Token {
    TokKind kind = TokKind::Punct;
    std::string text;
    int line = 1;
    int column = 1;
    std::size_t offset = 0; // byte offset in the lexed text
    std::size_t length = 0;

    bool is(const char* t) const { return text == t; }
};

bool is_keyword(const std::string& text);
bool is_type_keyword(const std::string& text);

/// Lexes C-ish source. Comments are skipped; preprocessor lines (including
/// backslash continuations) are skipped whole; line counting is exact.
std::vector<Token> lex(const std::string& text, int first_line = 1);

enum class StmtKind {
    Expr,
    Decl,
    Compound,
    If,
    While,
    DoWhile,
    For,
    Switch,
    CaseLabel, // case/default label
    Return,
    Break,
    Continue,
    Goto,
    Label,
    Empty,
};

struct Stmt {
    StmtKind kind = StmtKind::Expr;
    int line = 0; // first token's line
    int column = 0;
    std::vector<Token> tokens;       // header/expression tokens (no nested bodies)
    std::vector<Stmt> children;      // body (loops, if-then, compound)
    std::vector<Stmt> else_children; // if-else arm
    bool has_else = false;
};

struct BodyParse {
    std::vector<Stmt> stmts;
    bool modeled = true; // false when goto/labels (unmodeled control flow) occur
};

/// Parses a brace-balanced token slice [begin, end) as a statement list.
BodyParse parse_body(const std::vector<Token>& toks, std::size_t begin, std::size_t end);

/// Assignment shape of a single statement: target variable and the
/// right-hand-side token slice. Understands plain assignments and
/// initializing declarations; returns the first top-level '='.
struct Assignment {
    std::string target;
    int target_line = 0;
    int target_column = 0;
    std::vector<Token> rhs;
};
std::optional<Assignment> assignment_of(const Stmt& stmt);

/// True when `text` occurs in `tokens` as an identifier/keyword token.
bool contains_token(const std::vector<Token>& tokens, const std::string& text);

void walk_statements(const std::vector<Stmt>& stmts, const std::function<void(const Stmt&)>& fn);

} // namespace flowaudit::syntax

namespace flowaudit {

/// Immutable per-function CFG with line-level statement resolution.
/// Built once at index time; safe for concurrent reads.
class FunctionCfg {
public:
    /// The signature lines [signature_begin, signature_end] share a virtual
    /// entry node so parameter-declaration locations participate in
    /// ordering queries, including multi-line signatures.
    static std::shared_ptr<const FunctionCfg> build(const syntax::BodyParse& body,
                                                    int signature_begin, int signature_end);

    bool modeled() const { return modeled_; }

    /// Ids of CFG nodes whose statement starts at `line` (empty when none).
    std::vector<int> nodes_at_line(int line) const;

    /// Subset of `nodes` executable at all (reachable from function entry).
    std::vector<int> entry_reachable(const std::vector<int>& nodes) const;

    /// True when some CFG path of length >= 1 leads from a node in `from`
    /// to a node in `to`.
    bool reaches(const std::vector<int>& from, const std::vector<int>& to) const;

    /// True when every entry path to every entry-reachable node of
    /// `targets` passes through some node of `blockers`.
    bool set_dominates(const std::vector<int>& blockers, const std::vector<int>& targets) const;

    bool is_return_line(int line) const;

    /// First leaf statement starting at `line`, if any.
    const syntax::Stmt* stmt_at_line(int line) const;

    const std::vector<syntax::Stmt>& body() const { return body_.stmts; }

private:
    struct Node {
        int line = 0;
        std::vector<int> succ;
    };

    int add_node(int line);
    struct Flow {
        int entry = -1;           // -1: empty region
        std::vector<int> exits;   // dangling forward exits
    };
    Flow build_seq(const std::vector<syntax::Stmt>& stmts);
    Flow build_stmt(const syntax::Stmt& stmt);
    void link(const std::vector<int>& froms, int to);

    syntax::BodyParse body_;
    bool modeled_ = true;
    std::vector<Node> nodes_;
    std::map<int, std::vector<int>> by_line_;
    std::vector<int> return_lines_;
    std::map<int, const syntax::Stmt*> leaf_by_line_;
    int entry_ = -1;

    // loop/switch context during construction
    struct LoopCtx {
        std::vector<int>* breaks;
        std::vector<int>* continues; // null inside switch
        int continue_target = -1;
    };
    std::vector<LoopCtx> loop_stack_;
};

} // namespace flowaudit
