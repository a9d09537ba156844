#pragma once

#include <filesystem>
#include <string>

#include "flowaudit/diag.hpp"
#include "flowaudit/types.hpp"

namespace flowaudit {

struct IndexOptions {
    std::string language = "c";
};

/// Compilation-free indexing of every parseable source file under root.
/// Files that fail to parse are skipped with a warning; a broken region
/// inside a file skips only that region. Throws RootNotFound /
/// NoSupportedFiles.
FunctionInventory index_repository(const std::filesystem::path& root, const IndexOptions& options = {},
                                   DiagnosticLog* diag = nullptr);

/// Name-based callee resolution. Zero matches -> unresolved entry; multiple
/// matches -> one edge per match (over-approximation).
CallGraph build_call_graph(const FunctionInventory& inventory);

enum class Ordering { MustPrecede, MayPrecede, CannotPrecede, Unknown };

const char* to_string(Ordering ordering);

/// Syntactic control-flow ordering of two statements in one function.
/// Line-level: a location names the statement(s) starting on that line.
/// Throws LocationOutsideFunction when a or b is outside function.span.
Ordering statement_precedes(const FunctionRecord& function, const SourceLocation& a,
                            const SourceLocation& b);

/// Byte-exact definition text. Throws UnknownFunction.
const std::string& get_function_source(const FunctionInventory& inventory, const std::string& id);

/// True when `line` holds an assignment (or initializing declaration) whose
/// target is `defined` and whose right-hand side reads the token `used`.
/// Backs the same-line fact rule (NULL@s -> v@s).
bool is_same_line_definition(const FunctionRecord& function, int line, const std::string& defined,
                             const std::string& used);

/// True when the statement starting at `line` is a return statement.
bool is_return_statement_line(const FunctionRecord& function, int line);

/// Assignment target of the statement at `line` (declaration initializers
/// included), when there is one.
std::optional<std::string> assignment_target_at_line(const FunctionRecord& function, int line);

/// True when `token` occurs as a whole word on the given file line of the
/// function.
bool line_has_token(const FunctionRecord& function, int line, const std::string& token);

/// Debug dump: one text record per function (id, name, file, span,
/// call-site count), deterministic order.
std::string dump_inventory(const FunctionInventory& inventory);

} // namespace flowaudit
