#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "flowaudit/errors.hpp"
#include "flowaudit/frontend.hpp"
#include "frontend/syntax.hpp"

namespace flowaudit {

namespace {

using syntax::TokKind;
using syntax::Token;

struct LineIndex {
    std::vector<std::size_t> starts; // byte offset of each line start, 1-based at [line-1]

    explicit LineIndex(const std::string& text) {
        starts.push_back(0);
        for (std::size_t i = 0; i < text.size(); ++i)
            if (text[i] == '\n')
                starts.push_back(i + 1);
    }

    std::size_t line_start(int line, std::size_t fallback) const {
        if (line < 1 || static_cast<std::size_t>(line) > starts.size())
            return fallback;
        return starts[static_cast<std::size_t>(line - 1)];
    }

    std::size_t line_end(int line, const std::string& text) const {
        if (static_cast<std::size_t>(line) < starts.size())
            return starts[static_cast<std::size_t>(line)] - 1; // before the '\n'
        return text.size();
    }
};

// Matches the ')' closing the '(' at `open`. Parameter lists must not
// contain ';' or '{'; hitting one marks the region malformed.
struct ParenMatch {
    std::size_t close = 0;
    bool ok = false;
    std::size_t stop = 0; // where scanning gave up
};

ParenMatch match_params(const std::vector<Token>& toks, std::size_t open) {
    ParenMatch m;
    int depth = 0;
    for (std::size_t j = open; j < toks.size(); ++j) {
        const Token& t = toks[j];
        if (t.is("(")) {
            ++depth;
        } else if (t.is(")")) {
            --depth;
            if (depth == 0) {
                m.close = j;
                m.ok = true;
                return m;
            }
        } else if (t.is(";") || t.is("{")) {
            m.stop = j;
            return m;
        }
    }
    m.stop = toks.size();
    return m;
}

std::size_t match_braces(const std::vector<Token>& toks, std::size_t open) {
    int depth = 0;
    for (std::size_t j = open; j < toks.size(); ++j) {
        if (toks[j].is("{"))
            ++depth;
        else if (toks[j].is("}")) {
            --depth;
            if (depth == 0)
                return j;
        }
    }
    return toks.size();
}

std::vector<Parameter> parse_parameters(const std::vector<Token>& toks, std::size_t begin,
                                        std::size_t end) {
    std::vector<Parameter> params;
    std::vector<std::vector<Token>> chunks(1);
    int depth = 0;
    for (std::size_t i = begin; i < end; ++i) {
        const Token& t = toks[i];
        if (t.is("(") || t.is("["))
            ++depth;
        else if (t.is(")") || t.is("]"))
            --depth;
        if (t.is(",") && depth == 0) {
            chunks.emplace_back();
            continue;
        }
        chunks.back().push_back(t);
    }
    int index = 0;
    for (const auto& chunk : chunks) {
        if (chunk.empty())
            continue;
        if (chunk.size() == 1 && (chunk[0].is("void") || chunk[0].is("...")))
            continue;
        const Token* name = nullptr;
        bool has_parens = false;
        for (const auto& t : chunk)
            if (t.is("(")) {
                has_parens = true;
                break;
            }
        if (has_parens) {
            // function-pointer declarator: the name sits before the first ')'
            for (std::size_t i = 0; i + 1 < chunk.size(); ++i)
                if (chunk[i].kind == TokKind::Ident && chunk[i + 1].is(")")) {
                    name = &chunk[i];
                    break;
                }
        } else {
            int bracket = 0;
            for (auto it = chunk.rbegin(); it != chunk.rend(); ++it) {
                if (it->is("]"))
                    ++bracket;
                else if (it->is("["))
                    --bracket;
                else if (bracket == 0 && it->kind == TokKind::Ident) {
                    name = &*it;
                    break;
                }
            }
        }
        Parameter p;
        p.index = index++;
        if (name) {
            p.name = name->text;
            p.line = name->line;
            p.column = name->column;
        } else if (!chunk.empty()) {
            p.line = chunk.front().line;
            p.column = chunk.front().column;
        }
        params.push_back(std::move(p));
    }
    return params;
}

void extract_call_sites(FunctionRecord& fn, const std::string& file_text) {
    std::vector<CallSite> sites;
    syntax::walk_statements(
        fn.cfg->body(), [&](const syntax::Stmt& stmt) {
            const auto& toks = stmt.tokens;
            auto assignment = syntax::assignment_of(stmt);
            for (std::size_t i = 0; i < toks.size(); ++i) {
                if (toks[i].kind != TokKind::Ident)
                    continue;
                if (i + 1 >= toks.size() || !toks[i + 1].is("("))
                    continue;
                if (i > 0 && (toks[i - 1].is("->") || toks[i - 1].is(".") || toks[i - 1].is("&")))
                    continue;
                // split the argument tokens at top-level commas
                int depth = 0;
                std::size_t close = i + 1;
                std::vector<std::pair<std::size_t, std::size_t>> args; // token ranges
                std::size_t arg_begin = i + 2;
                for (std::size_t j = i + 1; j < toks.size(); ++j) {
                    if (toks[j].is("(")) {
                        ++depth;
                    } else if (toks[j].is(")")) {
                        --depth;
                        if (depth == 0) {
                            close = j;
                            if (j > arg_begin)
                                args.emplace_back(arg_begin, j);
                            break;
                        }
                    } else if (toks[j].is(",") && depth == 1) {
                        if (j > arg_begin)
                            args.emplace_back(arg_begin, j);
                        arg_begin = j + 1;
                    }
                }
                CallSite site;
                site.caller = fn.id;
                site.callee_name = toks[i].text;
                site.location = {fn.file, toks[i].line, toks[i].column};
                for (auto [b, e] : args) {
                    const Token& first = toks[b];
                    const Token& last = toks[e - 1];
                    site.arguments.push_back(
                        file_text.substr(first.offset, last.offset + last.length - first.offset));
                }
                if (assignment) {
                    for (const auto& rhs_tok : assignment->rhs)
                        if (rhs_tok.offset == toks[i].offset) {
                            site.receiver_assignment = assignment->target;
                            break;
                        }
                }
                sites.push_back(std::move(site));
                (void)close;
            }
        });
    std::sort(sites.begin(), sites.end(), [](const CallSite& a, const CallSite& b) {
        return std::tie(a.location.line, a.location.column) <
               std::tie(b.location.line, b.location.column);
    });
    fn.call_sites = std::move(sites);
}

struct FileExtract {
    std::vector<FunctionRecord> functions;
    int warnings = 0;
};

FileExtract extract_functions(const std::string& rel_path, const std::string& text,
                              DiagnosticLog* diag) {
    FileExtract out;
    const std::vector<Token> toks = syntax::lex(text);
    const LineIndex lines(text);

    auto warn = [&](const std::string& message) {
        ++out.warnings;
        if (diag)
            diag->warn("frontend", rel_path + ": " + message);
    };

    std::size_t decl_start = 0;
    std::size_t i = 0;
    while (i < toks.size()) {
        const Token& t = toks[i];
        if (t.is(";")) {
            decl_start = ++i;
            continue;
        }
        if (t.is("}")) {
            decl_start = ++i;
            continue;
        }
        if (t.is("{")) {
            // struct/union/enum body or a brace initializer: skip it whole
            std::size_t close = match_braces(toks, i);
            if (close >= toks.size()) {
                warn("unbalanced braces at line " + std::to_string(t.line) + "; rest of file skipped");
                break;
            }
            i = close + 1;
            continue;
        }
        if (t.kind == TokKind::Ident && i + 1 < toks.size() && toks[i + 1].is("(")) {
            ParenMatch params_match = match_params(toks, i + 1);
            if (!params_match.ok) {
                warn("malformed region near '" + t.text + "' at line " + std::to_string(t.line) +
                     "; skipped");
                std::size_t stop = params_match.stop;
                if (stop < toks.size() && toks[stop].is("{")) {
                    std::size_t close = match_braces(toks, stop);
                    i = close >= toks.size() ? toks.size() : close + 1;
                } else {
                    i = stop < toks.size() ? stop + 1 : toks.size();
                }
                decl_start = i;
                continue;
            }
            std::size_t after = params_match.close + 1;
            while (after < toks.size() &&
                   (toks[after].kind == TokKind::Ident || toks[after].kind == TokKind::Keyword))
                ++after; // qualifier/attribute identifiers between ')' and '{'
            if (after < toks.size() && toks[after].is("{")) {
                std::size_t body_close = match_braces(toks, after);
                if (body_close >= toks.size()) {
                    warn("unbalanced function body for '" + t.text + "' at line " +
                         std::to_string(t.line) + "; rest of file skipped");
                    break;
                }
                FunctionRecord fn;
                fn.name = t.text;
                fn.file = rel_path;
                std::size_t decl_tok = std::min(decl_start, i);
                fn.span_begin = toks[decl_tok].line;
                fn.span_end = toks[body_close].line;
                std::size_t text_begin = lines.line_start(fn.span_begin, toks[decl_tok].offset);
                std::size_t text_end = lines.line_end(fn.span_end, text);
                fn.source_text = text.substr(text_begin, text_end - text_begin);
                fn.parameters = parse_parameters(toks, i + 2, params_match.close);
                fn.id = hex16(fnv1a64(fn.file + "|" + fn.name + "|" + std::to_string(fn.span_begin)));
                syntax::BodyParse body = syntax::parse_body(toks, after + 1, body_close);
                if (!body.modeled && diag)
                    diag->info("frontend", rel_path + ": function '" + fn.name +
                                               "' uses control flow the frontend does not model "
                                               "(goto/label); ordering queries return Unknown");
                fn.cfg = FunctionCfg::build(body, fn.span_begin, toks[after].line);
                extract_call_sites(fn, text);
                out.functions.push_back(std::move(fn));
                i = body_close + 1;
                decl_start = i;
                continue;
            }
            // prototype, macro call, or initializer: not a definition
            i = after < toks.size() ? after : toks.size();
            if (i < toks.size() && toks[i].is(";"))
                decl_start = ++i;
            continue;
        }
        ++i;
    }
    return out;
}

bool supported_file(const std::filesystem::path& p, const std::string& language) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (language == "c")
        return ext == ".c" || ext == ".h";
    return false;
}

} // namespace

FunctionInventory index_repository(const std::filesystem::path& root, const IndexOptions& options,
                                   DiagnosticLog* diag) {
    if (options.language != "c")
        throw ConfigInvalid("unsupported language: " + options.language);
    std::error_code ec;
    if (!std::filesystem::exists(root, ec) || !std::filesystem::is_directory(root, ec))
        throw RootNotFound(root.string());

    std::vector<std::filesystem::path> files;
    for (auto it = std::filesystem::recursive_directory_iterator(
             root, std::filesystem::directory_options::skip_permission_denied, ec);
         it != std::filesystem::recursive_directory_iterator(); ++it) {
        if (it->is_regular_file(ec) && supported_file(it->path(), options.language))
            files.push_back(it->path());
    }
    std::sort(files.begin(), files.end());

    FunctionInventory inventory;
    int parsed_files = 0;
    for (const auto& path : files) {
        std::string rel = std::filesystem::relative(path, root, ec).generic_string();
        if (rel.empty())
            rel = path.generic_string();
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            if (diag)
                diag->warn("frontend", rel + ": unreadable; skipped");
            continue;
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        try {
            FileExtract extract = extract_functions(rel, buffer.str(), diag);
            ++parsed_files;
            inventory.files.push_back(rel);
            for (auto& fn : extract.functions)
                inventory.functions.push_back(std::move(fn));
        } catch (const std::exception& e) {
            if (diag)
                diag->warn("frontend", rel + ": parse failed (" + e.what() + "); file skipped");
        }
    }
    if (parsed_files == 0)
        throw NoSupportedFiles(root.string());

    std::sort(inventory.functions.begin(), inventory.functions.end(),
              [](const FunctionRecord& a, const FunctionRecord& b) {
                  return std::tie(a.file, a.span_begin) < std::tie(b.file, b.span_begin);
              });
    std::sort(inventory.files.begin(), inventory.files.end());
    return inventory;
}

CallGraph build_call_graph(const FunctionInventory& inventory) {
    CallGraph graph;
    std::map<std::string, std::vector<const FunctionRecord*>> by_name;
    for (const auto& fn : inventory.functions) {
        graph.nodes.push_back(fn.id);
        by_name[fn.name].push_back(&fn);
    }
    std::sort(graph.nodes.begin(), graph.nodes.end());
    for (const auto& fn : inventory.functions) {
        for (const auto& site : fn.call_sites) {
            auto it = by_name.find(site.callee_name);
            if (it == by_name.end()) {
                graph.unresolved.push_back(site);
                continue;
            }
            for (const FunctionRecord* callee : it->second)
                graph.edges.push_back({site, callee->id}); // one edge per match
        }
    }
    return graph;
}

const std::string& get_function_source(const FunctionInventory& inventory, const std::string& id) {
    const FunctionRecord* fn = inventory.by_id(id);
    if (!fn)
        throw UnknownFunction(id);
    return fn->source_text;
}

std::string dump_inventory(const FunctionInventory& inventory) {
    std::ostringstream os;
    for (const auto& fn : inventory.functions)
        os << "FUNC id=" << fn.id << " name=" << fn.name << " file=" << fn.file << " span="
           << fn.span_begin << "-" << fn.span_end << " call_sites=" << fn.call_sites.size() << "\n";
    return os.str();
}

} // namespace flowaudit
