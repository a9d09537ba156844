#include <algorithm>
#include <cctype>
#include <sstream>

#include "flowaudit/frontend.hpp"
#include "flowaudit/gateway.hpp"

namespace flowaudit {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok)
        out.push_back(tok);
    return out;
}

bool text_has_token(const std::string& text, const std::string& token) {
    if (token.empty())
        return false;
    auto word_char = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !word_char(text[pos - 1]);
        const std::size_t end = pos + token.size();
        const bool right_ok = end >= text.size() || !word_char(text[end]);
        if (left_ok && right_ok)
            return true;
        ++pos;
    }
    return false;
}

// "var@123" -> (var, 123)
bool parse_value_ref(const std::string& text, std::string& var, int& line) {
    std::size_t at = text.rfind('@');
    if (at == std::string::npos || at == 0 || at + 1 >= text.size())
        return false;
    var = text.substr(0, at);
    const std::string num = text.substr(at + 1);
    for (char c : num)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    line = std::stoi(num);
    return var.find_first_not_of(' ') != std::string::npos;
}

} // namespace

AnalysisParse parse_analysis_response(const std::string& raw, const FunctionRecord& function,
                                      bool strict) {
    AnalysisParse out;
    if (trim(raw).empty()) {
        out.parse_errors.push_back("empty response");
        return out;
    }

    PathRecord current;
    bool in_block = false;
    int path_counter = 0;

    auto check_value = [&](const std::string& var, int line, std::string& error) {
        if (!function.contains_line(line)) {
            error = "line " + std::to_string(line) + " outside " + function.name + " (" +
                    std::to_string(function.span_begin) + "-" + std::to_string(function.span_end) +
                    ")";
            return false;
        }
        if (!line_has_token(function, line, var)) {
            error = "variable '" + var + "' does not occur on line " + std::to_string(line);
            return false;
        }
        return true;
    };

    auto make_value = [&](const std::string& var, int line, ValueRole role) {
        return ProgramValue{var, {function.file, line, 0}, function.id, role};
    };

    auto finish_block = [&](bool terminated) {
        if (!terminated)
            out.parse_errors.push_back(current.path_id + ": block not terminated with END");
        if (current.statements.empty()) {
            out.parse_errors.push_back(current.path_id + ": path without statements; dropped");
        } else {
            out.paths.push_back(std::move(current));
        }
        current = PathRecord{};
        in_block = false;
    };

    std::istringstream is(raw);
    std::string raw_line;
    while (std::getline(is, raw_line)) {
        const std::string line = trim(raw_line);
        if (line.empty())
            continue;
        const std::vector<std::string> words = split_ws(line);
        const std::string& head = words.front();

        if (head == "PATH") {
            if (in_block)
                finish_block(false);
            in_block = true;
            current.path_id = "p" + std::to_string(++path_counter);
            continue;
        }
        if (!in_block)
            continue; // prose outside blocks is ignored

        if (head == "END") {
            finish_block(true);
            continue;
        }
        if (head == "STMT" && words.size() >= 2) {
            bool numeric = !words[1].empty() &&
                           std::all_of(words[1].begin(), words[1].end(), [](unsigned char c) {
                               return std::isdigit(c);
                           });
            if (!numeric) {
                out.parse_errors.push_back(current.path_id + ": bad STMT line '" + line + "'");
                continue;
            }
            const int stmt_line = std::stoi(words[1]);
            if (!function.contains_line(stmt_line)) {
                out.parse_errors.push_back(current.path_id + ": STMT " + std::to_string(stmt_line) +
                                           " outside the function; dropped");
                continue;
            }
            current.statements.push_back({function.file, stmt_line, 0});
            continue;
        }
        if (head == "FACT" && words.size() >= 4 && words[2] == "->") {
            std::string src_var, dst_var, error;
            int src_line = 0, dst_line = 0;
            if (!parse_value_ref(words[1], src_var, src_line) ||
                !parse_value_ref(words[3], dst_var, dst_line)) {
                out.parse_errors.push_back(current.path_id + ": bad FACT line '" + line + "'");
                continue;
            }
            if (!check_value(src_var, src_line, error) || !check_value(dst_var, dst_line, error)) {
                out.parse_errors.push_back(current.path_id + ": fact dropped: " + error);
                continue;
            }
            current.facts.push_back({make_value(src_var, src_line, ValueRole::Intermediate),
                                     make_value(dst_var, dst_line, ValueRole::Intermediate), false});
            continue;
        }
        if (head == "ESCAPE" && words.size() >= 3) {
            const std::string& kind = words[1];
            std::string var, error;
            int esc_line = 0;
            if (!parse_value_ref(words[2], var, esc_line)) {
                out.parse_errors.push_back(current.path_id + ": bad ESCAPE line '" + line + "'");
                continue;
            }
            if (!check_value(var, esc_line, error)) {
                out.parse_errors.push_back(current.path_id + ": escape dropped: " + error);
                continue;
            }
            if (kind == "RETURN") {
                if (!is_return_statement_line(function, esc_line)) {
                    out.parse_errors.push_back(current.path_id + ": ESCAPE RETURN at line " +
                                               std::to_string(esc_line) +
                                               " which is not a return statement; dropped");
                    continue;
                }
                EscapeAnnotation esc;
                esc.kind = EscapeKind::ToCallerReturn;
                esc.value = make_value(var, esc_line, ValueRole::ReturnValue);
                current.escapes.push_back(std::move(esc));
                continue;
            }
            if (kind == "ARG" && words.size() >= 7 && words[3] == "CALLEE" && words[5] == "INDEX") {
                const std::string& callee = words[4];
                int index = -1;
                try {
                    index = std::stoi(words[6]);
                } catch (...) {
                }
                const CallSite* site = nullptr;
                for (const auto& cs : function.call_sites)
                    if (cs.location.line == esc_line && cs.callee_name == callee) {
                        site = &cs;
                        break;
                    }
                if (!site || index < 0 || static_cast<std::size_t>(index) >= site->arguments.size()) {
                    out.parse_errors.push_back(current.path_id + ": ESCAPE ARG does not match a call"
                                               " to '" + callee + "' at line " +
                                               std::to_string(esc_line) + "; dropped");
                    continue;
                }
                if (!text_has_token(site->arguments[static_cast<std::size_t>(index)], var)) {
                    out.parse_errors.push_back(current.path_id + ": ESCAPE ARG: '" + var +
                                               "' is not part of argument " + std::to_string(index) +
                                               " of the call to '" + callee + "'; dropped");
                    continue;
                }
                EscapeAnnotation esc;
                esc.kind = EscapeKind::ToCalleeArgument;
                esc.value = make_value(var, esc_line, ValueRole::Argument);
                esc.call_site = *site;
                esc.argument_index = index;
                current.escapes.push_back(std::move(esc));
                continue;
            }
            if (kind == "GLOBAL") {
                EscapeAnnotation esc;
                esc.kind = EscapeKind::ToGlobal;
                esc.value = make_value(var, esc_line, ValueRole::Intermediate);
                current.escapes.push_back(std::move(esc));
                continue;
            }
            out.parse_errors.push_back(current.path_id + ": bad ESCAPE kind '" + kind + "'");
            continue;
        }
        if (head == "COND") {
            const std::string note = trim(line.substr(4));
            if (current.condition_notes.empty())
                current.condition_notes = note;
            else
                current.condition_notes += "; " + note;
            continue;
        }
        out.parse_errors.push_back(current.path_id + ": unrecognized line '" + line + "'");
    }
    if (in_block)
        finish_block(false);
    if (out.paths.empty() && out.parse_errors.empty())
        out.parse_errors.push_back("no PATH blocks found");
    if (strict && !out.parse_errors.empty())
        out.paths.clear();
    return out;
}

FeasibilityParse parse_feasibility_response(const std::string& raw) {
    FeasibilityParse out;
    std::istringstream is(raw);
    std::string line;
    while (std::getline(is, line)) {
        const std::string t = trim(line);
        if (t.empty())
            continue;
        std::string word;
        for (char c : t) {
            if (!std::isalpha(static_cast<unsigned char>(c)))
                break;
            word.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
        if (word == "FEASIBLE") {
            out.verdict = Feasibility::Feasible;
            out.parsed = true;
        } else if (word == "CONTRADICTION") {
            out.verdict = Feasibility::Contradiction;
            out.parsed = true;
        }
        std::string rest;
        std::getline(is, rest, '\0');
        out.explanation = trim(t.substr(word.size()) + (rest.empty() ? "" : "\n" + rest));
        break;
    }
    return out;
}

} // namespace flowaudit
