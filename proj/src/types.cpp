#include "flowaudit/types.hpp"

#include <algorithm>
#include <sstream>

#include "flowaudit/errors.hpp"

namespace flowaudit {

std::string to_string(const SourceLocation& loc) {
    std::ostringstream os;
    os << loc.file << ":" << loc.line;
    if (loc.column > 0)
        os << ":" << loc.column;
    return os.str();
}

std::string FunctionRecord::line_text(int line) const {
    if (line < span_begin || line > span_end)
        return {};
    int current = span_begin;
    std::size_t pos = 0;
    while (current < line) {
        pos = source_text.find('\n', pos);
        if (pos == std::string::npos)
            return {};
        ++pos;
        ++current;
    }
    std::size_t end = source_text.find('\n', pos);
    if (end == std::string::npos)
        end = source_text.size();
    return source_text.substr(pos, end - pos);
}

const FunctionRecord* FunctionInventory::by_id(const std::string& id) const {
    for (const auto& fn : functions)
        if (fn.id == id)
            return &fn;
    return nullptr;
}

std::vector<const FunctionRecord*> FunctionInventory::by_name(const std::string& name) const {
    std::vector<const FunctionRecord*> out;
    for (const auto& fn : functions)
        if (fn.name == name)
            out.push_back(&fn);
    return out;
}

std::vector<const CallGraphEdge*> CallGraph::edges_at(const std::string& caller_id, int line,
                                                      const std::string& callee_name) const {
    std::vector<const CallGraphEdge*> out;
    for (const auto& edge : edges)
        if (edge.site.caller == caller_id && edge.site.location.line == line &&
            edge.site.callee_name == callee_name)
            out.push_back(&edge);
    return out;
}

std::vector<const CallGraphEdge*> CallGraph::edges_to(const std::string& callee_id) const {
    std::vector<const CallGraphEdge*> out;
    for (const auto& edge : edges)
        if (edge.callee_id == callee_id)
            out.push_back(&edge);
    return out;
}

const char* to_string(ValueRole role) {
    switch (role) {
    case ValueRole::Source: return "source";
    case ValueRole::Sink: return "sink";
    case ValueRole::Parameter: return "parameter";
    case ValueRole::Argument: return "argument";
    case ValueRole::ReturnValue: return "return_value";
    case ValueRole::Intermediate: return "intermediate";
    }
    return "intermediate";
}

ValueRole value_role_from_string(const std::string& text) {
    if (text == "source") return ValueRole::Source;
    if (text == "sink") return ValueRole::Sink;
    if (text == "parameter") return ValueRole::Parameter;
    if (text == "argument") return ValueRole::Argument;
    if (text == "return_value") return ValueRole::ReturnValue;
    if (text == "intermediate") return ValueRole::Intermediate;
    throw Error("unknown value role: " + text);
}

std::string value_key(const ProgramValue& value) {
    std::ostringstream os;
    os << value.variable << "|" << value.location.file << "|" << value.location.line << "|"
       << value.location.column << "|" << to_string(value.role);
    return os.str();
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

} // namespace flowaudit
