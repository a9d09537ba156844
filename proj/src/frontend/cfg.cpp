#include "frontend/syntax.hpp"

#include <algorithm>
#include <deque>

namespace flowaudit {

using syntax::Stmt;
using syntax::StmtKind;

int FunctionCfg::add_node(int line) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({line, {}});
    by_line_[line].push_back(id);
    return id;
}

void FunctionCfg::link(const std::vector<int>& froms, int to) {
    for (int f : froms)
        if (f >= 0)
            nodes_[static_cast<std::size_t>(f)].succ.push_back(to);
}

FunctionCfg::Flow FunctionCfg::build_seq(const std::vector<Stmt>& stmts) {
    Flow flow;
    std::vector<int> pending;
    for (const auto& s : stmts) {
        Flow part = build_stmt(s);
        if (part.entry < 0)
            continue; // empty region (e.g. lone ';' handled as node, so rare)
        if (flow.entry < 0)
            flow.entry = part.entry;
        link(pending, part.entry);
        pending = part.exits;
    }
    flow.exits = pending;
    return flow;
}

FunctionCfg::Flow FunctionCfg::build_stmt(const Stmt& s) {
    switch (s.kind) {
    case StmtKind::Compound:
        return build_seq(s.children);

    case StmtKind::If: {
        int cond = add_node(s.line);
        Flow flow{cond, {}};
        Flow then_flow = build_seq(s.children);
        if (then_flow.entry >= 0) {
            link({cond}, then_flow.entry);
            flow.exits.insert(flow.exits.end(), then_flow.exits.begin(), then_flow.exits.end());
        } else {
            flow.exits.push_back(cond);
        }
        if (s.has_else) {
            Flow else_flow = build_seq(s.else_children);
            if (else_flow.entry >= 0) {
                link({cond}, else_flow.entry);
                flow.exits.insert(flow.exits.end(), else_flow.exits.begin(), else_flow.exits.end());
            } else {
                flow.exits.push_back(cond);
            }
        } else {
            flow.exits.push_back(cond); // fallthrough when the condition is false
        }
        return flow;
    }

    case StmtKind::While: {
        int cond = add_node(s.line);
        std::vector<int> breaks, continues;
        loop_stack_.push_back({&breaks, &continues, cond});
        Flow body = build_seq(s.children);
        loop_stack_.pop_back();
        if (body.entry >= 0) {
            link({cond}, body.entry);
            link(body.exits, cond); // back edge
        } else {
            nodes_[static_cast<std::size_t>(cond)].succ.push_back(cond);
        }
        for (int c : continues)
            nodes_[static_cast<std::size_t>(c)].succ.push_back(cond);
        Flow flow{cond, {cond}};
        flow.exits.insert(flow.exits.end(), breaks.begin(), breaks.end());
        return flow;
    }

    case StmtKind::DoWhile: {
        int cond = add_node(s.line); // condition node carries the `do` line
        std::vector<int> breaks, continues;
        loop_stack_.push_back({&breaks, &continues, cond});
        Flow body = build_seq(s.children);
        loop_stack_.pop_back();
        Flow flow;
        if (body.entry >= 0) {
            flow.entry = body.entry;
            link(body.exits, cond);
            link({cond}, body.entry); // back edge
        } else {
            flow.entry = cond;
            nodes_[static_cast<std::size_t>(cond)].succ.push_back(cond);
        }
        for (int c : continues)
            nodes_[static_cast<std::size_t>(c)].succ.push_back(cond);
        flow.exits = {cond};
        flow.exits.insert(flow.exits.end(), breaks.begin(), breaks.end());
        return flow;
    }

    case StmtKind::For: {
        int header = add_node(s.line); // init + condition collapse onto the header line
        std::vector<int> breaks, continues;
        loop_stack_.push_back({&breaks, &continues, header});
        Flow body = build_seq(s.children);
        loop_stack_.pop_back();
        if (body.entry >= 0) {
            link({header}, body.entry);
            link(body.exits, header);
        } else {
            nodes_[static_cast<std::size_t>(header)].succ.push_back(header);
        }
        for (int c : continues)
            nodes_[static_cast<std::size_t>(c)].succ.push_back(header);
        Flow flow{header, {header}};
        flow.exits.insert(flow.exits.end(), breaks.begin(), breaks.end());
        return flow;
    }

    case StmtKind::Switch: {
        int cond = add_node(s.line);
        std::vector<int> breaks;
        loop_stack_.push_back({&breaks, nullptr, -1});
        Flow flow{cond, {}};
        // Walk the (normally compound) body: every case label becomes an
        // entry from the condition; statements fall through sequentially.
        const std::vector<Stmt>* body = &s.children;
        std::vector<Stmt> unwrapped;
        if (s.children.size() == 1 && s.children.front().kind == StmtKind::Compound)
            body = &s.children.front().children;
        std::vector<int> pending;
        bool has_default = false;
        for (const auto& child : *body) {
            if (child.kind == StmtKind::CaseLabel) {
                int label = add_node(child.line);
                if (!child.tokens.empty() && child.tokens.front().text == "default")
                    has_default = true;
                link({cond}, label);
                link(pending, label); // fallthrough from the previous group
                pending = {label};
                continue;
            }
            Flow part = build_stmt(child);
            if (part.entry < 0)
                continue;
            link(pending, part.entry);
            pending = part.exits;
        }
        loop_stack_.pop_back();
        flow.exits = pending;
        flow.exits.insert(flow.exits.end(), breaks.begin(), breaks.end());
        if (!has_default)
            flow.exits.push_back(cond); // no default: the switch can fall past
        return flow;
    }

    case StmtKind::Return: {
        int node = add_node(s.line);
        return_lines_.push_back(s.line);
        if (leaf_by_line_.find(s.line) == leaf_by_line_.end())
            leaf_by_line_[s.line] = &s;
        return {node, {}}; // no fallthrough; edges to exit added implicitly
    }

    case StmtKind::Break: {
        int node = add_node(s.line);
        for (auto it = loop_stack_.rbegin(); it != loop_stack_.rend(); ++it) {
            if (it->breaks) {
                it->breaks->push_back(node);
                break;
            }
        }
        return {node, {}};
    }

    case StmtKind::Continue: {
        int node = add_node(s.line);
        for (auto it = loop_stack_.rbegin(); it != loop_stack_.rend(); ++it) {
            if (it->continues) {
                it->continues->push_back(node);
                break;
            }
        }
        return {node, {}};
    }

    case StmtKind::Goto:
    case StmtKind::Label: {
        modeled_ = false;
        int node = add_node(s.line);
        return {node, {node}};
    }

    case StmtKind::CaseLabel: { // stray label outside a recognized switch body
        int node = add_node(s.line);
        return {node, {node}};
    }

    case StmtKind::Expr:
    case StmtKind::Decl:
    case StmtKind::Empty:
    default: {
        int node = add_node(s.line);
        if (leaf_by_line_.find(s.line) == leaf_by_line_.end())
            leaf_by_line_[s.line] = &s;
        return {node, {node}};
    }
    }
}

std::shared_ptr<const FunctionCfg> FunctionCfg::build(const syntax::BodyParse& body,
                                                      int signature_begin, int signature_end) {
    auto cfg = std::shared_ptr<FunctionCfg>(new FunctionCfg());
    cfg->body_ = body;
    cfg->modeled_ = body.modeled;
    const int entry = cfg->add_node(signature_begin);
    for (int line = signature_begin + 1; line <= signature_end; ++line)
        cfg->by_line_[line].push_back(entry);
    Flow flow = cfg->build_seq(cfg->body_.stmts);
    if (flow.entry >= 0)
        cfg->link({entry}, flow.entry);
    cfg->entry_ = entry;
    return cfg;
}

std::vector<int> FunctionCfg::entry_reachable(const std::vector<int>& nodes) const {
    std::vector<bool> seen(nodes_.size(), false);
    if (entry_ >= 0) {
        seen[static_cast<std::size_t>(entry_)] = true;
        std::deque<int> queue{entry_};
        while (!queue.empty()) {
            int n = queue.front();
            queue.pop_front();
            for (int s : nodes_[static_cast<std::size_t>(n)].succ)
                if (!seen[static_cast<std::size_t>(s)]) {
                    seen[static_cast<std::size_t>(s)] = true;
                    queue.push_back(s);
                }
        }
    }
    std::vector<int> out;
    for (int n : nodes)
        if (seen[static_cast<std::size_t>(n)])
            out.push_back(n);
    return out;
}

std::vector<int> FunctionCfg::nodes_at_line(int line) const {
    auto it = by_line_.find(line);
    if (it == by_line_.end())
        return {};
    return it->second;
}

bool FunctionCfg::reaches(const std::vector<int>& from, const std::vector<int>& to) const {
    if (from.empty() || to.empty())
        return false;
    std::vector<bool> target(nodes_.size(), false);
    for (int t : to)
        target[static_cast<std::size_t>(t)] = true;
    std::vector<bool> seen(nodes_.size(), false);
    std::deque<int> queue;
    for (int f : from)
        for (int s : nodes_[static_cast<std::size_t>(f)].succ)
            if (!seen[static_cast<std::size_t>(s)]) {
                seen[static_cast<std::size_t>(s)] = true;
                queue.push_back(s);
            }
    while (!queue.empty()) {
        int n = queue.front();
        queue.pop_front();
        if (target[static_cast<std::size_t>(n)])
            return true;
        for (int s : nodes_[static_cast<std::size_t>(n)].succ)
            if (!seen[static_cast<std::size_t>(s)]) {
                seen[static_cast<std::size_t>(s)] = true;
                queue.push_back(s);
            }
    }
    return false;
}

bool FunctionCfg::set_dominates(const std::vector<int>& blockers,
                                const std::vector<int>& targets) const {
    if (entry_ < 0)
        return false;
    std::vector<bool> blocked(nodes_.size(), false);
    for (int b : blockers)
        blocked[static_cast<std::size_t>(b)] = true;
    // entry-reachable set avoiding the blockers
    std::vector<bool> seen(nodes_.size(), false);
    std::deque<int> queue;
    if (!blocked[static_cast<std::size_t>(entry_)]) {
        seen[static_cast<std::size_t>(entry_)] = true;
        queue.push_back(entry_);
    }
    while (!queue.empty()) {
        int n = queue.front();
        queue.pop_front();
        for (int s : nodes_[static_cast<std::size_t>(n)].succ)
            if (!seen[static_cast<std::size_t>(s)] && !blocked[static_cast<std::size_t>(s)]) {
                seen[static_cast<std::size_t>(s)] = true;
                queue.push_back(s);
            }
    }
    // plain entry-reachable set
    std::vector<bool> reachable(nodes_.size(), false);
    reachable[static_cast<std::size_t>(entry_)] = true;
    queue.push_back(entry_);
    while (!queue.empty()) {
        int n = queue.front();
        queue.pop_front();
        for (int s : nodes_[static_cast<std::size_t>(n)].succ)
            if (!reachable[static_cast<std::size_t>(s)]) {
                reachable[static_cast<std::size_t>(s)] = true;
                queue.push_back(s);
            }
    }
    for (int t : targets) {
        auto idx = static_cast<std::size_t>(t);
        if (!reachable[idx] || blocked[idx])
            continue; // dead or is itself a blocker
        if (seen[idx])
            return false; // reachable while avoiding every blocker
    }
    return true;
}

bool FunctionCfg::is_return_line(int line) const {
    return std::find(return_lines_.begin(), return_lines_.end(), line) != return_lines_.end();
}

const syntax::Stmt* FunctionCfg::stmt_at_line(int line) const {
    auto it = leaf_by_line_.find(line);
    return it == leaf_by_line_.end() ? nullptr : it->second;
}

} // namespace flowaudit
