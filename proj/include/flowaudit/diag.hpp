#pragma once

#include <mutex>
#include <string>
#include <vector>

namespace flowaudit {

enum class Severity { Info, Warning, Error };

struct Diagnostic {
    Severity severity;
    std::string component;
    std::string message;
};

/// Thread-safe diagnostic collector. Pipeline stages log here instead of
/// aborting; callers inspect or print the collected entries after a run.
class DiagnosticLog {
public:
    void add(Severity severity, std::string component, std::string message) {
        std::lock_guard<std::mutex> lock(mu_);
        items_.push_back({severity, std::move(component), std::move(message)});
    }

    void info(std::string component, std::string message) {
        add(Severity::Info, std::move(component), std::move(message));
    }
    void warn(std::string component, std::string message) {
        add(Severity::Warning, std::move(component), std::move(message));
    }
    void error(std::string component, std::string message) {
        add(Severity::Error, std::move(component), std::move(message));
    }

    std::vector<Diagnostic> snapshot() const {
        std::lock_guard<std::mutex> lock(mu_);
        return items_;
    }

    std::size_t count(Severity severity) const {
        std::lock_guard<std::mutex> lock(mu_);
        std::size_t n = 0;
        for (const auto& d : items_)
            if (d.severity == severity) ++n;
        return n;
    }

    void clear() {
        std::lock_guard<std::mutex> lock(mu_);
        items_.clear();
    }

private:
    mutable std::mutex mu_;
    std::vector<Diagnostic> items_;
};

} // namespace flowaudit
