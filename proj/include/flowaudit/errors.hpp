#pragma once

#include <stdexcept>
#include <string>

namespace flowaudit {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class RootNotFound : public Error {
public:
    explicit RootNotFound(const std::string& path) : Error("repository root not found: " + path) {}
};

class NoSupportedFiles : public Error {
public:
    explicit NoSupportedFiles(const std::string& path)
        : Error("no parseable source files under: " + path) {}
};

class LocationOutsideFunction : public Error {
public:
    explicit LocationOutsideFunction(const std::string& detail)
        : Error("location outside function span: " + detail) {}
};

class UnknownFunction : public Error {
public:
    explicit UnknownFunction(const std::string& id) : Error("unknown function id: " + id) {}
};

class UnsupportedBugType : public Error {
public:
    explicit UnsupportedBugType(const std::string& name) : Error("unsupported bug type: " + name) {}
};

class ValueOutsideFunction : public Error {
public:
    explicit ValueOutsideFunction(const std::string& detail)
        : Error("tracked value lies outside the function: " + detail) {}
};

class EmptyCandidate : public Error {
public:
    EmptyCandidate() : Error("bug candidate has no function segments") {}
};

class BackendUnreachable : public Error {
public:
    explicit BackendUnreachable(const std::string& detail)
        : Error("model backend unreachable: " + detail) {}
};

class MockResponseMissing : public Error {
public:
    explicit MockResponseMissing(const std::string& detail)
        : Error("no scripted mock response for fingerprint " + detail) {}
};

class OutputTruncated : public Error {
public:
    explicit OutputTruncated(const std::string& detail)
        : Error("model output truncated at max tokens: " + detail) {}
};

class ConfigInvalid : public Error {
public:
    explicit ConfigInvalid(const std::string& detail) : Error("invalid configuration: " + detail) {}
};

class UnwritableOutput : public Error {
public:
    explicit UnwritableOutput(const std::string& path) : Error("cannot write output: " + path) {}
};

} // namespace flowaudit
