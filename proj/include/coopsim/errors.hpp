#pragma once

#include <stdexcept>
#include <string>

namespace coopsim {

// Base class for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

struct CycleError : Error {
    using Error::Error;
};

struct DanglingDep : Error {
    using Error::Error;
};

struct InvalidParam : Error {
    using Error::Error;
};

struct UnknownTask : Error {
    using Error::Error;
};

struct UnknownGroup : Error {
    using Error::Error;
};

struct StateError : Error {
    using Error::Error;
};

struct DeadlockError : Error {
    using Error::Error;
};

// Carries the offending key path, e.g. "groups".
struct SchemaError : Error {
    std::string key;
    SchemaError(const std::string& key_path, const std::string& what)
        : Error("config key '" + key_path + "': " + what), key(key_path) {}
};

}  // namespace coopsim
