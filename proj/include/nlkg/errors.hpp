#pragma once

#include <stdexcept>
#include <string>

namespace nlkg {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input to a numerical operation (grid mismatch, non-finite data,
// out-of-range order, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

// Configuration file or command-line options rejected.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Probe state fails the moment test at the requested order.
class ProbeRejected : public Error {
public:
    ProbeRejected(const std::string& what, int order, double moment)
        : Error(what), order_(order), moment_(moment) {}

    int order() const noexcept { return order_; }
    double moment() const noexcept { return moment_; }

private:
    int order_;
    double moment_;
};

}  // namespace nlkg
