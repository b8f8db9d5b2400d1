#pragma once

// Batch front end: argument parsing, validation, and CSV/JSON emission.
// Every emitted file starts with the full configuration and the version.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cocycle_lab::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kFailure = 1, kValidation = 2, kBudget = 3, kStrict = 4 };

using Cell = std::variant<std::int64_t, double, std::string, bool>;

struct Table {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;  // option -> value, in declaration order
    std::vector<std::pair<std::string, Cell>> meta;           // results that are not rows
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    bool partial = false;
};

// RFC 4180 body preceded by '#'-prefixed header lines.
std::string to_csv(const Table& t);
// {"meta": {...}, "data": [{column: value}, ...]}
std::string to_json(const Table& t);

// Full command line; returns the process exit code. Diagnostics go to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cocycle_lab::cli
