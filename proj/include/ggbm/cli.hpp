#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ggbm::cli {

inline constexpr const char* kSchemaVersion = "1";

/// Exit codes of the command-line front end.
enum ExitCode : int { ok = 0, usage = 2, numerical = 3, validation = 4 };

using Cell = std::variant<std::int64_t, double, std::string>;

struct RngMeta {
    std::string algorithm;
    std::uint64_t seed = 0;
    std::string streams;  // e.g. "stream_id = path_id"
};

/// Everything one invocation prints: a parameter echo and a table.
struct OutputRecord {
    std::string schema_version = kSchemaVersion;
    std::string command;
    std::vector<std::pair<std::string, Cell>> params;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::optional<RngMeta> rng;

    /// "ggbm <command> --flag value ..." rebuilt from params.
    std::string command_line() const;
};

/// Shortest decimal string that parses back to the same double; "inf", "-inf", "nan" otherwise.
std::string format_double(double x);

/// CSV: '#'-prefixed metadata lines, then an RFC-4180 header and rows.
void write_csv(const OutputRecord& rec, std::ostream& out);
/// One JSON object per invocation.
void write_json(const OutputRecord& rec, std::ostream& out);

/// Parses args (without the program name), runs the command and writes the
/// record to `out` (or --out FILE). Diagnostics go to `err`. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ggbm::cli
