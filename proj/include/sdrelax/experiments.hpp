#pragma once

#include "sdrelax/fields.hpp"
#include "sdrelax/serialization.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sdrelax {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitIo = 4 };

class IoError : public Error {
public:
    using Error::Error;
};

struct RunOptions {
    int jobs = 1;
    std::optional<std::string> output;  // overrides the config's "output"
    std::optional<std::uint64_t> seed;  // overrides the config's "seed"
};

struct RunResult {
    int exit_code = kExitOk;
    std::string csv;                    // data table, comment header first
    std::string error;                  // JSON error report when exit_code != 0
    std::optional<std::string> written; // path of the file written, if any
};

/// Runs one experiment described by a JSON config. Never throws; failures
/// map to exit codes with a JSON error report.
RunResult run(const Json &config, const RunOptions &options = {});

std::vector<std::string> command_names();

/// Lines of a CSV that are data rows (no comments, no column header).
std::vector<std::string> data_rows(const std::string &csv);

// Seeded generators shared by the sweeps.
Mat random_matrix(std::mt19937_64 &rng, int rows, int cols, double radius = 1.0);
Vec random_unit(std::mt19937_64 &rng, int dim);

/// (g, G) on the N-cube with `resolution` cells per axis: g = A x + b plus
/// continuous piecewise-linear profiles along each axis, G random per cell,
/// and `jumps` random planar facets.
StructuredDeformation random_piecewise_sd(std::mt19937_64 &rng, int dim, int resolution, int jumps = 0);

}  // namespace sdrelax
