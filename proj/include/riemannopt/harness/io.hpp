#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "riemannopt/input_vector.hpp"
#include "riemannopt/model.hpp"
#include "riemannopt/riemann.hpp"
#include "riemannopt/schedule_optimizer.hpp"

namespace riemannopt::harness {

// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);

// Reads a P2 or P5 grayscale PGM with maxval up to 65535. Intensities are
// scaled to [0, 1] and the result carries (height, width, 1) shape.
InputVector read_pgm(const std::filesystem::path& path);

// Writes binary P5. maxval 255 gives one byte per sample, 65535 two bytes
// (big-endian). Values are clamped to [0, 1] and rounded.
void write_pgm(const std::filesystem::path& path, const InputVector& image,
               int maxval = 65535);

// Header `k=<n> terminal=1.0`, then one point per line in ascending order.
std::string format_schedule(const AlphaSchedule& schedule);
AlphaSchedule parse_schedule(const std::string& text);
void write_schedule(const std::filesystem::path& path,
                    const AlphaSchedule& schedule);
AlphaSchedule read_schedule(const std::filesystem::path& path);

// Header `knots=<n>`, then `<knot> <magnitude>` per line.
std::string format_profile(const DerivativeProfile& profile);
DerivativeProfile parse_profile(const std::string& text);
void write_profile(const std::filesystem::path& path,
                   const DerivativeProfile& profile);
DerivativeProfile read_profile(const std::filesystem::path& path);

// Header `layers <d> <h1> <h2> 1 <sigmoid|identity>`, then the weights as
// whitespace-separated decimals: w1, b1, w2, b2, w3, b3, matrices row-major
// with one row per output unit. Lines starting with `#` are ignored.
std::string format_weights(const MlpParameters& params);
MlpParameters parse_weights(const std::string& text);
void write_weights(const std::filesystem::path& path,
                   const MlpParameters& params);
MlpParameters read_weights(const std::filesystem::path& path);

using CsvRow = std::vector<std::string>;

// RFC 4180: CRLF line ends; fields holding a comma, quote or line break are
// quoted with inner quotes doubled.
std::string format_csv(const CsvRow& header, const std::vector<CsvRow>& rows);
// Returns every record including the header.
std::vector<CsvRow> parse_csv(const std::string& text);

std::string read_text(const std::filesystem::path& path);
// Creates parent directories as needed.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace riemannopt::harness
