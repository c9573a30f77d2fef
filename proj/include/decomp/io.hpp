#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "decomp/grid.hpp"

namespace decomp::io {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dispatch on extension: .csv (1D one-value-per-line or headerless 2D grid)
/// or .pgm (P2/P5, 8- or 16-bit, values linearly mapped onto a recorded
/// [min,max] range).
GridField read_field(const std::string& path);
void write_field(const std::string& path, const GridField& f);

GridField read_csv(const std::string& path);
void write_csv(const std::string& path, const GridField& f);  // 12 significant digits

GridField read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GridField& f, int bits = 16,
               bool binary = true);

/// FNV-1a 64-bit content hash, as 16 hex digits.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::string digest_file(const std::string& path);
std::string digest_hex(std::uint64_t h);

/// Numbers from a file (csv) or an inline comma-separated list.
std::vector<double> read_sequence(const std::string& file_or_inline);

std::string format_value(double v);  // %.12g, the CSV printing convention

}  // namespace decomp::io
