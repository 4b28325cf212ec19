#pragma once

#include <filesystem>
#include <iosfwd>
#include <variant>

#include "polyheat/grid.hpp"

namespace polyheat {

/// "PHF1" snapshot: magic, u32 dim, u32 M, f64 L, f64 t, u8 kind
/// (0 scalar, 1 vector), then little-endian f64 payload in row-major order.
using Snapshot = std::variant<Field, VectorField>;

void write_phf1(std::ostream& os, const Field& u);
void write_phf1(std::ostream& os, const VectorField& v, double t = 0.0);
void write_phf1(const std::filesystem::path& path, const Field& u);
void write_phf1(const std::filesystem::path& path, const VectorField& v, double t = 0.0);

Snapshot read_phf1(std::istream& is);
Snapshot read_phf1(const std::filesystem::path& path);

} // namespace polyheat
