#pragma once

#include <filesystem>

#include "nlch/field.hpp"

namespace nlch {

/// Binary NLCHF1 format: 6-byte magic, u32 version, u32 dim, u64 cells per
/// axis, f64 extent per axis, then the f64 little-endian payload in row-major order.
void write_field(const ScalarField& f, const std::filesystem::path& path);
ScalarField read_field(const std::filesystem::path& path);

}  // namespace nlch
