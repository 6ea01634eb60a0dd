#pragma once

#include <string>

#include "qfem/femgen.hpp"

namespace qfem::fem {

// Text format: '#'-prefixed key=value metadata, a header row naming the
// columns, then one CSV row per sample. Doubles are written in
// shortest-round-trip form, so write/read/write is bit-exact.
void write_dataset_csv(const Dataset& ds, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

// Compact binary twin, same metadata, raw little-endian doubles.
void write_dataset_binary(const Dataset& ds, const std::string& path);
Dataset read_dataset_binary(const std::string& path);

}  // namespace qfem::fem
