#pragma once

#include <string>

#include "hsolve/blocked_matrix.hpp"

namespace hsolve {

// BSPD1 binary matrix format: magic "BSPD", version byte 0x01, little-endian
// u64 n and u64 b, then the packed lower-triangle blocks in triangular-offset
// order, each b*b FP64 little-endian values row-major. A save/load round trip
// is bit-identical.
//
// Vector files: little-endian u64 n followed by n FP64 values.
void save_matrix(const BlockedSPDMatrix& m, const std::string& path);
BlockedSPDMatrix load_matrix(const std::string& path);

void save_vector(const BlockVector& v, const std::string& path);
BlockVector load_vector(const std::string& path, std::size_t block_size);

}  // namespace hsolve
