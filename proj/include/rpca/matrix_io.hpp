#pragma once

#include <string>
#include <vector>

#include "rpca/solver.hpp"
#include "rpca/types.hpp"

namespace rpca {

// Binary dense matrix file:
//   magic "RPCM" | u32 version=1 | u64 rows | u64 cols |
//   rows*cols float64 row-major, all little-endian.
void write_matrix(const std::string& path, const Matrix& a);
Matrix read_matrix(const std::string& path);

// Observation mask file:
//   magic "RPCMASK" | u32 version=1 | u64 rows | u64 cols | u64 count |
//   count pairs of (u32 row, u32 col), row-major sorted, little-endian.
// rate_p is not stored; pass the rate the mask was sampled at when reading.
void write_mask(const std::string& path, const ObservationMask& mask);
ObservationMask read_mask(const std::string& path, double rate_p);

// Plain numeric CSV (no header), one row per line.
Matrix read_csv_matrix(const std::string& path);

// Trace CSV with header iter,objective,ref_error,elapsed_ms; ref_error is
// empty when no reference was supplied.
void write_trace_csv(const std::string& path, const IterationTrace& trace);

// 8-bit binary PGM (P5). Pixel (i, j) of the image maps to matrix (i, j).
struct PgmImage {
  Index rows = 0;
  Index cols = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};
PgmImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const PgmImage& img);

// Min-max scales an arbitrary real column/frame to 0..255 (constant frames
// map to 0).
PgmImage frame_to_pgm(const Matrix& frame);

}  // namespace rpca
