#include "rpca/matrix_io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace rpca {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

namespace {

constexpr char kMatrixMagic[4] = {'R', 'P', 'C', 'M'};
constexpr char kMaskMagic[7] = {'R', 'P', 'C', 'M', 'A', 'S', 'K'};
constexpr std::uint32_t kVersion = 1;
// Payload sanity limit when reading: 1e9 entries (8 GB of doubles).
constexpr std::uint64_t kMaxEntries = 1000000000ull;

template <class T>
void write_raw(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_raw(std::istream& in, const std::string& path) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("truncated file: " + path);
  return value;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  return in;
}

void check_magic(std::istream& in, const char* magic, std::size_t len,
                 const std::string& path) {
  char buf[8] = {};
  in.read(buf, static_cast<std::streamsize>(len));
  if (!in || std::memcmp(buf, magic, len) != 0)
    throw IoError("bad magic: " + path);
}

}  // namespace

void write_matrix(const std::string& path, const Matrix& a) {
  std::ofstream out = open_out(path);
  out.write(kMatrixMagic, sizeof(kMatrixMagic));
  write_raw<std::uint32_t>(out, kVersion);
  write_raw<std::uint64_t>(out, static_cast<std::uint64_t>(a.rows()));
  write_raw<std::uint64_t>(out, static_cast<std::uint64_t>(a.cols()));
  std::vector<double> row(static_cast<std::size_t>(a.cols()));
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j)
      row[static_cast<std::size_t>(j)] = a(i, j);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!out) throw IoError("write failed: " + path);
}

Matrix read_matrix(const std::string& path) {
  std::ifstream in = open_in(path);
  check_magic(in, kMatrixMagic, sizeof(kMatrixMagic), path);
  auto version = read_raw<std::uint32_t>(in, path);
  if (version != kVersion)
    throw IoError("unsupported version " + std::to_string(version) + ": " +
                  path);
  auto rows = read_raw<std::uint64_t>(in, path);
  auto cols = read_raw<std::uint64_t>(in, path);
  if (rows == 0 || cols == 0 || rows * cols > kMaxEntries)
    throw IoError("implausible dimensions: " + path);
  Matrix a(static_cast<Index>(rows), static_cast<Index>(cols));
  std::vector<double> row(static_cast<std::size_t>(cols));
  for (std::uint64_t i = 0; i < rows; ++i) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!in) throw IoError("truncated file: " + path);
    for (std::uint64_t j = 0; j < cols; ++j)
      a(static_cast<Index>(i), static_cast<Index>(j)) =
          row[static_cast<std::size_t>(j)];
  }
  return a;
}

void write_mask(const std::string& path, const ObservationMask& mask) {
  if (mask.rows() > std::numeric_limits<std::uint32_t>::max() ||
      mask.cols() > std::numeric_limits<std::uint32_t>::max())
    throw IoError("mask dimensions exceed the u32 entry format");
  std::ofstream out = open_out(path);
  out.write(kMaskMagic, sizeof(kMaskMagic));
  write_raw<std::uint32_t>(out, kVersion);
  write_raw<std::uint64_t>(out, static_cast<std::uint64_t>(mask.rows()));
  write_raw<std::uint64_t>(out, static_cast<std::uint64_t>(mask.cols()));
  write_raw<std::uint64_t>(out,
                           static_cast<std::uint64_t>(mask.observed_count()));
  for (const auto& [i, j] : mask.pairs()) {
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(i));
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(j));
  }
  if (!out) throw IoError("write failed: " + path);
}

ObservationMask read_mask(const std::string& path, double rate_p) {
  std::ifstream in = open_in(path);
  check_magic(in, kMaskMagic, sizeof(kMaskMagic), path);
  auto version = read_raw<std::uint32_t>(in, path);
  if (version != kVersion)
    throw IoError("unsupported version " + std::to_string(version) + ": " +
                  path);
  auto rows = read_raw<std::uint64_t>(in, path);
  auto cols = read_raw<std::uint64_t>(in, path);
  auto count = read_raw<std::uint64_t>(in, path);
  if (rows == 0 || cols == 0 || rows * cols > kMaxEntries ||
      count > rows * cols)
    throw IoError("implausible dimensions: " + path);
  std::vector<IndexPair> pairs;
  pairs.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t t = 0; t < count; ++t) {
    auto i = read_raw<std::uint32_t>(in, path);
    auto j = read_raw<std::uint32_t>(in, path);
    pairs.emplace_back(static_cast<Index>(i), static_cast<Index>(j));
  }
  try {
    return ObservationMask(static_cast<Index>(rows), static_cast<Index>(cols),
                           pairs, rate_p);
  } catch (const InputError& e) {
    throw IoError("invalid mask content in " + path + ": " + e.what());
  }
}

Matrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        while (used < cell.size() &&
               std::isspace(static_cast<unsigned char>(cell[used])))
          ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw IoError("non-numeric cell '" + cell + "' in " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError("ragged rows in " + path);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("empty matrix file: " + path);
  Matrix a(static_cast<Index>(rows.size()),
           static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return a;
}

void write_trace_csv(const std::string& path, const IterationTrace& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "iter,objective,ref_error,elapsed_ms\n";
  out << std::setprecision(17);
  for (const auto& rec : trace.records) {
    out << rec.iter << ',' << rec.objective << ',';
    if (rec.ref_error) out << *rec.ref_error;
    out << ',' << rec.elapsed_ms << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

PgmImage read_pgm(const std::string& path) {
  std::ifstream in = open_in(path);
  auto next_token = [&]() -> std::string {
    std::string tok;
    for (;;) {
      int c = in.get();
      if (c == EOF) throw IoError("truncated file: " + path);
      if (c == '#') {
        while (c != EOF && c != '\n') c = in.get();
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) return tok;
        continue;
      }
      tok.push_back(static_cast<char>(c));
    }
  };
  if (next_token() != "P5") throw IoError("not a binary PGM: " + path);
  PgmImage img;
  try {
    img.cols = static_cast<Index>(std::stoll(next_token()));
    img.rows = static_cast<Index>(std::stoll(next_token()));
    long maxval = std::stol(next_token());
    if (maxval != 255)
      throw IoError("unsupported maxval (only 8-bit): " + path);
  } catch (const IoError&) {
    throw;
  } catch (const std::exception&) {
    throw IoError("malformed PGM header: " + path);
  }
  if (img.rows <= 0 || img.cols <= 0 ||
      static_cast<std::uint64_t>(img.rows) *
          static_cast<std::uint64_t>(img.cols) >
          kMaxEntries)
    throw IoError("implausible dimensions: " + path);
  img.pixels.resize(static_cast<std::size_t>(img.rows * img.cols));
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (!in) throw IoError("truncated file: " + path);
  return img;
}

void write_pgm(const std::string& path, const PgmImage& img) {
  std::ofstream out = open_out(path);
  out << "P5\n" << img.cols << ' ' << img.rows << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw IoError("write failed: " + path);
}

PgmImage frame_to_pgm(const Matrix& frame) {
  PgmImage img;
  img.rows = frame.rows();
  img.cols = frame.cols();
  img.pixels.resize(static_cast<std::size_t>(img.rows * img.cols));
  double lo = frame.minCoeff();
  double span = frame.maxCoeff() - lo;
  for (Index i = 0; i < img.rows; ++i)
    for (Index j = 0; j < img.cols; ++j) {
      double scaled =
          span > 0.0 ? (frame(i, j) - lo) / span * 255.0 : 0.0;
      img.pixels[static_cast<std::size_t>(i * img.cols + j)] =
          static_cast<std::uint8_t>(std::lround(scaled));
    }
  return img;
}

}  // namespace rpca
