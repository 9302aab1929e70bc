#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rpca/errors.hpp"
#include "rpca/matrix_io.hpp"
#include "rpca/probgen.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using rpca::Index;
using rpca::Matrix;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("rpca_io_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void clobber_bytes(const std::string& path, std::streamoff at,
                   const std::string& bytes) {
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(at);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void truncate_to(const std::string& path, std::uintmax_t size) {
  fs::resize_file(path, size);
}

}  // namespace

TEST_CASE("matrix files round-trip bit for bit") {
  TempDir dir;
  std::mt19937 gen(91);
  Matrix a = testsup::random_matrix(23, 17, gen);
  a(0, 0) = 0.0;
  a(1, 1) = -0.0;
  a(2, 2) = 1e-310;  // denormal
  const std::string path = dir.file("a.rpcm");
  rpca::write_matrix(path, a);
  Matrix b = rpca::read_matrix(path);
  REQUIRE(b.rows() == a.rows());
  REQUIRE(b.cols() == a.cols());
  CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * 23 * 17) == 0);
}

TEST_CASE("matrix reader rejects malformed files") {
  TempDir dir;
  std::mt19937 gen(92);
  Matrix a = testsup::random_matrix(6, 5, gen);
  const std::string path = dir.file("a.rpcm");

  CHECK_THROWS_AS(rpca::read_matrix(dir.file("missing.rpcm")), rpca::IoError);

  rpca::write_matrix(path, a);
  clobber_bytes(path, 0, "JUNK");
  CHECK_THROWS_AS(rpca::read_matrix(path), rpca::IoError);

  rpca::write_matrix(path, a);
  clobber_bytes(path, 4, std::string("\x09\x00\x00\x00", 4));  // version 9
  CHECK_THROWS_AS(rpca::read_matrix(path), rpca::IoError);

  rpca::write_matrix(path, a);
  truncate_to(path, 4 + 4 + 8 + 8 + 11 * sizeof(double));
  CHECK_THROWS_AS(rpca::read_matrix(path), rpca::IoError);
}

TEST_CASE("mask files round-trip and validate") {
  TempDir dir;
  std::mt19937 gen(93);
  rpca::ObservationMask mask = testsup::random_mask(14, 19, 0.35, gen);
  const std::string path = dir.file("m.rpcmask");
  rpca::write_mask(path, mask);
  rpca::ObservationMask back = rpca::read_mask(path, 0.35);
  CHECK(back.rows() == 14);
  CHECK(back.cols() == 19);
  CHECK(back.rate_p() == 0.35);
  CHECK(back.pairs() == mask.pairs());

  clobber_bytes(path, 0, "NOTMASKX");
  CHECK_THROWS_AS(rpca::read_mask(path, 0.35), rpca::IoError);
}

TEST_CASE("truncated mask files are rejected") {
  TempDir dir;
  std::mt19937 gen(94);
  rpca::ObservationMask mask = testsup::random_mask(9, 9, 0.5, gen);
  const std::string path = dir.file("m.rpcmask");
  rpca::write_mask(path, mask);
  truncate_to(path, fs::file_size(path) - 3);
  CHECK_THROWS_AS(rpca::read_mask(path, 0.5), rpca::IoError);
}

TEST_CASE("csv matrices parse and validate") {
  TempDir dir;
  const std::string path = dir.file("m.csv");
  {
    std::ofstream f(path);
    f << "1.5,-2,3e-2\n0,4.25,-1e3\n";
  }
  Matrix a = rpca::read_csv_matrix(path);
  REQUIRE(a.rows() == 2);
  REQUIRE(a.cols() == 3);
  CHECK(a(0, 0) == 1.5);
  CHECK(a(0, 2) == 3e-2);
  CHECK(a(1, 2) == -1e3);

  {
    std::ofstream f(path);
    f << "1,2,3\n4,5\n";
  }
  CHECK_THROWS_AS(rpca::read_csv_matrix(path), rpca::IoError);

  {
    std::ofstream f(path);
    f << "1,two,3\n";
  }
  CHECK_THROWS_AS(rpca::read_csv_matrix(path), rpca::IoError);

  {
    std::ofstream f(path);
    f << "";
  }
  CHECK_THROWS_AS(rpca::read_csv_matrix(path), rpca::IoError);
}

TEST_CASE("trace files carry the fixed schema") {
  TempDir dir;
  rpca::IterationTrace trace;
  trace.records.push_back({0, 12.5, std::nullopt, 0.7});
  trace.records.push_back({1, 3.25, 0.125, 1.9});
  const std::string path = dir.file("trace.csv");
  rpca::write_trace_csv(path, trace);

  std::ifstream f(path);
  std::string line;
  REQUIRE(std::getline(f, line));
  CHECK(line == "iter,objective,ref_error,elapsed_ms");
  REQUIRE(std::getline(f, line));
  CHECK(line.substr(0, 7) == "0,12.5,");
  // Missing reference shows as an empty field.
  CHECK(line.find(",,") != std::string::npos);
  REQUIRE(std::getline(f, line));
  std::stringstream ss(line);
  std::string field;
  std::getline(ss, field, ',');
  CHECK(field == "1");
  std::getline(ss, field, ',');
  CHECK(std::stod(field) == 3.25);
  std::getline(ss, field, ',');
  CHECK(std::stod(field) == 0.125);
}

TEST_CASE("pgm images round-trip") {
  TempDir dir;
  rpca::PgmImage img;
  img.rows = 5;
  img.cols = 7;
  img.pixels.resize(35);
  for (std::size_t k = 0; k < img.pixels.size(); ++k)
    img.pixels[k] = static_cast<std::uint8_t>((k * 37) % 256);
  const std::string path = dir.file("img.pgm");
  rpca::write_pgm(path, img);
  rpca::PgmImage back = rpca::read_pgm(path);
  CHECK(back.rows == 5);
  CHECK(back.cols == 7);
  CHECK(back.pixels == img.pixels);
}

TEST_CASE("pgm reader understands comments and rejects other formats") {
  TempDir dir;
  const std::string path = dir.file("img.pgm");
  {
    std::ofstream f(path, std::ios::binary);
    f << "P5\n# a comment line\n3 2\n255\n";
    f.write("abcdef", 6);
  }
  rpca::PgmImage img = rpca::read_pgm(path);
  CHECK(img.rows == 2);
  CHECK(img.cols == 3);
  CHECK(img.pixels[0] == 'a');

  {
    std::ofstream f(path, std::ios::binary);
    f << "P2\n3 2\n255\n1 2 3 4 5 6\n";
  }
  CHECK_THROWS_AS(rpca::read_pgm(path), rpca::IoError);

  {
    std::ofstream f(path, std::ios::binary);
    f << "P5\n3 2\n65535\n";
    f.write("abcdefabcdef", 12);
  }
  CHECK_THROWS_AS(rpca::read_pgm(path), rpca::IoError);

  {
    std::ofstream f(path, std::ios::binary);
    f << "P5\n3 2\n255\n";
    f.write("abc", 3);  // not enough pixel bytes
  }
  CHECK_THROWS_AS(rpca::read_pgm(path), rpca::IoError);
}

TEST_CASE("frames scale to the full 8-bit range") {
  Matrix frame(2, 3);
  frame << -1.0, 0.0, 1.0, 0.5, -0.5, 1.0;
  rpca::PgmImage img = rpca::frame_to_pgm(frame);
  REQUIRE(img.rows == 2);
  REQUIRE(img.cols == 3);
  CHECK(img.pixels[0] == 0);    // min
  CHECK(img.pixels[2] == 255);  // max
  CHECK(img.pixels[1] == 128);  // rounds half up at the midpoint

  rpca::PgmImage flat = rpca::frame_to_pgm(Matrix::Constant(3, 3, 4.2));
  for (auto p : flat.pixels) CHECK(p == 0);
}

TEST_CASE("writes to unwritable locations raise io errors") {
  std::mt19937 gen(95);
  Matrix a = testsup::random_matrix(3, 3, gen);
  CHECK_THROWS_AS(rpca::write_matrix("/nonexistent_dir_zz/a.rpcm", a),
                  rpca::IoError);
  rpca::IterationTrace trace;
  CHECK_THROWS_AS(rpca::write_trace_csv("/nonexistent_dir_zz/t.csv", trace),
                  rpca::IoError);
}
