#include <doctest.h>

#include "turbrest/image.hpp"
#include "turbrest/pgm.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>

namespace fs = std::filesystem;
using namespace turbrest;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("turbrest_imgseq_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Frame random_integer_frame(int w, int h, int max_value, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(0, max_value);
  ImageD px(h, w);
  for (Eigen::Index i = 0; i < px.size(); ++i) px.data()[i] = dist(rng);
  return Frame(std::move(px), max_value);
}

void write_raw(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

}  // namespace

TEST_CASE("frame invariants are enforced at construction") {
  CHECK_THROWS_AS(Frame(ImageD(0, 4), 255), DimensionError);
  CHECK_THROWS_AS(Frame(ImageD::Constant(2, 2, 1.0), 0), FormatError);
  CHECK_THROWS_AS(Frame(ImageD::Constant(2, 2, 1.0), 70000), FormatError);
  CHECK_THROWS_AS(Frame(ImageD::Constant(2, 2, 256.0), 255), FormatError);
  CHECK_THROWS_AS(Frame(ImageD::Constant(2, 2, -0.5), 255), FormatError);
  ImageD nan = ImageD::Zero(2, 2);
  nan(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Frame(nan, 255), FormatError);

  const Frame f = Frame::constant(5, 3, 7.0);
  CHECK(f.width() == 5);
  CHECK(f.height() == 3);
  CHECK(f(4, 2) == 7.0);
}

TEST_CASE("sequence requires matching frames") {
  CHECK_THROWS_AS(Sequence{std::vector<Frame>{}}, DimensionError);
  std::vector<Frame> mixed_depth{Frame::constant(4, 4, 1.0, 255), Frame::constant(4, 4, 1.0, 65535)};
  CHECK_THROWS_AS(Sequence{mixed_depth}, DimensionError);
}

TEST_CASE("save then load is the identity on integer frames") {
  TempDir dir;
  std::mt19937_64 rng(11);
  for (int max_value : {1, 255, 256, 4095, 65535}) {
    CAPTURE(max_value);
    const Frame f = random_integer_frame(13, 7, max_value, rng);
    const fs::path p = dir.path / ("f" + std::to_string(max_value) + ".pgm");
    save_frame(f, p);
    CHECK(load_frame(p) == f);
  }
  const Frame gray = Frame::constant(64, 64, 128.0);
  save_frame(gray, dir.path / "gray.pgm");
  CHECK(load_frame(dir.path / "gray.pgm") == gray);
}

TEST_CASE("16-bit samples are big-endian") {
  ImageD px(1, 2);
  px << 0x1234, 0x00ff;
  const std::string bytes = encode_pgm(Frame(px, 65535));
  const std::string raster = bytes.substr(bytes.size() - 4);
  CHECK(raster == std::string("\x12\x34\x00\xff", 4));
  CHECK(bytes.substr(0, bytes.size() - 4) == "P5\n2 1\n65535\n");
}

TEST_CASE("save rounds half up and clamps") {
  ImageD px(1, 4);
  px << 300.0, 10.6, 10.5, 10.49;
  const Frame f = Frame::clamped(px, 255);
  const Frame back = decode_pgm(encode_pgm(f));
  CHECK(back(0, 0) == 255.0);
  CHECK(back(1, 0) == 11.0);
  CHECK(back(2, 0) == 11.0);
  CHECK(back(3, 0) == 10.0);
}

TEST_CASE("decoder accepts comments and rejects malformed input") {
  const Frame f = decode_pgm(std::string("P5 # c\n2 # w\n1\n255\n\x05\x06", 21));
  CHECK(f.width() == 2);
  CHECK(f(1, 0) == 6.0);

  CHECK_THROWS_AS(decode_pgm("P2\n1 1\n255\n0"), FormatError);
  CHECK_THROWS_AS(decode_pgm(std::string("P5\n2 2\n255\n\x01\x02\x03", 14)), FormatError);
  CHECK_THROWS_AS(decode_pgm("P5\n0 2\n255\n"), FormatError);
  CHECK_THROWS_AS(decode_pgm(std::string("P5\n1 1\n10\n\x0b", 11)), FormatError);
  CHECK_THROWS_AS(decode_pgm(std::string("P5\n1 1\n255", 10)), FormatError);
}

TEST_CASE("load_sequence keeps path order and validates dimensions") {
  TempDir dir;
  std::vector<fs::path> paths;
  for (int n = 0; n < 3; ++n) {
    paths.push_back(dir.path / ("seq_" + std::to_string(n) + ".pgm"));
    save_frame(Frame::constant(64, 64, 10.0 * (3 - n)), paths.back());
  }
  Sequence seq = load_sequence(paths);
  CHECK(seq.size() == 3);
  CHECK(seq.width() == 64);
  for (int n = 0; n < 3; ++n) CHECK(seq[n](0, 0) == 10.0 * (3 - n));

  CHECK(load_sequence({paths[0]}).size() == 1);

  save_frame(Frame::constant(32, 32, 1.0), dir.path / "small.pgm");
  try {
    load_sequence({paths[0], dir.path / "small.pgm"});
    FAIL("expected a dimension error");
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("frame 1") != std::string::npos);
  }

  CHECK_THROWS_AS(load_sequence({dir.path / "missing.pgm"}), IoError);
  write_raw(dir.path / "bad.pgm", "not an image");
  CHECK_THROWS_AS(load_sequence({dir.path / "bad.pgm"}), FormatError);
}

TEST_CASE("patterns expand to lexicographically sorted matches") {
  TempDir dir;
  for (const char* name : {"b_10.pgm", "b_02.pgm", "b_01.pgm", "other.pgm"}) {
    save_frame(Frame::constant(2, 2, 0.0), dir.path / name);
  }
  const auto paths = expand_pattern((dir.path / "b_*.pgm").string());
  REQUIRE(paths.size() == 3);
  CHECK(paths[0].filename() == "b_01.pgm");
  CHECK(paths[1].filename() == "b_02.pgm");
  CHECK(paths[2].filename() == "b_10.pgm");
  CHECK(expand_pattern((dir.path / "other.pgm").string()).size() == 1);
  CHECK_THROWS_AS(expand_pattern((dir.path / "z_*.pgm").string()), IoError);
}

TEST_CASE("rmse") {
  CHECK(rmse(Frame::constant(3, 3, 4.0), Frame::constant(3, 3, 1.0)) == doctest::Approx(3.0));
  CHECK_THROWS_AS(rmse(Frame::constant(3, 3, 4.0), Frame::constant(2, 3, 1.0)), DimensionError);
}
