#include <doctest.h>

#include <fstream>

#include "oracles.hpp"
#include "tda/io.hpp"

using namespace tda;

namespace {

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

std::string pgm(int w, int h, std::vector<std::uint8_t> px) { return encode_pgm(w, h, px); }

}  // namespace

TEST_CASE("load_gray decodes a 2x2 P5 byte for byte") {
  const auto dir = oracle::temp_dir("io_gray");
  write_bytes(dir / "a.pgm", pgm(2, 2, {0, 128, 255, 64}));
  const auto img = load_gray(dir / "a.pgm");
  CHECK(img.width() == 2);
  CHECK(img.height() == 2);
  CHECK(std::vector<double>(img.values().begin(), img.values().end()) ==
        std::vector<double>{0, 128, 255, 64});
}

TEST_CASE("load_gray rejects malformed files") {
  const auto dir = oracle::temp_dir("io_bad");
  write_bytes(dir / "empty.pgm", "");
  CHECK_THROWS_AS(load_gray(dir / "empty.pgm"), FormatError);
  write_bytes(dir / "p2.pgm", "P2\n2 2\n255\n0 0 0 0\n");
  CHECK_THROWS_AS(load_gray(dir / "p2.pgm"), FormatError);
  write_bytes(dir / "max.pgm", "P5\n2 2\n65535\n" + std::string(8, '\0'));
  CHECK_THROWS_AS(load_gray(dir / "max.pgm"), FormatError);
  write_bytes(dir / "short.pgm", "P5\n4 4\n255\n" + std::string(15, '\0'));
  CHECK_THROWS_AS(load_gray(dir / "short.pgm"), FormatError);
  CHECK_THROWS_AS(load_gray(dir / "missing.pgm"), IoError);
}

TEST_CASE("PGM header comments are skipped before maxval") {
  std::string bytes = "P5\n# produced by a camera\n3 1 # width height\n255\n";
  bytes += std::string{'\x01', '\x02', '\x03'};
  const auto d = decode_pgm(std::vector<char>(bytes.begin(), bytes.end()));
  CHECK(d.width == 3);
  CHECK(d.pixels == std::vector<std::uint8_t>{1, 2, 3});
}

TEST_CASE("gray save/load round trip at 256x256") {
  const auto dir = oracle::temp_dir("io_rt");
  auto vals = oracle::random_values(256 * 256, 0, 255, 11);
  for (auto& v : vals) v = std::round(v);
  const GrayImage img(256, 256, vals);
  save_gray(dir / "rt.pgm", img);
  CHECK(load_gray(dir / "rt.pgm") == img);
}

TEST_CASE("load_mask maps 255 to 1 and rejects soft values") {
  const auto dir = oracle::temp_dir("io_mask");
  write_bytes(dir / "m.pgm", pgm(4, 1, {0, 255, 255, 0}));
  const auto m = load_mask(dir / "m.pgm");
  CHECK(std::vector<std::uint8_t>(m.values().begin(), m.values().end()) ==
        std::vector<std::uint8_t>{0, 1, 1, 0});

  write_bytes(dir / "soft.pgm", pgm(2, 1, {0, 128}));
  CHECK_THROWS_AS(load_mask(dir / "soft.pgm"), FormatError);

  write_bytes(dir / "zero.pgm", pgm(16, 16, std::vector<std::uint8_t>(256, 0)));
  const auto z = load_mask(dir / "zero.pgm");
  CHECK(z.size() == 256);
  CHECK(foreground_count(z) == 0);
}

TEST_CASE("mask round trip preserves the binary domain") {
  const auto dir = oracle::temp_dir("io_mask_rt");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto m = oracle::random_mask(17, 9, 0.3, seed);
    save_mask(dir / "m.pgm", m);
    CHECK(load_mask(dir / "m.pgm") == m);
  }
}

TEST_CASE("probability maps are bytes divided by 255") {
  const auto dir = oracle::temp_dir("io_prob");
  write_bytes(dir / "p.pgm", pgm(3, 1, {0, 51, 255}));
  const auto p = load_prob(dir / "p.pgm");
  CHECK(p[0] == 0.0);
  CHECK(p[1] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(p[2] == 1.0);
}

TEST_CASE("manifest parsing") {
  SUBCASE("entries keep file order") {
    const auto m = parse_manifest("image_path,mask_path,split\na.pgm,am.pgm,train\nb.pgm,bm.pgm,test\n");
    REQUIRE(m.entries.size() == 2);
    CHECK(m.entries[0].image_path == "a.pgm");
    CHECK(m.entries[0].split == Split::train);
    CHECK(m.entries[1].mask_path == "bm.pgm");
    CHECK(m.entries[1].split == Split::test);
  }
  SUBCASE("CRLF line endings") {
    const auto m = parse_manifest("image_path,mask_path,split\r\na.pgm,am.pgm,test\r\n");
    REQUIRE(m.entries.size() == 1);
    CHECK(m.entries[0].split == Split::test);
  }
  SUBCASE("unknown split") {
    CHECK_THROWS_AS(parse_manifest("image_path,mask_path,split\na,b,validation\n"), FormatError);
  }
  SUBCASE("bad header") {
    CHECK_THROWS_AS(parse_manifest("image,mask,split\n"), FormatError);
  }
  SUBCASE("header only") {
    CHECK(parse_manifest("image_path,mask_path,split\n").entries.empty());
  }
}

TEST_CASE("manifest round trip and relative path resolution") {
  const auto dir = oracle::temp_dir("io_manifest");
  DatasetManifest m;
  m.entries = {{"img/a.pgm", "mask/a.pgm", Split::train}, {"/abs/b.pgm", "/abs/bm.pgm", Split::test}};
  save_manifest(dir / "m.csv", m);
  const auto back = load_manifest(dir / "m.csv");
  CHECK(back.entries == m.entries);
  CHECK(back.resolve("img/a.pgm") == dir / "img/a.pgm");
  CHECK(back.resolve("/abs/b.pgm") == std::filesystem::path("/abs/b.pgm"));
  CHECK_THROWS_AS(load_manifest(dir / "nope.csv"), IoError);
}

TEST_CASE("load_sample rejects image/mask size mismatch") {
  const auto dir = oracle::temp_dir("io_sample");
  save_gray(dir / "i.pgm", GrayImage(4, 4, 10.0));
  save_mask(dir / "m.pgm", BinaryMask(5, 4, 0));
  DatasetManifest m;
  m.base_dir = dir;
  m.entries = {{"i.pgm", "m.pgm", Split::train}};
  CHECK_THROWS_AS(load_sample(m, m.entries[0]), ShapeMismatch);
}

TEST_CASE("raster invariants") {
  CHECK_THROWS_AS(GrayImage(0, 3), ShapeMismatch);
  CHECK_THROWS_AS(GrayImage(2, 2, std::vector<double>(3)), ShapeMismatch);
  CHECK_THROWS_AS(BinaryMask(1, 1, std::vector<std::uint8_t>{2}), DomainError);
  const ProbMap p(2, 1, std::vector<double>{-0.5, 1.5});
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 1.0);
}
