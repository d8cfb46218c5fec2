#include "tda/io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace tda {

namespace {

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<char>& bytes) : bytes_(bytes) {}

  // Skips whitespace and `#` comments, then reads a decimal field.
  int next_int(const char* field) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      throw FormatError(std::string("PGM header: expected ") + field);
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000) throw FormatError(std::string("PGM header: ") + field + " too large");
      ++pos_;
    }
    return static_cast<int>(value);
  }

  void expect_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw FormatError("PGM header: missing whitespace after maxval");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<char>& bytes_;
  std::size_t pos_ = 2;
};

std::uint8_t to_byte(double v) {
  if (!std::isfinite(v)) return 0;
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

std::string trim_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

PgmBytes decode_pgm(const std::vector<char>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw FormatError("not a binary PGM (missing P5 magic)");
  }
  HeaderReader reader(bytes);
  PgmBytes out;
  out.width = reader.next_int("width");
  out.height = reader.next_int("height");
  const int maxval = reader.next_int("maxval");
  if (out.width < 1 || out.height < 1) throw FormatError("PGM dimensions must be positive");
  if (maxval != 255) throw FormatError("PGM maxval must be 255, got " + std::to_string(maxval));
  reader.expect_single_space();

  const std::size_t n = static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height);
  if (bytes.size() - reader.pos() < n) {
    throw FormatError("PGM payload truncated: expected " + std::to_string(n) + " bytes, got " +
                      std::to_string(bytes.size() - reader.pos()));
  }
  const auto* begin = reinterpret_cast<const std::uint8_t*>(bytes.data()) + reader.pos();
  out.pixels.assign(begin, begin + n);
  return out;
}

std::string encode_pgm(int width, int height, std::span<const std::uint8_t> pixels) {
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
  return out;
}

GrayImage load_gray(const std::filesystem::path& path) {
  auto pgm = decode_pgm(read_file(path));
  std::vector<double> data(pgm.pixels.begin(), pgm.pixels.end());
  return GrayImage(pgm.width, pgm.height, std::move(data));
}

BinaryMask load_mask(const std::filesystem::path& path) {
  auto pgm = decode_pgm(read_file(path));
  for (auto& v : pgm.pixels) {
    if (v == 255) {
      v = 1;
    } else if (v != 0) {
      throw FormatError("mask " + path.string() + " contains value " + std::to_string(v) +
                        " (expected 0 or 255)");
    }
  }
  return BinaryMask(pgm.width, pgm.height, std::move(pgm.pixels));
}

ProbMap load_prob(const std::filesystem::path& path) {
  auto pgm = decode_pgm(read_file(path));
  std::vector<double> data;
  data.reserve(pgm.pixels.size());
  for (auto v : pgm.pixels) data.push_back(static_cast<double>(v) / 255.0);
  return ProbMap(pgm.width, pgm.height, std::move(data));
}

void save_gray(const std::filesystem::path& path, const GrayImage& image) {
  std::vector<std::uint8_t> px;
  px.reserve(image.size());
  for (double v : image.values()) px.push_back(to_byte(v));
  write_file(path, encode_pgm(image.width(), image.height(), px));
}

void save_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  std::vector<std::uint8_t> px;
  px.reserve(mask.size());
  for (auto v : mask.values()) px.push_back(v ? 255 : 0);
  write_file(path, encode_pgm(mask.width(), mask.height(), px));
}

void save_prob(const std::filesystem::path& path, const ProbMap& prob) {
  std::vector<std::uint8_t> px;
  px.reserve(prob.size());
  for (double v : prob.values()) px.push_back(to_byte(v * 255.0));
  write_file(path, encode_pgm(prob.width(), prob.height(), px));
}

const char* to_string(Split split) {
  return split == Split::train ? "train" : "test";
}

std::filesystem::path DatasetManifest::resolve(const std::string& p) const {
  std::filesystem::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path;
  return base_dir / path;
}

std::vector<ManifestEntry> DatasetManifest::split(Split which) const {
  std::vector<ManifestEntry> out;
  for (const auto& e : entries) {
    if (e.split == which) out.push_back(e);
  }
  return out;
}

DatasetManifest parse_manifest(const std::string& text, std::filesystem::path base_dir) {
  DatasetManifest manifest;
  manifest.base_dir = std::move(base_dir);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("manifest is empty (missing header)");
  line = trim_cr(line);
  // Tolerate a UTF-8 byte-order mark.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (line != "image_path,mask_path,split") {
    throw FormatError("manifest header must be 'image_path,mask_path,split', got '" + line + "'");
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3) {
      throw FormatError("manifest line " + std::to_string(lineno) + ": expected 3 fields");
    }
    ManifestEntry entry{fields[0], fields[1], Split::train};
    if (entry.image_path.empty() || entry.mask_path.empty()) {
      throw FormatError("manifest line " + std::to_string(lineno) + ": empty path");
    }
    if (fields[2] == "train") {
      entry.split = Split::train;
    } else if (fields[2] == "test") {
      entry.split = Split::test;
    } else {
      throw FormatError("manifest line " + std::to_string(lineno) + ": unknown split '" +
                        fields[2] + "'");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_manifest(std::string(bytes.begin(), bytes.end()), path.parent_path());
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::string out = "image_path,mask_path,split\n";
  for (const auto& e : manifest.entries) {
    out += e.image_path + "," + e.mask_path + "," + to_string(e.split) + "\n";
  }
  write_file(path, out);
}

Sample load_sample(const DatasetManifest& manifest, const ManifestEntry& entry) {
  Sample s{load_gray(manifest.resolve(entry.image_path)),
           load_mask(manifest.resolve(entry.mask_path))};
  require_same_shape(s.image, s.mask, ("sample " + entry.image_path).c_str());
  return s;
}

}  // namespace tda
