#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tda/raster.hpp"

namespace tda {

// Binary PGM (P5, maxval 255) codecs. Images keep raw 0..255 intensities,
// masks map 255 -> 1, probability maps are divided by 255.
GrayImage load_gray(const std::filesystem::path& path);
BinaryMask load_mask(const std::filesystem::path& path);
ProbMap load_prob(const std::filesystem::path& path);

// Values are rounded to the nearest byte and clamped to [0, 255].
void save_gray(const std::filesystem::path& path, const GrayImage& image);
void save_mask(const std::filesystem::path& path, const BinaryMask& mask);
void save_prob(const std::filesystem::path& path, const ProbMap& prob);

// Decodes an in-memory P5 buffer. Exposed for tests and for callers that
// already hold the bytes.
struct PgmBytes {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};
PgmBytes decode_pgm(const std::vector<char>& bytes);
std::string encode_pgm(int width, int height, std::span<const std::uint8_t> pixels);

enum class Split { train, test };

const char* to_string(Split split);

struct ManifestEntry {
  std::string image_path;
  std::string mask_path;
  Split split = Split::train;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

// CSV manifest with header `image_path,mask_path,split`. Paths are stored as
// written; resolve() maps them against the manifest's directory.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& p) const;
  std::vector<ManifestEntry> split(Split which) const;
};

DatasetManifest load_manifest(const std::filesystem::path& path);
DatasetManifest parse_manifest(const std::string& text, std::filesystem::path base_dir = {});
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

// A loaded (image, mask) pair; dimensions are checked on load.
struct Sample {
  GrayImage image;
  BinaryMask mask;
};

Sample load_sample(const DatasetManifest& manifest, const ManifestEntry& entry);

}  // namespace tda
