#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wsunsal/errors.hpp"

namespace wsun {

struct PixelCoord {
  int row = 0;
  int col = 0;

  bool operator==(const PixelCoord&) const = default;
};

// Hyperspectral scene. Values are kept band-interleaved-by-pixel in memory
// (band index fastest) so a pixel's spectrum is contiguous; the on-disk
// format is band-sequential f32 (see load_cube / write_cube).
struct HsiCube {
  int height = 0;
  int width = 0;
  int bands = 0;
  std::vector<double> values;

  double& at(int r, int c, int b) {
    return values[(static_cast<size_t>(r) * width + c) * bands + b];
  }
  double at(int r, int c, int b) const {
    return values[(static_cast<size_t>(r) * width + c) * bands + b];
  }
  std::span<const double> spectrum(int r, int c) const {
    return {values.data() + (static_cast<size_t>(r) * width + c) * bands,
            static_cast<size_t>(bands)};
  }
  size_t pixel_count() const { return static_cast<size_t>(height) * width; }
};

// Ground truth. 0 = unlabeled background, 1..class_count = class index.
// Present class indices must form a contiguous range starting at 1.
struct LabelMap {
  int height = 0;
  int width = 0;
  int class_count = 0;
  std::vector<int> labels;

  int at(int r, int c) const { return labels[static_cast<size_t>(r) * width + c]; }
};

struct SplitResult {
  std::vector<PixelCoord> train_pixels;
  std::vector<PixelCoord> test_pixels;
  uint64_t seed = 0;
};

// Training spectra as dictionary columns, grouped contiguously by class.
// Column j is contiguous in `columns` (length band_count).
struct Dictionary {
  int band_count = 0;
  int column_count = 0;
  int class_count = 0;
  std::vector<double> columns;
  std::vector<int> column_class;                     // 1-based class per column
  std::vector<std::pair<int, int>> class_ranges;     // per class, half-open [begin, end)

  std::span<const double> column(int j) const {
    return {columns.data() + static_cast<size_t>(j) * band_count,
            static_cast<size_t>(band_count)};
  }
};

// Cube file: raw band-sequential 32-bit little-endian floats plus a sidecar
// text header with key=value lines (height, width, bands).
HsiCube load_cube(const std::string& data_path, const std::string& header_path);
void write_cube(const HsiCube& cube, const std::string& data_path, const std::string& header_path);

// Text grid of whitespace-separated labels, row-major; grid shape is taken
// from the file itself.
LabelMap load_labels(const std::string& path);
// Binary variant: u16 little-endian grid with the cube-style sidecar header.
LabelMap load_labels_binary(const std::string& data_path, const std::string& header_path);
void write_labels(const LabelMap& labels, const std::string& path);

// Removes the listed 1-indexed bands; remaining band order is preserved.
HsiCube remove_bands(const HsiCube& cube, const std::vector<int>& bands_1indexed);

// Per class with m labeled pixels, samples exactly max(1, round(fraction*m))
// training pixels without replacement (mt19937_64 + rejection-sampled
// Fisher-Yates, so the split is reproducible across platforms).
SplitResult stratified_split(const LabelMap& labels, double fraction, uint64_t seed);

void write_split(const SplitResult& split, const std::string& path);
SplitResult read_split(const std::string& path);

Dictionary build_dictionary(const HsiCube& cube, const SplitResult& split, const LabelMap& labels);

// Per-band box mean over an odd window clipped at image borders.
HsiCube mean_prefilter(const HsiCube& cube, int window);

// Scales every pixel spectrum to unit L2 norm; zero spectra are left as-is.
HsiCube normalize_unit_l2(const HsiCube& cube);

}  // namespace wsun
