#pragma once

#include <string>
#include <vector>

#include "wsunsal/solver.hpp"

namespace wsun {

enum class WeightMode { identity, euclidean, kernel_angle };

// Space in which the neighbor cosine is measured. The unmixing kernel does
// not have to match: the default keeps neighbor selection in the original
// spectral space even for a kernelized pipeline.
enum class NeighborSpace { original, kernel };

struct PostprocessConfig {
  int window = 9;          // N, odd
  int neighbor_count = 55; // M, saturates at the clipped window size
  NeighborSpace space = NeighborSpace::original;

  void validate() const;
};

// Per-pixel, per-class reconstruction residuals. Pixel-major storage, class
// index fastest.
struct ResidualField {
  int height = 0;
  int width = 0;
  int class_count = 0;
  std::vector<double> residuals;

  double at(int r, int c, int cls) const {
    return residuals[(static_cast<size_t>(r) * width + c) * class_count + cls];
  }
  std::span<const double> pixel(int r, int c) const {
    return {residuals.data() + (static_cast<size_t>(r) * width + c) * class_count,
            static_cast<size_t>(class_count)};
  }
};

struct ClassMap {
  int height = 0;
  int width = 0;
  std::vector<int> predicted;  // 1..C per pixel (0 only in masked on-disk maps)

  int at(int r, int c) const { return predicted[static_cast<size_t>(r) * width + c]; }
};

// Counters for the degenerate cases that are tolerated rather than fatal.
struct SceneStats {
  long long degenerate_weight_pixels = 0;  // all-zero distances, weights floored
  long long zero_norm_neighbors_skipped = 0;
};

// Unmixes every pixel (labeled or not): builds Gamma per weight_mode, solves,
// and records one residual per class. Pixels are independent, so the output
// is identical for any thread count.
ResidualField unmix_scene(const HsiCube& cube, const Dictionary& dict, const KernelSpec& spec,
                          WeightMode mode, const SolverConfig& cfg, int threads = 1,
                          SceneStats* stats = nullptr);

// Argmin over classes; ties go to the lowest class index.
ClassMap raw_classify(const ResidualField& field);

// The min(M, available) window pixels closest to the center by
// 1 - cos(angle), ties broken by raster order. The center scores 0 and is
// always selected; zero-norm non-center pixels are skipped. When `spec` is
// non-null the cosine is evaluated in its kernel-induced space.
std::vector<PixelCoord> select_neighbors(const HsiCube& cube, PixelCoord center, int window,
                                         int count, const KernelSpec* spec = nullptr,
                                         SceneStats* stats = nullptr);

// Per pixel, sums each class's residuals over the selected neighbors and
// predicts the class with the minimum sum.
ClassMap spatial_postprocess(const ResidualField& field, const HsiCube& cube,
                             const PostprocessConfig& cfg, const KernelSpec* spec = nullptr,
                             int threads = 1, SceneStats* stats = nullptr);

// Checkpoint format: "WSRF" magic, u32 version, i32 height/width/class_count,
// then f32 little-endian residuals, pixel-major then class.
void write_residual_field(const ResidualField& field, const std::string& path);
ResidualField read_residual_field(const std::string& path);

// Portable graymap (P5) with the class index stored directly. With `labels`,
// unlabeled pixels are written as 0 (display variant); without, every pixel
// carries its prediction.
void write_class_map(const ClassMap& map, const std::string& path,
                     const LabelMap* labels = nullptr);
ClassMap read_class_map(const std::string& path);

}  // namespace wsun
