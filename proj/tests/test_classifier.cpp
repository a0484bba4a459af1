#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "util.hpp"
#include "wsunsal/classifier.hpp"
#include "wsunsal/rng.hpp"

using namespace wsun;

namespace {

Dictionary dictionary_of_columns(int bands, const std::vector<std::vector<double>>& cols,
                                 const std::vector<int>& classes) {
  Dictionary dict;
  dict.band_count = bands;
  dict.column_count = static_cast<int>(cols.size());
  dict.class_count = *std::max_element(classes.begin(), classes.end());
  for (const auto& col : cols) dict.columns.insert(dict.columns.end(), col.begin(), col.end());
  dict.column_class = classes;
  dict.class_ranges.resize(static_cast<size_t>(dict.class_count));
  int begin = 0;
  for (int c = 1; c <= dict.class_count; ++c) {
    int count = 0;
    for (int v : classes) {
      if (v == c) ++count;
    }
    dict.class_ranges[static_cast<size_t>(c - 1)] = {begin, begin + count};
    begin += count;
  }
  return dict;
}

HsiCube cube_of_pixels(int h, int w, int bands, const std::vector<std::vector<double>>& pixels) {
  HsiCube cube;
  cube.height = h;
  cube.width = w;
  cube.bands = bands;
  for (const auto& p : pixels) cube.values.insert(cube.values.end(), p.begin(), p.end());
  return cube;
}

ResidualField field_from(int h, int w, int classes, const std::vector<double>& values) {
  ResidualField f;
  f.height = h;
  f.width = w;
  f.class_count = classes;
  f.residuals = values;
  return f;
}

}  // namespace

TEST_CASE("1x1 scene whose pixel is a class-3 column") {
  const Dictionary dict = dictionary_of_columns(
      2, {{1, 0}, {0, 1}, {0.6, 0.8}}, {1, 2, 3});
  const HsiCube cube = cube_of_pixels(1, 1, 2, {{0.6, 0.8}});
  SolverConfig cfg;
  cfg.lambda = 1e-4;
  cfg.tol = 1e-10;
  cfg.max_iter = 5000;
  const ResidualField field =
      unmix_scene(cube, dict, KernelSpec{}, WeightMode::euclidean, cfg);
  REQUIRE(field.class_count == 3);
  const auto res = field.pixel(0, 0);
  CHECK(res[2] <= 1e-6);
  CHECK(res[2] < res[0]);
  CHECK(res[2] < res[1]);
  CHECK(raw_classify(field).at(0, 0) == 3);
}

TEST_CASE("single-class dictionary yields residual vectors of length 1") {
  const Dictionary dict = dictionary_of_columns(2, {{1, 1}}, {1});
  const HsiCube cube = cube_of_pixels(1, 2, 2, {{1, 1}, {0.5, 0.2}});
  const ResidualField field =
      unmix_scene(cube, dict, KernelSpec{}, WeightMode::identity, SolverConfig{});
  CHECK(field.class_count == 1);
  CHECK(field.residuals.size() == 2);
}

TEST_CASE("scene unmixing equals a loop of standalone per-pixel solves") {
  Rng rng(41);
  std::vector<std::vector<double>> cols;
  std::vector<int> classes;
  for (int j = 0; j < 6; ++j) {
    std::vector<double> col(5);
    for (auto& v : col) v = rng.next_normal();
    cols.push_back(col);
    classes.push_back(j < 3 ? 1 : 2);
  }
  const Dictionary dict = dictionary_of_columns(5, cols, classes);
  std::vector<std::vector<double>> pixels;
  for (int p = 0; p < 16; ++p) {
    std::vector<double> pixel(5);
    for (auto& v : pixel) v = rng.next_normal();
    pixels.push_back(pixel);
  }
  const HsiCube cube = cube_of_pixels(4, 4, 5, pixels);

  SolverConfig cfg;
  cfg.lambda = 0.05;
  const KernelSpec spec;
  const ResidualField field = unmix_scene(cube, dict, spec, WeightMode::euclidean, cfg);

  const GramBundle gram = gram_matrix(spec, dict);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const auto y = cube.spectrum(r, c);
      const GammaWeights gamma = euclidean_weights(dict, y);
      const auto g = cross_vector(spec, dict, y);
      const double k_yy = kernel_eval(spec, y, y);
      const UnmixResult sol = admm_weighted_sunsal(gram, g, k_yy, gamma, cfg);
      for (int cls = 0; cls < 2; ++cls) {
        const double expected =
            class_residual(gram, g, k_yy, sol.x, dict.class_ranges[static_cast<size_t>(cls)]);
        CHECK(field.at(r, c, cls) == expected);  // same code path, bitwise equal
      }
    }
  }
}

TEST_CASE("serial and multi-threaded unmixing agree bitwise") {
  Rng rng(43);
  std::vector<std::vector<double>> cols;
  for (int j = 0; j < 4; ++j) {
    std::vector<double> col(3);
    for (auto& v : col) v = rng.next_normal();
    cols.push_back(col);
  }
  const Dictionary dict = dictionary_of_columns(3, cols, {1, 1, 2, 2});
  std::vector<std::vector<double>> pixels;
  for (int p = 0; p < 25; ++p) {
    std::vector<double> pixel(3);
    for (auto& v : pixel) v = rng.next_normal();
    pixels.push_back(pixel);
  }
  const HsiCube cube = cube_of_pixels(5, 5, 3, pixels);
  SolverConfig cfg;
  cfg.lambda = 0.01;
  const ResidualField serial = unmix_scene(cube, dict, KernelSpec{}, WeightMode::euclidean, cfg, 1);
  const ResidualField threaded =
      unmix_scene(cube, dict, KernelSpec{}, WeightMode::euclidean, cfg, 4);
  CHECK(serial.residuals == threaded.residuals);
}

TEST_CASE("raw classification argmin with lowest-index tie break") {
  const ResidualField field = field_from(1, 3, 3,
                                         {0.2, 0.1, 0.3,    // -> class 2
                                          0.1, 0.1, 0.5,    // tie -> class 1
                                          0.9, 0.8, 0.05}); // -> class 3
  const ClassMap map = raw_classify(field);
  CHECK(map.at(0, 0) == 2);
  CHECK(map.at(0, 1) == 1);
  CHECK(map.at(0, 2) == 3);
}

TEST_CASE("neighbor selection") {
  SUBCASE("window 1 is exactly the center") {
    const HsiCube cube = cube_of_pixels(2, 2, 2, {{1, 0}, {0, 1}, {1, 1}, {2, 1}});
    const auto n = select_neighbors(cube, {1, 1}, 1, 5);
    REQUIRE(n.size() == 1);
    CHECK(n[0] == PixelCoord{1, 1});
  }
  SUBCASE("constant image ties resolve in raster order") {
    HsiCube cube;
    cube.height = 3;
    cube.width = 3;
    cube.bands = 2;
    cube.values.assign(18, 1.0);
    const auto n = select_neighbors(cube, {1, 1}, 3, 4);
    REQUIRE(n.size() == 4);
    CHECK(n[0] == PixelCoord{0, 0});
    CHECK(n[1] == PixelCoord{0, 1});
    CHECK(n[2] == PixelCoord{0, 2});
    CHECK(n[3] == PixelCoord{1, 0});
  }
  SUBCASE("distinct angles match a full-sort oracle") {
    Rng rng(47);
    std::vector<std::vector<double>> pixels;
    for (int p = 0; p < 9; ++p) {
      std::vector<double> v(3);
      for (auto& x : v) x = 0.2 + rng.next_double();
      pixels.push_back(v);
    }
    const HsiCube cube = cube_of_pixels(3, 3, 3, pixels);
    const PixelCoord center{1, 1};
    const auto y_c = cube.spectrum(1, 1);
    auto cosine = [&](int r, int c) {
      const auto q = cube.spectrum(r, c);
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (int b = 0; b < 3; ++b) {
        dot += y_c[static_cast<size_t>(b)] * q[static_cast<size_t>(b)];
        na += y_c[static_cast<size_t>(b)] * y_c[static_cast<size_t>(b)];
        nb += q[static_cast<size_t>(b)] * q[static_cast<size_t>(b)];
      }
      return dot / std::sqrt(na * nb);
    };
    std::vector<std::pair<double, int>> oracle;  // (score, raster)
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        const double score = (r == 1 && c == 1) ? 0.0 : 1.0 - std::min(1.0, cosine(r, c));
        oracle.push_back({score, r * 3 + c});
      }
    }
    std::sort(oracle.begin(), oracle.end());
    for (int m = 1; m <= 9; ++m) {
      const auto got = select_neighbors(cube, center, 3, m);
      REQUIRE(static_cast<int>(got.size()) == m);
      for (int i = 0; i < m; ++i) {
        CHECK(got[static_cast<size_t>(i)].row == oracle[static_cast<size_t>(i)].second / 3);
        CHECK(got[static_cast<size_t>(i)].col == oracle[static_cast<size_t>(i)].second % 3);
      }
    }
  }
  SUBCASE("zero-norm neighbors are skipped, center survives") {
    HsiCube cube = cube_of_pixels(1, 3, 2, {{0, 0}, {1, 1}, {0, 0}});
    SceneStats stats;
    const auto n = select_neighbors(cube, {0, 1}, 3, 3, nullptr, &stats);
    REQUIRE(n.size() == 1);
    CHECK(n[0] == PixelCoord{0, 1});
    CHECK(stats.zero_norm_neighbors_skipped == 2);
  }
  SUBCASE("border windows clip without going out of bounds") {
    HsiCube cube;
    cube.height = 4;
    cube.width = 4;
    cube.bands = 1;
    cube.values.assign(16, 2.0);
    const auto corner = select_neighbors(cube, {0, 0}, 5, 25);
    CHECK(corner.size() == 9);  // 3x3 clipped window
    const auto edge = select_neighbors(cube, {0, 2}, 3, 9);
    CHECK(edge.size() == 6);
  }
}

TEST_CASE("postprocessing") {
  SUBCASE("N=1, M=1 equals raw classification") {
    Rng rng(53);
    ResidualField field = field_from(4, 5, 3, std::vector<double>(60));
    for (auto& v : field.residuals) v = rng.next_double();
    HsiCube cube;
    cube.height = 4;
    cube.width = 5;
    cube.bands = 2;
    cube.values.resize(40);
    for (auto& v : cube.values) v = 0.1 + rng.next_double();
    PostprocessConfig cfg;
    cfg.window = 1;
    cfg.neighbor_count = 1;
    const ClassMap post = spatial_postprocess(field, cube, cfg);
    const ClassMap raw = raw_classify(field);
    CHECK(post.predicted == raw.predicted);
  }
  SUBCASE("a field constant across pixels is unchanged by postprocessing") {
    ResidualField field = field_from(3, 3, 2, std::vector<double>(18));
    for (int p = 0; p < 9; ++p) {
      field.residuals[static_cast<size_t>(p) * 2] = 0.9;
      field.residuals[static_cast<size_t>(p) * 2 + 1] = 0.3;
    }
    HsiCube cube;
    cube.height = 3;
    cube.width = 3;
    cube.bands = 1;
    cube.values.assign(9, 1.0);
    PostprocessConfig cfg;
    cfg.window = 3;
    cfg.neighbor_count = 4;
    const ClassMap post = spatial_postprocess(field, cube, cfg);
    const ClassMap raw = raw_classify(field);
    CHECK(post.predicted == raw.predicted);
  }
  SUBCASE("hand-built 3x3 residual sums") {
    // constant image, N=3, M=3: every pixel sums the first 3 raster neighbors
    HsiCube cube;
    cube.height = 3;
    cube.width = 3;
    cube.bands = 1;
    cube.values.assign(9, 1.0);
    std::vector<double> residuals = {
        0.9, 0.1,  0.2, 0.8,  0.1, 0.9,
        0.5, 0.5,  0.4, 0.6,  0.3, 0.7,
        0.2, 0.8,  0.6, 0.4,  0.5, 0.5,
    };
    const ResidualField field = field_from(3, 3, 2, residuals);
    PostprocessConfig cfg;
    cfg.window = 3;
    cfg.neighbor_count = 3;
    const ClassMap post = spatial_postprocess(field, cube, cfg);
    // center pixel: neighbors are raster (0,0), (0,1), (0,2):
    // class sums = (0.9+0.2+0.1, 0.1+0.8+0.9) = (1.2, 1.8) -> class 1
    CHECK(post.at(1, 1) == 1);
    // corner (0,0): clipped window, neighbors (0,0), (0,1), (1,0):
    // sums = (0.9+0.2+0.5, 0.1+0.8+0.5) = (1.6, 1.4) -> class 2
    CHECK(post.at(0, 0) == 2);
  }
  SUBCASE("argmin is invariant to per-pixel constant offsets") {
    Rng rng(59);
    ResidualField field = field_from(3, 4, 3, std::vector<double>(36));
    for (auto& v : field.residuals) v = rng.next_double();
    ResidualField shifted = field;
    for (int p = 0; p < 12; ++p) {
      const double off = rng.next_double();
      for (int c = 0; c < 3; ++c) shifted.residuals[static_cast<size_t>(p) * 3 + c] += off;
    }
    CHECK(raw_classify(field).predicted == raw_classify(shifted).predicted);
  }
}

TEST_CASE("residual field dump/load round-trip (f32 payload)") {
  testutil::TempDir tmp("field");
  Rng rng(61);
  ResidualField field = field_from(2, 3, 4, std::vector<double>(24));
  for (auto& v : field.residuals) v = rng.next_double() * 10.0;
  write_residual_field(field, tmp.file("f.bin"));
  const ResidualField back = read_residual_field(tmp.file("f.bin"));
  CHECK(back.height == 2);
  CHECK(back.width == 3);
  CHECK(back.class_count == 4);
  for (size_t i = 0; i < field.residuals.size(); ++i) {
    CHECK(back.residuals[i] == static_cast<double>(static_cast<float>(field.residuals[i])));
  }

  CHECK_THROWS_AS(read_residual_field(tmp.file("missing.bin")), Error);
}

TEST_CASE("class map PGM round-trip, with and without masking") {
  testutil::TempDir tmp("pgm");
  ClassMap map;
  map.height = 2;
  map.width = 3;
  map.predicted = {1, 2, 3, 3, 2, 1};
  write_class_map(map, tmp.file("m.pgm"));
  const ClassMap back = read_class_map(tmp.file("m.pgm"));
  CHECK(back.predicted == map.predicted);

  LabelMap labels;
  labels.height = 2;
  labels.width = 3;
  labels.class_count = 3;
  labels.labels = {1, 0, 3, 0, 2, 1};
  write_class_map(map, tmp.file("masked.pgm"), &labels);
  const ClassMap masked = read_class_map(tmp.file("masked.pgm"));
  CHECK(masked.predicted == std::vector<int>{1, 0, 3, 0, 2, 1});
}
