#include "wsunsal/classifier.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

namespace wsun {
namespace {

void u32_to_le(uint32_t v, unsigned char* p) {
  p[0] = static_cast<unsigned char>(v & 0xff);
  p[1] = static_cast<unsigned char>((v >> 8) & 0xff);
  p[2] = static_cast<unsigned char>((v >> 16) & 0xff);
  p[3] = static_cast<unsigned char>((v >> 24) & 0xff);
}

uint32_t u32_from_le(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(pixel_index) over [0, count) on `threads` workers. Exceptions are
// captured and the first one is rethrown after all workers stop.
template <typename Fn>
void parallel_for_pixels(size_t count, int threads, Fn&& fn) {
  threads = std::min<size_t>(resolve_threads(threads), count == 0 ? 1 : count);
  if (threads <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double original_cosine(std::span<const double> a, std::span<const double> b,
                       double norm_a, double norm_b) {
  double dot = 0.0;
  for (size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot / (norm_a * norm_b), -1.0, 1.0);
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

void PostprocessConfig::validate() const {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::even_window, "postprocess: window must be odd and >= 1");
  }
  if (neighbor_count < 1 || neighbor_count > window * window) {
    throw Error(ErrorCode::invalid_config, "postprocess: need 1 <= neighbors <= window^2");
  }
}

ResidualField unmix_scene(const HsiCube& cube, const Dictionary& dict, const KernelSpec& spec,
                          WeightMode mode, const SolverConfig& cfg, int threads,
                          SceneStats* stats) {
  if (cube.bands != dict.band_count) {
    throw Error(ErrorCode::dimension_mismatch, "unmix_scene: cube bands != dictionary bands");
  }
  spec.validate();
  cfg.validate();

  const GramBundle gram = gram_matrix(spec, dict);
  ResidualField field;
  field.height = cube.height;
  field.width = cube.width;
  field.class_count = dict.class_count;
  field.residuals.assign(cube.pixel_count() * static_cast<size_t>(dict.class_count), 0.0);

  std::atomic<long long> degenerate{0};
  parallel_for_pixels(cube.pixel_count(), threads, [&](size_t p) {
    const int r = static_cast<int>(p) / cube.width;
    const int c = static_cast<int>(p) % cube.width;
    try {
      const auto y = cube.spectrum(r, c);
      bool weight_degenerate = false;
      GammaWeights gamma;
      switch (mode) {
        case WeightMode::identity:
          gamma = identity_weights(dict.column_count);
          break;
        case WeightMode::euclidean:
          gamma = euclidean_weights(dict, y, &weight_degenerate);
          break;
        case WeightMode::kernel_angle:
          gamma = kernel_angle_weights(spec, dict, y, &weight_degenerate);
          break;
      }
      if (weight_degenerate) degenerate.fetch_add(1, std::memory_order_relaxed);

      const std::vector<double> g = cross_vector(spec, dict, y);
      const double k_yy = kernel_eval(spec, y, y);
      const UnmixResult sol = admm_weighted_sunsal(gram, g, k_yy, gamma, cfg);

      double* out = field.residuals.data() + p * static_cast<size_t>(dict.class_count);
      for (int cls = 0; cls < dict.class_count; ++cls) {
        out[cls] = class_residual(gram, g, k_yy, sol.x,
                                  dict.class_ranges[static_cast<size_t>(cls)]);
      }
    } catch (const Error& e) {
      throw Error(e.code(), "pixel (" + std::to_string(r) + "," + std::to_string(c) + "): " +
                                e.what());
    }
  });
  if (stats) stats->degenerate_weight_pixels += degenerate.load();
  return field;
}

ClassMap raw_classify(const ResidualField& field) {
  ClassMap map;
  map.height = field.height;
  map.width = field.width;
  map.predicted.resize(static_cast<size_t>(field.height) * field.width);
  for (size_t p = 0; p < map.predicted.size(); ++p) {
    const double* res = field.residuals.data() + p * static_cast<size_t>(field.class_count);
    int best = 0;
    for (int cls = 1; cls < field.class_count; ++cls) {
      if (res[cls] < res[best]) best = cls;
    }
    map.predicted[p] = best + 1;
  }
  return map;
}

std::vector<PixelCoord> select_neighbors(const HsiCube& cube, PixelCoord center, int window,
                                         int count, const KernelSpec* spec, SceneStats* stats) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::even_window, "select_neighbors: window must be odd");
  }
  if (center.row < 0 || center.row >= cube.height || center.col < 0 || center.col >= cube.width) {
    throw Error(ErrorCode::invalid_argument, "select_neighbors: center outside image");
  }
  const int half = window / 2;
  const int r0 = std::max(0, center.row - half);
  const int r1 = std::min(cube.height - 1, center.row + half);
  const int c0 = std::max(0, center.col - half);
  const int c1 = std::min(cube.width - 1, center.col + half);

  const auto y_center = cube.spectrum(center.row, center.col);
  const double center_norm = l2_norm(y_center);

  struct Scored {
    double score;
    long long raster;
    PixelCoord coord;
  };
  std::vector<Scored> scored;
  scored.reserve(static_cast<size_t>((r1 - r0 + 1) * (c1 - c0 + 1)));
  long long skipped = 0;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const long long raster = static_cast<long long>(r) * cube.width + c;
      if (r == center.row && c == center.col) {
        scored.push_back({0.0, raster, {r, c}});
        continue;
      }
      const auto y_q = cube.spectrum(r, c);
      // identical spectra have cosine exactly 1; skip the arithmetic so the
      // score is an exact 0 and ties resolve purely by raster order
      if (std::equal(y_q.begin(), y_q.end(), y_center.begin())) {
        scored.push_back({0.0, raster, {r, c}});
        continue;
      }
      double score = 0.0;
      if (spec != nullptr) {
        try {
          score = 1.0 - kernel_cosine(*spec, y_center, y_q);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::zero_norm) throw;
          ++skipped;
          continue;
        }
      } else {
        const double norm_q = l2_norm(y_q);
        if (norm_q == 0.0) {
          ++skipped;
          continue;
        }
        // zero-norm center: every candidate ties at 0 and raster order decides
        score = center_norm == 0.0 ? 0.0 : 1.0 - original_cosine(y_center, y_q, center_norm, norm_q);
      }
      scored.push_back({score, raster, {r, c}});
    }
  }
  if (stats) stats->zero_norm_neighbors_skipped += skipped;

  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    return a.score != b.score ? a.score < b.score : a.raster < b.raster;
  });
  const size_t take = std::min<size_t>(static_cast<size_t>(std::max(count, 1)), scored.size());
  std::vector<PixelCoord> out;
  out.reserve(take);
  for (size_t i = 0; i < take; ++i) out.push_back(scored[i].coord);
  return out;
}

ClassMap spatial_postprocess(const ResidualField& field, const HsiCube& cube,
                             const PostprocessConfig& cfg, const KernelSpec* spec, int threads,
                             SceneStats* stats) {
  if (field.height != cube.height || field.width != cube.width) {
    throw Error(ErrorCode::dimension_mismatch, "spatial_postprocess: field/cube size mismatch");
  }
  cfg.validate();
  const KernelSpec* cosine_spec = cfg.space == NeighborSpace::kernel ? spec : nullptr;
  if (cfg.space == NeighborSpace::kernel && spec == nullptr) {
    throw Error(ErrorCode::invalid_config, "spatial_postprocess: kernel space needs a kernel spec");
  }

  ClassMap map;
  map.height = field.height;
  map.width = field.width;
  map.predicted.resize(static_cast<size_t>(field.height) * field.width);

  SceneStats local;
  std::mutex stats_mutex;
  parallel_for_pixels(map.predicted.size(), threads, [&](size_t p) {
    const int r = static_cast<int>(p) / field.width;
    const int c = static_cast<int>(p) % field.width;
    SceneStats pixel_stats;
    const auto neighbors = select_neighbors(cube, {r, c}, cfg.window, cfg.neighbor_count,
                                            cosine_spec, &pixel_stats);
    std::vector<double> sums(static_cast<size_t>(field.class_count), 0.0);
    for (const auto& q : neighbors) {
      const auto res = field.pixel(q.row, q.col);
      for (int cls = 0; cls < field.class_count; ++cls) sums[static_cast<size_t>(cls)] += res[cls];
    }
    int best = 0;
    for (int cls = 1; cls < field.class_count; ++cls) {
      if (sums[static_cast<size_t>(cls)] < sums[static_cast<size_t>(best)]) best = cls;
    }
    map.predicted[p] = best + 1;
    if (pixel_stats.zero_norm_neighbors_skipped) {
      std::lock_guard<std::mutex> lock(stats_mutex);
      local.zero_norm_neighbors_skipped += pixel_stats.zero_norm_neighbors_skipped;
    }
  });
  if (stats) stats->zero_norm_neighbors_skipped += local.zero_norm_neighbors_skipped;
  return map;
}

void write_residual_field(const ResidualField& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write residual field: " + path);
  unsigned char header[20];
  header[0] = 'W';
  header[1] = 'S';
  header[2] = 'R';
  header[3] = 'F';
  u32_to_le(1, header + 4);
  u32_to_le(static_cast<uint32_t>(field.height), header + 8);
  u32_to_le(static_cast<uint32_t>(field.width), header + 12);
  u32_to_le(static_cast<uint32_t>(field.class_count), header + 16);
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  std::vector<unsigned char> buf(field.residuals.size() * 4);
  for (size_t i = 0; i < field.residuals.size(); ++i) {
    const uint32_t bits = std::bit_cast<uint32_t>(static_cast<float>(field.residuals[i]));
    u32_to_le(bits, buf.data() + i * 4);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::io_error, "short write on " + path);
}

ResidualField read_residual_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open residual field: " + path);
  unsigned char header[20];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || std::memcmp(header, "WSRF", 4) != 0 || u32_from_le(header + 4) != 1) {
    throw Error(ErrorCode::io_error, "bad residual field header in " + path);
  }
  ResidualField field;
  field.height = static_cast<int>(u32_from_le(header + 8));
  field.width = static_cast<int>(u32_from_le(header + 12));
  field.class_count = static_cast<int>(u32_from_le(header + 16));
  if (field.height <= 0 || field.width <= 0 || field.class_count <= 0) {
    throw Error(ErrorCode::size_mismatch, "bad residual field dimensions in " + path);
  }
  const size_t count =
      static_cast<size_t>(field.height) * field.width * static_cast<size_t>(field.class_count);
  std::vector<unsigned char> buf(count * 4);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in || in.peek() != EOF) {
    throw Error(ErrorCode::size_mismatch, "residual field payload size mismatch in " + path);
  }
  field.residuals.resize(count);
  for (size_t i = 0; i < count; ++i) {
    field.residuals[i] = static_cast<double>(std::bit_cast<float>(u32_from_le(buf.data() + i * 4)));
  }
  return field;
}

void write_class_map(const ClassMap& map, const std::string& path, const LabelMap* labels) {
  if (labels && (labels->height != map.height || labels->width != map.width)) {
    throw Error(ErrorCode::dimension_mismatch, "write_class_map: labels size mismatch");
  }
  int max_value = 0;
  for (int v : map.predicted) max_value = std::max(max_value, v);
  const bool wide = max_value > 255;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write class map: " + path);
  out << "P5\n" << map.width << " " << map.height << "\n" << (wide ? 65535 : 255) << "\n";
  for (int r = 0; r < map.height; ++r) {
    for (int c = 0; c < map.width; ++c) {
      int v = map.at(r, c);
      if (labels && labels->at(r, c) == 0) v = 0;
      if (wide) {
        // P5 16-bit samples are big-endian
        const unsigned char hi = static_cast<unsigned char>((v >> 8) & 0xff);
        const unsigned char lo = static_cast<unsigned char>(v & 0xff);
        out.put(static_cast<char>(hi)).put(static_cast<char>(lo));
      } else {
        out.put(static_cast<char>(v & 0xff));
      }
    }
  }
  if (!out) throw Error(ErrorCode::io_error, "short write on " + path);
}

ClassMap read_class_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open class map: " + path);
  std::string magic;
  int width = 0, height = 0, maxval = 0;
  in >> magic >> width >> height >> maxval;
  if (magic != "P5" || width <= 0 || height <= 0 || maxval <= 0) {
    throw Error(ErrorCode::io_error, "bad PGM header in " + path);
  }
  in.get();  // single whitespace after maxval
  ClassMap map;
  map.height = height;
  map.width = width;
  map.predicted.resize(static_cast<size_t>(height) * width);
  const bool wide = maxval > 255;
  for (auto& v : map.predicted) {
    if (wide) {
      const int hi = in.get();
      const int lo = in.get();
      if (hi == EOF || lo == EOF) throw Error(ErrorCode::io_error, "truncated PGM " + path);
      v = (hi << 8) | lo;
    } else {
      const int b = in.get();
      if (b == EOF) throw Error(ErrorCode::io_error, "truncated PGM " + path);
      v = b;
    }
  }
  return map;
}

}  // namespace wsun
