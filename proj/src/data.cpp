#include "wsunsal/data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "wsunsal/rng.hpp"

namespace wsun {
namespace {

struct CubeHeader {
  int height = 0;
  int width = 0;
  int bands = 0;
};

CubeHeader parse_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open header file: " + path);
  CubeHeader h;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t\r\n");
      const auto e = s.find_last_not_of(" \t\r\n");
      s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(value);
    int parsed = 0;
    try {
      parsed = std::stoi(value);
    } catch (...) {
      throw Error(ErrorCode::io_error, "bad header value for '" + key + "' in " + path);
    }
    if (key == "height") h.height = parsed;
    else if (key == "width") h.width = parsed;
    else if (key == "bands") h.bands = parsed;
  }
  return h;
}

std::vector<char> read_all_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open file: " + path);
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<char> bytes(static_cast<size_t>(size));
  if (size > 0) in.read(bytes.data(), size);
  if (!in) throw Error(ErrorCode::io_error, "short read on " + path);
  return bytes;
}

float f32_from_le(const unsigned char* p) {
  uint32_t u = static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
               (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(u);
}

void f32_to_le(float v, unsigned char* p) {
  const uint32_t u = std::bit_cast<uint32_t>(v);
  p[0] = static_cast<unsigned char>(u & 0xff);
  p[1] = static_cast<unsigned char>((u >> 8) & 0xff);
  p[2] = static_cast<unsigned char>((u >> 16) & 0xff);
  p[3] = static_cast<unsigned char>((u >> 24) & 0xff);
}

void validate_label_grid(LabelMap& map, const std::string& origin) {
  int max_label = 0;
  for (int v : map.labels) {
    if (v < 0) throw Error(ErrorCode::negative_label, "negative label in " + origin);
    max_label = std::max(max_label, v);
  }
  // classes must be a contiguous 1..C range; gaps are rejected rather than
  // remapped so reports stay aligned with ground-truth numbering
  std::vector<char> seen(static_cast<size_t>(max_label) + 1, 0);
  for (int v : map.labels) seen[static_cast<size_t>(v)] = 1;
  for (int c = 1; c <= max_label; ++c) {
    if (!seen[static_cast<size_t>(c)]) {
      throw Error(ErrorCode::non_contiguous_classes,
                  "class " + std::to_string(c) + " missing from label range 1.." +
                      std::to_string(max_label) + " in " + origin);
    }
  }
  map.class_count = max_label;
}

}  // namespace

HsiCube load_cube(const std::string& data_path, const std::string& header_path) {
  const CubeHeader h = parse_header(header_path);
  if (h.height <= 0 || h.width <= 0 || h.bands <= 0) {
    throw Error(ErrorCode::size_mismatch,
                "header must declare positive height, width, bands (" + header_path + ")");
  }
  const std::vector<char> bytes = read_all_bytes(data_path);
  const size_t expected = static_cast<size_t>(h.height) * h.width * h.bands * 4u;
  if (bytes.size() != expected) {
    throw Error(ErrorCode::size_mismatch,
                "file length " + std::to_string(bytes.size()) + " != expected " +
                    std::to_string(expected) + " for " + data_path);
  }

  HsiCube cube;
  cube.height = h.height;
  cube.width = h.width;
  cube.bands = h.bands;
  cube.values.resize(expected / 4);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const size_t pixels = cube.pixel_count();
  // file is band-sequential: all of band 0, then band 1, ...
  for (int b = 0; b < h.bands; ++b) {
    for (size_t i = 0; i < pixels; ++i) {
      const float v = f32_from_le(p + (static_cast<size_t>(b) * pixels + i) * 4);
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::non_finite_value, "non-finite value in cube " + data_path);
      }
      cube.values[i * h.bands + b] = static_cast<double>(v);
    }
  }
  return cube;
}

void write_cube(const HsiCube& cube, const std::string& data_path, const std::string& header_path) {
  {
    std::ofstream hdr(header_path);
    if (!hdr) throw Error(ErrorCode::io_error, "cannot write header: " + header_path);
    hdr << "height = " << cube.height << "\n"
        << "width = " << cube.width << "\n"
        << "bands = " << cube.bands << "\n";
  }
  std::ofstream out(data_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write cube: " + data_path);
  const size_t pixels = cube.pixel_count();
  std::vector<unsigned char> buf(pixels * 4);
  for (int b = 0; b < cube.bands; ++b) {
    for (size_t i = 0; i < pixels; ++i) {
      f32_to_le(static_cast<float>(cube.values[i * cube.bands + b]), buf.data() + i * 4);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw Error(ErrorCode::io_error, "short write on " + data_path);
}

LabelMap load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open labels: " + path);
  LabelMap map;
  std::string line;
  int width = -1;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::vector<int> values;
    long long v;
    while (row >> v) {
      if (v < 0) throw Error(ErrorCode::negative_label, "negative label in " + path);
      values.push_back(static_cast<int>(v));
    }
    if (values.empty()) continue;
    if (width < 0) {
      width = static_cast<int>(values.size());
    } else if (static_cast<int>(values.size()) != width) {
      throw Error(ErrorCode::dimension_mismatch, "ragged label grid in " + path);
    }
    map.labels.insert(map.labels.end(), values.begin(), values.end());
    ++map.height;
  }
  if (map.height == 0) throw Error(ErrorCode::dimension_mismatch, "empty label grid in " + path);
  map.width = width;
  validate_label_grid(map, path);
  return map;
}

LabelMap load_labels_binary(const std::string& data_path, const std::string& header_path) {
  const CubeHeader h = parse_header(header_path);
  if (h.height <= 0 || h.width <= 0) {
    throw Error(ErrorCode::size_mismatch, "label header must declare positive height, width");
  }
  const std::vector<char> bytes = read_all_bytes(data_path);
  const size_t expected = static_cast<size_t>(h.height) * h.width * 2u;
  if (bytes.size() != expected) {
    throw Error(ErrorCode::size_mismatch, "label file length mismatch for " + data_path);
  }
  LabelMap map;
  map.height = h.height;
  map.width = h.width;
  map.labels.resize(expected / 2);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  for (size_t i = 0; i < map.labels.size(); ++i) {
    map.labels[i] = static_cast<int>(p[i * 2]) | (static_cast<int>(p[i * 2 + 1]) << 8);
  }
  validate_label_grid(map, data_path);
  return map;
}

void write_labels(const LabelMap& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write labels: " + path);
  for (int r = 0; r < labels.height; ++r) {
    for (int c = 0; c < labels.width; ++c) {
      if (c) out << ' ';
      out << labels.at(r, c);
    }
    out << '\n';
  }
}

HsiCube remove_bands(const HsiCube& cube, const std::vector<int>& bands_1indexed) {
  std::vector<char> drop(static_cast<size_t>(cube.bands), 0);
  for (int b : bands_1indexed) {
    if (b < 1 || b > cube.bands) {
      throw Error(ErrorCode::band_out_of_range,
                  "band " + std::to_string(b) + " outside 1.." + std::to_string(cube.bands));
    }
    drop[static_cast<size_t>(b - 1)] = 1;
  }
  std::vector<int> keep;
  for (int b = 0; b < cube.bands; ++b) {
    if (!drop[static_cast<size_t>(b)]) keep.push_back(b);
  }

  HsiCube out;
  out.height = cube.height;
  out.width = cube.width;
  out.bands = static_cast<int>(keep.size());
  out.values.resize(cube.pixel_count() * keep.size());
  for (size_t i = 0; i < cube.pixel_count(); ++i) {
    const double* src = cube.values.data() + i * cube.bands;
    double* dst = out.values.data() + i * keep.size();
    for (size_t k = 0; k < keep.size(); ++k) dst[k] = src[keep[k]];
  }
  return out;
}

SplitResult stratified_split(const LabelMap& labels, double fraction, uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw Error(ErrorCode::invalid_argument, "split fraction must be in (0, 1]");
  }
  std::vector<std::vector<PixelCoord>> per_class(static_cast<size_t>(labels.class_count) + 1);
  for (int r = 0; r < labels.height; ++r) {
    for (int c = 0; c < labels.width; ++c) {
      const int v = labels.at(r, c);
      if (v > 0) per_class[static_cast<size_t>(v)].push_back({r, c});
    }
  }

  SplitResult split;
  split.seed = seed;
  Rng rng(seed);
  auto raster_less = [&](const PixelCoord& a, const PixelCoord& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  };
  for (int c = 1; c <= labels.class_count; ++c) {
    auto& pixels = per_class[static_cast<size_t>(c)];
    if (pixels.empty()) {
      throw Error(ErrorCode::empty_class, "class " + std::to_string(c) + " has no labeled pixels");
    }
    // Fisher-Yates with bias-free bounded draws
    for (size_t i = pixels.size() - 1; i > 0; --i) {
      const size_t j = static_cast<size_t>(rng.next_below(i + 1));
      std::swap(pixels[i], pixels[j]);
    }
    const auto m = static_cast<double>(pixels.size());
    const size_t want = std::max<size_t>(1, static_cast<size_t>(std::llround(fraction * m)));
    const size_t take = std::min(want, pixels.size());
    std::sort(pixels.begin(), pixels.begin() + static_cast<ptrdiff_t>(take), raster_less);
    std::sort(pixels.begin() + static_cast<ptrdiff_t>(take), pixels.end(), raster_less);
    split.train_pixels.insert(split.train_pixels.end(), pixels.begin(),
                              pixels.begin() + static_cast<ptrdiff_t>(take));
    split.test_pixels.insert(split.test_pixels.end(),
                             pixels.begin() + static_cast<ptrdiff_t>(take), pixels.end());
  }
  return split;
}

void write_split(const SplitResult& split, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write split: " + path);
  out << "# seed " << split.seed << "\n";
  for (const auto& p : split.train_pixels) out << p.row << ' ' << p.col << " train\n";
  for (const auto& p : split.test_pixels) out << p.row << ' ' << p.col << " test\n";
}

SplitResult read_split(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open split: " + path);
  SplitResult split;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string word;
      if (meta >> word && word == "seed") meta >> split.seed;
      continue;
    }
    std::istringstream row(line);
    PixelCoord p;
    std::string tag;
    if (!(row >> p.row >> p.col >> tag)) {
      throw Error(ErrorCode::io_error, "bad split line '" + line + "' in " + path);
    }
    if (tag == "train") split.train_pixels.push_back(p);
    else if (tag == "test") split.test_pixels.push_back(p);
    else throw Error(ErrorCode::io_error, "bad split tag '" + tag + "' in " + path);
  }
  return split;
}

Dictionary build_dictionary(const HsiCube& cube, const SplitResult& split, const LabelMap& labels) {
  if (cube.height != labels.height || cube.width != labels.width) {
    throw Error(ErrorCode::dimension_mismatch, "cube and labels dimensions differ");
  }
  if (split.train_pixels.empty()) {
    throw Error(ErrorCode::empty_dictionary, "split has no training pixels");
  }
  std::vector<std::vector<PixelCoord>> per_class(static_cast<size_t>(labels.class_count) + 1);
  for (const auto& p : split.train_pixels) {
    const int v = labels.at(p.row, p.col);
    if (v <= 0) {
      throw Error(ErrorCode::invalid_argument,
                  "training pixel (" + std::to_string(p.row) + "," + std::to_string(p.col) +
                      ") is unlabeled");
    }
    per_class[static_cast<size_t>(v)].push_back(p);
  }

  Dictionary dict;
  dict.band_count = cube.bands;
  dict.class_count = labels.class_count;
  dict.class_ranges.resize(static_cast<size_t>(labels.class_count));
  int col = 0;
  for (int c = 1; c <= labels.class_count; ++c) {
    const auto& pixels = per_class[static_cast<size_t>(c)];
    dict.class_ranges[static_cast<size_t>(c - 1)] = {col, col + static_cast<int>(pixels.size())};
    for (const auto& p : pixels) {
      const auto spec = cube.spectrum(p.row, p.col);
      dict.columns.insert(dict.columns.end(), spec.begin(), spec.end());
      dict.column_class.push_back(c);
      ++col;
    }
  }
  dict.column_count = col;
  if (dict.column_count == 0) {
    throw Error(ErrorCode::empty_dictionary, "dictionary has no columns");
  }
  return dict;
}

HsiCube mean_prefilter(const HsiCube& cube, int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::even_window, "prefilter window must be odd and >= 1");
  }
  if (window == 1) return cube;
  const int half = window / 2;
  HsiCube out;
  out.height = cube.height;
  out.width = cube.width;
  out.bands = cube.bands;
  out.values.assign(cube.values.size(), 0.0);
  for (int r = 0; r < cube.height; ++r) {
    const int r0 = std::max(0, r - half);
    const int r1 = std::min(cube.height - 1, r + half);
    for (int c = 0; c < cube.width; ++c) {
      const int c0 = std::max(0, c - half);
      const int c1 = std::min(cube.width - 1, c + half);
      const double count = static_cast<double>((r1 - r0 + 1) * (c1 - c0 + 1));
      double* dst = out.values.data() + (static_cast<size_t>(r) * cube.width + c) * cube.bands;
      for (int rr = r0; rr <= r1; ++rr) {
        for (int cc = c0; cc <= c1; ++cc) {
          const double* src = cube.values.data() +
                              (static_cast<size_t>(rr) * cube.width + cc) * cube.bands;
          for (int b = 0; b < cube.bands; ++b) dst[b] += src[b];
        }
      }
      for (int b = 0; b < cube.bands; ++b) dst[b] /= count;
    }
  }
  return out;
}

HsiCube normalize_unit_l2(const HsiCube& cube) {
  HsiCube out = cube;
  for (size_t i = 0; i < cube.pixel_count(); ++i) {
    double* spec = out.values.data() + i * cube.bands;
    double norm2 = 0.0;
    for (int b = 0; b < cube.bands; ++b) norm2 += spec[b] * spec[b];
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (int b = 0; b < cube.bands; ++b) spec[b] *= inv;
    }
  }
  return out;
}

}  // namespace wsun
