// Writes a planted-block synthetic scene (cube + header + labels) so the
// classifier can be exercised without real sensor data.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "wsunsal/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic hyperspectral scene generator"};
  std::string out_dir = "synthetic";
  int height = 30, width = 30, bands = 20, classes = 3;
  double noise = 0.02;
  uint64_t seed = 7;
  app.add_option("-o,--output", out_dir, "output directory");
  app.add_option("--height", height);
  app.add_option("--width", width);
  app.add_option("--bands", bands);
  app.add_option("--classes", classes);
  app.add_option("--noise", noise, "Gaussian noise sigma");
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);

  try {
    const wsun::SyntheticScene scene =
        wsun::make_synthetic_scene(height, width, bands, classes, noise, seed);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    wsun::write_cube(scene.cube, (dir / "cube.raw").string(), (dir / "cube.hdr").string());
    wsun::write_labels(scene.labels, (dir / "labels.txt").string());
    std::printf("wrote %s/{cube.raw,cube.hdr,labels.txt} (%dx%dx%d, %d classes)\n",
                out_dir.c_str(), height, width, bands, classes);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
