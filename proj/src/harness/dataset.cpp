#include "riemannopt/harness/dataset.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "riemannopt/error.hpp"
#include "riemannopt/harness/io.hpp"
#include "riemannopt/random.hpp"

namespace riemannopt::harness {

namespace fs = std::filesystem;

namespace {

SyntheticSample blob(Rng& rng, std::size_t h, std::size_t w) {
  SyntheticSample s;
  s.center_y = rng.uniform(0.25, 0.75) * static_cast<double>(h - 1);
  s.center_x = rng.uniform(0.25, 0.75) * static_cast<double>(w - 1);
  s.sigma = rng.uniform(0.15, 0.3) * static_cast<double>(std::min(h, w));
  std::vector<double> v(h * w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double dy = static_cast<double>(r) - s.center_y;
      const double dx = static_cast<double>(c) - s.center_x;
      v[r * w + c] = std::exp(-(dy * dy + dx * dx) / (2.0 * s.sigma * s.sigma));
    }
  }
  s.image = InputVector(std::move(v), ImageShape{h, w, 1});
  return s;
}

SyntheticSample bars(Rng& rng, std::size_t h, std::size_t w) {
  const bool vertical = rng.uniform() < 0.5;
  const auto period = static_cast<std::size_t>(rng.uniform(3.0, 6.0));
  const auto thickness = std::max<std::size_t>(1, period / 2);
  const auto phase = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(period)));
  const double level = rng.uniform(0.5, 1.0);
  std::vector<double> v(h * w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t pos = (vertical ? c : r) + phase;
      v[r * w + c] = pos % period < thickness ? level : 0.0;
    }
  }
  SyntheticSample s;
  s.image = InputVector(std::move(v), ImageShape{h, w, 1});
  return s;
}

SyntheticSample checker(Rng& rng, std::size_t h, std::size_t w) {
  const auto cell = static_cast<std::size_t>(rng.uniform(2.0, 5.0));
  const auto oy = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(cell)));
  const auto ox = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(cell)));
  const double level = rng.uniform(0.5, 1.0);
  std::vector<double> v(h * w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      v[r * w + c] = ((r + oy) / cell + (c + ox) / cell) % 2 == 0 ? level : 0.0;
    }
  }
  SyntheticSample s;
  s.image = InputVector(std::move(v), ImageShape{h, w, 1});
  return s;
}

}  // namespace

std::vector<SyntheticSample> generate_samples(const DatasetSpec& spec) {
  if (spec.height == 0 || spec.width == 0) {
    throw DomainError(fmt::format("dataset image size {}x{} is empty", spec.height,
                                  spec.width));
  }
  if (!(spec.noise >= 0.0)) throw DomainError("dataset noise must be >= 0");
  Rng rng(spec.seed);
  std::vector<SyntheticSample> samples;
  samples.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    SyntheticSample s;
    switch (spec.generator) {
      case Generator::kGaussianBlob: s = blob(rng, spec.height, spec.width); break;
      case Generator::kBars: s = bars(rng, spec.height, spec.width); break;
      case Generator::kChecker: s = checker(rng, spec.height, spec.width); break;
    }
    if (spec.noise > 0.0) {
      std::vector<double> v = s.image.vector();
      for (double& x : v) x = std::clamp(x + rng.normal(0.0, spec.noise), 0.0, 1.0);
      s.image = s.image.with_values(std::move(v));
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<InputVector> generate_dataset(const DatasetSpec& spec) {
  std::vector<InputVector> images;
  for (auto& s : generate_samples(spec)) images.push_back(std::move(s.image));
  return images;
}

std::vector<InputVector> load_dataset(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IoError(fmt::format("dataset directory '{}' does not exist", dir.string()));
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<InputVector> images;
  for (const auto& f : files) images.push_back(read_pgm(f));
  for (const auto& img : images) {
    if (img.shape() != images.front().shape()) {
      throw InputShapeError(fmt::format("images in '{}' differ in size", dir.string()));
    }
  }
  return images;
}

std::vector<InputVector> dataset_images(const DatasetSpec& spec) {
  return spec.dir.empty() ? generate_dataset(spec) : load_dataset(spec.dir);
}

void export_dataset(const fs::path& dir, const std::vector<InputVector>& images) {
  for (std::size_t i = 0; i < images.size(); ++i) {
    write_pgm(dir / fmt::format("image_{:04d}.pgm", i), images[i]);
  }
}

}  // namespace riemannopt::harness
