#pragma once

#include <filesystem>
#include <vector>

#include "riemannopt/harness/config.hpp"
#include "riemannopt/input_vector.hpp"

namespace riemannopt::harness {

// A generated image and the parameters that drew it. For gaussian-blob the
// clean intensity is exp(-((r - center_y)^2 + (c - center_x)^2) / (2
// sigma^2)); the other generators leave the blob fields at zero.
struct SyntheticSample {
  InputVector image;
  double center_y = 0.0;
  double center_x = 0.0;
  double sigma = 0.0;
};

// Deterministic in the spec. Intensities are clamped to [0, 1] after noise.
// Throws DomainError for a zero-size image.
std::vector<SyntheticSample> generate_samples(const DatasetSpec& spec);
std::vector<InputVector> generate_dataset(const DatasetSpec& spec);

// The PGM files of `dir`, in lexicographic file-name order.
std::vector<InputVector> load_dataset(const std::filesystem::path& dir);

// load_dataset(spec.dir) when a directory is given, else generate_dataset.
std::vector<InputVector> dataset_images(const DatasetSpec& spec);

// Writes image_0000.pgm, image_0001.pgm, ... (16-bit) into `dir`.
void export_dataset(const std::filesystem::path& dir,
                    const std::vector<InputVector>& images);

}  // namespace riemannopt::harness
