/*
 * Copyright 2026 The archsel Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ARCHSEL_DATA_DATASET_HPP
#define ARCHSEL_DATA_DATASET_HPP

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "archsel/core/tensor.hpp"

namespace archsel::data {

/// An immutable labelled image set. Images are [N,C,H,W]; labels in [0,K).
struct Dataset {
    Tensor images;
    std::vector<int> labels;
    int num_classes = 0;
    std::string name;
    std::string split = "train"; // "train" | "validation"

    int n() const { return images.rank() == 4 ? images.dim(0) : 0; }
    int channels() const { return images.dim(1); }
    int height() const { return images.dim(2); }
    int width() const { return images.dim(3); }
    std::vector<int> sample_shape() const { return {images.dim(1), images.dim(2), images.dim(3)}; }
};

struct DatasetMeta {
    std::string name;
    int num_classes = 0;
    int channels = 0;
    int height = 0;
    int width = 0;
    long n_train = 0;
    long n_val = 0;
};

/// Parses the big-endian IDX pair (images magic 0x00000803, labels magic
/// 0x00000801). Pixel bytes are scaled to [0,1]. Throws BadMagicError,
/// TruncatedFileError or DimensionMismatchError on malformed input.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

struct UspsLoadInfo {
    long n_loaded = 0;
    bool count_mismatch = false; // set when the file's sample count differs from 10000
};

/// Loads the common USPS text layout: one sample per line, an integer label
/// in [0,9] followed by 256 grayscale values in [-1,1], rescaled to [0,1].
/// A sample count differing from the 10000 reference is reported through
/// `info` (and stderr), not treated as an error.
Dataset load_usps(const std::string& path, UspsLoadInfo* info = nullptr);

/// Deterministic synthetic image classes: each class is a fixed oriented
/// sinusoidal template plus Gaussian noise, clamped to [0,1]. Labels are
/// balanced (sample i belongs to class i mod K).
Dataset synthesize(int num_classes, int n_per_class, int channels, int height, int width,
                   double noise_sigma, std::uint64_t seed);

struct NormStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev; // degenerate channels get 1.0 here
    std::vector<int> degenerate_channels;
};

/// Per-channel mean/std over every pixel of the given (training) split.
NormStats compute_norm_stats(const Dataset& train);

/// Subtracts the per-channel mean and divides by the per-channel std from
/// `stats`. Degenerate channels (std 0) are divided by 1 and warned about.
Dataset normalize(const Dataset& ds, const NormStats& stats);

/// Convenience: stats from the dataset itself.
Dataset normalize(const Dataset& ds);

/// Seeded stratified partition; per-class counts land within +-1 of
/// val_fraction times the class size.
std::pair<Dataset, Dataset> split(const Dataset& ds, double val_fraction, std::uint64_t seed);

/// Seeded stratified subsample with exactly `per_class` samples per class.
Dataset subset_stratified(const Dataset& ds, int per_class, std::uint64_t seed);

/// Self-describing little-endian binary fixture ("ASFX"): header
/// magic/version/K/C/H/W/N, then int32 labels, then float64 pixels.
/// save/load round-trips bit-exactly.
void save_fixture(const Dataset& ds, const std::string& path);
Dataset load_fixture(const std::string& path);

} // namespace archsel::data

#endif
