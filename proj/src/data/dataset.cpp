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

#include "archsel/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "archsel/core/errors.hpp"
#include "archsel/core/rng.hpp"

namespace archsel::data {

namespace {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;
constexpr long kUspsReferenceCount = 10000;
constexpr char kFixtureMagic[4] = {'A', 'S', 'F', 'X'};
constexpr std::uint32_t kFixtureVersion = 1;

std::uint32_t read_be_u32(std::istream& in, const std::string& path) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) throw TruncatedFileError(path + ": truncated header");
    return (static_cast<std::uint32_t>(buf[0]) << 24) | (static_cast<std::uint32_t>(buf[1]) << 16) |
           (static_cast<std::uint32_t>(buf[2]) << 8) | static_cast<std::uint32_t>(buf[3]);
}

int max_label(const std::vector<int>& labels) {
    int m = 0;
    for (int l : labels) m = std::max(m, l);
    return m;
}

std::vector<std::vector<int>> indices_by_class(const Dataset& ds) {
    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(ds.num_classes));
    for (int i = 0; i < ds.n(); ++i)
        by_class[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])].push_back(i);
    return by_class;
}

Dataset take_rows(const Dataset& ds, std::vector<int> rows, std::string split_tag) {
    std::sort(rows.begin(), rows.end());
    const Eigen::Index sample = static_cast<Eigen::Index>(ds.channels()) * ds.height() * ds.width();
    Dataset out;
    out.images = Tensor({static_cast<int>(rows.size()), ds.channels(), ds.height(), ds.width()});
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::memcpy(out.images.data() + static_cast<Eigen::Index>(i) * sample,
                    ds.images.data() + static_cast<Eigen::Index>(rows[i]) * sample,
                    static_cast<std::size_t>(sample) * sizeof(double));
        out.labels.push_back(ds.labels[static_cast<std::size_t>(rows[i])]);
    }
    out.num_classes = ds.num_classes;
    out.name = ds.name;
    out.split = std::move(split_tag);
    return out;
}

} // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw DataError("cannot open " + images_path);
    const std::uint32_t img_magic = read_be_u32(img, images_path);
    if (img_magic != kIdxImagesMagic)
        throw BadMagicError(images_path + ": image magic mismatch (got " + std::to_string(img_magic) + ")");
    const std::uint32_t n = read_be_u32(img, images_path);
    const std::uint32_t rows = read_be_u32(img, images_path);
    const std::uint32_t cols = read_be_u32(img, images_path);
    if (n == 0 || rows == 0 || cols == 0) throw DataError(images_path + ": empty image file");

    const std::size_t pixel_count = static_cast<std::size_t>(n) * rows * cols;
    std::vector<unsigned char> pixels(pixel_count);
    img.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixel_count));
    if (static_cast<std::size_t>(img.gcount()) != pixel_count)
        throw TruncatedFileError(images_path + ": expected " + std::to_string(pixel_count) + " pixel bytes");

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw DataError("cannot open " + labels_path);
    const std::uint32_t lab_magic = read_be_u32(lab, labels_path);
    if (lab_magic != kIdxLabelsMagic)
        throw BadMagicError(labels_path + ": label magic mismatch (got " + std::to_string(lab_magic) + ")");
    const std::uint32_t n_labels = read_be_u32(lab, labels_path);
    if (n_labels != n)
        throw DimensionMismatchError(labels_path + ": " + std::to_string(n_labels) + " labels for " +
                                     std::to_string(n) + " images");
    std::vector<unsigned char> raw_labels(n_labels);
    lab.read(reinterpret_cast<char*>(raw_labels.data()), static_cast<std::streamsize>(n_labels));
    if (static_cast<std::size_t>(lab.gcount()) != n_labels)
        throw TruncatedFileError(labels_path + ": truncated label block");

    Dataset ds;
    ds.images = Tensor({static_cast<int>(n), 1, static_cast<int>(rows), static_cast<int>(cols)});
    double* dst = ds.images.data();
    for (std::size_t i = 0; i < pixel_count; ++i) dst[i] = static_cast<double>(pixels[i]) / 255.0;
    ds.labels.assign(raw_labels.begin(), raw_labels.end());
    ds.num_classes = max_label(ds.labels) + 1;
    ds.name = "idx";
    return ds;
}

Dataset load_usps(const std::string& path, UspsLoadInfo* info) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);

    std::vector<double> pixels;
    std::vector<int> labels;
    std::string line;
    long line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::istringstream row(line);
        double label_value;
        if (!(row >> label_value)) {
            bool only_space = line.find_first_not_of(" \t\r\n") == std::string::npos;
            if (only_space) continue;
            throw ParseError(path + ": unreadable label", line_number);
        }
        const double rounded = std::round(label_value);
        if (std::abs(label_value - rounded) > 1e-9 || rounded < 0 || rounded > 9)
            throw ParseError(path + ": label must be an integer in [0,9]", line_number);
        labels.push_back(static_cast<int>(rounded));
        for (int p = 0; p < 256; ++p) {
            double v;
            if (!(row >> v)) throw ParseError(path + ": expected 256 pixel values", line_number);
            // common USPS text layout stores pixels in [-1,1]
            pixels.push_back(std::clamp((v + 1.0) / 2.0, 0.0, 1.0));
        }
        double extra;
        if (row >> extra) throw ParseError(path + ": more than 256 pixel values", line_number);
    }
    if (labels.empty()) throw ParseError(path + ": no samples", line_number == 0 ? 1 : line_number);

    Dataset ds;
    const int n = static_cast<int>(labels.size());
    ds.images = Tensor({n, 1, 16, 16},
                       Eigen::Map<const Eigen::ArrayXd>(pixels.data(), static_cast<Eigen::Index>(pixels.size())));
    ds.labels = std::move(labels);
    ds.num_classes = 10;
    ds.name = "usps";
    if (info) {
        info->n_loaded = n;
        info->count_mismatch = n != kUspsReferenceCount;
    }
    if (n != kUspsReferenceCount)
        std::cerr << "warning: " << path << ": loaded " << n << " samples, reference count is "
                  << kUspsReferenceCount << " (CountMismatch)\n";
    return ds;
}

Dataset synthesize(int num_classes, int n_per_class, int channels, int height, int width,
                   double noise_sigma, std::uint64_t seed) {
    if (num_classes < 1 || n_per_class < 1 || channels < 1 || height < 1 || width < 1)
        throw DataError("synthesize: all dimensions must be >= 1");
    const int n = num_classes * n_per_class;
    Dataset ds;
    ds.images = Tensor({n, channels, height, width});
    ds.labels.resize(static_cast<std::size_t>(n));
    ds.num_classes = num_classes;
    ds.name = "synthetic";

    Xoshiro256ss rng(seed);
    double* dst = ds.images.data();
    for (int i = 0; i < n; ++i) {
        const int k = i % num_classes;
        ds.labels[static_cast<std::size_t>(i)] = k;
        const double freq = 1.0 + 2.0 * static_cast<double>(k) / num_classes;
        const double theta = std::numbers::pi * static_cast<double>(k) / num_classes;
        const double cos_t = std::cos(theta), sin_t = std::sin(theta);
        for (int c = 0; c < channels; ++c) {
            const double phase = 0.7 * c;
            for (int y = 0; y < height; ++y) {
                for (int x = 0; x < width; ++x) {
                    const double xn = (x + 0.5) / width - 0.5;
                    const double yn = (y + 0.5) / height - 0.5;
                    double v = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * freq * (xn * cos_t + yn * sin_t) +
                                                    phase);
                    if (noise_sigma > 0.0) v += noise_sigma * rng.next_normal();
                    *dst++ = std::clamp(v, 0.0, 1.0);
                }
            }
        }
    }
    return ds;
}

NormStats compute_norm_stats(const Dataset& train) {
    if (train.n() < 1) throw DataError("compute_norm_stats: empty dataset");
    const int channels = train.channels();
    const Eigen::Index plane = static_cast<Eigen::Index>(train.height()) * train.width();
    NormStats stats;
    stats.mean = Eigen::VectorXd::Zero(channels);
    stats.stddev = Eigen::VectorXd::Ones(channels);
    for (int c = 0; c < channels; ++c) {
        double sum = 0.0, sumsq = 0.0;
        Eigen::Index count = 0;
        for (int i = 0; i < train.n(); ++i) {
            const double* p = train.images.data() +
                              (static_cast<Eigen::Index>(i) * channels + c) * plane;
            for (Eigen::Index j = 0; j < plane; ++j) {
                sum += p[j];
                sumsq += p[j] * p[j];
            }
            count += plane;
        }
        const double mean = sum / static_cast<double>(count);
        const double var = std::max(0.0, sumsq / static_cast<double>(count) - mean * mean);
        const double sd = std::sqrt(var);
        stats.mean[c] = mean;
        if (sd < 1e-12) {
            stats.degenerate_channels.push_back(c);
            stats.stddev[c] = 1.0;
            std::cerr << "warning: channel " << c << " of " << train.name
                      << " is constant (DegenerateChannel); dividing by 1\n";
        } else {
            stats.stddev[c] = sd;
        }
    }
    return stats;
}

Dataset normalize(const Dataset& ds, const NormStats& stats) {
    if (stats.mean.size() != ds.channels()) throw DataError("normalize: channel count mismatch");
    Dataset out = ds;
    const int channels = ds.channels();
    const Eigen::Index plane = static_cast<Eigen::Index>(ds.height()) * ds.width();
    for (int i = 0; i < ds.n(); ++i) {
        for (int c = 0; c < channels; ++c) {
            double* p = out.images.data() + (static_cast<Eigen::Index>(i) * channels + c) * plane;
            const double m = stats.mean[c], inv = 1.0 / stats.stddev[c];
            for (Eigen::Index j = 0; j < plane; ++j) p[j] = (p[j] - m) * inv;
        }
    }
    return out;
}

Dataset normalize(const Dataset& ds) { return normalize(ds, compute_norm_stats(ds)); }

std::pair<Dataset, Dataset> split(const Dataset& ds, double val_fraction, std::uint64_t seed) {
    if (ds.n() < 1) throw DataError("split: empty dataset");
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw DataError("split: val_fraction must be in (0,1)");

    auto by_class = indices_by_class(ds);
    // per-class validation counts by largest remainder, so the class
    // distribution is preserved within +-1 sample
    const long total_val = std::lround(val_fraction * ds.n());
    std::vector<int> val_count(by_class.size(), 0);
    std::vector<std::pair<double, int>> remainders;
    long assigned = 0;
    for (std::size_t k = 0; k < by_class.size(); ++k) {
        const double exact = val_fraction * static_cast<double>(by_class[k].size());
        val_count[k] = static_cast<int>(std::floor(exact));
        assigned += val_count[k];
        remainders.push_back({exact - std::floor(exact), static_cast<int>(k)});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t r = 0; assigned < total_val && r < remainders.size(); ++r) {
        ++val_count[static_cast<std::size_t>(remainders[r].second)];
        ++assigned;
    }

    std::vector<int> train_rows, val_rows;
    for (std::size_t k = 0; k < by_class.size(); ++k) {
        Xoshiro256ss rng(derive_seed(seed, k));
        std::vector<int>& members = by_class[k];
        std::vector<int> perm = random_permutation(static_cast<int>(members.size()), rng);
        for (std::size_t i = 0; i < members.size(); ++i) {
            const int row = members[static_cast<std::size_t>(perm[i])];
            if (static_cast<int>(i) < val_count[k])
                val_rows.push_back(row);
            else
                train_rows.push_back(row);
        }
    }
    return {take_rows(ds, std::move(train_rows), "train"), take_rows(ds, std::move(val_rows), "validation")};
}

Dataset subset_stratified(const Dataset& ds, int per_class, std::uint64_t seed) {
    auto by_class = indices_by_class(ds);
    std::vector<int> rows;
    for (std::size_t k = 0; k < by_class.size(); ++k) {
        if (static_cast<int>(by_class[k].size()) < per_class)
            throw DataError("subset_stratified: class " + std::to_string(k) + " has only " +
                            std::to_string(by_class[k].size()) + " samples, need " + std::to_string(per_class));
        Xoshiro256ss rng(derive_seed(seed, k));
        std::vector<int> perm = random_permutation(static_cast<int>(by_class[k].size()), rng);
        for (int i = 0; i < per_class; ++i)
            rows.push_back(by_class[k][static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
    }
    return take_rows(ds, std::move(rows), ds.split);
}

void save_fixture(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(kFixtureMagic, 4);
    auto write_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    write_u32(kFixtureVersion);
    write_u32(static_cast<std::uint32_t>(ds.num_classes));
    write_u32(static_cast<std::uint32_t>(ds.channels()));
    write_u32(static_cast<std::uint32_t>(ds.height()));
    write_u32(static_cast<std::uint32_t>(ds.width()));
    const std::uint64_t n = static_cast<std::uint64_t>(ds.n());
    out.write(reinterpret_cast<const char*>(&n), 8);
    for (int label : ds.labels) {
        const std::int32_t v = label;
        out.write(reinterpret_cast<const char*>(&v), 4);
    }
    out.write(reinterpret_cast<const char*>(ds.images.data()),
              static_cast<std::streamsize>(ds.images.size() * static_cast<Eigen::Index>(sizeof(double))));
    if (!out) throw IoError("short write to " + path);
}

Dataset load_fixture(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kFixtureMagic, 4) != 0) throw BadMagicError(path + ": not an ASFX fixture");
    auto read_u32 = [&]() {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        if (!in) throw TruncatedFileError(path + ": truncated fixture header");
        return v;
    };
    const std::uint32_t version = read_u32();
    if (version != kFixtureVersion) throw DataError(path + ": unsupported fixture version");
    const int k = static_cast<int>(read_u32());
    const int c = static_cast<int>(read_u32());
    const int h = static_cast<int>(read_u32());
    const int w = static_cast<int>(read_u32());
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    if (!in) throw TruncatedFileError(path + ": truncated fixture header");

    Dataset ds;
    ds.num_classes = k;
    ds.name = "fixture";
    ds.labels.resize(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        std::int32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        if (!in) throw TruncatedFileError(path + ": truncated label block");
        ds.labels[static_cast<std::size_t>(i)] = v;
    }
    ds.images = Tensor({static_cast<int>(n), c, h, w});
    in.read(reinterpret_cast<char*>(ds.images.data()),
            static_cast<std::streamsize>(ds.images.size() * static_cast<Eigen::Index>(sizeof(double))));
    if (static_cast<Eigen::Index>(in.gcount()) !=
        ds.images.size() * static_cast<Eigen::Index>(sizeof(double)))
        throw TruncatedFileError(path + ": truncated pixel block");
    return ds;
}

} // namespace archsel::data
