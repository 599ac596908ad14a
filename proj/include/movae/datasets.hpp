// Copyright 2026 The MoVAE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "movae/augment.hpp"
#include "movae/error.hpp"
#include "movae/mixture.hpp"
#include "movae/pool.hpp"
#include "movae/prng.hpp"
#include "movae/tensor.hpp"

namespace movae {

/// Images as rows in [0, 1] with a parallel label list.
struct LabeledDataset {
  Tensorf images;
  std::vector<Label> labels;
  std::map<Label, std::vector<std::size_t>> class_index;
  /// Optional human-readable names (directory names for PGM trees).
  std::map<Label, std::string> class_names;

  LabeledDataset() = default;
  LabeledDataset(Tensorf imgs, std::vector<Label> lbls) : images(std::move(imgs)), labels(std::move(lbls)) {
    if (static_cast<std::size_t>(images.rows()) != labels.size()) {
      throw ConsistencyError("dataset has " + std::to_string(images.rows()) + " images but " +
                             std::to_string(labels.size()) + " labels");
    }
    rebuild_index();
  }

  std::size_t size() const { return labels.size(); }

  void rebuild_index() {
    class_index.clear();
    for (std::size_t i = 0; i < labels.size(); ++i) class_index[labels[i]].push_back(i);
  }

  std::vector<Label> classes() const {
    std::vector<Label> out;
    for (const auto& [label, _] : class_index) out.push_back(label);
    return out;
  }

  LabeledDataset subset(const std::vector<std::size_t>& indices) const {
    std::vector<Label> l;
    l.reserve(indices.size());
    for (auto i : indices) l.push_back(labels.at(i));
    LabeledDataset out(gather_rows(images, indices), std::move(l));
    for (const auto& [label, _] : out.class_index) {
      if (auto it = class_names.find(label); it != class_names.end()) out.class_names[label] = it->second;
    }
    return out;
  }

  Tensorf class_images(Label label) const {
    auto it = class_index.find(label);
    if (it == class_index.end()) return Tensorf(0, images.cols());
    return gather_rows(images, it->second);
  }
};

// ---------------------------------------------------------------------------
// IDX

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

namespace detail {

inline std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

inline std::uint32_t read_be32(const std::vector<unsigned char>& b, std::size_t off,
                               const std::filesystem::path& path) {
  if (off + 4 > b.size()) throw IoError("truncated header in " + path.string());
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

inline std::string hex32(std::uint32_t v) {
  std::ostringstream os;
  os << "0x" << std::hex;
  os.width(8);
  os.fill('0');
  os << v;
  return os.str();
}

}  // namespace detail

/// Big-endian IDX image/label pair; pixels are scaled by 1/255.
inline LabeledDataset load_idx(const std::filesystem::path& images_path,
                               const std::filesystem::path& labels_path) {
  const auto ib = detail::read_file(images_path);
  const auto lb = detail::read_file(labels_path);
  const auto imagic = detail::read_be32(ib, 0, images_path);
  if (imagic != kIdxImageMagic) {
    throw FormatError("bad IDX image magic " + detail::hex32(imagic) + " in " + images_path.string());
  }
  const auto lmagic = detail::read_be32(lb, 0, labels_path);
  if (lmagic != kIdxLabelMagic) {
    throw FormatError("bad IDX label magic " + detail::hex32(lmagic) + " in " + labels_path.string());
  }
  const std::size_t count = detail::read_be32(ib, 4, images_path);
  const std::size_t rows = detail::read_be32(ib, 8, images_path);
  const std::size_t cols = detail::read_be32(ib, 12, images_path);
  const std::size_t lcount = detail::read_be32(lb, 4, labels_path);
  if (count != lcount) {
    throw ConsistencyError(images_path.string() + " holds " + std::to_string(count) + " images but " +
                           labels_path.string() + " holds " + std::to_string(lcount) + " labels");
  }
  const std::size_t pixels = rows * cols;
  if (ib.size() < 16 + count * pixels) throw IoError("truncated image data in " + images_path.string());
  if (lb.size() < 8 + count) throw IoError("truncated label data in " + labels_path.string());

  Tensorf images(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(pixels));
  const unsigned char* src = ib.data() + 16;
  for (std::size_t i = 0; i < count * pixels; ++i) images.data()[i] = static_cast<float>(src[i]) / 255.0f;
  std::vector<Label> labels(count);
  for (std::size_t i = 0; i < count; ++i) labels[i] = lb[8 + i];
  return LabeledDataset(std::move(images), std::move(labels));
}

// ---------------------------------------------------------------------------
// PGM

struct PgmImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<unsigned char> pixels;
};

namespace detail {

inline void skip_pgm_space(const std::vector<unsigned char>& b, std::size_t& pos) {
  while (pos < b.size()) {
    if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (std::isspace(b[pos])) {
      ++pos;
    } else {
      break;
    }
  }
}

inline int read_pgm_int(const std::vector<unsigned char>& b, std::size_t& pos,
                        const std::filesystem::path& path) {
  skip_pgm_space(b, pos);
  if (pos >= b.size() || !std::isdigit(b[pos])) throw FormatError("malformed PGM header in " + path.string());
  long v = 0;
  while (pos < b.size() && std::isdigit(b[pos])) {
    v = v * 10 + (b[pos++] - '0');
    if (v > 1 << 20) throw FormatError("PGM header value too large in " + path.string());
  }
  return static_cast<int>(v);
}

}  // namespace detail

inline PgmImage read_pgm(const std::filesystem::path& path) {
  const auto b = detail::read_file(path);
  if (b.size() < 2 || b[0] != 'P' || b[1] != '5') throw FormatError("not a binary P5 PGM: " + path.string());
  std::size_t pos = 2;
  PgmImage img;
  img.width = detail::read_pgm_int(b, pos, path);
  img.height = detail::read_pgm_int(b, pos, path);
  img.maxval = detail::read_pgm_int(b, pos, path);
  if (img.width < 1 || img.height < 1) throw FormatError("empty PGM image: " + path.string());
  if (img.maxval < 1 || img.maxval > 255) throw FormatError("unsupported PGM maxval in " + path.string());
  if (pos >= b.size() || !std::isspace(b[pos])) throw FormatError("malformed PGM header in " + path.string());
  ++pos;
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  if (b.size() < pos + n) throw IoError("truncated PGM data in " + path.string());
  img.pixels.assign(b.begin() + static_cast<std::ptrdiff_t>(pos), b.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return img;
}

inline void write_pgm(const std::filesystem::path& path, const PgmImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << img.width << ' ' << img.height << '\n' << img.maxval << '\n';
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

inline constexpr int kOmniglotSide = 105;

/// Area-average resampling of a 105x105 image to 28x28.
template <class T>
std::vector<T> downsample(std::span<const T> image) {
  constexpr int in = kOmniglotSide;
  constexpr int out = kImageSide;
  if (image.size() != static_cast<std::size_t>(in * in)) {
    throw DimensionError("downsample: expected " + std::to_string(in * in) + " pixels, got " +
                         std::to_string(image.size()));
  }
  // weights[o][i]: overlap of input cell i with output cell o, in input units.
  std::vector<std::vector<std::pair<int, double>>> weights(out);
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    const double lo = o * scale, hi = (o + 1) * scale;
    for (int i = static_cast<int>(std::floor(lo)); i < in && i < hi; ++i) {
      const double w = std::min<double>(i + 1, hi) - std::max<double>(i, lo);
      if (w > 0) weights[o].push_back({i, w / scale});
    }
  }
  std::vector<double> rows(static_cast<std::size_t>(out * in), 0.0);  // vertical pass
  for (int o = 0; o < out; ++o) {
    for (auto [i, w] : weights[o]) {
      for (int x = 0; x < in; ++x) rows[static_cast<std::size_t>(o * in + x)] += w * image[static_cast<std::size_t>(i * in + x)];
    }
  }
  std::vector<T> result(static_cast<std::size_t>(out * out));
  for (int oy = 0; oy < out; ++oy) {
    for (int ox = 0; ox < out; ++ox) {
      double v = 0.0;
      for (auto [i, w] : weights[ox]) v += w * rows[static_cast<std::size_t>(oy * in + i)];
      result[static_cast<std::size_t>(oy * out + ox)] = static_cast<T>(v);
    }
  }
  return result;
}

/// Scales a PGM to [0, 1], inverting when the background is white (mean > 0.5)
/// so strokes are the high-intensity foreground.
inline std::vector<float> normalize_pgm(const PgmImage& img) {
  std::vector<float> v(img.pixels.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = static_cast<float>(img.pixels[i]) / static_cast<float>(img.maxval);
    mean += v[i];
  }
  mean /= static_cast<double>(std::max<std::size_t>(1, v.size()));
  if (mean > 0.5) {
    for (auto& x : v) x = 1.0f - x;
  }
  return v;
}

/// A 28x28 or 105x105 PGM as a normalized 784-pixel image.
inline std::vector<float> load_pgm_image(const std::filesystem::path& path) {
  const auto img = read_pgm(path);
  const auto v = normalize_pgm(img);
  if (img.width == kImageSide && img.height == kImageSide) return v;
  if (img.width == kOmniglotSide && img.height == kOmniglotSide) {
    return downsample(std::span<const float>(v));
  }
  throw DimensionError(path.string() + " is " + std::to_string(img.width) + "x" +
                       std::to_string(img.height) + "; expected 28x28 or 105x105");
}

/// `<root>/<class>/<sample>.pgm`. Classes get labels 0.. in sorted directory
/// name order; files within a class are read in sorted name order.
inline LabeledDataset load_pgm_tree(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());
  std::vector<fs::path> class_dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) class_dirs.push_back(e.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.empty()) throw ConsistencyError("no class directories under " + root.string());

  std::vector<std::vector<float>> images;
  std::vector<Label> labels;
  std::map<Label, std::string> names;
  for (std::size_t c = 0; c < class_dirs.size(); ++c) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(class_dirs[c])) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConsistencyError("empty class directory " + class_dirs[c].string());
    for (const auto& f : files) {
      images.push_back(load_pgm_image(f));
      labels.push_back(static_cast<Label>(c));
    }
    names[static_cast<Label>(c)] = class_dirs[c].filename().string();
  }
  Tensorf t(static_cast<Eigen::Index>(images.size()), kImagePixels);
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::copy(images[i].begin(), images[i].end(), t.row(static_cast<Eigen::Index>(i)).data());
  }
  LabeledDataset ds(std::move(t), std::move(labels));
  ds.class_names = std::move(names);
  return ds;
}

// ---------------------------------------------------------------------------
// Splits and episodes

struct LabeledSplit {
  LabeledDataset labeled;
  UnlabeledPool unlabeled;
  /// Dataset row of each pool entry (pool order is ascending row order).
  std::vector<std::size_t> pool_rows;
};

/// k labeled samples per class uniformly without replacement; every other
/// sample goes to the unlabeled pool with its label dropped.
inline LabeledSplit split_labeled_unlabeled(const LabeledDataset& ds, std::size_t k_per_class,
                                            const Prng& prng) {
  std::vector<char> is_labeled(ds.size(), 0);
  std::vector<std::size_t> labeled_rows;
  for (const auto& [label, rows] : ds.class_index) {
    if (rows.size() < k_per_class) {
      throw ArgumentError("class " + std::to_string(label) + " has " + std::to_string(rows.size()) +
                          " samples, fewer than k = " + std::to_string(k_per_class));
    }
    Prng stream = prng.split(static_cast<std::uint64_t>(static_cast<std::int64_t>(label)));
    for (auto j : sample_without_replacement(rows.size(), k_per_class, stream)) {
      labeled_rows.push_back(rows[j]);
      is_labeled[rows[j]] = 1;
    }
  }
  LabeledSplit out;
  out.labeled = ds.subset(labeled_rows);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (!is_labeled[i]) out.pool_rows.push_back(i);
  }
  out.unlabeled = UnlabeledPool(gather_rows(ds.images, out.pool_rows));
  return out;
}

struct EpisodeSpec {
  std::size_t n_way = 5;
  std::size_t k_shot = 1;
  std::size_t test_per_class = 19;

  void validate() const {
    if (n_way < 2) throw ConfigError("episode: n_way must be >= 2");
    if (k_shot < 1) throw ConfigError("episode: k_shot must be >= 1");
  }
};

struct Episode {
  LabeledDataset train;
  LabeledDataset test;
};

inline Episode sample_episode(const LabeledDataset& ds, const EpisodeSpec& spec, const Prng& prng) {
  spec.validate();
  const auto classes = ds.classes();
  if (classes.size() < spec.n_way) {
    throw ArgumentError("episode needs " + std::to_string(spec.n_way) + " classes, dataset has " +
                        std::to_string(classes.size()));
  }
  Prng class_stream = prng.split("classes");
  auto picked = sample_without_replacement(classes.size(), spec.n_way, class_stream);
  std::sort(picked.begin(), picked.end());
  std::vector<std::size_t> train_rows, test_rows;
  for (auto ci : picked) {
    const Label label = classes[ci];
    const auto& rows = ds.class_index.at(label);
    const std::size_t need = spec.k_shot + spec.test_per_class;
    if (rows.size() < need) {
      throw ArgumentError("class " + std::to_string(label) + " has " + std::to_string(rows.size()) +
                          " samples; episode needs " + std::to_string(need));
    }
    Prng s = prng.split("samples").split(static_cast<std::uint64_t>(static_cast<std::int64_t>(label)));
    const auto draw = sample_without_replacement(rows.size(), need, s);
    for (std::size_t j = 0; j < need; ++j) (j < spec.k_shot ? train_rows : test_rows).push_back(rows[draw[j]]);
  }
  return {ds.subset(train_rows), ds.subset(test_rows)};
}

}  // namespace movae
