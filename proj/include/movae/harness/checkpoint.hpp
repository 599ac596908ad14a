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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "movae/error.hpp"
#include "movae/mixture.hpp"

namespace movae {

// Layout (all integers little-endian):
//   "MOVAE" | u16 version | u8 metric | u32 input_dim | u32 hidden_dim |
//   u32 latent_dim | u32 member_count |
//   per member: u32 label_len | label bytes (decimal) |
//               f32 weights then f32 bias of each layer in declaration order.
inline constexpr char kCheckpointMagic[5] = {'M', 'O', 'V', 'A', 'E'};
inline constexpr std::uint16_t kCheckpointVersion = 1;
inline constexpr std::size_t kCheckpointHeaderBytes = 5 + 2 + 1 + 4 * 4;

namespace detail {

class ByteWriter {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    bytes.insert(bytes.end(), b, b + n);
  }
  template <class U>
  void le(U v) {
    static_assert(std::is_integral_v<U>);
    for (std::size_t i = 0; i < sizeof(U); ++i) bytes.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void f32(float v) { le(std::bit_cast<std::uint32_t>(v)); }

  std::vector<unsigned char> bytes;
};

class ByteReader {
 public:
  ByteReader(const std::vector<unsigned char>& b, std::string source) : b_(b), source_(std::move(source)) {}

  const unsigned char* take(std::size_t n) {
    if (pos_ + n > b_.size()) throw IoError("truncated checkpoint " + source_);
    const unsigned char* p = b_.data() + pos_;
    pos_ += n;
    return p;
  }
  template <class U>
  U le() {
    const unsigned char* p = take(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v = static_cast<U>(v | (static_cast<U>(p[i]) << (8 * i)));
    return v;
  }
  float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }
  bool done() const { return pos_ == b_.size(); }

 private:
  const std::vector<unsigned char>& b_;
  std::string source_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<unsigned char> serialize_checkpoint(const Mixture& mix) {
  detail::ByteWriter w;
  w.raw(kCheckpointMagic, sizeof kCheckpointMagic);
  w.le<std::uint16_t>(kCheckpointVersion);
  w.le<std::uint8_t>(mix.metric == MetricKind::pcc ? 0 : 1);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(mix.config.input_dim));
  w.le<std::uint32_t>(static_cast<std::uint32_t>(mix.config.hidden_dim));
  w.le<std::uint32_t>(static_cast<std::uint32_t>(mix.config.latent_dim));
  w.le<std::uint32_t>(static_cast<std::uint32_t>(mix.members.size()));
  for (const auto& m : mix.members) {
    const std::string label = std::to_string(m.label);
    w.le<std::uint32_t>(static_cast<std::uint32_t>(label.size()));
    w.raw(label.data(), label.size());
    for (const auto* layer : m.model.layers()) {
      for (Eigen::Index i = 0; i < layer->weights.size(); ++i) w.f32(layer->weights.data()[i]);
      for (Eigen::Index i = 0; i < layer->bias.size(); ++i) w.f32(layer->bias.data()[i]);
    }
  }
  return std::move(w.bytes);
}

/// `template_config` supplies the training hyperparameters not stored on disk.
inline Mixture deserialize_checkpoint(const std::vector<unsigned char>& bytes, const std::string& source,
                                      const VaeConfig& template_config = VaeConfig{}) {
  detail::ByteReader r(bytes, source);
  if (std::memcmp(r.take(sizeof kCheckpointMagic), kCheckpointMagic, sizeof kCheckpointMagic) != 0) {
    throw FormatError("bad checkpoint magic in " + source);
  }
  const auto version = r.le<std::uint16_t>();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint " + source + " has version " + std::to_string(version) +
                      ", expected " + std::to_string(kCheckpointVersion));
  }
  const auto metric = r.le<std::uint8_t>();
  if (metric > 1) throw FormatError("unknown metric tag in checkpoint " + source);
  Mixture mix;
  mix.metric = metric == 0 ? MetricKind::pcc : MetricKind::rmse;
  mix.config = template_config;
  mix.config.input_dim = static_cast<int>(r.le<std::uint32_t>());
  mix.config.hidden_dim = static_cast<int>(r.le<std::uint32_t>());
  mix.config.latent_dim = static_cast<int>(r.le<std::uint32_t>());
  const auto count = r.le<std::uint32_t>();
  mix.config.validate();
  Prng unused(0);
  for (std::uint32_t k = 0; k < count; ++k) {
    MixtureMember m;
    const auto len = r.le<std::uint32_t>();
    if (len == 0 || len > 32) throw FormatError("bad label length in checkpoint " + source);
    const auto* p = r.take(len);
    const std::string label(reinterpret_cast<const char*>(p), len);
    try {
      std::size_t used = 0;
      m.label = std::stoi(label, &used);
      if (used != label.size()) throw std::invalid_argument(label);
    } catch (const std::exception&) {
      throw FormatError("bad member label '" + label + "' in checkpoint " + source);
    }
    m.model = VaeModel<float>::init(mix.config, unused);
    for (auto* layer : m.model.layers()) {
      for (Eigen::Index i = 0; i < layer->weights.size(); ++i) layer->weights.data()[i] = r.f32();
      for (Eigen::Index i = 0; i < layer->bias.size(); ++i) layer->bias.data()[i] = r.f32();
    }
    m.optimizer = RmsPropState<float>(mix.config.optimizer);
    m.trained = true;
    mix.members.push_back(std::move(m));
  }
  if (!r.done()) throw FormatError("trailing bytes in checkpoint " + source);
  return mix;
}

inline void save_checkpoint(const Mixture& mix, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(mix);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for checkpoint " + path.string());
}

inline Mixture load_checkpoint(const std::filesystem::path& path, const VaeConfig& template_config = VaeConfig{}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes, path.string(), template_config);
}

}  // namespace movae
