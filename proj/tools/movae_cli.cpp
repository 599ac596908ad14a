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

// movae: experiment runner.
//
//   movae supervised --train-images ... --seed 1 --out run.json
//   movae semisup    --config semisup.cfg --seed 3
//   movae oneshot    --omniglot-dir data/omniglot28 --ways 5 --seed 7
//   movae convert    --omniglot-dir raw/ --out data/omniglot28
//   movae run        --protocol semisup ...

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "movae/datasets.hpp"
#include "movae/error.hpp"
#include "movae/harness/checkpoint.hpp"
#include "movae/harness/cli.hpp"
#include "movae/harness/experiments.hpp"
#include "movae/harness/record.hpp"

namespace {

int exit_code(movae::ErrorCategory c) {
  using movae::ErrorCategory;
  switch (c) {
    case ErrorCategory::config:
    case ErrorCategory::argument: return 2;
    case ErrorCategory::io: return 3;
    case ErrorCategory::format:
    case ErrorCategory::consistency: return 4;
    case ErrorCategory::numerical:
    case ErrorCategory::domain: return 5;
    case ErrorCategory::dimension:
    case ErrorCategory::state: return 6;
  }
  return 1;
}

std::string trace_path(const std::string& base, int repeat, int repeats) {
  if (repeats == 1) return base;
  std::filesystem::path p(base);
  return (p.parent_path() / (p.stem().string() + ".r" + std::to_string(repeat) + p.extension().string())).string();
}

void emit(const movae::ExperimentConfig& cfg, const movae::MetricsRecord& rec, const movae::Mixture& mix) {
  const std::string json = movae::to_json(rec).dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << json;
  } else {
    movae::write_text(cfg.out, json);
  }
  if (!cfg.trace.empty() && rec.protocol == movae::Protocol::semisup) {
    for (const auto& rep : rec.repeats) {
      movae::write_text(trace_path(cfg.trace, rep.repeat, cfg.repeats), movae::trace_csv(rep));
    }
  }
  if (!cfg.checkpoint.empty()) movae::save_checkpoint(mix, cfg.checkpoint);
}

/// Validates a PGM tree and writes a normalized 28x28 copy with the same layout.
void convert_tree(const std::string& src, const std::string& dst) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(src)) throw movae::IoError("not a directory: " + src);
  std::size_t classes = 0, images = 0;
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(src)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw movae::ConsistencyError("no class directories under " + src);
  for (const auto& d : dirs) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(d)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw movae::ConsistencyError("empty class directory " + d.string());
    const fs::path out_dir = fs::path(dst) / d.filename();
    fs::create_directories(out_dir);
    for (const auto& f : files) {
      const auto pixels = movae::load_pgm_image(f);
      movae::PgmImage img{movae::kImageSide, movae::kImageSide, 255, {}};
      img.pixels.reserve(pixels.size());
      for (float v : pixels) img.pixels.push_back(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)));
      movae::write_pgm(out_dir / (f.stem().string() + ".pgm"), img);
      ++images;
    }
    ++classes;
  }
  std::cout << "converted " << images << " images in " << classes << " classes to " << dst << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixture of variational autoencoders: one-shot classification experiments"};
  app.require_subcommand(1);

  movae::ExperimentConfig cfg;
  auto* supervised = app.add_subcommand("supervised", "Train one VAE per class on labeled data");
  auto* semisup = app.add_subcommand("semisup", "k-shot labeled start plus generalization over unlabeled data");
  auto* oneshot = app.add_subcommand("oneshot", "N-way k-shot episodes with augmentation, vs kNN");
  auto* run = app.add_subcommand("run", "Any protocol, selected with --protocol");
  movae::bind_experiment_options(*supervised, cfg, false);
  movae::bind_experiment_options(*semisup, cfg, false);
  movae::bind_experiment_options(*oneshot, cfg, false);
  movae::bind_experiment_options(*run, cfg, true);

  std::string convert_src, convert_dst;
  auto* convert = app.add_subcommand("convert", "Validate a PGM tree and write a 28x28 normalized copy");
  convert->add_option("--omniglot-dir", convert_src, "Source tree <root>/<class>/<sample>.pgm")->required();
  convert->add_option("--out", convert_dst, "Destination root")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; any real parse failure is an argument error.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto log = [](const std::string& msg) { std::cerr << msg << std::endl; };
  try {
    if (convert->parsed()) {
      convert_tree(convert_src, convert_dst);
      return 0;
    }
    if (supervised->parsed()) cfg.protocol = movae::Protocol::supervised;
    if (semisup->parsed()) cfg.protocol = movae::Protocol::semisup;
    if (oneshot->parsed()) cfg.protocol = movae::Protocol::oneshot;
    cfg.validate();
    movae::Mixture mix;
    const auto rec = movae::run_experiment(cfg, log, &mix);
    emit(cfg, rec, mix);
    const auto acc = rec.accuracy();
    std::cerr << "accuracy " << acc.mean << " +- " << acc.stddev << " over " << rec.repeats.size() << " repeat(s)\n";
    return 0;
  } catch (const movae::Error& e) {
    std::cerr << e.what() << std::endl;
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
