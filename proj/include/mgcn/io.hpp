#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mgcn/eval.hpp"
#include "mgcn/graph.hpp"
#include "mgcn/train.hpp"

namespace mgcn {

/// Flat key=value text file; '#' lines and blanks ignored.
std::map<std::string, std::string> read_kv_file(const std::string& path);

SyntheticSpec parse_synthetic_spec(
    const std::map<std::string, std::string>& kv);

/// Applies config-file keys onto a TrainConfig (defaults stay where a key
/// is absent). Throws on unknown keys.
void apply_train_config(const std::map<std::string, std::string>& kv,
                        TrainConfig& cfg);

/// One line per epoch: epoch, link, label, total; 9 significant digits.
void write_history(const std::string& path, const TrainHistory& history);

/// One text file per layer, one row of F reals per node.
void write_embeddings(const std::string& dir, const EmbeddingSet& z);
DenseMatrix read_embedding_file(const std::string& path);

void write_report(const std::string& path,
                  const std::vector<ExperimentReport>& reports);

void write_scores(const std::string& path, const Scores& scores);

/// FNV-1a over the byte content of every regular file in the directory,
/// in sorted filename order.
std::uint64_t dataset_digest(const std::string& dataset_dir);

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t dataset_digest = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> artifacts;
};

void write_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace mgcn
