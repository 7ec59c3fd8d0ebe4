// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phaseid/circuit.hpp"
#include "phaseid/dataset_io.hpp"
#include "phaseid/entropy.hpp"
#include "phaseid/infonet.hpp"
#include "phaseid/preprocess.hpp"
#include "phaseid/selection.hpp"

namespace phaseid::pipeline {

struct ExperimentConfig {
  // Data source: synthetic circuit or CSV paths.
  bool synth = true;
  circuit::CircuitSpec circuit;
  size_t n_timesteps = 168;
  std::string voltages_csv;
  std::string labels_csv;

  selection::Method method = selection::Method::inverse_schur;
  size_t m = 0;  // 0 means 5% of the customer count

  infonet::TrainingConfig train;

  bool baseline_knn = false;
  bool baseline_correlation = false;
  bool baseline_kmeans = false;
  size_t knn_k = 5;

  size_t trials = 10;
  uint64_t master_seed = 1;
  std::string output_dir = "out";
  bool svg = false;
  std::string circuit_tag = "synth";

  std::string config_text;  // verbatim source, embedded in provenance

  size_t resolved_m(size_t n_customers, size_t n_classes) const;
};

// Flat key=value text with [section] headers, '#' comments.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

struct AccuracyRow {
  std::string method;
  std::string circuit;
  double mean = 0.0;
  double stdev = 0.0;
  size_t trials = 0;
};

struct EmbeddingRow {
  size_t customer = 0;
  double pc1 = 0.0;
  double pc2 = 0.0;
  circuit::PhaseLabel truth = circuit::PhaseLabel::A;
  circuit::PhaseLabel predicted = circuit::PhaseLabel::A;
};

struct ReportBundle {
  std::vector<AccuracyRow> accuracy;
  std::vector<EmbeddingRow> embedding;  // final trial, one row per customer
  entropy::EntropyReport entropy_report;
  std::string provenance;
};

// Full protocol, deterministic in the config: per trial t with seed
// master_seed + t, synthesize/load -> self_normalize -> batch_normalize ->
// select -> train -> evaluate on the non-selected customers (+ toggled
// baselines); aggregates over trials and embeds the final trial's
// representations with 2-component PCA.
ReportBundle run_experiment(const ExperimentConfig& config);

// Writes accuracy.csv, embedding.csv, entropy.txt, provenance.txt and an
// optional embedding.svg scatter into dir.
void emit_reports(const ReportBundle& bundle, const std::string& dir, bool svg);

// Recover the verbatim config text from a provenance file.
std::string config_text_from_provenance(const std::string& provenance_path);

// Between-class centroid separation over mean within-class spread of the
// 2-D embedding.
double embedding_separation_ratio(const std::vector<EmbeddingRow>& rows);

uint64_t fnv1a64(const std::string& s);

}  // namespace phaseid::pipeline
