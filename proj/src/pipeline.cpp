// SPDX-License-Identifier: Apache-2.0
#include "phaseid/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "phaseid/baselines.hpp"
#include "phaseid/numerics.hpp"

namespace phaseid::pipeline {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": '" + v + "'");
  }
}

uint64_t to_u64(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const unsigned long long d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: bad boolean for " + key + ": '" + v + "'");
}

// "A:0.5,B:0.3,C:0.2"
std::vector<std::pair<circuit::PhaseLabel, double>> parse_mix(const std::string& v) {
  std::vector<std::pair<circuit::PhaseLabel, double>> mix;
  std::istringstream is(v);
  std::string item;
  while (std::getline(is, item, ',')) {
    const size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("config: bad phase_mix entry '" + item + "'");
    mix.emplace_back(circuit::phase_from_string(trim(item.substr(0, colon))),
                     to_double(trim(item.substr(colon + 1)), "phase_mix"));
  }
  if (mix.empty()) throw ConfigError("config: empty phase_mix");
  return mix;
}

std::string fmt_fixed(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

size_t ExperimentConfig::resolved_m(size_t n_customers, size_t n_classes) const {
  size_t v = m;
  if (v == 0) v = std::max<size_t>(1, n_customers / 20);  // 5% of customers
  if (v < n_classes)
    throw ConfigError("config: selection size m=" + std::to_string(v) +
                      " is below the class count " + std::to_string(n_classes));
  if (v >= n_customers)
    throw ConfigError("config: selection size m must be below the customer count");
  return v;
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.config_text = text;
  // Circuit defaults give a plausible feeder when the config omits fields.
  cfg.circuit.n_customers = 500;
  cfg.circuit.delta_e = 0.001;
  cfg.circuit.z_mag = 0.0008;
  cfg.circuit.sigma = 0.2;
  cfg.circuit.phase_mix = {{circuit::PhaseLabel::A, 0.5},
                           {circuit::PhaseLabel::B, 0.3},
                           {circuit::PhaseLabel::C, 0.2}};

  std::istringstream is(text);
  std::string line, section;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;

    if (full == "circuit.n_customers") cfg.circuit.n_customers = to_u64(value, full);
    else if (full == "circuit.delta_e") cfg.circuit.delta_e = to_double(value, full);
    else if (full == "circuit.z_mag") cfg.circuit.z_mag = to_double(value, full);
    else if (full == "circuit.sigma") cfg.circuit.sigma = to_double(value, full);
    else if (full == "circuit.phase_mix") cfg.circuit.phase_mix = parse_mix(value);
    else if (full == "circuit.coupling_mode")
      cfg.circuit.coupling_mode = circuit::coupling_from_string(value);
    else if (full == "data.source") {
      if (value == "synth") cfg.synth = true;
      else if (value == "csv") cfg.synth = false;
      else throw ConfigError("config: data.source must be synth or csv");
    }
    else if (full == "data.n_timesteps") cfg.n_timesteps = to_u64(value, full);
    else if (full == "data.voltages") { cfg.voltages_csv = value; cfg.synth = false; }
    else if (full == "data.labels") cfg.labels_csv = value;
    else if (full == "selection.method")
      cfg.method = selection::method_from_string(value);
    else if (full == "selection.m") cfg.m = to_u64(value, full);
    else if (full == "training.beta") cfg.train.beta = to_double(value, full);
    else if (full == "training.learning_rate")
      cfg.train.learning_rate = to_double(value, full);
    else if (full == "training.epochs") cfg.train.epochs = to_u64(value, full);
    else if (full == "training.batch_size") cfg.train.batch_size = to_u64(value, full);
    else if (full == "training.hidden_width")
      cfg.train.hidden_width = to_u64(value, full);
    else if (full == "training.stat_hidden_width")
      cfg.train.stat_hidden_width = to_u64(value, full);
    else if (full == "training.optimizer")
      cfg.train.optimizer = infonet::optimizer_from_string(value);
    else if (full == "baselines.knn") cfg.baseline_knn = to_bool(value, full);
    else if (full == "baselines.knn_k") cfg.knn_k = to_u64(value, full);
    else if (full == "baselines.correlation")
      cfg.baseline_correlation = to_bool(value, full);
    else if (full == "baselines.kmeans") cfg.baseline_kmeans = to_bool(value, full);
    else if (full == "experiment.trials") cfg.trials = to_u64(value, full);
    else if (full == "experiment.master_seed") cfg.master_seed = to_u64(value, full);
    else if (full == "experiment.output_dir") cfg.output_dir = value;
    else if (full == "experiment.svg") cfg.svg = to_bool(value, full);
    else if (full == "experiment.circuit_tag") cfg.circuit_tag = value;
    else
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown key '" + full + "'");
  }
  if (cfg.trials < 1) throw ConfigError("config: trials must be >= 1");
  if (!cfg.synth && cfg.voltages_csv.empty())
    throw ConfigError("config: csv source requires data.voltages");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

std::vector<circuit::PhaseLabel> label_vocabulary(const VoltageDataset& data) {
  std::set<int> seen;
  for (circuit::PhaseLabel l : data.labels) seen.insert(static_cast<int>(l));
  std::vector<circuit::PhaseLabel> vocab;
  for (int v : seen) vocab.push_back(static_cast<circuit::PhaseLabel>(v));
  return vocab;
}

struct TrialOutcome {
  double nn_accuracy = 0.0;
  double knn_accuracy = -1.0;
  double correlation_accuracy = -1.0;
  double kmeans_accuracy = -1.0;
  size_t imputed_cells = 0;
  size_t dropped_columns = 0;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

ReportBundle run_experiment(const ExperimentConfig& config) {
  if (config.synth) config.circuit.validate();

  std::vector<double> nn_acc, knn_acc, corr_acc, kmeans_acc;
  std::vector<EmbeddingRow> embedding;
  std::optional<double> entropy_gaussian;
  std::string entropy_notes;
  size_t entropy_n = 0;
  size_t imputed_cells = 0;
  std::vector<size_t> dropped_cols_trial0;

  LoadResult loaded;
  if (!config.synth)
    loaded = load_dataset(config.voltages_csv, config.labels_csv);

  for (size_t trial = 0; trial < config.trials; ++trial) {
    const uint64_t seed = config.master_seed + trial;

    VoltageDataset raw;
    if (config.synth) {
      circuit::CircuitSpec spec = config.circuit;
      spec.seed = seed;
      raw = circuit::sample_voltages(spec, config.n_timesteps);
    } else {
      raw = loaded.data;
      imputed_cells = loaded.imputed_cells;
    }
    if (!raw.has_labels())
      throw NoLabels("run_experiment: accuracy evaluation needs labels");

    const VoltageDataset selfn = self_normalize(raw);
    BatchNormResult bn = batch_normalize(selfn);
    const VoltageDataset& prep = bn.data;
    if (trial == 0) dropped_cols_trial0 = bn.dropped_columns;

    const std::vector<circuit::PhaseLabel> vocab = label_vocabulary(prep);
    const size_t m = config.resolved_m(prep.n_customers, vocab.size());

    selection::SelectionResult sel;
    switch (config.method) {
      case selection::Method::facility:
        sel = selection::select_facility_location(prep, m);
        break;
      case selection::Method::random:
        sel = selection::select_random(selection::cosine_kernel_matrix(prep, false),
                                       m, seed);
        break;
      case selection::Method::inverse_schur:
        sel = selection::select_inverse_schur(
            selection::cosine_kernel_matrix(prep, false), m);
        break;
      case selection::Method::greedy:
        sel = selection::select_greedy(selection::cosine_kernel_matrix(prep, false), m);
        break;
      case selection::Method::exhaustive:
        sel = selection::select_exhaustive(
            selection::cosine_kernel_matrix(prep, false), m);
        break;
    }

    std::vector<circuit::PhaseLabel> subset_labels;
    for (size_t i : sel.indices.indices) subset_labels.push_back(prep.labels[i]);

    infonet::TrainingConfig tc = config.train;
    tc.seed = seed;
    const infonet::ClassifierModel model =
        infonet::train_classifier(prep, sel.indices, subset_labels, vocab, tc);
    const infonet::Prediction pred = infonet::predict(model, prep, seed);

    const IndexSet heldout = sel.indices.complement(prep.n_customers);
    std::vector<circuit::PhaseLabel> pred_held, truth_held;
    for (size_t i : heldout.indices) {
      pred_held.push_back(pred.labels[i]);
      truth_held.push_back(prep.labels[i]);
    }
    nn_acc.push_back(infonet::evaluate_accuracy(pred_held, truth_held));

    // Baselines share the trial's data, selection and seed.
    std::vector<int> label_ids(prep.n_customers);
    std::map<int, int> vocab_id;
    for (size_t v = 0; v < vocab.size(); ++v)
      vocab_id[static_cast<int>(vocab[v])] = static_cast<int>(v);
    for (size_t i = 0; i < prep.n_customers; ++i)
      label_ids[i] = vocab_id.at(static_cast<int>(prep.labels[i]));
    std::vector<int> subset_ids;
    for (size_t i : sel.indices.indices) subset_ids.push_back(label_ids[i]);

    auto heldout_accuracy = [&](const std::vector<int>& all_pred) {
      size_t hit = 0;
      for (size_t i : heldout.indices) hit += all_pred[i] == label_ids[i];
      return static_cast<double>(hit) / static_cast<double>(heldout.size());
    };

    if (config.baseline_knn) {
      Matrix train(sel.indices.size(), prep.n_timesteps);
      for (size_t i = 0; i < sel.indices.size(); ++i)
        std::copy(prep.voltages.row(sel.indices.indices[i]),
                  prep.voltages.row(sel.indices.indices[i]) + prep.n_timesteps,
                  train.row(i));
      const size_t k = std::min(config.knn_k, sel.indices.size());
      const std::vector<int> votes =
          baselines::knn_classify(train, subset_ids, prep.voltages, k);
      knn_acc.push_back(heldout_accuracy(votes));
    }
    if (config.baseline_correlation) {
      const auto clusters = baselines::correlation_linkage(prep.voltages, vocab.size());
      const auto mapped = baselines::map_clusters_to_labels(
          clusters, sel.indices, subset_ids, static_cast<int>(vocab.size()));
      corr_acc.push_back(heldout_accuracy(mapped));
    }
    if (config.baseline_kmeans) {
      const auto clusters =
          baselines::kmeans_phase_cluster(prep.voltages, vocab.size(), seed);
      const auto mapped = baselines::map_clusters_to_labels(
          clusters, sel.indices, subset_ids, static_cast<int>(vocab.size()));
      kmeans_acc.push_back(heldout_accuracy(mapped));
    }

    if (trial + 1 == config.trials) {
      // Embed the final trial's representations.
      const numerics::PcaResult pca = numerics::pca_project(pred.representation, 2);
      embedding.resize(prep.n_customers);
      for (size_t i = 0; i < prep.n_customers; ++i) {
        embedding[i].customer = i;
        embedding[i].pc1 = pca.projected(i, 0);
        embedding[i].pc2 = pca.projected(i, 1);
        embedding[i].truth = prep.labels[i];
        embedding[i].predicted = pred.labels[i];
      }
      entropy_n = prep.n_customers;
      if (config.synth) {
        circuit::CircuitSpec spec = config.circuit;
        spec.seed = seed;
        try {
          const SymMatrix sigma = circuit::theoretical_covariance(spec, raw.labels);
          entropy_gaussian =
              entropy::gaussian_entropy(entropy::scale_to_unit_diagonal(sigma));
          entropy_notes = "coupling=" + circuit::to_string(spec.coupling_mode);
        } catch (const Error& e) {
          entropy_notes = std::string("theoretical covariance unavailable: ") + e.what();
        }
      } else {
        entropy_notes = "csv source; closed-form bounds only";
      }
    }
  }

  ReportBundle bundle;
  const std::string nn_method = "nn[" + selection::to_string(config.method) +
                                ",beta=" + fmt_g(config.train.beta) + "]";
  bundle.accuracy.push_back({nn_method, config.circuit_tag, mean_of(nn_acc),
                             std_of(nn_acc), nn_acc.size()});
  if (!knn_acc.empty())
    bundle.accuracy.push_back({"knn[k=" + std::to_string(config.knn_k) + "]",
                               config.circuit_tag, mean_of(knn_acc), std_of(knn_acc),
                               knn_acc.size()});
  if (!corr_acc.empty())
    bundle.accuracy.push_back({"correlation", config.circuit_tag, mean_of(corr_acc),
                               std_of(corr_acc), corr_acc.size()});
  if (!kmeans_acc.empty())
    bundle.accuracy.push_back({"kmeans", config.circuit_tag, mean_of(kmeans_acc),
                               std_of(kmeans_acc), kmeans_acc.size()});
  bundle.embedding = std::move(embedding);
  bundle.entropy_report = entropy::make_report(entropy_n, entropy_gaussian, entropy_notes);

  std::ostringstream prov;
  prov << "phaseid_version=0.1.0\n";
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.config_text)));
  prov << "config_hash=" << hash << '\n';
  prov << "master_seed=" << config.master_seed << '\n';
  prov << "trials=" << config.trials << '\n';
  prov << "imputed_cells=" << imputed_cells << '\n';
  prov << "dropped_columns=";
  for (size_t i = 0; i < dropped_cols_trial0.size(); ++i) {
    if (i) prov << ' ';
    prov << dropped_cols_trial0[i];
  }
  prov << '\n';
  prov << "--- config ---\n" << config.config_text;
  if (!config.config_text.empty() && config.config_text.back() != '\n') prov << '\n';
  bundle.provenance = prov.str();
  return bundle;
}

namespace {

const char* marker_shape(circuit::PhaseLabel l) {
  switch (l) {
    case circuit::PhaseLabel::A: return "circle";
    case circuit::PhaseLabel::B: return "square";
    case circuit::PhaseLabel::C: return "triangle";
    case circuit::PhaseLabel::AB: return "diamond";
    case circuit::PhaseLabel::BC: return "cross";
    case circuit::PhaseLabel::CA: return "plus";
    case circuit::PhaseLabel::ABC: return "star";
  }
  return "circle";
}

const char* marker_color(circuit::PhaseLabel l) {
  switch (l) {
    case circuit::PhaseLabel::A: return "#1b9e77";
    case circuit::PhaseLabel::B: return "#d95f02";
    case circuit::PhaseLabel::C: return "#7570b3";
    case circuit::PhaseLabel::AB: return "#e7298a";
    case circuit::PhaseLabel::BC: return "#66a61e";
    case circuit::PhaseLabel::CA: return "#e6ab02";
    case circuit::PhaseLabel::ABC: return "#666666";
  }
  return "#000000";
}

void write_svg(const std::vector<EmbeddingRow>& rows, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("emit_reports: cannot open '" + path + "'");
  const double w = 640, h = 640, pad = 40;
  double min_x = 0, max_x = 1, min_y = 0, max_y = 1;
  if (!rows.empty()) {
    min_x = max_x = rows[0].pc1;
    min_y = max_y = rows[0].pc2;
    for (const auto& r : rows) {
      min_x = std::min(min_x, r.pc1);
      max_x = std::max(max_x, r.pc1);
      min_y = std::min(min_y, r.pc2);
      max_y = std::max(max_y, r.pc2);
    }
  }
  const double sx = (w - 2 * pad) / std::max(max_x - min_x, 1e-12);
  const double sy = (h - 2 * pad) / std::max(max_y - min_y, 1e-12);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
     << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& r : rows) {
    const double x = pad + (r.pc1 - min_x) * sx;
    const double y = h - pad - (r.pc2 - min_y) * sy;
    const char* color = marker_color(r.truth);
    const std::string shape = marker_shape(r.truth);
    if (shape == "circle") {
      os << "<circle cx=\"" << fmt_fixed(x, 2) << "\" cy=\"" << fmt_fixed(y, 2)
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    } else if (shape == "square") {
      os << "<rect x=\"" << fmt_fixed(x - 3, 2) << "\" y=\"" << fmt_fixed(y - 3, 2)
         << "\" width=\"6\" height=\"6\" fill=\"" << color << "\"/>\n";
    } else if (shape == "triangle") {
      os << "<polygon points=\"" << fmt_fixed(x, 2) << ',' << fmt_fixed(y - 4, 2) << ' '
         << fmt_fixed(x - 3.5, 2) << ',' << fmt_fixed(y + 3, 2) << ' '
         << fmt_fixed(x + 3.5, 2) << ',' << fmt_fixed(y + 3, 2) << "\" fill=\""
         << color << "\"/>\n";
    } else if (shape == "diamond") {
      os << "<polygon points=\"" << fmt_fixed(x, 2) << ',' << fmt_fixed(y - 4, 2) << ' '
         << fmt_fixed(x + 4, 2) << ',' << fmt_fixed(y, 2) << ' ' << fmt_fixed(x, 2)
         << ',' << fmt_fixed(y + 4, 2) << ' ' << fmt_fixed(x - 4, 2) << ','
         << fmt_fixed(y, 2) << "\" fill=\"" << color << "\"/>\n";
    } else {
      os << "<g stroke=\"" << color << "\" stroke-width=\"1.5\">";
      if (shape == "cross") {
        os << "<line x1=\"" << fmt_fixed(x - 3, 2) << "\" y1=\"" << fmt_fixed(y - 3, 2)
           << "\" x2=\"" << fmt_fixed(x + 3, 2) << "\" y2=\"" << fmt_fixed(y + 3, 2)
           << "\"/><line x1=\"" << fmt_fixed(x - 3, 2) << "\" y1=\""
           << fmt_fixed(y + 3, 2) << "\" x2=\"" << fmt_fixed(x + 3, 2) << "\" y2=\""
           << fmt_fixed(y - 3, 2) << "\"/>";
      } else {  // plus and star
        os << "<line x1=\"" << fmt_fixed(x - 4, 2) << "\" y1=\"" << fmt_fixed(y, 2)
           << "\" x2=\"" << fmt_fixed(x + 4, 2) << "\" y2=\"" << fmt_fixed(y, 2)
           << "\"/><line x1=\"" << fmt_fixed(x, 2) << "\" y1=\"" << fmt_fixed(y - 4, 2)
           << "\" x2=\"" << fmt_fixed(x, 2) << "\" y2=\"" << fmt_fixed(y + 4, 2)
           << "\"/>";
        if (shape == "star")
          os << "<line x1=\"" << fmt_fixed(x - 3, 2) << "\" y1=\"" << fmt_fixed(y - 3, 2)
             << "\" x2=\"" << fmt_fixed(x + 3, 2) << "\" y2=\"" << fmt_fixed(y + 3, 2)
             << "\"/>";
      }
      os << "</g>\n";
    }
  }
  os << "</svg>\n";
}

}  // namespace

void emit_reports(const ReportBundle& bundle, const std::string& dir, bool svg) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("emit_reports: cannot create '" + dir + "'");

  {
    std::ofstream os(dir + "/accuracy.csv", std::ios::binary);
    if (!os) throw IoError("emit_reports: cannot open accuracy.csv");
    os << "method,circuit,mean,std,trials\n";
    for (const AccuracyRow& r : bundle.accuracy)
      os << r.method << ',' << r.circuit << ',' << fmt_fixed(r.mean, 6) << ','
         << fmt_fixed(r.stdev, 6) << ',' << r.trials << '\n';
  }
  {
    std::ofstream os(dir + "/embedding.csv", std::ios::binary);
    if (!os) throw IoError("emit_reports: cannot open embedding.csv");
    os << "customer_id,pc1,pc2,true_label,predicted_label\n";
    for (const EmbeddingRow& r : bundle.embedding)
      os << r.customer << ',' << format_double(r.pc1) << ',' << format_double(r.pc2)
         << ',' << circuit::to_string(r.truth) << ',' << circuit::to_string(r.predicted)
         << '\n';
  }
  {
    std::ofstream os(dir + "/entropy.txt", std::ios::binary);
    if (!os) throw IoError("emit_reports: cannot open entropy.txt");
    os << bundle.entropy_report.to_text();
  }
  {
    std::ofstream os(dir + "/provenance.txt", std::ios::binary);
    if (!os) throw IoError("emit_reports: cannot open provenance.txt");
    os << bundle.provenance;
  }
  if (svg) write_svg(bundle.embedding, dir + "/embedding.svg");
}

std::string config_text_from_provenance(const std::string& provenance_path) {
  std::ifstream in(provenance_path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + provenance_path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const std::string marker = "--- config ---\n";
  const size_t pos = text.find(marker);
  if (pos == std::string::npos)
    throw ParseError("provenance: missing config marker in '" + provenance_path + "'");
  return text.substr(pos + marker.size());
}

double embedding_separation_ratio(const std::vector<EmbeddingRow>& rows) {
  std::map<int, std::pair<double, double>> centroid;
  std::map<int, size_t> count;
  for (const auto& r : rows) {
    auto& c = centroid[static_cast<int>(r.truth)];
    c.first += r.pc1;
    c.second += r.pc2;
    ++count[static_cast<int>(r.truth)];
  }
  if (centroid.size() < 2) return 0.0;
  for (auto& [label, c] : centroid) {
    c.first /= static_cast<double>(count[label]);
    c.second /= static_cast<double>(count[label]);
  }
  double sep = 0.0;
  size_t pairs = 0;
  for (auto i = centroid.begin(); i != centroid.end(); ++i) {
    for (auto j = std::next(i); j != centroid.end(); ++j) {
      const double dx = i->second.first - j->second.first;
      const double dy = i->second.second - j->second.second;
      sep += std::sqrt(dx * dx + dy * dy);
      ++pairs;
    }
  }
  sep /= static_cast<double>(pairs);

  std::map<int, double> spread;
  for (const auto& r : rows) {
    const auto& c = centroid[static_cast<int>(r.truth)];
    const double dx = r.pc1 - c.first;
    const double dy = r.pc2 - c.second;
    spread[static_cast<int>(r.truth)] += std::sqrt(dx * dx + dy * dy);
  }
  double mean_spread = 0.0;
  for (auto& [label, s] : spread) mean_spread += s / static_cast<double>(count[label]);
  mean_spread /= static_cast<double>(spread.size());
  return sep / std::max(mean_spread, 1e-12);
}

}  // namespace phaseid::pipeline
