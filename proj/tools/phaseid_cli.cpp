// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: synthesize feeders, select training customers,
// train and evaluate the classifier, run baselines, and drive the full
// experiment pipeline from a config file.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "phaseid/baselines.hpp"
#include "phaseid/pipeline.hpp"

namespace {

using namespace phaseid;

int g_quiet = 0;

void say(const std::string& s) {
  if (!g_quiet) std::cout << s << '\n';
}

pipeline::LoadResult load_data(const std::string& voltages, const std::string& labels) {
  return pipeline::load_dataset(voltages, labels);
}

circuit::VoltageDataset preprocessed(const circuit::VoltageDataset& raw) {
  return pipeline::preprocess(raw);
}

std::vector<circuit::PhaseLabel> vocabulary(const circuit::VoltageDataset& data) {
  std::vector<bool> seen(circuit::kNumPhaseLabels, false);
  for (auto l : data.labels) seen[static_cast<size_t>(l)] = true;
  std::vector<circuit::PhaseLabel> vocab;
  for (size_t i = 0; i < seen.size(); ++i)
    if (seen[i]) vocab.push_back(static_cast<circuit::PhaseLabel>(i));
  return vocab;
}

int run_synth(const std::string& config_path, const std::string& out_dir,
              bool with_covariance, uint64_t seed_override, bool have_seed) {
  pipeline::ExperimentConfig cfg = pipeline::parse_config_file(config_path);
  circuit::CircuitSpec spec = cfg.circuit;
  spec.seed = have_seed ? seed_override : cfg.master_seed;
  const auto data = circuit::sample_voltages(spec, cfg.n_timesteps);
  std::filesystem::create_directories(out_dir);
  pipeline::save_voltages_csv(data, out_dir + "/voltages.csv");
  pipeline::save_labels_csv(data, out_dir + "/labels.csv");
  if (with_covariance) {
    const SymMatrix sigma = circuit::theoretical_covariance(spec, data.labels);
    pipeline::save_covariance_csv(sigma, out_dir + "/covariance.csv");
  }
  say("wrote " + out_dir + "/voltages.csv (" + std::to_string(data.n_customers) +
      " customers x " + std::to_string(data.n_timesteps) + " steps)");
  return 0;
}

int run_select(const std::string& data_path, const std::string& labels_path,
               const std::string& method_name, size_t m, bool raw,
               const std::string& out_path, uint64_t seed) {
  const auto loaded = load_data(data_path, labels_path);
  const auto method = selection::method_from_string(method_name);
  const circuit::VoltageDataset rows = raw ? loaded.data : preprocessed(loaded.data);

  selection::SelectionResult result;
  if (method == selection::Method::facility) {
    result = selection::select_facility_location(rows, m);
  } else {
    const SymMatrix k = selection::cosine_kernel_matrix(rows, false);
    switch (method) {
      case selection::Method::inverse_schur:
        result = selection::select_inverse_schur(k, m);
        break;
      case selection::Method::greedy:
        result = selection::select_greedy(k, m);
        break;
      case selection::Method::exhaustive:
        result = selection::select_exhaustive(k, m);
        break;
      case selection::Method::random:
        result = selection::select_random(k, m, seed);
        break;
      default:
        break;
    }
  }
  const std::string record = selection::to_record(result);
  if (out_path.empty()) {
    std::cout << record << '\n';
  } else {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw IoError("select: cannot open '" + out_path + "'");
    os << record << '\n';
    say("objective " + std::to_string(result.objective) + " -> " + out_path);
  }
  return 0;
}

selection::SelectionResult read_selection(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open selection file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty selection file '" + path + "'");
  return selection::selection_from_record(line);
}

int run_train(const std::string& data_path, const std::string& labels_path,
              const std::string& selection_path, const infonet::TrainingConfig& tc,
              const std::string& out_path) {
  const auto loaded = load_data(data_path, labels_path);
  if (!loaded.data.has_labels()) throw NoLabels("train: labels file is required");
  const auto prep = preprocessed(loaded.data);
  const auto sel = read_selection(selection_path);
  std::vector<circuit::PhaseLabel> subset_labels;
  for (size_t i : sel.indices.indices) {
    if (i >= prep.n_customers) throw OutOfRange("train: selection index out of range");
    subset_labels.push_back(prep.labels[i]);
  }
  const auto model = infonet::train_classifier(prep, sel.indices, subset_labels,
                                               vocabulary(prep), tc);
  infonet::save_model(model, out_path);
  say("final loss " + std::to_string(model.trace.back().total_loss) + " -> " + out_path);
  return 0;
}

int run_eval(const std::string& data_path, const std::string& labels_path,
             const std::string& model_path, const std::string& selection_path,
             uint64_t seed) {
  const auto loaded = load_data(data_path, labels_path);
  if (!loaded.data.has_labels()) throw NoLabels("eval: labels file is required");
  const auto prep = preprocessed(loaded.data);
  const auto model = infonet::load_model(model_path);
  const auto pred = infonet::predict(model, prep, seed);

  IndexSet scored;
  if (!selection_path.empty()) {
    scored = read_selection(selection_path).indices.complement(prep.n_customers);
  } else {
    std::vector<size_t> all(prep.n_customers);
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    scored = IndexSet::of(all);
  }
  std::vector<circuit::PhaseLabel> p, t;
  for (size_t i : scored.indices) {
    p.push_back(pred.labels[i]);
    t.push_back(prep.labels[i]);
  }
  std::cout << "accuracy " << infonet::evaluate_accuracy(p, t) << " over "
            << scored.size() << " customers\n";
  return 0;
}

int run_baseline(const std::string& method, const std::string& data_path,
                 const std::string& labels_path, const std::string& selection_path,
                 size_t knn_k, size_t clusters, uint64_t seed) {
  const auto loaded = load_data(data_path, labels_path);
  if (!loaded.data.has_labels()) throw NoLabels("baseline: labels file is required");
  const auto prep = preprocessed(loaded.data);
  const auto sel = read_selection(selection_path);
  const auto vocab = vocabulary(prep);
  if (clusters == 0) clusters = vocab.size();

  std::vector<int> label_ids(prep.n_customers);
  for (size_t i = 0; i < prep.n_customers; ++i) {
    const auto it = std::find(vocab.begin(), vocab.end(), prep.labels[i]);
    label_ids[i] = static_cast<int>(it - vocab.begin());
  }
  std::vector<int> subset_ids;
  for (size_t i : sel.indices.indices) subset_ids.push_back(label_ids[i]);

  std::vector<int> predicted;
  if (method == "knn") {
    Matrix train(sel.indices.size(), prep.n_timesteps);
    for (size_t i = 0; i < sel.indices.size(); ++i)
      std::copy(prep.voltages.row(sel.indices.indices[i]),
                prep.voltages.row(sel.indices.indices[i]) + prep.n_timesteps,
                train.row(i));
    predicted = baselines::knn_classify(train, subset_ids, prep.voltages,
                                        std::min(knn_k, sel.indices.size()));
  } else if (method == "correlation") {
    const auto cl = baselines::correlation_linkage(prep.voltages, clusters);
    predicted = baselines::map_clusters_to_labels(cl, sel.indices, subset_ids,
                                                  static_cast<int>(vocab.size()));
  } else if (method == "kmeans") {
    const auto cl = baselines::kmeans_phase_cluster(prep.voltages, clusters, seed);
    predicted = baselines::map_clusters_to_labels(cl, sel.indices, subset_ids,
                                                  static_cast<int>(vocab.size()));
  } else {
    throw ConfigError("baseline: unknown method '" + method + "'");
  }

  const IndexSet heldout = sel.indices.complement(prep.n_customers);
  size_t hit = 0;
  for (size_t i : heldout.indices) hit += predicted[i] == label_ids[i];
  std::cout << "accuracy "
            << static_cast<double>(hit) / static_cast<double>(heldout.size())
            << " over " << heldout.size() << " customers\n";
  return 0;
}

int run_entropy(size_t n, const std::string& cov_path, const std::string& out_path) {
  std::optional<double> gaussian;
  std::string notes;
  if (!cov_path.empty()) {
    const SymMatrix sigma = pipeline::load_covariance_csv(cov_path);
    n = sigma.n;
    gaussian = entropy::gaussian_entropy(entropy::scale_to_unit_diagonal(sigma));
    notes = "covariance=" + cov_path;
  }
  const auto report = entropy::make_report(n, gaussian, notes);
  if (out_path.empty()) {
    std::cout << report.to_text();
  } else {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw IoError("entropy: cannot open '" + out_path + "'");
    os << report.to_text();
  }
  return 0;
}

int run_full(const std::string& config_path, const std::string& out_override,
             uint64_t seed_override, bool have_seed) {
  pipeline::ExperimentConfig cfg = pipeline::parse_config_file(config_path);
  if (have_seed) {
    cfg.master_seed = seed_override;
    // Seed overrides invalidate the embedded config; note it in the text.
    cfg.config_text += "\n[experiment]\nmaster_seed = " + std::to_string(seed_override) + "\n";
  }
  if (!out_override.empty()) cfg.output_dir = out_override;
  const auto bundle = pipeline::run_experiment(cfg);
  pipeline::emit_reports(bundle, cfg.output_dir, cfg.svg);
  for (const auto& row : bundle.accuracy)
    say(row.method + ": " + std::to_string(row.mean) + " +- " + std::to_string(row.stdev));
  say("reports in " + cfg.output_dir);
  return 0;
}

int run_report(const std::string& from_dir, const std::string& out_dir) {
  const std::string text =
      pipeline::config_text_from_provenance(from_dir + "/provenance.txt");
  pipeline::ExperimentConfig cfg = pipeline::parse_config_text(text);
  const auto bundle = pipeline::run_experiment(cfg);
  pipeline::emit_reports(bundle, out_dir, cfg.svg);
  say("regenerated reports in " + out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"supervised phase identification toolkit"};
  app.require_subcommand(1);

  uint64_t seed = 0;
  bool have_seed = false;
  app.add_flag("--quiet", g_quiet, "suppress progress output");
  auto* seed_opt = app.add_option("--seed", seed, "override the master seed");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic feeder dataset");
  std::string synth_config, synth_out = "out";
  bool synth_cov = false;
  synth->add_option("--config", synth_config, "experiment config file")->required();
  synth->add_option("--out", synth_out, "output directory");
  synth->add_flag("--covariance", synth_cov, "also write the theoretical covariance");

  // select
  auto* sel = app.add_subcommand("select", "choose training customers");
  std::string sel_data, sel_labels, sel_method = "inverse_schur", sel_out;
  size_t sel_m = 0;
  bool sel_raw = false;
  sel->add_option("--data", sel_data, "voltages csv")->required();
  sel->add_option("--labels", sel_labels, "labels csv");
  sel->add_option("--method", sel_method,
                  "inverse_schur|greedy|exhaustive|facility|random");
  sel->add_option("--m", sel_m, "training set size")->required();
  sel->add_flag("--raw", sel_raw, "skip preprocessing before the kernel");
  sel->add_option("--out", sel_out, "selection record file");

  // train
  auto* train = app.add_subcommand("train", "train the classifier");
  std::string train_data, train_labels, train_sel, train_out = "model.bin";
  infonet::TrainingConfig tc;
  std::string train_opt = "sgd";
  train->add_option("--data", train_data, "voltages csv")->required();
  train->add_option("--labels", train_labels, "labels csv")->required();
  train->add_option("--selection", train_sel, "selection record file")->required();
  train->add_option("--beta", tc.beta, "information-loading weight");
  train->add_option("--lr", tc.learning_rate, "learning rate");
  train->add_option("--epochs", tc.epochs, "training epochs");
  train->add_option("--batch", tc.batch_size, "batch size");
  train->add_option("--width", tc.hidden_width, "encoder hidden width");
  train->add_option("--stat-width", tc.stat_hidden_width, "statistic net width");
  train->add_option("--optimizer", train_opt, "sgd|adam");
  train->add_option("--out", train_out, "model file");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a trained model");
  std::string eval_data, eval_labels, eval_model, eval_sel;
  eval->add_option("--data", eval_data, "voltages csv")->required();
  eval->add_option("--labels", eval_labels, "labels csv")->required();
  eval->add_option("--model", eval_model, "model file")->required();
  eval->add_option("--selection", eval_sel, "score only non-selected customers");

  // baseline
  auto* base = app.add_subcommand("baseline", "run a comparison method");
  std::string base_method, base_data, base_labels, base_sel;
  size_t base_k = 5, base_clusters = 0;
  base->add_option("--method", base_method, "knn|correlation|kmeans")->required();
  base->add_option("--data", base_data, "voltages csv")->required();
  base->add_option("--labels", base_labels, "labels csv")->required();
  base->add_option("--selection", base_sel, "selection record file")->required();
  base->add_option("--k", base_k, "neighbours for knn");
  base->add_option("--clusters", base_clusters, "cluster count (default: class count)");

  // entropy
  auto* ent = app.add_subcommand("entropy", "entropy bounds and diagnostics");
  size_t ent_n = 0;
  std::string ent_cov, ent_out;
  ent->add_option("--n", ent_n, "customer count for the closed-form bounds");
  ent->add_option("--from-covariance", ent_cov, "covariance csv");
  ent->add_option("--out", ent_out, "write the report here instead of stdout");

  // report
  auto* rep = app.add_subcommand("report", "regenerate reports from provenance");
  std::string rep_from, rep_out = "out";
  rep->add_option("--from", rep_from, "directory holding provenance.txt")->required();
  rep->add_option("--out", rep_out, "output directory");

  // run
  auto* run = app.add_subcommand("run", "full experiment pipeline");
  std::string run_config, run_out;
  run->add_option("--config", run_config, "experiment config file")->required();
  run->add_option("--out", run_out, "override the output directory");

  try {
    app.parse(argc, argv);
    have_seed = seed_opt->count() > 0;

    if (*synth) return run_synth(synth_config, synth_out, synth_cov, seed, have_seed);
    if (*sel) return run_select(sel_data, sel_labels, sel_method, sel_m, sel_raw,
                                sel_out, have_seed ? seed : 0);
    if (*train) {
      tc.seed = have_seed ? seed : 0;
      tc.optimizer = infonet::optimizer_from_string(train_opt);
      return run_train(train_data, train_labels, train_sel, tc, train_out);
    }
    if (*eval) return run_eval(eval_data, eval_labels, eval_model, eval_sel,
                               have_seed ? seed : 0);
    if (*base) return run_baseline(base_method, base_data, base_labels, base_sel,
                                   base_k, base_clusters, have_seed ? seed : 0);
    if (*ent) {
      if (ent_n == 0 && ent_cov.empty())
        throw ConfigError("entropy: need --n or --from-covariance");
      return run_entropy(ent_n, ent_cov, ent_out);
    }
    if (*rep) return run_report(rep_from, rep_out);
    if (*run) return run_full(run_config, run_out, seed, have_seed);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const NotPositiveDefinite& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const NegativeDiagonal& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const Diverged& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
