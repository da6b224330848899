// Copyright 2026 The PVisRec Authors.
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

// pvisrec: command-line entry point.
//
// Exit codes: 0 success, 2 invalid input (parse, validation, arguments),
// 3 numerical failure, 1 anything else (I/O).

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "pvis/pvis.hpp"

namespace {

using namespace pvis;

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::string corpus;
  std::string output;
  std::string input;
  std::string meta;
  std::string mfe;
  std::string model;
  std::string trace;
  std::string method;
  std::string artifacts;
  std::vector<std::string> models;
  std::vector<int> ks{1, 5, 10};
  bool json = false;
  bool csv = false;
  bool binarize = false;
  bool train_split = false;
  int rank = 0;
};

RunConfig load_config(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (!o.corpus.empty()) c.corpus = o.corpus;
  return c;
}

Corpus corpus_of(const RunConfig& c) {
  return c.corpus.empty() ? generate_synthetic_corpus_with_truth(c.synthetic).corpus : load_corpus(c.corpus);
}

Matrix meta_of(const Options& o, const RunConfig& c, const Corpus& corpus) {
  if (!o.mfe.empty()) return load_meta_embedding(o.mfe).compressed();
  Matrix M = o.meta.empty() ? build_meta_feature_matrix(corpus).M : load_meta_feature_matrix(o.meta).M;
  if (c.mfe_rank) M = fit_meta_embedding(M, *c.mfe_rank).compressed();
  return M;
}

void require_output(const Options& o) {
  if (o.output.empty()) throw ArgumentError("missing --output");
}

MetricsReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return report_from_json(j);
}

// --- corpus ---------------------------------------------------------------

void corpus_validate(const Options& o) {
  const Corpus c = load_corpus(o.input);
  const CorpusStats s = corpus_stats(c);
  std::printf("ok: %zu users, %zu datasets, %zu attributes, %zu visualizations, %zu configurations\n", s.users,
              s.datasets, s.attributes, s.visualizations, s.configs);
}

void corpus_stats_cmd(const Options& o) {
  const CorpusStats s = corpus_stats(corpus_of(load_config(o)));
  if (o.json) {
    const nlohmann::json j{{"users", s.users},
                           {"datasets", s.datasets},
                           {"attributes", s.attributes},
                           {"visualizations", s.visualizations},
                           {"configurations", s.configs},
                           {"mean_attrs_per_dataset", s.mean_attrs_per_dataset},
                           {"mean_attrs_per_user", s.mean_attrs_per_user},
                           {"mean_vis_per_user", s.mean_vis_per_user},
                           {"mean_datasets_per_user", s.mean_datasets_per_user}};
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::printf("users                  %zu\n", s.users);
  std::printf("datasets               %zu\n", s.datasets);
  std::printf("attributes             %zu\n", s.attributes);
  std::printf("visualizations         %zu\n", s.visualizations);
  std::printf("configurations         %zu\n", s.configs);
  std::printf("attrs per dataset      %.3f\n", s.mean_attrs_per_dataset);
  std::printf("attrs per user         %.3f\n", s.mean_attrs_per_user);
  std::printf("visualizations / user  %.3f\n", s.mean_vis_per_user);
  std::printf("datasets / user        %.3f\n", s.mean_datasets_per_user);
}

void corpus_synth(const Options& o, const SynthOptions& so) {
  require_output(o);
  save_corpus(generate_synthetic_corpus_with_truth(so).corpus, o.output);
  std::printf("wrote %s\n", o.output.c_str());
}

// --- metafeat -------------------------------------------------------------

void metafeat_catalog() {
  const auto& names = meta_feature_catalog();
  for (std::size_t i = 0; i < names.size(); ++i) std::printf("%zu\t%s\n", i, names[i].c_str());
}

void metafeat_extract(const Options& o) {
  require_output(o);
  const MetaFeatureMatrix mf = build_meta_feature_matrix(corpus_of(load_config(o)));
  save_meta_feature_matrix(mf, o.output);
  std::printf("wrote %s (%lld x %lld)\n", o.output.c_str(), static_cast<long long>(mf.M.rows()),
              static_cast<long long>(mf.M.cols()));
}

void metafeat_embed(const Options& o) {
  require_output(o);
  if (o.meta.empty()) throw ArgumentError("missing --meta");
  const RunConfig c = load_config(o);
  const int rank = o.rank > 0 ? o.rank : c.mfe_rank.value_or(c.compare_mfe_rank);
  const MetaFeatureMatrix mf = load_meta_feature_matrix(o.meta);
  const MetaEmbedding me = fit_meta_embedding(mf.M, rank);
  save_meta_embedding(me, mf.layout_hash, o.output);
  const double kept = me.sigma.squaredNorm() / std::max(mf.M.squaredNorm(), 1e-300);
  std::printf("wrote %s (rank %d, %.1f%% of squared norm retained)\n", o.output.c_str(), rank, 100 * kept);
}

// --- graphs ---------------------------------------------------------------

void print_graph_stats(const InteractionGraphs& g) {
  const GraphStats s = graph_stats(g);
  std::printf("users %d, attributes %d, configurations %d, events %.0f\n", s.users, s.attributes, s.configs,
              s.visualizations);
  std::printf("density A %.4f, C %.4f, D %.4f\n", s.density_a, s.density_c, s.density_d);
}

void graphs_build(const Options& o) {
  require_output(o);
  const RunConfig c = load_config(o);
  const Corpus corpus = corpus_of(c);
  const bool binarize = o.binarize || c.binarize;
  const InteractionGraphs g = o.train_split
                                  ? build_graphs(GraphShape::of(corpus), make_split(corpus, c.eval_seed).train, binarize)
                                  : build_graphs(corpus, binarize);
  save_graphs(g, o.output);
  print_graph_stats(g);
}

// --- train ----------------------------------------------------------------

void train_pvisrec(const Options& o, RunConfig c) {
  require_output(o);
  c.train.validate();
  const Corpus corpus = corpus_of(c);
  const InteractionGraphs g = build_graphs(corpus, c.binarize);
  const Matrix M = meta_of(o, c, corpus);
  FitTrace trace;
  FitOptions opt;
  opt.on_iteration = [](int it, double f) { std::fprintf(stderr, "iteration %d objective %.6f\n", it, f); };
  const EmbeddingSet E = als_fit(g, M, c.train, &trace, opt);
  save_model(E, c.train, o.output);
  if (!o.trace.empty()) {
    std::ofstream out(o.trace);
    out << "iteration,objective\n";
    for (std::size_t i = 0; i < trace.iteration_objective.size(); ++i)
      out << i << "," << trace.iteration_objective[i] << "\n";
    if (!out) throw Error("cannot write '" + o.trace + "'");
  }
  std::printf("wrote %s after %d iterations (%s), objective %.6f\n", o.output.c_str(), trace.iterations,
              trace.converged ? "converged" : "iteration cap", trace.iteration_objective.back());
}

void train_neural_cmd(const Options& o, RunConfig c) {
  require_output(o);
  if (o.model.empty()) throw ArgumentError("missing --model (a trained PVisRec model)");
  const Corpus corpus = corpus_of(c);
  const EmbeddingSet E = load_model(o.model);
  const CandidateIndex index(corpus, c.max_attrs);
  const NeuralModel nn = train_neural(E, index, corpus.visualizations, c.neural);
  save_neural(nn, o.output);
  for (std::size_t e = 0; e < nn.epoch_loss.size(); ++e) std::printf("epoch %zu loss %.6f\n", e + 1, nn.epoch_loss[e]);
  std::printf("wrote %s\n", o.output.c_str());
}

// --- baseline -------------------------------------------------------------

double mean_neighborhood(const ItemKnn& knn, int items) {
  double total = 0;
  for (int j = 0; j < items; ++j) total += static_cast<double>(knn.neighbors(j).size());
  return items ? total / items : 0.0;
}

void baseline_fit(const Options& o, const RunConfig& c) {
  const Corpus corpus = corpus_of(c);
  const InteractionGraphs g = build_graphs(corpus, c.binarize);
  if (o.method == "eals") {
    require_output(o);
    save_eals(eals_fit(g, c.eals), o.output);
    std::printf("wrote %s\n", o.output.c_str());
  } else if (o.method == "mlp") {
    require_output(o);
    const CandidateIndex index(corpus, c.max_attrs);
    const MlpBaselineModel m =
        train_mlp_baseline(g.num_users(), g.num_attributes(), g.num_configs(), c.train.d, index, corpus.visualizations,
                           c.neural);
    save_mlp_baseline(m, o.output);
    std::printf("wrote %s\n", o.output.c_str());
  } else if (o.method == "vispop") {
    const FrequencyTables ft = frequency_tables(g);
    std::vector<int> order(static_cast<std::size_t>(g.num_configs()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ft.config_freq[a] > ft.config_freq[b]; });
    order.resize(std::min<std::size_t>(order.size(), 10));
    std::printf("most frequent configurations:\n");
    for (int id : order)
      std::printf("  %-4d %6.0f  %s\n", id, ft.config_freq[id], corpus.registry.at(id).canonical().c_str());
  } else if (o.method == "visknn" || o.method == "visconfigknn") {
    const VisKnnModel m = fit_visknn(g, c.k_nn);
    std::printf("configuration neighborhoods: mean size %.2f\n", mean_neighborhood(m.config_knn, g.num_configs()));
    if (o.method == "visknn")
      std::printf("attribute neighborhoods: mean size %.2f\n", mean_neighborhood(m.attr_knn, g.num_attributes()));
  } else {
    throw ArgumentError("unknown method '" + o.method + "' (eals, mlp, vispop, visknn, visconfigknn)");
  }
}

// --- eval -----------------------------------------------------------------

void eval_run(const Options& o, RunConfig c) {
  if (!o.models.empty()) c.models = o.models;
  c.validate();
  const Corpus corpus = corpus_of(c);
  const MetaFeatureMatrix mf = build_meta_feature_matrix(corpus);
  MetricsReport r = run_experiment(corpus, c.models, c.experiment(), &mf.M);
  r.metadata = version_stamp(c);
  if (!o.output.empty()) {
    std::ofstream out(o.output);
    out << to_json(r).dump(2) << "\n";
    if (!out) throw Error("cannot write '" + o.output + "'");
  }
  std::cout << render_table(r, o.ks, o.csv);
}

void eval_table(const Options& o) {
  const MetricsReport r = read_report(o.input);
  for (int k : o.ks)
    if (k < 1 || k > r.k_max) throw ArgumentError("K=" + std::to_string(k) + " outside [1, " + std::to_string(r.k_max) + "]");
  std::cout << render_table(r, o.ks, o.csv);
}

void eval_plotdata(const Options& o) { std::cout << render_plotdata(read_report(o.input)); }

// --- run ------------------------------------------------------------------

void run_cmd(const Options& o) {
  RunConfig c = load_config(o);
  if (!o.artifacts.empty()) c.artifacts = o.artifacts;
  const PipelineResult r = run_pipeline(c, [](const StageOutcome& s) {
    std::fprintf(stderr, "%-13s %s  %s\n", s.name.c_str(), s.cached ? "cached" : "ran   ", s.stamp.c_str());
  });
  std::cout << render_table(r.report, o.ks, o.csv);
  std::fprintf(stderr, "report: %s\n", r.report_path.c_str());
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Personalized visualization recommendation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  Options o;
  app.add_option("--config", o.config, "Run configuration (JSON with comments)")->check(CLI::ExistingFile);
  app.fallthrough();

  RunConfig defaults;
  auto add_corpus = [&](CLI::App* s) {
    s->add_option("--corpus", o.corpus, "Corpus JSON (default: the configured corpus or the synthetic one)");
  };

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Validate, summarize or generate corpora");
  corpus->require_subcommand(1);
  auto* cv = corpus->add_subcommand("validate", "Parse and validate a corpus file");
  cv->add_option("file", o.input)->required()->check(CLI::ExistingFile);
  cv->callback([&] { corpus_validate(o); });
  auto* cs = corpus->add_subcommand("stats", "Corpus summary statistics");
  add_corpus(cs);
  cs->add_flag("--json", o.json, "Print JSON");
  cs->callback([&] { corpus_stats_cmd(o); });
  auto* cy = corpus->add_subcommand("synth", "Generate a synthetic corpus with planted preferences");
  SynthOptions so = defaults.synthetic;
  cy->add_option("-o,--output", o.output)->required();
  cy->add_option("--seed", so.seed);
  cy->add_option("--users", so.num_users)->check(CLI::PositiveNumber);
  cy->add_option("--datasets", so.num_datasets)->check(CLI::PositiveNumber);
  cy->add_option("--cols", so.cols_per_dataset)->check(CLI::PositiveNumber);
  cy->add_option("--rank", so.planted_rank)->check(CLI::PositiveNumber);
  cy->add_option("--sharpness", so.sharpness);
  cy->callback([&] {
    if (!o.config.empty()) {
      // flags given on the command line win over the file
      SynthOptions from_file = load_config(o).synthetic;
      if (cy->count("--seed") == 0) so.seed = from_file.seed;
      if (cy->count("--users") == 0) so.num_users = from_file.num_users;
      if (cy->count("--datasets") == 0) so.num_datasets = from_file.num_datasets;
      if (cy->count("--cols") == 0) so.cols_per_dataset = from_file.cols_per_dataset;
      if (cy->count("--rank") == 0) so.planted_rank = from_file.planted_rank;
      if (cy->count("--sharpness") == 0) so.sharpness = from_file.sharpness;
    }
    corpus_synth(o, so);
  });

  // metafeat
  auto* mf = app.add_subcommand("metafeat", "Meta-feature extraction and embedding");
  mf->require_subcommand(1);
  mf->add_subcommand("catalog", "List the meta-feature catalog")->callback(metafeat_catalog);
  auto* me = mf->add_subcommand("extract", "Build the meta-feature matrix");
  add_corpus(me);
  me->add_option("-o,--output", o.output)->required();
  me->callback([&] { metafeat_extract(o); });
  auto* mb = mf->add_subcommand("embed", "Truncated SVD meta-embedding");
  mb->add_option("--meta", o.meta, "Meta-feature matrix file")->required()->check(CLI::ExistingFile);
  mb->add_option("--rank", o.rank, "Rank (default: configured mfe_rank, else 8)");
  mb->add_option("-o,--output", o.output)->required();
  mb->callback([&] { metafeat_embed(o); });

  // graphs
  auto* gr = app.add_subcommand("graphs", "Interaction graphs");
  gr->require_subcommand(1);
  auto* gb = gr->add_subcommand("build", "Build A, C and D");
  add_corpus(gb);
  gb->add_option("-o,--output", o.output)->required();
  gb->add_flag("--binarize", o.binarize, "Store 0/1 instead of counts");
  gb->add_flag("--train-split", o.train_split, "Use only the training side of the evaluation split");
  gb->callback([&] { graphs_build(o); });
  auto* gs = gr->add_subcommand("stats", "Summarize a graphs file");
  gs->add_option("file", o.input)->required()->check(CLI::ExistingFile);
  gs->callback([&] { print_graph_stats(load_graphs(o.input)); });

  // train
  auto* tr = app.add_subcommand("train", "Train PVisRec or the neural model on the whole corpus");
  tr->require_subcommand(1);
  TrainConfig tc = defaults.train;
  std::string variant = "full";
  auto* tp = tr->add_subcommand("pvisrec", "Collective matrix factorization by ALS");
  add_corpus(tp);
  tp->add_option("--meta", o.meta, "Meta-feature matrix file")->check(CLI::ExistingFile);
  tp->add_option("--mfe", o.mfe, "Meta-embedding file (replaces M)")->check(CLI::ExistingFile);
  tp->add_option("-d,--dim", tc.d);
  tp->add_option("--lambda", tc.lambda);
  tp->add_option("--iters", tc.max_iters);
  tp->add_option("--tol", tc.tol);
  tp->add_option("--seed", tc.seed);
  tp->add_option("--variant", variant)->check(CLI::IsMember({"full", "acm", "acd"}));
  tp->add_option("--trace", o.trace, "Write the per-iteration objective as CSV");
  tp->add_option("-o,--output", o.output)->required();
  tp->callback([&] {
    RunConfig c = load_config(o);
    if (tp->count("--dim")) c.train.d = tc.d;
    if (tp->count("--lambda")) c.train.lambda = tc.lambda;
    if (tp->count("--iters")) c.train.max_iters = tc.max_iters;
    if (tp->count("--tol")) c.train.tol = tc.tol;
    if (tp->count("--seed")) c.train.seed = tc.seed;
    if (tp->count("--variant")) c.train.variant = parse_variant(variant);
    train_pvisrec(o, c);
  });
  NeuralConfig nc = defaults.neural;
  std::string activation = "relu";
  auto* tn = tr->add_subcommand("neural", "Neural tower over trained embeddings");
  add_corpus(tn);
  tn->add_option("--model", o.model, "Trained PVisRec model")->required()->check(CLI::ExistingFile);
  tn->add_option("--epochs", nc.epochs);
  tn->add_option("--lr", nc.lr);
  tn->add_option("--layers", nc.layers);
  tn->add_option("--activation", activation)->check(CLI::IsMember({"relu", "sigmoid", "tanh"}));
  tn->add_option("--seed", nc.seed);
  tn->add_option("-o,--output", o.output)->required();
  tn->callback([&] {
    RunConfig c = load_config(o);
    if (tn->count("--epochs")) c.neural.epochs = nc.epochs;
    if (tn->count("--lr")) c.neural.lr = nc.lr;
    if (tn->count("--layers")) {
      c.neural.layers = nc.layers;
      c.neural.widths.clear();
    }
    if (tn->count("--activation")) c.neural.activation = parse_activation(activation);
    if (tn->count("--seed")) c.neural.seed = nc.seed;
    train_neural_cmd(o, c);
  });

  // baseline
  auto* bl = app.add_subcommand("baseline", "Baseline recommenders");
  bl->require_subcommand(1);
  auto* bf = bl->add_subcommand("fit", "Fit one baseline on the whole corpus");
  add_corpus(bf);
  bf->add_option("--method", o.method, "eals, mlp, vispop, visknn or visconfigknn")->required();
  bf->add_option("-o,--output", o.output, "Model file (eals, mlp)");
  bf->callback([&] { baseline_fit(o, load_config(o)); });

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluation on held-out slates");
  ev->require_subcommand(1);
  auto* er = ev->add_subcommand("run", "Split, train and evaluate models");
  add_corpus(er);
  er->add_option("--models", o.models, "Model names")->delimiter(',');
  er->add_option("-o,--output", o.output, "Write the report JSON");
  er->add_option("--k", o.ks, "Cutoffs for the table")->delimiter(',');
  er->add_flag("--csv", o.csv);
  er->callback([&] { eval_run(o, load_config(o)); });
  auto* et = ev->add_subcommand("table", "Render a report as a table");
  et->add_option("report", o.input)->required()->check(CLI::ExistingFile);
  et->add_option("--k", o.ks, "Cutoffs")->delimiter(',');
  et->add_flag("--csv", o.csv);
  et->callback([&] { eval_table(o); });
  auto* ep = ev->add_subcommand("plotdata", "Long-format rows for plotting");
  ep->add_option("report", o.input)->required()->check(CLI::ExistingFile);
  ep->callback([&] { eval_plotdata(o); });

  // run
  auto* rn = app.add_subcommand("run", "Full pipeline with cached stages");
  add_corpus(rn);
  rn->add_option("--artifacts", o.artifacts, "Artifacts directory (overrides the config)");
  rn->add_option("--k", o.ks, "Cutoffs for the table")->delimiter(',');
  rn->add_flag("--csv", o.csv);
  rn->callback([&] { run_cmd(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const pvis::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const pvis::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitInvalid;
  } catch (const pvis::ValidationError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitInvalid;
  } catch (const pvis::ArgumentError& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
