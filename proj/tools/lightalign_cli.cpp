// Copyright 2026 The LightAlign Authors
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

// Batch front end. Talks to the library through the C API only.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <string>

#include "lightalign/lightalign.h"

namespace {

// Exit codes: 0 success, 1 usage error, 2 data or runtime error.
int exit_code_for(la_status status) {
  switch (status) {
    case LA_OK: return 0;
    case LA_ERROR_INVALID_ARGUMENT: return 1;
    default: return 2;
  }
}

int report_failure(la_status status) {
  std::fprintf(stderr, "lightalign: %s\n", la_last_error());
  return exit_code_for(status);
}

struct AlignOptions {
  std::string dir;
  std::string out = ".";
  std::string mode = "basic";
  std::string train_file;
  std::string emb_src;
  std::string emb_tgt;
  std::size_t dim = 1024;
  std::size_t rounds = 2;
  std::size_t topk = 500;
  double tau = 0.05;
  std::size_t sinkhorn_q = 10;
  std::size_t epochs = 5;
  std::uint64_t seed = 42;
  double ratio = 0.3;
  bool reverse = true;
  bool per_round_l2 = true;
  int threads = -1;  // unset; falls back to LIGHTALIGN_THREADS, then auto
};

// Values from --config JSON become the defaults; explicit flags override
// them because CLI11 parses the command line afterwards.
bool apply_config_file(const std::string& path, AlignOptions& opt) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "lightalign: cannot open config file %s\n", path.c_str());
    return false;
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "lightalign: bad config file %s: %s\n", path.c_str(), e.what());
    return false;
  }
  if (!doc.is_object()) {
    std::fprintf(stderr, "lightalign: config file %s must hold a JSON object\n",
                 path.c_str());
    return false;
  }
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "mode") opt.mode = value.get<std::string>();
      else if (key == "dim") opt.dim = value.get<std::size_t>();
      else if (key == "rounds") opt.rounds = value.get<std::size_t>();
      else if (key == "topk") opt.topk = value.get<std::size_t>();
      else if (key == "tau") opt.tau = value.get<double>();
      else if (key == "sinkhorn_q") opt.sinkhorn_q = value.get<std::size_t>();
      else if (key == "iterative_epochs") opt.epochs = value.get<std::size_t>();
      else if (key == "seed") opt.seed = value.get<std::uint64_t>();
      else if (key == "ratio") opt.ratio = value.get<double>();
      else if (key == "train_file") opt.train_file = value.get<std::string>();
      else if (key == "reverse_triples") opt.reverse = value.get<bool>();
      else if (key == "per_round_l2") opt.per_round_l2 = value.get<bool>();
      else if (key == "threads") opt.threads = value.get<int>();
      else if (key == "out") opt.out = value.get<std::string>();
      else if (key == "emb_src") opt.emb_src = value.get<std::string>();
      else if (key == "emb_tgt") opt.emb_tgt = value.get<std::string>();
      else {
        std::fprintf(stderr, "lightalign: unknown config key '%s' in %s\n",
                     key.c_str(), path.c_str());
        return false;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "lightalign: bad config value in %s: %s\n", path.c_str(),
                 e.what());
    return false;
  }
  return true;
}

// -1 keeps "unset"; then LIGHTALIGN_THREADS, then 0 (auto).
bool resolve_threads_option(int& threads) {
  if (threads >= 0) return true;
  const char* env = std::getenv("LIGHTALIGN_THREADS");
  if (!env || env[0] == '\0') {
    threads = 0;
    return true;
  }
  char* end = nullptr;
  long value = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || value < 0) {
    std::fprintf(stderr, "lightalign: LIGHTALIGN_THREADS must be a non-negative integer\n");
    return false;
  }
  threads = static_cast<int>(value);
  return true;
}

using ConfigHandle = std::unique_ptr<la_config, decltype(&la_config_free)>;
using DatasetHandle = std::unique_ptr<la_dataset, decltype(&la_dataset_free)>;
using ResultHandle = std::unique_ptr<la_result, decltype(&la_result_free)>;
using TraceHandle = std::unique_ptr<la_trace_report, decltype(&la_trace_free)>;

int run_align(const AlignOptions& opt) {
  int threads = opt.threads;
  if (!resolve_threads_option(threads)) return 1;

  ConfigHandle config(la_config_new(), la_config_free);
  la_status status = la_config_set_mode(config.get(), opt.mode.c_str());
  if (status == LA_OK) status = la_config_set_dim(config.get(), opt.dim);
  if (status == LA_OK) status = la_config_set_rounds(config.get(), opt.rounds);
  if (status == LA_OK) status = la_config_set_topk(config.get(), opt.topk);
  if (status == LA_OK) status = la_config_set_tau(config.get(), opt.tau);
  if (status == LA_OK) status = la_config_set_sinkhorn_q(config.get(), opt.sinkhorn_q);
  if (status == LA_OK) status = la_config_set_iterative_epochs(config.get(), opt.epochs);
  if (status == LA_OK) status = la_config_set_seed(config.get(), opt.seed);
  if (status == LA_OK) status = la_config_set_reverse_triples(config.get(), opt.reverse);
  if (status == LA_OK) status = la_config_set_per_round_l2(config.get(), opt.per_round_l2);
  if (status == LA_OK) status = la_config_set_threads(config.get(), threads);
  if (status == LA_OK) status = la_config_validate(config.get());
  if (status != LA_OK) return report_failure(status);

  la_dataset* dataset_raw = nullptr;
  status = la_dataset_load(opt.dir.c_str(),
                           opt.train_file.empty() ? nullptr : opt.train_file.c_str(),
                           opt.ratio, opt.seed, &dataset_raw);
  if (status != LA_OK) return report_failure(status);
  DatasetHandle dataset(dataset_raw, la_dataset_free);

  la_result* result_raw = nullptr;
  status = la_align(dataset.get(), config.get(),
                    opt.emb_src.empty() ? nullptr : opt.emb_src.c_str(),
                    opt.emb_tgt.empty() ? nullptr : opt.emb_tgt.c_str(), &result_raw);
  if (status != LA_OK) return report_failure(status);
  ResultHandle result(result_raw, la_result_free);

  status = la_result_write(result.get(), opt.out.c_str());
  if (status != LA_OK) return report_failure(status);

  std::printf("hits@1 %.4f hits@10 %.4f mrr %.4f seconds %.3f\n",
              la_result_hits1(result.get()), la_result_hits10(result.get()),
              la_result_mrr(result.get()), la_result_seconds_total(result.get()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LightAlign: non-neural entity alignment over knowledge graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", la_version());

  AlignOptions align_opt;
  std::string config_path;
  CLI::App* align = app.add_subcommand("align", "Align two graphs and write results");
  align->add_option("--dir", align_opt.dir, "Dataset directory")->required();
  align->add_option("--out", align_opt.out, "Output directory (pairs.tsv, metrics.json)");
  align->add_option("--mode", align_opt.mode, "basic|iterative|literal");
  align->add_option("--config", config_path, "JSON config file; flags override it");
  align->add_option("--dim", align_opt.dim, "Label dimension");
  align->add_option("--rounds", align_opt.rounds, "Propagation rounds");
  align->add_option("--topk", align_opt.topk, "Candidates per source entity");
  align->add_option("--tau", align_opt.tau, "Sinkhorn temperature");
  align->add_option("--sinkhorn-q", align_opt.sinkhorn_q, "Sinkhorn iterations");
  align->add_option("--epochs", align_opt.epochs, "Self-training epochs");
  align->add_option("--seed", align_opt.seed, "RNG seed (labels and split)");
  align->add_option("--ratio", align_opt.ratio, "Training fraction of reference pairs");
  align->add_option("--train-file", align_opt.train_file, "Explicit training-pairs file");
  align->add_option("--emb-src", align_opt.emb_src, "Source embeddings (literal mode)");
  align->add_option("--emb-tgt", align_opt.emb_tgt, "Target embeddings (literal mode)");
  align->add_flag("--reverse,!--no-reverse", align_opt.reverse,
                  "Add inverse triples before propagation");
  align->add_flag("--per-round-l2,!--no-per-round-l2", align_opt.per_round_l2,
                  "Re-normalize labels after each round");
  align->add_option("--threads", align_opt.threads,
                    "Worker threads (0 = auto; default from LIGHTALIGN_THREADS)");

  struct TraceOptions {
    std::string dir;
    std::string train_file;
    std::int64_t src = 0, pred = 0, gold = 0;
    std::size_t hops = 0, rounds = 2, top_m = 5;
    std::uint64_t seed = 42;
    double ratio = 0.3;
    bool reverse = true;
    bool machine = false;
    bool hops_set = false;
  } trace_opt;
  CLI::App* trace = app.add_subcommand("trace", "Explain one prediction with one-hot labels");
  trace->add_option("--dir", trace_opt.dir, "Dataset directory")->required();
  trace->add_option("--src", trace_opt.src, "Source entity file ID")->required();
  trace->add_option("--pred", trace_opt.pred, "Predicted target file ID")->required();
  trace->add_option("--gold", trace_opt.gold, "Gold target file ID")->required();
  CLI::Option* hops_option =
      trace->add_option("--hops", trace_opt.hops, "Subgraph radius (default: rounds)");
  trace->add_option("--rounds", trace_opt.rounds, "Propagation rounds");
  trace->add_option("--top", trace_opt.top_m, "Anchors reported per round");
  trace->add_option("--seed", trace_opt.seed, "Split seed");
  trace->add_option("--ratio", trace_opt.ratio, "Training fraction of reference pairs");
  trace->add_option("--train-file", trace_opt.train_file, "Explicit training-pairs file");
  trace->add_flag("--reverse,!--no-reverse", trace_opt.reverse,
                  "Add inverse triples before propagation");
  trace->add_flag("--machine", trace_opt.machine, "Key-value output");

  struct EvalOptions {
    std::string pairs;
    std::string ref;
  } eval_opt;
  CLI::App* eval = app.add_subcommand("eval", "Score a pairs file against a reference");
  eval->add_option("--pairs", eval_opt.pairs, "Predictions (src, tgt, score)")->required();
  eval->add_option("--ref", eval_opt.ref, "Reference pairs (src, tgt)")->required();

  struct SynthOptions {
    std::string out = "synth_data";
    std::size_t entities = 1000;
    std::size_t triples = 4000;
    double noise = 0.0;
    std::uint64_t seed = 1;
  } synth_opt;
  CLI::App* synth = app.add_subcommand("synth", "Generate a permuted-copy benchmark");
  synth->add_option("--out", synth_opt.out, "Output directory");
  synth->add_option("--entities", synth_opt.entities, "Entities per graph");
  synth->add_option("--triples", synth_opt.triples, "Triples per graph");
  synth->add_option("--noise", synth_opt.noise, "Tail-rewiring probability");
  synth->add_option("--seed", synth_opt.seed, "RNG seed");

  // --config values act as defaults, so load them before the real parse.
  for (int i = 2; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config" && std::string(argv[1]) == "align") {
      if (!apply_config_file(argv[i + 1], align_opt)) return 1;
      break;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (align->parsed()) return run_align(align_opt);

  if (trace->parsed()) {
    trace_opt.hops_set = hops_option->count() > 0;
    la_dataset* dataset_raw = nullptr;
    la_status status = la_dataset_load(
        trace_opt.dir.c_str(),
        trace_opt.train_file.empty() ? nullptr : trace_opt.train_file.c_str(),
        trace_opt.ratio, trace_opt.seed, &dataset_raw);
    if (status != LA_OK) return report_failure(status);
    DatasetHandle dataset(dataset_raw, la_dataset_free);

    std::size_t hops = trace_opt.hops_set ? trace_opt.hops : trace_opt.rounds;
    la_trace_report* report_raw = nullptr;
    status = la_trace(dataset.get(), trace_opt.src, trace_opt.pred, trace_opt.gold,
                      hops, trace_opt.rounds, trace_opt.top_m, trace_opt.reverse,
                      &report_raw);
    if (status != LA_OK) return report_failure(status);
    TraceHandle report(report_raw, la_trace_free);
    std::fputs(la_trace_text(report.get(), trace_opt.machine ? 1 : 0), stdout);
    return 0;
  }

  if (eval->parsed()) {
    double hits1 = 0.0, hits10 = 0.0, mrr = 0.0;
    la_status status =
        la_eval_files(eval_opt.pairs.c_str(), eval_opt.ref.c_str(), &hits1, &hits10, &mrr);
    if (status != LA_OK) return report_failure(status);
    std::printf("hits@1 %.4f hits@10 %.4f mrr %.4f\n", hits1, hits10, mrr);
    return 0;
  }

  if (synth->parsed()) {
    la_status status = la_synth(synth_opt.out.c_str(), synth_opt.entities,
                                synth_opt.triples, synth_opt.noise, synth_opt.seed);
    if (status != LA_OK) return report_failure(status);
    std::printf("wrote %s\n", synth_opt.out.c_str());
    return 0;
  }

  return 1;
}
