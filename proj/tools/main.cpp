// tools/main.cpp
//
// Copyright 2026  The SATForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "satforge/backend/eer.hpp"
#include "satforge/backend/spk_eval.hpp"
#include "satforge/config/experiment_config.hpp"
#include "satforge/data/corpus_io.hpp"
#include "satforge/nn/checkpoint.hpp"
#include "satforge/train/report.hpp"
#include "satforge/train/setup_io.hpp"
#include "satforge/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace satforge;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void ensure_out_dir(const std::string& dir, bool force) {
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    require_data(force, "output directory " + dir + " is not empty (use --force to overwrite)");
  }
  fs::create_directories(dir);
}

data::Corpus load_corpus_checked(const std::string& dir, const config::ExperimentConfig& cfg) {
  data::Corpus corpus = data::load_corpus(dir);
  require_data(corpus.fingerprint() == data::corpus_config_fingerprint(cfg.corpus),
               "corpus in " + dir + " was generated from a different [corpus] config "
               "(fingerprint mismatch)");
  return corpus;
}

void write_run_manifest(const std::string& dir, const config::ExperimentConfig& cfg,
                        const std::string& name) {
  std::ofstream out(fs::path(dir) / "run_manifest.cfg");
  require_data(out.good(), "cannot write run manifest in " + dir);
  out << "# satforge run manifest\n";
  out << "# name " << name << "\n";
  out << "# corpus_fingerprint " << hex64(data::corpus_config_fingerprint(cfg.corpus))
      << "\n";
  out << "# config_fingerprint " << hex64(cfg.fingerprint()) << "\n";
  out << cfg.serialize();
  require_data(out.good(), "failed writing run manifest in " + dir);
}

struct RunManifest {
  std::string name;
  std::string corpus_fingerprint;
  config::ExperimentConfig cfg;
};

RunManifest read_run_manifest(const std::string& dir) {
  const std::string path = (fs::path(dir) / "run_manifest.cfg").string();
  std::ifstream in(path);
  require_data(in.good(), "no run manifest in " + dir);
  std::ostringstream buf;
  buf << in.rdbuf();
  RunManifest manifest;
  manifest.cfg = config::ExperimentConfig::parse(buf.str());
  std::istringstream lines(buf.str());
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream ls(line);
    std::string hash, tag, value;
    if (!(ls >> hash >> tag) || hash != "#") continue;
    if (tag == "name") std::getline(ls >> std::ws, manifest.name);
    if (tag == "corpus_fingerprint") ls >> manifest.corpus_fingerprint;
  }
  return manifest;
}

std::string derive_experiment_name(const config::ExperimentConfig& cfg, bool sat) {
  if (!sat) return cfg.training.params.use_cmn ? "si-cmn" : "si";
  std::string name = "sat-" + cfg.conditioning.mechanism;
  if (cfg.conditioning.mechanism == "ctrl-layer") name += "-" + cfg.conditioning.mode;
  name += "-" + cfg.conditioning.site + "-" + cfg.embeddings.kind;
  if (cfg.training.policy == "freeze-main") name += "-frozen";
  return name;
}

int cmd_gen_data(const std::string& config_path, const std::string& out_dir, bool force) {
  config::ExperimentConfig cfg = config::ExperimentConfig::parse_file(config_path);
  ensure_out_dir(out_dir, force);
  data::Corpus corpus = data::gen_corpus(cfg.corpus);
  data::save_corpus(out_dir, corpus);
  cfg.save((fs::path(out_dir) / "config.cfg").string());
  for (data::EmbeddingKind kind :
       {data::EmbeddingKind::kOracleFull, data::EmbeddingKind::kOracleSpeaker,
        data::EmbeddingKind::kOracleFullNoisy, data::EmbeddingKind::kOracleFrame}) {
    std::vector<std::pair<std::string, std::vector<float>>> rows;
    for (const data::Utterance& u : corpus.utterances)
      rows.push_back({u.id, data::oracle_embedding(u, kind, cfg.embeddings.params).values});
    data::write_embedding_table(
        (fs::path(out_dir) / ("embeddings_" + data::embedding_kind_name(kind) + ".tsv")).string(),
        rows);
  }
  std::printf("generated corpus: %zu utterances, %zu speakers -> %s\n",
              corpus.utterances.size(), corpus.speakers.size(), out_dir.c_str());
  return 0;
}

int cmd_train(const config::ExperimentConfig& cfg, const std::string& corpus_dir,
              const std::string& out_dir, bool sat, const std::string& si_checkpoint,
              const std::string& name_flag, bool force) {
  ensure_out_dir(out_dir, force);
  data::Corpus corpus = load_corpus_checked(corpus_dir, cfg);
  const std::string name = name_flag.empty() ? derive_experiment_name(cfg, sat) : name_flag;

  train::TrainResult result;
  if (!sat) {
    result = train::train_si(
        corpus, cfg.model.to_mlp_config(corpus.config.feat_dim, corpus.config.num_classes),
        cfg.training.params);
  } else {
    require_data(!si_checkpoint.empty(), "--sat requires --si-checkpoint");
    train::ModelSetup si = train::load_setup(si_checkpoint, cfg, corpus, /*conditioned=*/false);
    train::SatOptions options;
    options.spec = cfg.conditioning.to_spec();
    options.emb_kind = cfg.embeddings.parsed_kind();
    options.policy = cfg.training.parsed_policy();
    options.projection = train::parse_projection_kind(cfg.conditioning.projection);
    options.projection_dim = cfg.conditioning.projection_dim;
    result = train::train_sat(corpus, si, cfg.embeddings.params, options, cfg.training.params);
  }

  write_run_manifest(out_dir, cfg, name);
  train::save_setup((fs::path(out_dir) / "checkpoint.bin").string(), result.setup);
  std::vector<train::EvalReport> reports;
  result.dev_report.experiment = name;
  result.dev_report.config_fingerprint = hex64(cfg.fingerprint());
  reports.push_back(result.dev_report);
  if (!result.eval_report.split.empty()) {
    result.eval_report.experiment = name;
    result.eval_report.config_fingerprint = hex64(cfg.fingerprint());
    reports.push_back(result.eval_report);
  }
  train::write_fer_csv((fs::path(out_dir) / "report.csv").string(), reports);
  std::printf("%s: dev fer %.4f%%", name.c_str(), result.dev_report.fer_percent);
  if (!result.eval_report.split.empty())
    std::printf(", eval fer %.4f%%", result.eval_report.fer_percent);
  std::printf(" -> %s\n", out_dir.c_str());
  return 0;
}

int cmd_eval_asr(const config::ExperimentConfig& cfg, const std::string& corpus_dir,
                 const std::string& checkpoint, const std::string& out_dir,
                 const std::string& split_name, const std::string& name_flag, bool force) {
  ensure_out_dir(out_dir, force);
  data::Corpus corpus = load_corpus_checked(corpus_dir, cfg);
  // The checkpoint itself says whether it is conditioned; the config must
  // be able to describe the mechanism when it is.
  auto stored = nn::load_checkpoint(checkpoint);
  auto marker = stored.find("meta.conditioned");
  require_data(marker != stored.end(), "checkpoint " + checkpoint + " has no meta tensor");
  const bool conditioned = marker->second.values.at(0) != 0.0f;
  require_data(!conditioned || cfg.conditioning.to_spec().enabled(),
               "checkpoint " + checkpoint +
                   " is conditioned but the config's conditioning mechanism is 'none'");
  train::ModelSetup setup = train::load_setup(checkpoint, cfg, corpus, conditioned);
  const std::string name =
      name_flag.empty() ? derive_experiment_name(cfg, conditioned) : name_flag;
  train::EvalReport report =
      train::eval_fer(setup, corpus, data::parse_split(split_name), cfg.embeddings.params,
                      cfg.training.params.use_cmn, cfg.evaluation.sweep_thresholds());
  report.experiment = name;
  report.config_fingerprint = hex64(cfg.fingerprint());
  write_run_manifest(out_dir, cfg, name);
  train::write_fer_csv((fs::path(out_dir) / "report.csv").string(), {report});
  std::printf("%s: %s fer %.4f%% -> %s\n", name.c_str(), split_name.c_str(), report.fer_percent,
              out_dir.c_str());
  return 0;
}

int cmd_eval_spk(const config::ExperimentConfig& cfg, const std::string& corpus_dir,
                 const std::string& out_dir, const std::string& kind_name,
                 const std::string& backend_name_arg, bool force) {
  // cfg arrives with any flag overrides already applied.
  ensure_out_dir(out_dir, force);
  data::Corpus corpus = load_corpus_checked(corpus_dir, cfg);
  data::parse_embedding_kind(kind_name);  // validate the name early
  const std::string table_path =
      (fs::path(corpus_dir) / ("embeddings_" + kind_name + ".tsv")).string();
  require_data(fs::exists(table_path), "missing embedding table: " + table_path);
  backend::EmbeddingTable table = data::read_embedding_table(table_path);

  std::vector<backend::BackendKind> backends;
  if (backend_name_arg == "all") {
    backends = {backend::BackendKind::kCosine, backend::BackendKind::kPlda,
                backend::BackendKind::kLda, backend::BackendKind::kLdaPlda};
  } else {
    backends = {backend::parse_backend(backend_name_arg)};
  }

  std::ofstream eer_csv(fs::path(out_dir) / "eer.csv");
  require_data(eer_csv.good(), "cannot write eer.csv in " + out_dir);
  eer_csv << "backend,level,threshold,eer\n";
  char buf[48];

  auto run_level = [&](const data::Corpus& level_corpus, const std::string& level) {
    for (backend::BackendKind bk : backends) {
      backend::SpkEvalConfig scfg;
      scfg.backend = bk;
      scfg.pca_dim = cfg.evaluation.pca_dim;
      scfg.lda_dim = cfg.evaluation.lda_dim;
      scfg.non_target_prop = cfg.evaluation.non_target_prop;
      scfg.trial_seed = cfg.evaluation.trial_seed;
      backend::SpkEvalSession session(level_corpus, table, scfg);
      backend::SpkEvalResult result = session.evaluate();
      std::snprintf(buf, sizeof(buf), "%.4f", result.eer_percent);
      eer_csv << backend::backend_name(bk) << "," << level << ",0," << buf << "\n";
      const std::string suffix = backend::backend_name(bk) + "_" + level;
      backend::write_trials((fs::path(out_dir) / ("trials_" + level + ".txt")).string(),
                            result.trials);
      backend::write_scores((fs::path(out_dir) / ("scores_" + suffix + ".txt")).string(),
                            result.trials, result.scores);
      // Operating points for DET-style analysis.
      std::vector<bool> is_target;
      for (const backend::Trial& t : result.trials.trials) is_target.push_back(t.target);
      std::ofstream roc(fs::path(out_dir) / ("roc_" + suffix + ".csv"));
      roc << "threshold,far,frr\n";
      for (const backend::RocPoint& p : backend::roc_points(result.scores, is_target)) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.6f,%.6f", p.threshold, p.far, p.frr);
        roc << buf << "\n";
      }
      for (double th : cfg.evaluation.sweep_thresholds()) {
        if (th <= 0.0) continue;
        backend::SpkEvalResult filtered = session.evaluate(th);
        std::snprintf(buf, sizeof(buf), "%g,%.4f", th, filtered.eer_percent);
        eer_csv << backend::backend_name(bk) << "," << level << "," << buf << "\n";
      }
    }
  };

  run_level(corpus, "speaker");
  if (cfg.evaluation.subset_max_sec > 0.0) {
    backend::SubsetSplitReport subsets =
        backend::split_speaker_subsets(corpus, cfg.evaluation.subset_max_sec);
    for (const std::string& utt : subsets.oversized_utts)
      std::fprintf(stderr, "note: %s exceeds the subset cap and forms its own subset\n",
                   utt.c_str());
    run_level(subsets.corpus, "subset");
  }
  require_data(eer_csv.good(), "failed writing eer.csv in " + out_dir);
  std::printf("speaker verification report -> %s\n", out_dir.c_str());
  return 0;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir,
               const std::string& baseline_flag, bool force) {
  ensure_out_dir(out_dir, force);
  std::vector<train::EvalReport> all_rows, eval_rows;
  std::string corpus_fp;
  for (const std::string& dir : run_dirs) {
    RunManifest manifest = read_run_manifest(dir);
    if (corpus_fp.empty()) corpus_fp = manifest.corpus_fingerprint;
    require_data(corpus_fp == manifest.corpus_fingerprint,
                 "run " + dir + " comes from a different corpus; refusing to merge");
    auto rows = train::read_fer_csv((fs::path(dir) / "report.csv").string());
    for (train::EvalReport& r : rows) {
      r.corpus_fingerprint = manifest.corpus_fingerprint;
      all_rows.push_back(r);
      if (r.split == "eval") eval_rows.push_back(r);
    }
  }
  require_data(!all_rows.empty(), "no report rows found in the given run directories");
  train::write_fer_csv((fs::path(out_dir) / "combined.csv").string(), all_rows);
  if (!eval_rows.empty()) {
    const std::string baseline = baseline_flag.empty() ? eval_rows.front().experiment
                                                       : baseline_flag;
    auto table = train::compare_experiments(eval_rows, baseline);
    train::write_comparison_csv((fs::path(out_dir) / "comparison.csv").string(), table);
  }
  std::printf("merged %zu report rows -> %s\n", all_rows.size(), out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"satforge: embedding-conditioned speaker-adaptive training laboratory"};
  app.require_subcommand(1);

  std::string config_path, corpus_dir, out_dir, si_checkpoint, checkpoint, name;
  std::string split = "eval", embedding = "", backend_sel = "";
  std::vector<std::string> run_dirs;
  bool sat = false, si = false, force = false;

  CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic corpus");
  gen->add_option("--config", config_path, "experiment config file")->required();
  gen->add_option("--out", out_dir, "output corpus directory")->required();
  gen->add_flag("--force", force, "overwrite a non-empty output directory");

  CLI::App* train_cmd = app.add_subcommand("train", "train a frame classifier");
  train_cmd->add_option("--config", config_path, "experiment config file")->required();
  train_cmd->add_option("--corpus", corpus_dir, "corpus directory")->required();
  train_cmd->add_option("--out", out_dir, "run directory")->required();
  train_cmd->add_flag("--si", si, "train the speaker-independent baseline");
  train_cmd->add_flag("--sat", sat, "run stage-2 adaptive training");
  train_cmd->add_option("--si-checkpoint", si_checkpoint, "SI checkpoint (stage 2 init)");
  std::string mechanism, mode, site, cond_activation, policy, projection;
  std::size_t projection_dim = 0;
  train_cmd->add_option("--mechanism", mechanism, "conditioning mechanism override");
  train_cmd->add_option("--mode", mode, "shift|scale override");
  train_cmd->add_option("--site", site, "input|hidden|layers:... override");
  train_cmd->add_option("--cond-activation", cond_activation, "control layer activation");
  train_cmd->add_option("--embedding", embedding, "embedding kind override");
  train_cmd->add_option("--policy", policy, "fine-tune-all|freeze-main override");
  train_cmd->add_option("--projection", projection, "none|pca|lda embedding projection");
  train_cmd->add_option("--projection-dim", projection_dim, "projected embedding width");
  train_cmd->add_option("--name", name, "experiment name for reports");
  train_cmd->add_flag("--force", force, "overwrite a non-empty run directory");

  CLI::App* eval_asr = app.add_subcommand("eval-asr", "frame error rate of a checkpoint");
  eval_asr->add_option("--config", config_path, "experiment config file")->required();
  eval_asr->add_option("--corpus", corpus_dir, "corpus directory")->required();
  eval_asr->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  eval_asr->add_option("--out", out_dir, "output directory")->required();
  eval_asr->add_option("--split", split, "train|dev|eval (default eval)");
  eval_asr->add_option("--name", name, "experiment name for reports");
  eval_asr->add_flag("--force", force, "overwrite a non-empty output directory");

  CLI::App* eval_spk = app.add_subcommand("eval-spk", "speaker verification report");
  std::string min_length_sweep;
  double subset_max_sec = -1.0;
  eval_spk->add_option("--config", config_path, "experiment config file")->required();
  eval_spk->add_option("--corpus", corpus_dir, "corpus directory")->required();
  eval_spk->add_option("--out", out_dir, "output directory")->required();
  eval_spk->add_option("--embedding", embedding, "embedding kind override");
  eval_spk->add_option("--backend", backend_sel, "cosine|plda|lda|lda-plda|all override");
  eval_spk->add_option("--min-length", min_length_sweep, "comma-separated sweep thresholds (s)");
  eval_spk->add_option("--subset-max-sec", subset_max_sec, "30 s-style speaker subset analysis");
  eval_spk->add_flag("--force", force, "overwrite a non-empty output directory");

  CLI::App* report_cmd = app.add_subcommand("report", "merge run reports");
  report_cmd->add_option("--out", out_dir, "output directory")->required();
  report_cmd->add_option("--baseline", name, "baseline experiment for relative gains");
  report_cmd->add_option("dirs", run_dirs, "run directories")->required()->expected(-1);
  report_cmd->add_flag("--force", force, "overwrite a non-empty output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(config_path, out_dir, force);
    if (train_cmd->parsed()) {
      config::ExperimentConfig cfg = config::ExperimentConfig::parse_file(config_path);
      if (!mechanism.empty()) cfg.conditioning.mechanism = mechanism;
      if (!mode.empty()) cfg.conditioning.mode = mode;
      if (!site.empty()) cfg.conditioning.site = site;
      if (!cond_activation.empty()) cfg.conditioning.activation = cond_activation;
      if (!embedding.empty()) cfg.embeddings.kind = embedding;
      if (!policy.empty()) cfg.training.policy = policy;
      if (!projection.empty()) cfg.conditioning.projection = projection;
      if (projection_dim > 0) cfg.conditioning.projection_dim = projection_dim;
      // Bad flag values are usage, not data, errors.
      try {
        require_data(si != sat, "exactly one of --si / --sat is required");
        if (sat && cfg.conditioning.mechanism == "none")
          throw DataError("--sat requires a conditioning mechanism (config or --mechanism)");
        cfg.validate();
      } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
      }
      return cmd_train(cfg, corpus_dir, out_dir, sat, si_checkpoint, name, force);
    }
    if (eval_asr->parsed()) {
      config::ExperimentConfig cfg = config::ExperimentConfig::parse_file(config_path);
      return cmd_eval_asr(cfg, corpus_dir, checkpoint, out_dir, split, name, force);
    }
    if (eval_spk->parsed()) {
      config::ExperimentConfig cfg = config::ExperimentConfig::parse_file(config_path);
      const std::string kind = embedding.empty() ? cfg.embeddings.kind : embedding;
      const std::string bk = backend_sel.empty() ? cfg.evaluation.backend : backend_sel;
      if (!min_length_sweep.empty()) cfg.evaluation.min_length_sweep = min_length_sweep;
      if (subset_max_sec >= 0.0) cfg.evaluation.subset_max_sec = subset_max_sec;
      return cmd_eval_spk(cfg, corpus_dir, out_dir, kind, bk, force);
    }
    if (report_cmd->parsed()) return cmd_report(run_dirs, out_dir, name, force);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
