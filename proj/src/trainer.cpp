// src/trainer.cpp
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

#include "satforge/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "satforge/nn/loss.hpp"
#include "satforge/nn/sgd.hpp"
#include "satforge/parallel.hpp"
#include "satforge/rng.hpp"

namespace satforge::train {

std::string sat_policy_name(SATPolicy policy) {
  return policy == SATPolicy::kFineTuneAll ? "fine-tune-all" : "freeze-main";
}

SATPolicy parse_sat_policy(const std::string& name) {
  if (name == "fine-tune-all") return SATPolicy::kFineTuneAll;
  if (name == "freeze-main") return SATPolicy::kFreezeMain;
  throw DataError("unknown SAT policy: " + name);
}

std::string projection_kind_name(ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::kNone: return "none";
    case ProjectionKind::kPca: return "pca";
    case ProjectionKind::kLda: return "lda";
  }
  return "none";
}

ProjectionKind parse_projection_kind(const std::string& name) {
  if (name == "none") return ProjectionKind::kNone;
  if (name == "pca") return ProjectionKind::kPca;
  if (name == "lda") return ProjectionKind::kLda;
  throw DataError("unknown embedding projection: " + name);
}

std::vector<float> EmbProjection::apply(const std::vector<float>& x) const {
  require(x.size() == center.size(), "embedding projection: width mismatch");
  std::vector<float> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - center[j]) * inv_std[j];
  if (kind == ProjectionKind::kNone) return z;
  std::vector<float> out(matrix.rows, 0.0f);
  for (std::size_t r = 0; r < matrix.rows; ++r) {
    const float* row = matrix.row_ptr(r);
    double acc = 0.0;
    for (std::size_t j = 0; j < matrix.cols; ++j)
      acc += static_cast<double>(row[j]) * (z[j] - mean[j]);
    out[r] = static_cast<float>(acc);
  }
  return out;
}

EmbProjection fit_projection(ProjectionKind kind, std::size_t out_dim,
                             const data::Corpus& corpus, data::EmbeddingKind emb_kind,
                             const data::EmbeddingConfig& embcfg) {
  EmbProjection proj;
  proj.kind = kind;

  std::vector<std::vector<float>> raw;
  std::vector<int> labels;
  for (const data::Utterance& u : corpus.utterances) {
    if (u.split != data::Split::kTrain) continue;
    raw.push_back(data::oracle_embedding(u, emb_kind, embcfg).values);
    labels.push_back(u.speaker_index);
  }
  require(raw.size() >= 4, "fit_projection: training split too small");
  const std::size_t raw_dim = raw.front().size();

  // Standardization statistics from the training split.
  proj.center.assign(raw_dim, 0.0f);
  proj.inv_std.assign(raw_dim, 0.0f);
  std::vector<double> mean_d(raw_dim, 0.0), var_d(raw_dim, 0.0);
  for (const auto& e : raw)
    for (std::size_t j = 0; j < raw_dim; ++j) mean_d[j] += e[j];
  for (double& v : mean_d) v /= static_cast<double>(raw.size());
  for (const auto& e : raw)
    for (std::size_t j = 0; j < raw_dim; ++j) {
      const double c = e[j] - mean_d[j];
      var_d[j] += c * c;
    }
  for (std::size_t j = 0; j < raw_dim; ++j) {
    proj.center[j] = static_cast<float>(mean_d[j]);
    const double sd = std::sqrt(var_d[j] / static_cast<double>(raw.size()));
    proj.inv_std[j] = sd > 1e-6 ? static_cast<float>(1.0 / sd) : 0.0f;
  }
  if (kind == ProjectionKind::kNone) return proj;

  backend::DMatrix x(raw.size(), raw_dim);
  for (std::size_t i = 0; i < raw.size(); ++i)
    for (std::size_t j = 0; j < x.cols; ++j)
      x(i, j) = (raw[i][j] - proj.center[j]) * proj.inv_std[j];

  std::vector<double> proj_mean;
  backend::DMatrix matrix_d;
  if (kind == ProjectionKind::kPca) {
    require(out_dim >= 1 && out_dim <= x.cols, "fit_projection: bad pca dim");
    backend::PCAModel pca = backend::pca_fit(x, out_dim);
    proj_mean = pca.mean;
    matrix_d = pca.components;
  } else {
    std::vector<int> unique_labels = labels;
    std::sort(unique_labels.begin(), unique_labels.end());
    unique_labels.erase(std::unique(unique_labels.begin(), unique_labels.end()),
                        unique_labels.end());
    const std::size_t cap = std::min(x.cols, unique_labels.size() - 1);
    if (out_dim == 0 || out_dim > cap) out_dim = cap;
    backend::LDAModel lda = backend::lda_fit(x, labels, out_dim);
    proj_mean = lda.mean;
    matrix_d = lda.projection;
  }
  proj.mean.assign(proj_mean.begin(), proj_mean.end());
  proj.matrix = Matrix(matrix_d.rows, matrix_d.cols);
  for (std::size_t i = 0; i < matrix_d.data.size(); ++i)
    proj.matrix.data[i] = static_cast<float>(matrix_d.data[i]);
  return proj;
}

namespace {

struct FrameData {
  Matrix x;
  std::vector<int> y;
  Matrix e;  // empty when the model is unconditioned
  std::vector<std::pair<std::size_t, std::size_t>> utt_rows;
  std::vector<const data::Utterance*> utts;
};

FrameData build_frames(const std::vector<const data::Utterance*>& utts, bool conditioned,
                       data::EmbeddingKind kind, const EmbProjection& proj,
                       const data::EmbeddingConfig& embcfg) {
  require(!utts.empty(), "build_frames: empty utterance list");
  std::size_t total = 0;
  for (const data::Utterance* u : utts) total += u->frames.rows;
  const std::size_t feat = utts.front()->frames.cols;

  FrameData data;
  data.x = Matrix(total, feat);
  data.y.resize(total);
  data.utts = utts;
  std::size_t e_dim = 0;
  if (conditioned) {
    e_dim = proj.out_dim(data::embedding_dim(kind, feat));
    data.e = Matrix(total, e_dim);
  }

  std::size_t row = 0;
  for (const data::Utterance* u : utts) {
    const std::size_t t = u->frames.rows;
    data.utt_rows.push_back({row, t});
    std::copy(u->frames.data.begin(), u->frames.data.end(), data.x.data.begin() + row * feat);
    std::copy(u->labels.begin(), u->labels.end(), data.y.begin() + row);
    if (conditioned) {
      if (kind == data::EmbeddingKind::kOracleFrame) {
        Matrix frame_emb = data::oracle_frame_matrix(*u, embcfg);
        for (std::size_t i = 0; i < t; ++i) {
          std::vector<float> v(frame_emb.row_ptr(i), frame_emb.row_ptr(i) + frame_emb.cols);
          v = proj.apply(v);
          std::copy(v.begin(), v.end(), data.e.row_ptr(row + i));
        }
      } else {
        std::vector<float> v = proj.apply(data::oracle_embedding(*u, kind, embcfg).values);
        for (std::size_t i = 0; i < t; ++i)
          std::copy(v.begin(), v.end(), data.e.row_ptr(row + i));
      }
    }
    row += t;
  }
  return data;
}

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& idx, std::size_t begin,
                   std::size_t end) {
  Matrix out(end - begin, m.cols);
  for (std::size_t k = begin; k < end; ++k) {
    const float* src = m.row_ptr(idx[k]);
    std::copy(src, src + m.cols, out.row_ptr(k - begin));
  }
  return out;
}

// Frame error rate of an eval-mode pass over prepared frames. Rows are
// independent in eval mode and chunks write disjoint outputs, so neither
// chunking nor the thread cap can change the result.
double fer_on_frames(ModelSetup& setup, const FrameData& data,
                     std::vector<std::size_t>* utt_errors = nullptr) {
  const std::size_t chunk = 8192;
  if (utt_errors) utt_errors->assign(data.utt_rows.size(), 0);
  std::vector<std::size_t> row_error(data.x.rows, 0);
  const std::size_t num_chunks = (data.x.rows + chunk - 1) / chunk;
  parallel_for(num_chunks, [&](std::size_t c) {
    // Eval-mode forward only reads model state; each worker conditions its
    // own copy of the hook.
    const std::size_t begin = c * chunk;
    const std::size_t end = std::min(begin + chunk, data.x.rows);
    Matrix xb(end - begin, data.x.cols);
    std::copy(data.x.row_ptr(begin), data.x.row_ptr(begin) + (end - begin) * data.x.cols,
              xb.data.begin());
    cond::Conditioner local_cond;
    nn::SiteTransform* hook = nullptr;
    if (setup.conditioned) {
      Matrix eb(end - begin, data.e.cols);
      std::copy(data.e.row_ptr(begin), data.e.row_ptr(begin) + (end - begin) * data.e.cols,
                eb.data.begin());
      local_cond = setup.conditioner;
      local_cond.set_batch(eb);
      hook = &local_cond;
    }
    Matrix logits = setup.mlp.forward(xb, nn::BatchNormMode::kEval, nullptr, hook);
    for (std::size_t i = 0; i < logits.rows; ++i) {
      const float* row = logits.row_ptr(i);
      std::size_t best = 0;
      for (std::size_t j = 1; j < logits.cols; ++j)
        if (row[j] > row[best]) best = j;
      if (static_cast<int>(best) != data.y[begin + i]) row_error[begin + i] = 1;
    }
  });
  std::size_t errors = 0;
  for (std::size_t e : row_error) errors += e;
  if (utt_errors) {
    for (std::size_t k = 0; k < data.utt_rows.size(); ++k) {
      const auto [start, len] = data.utt_rows[k];
      std::size_t e = 0;
      for (std::size_t i = start; i < start + len; ++i) e += row_error[i];
      (*utt_errors)[k] = e;
    }
  }
  return 100.0 * static_cast<double>(errors) / static_cast<double>(data.x.rows);
}

struct StageConfig {
  float lr;
  float momentum;
  std::size_t batch_size;
  std::size_t epochs;
  std::size_t patience;
  std::uint64_t seed;
  nn::BatchNormMode train_bn_mode = nn::BatchNormMode::kTrain;
  bool train_main = true;
  bool train_cond = false;
};

// Minibatch SGD with dev-FER model selection: the best-dev parameters are
// restored into `setup` on return. epoch_dev[0] is the pre-training state.
void run_stage(ModelSetup& setup, const FrameData& train_data, const FrameData& dev_data,
               const StageConfig& stage, std::vector<double>& epoch_dev, double& best_fer) {
  std::vector<TensorView> params, grads;
  if (stage.train_main) {
    params = setup.mlp.param_views("net.");
    grads = setup.mlp.grad_views("net.");
  }
  if (stage.train_cond && setup.conditioned) {
    auto cp = setup.conditioner.param_views("cond.");
    auto cg = setup.conditioner.grad_views("cond.");
    params.insert(params.end(), cp.begin(), cp.end());
    grads.insert(grads.end(), cg.begin(), cg.end());
  }

  nn::SgdOptimizer opt(stage.lr, stage.momentum);
  Rng rng(stage.seed);

  double best = fer_on_frames(setup, dev_data);
  epoch_dev.push_back(best);
  nn::MLP best_mlp = setup.mlp;
  cond::Conditioner best_cond = setup.conditioner;

  std::vector<std::size_t> order(train_data.x.rows);
  std::iota(order.begin(), order.end(), 0);

  std::size_t since_best = 0;
  std::size_t plateau = 0;
  for (std::size_t epoch = 0; epoch < stage.epochs; ++epoch) {
    Rng erng = rng.derive(mix64(0x65706f6368ULL, epoch));
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(erng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }
    for (std::size_t begin = 0; begin < order.size(); begin += stage.batch_size) {
      const std::size_t end = std::min(begin + stage.batch_size, order.size());
      if (end - begin < 2) continue;  // batch norm needs real batches
      Matrix xb = gather_rows(train_data.x, order, begin, end);
      std::vector<int> yb(end - begin);
      for (std::size_t k = begin; k < end; ++k) yb[k - begin] = train_data.y[order[k]];
      nn::SiteTransform* hook = nullptr;
      if (setup.conditioned) {
        Matrix eb = gather_rows(train_data.e, order, begin, end);
        setup.conditioner.set_batch(eb);
        hook = &setup.conditioner;
      }
      setup.mlp.zero_grads();
      setup.conditioner.zero_grads();
      nn::ForwardCache cache;
      Matrix logits = setup.mlp.forward(xb, stage.train_bn_mode, &cache, hook);
      nn::LossResult loss = nn::cross_entropy_loss(logits, yb);
      require_numeric(std::isfinite(loss.loss),
                      "training diverged at epoch " + std::to_string(epoch));
      setup.mlp.backward(cache, loss.d_logits, hook);
      opt.step(params, grads);
    }

    const double dev_fer = fer_on_frames(setup, dev_data);
    epoch_dev.push_back(dev_fer);
    if (dev_fer < best) {
      best = dev_fer;
      best_mlp = setup.mlp;
      best_cond = setup.conditioner;
      since_best = 0;
      plateau = 0;
    } else {
      ++since_best;
      ++plateau;
      if (plateau >= 2) {
        opt.set_learning_rate(opt.learning_rate() * 0.5f);
        plateau = 0;
      }
      if (since_best >= stage.patience) break;
    }
  }
  setup.mlp = std::move(best_mlp);
  setup.conditioner = std::move(best_cond);
  best_fer = best;
}

std::string fingerprint_hex(std::uint64_t fp) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

EvalReport report_from_frames(ModelSetup& setup, const FrameData& data, const std::string& stage,
                              const std::string& split, std::uint64_t corpus_fp,
                              const std::vector<double>& thresholds) {
  EvalReport report;
  report.stage = stage;
  report.split = split;
  report.corpus_fingerprint = fingerprint_hex(corpus_fp);
  std::vector<std::size_t> utt_errors;
  report.fer_percent = fer_on_frames(setup, data, &utt_errors);
  for (std::size_t k = 0; k < data.utts.size(); ++k) {
    report.per_utterance.push_back({data.utts[k]->id, data.utt_rows[k].second, utt_errors[k],
                                    static_cast<double>(data.utts[k]->duration_sec)});
  }
  for (double th : thresholds) {
    std::size_t frames = 0, errors = 0;
    for (const UttFer& u : report.per_utterance) {
      if (u.duration_sec + 1e-9 < th) continue;
      frames += u.frames;
      errors += u.errors;
    }
    if (frames == 0) continue;  // empty bucket: point omitted
    report.fer_by_min_length.push_back(
        {th, 100.0 * static_cast<double>(errors) / static_cast<double>(frames)});
  }
  return report;
}

}  // namespace

EvalReport eval_fer(ModelSetup& setup, const data::Corpus& corpus, data::Split split,
                    const data::EmbeddingConfig& embcfg, bool apply_cmn,
                    const std::vector<double>& length_thresholds) {
  const data::Corpus* source = &corpus;
  data::Corpus normalized;
  if (apply_cmn) {
    normalized = data::cmn_by_speaker(corpus);
    source = &normalized;
  }
  FrameData data = build_frames(source->split_utterances(split), setup.conditioned,
                                setup.emb_kind, setup.projection, embcfg);
  return report_from_frames(setup, data, setup.conditioned ? "sat" : "si", split_name(split),
                            corpus.fingerprint(), length_thresholds);
}

TrainResult train_si(const data::Corpus& corpus, const nn::MlpConfig& mlp_config,
                     const TrainConfig& cfg) {
  const data::Corpus working = cfg.use_cmn ? data::cmn_by_speaker(corpus) : corpus;
  require(!working.split_utterances(data::Split::kTrain).empty(), "train_si: empty train split");
  require(!working.split_utterances(data::Split::kDev).empty(), "train_si: empty dev split");

  TrainResult result;
  Rng rng(mix64(cfg.seed, 0x73695f696e6974ULL));
  result.setup.mlp = nn::MLP(mlp_config, rng);
  result.setup.conditioned = false;

  data::EmbeddingConfig dummy_emb;
  FrameData train_data = build_frames(working.split_utterances(data::Split::kTrain), false,
                                      data::EmbeddingKind::kOracleFull, {}, dummy_emb);
  FrameData dev_data = build_frames(working.split_utterances(data::Split::kDev), false,
                                    data::EmbeddingKind::kOracleFull, {}, dummy_emb);

  StageConfig stage;
  stage.lr = cfg.lr;
  stage.momentum = cfg.momentum;
  stage.batch_size = cfg.batch_size;
  stage.epochs = cfg.epochs_stage1;
  stage.patience = cfg.patience;
  stage.seed = mix64(cfg.seed, 0x737461676531ULL);
  stage.train_main = true;
  stage.train_cond = false;
  run_stage(result.setup, train_data, dev_data, stage, result.epoch_dev_fer,
            result.best_dev_fer);

  result.dev_report = report_from_frames(result.setup, dev_data, "si", "dev",
                                         corpus.fingerprint(), {});
  if (!working.split_utterances(data::Split::kEval).empty()) {
    FrameData eval_data = build_frames(working.split_utterances(data::Split::kEval), false,
                                       data::EmbeddingKind::kOracleFull, {}, dummy_emb);
    result.eval_report = report_from_frames(result.setup, eval_data, "si", "eval",
                                            corpus.fingerprint(), {});
  }
  return result;
}

namespace {

// Concatenation reshapes the first layer: embedding columns enter as extra
// input rows of the weight matrix, zero-initialized so the widened model
// reproduces the SI model exactly until training moves them.
nn::MLP widen_first_layer(const nn::MLP& si, std::size_t extra_inputs) {
  nn::MLP wide = si;
  const nn::MLP::Block& old0 = si.block(0);
  nn::DenseLayerT<float> dense(old0.dense.in_dim() + extra_inputs, old0.dense.out_dim(),
                               old0.dense.activation);
  for (std::size_t i = 0; i < old0.dense.in_dim(); ++i)
    for (std::size_t j = 0; j < old0.dense.out_dim(); ++j)
      dense.weight(i, j) = old0.dense.weight(i, j);
  dense.bias = old0.dense.bias;
  wide.block(0).dense = std::move(dense);
  wide.config_.input_dim += extra_inputs;
  wide.alloc_grads();
  return wide;
}

}  // namespace

TrainResult train_sat(const data::Corpus& corpus, const ModelSetup& si,
                      const data::EmbeddingConfig& embcfg, const SatOptions& options,
                      const TrainConfig& cfg) {
  require(options.spec.enabled(), "train_sat: conditioning mechanism is 'none'");
  const data::Corpus working = cfg.use_cmn ? data::cmn_by_speaker(corpus) : corpus;
  const std::size_t feat = corpus.config.feat_dim;

  TrainResult result;
  result.setup.conditioned = true;
  result.setup.emb_kind = options.emb_kind;
  result.setup.projection =
      fit_projection(options.projection, options.projection_dim, working, options.emb_kind,
                     embcfg);
  const std::size_t e_dim =
      result.setup.projection.out_dim(data::embedding_dim(options.emb_kind, feat));

  // Stage 2 starts from the SI parameters exactly.
  if (options.spec.mechanism == cond::Mechanism::kConcatenate) {
    result.setup.mlp = widen_first_layer(si.mlp, e_dim);
  } else {
    result.setup.mlp = si.mlp;
  }

  const auto sites = cond::resolve_sites(options.spec, result.setup.mlp.num_layers());
  const auto site_dims = cond::site_dims_for(sites, feat, si.mlp.config().hidden_dims);
  Rng crng(mix64(cfg.seed, 0x636f6e64ULL));
  result.setup.conditioner =
      cond::Conditioner(options.spec, e_dim, sites, site_dims, crng);

  FrameData train_data = build_frames(working.split_utterances(data::Split::kTrain), true,
                                      options.emb_kind, result.setup.projection, embcfg);
  FrameData dev_data = build_frames(working.split_utterances(data::Split::kDev), true,
                                    options.emb_kind, result.setup.projection, embcfg);

  StageConfig stage;
  stage.lr = cfg.lr_stage2;
  stage.momentum = cfg.momentum;
  stage.batch_size = cfg.batch_size;
  stage.epochs = cfg.epochs_stage2;
  stage.patience = cfg.patience;
  stage.seed = mix64(cfg.seed, 0x737461676532ULL);
  stage.train_cond = true;
  if (options.policy == SATPolicy::kFreezeMain) {
    // Fixing the main part: no main gradients, and batch norm keeps running
    // on the SI statistics so its state stays bit-identical.
    result.setup.mlp.set_all_frozen(true);
    stage.train_main = false;
    stage.train_bn_mode = nn::BatchNormMode::kEval;
  } else {
    stage.train_main = true;
    stage.train_bn_mode = nn::BatchNormMode::kTrain;
  }

  run_stage(result.setup, train_data, dev_data, stage, result.epoch_dev_fer,
            result.best_dev_fer);

  result.dev_report = report_from_frames(result.setup, dev_data, "sat", "dev",
                                         corpus.fingerprint(), {});
  if (!working.split_utterances(data::Split::kEval).empty()) {
    FrameData eval_data = build_frames(working.split_utterances(data::Split::kEval), true,
                                       options.emb_kind, result.setup.projection, embcfg);
    result.eval_report = report_from_frames(result.setup, eval_data, "sat", "eval",
                                            corpus.fingerprint(), {});
  }
  return result;
}

std::vector<ComparisonRow> compare_experiments(const std::vector<EvalReport>& reports,
                                               const std::string& baseline_experiment) {
  require(!reports.empty(), "compare_experiments: no reports");
  for (const EvalReport& r : reports)
    require_data(r.corpus_fingerprint == reports.front().corpus_fingerprint,
                 "compare_experiments: reports come from different corpora");
  double baseline_fer = -1.0;
  for (const EvalReport& r : reports)
    if (r.experiment == baseline_experiment) baseline_fer = r.fer_percent;
  require_data(baseline_fer >= 0.0,
               "compare_experiments: baseline '" + baseline_experiment + "' not found");
  std::vector<ComparisonRow> rows;
  for (const EvalReport& r : reports) {
    ComparisonRow row;
    row.experiment = r.experiment;
    row.stage = r.stage;
    row.fer_percent = r.fer_percent;
    row.relative_gain = baseline_fer > 0.0 ? (baseline_fer - r.fer_percent) / baseline_fer : 0.0;
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    return a.fer_percent < b.fer_percent;
  });
  return rows;
}

std::vector<TensorView> setup_state_views(ModelSetup& setup) {
  std::vector<TensorView> views = setup.mlp.state_views("net.");
  setup.conditioned_flag = setup.conditioned ? 1.0f : 0.0f;
  views.push_back(make_view<float>("meta.conditioned", {1}, &setup.conditioned_flag));
  if (setup.conditioned) {
    auto cv = setup.conditioner.param_views("cond.");
    views.insert(views.end(), cv.begin(), cv.end());
    views.push_back(make_view<float>("embproj.center", {setup.projection.center.size()},
                                     setup.projection.center.data()));
    views.push_back(make_view<float>("embproj.inv_std", {setup.projection.inv_std.size()},
                                     setup.projection.inv_std.data()));
    if (setup.projection.kind != ProjectionKind::kNone) {
      views.push_back(make_view<float>("embproj.mean", {setup.projection.mean.size()},
                                       setup.projection.mean.data()));
      views.push_back(make_view<float>("embproj.matrix",
                                       {setup.projection.matrix.rows, setup.projection.matrix.cols},
                                       setup.projection.matrix.data.data()));
    }
  }
  return views;
}

}  // namespace satforge::train
