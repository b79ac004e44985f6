// src/cli.cpp

// Copyright 2025  gopctc authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "gopctc/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "gopctc/ctc.hpp"
#include "gopctc/errors.hpp"
#include "gopctc/gop_features.hpp"
#include "gopctc/io_formats.hpp"
#include "gopctc/metrics.hpp"
#include "gopctc/scorer.hpp"
#include "gopctc/speaker_cluster.hpp"

namespace gopctc::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 42;
  int threads = 0;  // 0: all hardware threads
  bool quiet = false;
};

struct ExtractArgs {
  std::string manifest, vocab, out, mode = "optimized";
  double clamp = kDefaultClamp;
  bool apply_log_softmax = false;
};

struct TrainArgs {
  std::string features, manifest, dev_features, dev_manifest, out, vocab;
  bool no_dev = false;
  double alpha = 0.5;
  std::string class_weights = "balanced", loss = "ordinal";
  bool no_letter_features = false;
  double lr = 0.1;
  int epochs = 10, batch = 64;
};

struct PredictArgs {
  std::string model, features, out, vocab;
};

struct EvaluateArgs {
  std::string predictions, manifest, out;
};

struct InterpolateArgs {
  std::vector<std::string> predictions;
  std::vector<double> weights;
  bool optimize = false;
  std::string manifest, out;
  double step = 0.1;
};

struct ClusterArgs {
  std::string embeddings, out, report;
  double p = 0.01;
  int kmin = 40, kmax = 45, restarts = 10, max_iters = 100;
};

struct CtcArgs {
  std::string emissions, vocab, word, mode = "optimized";
  bool lpr = false, apply_log_softmax = false;
  double clamp = kDefaultClamp;
};

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

int worker_count(const Globals &g, std::size_t jobs) {
  int n = g.threads > 0 ? g.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(jobs, 1)));
}

std::map<std::string, int> scores_by_utt(const std::vector<io::ManifestRow> &rows) {
  std::map<std::string, int> m;
  for (const auto &r : rows)
    if (r.score) m[r.utt_id] = *r.score;
  return m;
}

std::vector<int> labels_for(const std::vector<GopFeatureSet> &records,
                            const std::map<std::string, int> &scores, const std::string &what) {
  std::vector<int> labels;
  labels.reserve(records.size());
  for (const auto &fs : records) {
    auto it = scores.find(fs.utt_id);
    if (it == scores.end())
      throw InvalidInput(what + ": no score in the manifest for utterance " + fs.utt_id);
    labels.push_back(it->second);
  }
  return labels;
}

std::string features_fingerprint(int vocab_letters) {
  return "letters:" + std::to_string(vocab_letters);
}

// ----------------------------------------------------------- commands ----

int cmd_extract(const ExtractArgs &a, const Globals &g, std::ostream &err) {
  const GopMode mode = parse_gop_mode(a.mode);
  if (!(a.clamp > 0.0)) throw UsageError("--clamp must be positive");
  const Vocab vocab = io::read_vocab(a.vocab);
  const auto rows = io::read_manifest(a.manifest, false);

  std::vector<GopFeatureSet> out(rows.size());
  std::vector<std::exception_ptr> errors(rows.size());
  std::atomic<std::size_t> next{0}, done{0};
  std::mutex log_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      const auto &row = rows[i];
      try {
        try {
          const EmissionMatrix em =
              io::read_emissions(io::resolve_relative(a.manifest, row.emission_path), a.apply_log_softmax);
          if (em.num_classes() != vocab.num_classes())
            throw InvalidInput("emissions have " + std::to_string(em.num_classes()) +
                               " classes but the vocab has " + std::to_string(vocab.num_classes()));
          const LabelSequence labels = io::word_to_labels(row.word, vocab);
          out[i] = assemble_features(row.utt_id, em, labels, vocab, mode, a.clamp);
        } catch (const NumericError &) {
          throw;
        } catch (const Error &e) {
          throw InvalidInput(row.utt_id + ": " + e.what());
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
      const std::size_t n = ++done;
      if (!g.quiet && (n % 100 == 0 || n == rows.size())) {
        std::lock_guard<std::mutex> lock(log_mutex);
        err << "extract: " << n << "/" << rows.size() << " utterances\n";
      }
    }
  };
  const int workers = worker_count(g, rows.size());
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto &t : pool) t.join();
  for (const auto &e : errors)
    if (e) std::rethrow_exception(e);

  io::write_features(a.out, std::move(out), vocab.num_letters(), a.clamp);
  return kOk;
}

int cmd_train(const TrainArgs &a, const Globals &g, std::ostream &err) {
  const bool has_dev = !a.dev_features.empty() || !a.dev_manifest.empty();
  if (a.no_dev && has_dev) throw UsageError("--no-dev conflicts with --dev-features/--dev-manifest");
  if (!a.no_dev && (a.dev_features.empty() || a.dev_manifest.empty()))
    throw UsageError("give --dev-features and --dev-manifest, or --no-dev");
  if (a.epochs < 0 || a.batch < 1 || !(a.lr > 0.0) || !(a.alpha >= 0.0))
    throw UsageError("--epochs >= 0, --batch >= 1, --lr > 0 and --alpha >= 0 required");

  TrainConfig cfg;
  cfg.alpha = a.alpha;
  cfg.loss = parse_loss_kind(a.loss);
  cfg.weight_mode = parse_class_weight_mode(a.class_weights);
  cfg.lr = a.lr;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.seed = g.seed;
  cfg.use_letter_features = !a.no_letter_features;

  const io::FeatureFile train_ff = io::read_features(a.features);
  const auto train_labels =
      labels_for(train_ff.records, scores_by_utt(io::read_manifest(a.manifest, false)), "train");
  io::FeatureFile dev_ff;
  std::vector<int> dev_labels;
  if (!a.no_dev) {
    dev_ff = io::read_features(a.dev_features);
    if (dev_ff.vocab_letters != train_ff.vocab_letters)
      throw InvalidInput("vocab fingerprint mismatch: dev features use " +
                         std::to_string(dev_ff.vocab_letters) + " letters, training features " +
                         std::to_string(train_ff.vocab_letters));
    dev_labels = labels_for(dev_ff.records, scores_by_utt(io::read_manifest(a.dev_manifest, false)), "dev");
  }

  std::string fingerprint = features_fingerprint(train_ff.vocab_letters);
  if (!a.vocab.empty()) {
    const Vocab vocab = io::read_vocab(a.vocab);
    if (vocab.num_letters() != train_ff.vocab_letters)
      throw InvalidInput("vocab fingerprint mismatch: vocab has " + std::to_string(vocab.num_letters()) +
                         " letters, features " + std::to_string(train_ff.vocab_letters));
    fingerprint = vocab.fingerprint();
  }

  auto log = [&](const EpochLog &e) {
    if (g.quiet) return;
    err << "epoch " << e.epoch << " train_loss " << fmt6(e.train_loss);
    if (e.dev_uar >= 0.0) err << " dev_uar " << fmt6(e.dev_uar);
    err << "\n";
  };
  const TrainResult result =
      train(train_ff.records, train_labels, dev_ff.records, dev_labels, cfg, fingerprint, log);
  if (!g.quiet && !a.no_dev && cfg.epochs > 0)
    err << "best epoch " << result.model.best_epoch << " dev_uar " << fmt6(result.model.best_dev_uar) << "\n";
  io::write_model(a.out, result.model);
  return kOk;
}

int cmd_predict(const PredictArgs &a, const Globals &g, std::ostream &) {
  const ScorerModel model = io::read_model(a.model);
  const io::FeatureFile ff = io::read_features(a.features);
  if (2 * ff.vocab_letters + 2 != model.feature_dim)
    throw InvalidInput("vocab fingerprint mismatch: features have " + std::to_string(ff.vocab_letters) +
                       " letters, model expects " + std::to_string((model.feature_dim - 2) / 2));
  if (!a.vocab.empty()) {
    const std::string fp = io::read_vocab(a.vocab).fingerprint();
    if (model.vocab_fingerprint != fp && model.vocab_fingerprint != features_fingerprint(ff.vocab_letters))
      throw InvalidInput("vocab fingerprint mismatch: model " + model.vocab_fingerprint + ", vocab " + fp);
  }
  PredictionSet preds(ff.records.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < preds.size(); i = next++) preds[i] = predict(model, ff.records[i]);
  };
  const int workers = worker_count(g, preds.size());
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto &t : pool) t.join();
  io::write_predictions(a.out, preds);
  return kOk;
}

int cmd_evaluate(const EvaluateArgs &a, const Globals &g, std::ostream &out) {
  const PredictionSet preds = io::read_predictions(a.predictions);
  const auto scores = scores_by_utt(io::read_manifest(a.manifest, false));
  std::vector<int> refs, hyps;
  for (const auto &p : preds) {
    auto it = scores.find(p.utt_id);
    if (it == scores.end()) throw InvalidInput("evaluate: no reference score for " + p.utt_id);
    refs.push_back(it->second);
    hyps.push_back(p.predicted_class);
  }
  const MetricsReport rep = evaluate(refs, hyps);
  if (!a.out.empty()) io::write_report(a.out, rep);
  if (!g.quiet || a.out.empty()) out << format_report_table(rep);
  return kOk;
}

int cmd_interpolate(const InterpolateArgs &a, const Globals &g, std::ostream &out) {
  if (a.optimize == !a.weights.empty())
    throw UsageError(a.optimize ? "--weights conflicts with --optimize" : "give --weights or --optimize");
  if (a.optimize && a.manifest.empty()) throw UsageError("--optimize needs --manifest with reference scores");
  if (!a.optimize && a.weights.size() != a.predictions.size())
    throw UsageError("need one --weights value per --predictions file");

  std::vector<PredictionSet> systems;
  for (const auto &path : a.predictions) systems.push_back(io::read_predictions(path));
  std::vector<double> weights = a.weights;
  if (a.optimize) {
    const InterpolationSearch best =
        optimize_interpolation(systems, scores_by_utt(io::read_manifest(a.manifest, false)), a.step);
    weights = best.weights;
    if (!g.quiet) {
      out << "weights";
      for (double w : weights) out << " " << fmt6(w);
      out << "\nUAR " << fmt6(best.uar) << " MAE " << fmt6(best.mae) << "\n";
    }
  }
  io::write_predictions(a.out, interpolate(systems, weights));
  return kOk;
}

int cmd_cluster(const ClusterArgs &a, const Globals &g, std::ostream &out) {
  ClusterConfig cfg;
  cfg.p = a.p;
  cfg.k_min = a.kmin;
  cfg.k_max = a.kmax;
  cfg.kmeans_restarts = a.restarts;
  cfg.kmeans_max_iters = a.max_iters;
  cfg.seed = g.seed;
  if (!(cfg.p > 0.0 && cfg.p <= 1.0)) throw UsageError("--p must be in (0, 1]");
  if (cfg.k_min < 1 || cfg.k_min > cfg.k_max) throw UsageError("need 1 <= --kmin <= --kmax");

  const EmbeddingSet set = io::read_embeddings(a.embeddings);
  const ClusterResult r = cluster(set, cfg);
  io::write_file(a.out, io::serialize_cluster_labels(set.ids, r.labels));
  if (!a.report.empty()) {
    std::string doc = "{\n  \"k\": " + std::to_string(r.k) + ",\n  \"gaps\": [";
    for (std::size_t i = 0; i < r.gaps.size(); ++i) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", r.gaps[i]);
      doc += (i ? ", " : "") + std::string(buf);
    }
    doc += "],\n  \"eigenvalues\": [";
    for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", r.eigenvalues(i));
      doc += (i ? ", " : "") + std::string(buf);
    }
    doc += "]\n}\n";
    io::write_file(a.report, doc);
  }
  if (!g.quiet) out << "K=" << r.k << "\n";
  return kOk;
}

int cmd_ctc(const CtcArgs &a, const Globals &, std::ostream &out) {
  if (a.word.empty()) throw UsageError("--word must not be empty");
  const GopMode mode = parse_gop_mode(a.mode);
  const Vocab vocab = io::read_vocab(a.vocab);
  const EmissionMatrix em = io::read_emissions(a.emissions, a.apply_log_softmax);
  if (em.num_classes() != vocab.num_classes())
    throw InvalidInput("emissions have " + std::to_string(em.num_classes()) + " classes but the vocab has " +
                       std::to_string(vocab.num_classes()));
  const LabelSequence labels = io::word_to_labels(a.word, vocab);
  out << "LPP " << fmt6(compute_lpp(em, labels)) << "\n";
  if (!a.lpr) return kOk;

  const GopFeatureSet fs = assemble_features("cli", em, labels, vocab, mode, a.clamp);
  out << "LPR_sub (rows: canonical letters, columns: substitutes)\n letter";
  for (int v = 1; v < vocab.num_classes(); ++v) out << " " << vocab.token(v);
  out << "\n";
  for (int i = 0; i < fs.num_letters_in_word(); ++i) {
    out << " " << vocab.token(labels[i]);
    for (int v = 0; v < vocab.num_letters(); ++v) out << " " << fmt6(fs.lpr_sub(i, v));
    out << "\n";
  }
  out << "LPR_del\n";
  for (int i = 0; i < fs.num_letters_in_word(); ++i)
    out << " " << vocab.token(labels[i]) << " " << fmt6(fs.lpr_del(i)) << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Alignment-free CTC goodness-of-pronunciation toolkit", "gopctc"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = all)")->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Suppress progress output");

  ExtractArgs ex;
  auto *extract = app.add_subcommand("extract", "Compute GOP feature sets for every manifest row");
  extract->add_option("--manifest", ex.manifest, "Manifest CSV")->required();
  extract->add_option("--vocab", ex.vocab, "Vocab file")->required();
  extract->add_option("--out", ex.out, "Output feature file")->required();
  extract->add_option("--mode", ex.mode, "naive|optimized")
      ->check(CLI::IsMember({"naive", "optimized"}))
      ->capture_default_str();
  extract->add_option("--clamp", ex.clamp, "Clamp bound for GOP values (nats)")->capture_default_str();
  extract->add_flag("--apply-log-softmax", ex.apply_log_softmax, "Normalize emission rows first");

  TrainArgs tr;
  auto *trn = app.add_subcommand("train", "Train the utterance scorer");
  trn->add_option("--features", tr.features, "Training feature file")->required();
  trn->add_option("--manifest", tr.manifest, "Training manifest with scores")->required();
  trn->add_option("--dev-features", tr.dev_features, "Dev feature file");
  trn->add_option("--dev-manifest", tr.dev_manifest, "Dev manifest with scores");
  trn->add_flag("--no-dev", tr.no_dev, "Train without a dev set; keep the final epoch");
  trn->add_option("--alpha", tr.alpha, "Ordinal distance exponent (reference-system default)")
      ->capture_default_str();
  trn->add_option("--class-weights", tr.class_weights, "balanced|uniform (reference-system default: balanced)")
      ->check(CLI::IsMember({"balanced", "uniform"}))
      ->capture_default_str();
  trn->add_option("--loss", tr.loss, "ordinal|ce")
      ->check(CLI::IsMember({"ordinal", "ce"}))
      ->capture_default_str();
  trn->add_flag("--no-letter-features", tr.no_letter_features, "Drop the letter identity block (ablation)");
  trn->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
  trn->add_option("--epochs", tr.epochs, "Epochs")->capture_default_str();
  trn->add_option("--batch", tr.batch, "Batch size (reference-system default)")->capture_default_str();
  trn->add_option("--vocab", tr.vocab, "Vocab file to fingerprint into the model");
  trn->add_option("--out", tr.out, "Output model document")->required();

  PredictArgs pr;
  auto *prd = app.add_subcommand("predict", "Score utterances with a trained model");
  prd->add_option("--model", pr.model, "Model document")->required();
  prd->add_option("--features", pr.features, "Feature file")->required();
  prd->add_option("--vocab", pr.vocab, "Vocab file to check against the model");
  prd->add_option("--out", pr.out, "Output predictions CSV")->required();

  EvaluateArgs ev;
  auto *eva = app.add_subcommand("evaluate", "UAR, macro-F1, accuracy and MAE of predictions");
  eva->add_option("--predictions", ev.predictions, "Predictions CSV")->required();
  eva->add_option("--manifest", ev.manifest, "Manifest with reference scores")->required();
  eva->add_option("--out", ev.out, "Optional report document");

  InterpolateArgs ip;
  auto *itp = app.add_subcommand("interpolate", "Combine posteriors of several systems");
  itp->add_option("--predictions", ip.predictions, "Prediction CSVs, one per system")->required()->expected(1, -1);
  itp->add_option("--weights", ip.weights, "One weight per system, summing to 1")->expected(1, -1);
  itp->add_flag("--optimize", ip.optimize, "Grid-search weights maximizing UAR on --manifest");
  itp->add_option("--manifest", ip.manifest, "Reference scores for --optimize");
  itp->add_option("--step", ip.step, "Grid spacing for --optimize")->capture_default_str();
  itp->add_option("--out", ip.out, "Output predictions CSV")->required();

  ClusterArgs cl;
  auto *clu = app.add_subcommand("cluster", "Speaker pseudo-labels by spectral clustering");
  clu->add_option("--embeddings", cl.embeddings, "Embeddings file (GOPV)")->required();
  clu->add_option("--out", cl.out, "Output CSV utt_id,cluster")->required();
  clu->add_option("--p", cl.p, "Neighbour pruning fraction (reference-system default)")->capture_default_str();
  clu->add_option("--kmin", cl.kmin, "Smallest cluster count (reference-system default)")->capture_default_str();
  clu->add_option("--kmax", cl.kmax, "Largest cluster count (reference-system default)")->capture_default_str();
  clu->add_option("--restarts", cl.restarts, "k-means restarts")->capture_default_str();
  clu->add_option("--max-iters", cl.max_iters, "k-means iterations per restart")->capture_default_str();
  clu->add_option("--report", cl.report, "Optional JSON with K, gaps and eigenvalues");

  CtcArgs ct;
  auto *ctc = app.add_subcommand("ctc-ll", "Print the CTC log-likelihood (and LPR tables) of a word");
  ctc->add_option("--emissions", ct.emissions, "Emission file (GOPE)")->required();
  ctc->add_option("--vocab", ct.vocab, "Vocab file")->required();
  ctc->add_option("--word", ct.word, "Canonical word")->required();
  ctc->add_flag("--lpr", ct.lpr, "Also print substitution and deletion LPRs");
  ctc->add_option("--mode", ct.mode, "naive|optimized")
      ->check(CLI::IsMember({"naive", "optimized"}))
      ->capture_default_str();
  ctc->add_option("--clamp", ct.clamp, "Clamp bound for LPRs")->capture_default_str();
  ctc->add_flag("--apply-log-softmax", ct.apply_log_softmax, "Normalize emission rows first");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return kUsage;
  }
  if (g.threads < 0) {
    err << "error: --threads must be >= 0\n";
    return kUsage;
  }

  try {
    if (*extract) return cmd_extract(ex, g, err);
    if (*trn) return cmd_train(tr, g, err);
    if (*prd) return cmd_predict(pr, g, err);
    if (*eva) return cmd_evaluate(ev, g, out);
    if (*itp) return cmd_interpolate(ip, g, out);
    if (*clu) return cmd_cluster(cl, g, out);
    if (*ctc) return cmd_ctc(ct, g, out);
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  }
  return kUsage;
}

int run(int argc, char **argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace gopctc::cli
