// tests/test_cli.cpp

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


#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gopctc/cli.hpp"
#include "gopctc/io_formats.hpp"
#include "test_util.hpp"
#include "toy_dataset.hpp"

using namespace gopctc;
using namespace gopctc::testing;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult gop(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string &name) { return (fs::path(GOPCTC_TEST_DATA) / name).string(); }

std::string slurp(const fs::path &p) { return io::read_file(p.string()); }

// Extract train and dev features of a toy dataset.
struct Extracted {
  ToyDataset toy;
  std::string train_f, dev_f;
};

Extracted extract_toy(const fs::path &dir) {
  Extracted e{make_toy_dataset(dir), (dir / "train.gopf").string(), (dir / "dev.gopf").string()};
  REQUIRE(gop({"--quiet", "extract", "--manifest", e.toy.train_manifest, "--vocab", e.toy.vocab, "--out",
               e.train_f}).code == 0);
  REQUIRE(gop({"--quiet", "extract", "--manifest", e.toy.dev_manifest, "--vocab", e.toy.vocab, "--out",
               e.dev_f}).code == 0);
  return e;
}

}  // namespace

TEST_CASE("ctc-ll") {
  const CliResult r = gop({"ctc-ll", "--emissions", data("peaked.gope"), "--vocab", data("vocab_ab.txt"),
                           "--word", "a"});
  CHECK(r.code == 0);
  CHECK(r.out == "LPP -0.223144\n");

  const CliResult lpr = gop({"ctc-ll", "--emissions", data("peaked.gope"), "--vocab", data("vocab_ab.txt"),
                             "--word", "A", "--lpr"});
  CHECK(lpr.code == 0);
  CHECK(lpr.out.find("3.283414") != std::string::npos);
  CHECK(lpr.out.find("4.382027") != std::string::npos);

  CHECK(gop({"ctc-ll", "--emissions", data("peaked.gope"), "--vocab", data("vocab_ab.txt"), "--word", ""}).code ==
        1);
  const CliResult unk = gop({"ctc-ll", "--emissions", data("peaked.gope"), "--vocab", data("vocab_ab.txt"),
                             "--word", "az"});
  CHECK(unk.code == 2);
  CHECK(unk.err.find("'z'") != std::string::npos);
  CHECK(gop({"ctc-ll", "--emissions", data("nope.gope"), "--vocab", data("vocab_ab.txt"), "--word", "a"}).code ==
        2);
}

TEST_CASE("usage errors") {
  CHECK(gop({}).code == 1);
  CHECK(gop({"frobnicate"}).code == 1);
  CHECK(gop({"extract", "--manifest", "m", "--vocab", "v", "--out", "o", "--mode", "fast"}).code == 1);
  CHECK(gop({"train", "--features", "f", "--manifest", "m", "--out", "o", "--no-dev", "--dev-features", "d"}).code ==
        1);
  CHECK(gop({"train", "--features", "f", "--manifest", "m", "--out", "o"}).code == 1);
  CHECK(gop({"interpolate", "--predictions", "a", "b", "--weights", "0.5", "0.5", "--optimize", "--manifest", "m",
             "--out", "o"}).code == 1);
  CHECK(gop({"interpolate", "--predictions", "a", "b", "--out", "o"}).code == 1);
  CHECK(gop({"--threads", "-1", "ctc-ll", "--emissions", "e", "--vocab", "v", "--word", "a"}).code == 1);
  CHECK(gop({"--help"}).code == 0);
}

TEST_CASE("evaluate on the hand-computed fixture") {
  const fs::path dir = scratch_dir("cli_eval");
  const std::string report = (dir / "report.json").string();
  const CliResult r = gop({"evaluate", "--predictions", data("fixture_preds.csv"), "--manifest",
                           data("fixture_manifest.csv"), "--out", report});
  CHECK(r.code == 0);
  CHECK(r.out.find("UAR") != std::string::npos);
  CHECK(r.out.find("75.0") != std::string::npos);
  const MetricsReport rep = io::parse_report(slurp(report));
  CHECK(rep.uar == doctest::Approx(75.0));
  CHECK(rep.mae == doctest::Approx(1.0 / 3));
  fs::remove_all(dir);
}

TEST_CASE("interpolate with fixed weights") {
  const fs::path dir = scratch_dir("cli_interp");
  const std::string out = (dir / "mix.csv").string();
  CHECK(gop({"interpolate", "--predictions", data("system_a.csv"), data("system_b.csv"), "--weights", "0.1",
             "0.9", "--out", out}).code == 0);
  const PredictionSet mix = io::read_predictions(out);
  REQUIRE(mix.size() == 1);
  CHECK(mix[0].posterior(0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(mix[0].posterior(1) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(mix[0].predicted_class == 2);
  CHECK(gop({"interpolate", "--predictions", data("system_a.csv"), data("system_b.csv"), "--weights", "0.3",
             "0.9", "--out", out}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("extract is deterministic and matches the naive route") {
  const fs::path dir = scratch_dir("cli_extract");
  const ToyDataset toy = make_toy_dataset(dir, 6);
  std::vector<std::string> runs;
  for (const char *threads : {"1", "4", "0"}) {
    const std::string out = (dir / (std::string("opt") + threads + ".gopf")).string();
    REQUIRE(gop({"--quiet", "--threads", threads, "extract", "--manifest", toy.train_manifest, "--vocab", toy.vocab,
                 "--out", out}).code == 0);
    runs.push_back(slurp(out));
  }
  CHECK(runs[0] == runs[1]);
  CHECK(runs[0] == runs[2]);

  const std::string naive = (dir / "naive.gopf").string();
  REQUIRE(gop({"--quiet", "extract", "--manifest", toy.train_manifest, "--vocab", toy.vocab, "--out", naive,
               "--mode", "naive"}).code == 0);
  const io::FeatureFile a = io::parse_features(runs[0]);
  const io::FeatureFile b = io::read_features(naive);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].utt_id == b.records[k].utt_id);
    CHECK((a.records[k].feature_matrix() - b.records[k].feature_matrix()).cwiseAbs().maxCoeff() <= 1e-6);
  }
  fs::remove_all(dir);
}

TEST_CASE("extract error names the utterance") {
  const fs::path dir = scratch_dir("cli_missing");
  const std::string manifest = (dir / "m.csv").string();
  io::write_file(manifest, "utt_id,word,score,emission_path\nok1,a," "1," + data("peaked.gope") +
                               "\nghost7,a,2,missing.gope\n");
  const CliResult r = gop({"--quiet", "extract", "--manifest", manifest, "--vocab", data("vocab_ab.txt"), "--out",
                           (dir / "f.gopf").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("ghost7") != std::string::npos);
  CHECK(!fs::exists(dir / "f.gopf"));

  io::write_file(manifest, "utt_id,word,score,emission_path\nok1,a,6," + data("peaked.gope") + "\n");
  CHECK(gop({"--quiet", "extract", "--manifest", manifest, "--vocab", data("vocab_ab.txt"), "--out",
             (dir / "f.gopf").string()}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("train, predict, evaluate") {
  const fs::path dir = scratch_dir("cli_pipeline");
  const Extracted e = extract_toy(dir);
  const std::string model = (dir / "model.json").string(), model2 = (dir / "model2.json").string();
  const std::vector<std::string> train_args{"train", "--features", e.train_f, "--manifest", e.toy.train_manifest,
                                            "--dev-features", e.dev_f, "--dev-manifest", e.toy.dev_manifest,
                                            "--epochs", "20", "--batch", "8", "--vocab", e.toy.vocab};
  auto with_out = [](std::vector<std::string> a, const std::string &o) {
    a.push_back("--out");
    a.push_back(o);
    return a;
  };
  const CliResult t = gop(with_out(train_args, model));
  REQUIRE(t.code == 0);
  CHECK(t.err.find("epoch 1 ") != std::string::npos);
  CHECK(t.err.find("best epoch") != std::string::npos);
  CHECK(gop(with_out(train_args, model2)).code == 0);
  CHECK(slurp(model) == slurp(model2));

  const std::string p1 = (dir / "p1.csv").string(), p4 = (dir / "p4.csv").string();
  CHECK(gop({"--threads", "1", "predict", "--model", model, "--features", e.dev_f, "--out", p1, "--vocab",
             e.toy.vocab}).code == 0);
  CHECK(gop({"--threads", "4", "predict", "--model", model, "--features", e.dev_f, "--out", p4}).code == 0);
  CHECK(slurp(p1) == slurp(p4));

  const CliResult ev = gop({"evaluate", "--predictions", p1, "--manifest", e.toy.dev_manifest});
  CHECK(ev.code == 0);
  const ScorerModel m = io::read_model(model);
  char uar[32];
  std::snprintf(uar, sizeof(uar), "%.1f", m.best_dev_uar);
  CHECK(ev.out.find(uar) != std::string::npos);
  CHECK(m.best_dev_uar > 40.0);  // five classes, chance is 20

  // Ablation switches still produce valid models.
  CHECK(gop(with_out({"--quiet", "train", "--features", e.train_f, "--manifest", e.toy.train_manifest, "--no-dev",
                      "--loss", "ce", "--no-letter-features"},
                     model2)).code == 0);
  CHECK(io::read_model(model2).config.loss == LossKind::kCrossEntropy);

  // Mismatched vocabulary at predict time.
  const std::string vocab_small = (dir / "v2.txt").string();
  io::write_vocab(vocab_small, letters_vocab(3));
  CHECK(gop({"predict", "--model", model, "--features", e.dev_f, "--out", p1, "--vocab", vocab_small}).code == 2);

  // Optimized interpolation of two systems.
  const std::string mix = (dir / "mix.csv").string();
  const CliResult opt = gop({"interpolate", "--predictions", p1, p4, "--optimize", "--manifest", e.toy.dev_manifest,
                             "--out", mix});
  CHECK(opt.code == 0);
  CHECK(opt.out.find("weights 0.000000 1.000000") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cluster reports K=3 on blobs and is reproducible") {
  const fs::path dir = scratch_dir("cli_cluster");
  std::mt19937_64 rng(9);
  std::vector<int> truth;
  EmbeddingSet e;
  e.vectors = gaussian_blobs(rng, 3, 30, 8, 10.0, truth);
  for (int i = 0; i < 90; ++i) e.ids.push_back("s" + std::to_string(i));
  const std::string emb = (dir / "e.gopv").string();
  io::write_embeddings(emb, e);
  std::vector<std::string> outs;
  for (const char *threads : {"1", "3"}) {
    const std::string out = (dir / (std::string("c") + threads + ".csv")).string();
    const CliResult r = gop({"--threads", threads, "cluster", "--embeddings", emb, "--out", out, "--p", "0.2",
                             "--kmin", "2", "--kmax", "5", "--report", (dir / "rep.json").string()});
    CHECK(r.code == 0);
    CHECK(r.out == "K=3\n");
    outs.push_back(slurp(out));
  }
  CHECK(outs[0] == outs[1]);
  CHECK(outs[0].rfind("utt_id,cluster\ns0,0\n", 0) == 0);
  CHECK(gop({"cluster", "--embeddings", emb, "--out", (dir / "x.csv").string(), "--kmin", "5", "--kmax", "2"}).code ==
        1);
  fs::remove_all(dir);
}
