// gopctc/io_formats.hpp

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

// Readers and writers for every on-disk artifact. Byte layouts are documented
// in FORMATS.md. All readers throw FormatError / ValidationError on malformed
// input and never read past the end of a buffer.

#ifndef GOPCTC_IO_FORMATS_HPP_
#define GOPCTC_IO_FORMATS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gopctc/ctc.hpp"
#include "gopctc/gop_features.hpp"
#include "gopctc/metrics.hpp"
#include "gopctc/scorer.hpp"
#include "gopctc/speaker_cluster.hpp"

namespace gopctc::io {

constexpr std::uint32_t kFormatVersion = 1;

// Emissions ("GOPE").
EmissionMatrix read_emissions(const std::string &path, bool apply_log_softmax = false);
EmissionMatrix parse_emissions(const std::string &bytes, bool apply_log_softmax = false);
std::string serialize_emissions(const LogMatrix &values);
void write_emissions(const std::string &path, const LogMatrix &values);

// Vocab: one token per line, "<blank>" first.
Vocab read_vocab(const std::string &path);
Vocab parse_vocab(const std::string &text);
void write_vocab(const std::string &path, const Vocab &vocab);

/// Lowercases (ASCII and Latin-1 letters, locale independent) and maps each
/// UTF-8 character to its vocab index.
LabelSequence word_to_labels(const std::string &word, const Vocab &vocab);

// Manifest CSV: utt_id,word,score,emission_path
struct ManifestRow {
  std::string utt_id;
  std::string word;
  std::optional<int> score;
  std::string emission_path;
};
std::vector<ManifestRow> read_manifest(const std::string &path, bool require_scores);
std::vector<ManifestRow> parse_manifest(const std::string &text, bool require_scores);
void write_manifest(const std::string &path, const std::vector<ManifestRow> &rows);
/// Relative emission paths resolve against the manifest's directory.
std::string resolve_relative(const std::string &manifest_path, const std::string &path);

// GOP feature sets ("GOPF").
struct FeatureFile {
  int vocab_letters = 0;
  double clamp = kDefaultClamp;
  std::vector<GopFeatureSet> records;  // sorted by utt_id
};
FeatureFile read_features(const std::string &path);
FeatureFile parse_features(const std::string &bytes);
/// Records are written sorted by utt_id whatever their input order.
std::string serialize_features(std::vector<GopFeatureSet> records, int vocab_letters, double clamp);
void write_features(const std::string &path, std::vector<GopFeatureSet> records, int vocab_letters,
                    double clamp);

// Predictions CSV: utt_id,p1,p2,p3,p4,p5,pred
PredictionSet read_predictions(const std::string &path);
PredictionSet parse_predictions(const std::string &text);
std::string serialize_predictions(const PredictionSet &preds);
void write_predictions(const std::string &path, const PredictionSet &preds);

// Scorer model (JSON document).
ScorerModel read_model(const std::string &path);
ScorerModel parse_model(const std::string &text);
std::string serialize_model(const ScorerModel &model);
void write_model(const std::string &path, const ScorerModel &model);

// Metrics report (JSON document).
MetricsReport parse_report(const std::string &text);
std::string serialize_report(const MetricsReport &report);
void write_report(const std::string &path, const MetricsReport &report);

// Speaker embeddings ("GOPV") and cluster labels CSV.
EmbeddingSet read_embeddings(const std::string &path);
EmbeddingSet parse_embeddings(const std::string &bytes);
std::string serialize_embeddings(const EmbeddingSet &set);
void write_embeddings(const std::string &path, const EmbeddingSet &set);
std::string serialize_cluster_labels(const std::vector<std::string> &ids,
                                     const std::vector<int> &labels);

// Whole-file helpers.
std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &bytes);

}  // namespace gopctc::io

#endif  // GOPCTC_IO_FORMATS_HPP_
