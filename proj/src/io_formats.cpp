// src/io_formats.cpp

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

#include "gopctc/io_formats.hpp"

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gopctc/errors.hpp"
#include "gopctc/log_math.hpp"

namespace gopctc::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------- files ----

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw FormatError("error reading '" + path + "'");
  return ss.str();
}

void write_file(const std::string &path, const std::string &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("error writing '" + path + "'");
}

namespace {

// ---------------------------------------------------------- byte coding ----

void put_u32(std::string &out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

void put_u64(std::string &out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

void put_f32(std::string &out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }
void put_f64(std::string &out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class ByteReader {
 public:
  ByteReader(const std::string &buf, const char *what) : buf_(buf), what_(what) {}

  void need(std::size_t n) const {
    if (n > buf_.size() - pos_)
      throw FormatError(std::string(what_) + ": truncated at byte " + std::to_string(pos_) +
                        " (need " + std::to_string(n) + " more, have " +
                        std::to_string(buf_.size() - pos_) + ")");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_ + k])) << (8 * k);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + k])) << (8 * k);
    pos_ += 8;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void magic(const char tag[4]) {
    const std::string got = bytes(4);
    if (std::memcmp(got.data(), tag, 4) != 0)
      throw FormatError(std::string(what_) + ": bad magic (expected \"" + std::string(tag, 4) + "\")");
    const std::uint32_t version = u32();
    if (version != kFormatVersion)
      throw FormatError(std::string(what_) + ": unsupported version " + std::to_string(version));
  }
  std::size_t remaining() const { return buf_.size() - pos_; }
  std::size_t pos() const { return pos_; }

 private:
  const std::string &buf_;
  const char *what_;
  std::size_t pos_ = 0;
};

// ----------------------------------------------------------------- text ----

std::vector<std::string> split_lines(const std::string &text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

void check_csv_field(const std::string &field, const char *what) {
  if (field.find_first_of(",\n\r") != std::string::npos)
    throw InvalidInput(std::string(what) + " '" + field + "' contains a comma or newline");
}

std::string line_error(const char *what, std::size_t line, const std::string &msg) {
  return std::string(what) + ": line " + std::to_string(line) + ": " + msg;
}

bool parse_int(const std::string &s, long &out) {
  if (s.empty()) return false;
  char *end = nullptr;
  errno = 0;
  out = std::strtol(s.c_str(), &end, 10);
  return errno == 0 && end == s.c_str() + s.size();
}

bool parse_double(const std::string &s, double &out) {
  if (s.empty()) return false;
  char *end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ----------------------------------------------------------------- utf8 ----

std::vector<char32_t> decode_utf8(const std::string &s) {
  std::vector<char32_t> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      throw InvalidInput("invalid UTF-8 in '" + s + "'");
    }
    if (i + len > s.size()) throw InvalidInput("truncated UTF-8 in '" + s + "'");
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) throw InvalidInput("invalid UTF-8 in '" + s + "'");
      cp = (cp << 6) | (b & 0x3F);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(char32_t cp) {
  std::string s;
  if (cp < 0x80) {
    s.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    s.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    s.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    s.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    s.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return s;
}

char32_t simple_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;  // Latin-1: Æ Ø Å ...
  return cp;
}

}  // namespace

// ------------------------------------------------------------ emissions ----

EmissionMatrix parse_emissions(const std::string &bytes, bool apply_log_softmax) {
  ByteReader r(bytes, "emissions");
  r.magic("GOPE");
  const std::uint32_t t = r.u32();
  const std::uint32_t c = r.u32();
  if (t == 0) throw ValidationError("emissions: zero frames");
  if (c < 2) throw ValidationError("emissions: need at least 2 classes");
  const std::uint64_t count = static_cast<std::uint64_t>(t) * c;
  if (count * 4 != r.remaining())
    throw FormatError("emissions: payload is " + std::to_string(r.remaining()) + " bytes, header says " +
                      std::to_string(count * 4));
  LogMatrix values(t, c);
  for (std::uint32_t i = 0; i < t; ++i)
    for (std::uint32_t j = 0; j < c; ++j) values(i, j) = static_cast<double>(r.f32());
  if (apply_log_softmax) {
    if (values.array().isNaN().any() || (values.array() == std::numeric_limits<double>::infinity()).any())
      throw ValidationError("emissions: NaN or +inf scores");
    return EmissionMatrix::from_scores(std::move(values));
  }
  return EmissionMatrix(std::move(values));
}

EmissionMatrix read_emissions(const std::string &path, bool apply_log_softmax) {
  try {
    return parse_emissions(read_file(path), apply_log_softmax);
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  } catch (const ValidationError &e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string serialize_emissions(const LogMatrix &values) {
  std::string out = "GOPE";
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(values.rows()));
  put_u32(out, static_cast<std::uint32_t>(values.cols()));
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j) put_f32(out, static_cast<float>(values(i, j)));
  return out;
}

void write_emissions(const std::string &path, const LogMatrix &values) {
  write_file(path, serialize_emissions(values));
}

// ---------------------------------------------------------------- vocab ----

Vocab parse_vocab(const std::string &text) {
  std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw FormatError("vocab: empty file");
  if (lines[0] != kBlankToken) throw FormatError("vocab: line 0 must be " + kBlankToken);
  try {
    return Vocab(std::move(lines));
  } catch (const InvalidInput &e) {
    throw FormatError(e.what());
  }
}

Vocab read_vocab(const std::string &path) {
  try {
    return parse_vocab(read_file(path));
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_vocab(const std::string &path, const Vocab &vocab) {
  std::string out;
  for (const auto &tok : vocab.tokens()) out += tok + "\n";
  write_file(path, out);
}

LabelSequence word_to_labels(const std::string &word, const Vocab &vocab) {
  if (word.empty()) throw InvalidInput("word is empty");
  LabelSequence labels;
  for (char32_t cp : decode_utf8(word)) {
    const std::string ch = encode_utf8(simple_lower(cp));
    const int idx = vocab.find(ch);
    if (idx <= kBlank)
      throw VocabularyError("character '" + ch + "' of word '" + word + "' is not in the vocabulary");
    labels.push_back(idx);
  }
  return labels;
}

// ------------------------------------------------------------- manifest ----

std::vector<ManifestRow> parse_manifest(const std::string &text, bool require_scores) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "utt_id,word,score,emission_path")
    throw FormatError("manifest: line 1: header must be utt_id,word,score,emission_path");
  std::vector<ManifestRow> rows;
  std::set<std::string> seen;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto f = split_csv(lines[n]);
    if (f.size() != 4) throw FormatError(line_error("manifest", n + 1, "expected 4 fields"));
    ManifestRow row{f[0], f[1], std::nullopt, f[3]};
    if (row.utt_id.empty()) throw FormatError(line_error("manifest", n + 1, "empty utt_id"));
    if (row.word.empty()) throw FormatError(line_error("manifest", n + 1, "empty word"));
    if (row.emission_path.empty()) throw FormatError(line_error("manifest", n + 1, "empty emission_path"));
    if (!f[2].empty()) {
      long score;
      if (!parse_int(f[2], score) || score < 1 || score > kNumScores)
        throw FormatError(line_error("manifest", n + 1, "score '" + f[2] + "' not an integer in 1..5"));
      row.score = static_cast<int>(score);
    } else if (require_scores) {
      throw FormatError(line_error("manifest", n + 1, "missing score for " + row.utt_id));
    }
    if (!seen.insert(row.utt_id).second)
      throw FormatError(line_error("manifest", n + 1, "duplicate utt_id " + row.utt_id));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ManifestRow> read_manifest(const std::string &path, bool require_scores) {
  try {
    return parse_manifest(read_file(path), require_scores);
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_manifest(const std::string &path, const std::vector<ManifestRow> &rows) {
  std::string out = "utt_id,word,score,emission_path\n";
  for (const auto &r : rows) {
    check_csv_field(r.utt_id, "utt_id");
    check_csv_field(r.word, "word");
    check_csv_field(r.emission_path, "emission_path");
    out += r.utt_id + "," + r.word + "," + (r.score ? std::to_string(*r.score) : "") + "," +
           r.emission_path + "\n";
  }
  write_file(path, out);
}

std::string resolve_relative(const std::string &manifest_path, const std::string &path) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(manifest_path).parent_path() / p).string();
}

// ------------------------------------------------------------- features ----

std::string serialize_features(std::vector<GopFeatureSet> records, int vocab_letters, double clamp) {
  std::sort(records.begin(), records.end(),
            [](const GopFeatureSet &a, const GopFeatureSet &b) { return a.utt_id < b.utt_id; });
  std::string out = "GOPF";
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(vocab_letters));
  put_f64(out, clamp);
  put_u32(out, static_cast<std::uint32_t>(records.size()));
  for (const auto &fs : records) {
    if (fs.vocab_letters() != vocab_letters)
      throw InvalidInput("features: " + fs.utt_id + " has a different vocabulary size");
    const int S = fs.num_letters_in_word();
    put_u32(out, static_cast<std::uint32_t>(fs.utt_id.size()));
    out += fs.utt_id;
    put_u32(out, static_cast<std::uint32_t>(S));
    put_f64(out, fs.lpp);
    for (int i = 0; i < S; ++i)
      for (int j = 0; j < vocab_letters; ++j) put_f64(out, fs.lpr_sub(i, j));
    for (int i = 0; i < S; ++i) put_f64(out, fs.lpr_del(i));
    for (int i = 0; i < S; ++i)
      for (int j = 0; j < vocab_letters; ++j) put_f64(out, fs.letter_onehot(i, j));
  }
  return out;
}

FeatureFile parse_features(const std::string &bytes) {
  ByteReader r(bytes, "features");
  r.magic("GOPF");
  FeatureFile ff;
  const std::uint32_t V = r.u32();
  if (V == 0 || V > 1'000'000) throw FormatError("features: implausible vocabulary size " + std::to_string(V));
  ff.vocab_letters = static_cast<int>(V);
  ff.clamp = r.f64();
  if (!(ff.clamp > 0.0) || !std::isfinite(ff.clamp)) throw FormatError("features: invalid clamp");
  const std::uint32_t count = r.u32();
  std::set<std::string> seen;
  for (std::uint32_t k = 0; k < count; ++k) {
    GopFeatureSet fs;
    fs.clamp = ff.clamp;
    const std::uint32_t id_len = r.u32();
    fs.utt_id = r.bytes(id_len);
    if (fs.utt_id.empty()) throw FormatError("features: record " + std::to_string(k) + " has an empty utt_id");
    if (!seen.insert(fs.utt_id).second) throw FormatError("features: duplicate utt_id " + fs.utt_id);
    const std::uint32_t S = r.u32();
    // Check the whole record fits before allocating.
    r.need(8 * (1 + 2 * static_cast<std::uint64_t>(S) * V + S));
    fs.lpp = r.f64();
    fs.lpr_sub.resize(S, V);
    fs.lpr_del.resize(S);
    fs.letter_onehot.resize(S, V);
    for (std::uint32_t i = 0; i < S; ++i)
      for (std::uint32_t j = 0; j < V; ++j) fs.lpr_sub(i, j) = r.f64();
    for (std::uint32_t i = 0; i < S; ++i) fs.lpr_del(i) = r.f64();
    for (std::uint32_t i = 0; i < S; ++i)
      for (std::uint32_t j = 0; j < V; ++j) fs.letter_onehot(i, j) = r.f64();

    const double c = ff.clamp;
    auto in_range = [c](double v) { return v >= -c && v <= c; };
    if (!in_range(fs.lpp) || !fs.lpr_sub.unaryExpr(in_range).all() || !fs.lpr_del.unaryExpr(in_range).all())
      throw ValidationError("features: " + fs.utt_id + ": GOP value outside [-clamp, clamp]");
    for (std::uint32_t i = 0; i < S; ++i) {
      const auto row = fs.letter_onehot.row(i);
      if (!((row.array() == 0.0) || (row.array() == 1.0)).all() || row.sum() != 1.0)
        throw ValidationError("features: " + fs.utt_id + ": letter one-hot row " + std::to_string(i) +
                              " is not one-hot");
    }
    ff.records.push_back(std::move(fs));
  }
  if (r.remaining() != 0) throw FormatError("features: trailing bytes after last record");
  std::sort(ff.records.begin(), ff.records.end(),
            [](const GopFeatureSet &a, const GopFeatureSet &b) { return a.utt_id < b.utt_id; });
  return ff;
}

FeatureFile read_features(const std::string &path) {
  try {
    return parse_features(read_file(path));
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  } catch (const ValidationError &e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_features(const std::string &path, std::vector<GopFeatureSet> records, int vocab_letters,
                    double clamp) {
  write_file(path, serialize_features(std::move(records), vocab_letters, clamp));
}

// ---------------------------------------------------------- predictions ----

PredictionSet parse_predictions(const std::string &text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "utt_id,p1,p2,p3,p4,p5,pred")
    throw FormatError("predictions: line 1: header must be utt_id,p1,p2,p3,p4,p5,pred");
  PredictionSet out;
  std::set<std::string> seen;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto f = split_csv(lines[n]);
    if (f.size() != 7) throw FormatError(line_error("predictions", n + 1, "expected 7 fields"));
    Prediction p;
    p.utt_id = f[0];
    if (p.utt_id.empty()) throw FormatError(line_error("predictions", n + 1, "empty utt_id"));
    if (!seen.insert(p.utt_id).second)
      throw FormatError(line_error("predictions", n + 1, "duplicate utt_id " + p.utt_id));
    for (int c = 0; c < kNumScores; ++c) {
      double v;
      if (!parse_double(f[1 + c], v) || !(v >= 0.0 && v <= 1.0))
        throw FormatError(line_error("predictions", n + 1, "bad probability '" + f[1 + c] + "'"));
      p.posterior(c) = v;
    }
    if (std::abs(p.posterior.sum() - 1.0) > 1e-6)
      throw FormatError(line_error("predictions", n + 1, "posterior does not sum to 1"));
    long pred;
    if (!parse_int(f[6], pred) || pred < 1 || pred > kNumScores)
      throw FormatError(line_error("predictions", n + 1, "pred '" + f[6] + "' not in 1..5"));
    p.predicted_class = static_cast<int>(pred);
    out.push_back(std::move(p));
  }
  return out;
}

PredictionSet read_predictions(const std::string &path) {
  try {
    return parse_predictions(read_file(path));
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string serialize_predictions(const PredictionSet &preds) {
  std::string out = "utt_id,p1,p2,p3,p4,p5,pred\n";
  for (const auto &p : preds) {
    check_csv_field(p.utt_id, "utt_id");
    out += p.utt_id;
    for (int c = 0; c < kNumScores; ++c) out += "," + format_double(p.posterior(c));
    out += "," + std::to_string(p.predicted_class) + "\n";
  }
  return out;
}

void write_predictions(const std::string &path, const PredictionSet &preds) {
  write_file(path, serialize_predictions(preds));
}

// ---------------------------------------------------------------- model ----

namespace {

json vec_to_json(const Eigen::Ref<const Eigen::VectorXd> &v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd json_to_vec(const json &a, Eigen::Index expected, const char *key) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != expected)
    throw FormatError(std::string("model: '") + key + "' must be an array of " + std::to_string(expected));
  Eigen::VectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) {
    if (!a[i].is_number()) throw FormatError(std::string("model: '") + key + "' has a non-number");
    v(i) = a[i].get<double>();
  }
  return v;
}

}  // namespace

std::string serialize_model(const ScorerModel &m) {
  json j;
  j["format"] = "gopctc-scorer";
  j["version"] = kFormatVersion;
  j["feature_dim"] = m.feature_dim;
  j["vocab_fingerprint"] = m.vocab_fingerprint;
  j["feature_mean"] = vec_to_json(m.feature_mean);
  j["feature_std"] = vec_to_json(m.feature_std);
  json w = json::array();
  for (int c = 0; c < kNumScores; ++c) w.push_back(vec_to_json(m.weights.row(c).transpose()));
  j["weights"] = w;
  j["bias"] = vec_to_json(m.bias);
  j["class_weights"] = vec_to_json(m.class_weights);
  j["best_epoch"] = m.best_epoch;
  j["best_dev_uar"] = m.best_dev_uar;
  json cfg;
  cfg["alpha"] = m.config.alpha;
  cfg["loss"] = to_string(m.config.loss);
  cfg["class_weights"] = to_string(m.config.weight_mode);
  cfg["lr"] = m.config.lr;
  cfg["epochs"] = m.config.epochs;
  cfg["batch_size"] = m.config.batch_size;
  cfg["seed"] = m.config.seed;
  cfg["use_letter_features"] = m.config.use_letter_features;
  j["config"] = cfg;
  return j.dump(2) + "\n";
}

ScorerModel parse_model(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw FormatError(std::string("model: not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "gopctc-scorer") throw FormatError("model: not a gopctc scorer document");
    if (j.at("version").get<std::uint32_t>() != kFormatVersion) throw FormatError("model: unsupported version");
    ScorerModel m;
    m.feature_dim = j.at("feature_dim").get<int>();
    if (m.feature_dim < 4 || m.feature_dim % 2 != 0)
      throw FormatError("model: feature_dim must be 2|V|+2");
    m.vocab_fingerprint = j.at("vocab_fingerprint").get<std::string>();
    m.feature_mean = json_to_vec(j.at("feature_mean"), m.feature_dim, "feature_mean");
    m.feature_std = json_to_vec(j.at("feature_std"), m.feature_dim, "feature_std");
    if ((m.feature_std.array() < kStdFloor).any()) throw ValidationError("model: feature_std below floor");
    const json &w = j.at("weights");
    if (!w.is_array() || w.size() != kNumScores) throw FormatError("model: 'weights' must have 5 rows");
    m.weights.resize(kNumScores, m.feature_dim);
    for (int c = 0; c < kNumScores; ++c)
      m.weights.row(c) = json_to_vec(w[c], m.feature_dim, "weights").transpose();
    m.bias = json_to_vec(j.at("bias"), kNumScores, "bias");
    m.class_weights = json_to_vec(j.at("class_weights"), kNumScores, "class_weights");
    m.best_epoch = j.at("best_epoch").get<int>();
    m.best_dev_uar = j.at("best_dev_uar").get<double>();
    const json &cfg = j.at("config");
    m.config.alpha = cfg.at("alpha").get<double>();
    m.config.loss = parse_loss_kind(cfg.at("loss").get<std::string>());
    const auto mode = cfg.at("class_weights").get<std::string>();
    m.config.weight_mode = mode == "explicit" ? ClassWeightMode::kExplicit : parse_class_weight_mode(mode);
    if (m.config.weight_mode == ClassWeightMode::kExplicit) m.config.explicit_weights = m.class_weights;
    m.config.lr = cfg.at("lr").get<double>();
    m.config.epochs = cfg.at("epochs").get<int>();
    m.config.batch_size = cfg.at("batch_size").get<int>();
    m.config.seed = cfg.at("seed").get<std::uint64_t>();
    m.config.use_letter_features = cfg.at("use_letter_features").get<bool>();
    if (!m.weights.allFinite() || !m.bias.allFinite() || !m.feature_mean.allFinite())
      throw ValidationError("model: non-finite parameters");
    return m;
  } catch (const json::exception &e) {
    throw FormatError(std::string("model: ") + e.what());
  } catch (const InvalidInput &e) {
    throw FormatError(std::string("model: ") + e.what());
  }
}

ScorerModel read_model(const std::string &path) {
  try {
    return parse_model(read_file(path));
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_model(const std::string &path, const ScorerModel &model) {
  write_file(path, serialize_model(model));
}

// --------------------------------------------------------------- report ----

std::string serialize_report(const MetricsReport &rep) {
  json j;
  j["uar"] = rep.uar;
  j["f1_macro"] = rep.f1_macro;
  j["accuracy"] = rep.accuracy;
  j["mae"] = rep.mae;
  json cm = json::array();
  for (int r = 0; r < kNumScores; ++r) {
    json row = json::array();
    for (int p = 0; p < kNumScores; ++p) row.push_back(rep.confusion(r, p));
    cm.push_back(row);
  }
  j["confusion"] = cm;
  json sup = json::array();
  for (int r = 0; r < kNumScores; ++r) sup.push_back(rep.support(r));
  j["support"] = sup;
  return j.dump(2) + "\n";
}

MetricsReport parse_report(const std::string &text) {
  try {
    const json j = json::parse(text);
    MetricsReport rep;
    rep.uar = j.at("uar").get<double>();
    rep.f1_macro = j.at("f1_macro").get<double>();
    rep.accuracy = j.at("accuracy").get<double>();
    rep.mae = j.at("mae").get<double>();
    const json &cm = j.at("confusion");
    const json &sup = j.at("support");
    if (cm.size() != kNumScores || sup.size() != kNumScores) throw FormatError("report: expected 5 classes");
    for (int r = 0; r < kNumScores; ++r) {
      if (cm[r].size() != kNumScores) throw FormatError("report: confusion row must have 5 entries");
      for (int p = 0; p < kNumScores; ++p) rep.confusion(r, p) = cm[r][p].get<long>();
      rep.support(r) = sup[r].get<long>();
    }
    if (rep.confusion.rowwise().sum() != rep.support)
      throw ValidationError("report: confusion row sums differ from support");
    return rep;
  } catch (const json::exception &e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

void write_report(const std::string &path, const MetricsReport &report) {
  write_file(path, serialize_report(report));
}

// ----------------------------------------------------------- embeddings ----

EmbeddingSet parse_embeddings(const std::string &bytes) {
  ByteReader r(bytes, "embeddings");
  r.magic("GOPV");
  const std::uint32_t n = r.u32();
  const std::uint32_t d = r.u32();
  if (d == 0) throw FormatError("embeddings: zero dimension");
  r.need(4 * static_cast<std::uint64_t>(n) * d);
  EmbeddingSet set;
  set.vectors.resize(n, d);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < d; ++j) set.vectors(i, j) = static_cast<double>(r.f32());
  const std::string tail = r.bytes(r.remaining());
  std::size_t start = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::size_t nl = tail.find('\n', start);
    if (nl == std::string::npos)
      throw FormatError("embeddings: expected " + std::to_string(n) + " newline-terminated ids, found " +
                        std::to_string(i));
    set.ids.push_back(tail.substr(start, nl - start));
    if (set.ids.back().empty()) throw FormatError("embeddings: empty id at index " + std::to_string(i));
    start = nl + 1;
  }
  if (start != tail.size()) throw FormatError("embeddings: trailing bytes after ids");
  if (!set.vectors.allFinite()) throw ValidationError("embeddings: NaN or Inf present");
  return set;
}

EmbeddingSet read_embeddings(const std::string &path) {
  try {
    return parse_embeddings(read_file(path));
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  } catch (const ValidationError &e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string serialize_embeddings(const EmbeddingSet &set) {
  if (static_cast<Eigen::Index>(set.ids.size()) != set.vectors.rows())
    throw InvalidInput("embeddings: id count differs from vector count");
  std::string out = "GOPV";
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(set.vectors.rows()));
  put_u32(out, static_cast<std::uint32_t>(set.vectors.cols()));
  for (Eigen::Index i = 0; i < set.vectors.rows(); ++i)
    for (Eigen::Index j = 0; j < set.vectors.cols(); ++j) put_f32(out, static_cast<float>(set.vectors(i, j)));
  for (const auto &id : set.ids) {
    if (id.find('\n') != std::string::npos) throw InvalidInput("embeddings: id contains a newline");
    out += id + "\n";
  }
  return out;
}

void write_embeddings(const std::string &path, const EmbeddingSet &set) {
  write_file(path, serialize_embeddings(set));
}

std::string serialize_cluster_labels(const std::vector<std::string> &ids, const std::vector<int> &labels) {
  if (ids.size() != labels.size()) throw InvalidInput("cluster labels: size mismatch");
  std::string out = "utt_id,cluster\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    check_csv_field(ids[i], "utt_id");
    out += ids[i] + "," + std::to_string(labels[i]) + "\n";
  }
  return out;
}

}  // namespace gopctc::io
