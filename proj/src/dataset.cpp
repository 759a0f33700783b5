// Copyright 2026 The mixsent Authors. All Rights Reserved.
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

#include "mixsent/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>

#include "mixsent/errors.hpp"
#include "mixsent/rng.hpp"

namespace mixsent {

namespace fs = std::filesystem;

namespace {

struct LabeledLine {
  std::string label;
  std::string text;
  std::size_t line = 0;
};

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<LabeledLine> read_tsv(const fs::path& path) {
  std::vector<LabeledLine> out;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (blank(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path.string(), i + 1, "expected <label><TAB><text>");
    std::string label = line.substr(0, tab);
    if (label.empty()) throw ParseError(path.string(), i + 1, "empty label");
    out.push_back({std::move(label), line.substr(tab + 1), i + 1});
  }
  return out;
}

std::optional<std::size_t> as_index(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(std::stoull(s));
}

std::vector<RawExample> with_label(const std::vector<std::string>& lines, std::size_t label) {
  std::vector<RawExample> out;
  for (const auto& l : lines)
    if (!blank(l)) out.push_back({label, l, Origin::kSentence});
  return out;
}

fs::path require_file(const fs::path& dir, const std::string& name) {
  fs::path p = dir / name;
  if (!fs::exists(p)) throw IoError("missing file " + p.string());
  return p;
}

std::vector<RawExample> read_trec(const fs::path& path, const std::vector<std::string>& classes) {
  std::vector<RawExample> out;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (blank(line)) continue;
    const auto colon = line.find(':');
    const auto space = line.find(' ');
    if (colon == std::string::npos || space == std::string::npos || colon > space) {
      throw ParseError(path.string(), i + 1, "expected COARSE:fine question");
    }
    const std::string coarse = line.substr(0, colon);
    auto it = std::find(classes.begin(), classes.end(), coarse);
    if (it == classes.end()) throw DataError(path.string() + ":" + std::to_string(i + 1) + ": unknown label " + coarse);
    out.push_back({static_cast<std::size_t>(it - classes.begin()), line.substr(space + 1), Origin::kSentence});
  }
  return out;
}

// Integer labels are taken as ids; otherwise strings get ids in first-seen order.
std::vector<std::vector<RawExample>> resolve_labels(const std::vector<std::pair<fs::path, std::vector<LabeledLine>>>& files,
                                                    std::vector<std::string>& names, std::size_t declared,
                                                    Origin origin_of_last = Origin::kSentence,
                                                    bool last_is_phrase = false) {
  bool numeric = true;
  for (const auto& [path, lines] : files)
    for (const auto& l : lines) numeric = numeric && as_index(l.label).has_value();
  std::map<std::string, std::size_t> seen;
  std::vector<std::vector<RawExample>> out;
  for (std::size_t f = 0; f < files.size(); ++f) {
    const auto& [path, lines] = files[f];
    std::vector<RawExample> split;
    const Origin origin = (last_is_phrase && f + 1 == files.size()) ? origin_of_last : Origin::kSentence;
    for (const auto& l : lines) {
      std::size_t label;
      if (numeric) {
        label = *as_index(l.label);
      } else {
        auto [it, inserted] = seen.try_emplace(l.label, seen.size());
        if (inserted) names.push_back(l.label);
        label = it->second;
      }
      if (declared != 0 && label >= declared) {
        throw DataError(path.string() + ":" + std::to_string(l.line) + ": label " + l.label +
                        " outside [0," + std::to_string(declared) + ")");
      }
      split.push_back({label, l.text, origin});
    }
    out.push_back(std::move(split));
  }
  if (numeric) {
    std::size_t mx = 0;
    for (const auto& s : out)
      for (const auto& e : s) mx = std::max(mx, e.label + 1);
    const std::size_t c = declared != 0 ? declared : mx;
    names.clear();
    for (std::size_t k = 0; k < c; ++k) names.push_back(std::to_string(k));
  }
  return out;
}

Dataset load_sst(const fs::path& dir, std::size_t classes, const std::string& name) {
  std::vector<std::pair<fs::path, std::vector<LabeledLine>>> files;
  for (const char* split : {"train.tsv", "dev.tsv", "test.tsv"}) {
    auto p = require_file(dir, split);
    files.emplace_back(p, read_tsv(p));
  }
  const fs::path phrases = dir / "phrases.tsv";
  const bool has_phrases = fs::exists(phrases);
  if (has_phrases) files.emplace_back(phrases, read_tsv(phrases));
  std::vector<std::string> names;
  auto splits = resolve_labels(files, names, classes, Origin::kPhrase, has_phrases);
  auto train = std::move(splits[0]);
  if (has_phrases) train.insert(train.end(), splits[3].begin(), splits[3].end());
  Dataset ds = build_dataset(name, classes, std::move(train), std::move(splits[1]), std::move(splits[2]), false);
  return ds;
}

}  // namespace

DatasetFormat parse_format(const std::string& name) {
  if (name == "trec") return DatasetFormat::kTrec;
  if (name == "mr") return DatasetFormat::kMr;
  if (name == "sst1") return DatasetFormat::kSst1;
  if (name == "sst2") return DatasetFormat::kSst2;
  if (name == "subj") return DatasetFormat::kSubj;
  if (name == "generic-tsv") return DatasetFormat::kGenericTsv;
  throw ConfigError("unknown dataset format '" + name + "'");
}

std::string format_name(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::kTrec: return "trec";
    case DatasetFormat::kMr: return "mr";
    case DatasetFormat::kSst1: return "sst1";
    case DatasetFormat::kSst2: return "sst2";
    case DatasetFormat::kSubj: return "subj";
    case DatasetFormat::kGenericTsv: return "generic-tsv";
  }
  return "unknown";
}

std::size_t Dataset::num_sentences() const {
  std::size_t n = 0;
  for (const auto* split : {&train, &dev, &test})
    for (const auto& e : *split) n += e.origin == Origin::kSentence;
  return n;
}

double Dataset::mean_sentence_length() const {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto* split : {&train, &dev, &test})
    for (const auto& e : *split)
      if (e.origin == Origin::kSentence) {
        total += static_cast<double>(e.length);
        ++n;
      }
  return n ? total / static_cast<double>(n) : 0.0;
}

bool Dataset::operator==(const Dataset& o) const {
  return name == o.name && num_classes == o.num_classes && label_names == o.label_names && vocab == o.vocab &&
         train == o.train && dev == o.dev && test == o.test && max_len == o.max_len &&
         cross_validation == o.cross_validation;
}

Dataset build_dataset(std::string name, std::size_t num_classes, std::vector<RawExample> train,
                      std::vector<RawExample> dev, std::vector<RawExample> test, bool cross_validation) {
  Dataset ds;
  ds.name = std::move(name);
  ds.cross_validation = cross_validation;

  struct Tokenized {
    std::vector<std::string> tokens;
    std::size_t label;
    Origin origin;
  };
  auto tokenize_all = [&ds](std::vector<RawExample>& raw) {
    std::vector<Tokenized> out;
    out.reserve(raw.size());
    for (auto& r : raw) {
      auto toks = tokenize(r.text);
      if (!toks) {
        ++ds.skipped_lines;
        continue;
      }
      out.push_back({std::move(*toks), r.label, r.origin});
    }
    return out;
  };
  auto tr = tokenize_all(train);
  auto dv = tokenize_all(dev);
  auto te = tokenize_all(test);
  if (tr.empty()) throw DataError(ds.name + ": no training examples");

  std::size_t max_label = 0;
  for (const auto* split : {&tr, &dv, &te})
    for (const auto& e : *split) max_label = std::max(max_label, e.label + 1);
  ds.num_classes = num_classes != 0 ? num_classes : max_label;
  if (max_label > ds.num_classes) {
    throw DataError(ds.name + ": label " + std::to_string(max_label - 1) + " outside [0," +
                    std::to_string(ds.num_classes) + ")");
  }
  for (std::size_t k = 0; k < ds.num_classes; ++k) ds.label_names.push_back(std::to_string(k));

  for (const auto* split : {&tr, &dv, &te})
    for (const auto& e : *split)
      for (const auto& t : e.tokens) ds.vocab.add(t);

  std::size_t longest = 0;
  for (const auto& e : tr) longest = std::max(longest, e.tokens.size());
  ds.max_len = std::max(longest, kMinPadLength);

  auto encode_all = [&ds](const std::vector<Tokenized>& src, std::vector<Example>& dst) {
    dst.reserve(src.size());
    for (const auto& e : src) {
      auto seq = encode_and_pad(e.tokens, ds.vocab, ds.max_len);
      ds.truncated += seq.truncated;
      dst.push_back({std::move(seq.ids), seq.length, e.label, e.origin});
    }
  };
  encode_all(tr, ds.train);
  encode_all(dv, ds.dev);
  encode_all(te, ds.test);
  return ds;
}

Dataset load_dataset(const fs::path& path, DatasetFormat format) {
  if (!fs::exists(path)) throw IoError("dataset path does not exist: " + path.string());
  switch (format) {
    case DatasetFormat::kTrec: {
      const std::vector<std::string> classes{"ABBR", "DESC", "ENTY", "HUM", "LOC", "NUM"};
      auto train = read_trec(require_file(path, "train_5500.label"), classes);
      auto test = read_trec(require_file(path, "TREC_10.label"), classes);
      Dataset ds = build_dataset("trec", classes.size(), std::move(train), {}, std::move(test), false);
      ds.label_names = classes;
      return ds;
    }
    case DatasetFormat::kMr: {
      auto neg = with_label(read_lines(require_file(path, "rt-polarity.neg")), 0);
      auto pos = with_label(read_lines(require_file(path, "rt-polarity.pos")), 1);
      neg.insert(neg.end(), pos.begin(), pos.end());
      Dataset ds = build_dataset("mr", 2, std::move(neg), {}, {}, true);
      ds.label_names = {"negative", "positive"};
      return ds;
    }
    case DatasetFormat::kSubj: {
      auto obj = with_label(read_lines(require_file(path, "plot.tok.gt9.5000")), 0);
      auto subj = with_label(read_lines(require_file(path, "quote.tok.gt9.5000")), 1);
      obj.insert(obj.end(), subj.begin(), subj.end());
      Dataset ds = build_dataset("subj", 2, std::move(obj), {}, {}, true);
      ds.label_names = {"objective", "subjective"};
      return ds;
    }
    case DatasetFormat::kSst1: {
      Dataset ds = load_sst(path, 5, "sst1");
      ds.label_names = {"very negative", "negative", "neutral", "positive", "very positive"};
      return ds;
    }
    case DatasetFormat::kSst2: {
      Dataset ds = load_sst(path, 2, "sst2");
      ds.label_names = {"negative", "positive"};
      return ds;
    }
    case DatasetFormat::kGenericTsv: {
      std::vector<std::pair<fs::path, std::vector<LabeledLine>>> files;
      bool cv = true;
      if (fs::is_directory(path)) {
        auto tp = require_file(path, "train.tsv");
        files.emplace_back(tp, read_tsv(tp));
        for (const char* name : {"dev.tsv", "test.tsv"}) {
          const auto p = path / name;
          files.emplace_back(p, fs::exists(p) ? read_tsv(p) : std::vector<LabeledLine>{});
        }
        cv = files[2].second.empty();
      } else {
        files.emplace_back(path, read_tsv(path));
      }
      std::vector<std::string> names;
      auto splits = resolve_labels(files, names, 0);
      splits.resize(3);
      if (cv) {
        splits[0].insert(splits[0].end(), splits[1].begin(), splits[1].end());
        splits[1].clear();
      }
      Dataset ds = build_dataset(path.stem().string(), names.size(), std::move(splits[0]), std::move(splits[1]),
                                 std::move(splits[2]), cv);
      ds.label_names = names;
      return ds;
    }
  }
  throw ConfigError("unhandled dataset format");
}

std::vector<Fold> split_folds(std::size_t n, std::size_t k, double dev_fraction, std::uint64_t seed) {
  if (k == 0 || k > n) {
    throw ConfigError("cannot split " + std::to_string(n) + " examples into " + std::to_string(k) + " folds");
  }
  if (dev_fraction < 0.0 || dev_fraction >= 1.0) throw ConfigError("dev fraction must lie in [0,1)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::stream(seed, 0xF01D);
  std::shuffle(order.begin(), order.end(), rng.engine());

  std::vector<Fold> folds(k);
  std::size_t offset = 0;
  std::vector<std::size_t> bounds{0};
  for (std::size_t f = 0; f < k; ++f) {
    offset += n / k + (f < n % k ? 1 : 0);
    bounds.push_back(offset);
  }
  for (std::size_t f = 0; f < k; ++f) {
    Fold& fold = folds[f];
    fold.test.assign(order.begin() + static_cast<std::ptrdiff_t>(bounds[f]),
                     order.begin() + static_cast<std::ptrdiff_t>(bounds[f + 1]));
    std::vector<std::size_t> rest;
    rest.reserve(n - fold.test.size());
    rest.insert(rest.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(bounds[f]));
    rest.insert(rest.end(), order.begin() + static_cast<std::ptrdiff_t>(bounds[f + 1]), order.end());
    const auto n_dev = static_cast<std::size_t>(std::llround(dev_fraction * static_cast<double>(rest.size())));
    fold.dev.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_dev));
    fold.train.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_dev), rest.end());
  }
  return folds;
}

std::vector<Fold> split_folds(const Dataset& dataset, std::size_t k, double dev_fraction, std::uint64_t seed) {
  if (!dataset.cross_validation && !dataset.dev.empty()) {
    throw ConfigError(dataset.name + " has standard dev/test splits; folds apply to CV corpora only");
  }
  return split_folds(dataset.train.size(), k, dev_fraction, seed);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> carve_dev(std::size_t n, double dev_fraction,
                                                                        std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::stream(seed, 0xDE7);
  std::shuffle(order.begin(), order.end(), rng.engine());
  const auto n_dev = static_cast<std::size_t>(std::llround(dev_fraction * static_cast<double>(n)));
  std::vector<std::size_t> dev(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_dev));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_dev), order.end());
  return {std::move(train), std::move(dev)};
}

SplitView make_split(const Dataset& dataset, std::size_t fold, std::size_t k, double dev_fraction,
                     std::uint64_t seed) {
  SplitView view;
  auto pick = [](const std::vector<Example>& src, const std::vector<std::size_t>& idx) {
    std::vector<Example> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(src[i]);
    return out;
  };
  if (dataset.cross_validation) {
    auto folds = split_folds(dataset, k, dev_fraction, seed);
    const Fold& f = folds.at(fold);
    view.train = pick(dataset.train, f.train);
    view.dev = pick(dataset.train, f.dev);
    view.test = pick(dataset.train, f.test);
    return view;
  }
  view.test = dataset.test;
  if (!dataset.dev.empty()) {
    view.train = dataset.train;
    view.dev = dataset.dev;
  } else {
    auto [tr, dv] = carve_dev(dataset.train.size(), dev_fraction, seed);
    view.train = pick(dataset.train, tr);
    view.dev = pick(dataset.train, dv);
  }
  // Phrase-level examples are training material only.
  std::erase_if(view.dev, [](const Example& e) { return e.origin == Origin::kPhrase; });
  return view;
}

void subsample_train(SplitView& split, std::size_t n, std::uint64_t seed) {
  if (split.train.size() <= n) return;
  Rng rng = Rng::stream(seed, 0x5AB);
  std::vector<std::size_t> order(split.train.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());
  order.resize(n);
  std::sort(order.begin(), order.end());
  std::vector<Example> kept;
  kept.reserve(n);
  for (auto i : order) kept.push_back(split.train[i]);
  split.train = std::move(kept);
}

}  // namespace mixsent
