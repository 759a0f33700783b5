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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mixsent/checkpoint.hpp"
#include "mixsent/errors.hpp"
#include "mixsent/experiments.hpp"
#include "mixsent/report.hpp"
#include "mixsent/serialize.hpp"
#include "mixsent/synthetic.hpp"

using namespace mixsent;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("mixsent_exp_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConfigResult fake_result(const std::string& dataset, std::size_t index, Method method, std::vector<double> accs) {
  ConfigResult r;
  r.dataset = dataset;
  r.dataset_index = index;
  r.config.method = method;
  r.run_accuracies = accs;
  std::tie(r.mean, r.stddev) = mean_std(accs);
  return r;
}

const char* kDeskSpec = R"({
  "name": "desk",
  "datasets": [
    {"id": "toy", "synthetic": {"train_size": 80, "test_size": 40, "filler_words": 100, "seed": 5}}
  ],
  "base": {"encoder": "cnn", "regime": "RandomTune", "steps": 20, "runs": 2,
           "batch_size": 10, "eval_every": 10, "embedding_dim": 8, "feature_maps": 4},
  "matrix": {"method": ["baseline", "wordMixup", "senMixup"]},
  "desk_scale": {"overrides": {"steps": 10, "runs": 1}}
})";

}  // namespace

TEST_CASE("train config json round trip and errors") {
  TrainConfig c;
  c.method = Method::kSenMixup;
  c.encoder = EncoderKind::kLstm;
  c.alpha = 0.2;
  c.filter_sizes = {2, 3};
  c.l2 = 0.0;
  c.seed = 42;
  TrainConfig back = train_config_from_json(Json::parse(to_json(c).dump()));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.l2 == 0.0);
  CHECK_FALSE(back.dropout.has_value());

  try {
    train_config_from_json(Json{{"stpes", 10}}, "configs[3]");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("configs[3].stpes") != std::string::npos);
  }
  CHECK_THROWS_AS(train_config_from_json(Json{{"steps", -1}}), ConfigError);
  CHECK_THROWS_AS(train_config_from_json(Json{{"method", "cutmix"}}), ConfigError);
  CHECK_THROWS_AS(train_config_from_json(Json{{"filter_sizes", Json::array()}}), ConfigError);
}

TEST_CASE("run result json round trip is exact") {
  RunResult r;
  r.seed = 7;
  r.test_accuracy = 0.1 + 0.2;
  r.step_losses = {1.0 / 3.0, 2.0 / 7.0, 1e-300};
  r.curve_steps = {100};
  r.train_ce = {0.69314718055994529};
  r.test_ce_curve = {std::nextafter(0.5, 1.0)};
  r.dev_accuracy = {0.75};
  r.counters.mixed_batches = 3;
  RunResult back = run_result_from_json(Json::parse(to_json(r).dump()));
  CHECK(back.test_accuracy == r.test_accuracy);
  CHECK(back.step_losses == r.step_losses);
  CHECK(back.test_ce_curve == r.test_ce_curve);
  CHECK(back.counters.mixed_batches == 3);
}

TEST_CASE("content hash is stable and sensitive") {
  Json a{{"x", 1}, {"y", {1, 2}}};
  Json b = Json::parse(R"({"y":[1,2],"x":1})");
  CHECK(content_hash(a) == content_hash(b));
  b["x"] = 2;
  CHECK(content_hash(a) != content_hash(b));
  CHECK(hex64(0xabc) == "0000000000000abc");
  // FNV-1a reference value for the empty object "{}"
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : std::string("{}")) h = (h ^ ch) * 0x100000001b3ULL;
  CHECK(content_hash(Json::object()) == h);
}

TEST_CASE("checkpoint round trip is bit-exact") {
  SyntheticCorpusSpec s;
  s.train_size = 60;
  s.test_size = 20;
  s.filler_words = 80;
  Dataset ds = make_synthetic_dataset(s);
  const auto dir = scratch_dir("ckpt");
  for (EncoderKind enc : {EncoderKind::kCnn, EncoderKind::kLstm}) {
    TrainConfig c;
    c.encoder = enc;
    c.embedding_dim = 6;
    c.feature_maps = 3;
    c.hidden_dim = 5;
    c.steps = 15;
    c.batch_size = 8;
    c.eval_every = 5;
    c.seed = 9;
    Trainer trainer(c, ds, make_split(ds, 0, 10, 0.1, 0));
    trainer.run();
    const auto path = dir / "model.ckpt";
    save_checkpoint(path, trainer.model(), c);
    Checkpoint ck = load_checkpoint(path);
    CHECK(to_json(ck.config) == to_json(c));
    CHECK(ck.model.vocab_size == ds.vocab.size());

    c.seed = 1234;  // different initialization, then overwrite
    Trainer fresh(c, ds, make_split(ds, 0, 10, 0.1, 0));
    restore_parameters(fresh.model(), ck);
    const auto a = trainer.model().parameters();
    const auto b = fresh.model().parameters();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].name == b[i].name);
      CHECK(std::equal(a[i].tensor.data().begin(), a[i].tensor.data().end(), b[i].tensor.data().begin()));
    }
    save_checkpoint(dir / "again.ckpt", fresh.model(), ck.config);
    CHECK(slurp(path) == slurp(dir / "again.ckpt"));
  }

  std::ofstream(dir / "bad.ckpt") << "mixsent-checkpoint 99\n";
  CHECK_THROWS_AS(load_checkpoint(dir / "bad.ckpt"), ParseError);
  CHECK_THROWS_AS(load_checkpoint(dir / "absent.ckpt"), IoError);
}

TEST_CASE("checkpoint shape mismatch is rejected") {
  SyntheticCorpusSpec s;
  s.train_size = 30;
  s.test_size = 10;
  s.filler_words = 50;
  Dataset ds = make_synthetic_dataset(s);
  TrainConfig c;
  c.embedding_dim = 6;
  c.feature_maps = 3;
  c.steps = 0;
  Trainer small(c, ds, make_split(ds, 0, 10, 0.1, 0));
  const auto dir = scratch_dir("ckpt_shape");
  save_checkpoint(dir / "m.ckpt", small.model(), c);
  c.feature_maps = 4;
  Trainer wider(c, ds, make_split(ds, 0, 10, 0.1, 0));
  CHECK_THROWS_AS(restore_parameters(wider.model(), load_checkpoint(dir / "m.ckpt")), DimensionError);
}

TEST_CASE("report cells") {
  CHECK(format_cell(0.9, 0.1) == "90.0±10.00");
  auto three = fake_result("TREC", 0, Method::kBaseline, {0.8, 0.9, 1.0});
  CHECK(format_cell(three.mean, three.stddev) == "90.0±10.00");
  CHECK(format_cell(0.921, 0.0) == "92.1±0.00");

  auto single = build_tables({three});
  REQUIRE(single.size() == 1);
  CHECK(single[0].cells[0][0].best);
  CHECK(single[0].cells[0][0].text == "90.0±10.00");

  // 0.9001 and 0.9004 both display as 90.0
  auto tied = build_tables({fake_result("MR", 0, Method::kBaseline, {0.9001}),
                            fake_result("MR", 0, Method::kWordMixup, {0.9004}),
                            fake_result("MR", 0, Method::kSenMixup, {0.85})});
  CHECK(tied[0].cells[0][0].best);
  CHECK(tied[0].cells[1][0].best);
  CHECK_FALSE(tied[0].cells[2][0].best);

  auto other = fake_result("MR", 0, Method::kBaseline, {0.5});
  other.config.regime = EmbeddingRegime::kRandomFix;
  auto tables = build_tables({three, other, fake_result("MR", 1, Method::kSenMixup, {0.7})});
  REQUIRE(tables.size() == 2);
  CHECK(tables[0].regime == "RandomTune");
  CHECK(tables[0].rows == std::vector<std::string>{"CNN baseline", "CNN senMixup"});
  CHECK(tables[0].datasets == std::vector<std::string>{"TREC", "MR"});
  CHECK_FALSE(tables[0].cells[1][0].present);
  CHECK(render_csv(tables[0]) == "model,TREC,MR\nCNN baseline,90.0±10.00*,\nCNN senMixup,,70.0±0.00*\n");
  const std::string text = render_text(tables);
  CHECK(text.find("Regime: RandomFix") != std::string::npos);
  CHECK(render_text({}) == "no results\n");
  CHECK_THROWS_AS(build_tables({three, three}), DataError);
}

TEST_CASE("curves csv averages the runs") {
  ConfigResult r;
  RunResult a, b;
  a.curve_steps = b.curve_steps = {10, 20};
  a.train_ce = {1.0, 0.5};
  b.train_ce = {0.0, 0.5};
  a.test_ce_curve = {2.0, 1.0};
  b.test_ce_curve = {1.0, 1.0};
  r.runs = {a, b};
  CHECK(curves_csv(r) == "step,train_ce,test_ce\n10,0.5,1.5\n20,0.5,1\n");
}

TEST_CASE("spec parsing errors carry locations") {
  try {
    parse_experiment_spec("{\n  \"name\": \"x\",\n  \"base\": {,}\n}", "s.json");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  try {
    parse_experiment_spec(R"({"datasets": [{"id": "a", "format": "trec", "path": "t"}, {"id": "b", "fromat": "mr"}]})",
                          "s.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("datasets[1].fromat") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_experiment_spec(R"({"datasets": [{"id": "a", "format": "imdb", "path": "x"}]})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"datasets": [{"id": "a"}]})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"matrix": {"steps": []}})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"base": {"batch": 5}})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"desk_scale": {"datasets": {"nope": {}}}})"), ConfigError);

  auto spec = parse_experiment_spec(
      R"({"datasets": [{"id": "a", "synthetic": {}}], "configs": [{"method": "wordMixup", "dropout": 0.5}]})");
  CHECK_THROWS_AS(expand_jobs(spec), ConfigError);
}

TEST_CASE("job expansion, desk scale and hashing") {
  auto spec = parse_experiment_spec(kDeskSpec);
  auto full = expand_jobs(spec);
  REQUIRE(full.size() == 3);
  CHECK(full[0].config.steps == 20);  // block present but not enabled
  CHECK(full[0].config.runs == 2);
  auto desk = expand_jobs(spec, {.desk_scale = true});
  CHECK(desk[0].config.steps == 10);
  CHECK(desk[0].hash != full[0].hash);
  auto again = expand_jobs(parse_experiment_spec(kDeskSpec));
  for (std::size_t i = 0; i < 3; ++i) CHECK(again[i].dir_name == full[i].dir_name);
  auto reseeded = expand_jobs(spec, {.seed = 99});
  CHECK(reseeded[0].config.seed == 99);
  CHECK(reseeded[0].hash != full[0].hash);

  auto no_desk = parse_experiment_spec(R"({"datasets": [{"id": "a", "synthetic": {}}], "configs": [{}]})");
  CHECK_THROWS_AS(expand_jobs(no_desk, {.desk_scale = true}), ConfigError);

  auto matrix = parse_experiment_spec(
      R"({"datasets": [{"id": "a", "synthetic": {}}, {"id": "b", "synthetic": {}}],
          "matrix": {"method": ["baseline", "senMixup"], "encoder": ["cnn", "lstm"]}, "configs": [{"alpha": 0.5}]})");
  CHECK(matrix.configs.size() == 5);
  CHECK(expand_jobs(matrix).size() == 10);
}

TEST_CASE("an empty spec yields an empty report") {
  const auto out = scratch_dir("empty");
  auto spec = parse_experiment_spec(R"({"datasets": [{"id": "TREC", "format": "trec", "path": "nowhere"}]})");
  ExperimentOptions opts;
  opts.overrides.output_dir = out;
  auto summary = run_experiment(spec, opts);
  CHECK(summary.jobs == 0);
  CHECK(summary.tables.empty());
  CHECK(slurp(out / "report.txt") == "no results\n");
}

TEST_CASE("missing inputs are all listed before training") {
  const auto out = scratch_dir("missing");
  auto spec = parse_experiment_spec(R"({
    "datasets": [{"id": "TREC", "format": "trec", "path": "trec"},
                 {"id": "toy", "synthetic": {}},
                 {"id": "MR", "format": "mr", "path": "/definitely/not/here"}],
    "configs": [{"steps": 1}]})");
  ExperimentOptions opts;
  opts.overrides.output_dir = out / "results";
  opts.data_root = out / "data";
  try {
    run_experiment(spec, opts);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("dataset TREC") != std::string::npos);
    CHECK(msg.find("dataset MR") != std::string::npos);
    CHECK(msg.find("toy") == std::string::npos);
  }
  CHECK_FALSE(fs::exists(out / "results"));
}

TEST_CASE("desk run persists results and resumes without training") {
  const auto out = scratch_dir("desk");
  auto spec = parse_experiment_spec(kDeskSpec);
  ExperimentOptions opts;
  opts.overrides.output_dir = out;
  opts.overrides.desk_scale = true;
  opts.mix_log = true;
  auto first = run_experiment(spec, opts);
  CHECK(first.trained == 3);
  REQUIRE(first.tables.size() == 1);
  CHECK(first.tables[0].rows == std::vector<std::string>{"CNN baseline", "CNN wordMixup", "CNN senMixup"});
  CHECK(first.tables[0].datasets == std::vector<std::string>{"toy"});

  auto results = load_results(out);
  REQUIRE(results.size() == 3);
  std::size_t mix_logs = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    if (!entry.is_directory()) continue;
    CHECK(fs::exists(entry.path() / "result.json"));
    CHECK(slurp(entry.path() / "curves.csv").rfind("step,train_ce,test_ce\n10,", 0) == 0);
    for (const auto& f : fs::directory_iterator(entry.path()))
      if (f.path().filename().string().rfind("mixlog_", 0) == 0) ++mix_logs;
  }
  CHECK(mix_logs == 3);
  for (const auto& r : results) {
    CHECK(r.runs.size() == 1);
    CHECK(r.dataset_stats["N"] == 120);
  }

  const std::string report = slurp(out / "report.txt");
  auto second = run_experiment(spec, opts);
  CHECK(second.trained == 0);
  CHECK(second.skipped == 3);
  CHECK(slurp(out / "report.txt") == report);

  fs::remove(out / "report.txt");
  emit_report(out);
  CHECK(slurp(out / "report.txt") == report);

  // a result written for a different key is retrained, not trusted
  auto jobs = expand_jobs(spec, opts.overrides);
  auto stale = read_config_result(out / jobs[0].dir_name);
  stale.key_hash = "0";
  write_config_result(out / jobs[0].dir_name, stale);
  CHECK(run_experiment(spec, opts).trained == 1);
}

TEST_CASE("file-backed dataset under the data root") {
  const auto root = scratch_dir("data_root");
  SyntheticCorpusSpec s;
  s.train_size = 50;
  s.dev_size = 10;
  s.test_size = 20;
  s.filler_words = 60;
  write_generic_tsv(make_synthetic_corpus(s), root / "toy");
  auto spec = parse_experiment_spec(R"({"datasets": [{"id": "toy", "format": "generic-tsv", "path": "toy"}],
      "base": {"steps": 4, "runs": 1, "batch_size": 5, "eval_every": 2, "embedding_dim": 4, "feature_maps": 2},
      "configs": [{"method": "senMixup", "encoder": "lstm", "hidden_dim": 3}]})");
  ExperimentOptions opts;
  opts.data_root = root;
  opts.overrides.output_dir = root / "out";
  auto summary = run_experiment(spec, opts);
  CHECK(summary.trained == 1);
  CHECK(summary.tables[0].rows == std::vector<std::string>{"LSTM senMixup"});
  auto r = load_results(root / "out");
  CHECK(r[0].dataset_stats["test"] == 20);
}
