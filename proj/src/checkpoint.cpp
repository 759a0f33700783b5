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

#include "mixsent/checkpoint.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mixsent/errors.hpp"
#include "mixsent/serialize.hpp"

namespace mixsent {

namespace {

Json model_json(const ModelConfig& m) {
  return {{"encoder", encoder_name(m.encoder)}, {"vocab_size", m.vocab_size},   {"embedding_dim", m.embedding_dim},
          {"num_classes", m.num_classes},       {"filter_sizes", m.filter_sizes}, {"feature_maps", m.feature_maps},
          {"hidden_dim", m.hidden_dim}};
}

ModelConfig model_from_json(const Json& j) {
  ModelConfig m;
  m.encoder = parse_encoder(j.at("encoder").get<std::string>());
  m.vocab_size = j.at("vocab_size").get<std::size_t>();
  m.embedding_dim = j.at("embedding_dim").get<std::size_t>();
  m.num_classes = j.at("num_classes").get<std::size_t>();
  m.filter_sizes = j.at("filter_sizes").get<std::vector<std::size_t>>();
  m.feature_maps = j.at("feature_maps").get<std::size_t>();
  m.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  return m;
}

std::string prefixed(std::istream& in, const std::string& tag, const std::string& src, std::size_t& line_no) {
  std::string line;
  ++line_no;
  if (!std::getline(in, line) || line.rfind(tag + " ", 0) != 0)
    throw ParseError(src, line_no, "expected '" + tag + "' line");
  return line.substr(tag.size() + 1);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model& model, const TrainConfig& config) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << "mixsent-checkpoint " << kCheckpointVersion << "\n";
  out << "config " << to_json(config).dump() << "\n";
  out << "model " << model_json(model.config()).dump() << "\n";
  out << std::hexfloat;
  for (const auto& p : model.parameters()) {
    out << "tensor " << p.name << " " << shape_str(p.tensor.shape()) << "\n";
    bool first = true;
    for (double v : p.tensor.data()) {
      out << (first ? "" : " ") << v;
      first = false;
    }
    out << "\n";
  }
  out << "end\n";
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  const std::string src = path.string();
  std::size_t line_no = 0;
  const std::string version = prefixed(in, "mixsent-checkpoint", src, line_no);
  if (version != std::to_string(kCheckpointVersion))
    throw ParseError(src, line_no, "unsupported checkpoint version " + version);
  Checkpoint ck;
  try {
    ck.config = train_config_from_json(Json::parse(prefixed(in, "config", src, line_no)));
    ck.model = model_from_json(Json::parse(prefixed(in, "model", src, line_no)));
  } catch (const Json::exception& e) {
    throw ParseError(src, line_no, e.what());
  } catch (const ConfigError& e) {
    throw ParseError(src, line_no, e.what());
  }
  std::string line;
  while (true) {
    ++line_no;
    if (!std::getline(in, line)) throw ParseError(src, line_no, "missing 'end' line");
    if (line == "end") break;
    std::istringstream head(line);
    std::string tag, name, shape_text;
    if (!(head >> tag >> name >> shape_text) || tag != "tensor") throw ParseError(src, line_no, "expected tensor header");
    Shape shape;
    std::string digits;
    for (char ch : shape_text) {
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        digits += ch;
      } else if (!digits.empty()) {
        shape.push_back(std::stoul(digits));
        digits.clear();
      }
    }
    if (!digits.empty()) shape.push_back(std::stoul(digits));
    ++line_no;
    if (!std::getline(in, line)) throw ParseError(src, line_no, "missing values for " + name);
    std::vector<double> values;
    values.reserve(shape_size(shape));
    const char* p = line.c_str();
    while (*p) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw ParseError(src, line_no, "bad value in " + name);
      values.push_back(v);
      p = end;
      while (*p == ' ') ++p;
    }
    if (values.size() != shape_size(shape)) throw ParseError(src, line_no, "value count mismatch for " + name);
    ck.tensors.push_back({name, Tensor::from(shape, std::move(values))});
  }
  return ck;
}

void restore_parameters(Model& model, const Checkpoint& checkpoint) {
  auto params = model.parameters();
  if (params.size() != checkpoint.tensors.size())
    throw DimensionError("checkpoint holds " + std::to_string(checkpoint.tensors.size()) + " tensors, model has " +
                         std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& src = checkpoint.tensors[i];
    if (src.name != params[i].name || src.tensor.shape() != params[i].tensor.shape())
      throw DimensionError("checkpoint tensor " + src.name + " " + shape_str(src.tensor.shape()) + " does not match " +
                           params[i].name + " " + shape_str(params[i].tensor.shape()));
    auto dst = params[i].tensor.mutable_data();
    std::copy(src.tensor.data().begin(), src.tensor.data().end(), dst.begin());
  }
}

}  // namespace mixsent
