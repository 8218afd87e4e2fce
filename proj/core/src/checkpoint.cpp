#include "lspp/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

namespace lspp {

Json net_to_json(const DenseNet& net) {
  Json j;
  j["layer_sizes"] = net.layer_sizes();
  Json acts = Json::array();
  for (Activation a : net.activations())
    acts.push_back(a == Activation::kElu ? "elu" : "identity");
  j["activations"] = std::move(acts);
  Json params = Json::array();
  for (const auto& layer : net.layers()) {
    Json w = Json::array();
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) row.push_back(layer.weight(r, c));
      w.push_back(std::move(row));
    }
    Json b = Json::array();
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) b.push_back(layer.bias[i]);
    params.push_back(Json{{"weight", std::move(w)}, {"bias", std::move(b)}});
  }
  j["params"] = std::move(params);
  return j;
}

DenseNet net_from_json(const Json& j) {
  const std::vector<int> sizes = j.at("layer_sizes").get<std::vector<int>>();
  Rng dummy(0);
  std::vector<Activation> acts;
  if (j.contains("activations")) {
    for (const auto& a : j.at("activations")) {
      const std::string name = a.get<std::string>();
      if (name == "elu")
        acts.push_back(Activation::kElu);
      else if (name == "identity")
        acts.push_back(Activation::kIdentity);
      else
        throw std::runtime_error("checkpoint: unknown activation '" + name + "'");
    }
  }
  DenseNet net = acts.empty() ? DenseNet(sizes, dummy) : DenseNet(sizes, acts, dummy);
  const Json& params = j.at("params");
  if (params.size() != net.layers().size())
    throw std::runtime_error("checkpoint: layer count mismatch");
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    auto& layer = net.layers()[i];
    const Json& w = params[i].at("weight");
    if (static_cast<Eigen::Index>(w.size()) != layer.weight.rows())
      throw std::runtime_error("checkpoint: weight row count mismatch");
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      const Json& row = w[r];
      if (static_cast<Eigen::Index>(row.size()) != layer.weight.cols())
        throw std::runtime_error("checkpoint: weight column count mismatch");
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = row[c].get<double>();
    }
    const Json& b = params[i].at("bias");
    if (static_cast<Eigen::Index>(b.size()) != layer.bias.size())
      throw std::runtime_error("checkpoint: bias size mismatch");
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias[r] = b[r].get<double>();
  }
  return net;
}

Json standardizer_to_json(const Standardizer& s) {
  return Json{{"mean", vector_to_json(s.mean())}, {"std", vector_to_json(s.std())}};
}

Standardizer standardizer_from_json(const Json& j) {
  return Standardizer(vector_from_json(j.at("mean")), vector_from_json(j.at("std")));
}

Json vector_to_json(const VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

VectorXd vector_from_json(const Json& j) {
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

void write_json_file(const Json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(1, '\t') << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  Json j;
  in >> j;
  return j;
}

CheckpointHeader checkpoint_header(const Json& j) {
  CheckpointHeader h;
  if (!j.contains("version")) throw std::runtime_error("checkpoint: missing version field");
  h.version = j.at("version").get<int>();
  h.model_kind = j.value("model_kind", "");
  return h;
}

}  // namespace lspp
