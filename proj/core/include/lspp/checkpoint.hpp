#ifndef LSPP_CHECKPOINT_HPP_
#define LSPP_CHECKPOINT_HPP_

#include <string>

#include <json.hpp>

#include "lspp/nn.hpp"

namespace lspp {

/// Checkpoints are a single JSON document: header fields first (version,
/// model_kind, architecture, seed, standardizer stats, training config, GECO
/// state where applicable), then the nested parameter arrays. Field order is
/// preserved so the file reads header-then-params; doubles are written with
/// round-trip precision.
using Json = nlohmann::ordered_json;

Json net_to_json(const DenseNet& net);
DenseNet net_from_json(const Json& j);

Json standardizer_to_json(const Standardizer& s);
Standardizer standardizer_from_json(const Json& j);

Json vector_to_json(const VectorXd& v);
VectorXd vector_from_json(const Json& j);

void write_json_file(const Json& j, const std::string& path);
Json read_json_file(const std::string& path);

/// Reads only the mandatory header fields; throws on missing version.
struct CheckpointHeader {
  int version = 0;
  std::string model_kind;
};
CheckpointHeader checkpoint_header(const Json& j);

}  // namespace lspp

#endif  // LSPP_CHECKPOINT_HPP_
