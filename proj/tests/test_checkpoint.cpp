#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lspp/checkpoint.hpp"
#include "lspp/rng.hpp"

using namespace lspp;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("checkpoint: nets survive a JSON round trip bit-exactly") {
  Rng rng(77);
  DenseNet net({4, 9, 9, 2}, rng);
  const Json j = net_to_json(net);
  const DenseNet back = net_from_json(j);

  REQUIRE(back.layer_sizes() == net.layer_sizes());
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    CHECK((back.layers()[i].weight - net.layers()[i].weight).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.layers()[i].bias - net.layers()[i].bias).cwiseAbs().maxCoeff() == 0.0);
  }

  const VectorXd x = rng.normal_vector(4);
  CHECK((net.forward(x) - back.forward(x)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("checkpoint: file IO and version enforcement") {
  const std::string path = temp_path("lspp_ckpt_test.json");
  Json j;
  j["version"] = 1;
  j["model_kind"] = "vae";
  write_json_file(j, path);
  const Json back = read_json_file(path);
  const auto header = checkpoint_header(back);
  CHECK(header.version == 1);
  CHECK(header.model_kind == "vae");

  Json no_version;
  no_version["model_kind"] = "vae";
  CHECK_THROWS(checkpoint_header(no_version));
  std::remove(path.c_str());
}

TEST_CASE("checkpoint: standardizer round trip") {
  Rng rng(78);
  const MatrixXd data = rng.normal_matrix(5, 100);
  const Standardizer s = Standardizer::fit(data);
  const Standardizer back = standardizer_from_json(standardizer_to_json(s));
  CHECK((back.mean() - s.mean()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.std() - s.std()).cwiseAbs().maxCoeff() == 0.0);
}
