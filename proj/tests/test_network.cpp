#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>

#include "dsg/network.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace dsg;

namespace {

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "dsg_network_tests";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("two-layer net round-trips") {
  Rng rng(5);
  FeedForwardNet net(std::vector<Layer>{
      Layer{oracles::random_matrix(3, 4, rng), Activation::tanh_sigmoid},
      Layer{oracles::random_matrix(2, 3, rng), Activation::log_sigmoid}});
  auto path = temp_dir() / "model.net";
  save_network(net, path);
  REQUIRE(load_network(path) == net);
}

TEST_CASE("construction rejects chained-dimension violations") {
  Rng rng(6);
  REQUIRE_THROWS_AS(
      FeedForwardNet(std::vector<Layer>{
          Layer{oracles::random_matrix(3, 4, rng), Activation::tanh_sigmoid},
          Layer{oracles::random_matrix(2, 5, rng), Activation::identity}}),
      structure_error);
}

TEST_CASE("loading a net with mismatched layer dims is a structure error") {
  auto dir = temp_dir();
  Rng rng(7);
  save_matrix(oracles::random_matrix(3, 4, rng), dir / "a.dmat");
  save_matrix(oracles::random_matrix(2, 5, rng), dir / "b.dmat");
  auto path = dir / "broken.net";
  {
    std::ofstream out(path);
    out << "layer 1 weights=a.dmat activation=tanh-sigmoid\n";
    out << "layer 2 weights=b.dmat activation=identity\n";
  }
  REQUIRE_THROWS_AS(load_network(path), structure_error);
}

TEST_CASE("unknown activation tag is a parse error") {
  auto dir = temp_dir();
  Rng rng(8);
  save_matrix(oracles::random_matrix(3, 4, rng), dir / "c.dmat");
  auto path = dir / "relu.net";
  {
    std::ofstream out(path);
    out << "layer 1 weights=c.dmat activation=relu\n";
  }
  REQUIRE_THROWS_AS(load_network(path), parse_error);
}

TEST_CASE("property: random nets round-trip exactly") {
  auto dir = temp_dir();
  Rng rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    std::size_t depth = 1 + rng.uniform_int(0, 2);
    std::vector<Layer> layers;
    std::size_t in = 2 + rng.uniform_int(0, 4);
    for (std::size_t k = 0; k < depth; ++k) {
      std::size_t out_dim = 2 + rng.uniform_int(0, 4);
      auto act = static_cast<Activation>(rng.uniform_int(0, 2));
      layers.push_back(Layer{oracles::random_matrix(out_dim, in, rng), act});
      in = out_dim;
    }
    FeedForwardNet net(std::move(layers));
    auto path = dir / "prop.net";
    save_network(net, path);
    REQUIRE(load_network(path) == net);
  }
}
