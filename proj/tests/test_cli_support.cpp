#include <doctest.h>

#include "dreamnet/dreamnet.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dreamnet;
namespace fs = std::filesystem;

TEST_CASE("config files parse keys, values and comments") {
  std::stringstream in("# run file\nseed = 42\n  t-grid=0,1 # inline\n\nout-dir = runs/a\n");
  const auto cfg = parse_config(in);
  CHECK(cfg.size() == 3);
  CHECK(cfg.at("seed") == "42");
  CHECK(cfg.at("t-grid") == "0,1");
  CHECK(cfg.at("out-dir") == "runs/a");
  std::stringstream bad("seed 42\n");
  CHECK_THROWS(parse_config(bad));
}

TEST_CASE("config entries land before the command-line flags") {
  const fs::path file = fs::temp_directory_path() / "dreamnet_test_config.cfg";
  {
    std::ofstream out(file);
    out << "seed = 5\nresolution = 0.01\n";
  }
  const std::vector<std::string> argv{"dreamnet", "capacity", "--config", file.string(), "--seed", "9"};
  const auto merged = merge_config_args(argv);
  REQUIRE(merged.size() == 8);
  CHECK(merged[1] == "capacity");
  CHECK(merged[2] == "--resolution=0.01");
  CHECK(merged[3] == "--seed=5");
  CHECK(merged.back() == "9");
  CHECK(merge_config_args({"dreamnet", "capacity"}) == std::vector<std::string>{"dreamnet", "capacity"});
  CHECK_THROWS(merge_config_args({"dreamnet", "capacity", "--config=/nonexistent/file"}));
  fs::remove(file);
}

TEST_CASE("grids accept lists and inclusive ranges") {
  CHECK(parse_grid("0, 0.5,1") == std::vector<double>{0, 0.5, 1});
  const auto r = parse_grid("0:0.5:0.05");
  REQUIRE(r.size() == 11);
  CHECK(r.back() == doctest::Approx(0.5));
  CHECK(parse_int_list("100,200") == std::vector<int>{100, 200});
  CHECK_THROWS(parse_int_list("1.5"));
  CHECK_THROWS(parse_grid(""));
  CHECK_THROWS(parse_grid("1:0:0.1"));
}

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("manifest is written first and its digests verify") {
  const fs::path dir = fs::temp_directory_path() / "dreamnet_manifest_test";
  fs::remove_all(dir);
  nlohmann::ordered_json params;
  params["n"] = 10;
  params["alpha"] = 0.1;
  RunManifest m("mc", dir, 77, params);
  m.begin();
  {
    std::ifstream in(m.path());
    const auto doc = nlohmann::ordered_json::parse(in);
    CHECK(doc["status"] == "running");
    CHECK(doc["master_seed"] == 77);
    std::vector<std::string> keys;
    for (const auto& [k, v] : doc.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"subcommand", "parameters", "master_seed", "timestamp", "artifact_version",
                                           "status", "outputs"});
  }
  std::string why;
  CHECK_FALSE(verify_manifest(m.path(), &why));
  {
    std::ofstream out(dir / "result.csv");
    out << "a,b\n1,2\n";
  }
  m.add_output(dir / "result.csv");
  m.finish();
  CHECK(verify_manifest(m.path(), &why));
  {
    std::ofstream out(dir / "result.csv", std::ios::app);
    out << "3,4\n";
  }
  CHECK_FALSE(verify_manifest(m.path(), &why));
  CHECK(why.find("result.csv") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("parallel_for keeps index order and propagates errors") {
  std::vector<int> out(50, -1);
  parallel_for(50, 4, [&](int i) { out[i] = i * i; });
  for (int i = 0; i < 50; ++i) CHECK(out[i] == i * i);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](int i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}
