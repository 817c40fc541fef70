#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mtkit/errors.hpp"
#include "mtkit/manifest.hpp"
#include "mtkit/parallel.hpp"
#include "mtkit/rng.hpp"

using namespace mtkit;

TEST_CASE("rng streams are deterministic and seed derivation separates tasks") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  CHECK(derive_seed(1, "task-a", 0, 0) != derive_seed(1, "task-b", 0, 0));
  CHECK(derive_seed(1, "task-a", 0, 0) != derive_seed(1, "task-a", 1, 0));
  CHECK(derive_seed(1, "task-a", 0, 0) != derive_seed(1, "task-a", 0, 1));
  CHECK(derive_seed(1, "task-a", 3, 4) == derive_seed(1, "task-a", 3, 4));
}

TEST_CASE("bounded sampling stays in range and permutations are complete") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) CHECK(rng.below(13) < 13);
  auto perm = rng.permutation(50);
  std::vector<bool> seen(50, false);
  for (auto idx : perm) {
    CHECK(idx < 50);
    CHECK_FALSE(seen[idx]);
    seen[idx] = true;
  }
}

TEST_CASE("parallel_map preserves input order for any worker count") {
  auto square = [](std::size_t i) { return i * i; };
  auto serial = parallel_map(500, 1, square);
  for (unsigned workers : {2u, 4u, 8u}) {
    auto parallel = parallel_map(500, workers, square);
    CHECK(parallel == serial);
  }
}

TEST_CASE("manifest records inputs, params, seed and hashes") {
  auto dir = std::filesystem::temp_directory_path() / "mtkit_manifest_test";
  std::filesystem::create_directories(dir);
  auto input = (dir / "in.txt").string();
  auto output = (dir / "out.txt").string();
  {
    std::ofstream f(input);
    f << "payload\n";
    std::ofstream g(output);
    g << "result\n";
  }
  Manifest manifest("demo-subcommand");
  manifest.seed(99);
  manifest.param("threshold", 0.75);
  manifest.param("n", std::uint64_t{42});
  manifest.input(input);
  manifest.output(output);
  auto path = (dir / "run.manifest").string();
  manifest.write(path);

  std::ifstream in(path);
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(contents.find("subcommand demo-subcommand") != std::string::npos);
  CHECK(contents.find("seed 99") != std::string::npos);
  CHECK(contents.find("param threshold=0.75") != std::string::npos);
  CHECK(contents.find("param n=42") != std::string::npos);
  CHECK(contents.find("fnv64=") != std::string::npos);

  auto h1 = hash_file(input);
  {
    std::ofstream f(input);
    f << "different payload\n";
  }
  CHECK(hash_file(input) != h1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("config file parsing with flag precedence left to the caller") {
  auto dir = std::filesystem::temp_directory_path() / "mtkit_config_test";
  std::filesystem::create_directories(dir);
  auto path = (dir / "run.ini").string();
  {
    std::ofstream f(path);
    f << "# comment line\n"
      << "seed = 17\n"
      << "threshold=0.5 ; trailing comment\n"
      << "[section headers are skipped]\n"
      << "name = value with spaces\n";
  }
  auto config = load_config_file(path);
  CHECK(config.at("seed") == "17");
  CHECK(config.at("threshold") == "0.5");
  CHECK(config.at("name") == "value with spaces");
  CHECK(config.size() == 3);

  {
    std::ofstream f(path);
    f << "not a key value line\n";
  }
  CHECK_THROWS_AS(load_config_file(path), FormatError);
  std::filesystem::remove_all(dir);
}
