// Generates random chain models for benchmarks and examples, and sanity-checks
// existing model files. `gen` writes a seeded random chain; `check` loads a
// file through the full validation path and reports what it found.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include <pardyn/model.hpp>

int main(int argc, char** argv) {
  CLI::App app{"Chain model files: generate and validate"};
  app.require_subcommand(1);

  int n_links = 0;
  std::uint64_t seed = 1;
  std::string out_path;
  CLI::App* gen = app.add_subcommand("gen", "Write a seeded random chain");
  gen->add_option("--links", n_links, "Number of links")
      ->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", out_path, "Output model file")->required();

  std::string check_path;
  CLI::App* check = app.add_subcommand("check", "Validate a model file");
  check->add_option("file", check_path, "Model file to load")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      const pardyn::RobotChain chain = pardyn::random_chain(n_links, seed);
      pardyn::save_chain(chain, out_path);
      std::printf("wrote %s: %d links, seed %llu\n", out_path.c_str(), n_links,
                  static_cast<unsigned long long>(seed));
    } else {
      const pardyn::RobotChain chain = pardyn::load_chain(check_path);
      std::printf("%s: valid chain with %d links, gravity (%g, %g, %g)\n",
                  check_path.c_str(), chain.size(), chain.gravity[0],
                  chain.gravity[1], chain.gravity[2]);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
