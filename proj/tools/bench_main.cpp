// Command-line benchmark runner. Sweeps the dynamics algorithms over chain
// lengths (link mode) or batch sizes (group mode), writes a CSV, and prints
// a per-cell summary. Exit status: 0 all cells timed, 2 some cells failed,
// 1 unusable configuration.

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <pardyn/bench.hpp>

namespace {

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const auto end = comma == std::string::npos ? csv.size() : comma;
    if (end > start) out.push_back(csv.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
  std::vector<int> out;
  for (const std::string& item : split_list(csv)) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": '" + item +
                                  "' is not an integer");
    }
  }
  if (out.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty list");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Timing sweeps for the chain dynamics algorithms"};

  std::string mode;
  std::string algos = "jsiia,abia,cfa";
  std::string links = "10,50,100,200";
  std::string groups = "1,10,100,1000";
  pardyn::BenchConfig config;
  bool no_spot_check = false;

  app.add_option("--mode", mode, "Sweep kind: link or group")
      ->required()
      ->check(CLI::IsMember({"link", "group"}));
  app.add_option("--algos", algos,
                 "Comma-separated algorithms: jsiia, abia, cfa, invdyn")
      ->capture_default_str();
  app.add_option("--links", links, "Comma-separated chain lengths")
      ->capture_default_str();
  app.add_option("--groups", groups,
                 "Comma-separated group sizes (group mode only)")
      ->capture_default_str();
  app.add_option("--repeats", config.repeats, "Timed repeats per cell")
      ->capture_default_str();
  app.add_option("--seed", config.seed, "Workload seed")
      ->capture_default_str();
  app.add_option("--workers", config.worker_count,
                 "Worker threads (0 keeps the runtime default)")
      ->capture_default_str();
  app.add_option("--out", config.output_path, "CSV output path")
      ->capture_default_str();
  app.add_flag("--no-spot-check", no_spot_check,
               "Skip the periodic cross-algorithm result checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // 0 covers --help
  }

  try {
    config.mode = mode == "link" ? pardyn::BenchMode::link_sweep
                                 : pardyn::BenchMode::group_sweep;
    config.spot_check = !no_spot_check;
    config.algos.clear();
    for (const std::string& name : split_list(algos)) {
      config.algos.push_back(pardyn::bench_algo_from_string(name));
    }
    config.link_counts = parse_int_list(links, "--links");
    config.group_counts = parse_int_list(groups, "--groups");
    pardyn::validate(config);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  const pardyn::BenchReport report = pardyn::run_benchmark(config);

  try {
    pardyn::emit_csv(report.records, config.output_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  for (const pardyn::BenchRecord& r : report.records) {
    std::printf("%-7s n=%-4d groups=%-5d %12.3f us  (stddev %.3f, %d repeats, %d workers)\n",
                pardyn::to_string(r.algo).c_str(), r.n_links, r.n_groups,
                r.mean_us, r.stddev_us, r.repeats, r.worker_count);
  }
  std::printf("wrote %zu records to %s\n", report.records.size(),
              config.output_path.c_str());

  if (!report.all_ok()) {
    for (const pardyn::BenchCellFailure& f : report.failures) {
      std::fprintf(stderr, "cell failed: %s n=%d groups=%d: %s\n",
                   pardyn::to_string(f.algo).c_str(), f.n_links, f.n_groups,
                   f.message.c_str());
    }
    return 2;
  }
  return 0;
}
