// ksfrag: exact-diagonalization experiments on truncated lattice gauge
// theories. Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <Eigen/Core>

#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ksfrag/errors.hpp"
#include "ksfrag/experiment/config.hpp"
#include "ksfrag/experiment/runners.hpp"

#ifndef KSFRAG_VERSION
#define KSFRAG_VERSION "unknown"
#endif

namespace {

namespace fs = std::filesystem;
using namespace ksfrag;
using namespace ksfrag::experiment;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

/// KSFRAG_NUM_THREADS caps the threads Eigen may use; unset means Eigen's default.
int apply_thread_cap() {
  const char* env = std::getenv("KSFRAG_NUM_THREADS");
  if (!env) return Eigen::nbThreads();
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || n < 1 || n > 4096)
    throw ConfigError(std::string("KSFRAG_NUM_THREADS must be a positive integer, got '") + env + "'");
  Eigen::setNbThreads(static_cast<int>(n));
  return static_cast<int>(n);
}

using Runner = std::function<Json(const ExperimentConfig&, const fs::path&)>;

int run(const std::string& command, const Runner& runner, const std::string& config_path, std::string out) {
  try {
    const int threads = apply_thread_cap();
    const ExperimentConfig config = load_config(config_path);
    if (out.empty()) {
      if (!config.output_dir) throw ConfigError("no output directory: pass --out or set output_dir");
      out = *config.output_dir;
    }
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw ConfigError("cannot create output directory '" + out + "'");

    const auto start = std::chrono::steady_clock::now();
    Json summary = runner(config, out);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Json echo = Json::object();
    for (const auto& [key, value] : config.entries) echo[key] = value;
    Json meta{{"schema_version", kSchemaVersion},
              {"tool", "ksfrag"},
              {"version", KSFRAG_VERSION},
              {"command", command},
              {"config_path", config_path},
              {"config", echo},
              {"threads", threads},
              {"wall_seconds", seconds},
              {"result", summary}};
    std::ofstream f(fs::path(out) / "metadata.json", std::ios::binary);
    if (!f) throw ConfigError("cannot write metadata.json in '" + out + "'");
    f << meta.dump(2) << '\n';
    std::cout << command << ": wrote " << out << '\n';
    return 0;
  } catch (const InvalidArgument& e) {  // also ConfigError and CapacityError
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::bad_alloc&) {
    std::cerr << "numerical failure: out of memory\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact diagonalization and Hilbert-space fragmentation for truncated lattice gauge theories"};
  app.set_version_flag("--version", KSFRAG_VERSION);
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    Runner runner;
    std::string config;
    std::string out;
  };
  Command commands[] = {
      {"u1-spectrum", "k=0 spectrum, counters, half-chain entropy of the U(1) ladder", run_u1_spectrum, {}, {}},
      {"quench", "quench and microcanonical time series of an electric observable", run_quench, {}, {}},
      {"sectors", "Krylov sector counts of the frozen-pattern effective Hamiltonian", run_sectors, {}, {}},
      {"sw-check", "Schrieffer-Wolff order check and correction scaling", run_sw_check, {}, {}},
  };
  for (auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", c.config, "flat key = value config file")->required();
    sub->add_option("--out", c.out, "output directory (default: output_dir from the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  for (auto& c : commands)
    if (app.got_subcommand(c.name)) return run(c.name, c.runner, c.config, c.out);
  return kExitConfig;
}
