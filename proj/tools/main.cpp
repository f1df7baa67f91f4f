#include "commands.hpp"

#include "qrob/serialization.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int run(const std::string& command, const std::string& config_path, const std::string& output_dir, int threads) {
  nlohmann::json config;
  {
    std::ifstream in(config_path);
    if (!in) throw qrob::ConfigError("cannot open config " + config_path);
    try {
      in >> config;
    } catch (const nlohmann::json::exception& e) {
      throw qrob::ConfigError("config " + config_path + ": " + e.what());
    }
  }
  const std::filesystem::path base_dir = std::filesystem::path(config_path).parent_path();
  const qrob::cli::Outputs outputs = qrob::cli::run_command(command, config, base_dir, threads);

  if (output_dir.empty()) {
    for (const auto& [name, contents] : outputs) std::cout << "==> " << name << " <==\n" << contents;
    return 0;
  }
  std::filesystem::create_directories(output_dir);
  for (const auto& [name, contents] : outputs) {
    const auto file = std::filesystem::path(output_dir) / name;
    std::ofstream out(file, std::ios::binary);
    out << contents;
    if (!out) throw std::runtime_error("failed to write " + file.string());
    std::cerr << "wrote " << file.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qrob: probability metrics, risk functionals and Monte-Carlo robustness diagnostics"};
  app.require_subcommand(1);
  std::string config_path;
  std::string output_dir;
  int threads = 1;
  for (const char* name : qrob::cli::kCommands) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " command");
    sub->add_option("-c,--config", config_path, "JSON config file")->required();
    sub->add_option("-o,--output-dir", output_dir, "write outputs here instead of stdout");
    sub->add_option("-t,--threads", threads, "worker threads; outputs do not depend on it")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), config_path, output_dir, threads);
  } catch (const qrob::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
