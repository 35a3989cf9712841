#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ppc {

enum ExitCode : int { kExitOk = 0, kExitError = 2, kExitViolations = 3 };

struct RunConfig {
  std::filesystem::path taxonomy;
  std::filesystem::path stopwords;
  std::filesystem::path gazetteers;
  std::filesystem::path lemmas;
  std::filesystem::path keywords;
  std::filesystem::path vectors;
  std::filesystem::path models;
  std::filesystem::path criteria;
  std::filesystem::path output_dir;
  double threshold = 0.9;
  std::uint64_t seed = 42;
  unsigned jobs = 0;  // 0: hardware concurrency
};

// "key = value" lines; relative paths resolve against the file's directory.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           const std::string& source = "<config>");

// Environment variable naming a config file read before the flags.
inline constexpr const char* kConfigEnv = "PPCHECK_CONFIG";

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ppc
