#ifndef LLMDEP_TOOLS_CLI_H_
#define LLMDEP_TOOLS_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace llmdep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitEndpointExhausted = 4;

inline constexpr uint64_t kDefaultSeed = 1;

struct RunConfig {
  std::string command;
  std::vector<std::string> treebanks;
  std::string include_test;
  int steps = 3;
  std::string lang;
  std::string lang_name;
  uint64_t seed = kDefaultSeed;
  std::vector<size_t> sizes;
  std::vector<std::string> downsample;  // "code=fraction"
  std::optional<size_t> count;

  std::string mock;
  std::string mock_config;
  std::optional<double> p_drop_row;
  std::optional<double> p_field_count;
  std::optional<double> p_head_error;
  std::optional<double> p_upos_error;
  std::optional<double> p_deprel_error;
  std::optional<double> p_multi_root;
  std::optional<double> p_cycle;
  std::optional<double> p_form_error;

  std::string endpoint;
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  int max_attempts = 5;
  int max_output_tokens = 0;
  size_t max_in_flight = 4;

  std::string completions;
  std::string system;
  std::string out;
  bool json = false;
};

// Parses argv into a RunConfig and runs it. Returns the process exit status.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

// Throws ConfigError, IoError or FormatError; returns 0 or
// kExitEndpointExhausted.
int Run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace llmdep::cli

#endif  // LLMDEP_TOOLS_CLI_H_
