#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rsa/error.hpp"

namespace rsa::cli {

/// Exit status for any validation or runtime failure.
inline constexpr int kExitFailure = 2;

struct RdmArgs {
  std::filesystem::path input;
  std::filesystem::path out;
  std::optional<int> layer;
};

struct RunArgs {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> shuffles;
};

struct BehaveArgs {
  std::filesystem::path reps;
  std::filesystem::path judgments;
  std::optional<std::filesystem::path> concreteness;
  std::optional<std::filesystem::path> coverage;
  long long min_samples = 20;
  std::filesystem::path out = "behaviour.json";
};

struct PlotArgs {
  std::filesystem::path report;
  std::filesystem::path out;
};

struct ValidateArgs {
  std::filesystem::path input;
};

// Each command prints progress to `out` and returns 0, or throws rsa::Error.
int cmd_rdm(const RdmArgs& args, std::ostream& out);
int cmd_run(const RunArgs& args, std::ostream& out);
int cmd_behave(const BehaveArgs& args, std::ostream& out);
int cmd_plot(const PlotArgs& args, std::ostream& out);
int cmd_validate(const ValidateArgs& args, std::ostream& out);

/// `{"error":"<Code>","message":"..."}` on a single line.
std::string error_line(ErrorCode code, const std::string& message);

/// Parses argv (without the program name) and dispatches. Errors become one
/// error line on `err` and exit status 2.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rsa::cli
