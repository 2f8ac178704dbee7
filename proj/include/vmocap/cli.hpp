#pragma once

#include <filesystem>
#include <iosfwd>

#include "vmocap/config.hpp"
#include "vmocap/metrics.hpp"

namespace vmocap {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitUsage = 2,
  kExitIo = 3,
};

int cmd_generate(const RunConfig& config, bool resume, std::ostream& out, std::ostream& err);
int cmd_validate(const std::filesystem::path& dataset, std::ostream& out);
// Accepts a clip file (.bvh or clip JSON) or a dataset directory.
int cmd_stats(const std::filesystem::path& path, std::ostream& out);
int cmd_eval(const std::filesystem::path& dataset, const std::filesystem::path& predictions,
             const EvalOptions& options, bool as_json, std::ostream& out);
// Writes `image_out` and an annotation next to it with a .json extension.
int cmd_preview(const std::filesystem::path& clip, std::size_t frame, std::size_t camera_index,
                const RunConfig& config, const std::filesystem::path& image_out, std::ostream& out,
                std::ostream& err);

// Parses arguments and dispatches; exceptions become exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vmocap
