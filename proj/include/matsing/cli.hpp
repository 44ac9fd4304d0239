#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace matsing::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kInvalidParams = 2,
  kIoFailure = 3,
  kSingularMatrix = 4,
  kNumericalFailure = 5,
};

/// Runs one command line (without the program name). Data goes to `out` when
/// --out is "-", diagnostics and the stdout-run manifest go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Entry point for the executable.
int main_entry(int argc, char** argv);

/// Git blob hash of a byte string: sha1("blob <size>\0" + content), lowercase hex.
std::string git_blob_sha1(const std::string& content);

}  // namespace matsing::cli
