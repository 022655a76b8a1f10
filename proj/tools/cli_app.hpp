#pragma once

#include <CLI11.hpp>

#include <memory>
#include <string>
#include <vector>

namespace ncemb::cli {

// Exit codes follow the error taxonomy: 0 success, 2 config/parse
// problems, 3 missing resources, 4 training or evaluation failures.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitMissingResource = 3;
inline constexpr int kExitRunFailure = 4;

struct AppState;

/// Builds the full command tree; `state` must outlive the app.
std::unique_ptr<CLI::App> make_app(std::shared_ptr<AppState>& state);

/// Parses and dispatches; returns the process exit code.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

} // namespace ncemb::cli
