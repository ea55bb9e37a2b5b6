#pragma once

#include "xlc/prompt.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace testing {

/// Fixed inputs behind the checked-in prompt goldens.
struct PromptInputs {
    xlc::Incident incident;
    xlc::Service service;
    std::vector<xlc::prompt::UpstreamInfo> upstream;
    std::vector<xlc::prompt::Example> examples;
    xlc::Monitor monitor;
};

PromptInputs prompt_inputs();

struct Golden {
    std::string name;  ///< path relative to fixtures/prompts, e.g. "rca/InC_DEP_upstream.txt"
    xlc::prompt::RenderedPrompt prompt;
};

/// The 8 RCA goldens (4 strategies x with/without upstream) and the 8
/// monitor goldens (2 tasks x 4 cases).
std::vector<Golden> rca_goldens();
std::vector<Golden> monitor_goldens();

/// Compares each golden with its file under `dir`. When the environment has
/// XLC_UPDATE_GOLDENS=1 the files are rewritten instead. Returns
/// the names that differ (or are missing).
std::vector<std::string> check_goldens(const std::vector<Golden>& goldens, const std::filesystem::path& dir);

}  // namespace testing
