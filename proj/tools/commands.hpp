#pragma once

#include <string>
#include <vector>

#include "qnav/config.hpp"

namespace qnav::cli {

// Each command returns a process exit code: 0 on success, 1 on a runtime
// failure. Validation problems (bad config, bad checkpoint, bad flags) throw
// and are mapped to exit code 2 by main.
int cmd_train(const cfg::ExperimentConfig& config);
int cmd_eval(const cfg::ExperimentConfig& config, const std::string& checkpoint_path);
int cmd_attack(const cfg::ExperimentConfig& config, const std::string& checkpoint_path,
               const std::vector<std::string>& attack_names);
int cmd_bus_demo(const cfg::ExperimentConfig& config);
int cmd_bench(const cfg::ExperimentConfig& config, const std::string& checkpoint_path);

}  // namespace qnav::cli
