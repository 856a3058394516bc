#pragma once

#include <string>

#include "run_config.hpp"

namespace iadb::cli {

void cmd_train(Run& run);
void cmd_generate(Run& run);
void cmd_converge(Run& run);
void cmd_ddim_check(Run& run);
void cmd_warp(Run& run, const std::string& points_file);
void cmd_eval(Run& run, const std::string& samples_a, const std::string& samples_b);
void cmd_figure(Run& run, const std::string& which);

}  // namespace iadb::cli
