#include <iostream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cli.hpp"

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("ccrm"));
  std::vector<std::string> args(argv, argv + argc);
  return ccrm::cli::run(args, std::cout, std::cerr);
}
