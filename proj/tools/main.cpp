#include <atomic>
#include <csignal>
#include <string>
#include <vector>

#include "qcsm/cli.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::vector<std::string> args(argv + 1, argv + argc);
  return qcsm::run_cli(args, &g_interrupted);
}
