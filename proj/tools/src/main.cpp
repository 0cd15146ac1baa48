#include <string>
#include <vector>

#include "sausagelab/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sausagelab::run_command(args);
}
