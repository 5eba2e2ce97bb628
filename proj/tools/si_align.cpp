#include <string>
#include <vector>

#include "sialign/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sialign::run_cli(args);
}
