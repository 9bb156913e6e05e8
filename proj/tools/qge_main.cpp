#include <string>
#include <vector>

#include "qge/cli.hpp"

int main(int argc, char** argv) {
  return qge::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
