#include <string>
#include <vector>

#include "introsumm/cli.hpp"

int main(int argc, char** argv) {
  return introsumm::run(std::vector<std::string>(argv + 1, argv + argc));
}
