// Regenerates tests/fixtures/discovery_acc08.fixture.json from its config.
#include <fstream>
#include <iostream>

#include "intentdisc/orchestrator.hpp"
#include "../support/discovery_fixture.hpp"

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : INTENTDISC_FIXTURES;
  const auto config = intentdisc::load_experiment_config(dir + "/discovery_acc08.config.json");
  const auto split = intentdisc::resolve_split(config);
  std::ofstream(dir + "/discovery_acc08.fixture.json") << fixtures::shifted_discovery_fixture(config, split).dump(2)
                                                       << "\n";
  std::cout << "wrote " << dir << "/discovery_acc08.fixture.json\n";
}
