// Writes the shipped benchmark files into a directory (default: bench/).
#include <fstream>
#include <iostream>

#include "digits/bench/benchmark.hpp"

using namespace digits::bench;

namespace {

void write(const std::filesystem::path& dir, const BenchmarkSpec& s) {
  std::ofstream out(dir / (s.name + ".json"));
  out << s.to_json().dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "bench";
  std::filesystem::create_directories(dir);
  for (unsigned d : {1u, 2u, 3u}) {
    for (double b : {0.05, 0.1, 0.2}) write(dir, gen_synthetic(d, b));
  }
  for (unsigned u : {5u, 10u, 20u, 40u}) {
    for (unsigned n : {2u, 4u, 8u}) write(dir, gen_thermostat(u, n));
  }
  for (const char* size : {"s", "m", "l"}) write(dir, gen_fairness_standin(size));
  std::cout << "wrote " << dir.string() << "\n";
  return 0;
}
