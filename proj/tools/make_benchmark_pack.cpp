// Regenerates the scenario files under data/benchmark/ from the builder.
// The shipped files are committed; a unit test checks they stay in sync.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "afd/benchmark.hpp"

using namespace afd;

int main(int argc, char** argv) {
    std::string out_dir = argc > 1 ? argv[1] : "data/benchmark";
    std::filesystem::create_directories(out_dir);

    BenchmarkPack pack = make_benchmark_pack();
    std::vector<const Scenario*> all = pack.all();
    all.push_back(&pack.calibration);
    for (const Scenario* sc : all)
        write_scenario_file(*sc, out_dir + "/" + sc->id + ".scenario.json");

    std::printf("wrote %zu scenarios (%d falls, %d fall-like) to %s\n", all.size(), pack.fall_events(),
                pack.fall_like_events(), out_dir.c_str());
    return 0;
}
