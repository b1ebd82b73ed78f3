// Regenerates the checked-in benchmark cases under data/.
#include <cstdio>
#include <string>

#include "kronopt/bench.hpp"
#include "kronopt/textio.hpp"

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "data";
  try {
    kronopt::Network rts = kronopt::generate_rts96();
    kronopt::write_text_file(dir + "/rts96.m", kronopt::to_matpower_text(rts, "rts96"));
    std::printf("wrote %s/rts96.m (%d buses, %zu branches)\n", dir.c_str(), rts.n(),
                rts.branches().size());

    kronopt::Network synth = kronopt::generate_synth2383();
    kronopt::write_text_file(dir + "/synth2383.m",
                             kronopt::to_matpower_text(synth, "synth2383"));
    std::printf("wrote %s/synth2383.m (%d buses, %zu branches)\n", dir.c_str(),
                synth.n(), synth.branches().size());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "genbench: %s\n", e.what());
    return 1;
  }
  return 0;
}
