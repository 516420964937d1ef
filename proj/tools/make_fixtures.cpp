// Builds the deterministic reference-corpus fixtures into a directory:
// the released dataset, its pre-pruning candidate population, the seed
// problem file, and a small manifest. Running it twice produces identical
// bytes, so the output is safe to regenerate anywhere.

#include <cstdio>
#include <exception>
#include <fstream>
#include <string>

#include "json.hpp"

#include "ipg/axiom.hpp"
#include "ipg/synthcorpus.hpp"

#ifndef IPG_DATA_DIR
#error "IPG_DATA_DIR must point at the shipped data directory"
#endif

int main(int argc, char** argv) {
    std::string out_dir = argc > 1 ? argv[1] : "fixtures";
    try {
        std::ifstream in(std::string(IPG_DATA_DIR) + "/classical_mechanics_library.json");
        ipg::FormulaLibrary library = ipg::load_library(nlohmann::json::parse(in));
        ipg::synth::SynthCorpus corpus = ipg::synth::build_corpus(library);
        ipg::synth::write_fixtures(corpus, out_dir);
        std::printf("%s: %zu records\n", ipg::synth::kReleasedFixtureName,
                    corpus.released.size());
        std::printf("%s: %zu records\n", ipg::synth::kCandidatesFixtureName,
                    corpus.candidates.size());
        std::printf("%s: %zu seeds\n", ipg::synth::kSeedsFixtureName, corpus.seeds.size());
        std::printf("ttr=%.4f fresh_fraction=%.6f\n", corpus.ttr, corpus.fresh_fraction);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "make_fixtures: %s\n", e.what());
        return 1;
    }
}
