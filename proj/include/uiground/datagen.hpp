#pragma once

#include "uiground/rng.hpp"
#include "uiground/ui_model.hpp"

#include <cstdint>
#include <filesystem>

namespace uiground {

// Corpus generation knobs. Defaults mirror the intended desk-scale corpus:
// 6x4 placement lattice, 4..12 elements per screen, command mix dominated by
// extractive commands with absolute-spatial ones rare.
struct GenConfig {
    std::uint64_t seed = 1;
    int screens = 1000;
    int commands_per_screen = 3;
    int elements_min = 4;
    int elements_max = 12;
    int grid_rows = 6;
    int grid_cols = 4;
    std::vector<std::string> lexicon; // empty -> default_lexicon()
    double mix_extractive = 0.61;
    double mix_absolute = 0.04;
    double mix_relative = 0.35;

    void validate() const; // proportions sum to 1 +- 1e-9; elements fit the grid
    const std::vector<std::string>& effective_lexicon() const;
};

// >= 200 common UI words, disjoint from the phrase-template vocabulary.
const std::vector<std::string>& default_lexicon();
// Words used by the phrase templates; exposed so tests can check disjointness.
const std::vector<std::string>& template_words();

enum class Split { Train, Dev, Test };
const char* split_name(Split s);
Split split_from_name(const std::string& name);

struct PairInstance {
    std::string command_id;
    std::string element_id;
    int label = 0; // 1 iff element is the command's target
    Split split = Split::Train;
};

// Places a random number of elements on distinct grid cells (disjoint
// interiors by construction), text drawn from the lexicon with duplicates
// allowed. Deterministic for a given rng state.
Screen generate_screen(Rng& rng, const GenConfig& cfg, const std::string& screen_id);

// Referring-expression generators. Each enumerates every valid candidate and
// picks uniformly; throws its No*Referent error when no candidate exists.
Command gen_extractive(const Screen& screen, Rng& rng, const std::string& command_id);
Command gen_absolute(const Screen& screen, Rng& rng, const std::string& command_id);
Command gen_relative(const Screen& screen, Rng& rng, const std::string& command_id);

struct Corpus {
    std::vector<Screen> screens;
    std::vector<Command> commands;
    std::vector<PairInstance> pairs;

    const Screen& screen_of(const Command& c) const;
    const Command* find_command(const std::string& id) const;
};

// One positive pair per command plus same-screen negatives, capped at
// negatives_cap by uniform sampling without replacement.
std::vector<PairInstance> make_pairs(const std::vector<Screen>& screens,
                                     const std::vector<Command>& commands,
                                     int negatives_cap = 20,
                                     std::uint64_t seed = 0);

// Assigns a split to every command group (all pairs of a command share one);
// deterministic under seed. Ratios are nonnegative and sum to 1.
void split_dataset(std::vector<PairInstance>& pairs, double train, double dev, double test,
                   std::uint64_t seed);

Corpus generate_corpus(const GenConfig& cfg, double train, double dev, double test,
                       std::uint64_t split_seed, std::uint64_t pair_seed,
                       int negatives_cap = 20);

// ---- corpus files ----
// commands: one JSON object per line {id, phrase, screen_id, target_id,
// reasoning, anchor_id?}; pairs: CSV (command_id, element_id, label, split).

void save_commands(const std::filesystem::path& path, const std::vector<Command>& commands);
std::vector<Command> load_commands(const std::filesystem::path& path);
void save_pairs(const std::filesystem::path& path, const std::vector<PairInstance>& pairs);
std::vector<PairInstance> load_pairs(const std::filesystem::path& path);

} // namespace uiground
