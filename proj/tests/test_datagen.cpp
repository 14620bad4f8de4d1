#include <doctest.h>

#include "uiground/datagen.hpp"
#include "uiground/error.hpp"
#include "uiground/io_util.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

using namespace uiground;

// ---- independent oracles: tests/oracles.hpp -------------------------------

namespace {

using namespace uiground::oracles;

Screen make_screen(std::vector<std::pair<std::string, BoundingBox>> elems) {
    Screen s;
    s.id = "t0";
    s.source_width = s.source_height = kGridMax;
    int i = 0;
    for (auto& [text, box] : elems)
        s.elements.push_back({"e" + std::to_string(i++), text, box});
    return s;
}

std::string screens_bytes(const std::vector<Screen>& screens) {
    namespace fs = std::filesystem;
    fs::path p = fs::temp_directory_path() / "uiground_dg_bytes.jsonl";
    save_screens(p, screens);
    std::string data = read_file(p);
    fs::remove(p);
    return data;
}

} // namespace

// ---- generate_screen -------------------------------------------------------

TEST_CASE("default lexicon is large and disjoint from template words") {
    CHECK(default_lexicon().size() >= 200);
    std::set<std::string> lex(default_lexicon().begin(), default_lexicon().end());
    CHECK(lex.size() == default_lexicon().size());
    for (const auto& w : template_words()) CHECK(lex.count(w) == 0);
}

TEST_CASE("generate_screen places disjoint elements within the configured range") {
    GenConfig cfg;
    Rng rng(7);
    Screen s = generate_screen(rng, cfg, "s0");
    CHECK(s.elements.size() >= 4);
    CHECK(s.elements.size() <= 12);
    for (std::size_t i = 0; i < s.elements.size(); ++i)
        for (std::size_t k = i + 1; k < s.elements.size(); ++k)
            CHECK(!interiors_overlap(s.elements[i].bbox, s.elements[k].bbox));
    for (const auto& e : s.elements) {
        CHECK(e.bbox.valid());
        CHECK(!e.text.empty());
    }
}

TEST_CASE("generate_screen single-element configuration") {
    GenConfig cfg;
    cfg.elements_min = cfg.elements_max = 1;
    Rng rng(3);
    Screen s = generate_screen(rng, cfg, "s0");
    CHECK(s.elements.size() == 1);
}

TEST_CASE("generate_screen is deterministic for a given rng state") {
    GenConfig cfg;
    std::vector<Screen> a, b;
    for (int i = 0; i < 5; ++i) {
        Rng ra(mix_seed(42, static_cast<std::uint64_t>(i)));
        Rng rb(mix_seed(42, static_cast<std::uint64_t>(i)));
        a.push_back(generate_screen(ra, cfg, "s" + std::to_string(i)));
        b.push_back(generate_screen(rb, cfg, "s" + std::to_string(i)));
    }
    CHECK(screens_bytes(a) == screens_bytes(b));
}

TEST_CASE("generate_screen rejects an overfull grid") {
    GenConfig cfg;
    cfg.elements_min = cfg.elements_max = 25; // exceeds 6x4
    Rng rng(1);
    try {
        generate_screen(rng, cfg, "s0");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GridCapacityExceeded);
    }
}

// ---- gen_extractive --------------------------------------------------------

TEST_CASE("gen_extractive mentions exactly the target's text") {
    Screen s = make_screen({{"cancel", {100, 200, 100, 150}}, {"ok", {300, 400, 100, 150}}});
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        Command c = gen_extractive(s, rng, "c" + std::to_string(i));
        CHECK(c.reasoning == Reasoning::Extractive);
        CHECK(!c.anchor_id.has_value());
        const auto& target = *s.find(c.target_id);
        CHECK(phrase_mentions(c.phrase, target.text));
        int mentions = 0;
        for (const auto& e : s.elements)
            if (phrase_mentions(c.phrase, e.text)) ++mentions;
        CHECK(mentions == 1);
    }
}

TEST_CASE("gen_extractive fails when every text is duplicated") {
    Screen s = make_screen({{"ok", {100, 200, 100, 150}},
                            {"ok", {300, 400, 100, 150}},
                            {"save", {500, 600, 100, 150}},
                            {"save", {700, 800, 100, 150}}});
    Rng rng(5);
    try {
        gen_extractive(s, rng, "c0");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoUniquelyNamedElement);
    }
}

TEST_CASE("gen_extractive 100 draws satisfy the containment oracle") {
    GenConfig cfg;
    Rng srng(11);
    Screen s = generate_screen(srng, cfg, "s0");
    Rng rng(13);
    for (int i = 0; i < 100; ++i) {
        Command c;
        try {
            c = gen_extractive(s, rng, "c");
        } catch (const Error&) {
            Rng r2(mix_seed(11, static_cast<std::uint64_t>(i + 100)));
            s = generate_screen(r2, cfg, "s0");
            continue;
        }
        int mentions = 0, hit = -1;
        for (std::size_t k = 0; k < s.elements.size(); ++k)
            if (phrase_mentions(c.phrase, s.elements[k].text)) {
                ++mentions;
                hit = static_cast<int>(k);
            }
        CHECK(mentions == 1);
        CHECK(s.elements[static_cast<std::size_t>(hit)].id == c.target_id);
    }
}

// ---- gen_absolute ----------------------------------------------------------

TEST_CASE("gen_absolute targets a lone quadrant occupant") {
    // one element alone in the top-left quadrant; six crowded elsewhere with
    // every superlative tied
    Screen s = make_screen({{"cancel", {100, 140, 100, 140}},
                            {"ok", {600, 640, 300, 340}},
                            {"save", {800, 840, 300, 340}},
                            {"menu", {600, 640, 600, 640}},
                            {"edit", {800, 840, 600, 640}},
                            {"home", {100, 140, 600, 640}},
                            {"back", {300, 340, 600, 640}}});
    Rng rng(5);
    bool saw_quadrant = false;
    for (int i = 0; i < 30; ++i) {
        Command c = gen_absolute(s, rng, "c");
        CHECK(c.reasoning == Reasoning::AbsoluteSpatial);
        CHECK(!c.anchor_id.has_value());
        int satisfier = -1;
        int n = absolute_satisfiers(s, c.phrase, &satisfier);
        CHECK(n == 1);
        CHECK(s.elements[static_cast<std::size_t>(satisfier)].id == c.target_id);
        auto ws = words_of(c.phrase);
        if (has_word(ws, "top") && has_word(ws, "left")) {
            saw_quadrant = true;
            CHECK(c.target_id == "e0");
        }
    }
    CHECK(saw_quadrant);
}

TEST_CASE("gen_absolute fails when no quadrant or superlative is unique") {
    // two per quadrant, rows and columns aligned so each superlative ties
    Screen s = make_screen({{"a", {80, 120, 80, 120}},
                            {"b", {280, 320, 80, 120}},
                            {"c", {680, 720, 80, 120}},
                            {"d", {880, 920, 80, 120}},
                            {"e", {80, 120, 780, 820}},
                            {"f", {280, 320, 780, 820}},
                            {"g", {680, 720, 780, 820}},
                            {"h", {880, 920, 780, 820}}});
    Rng rng(5);
    try {
        gen_absolute(s, rng, "c0");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoUniqueAbsoluteReferent);
    }
}

// ---- gen_relative ----------------------------------------------------------

TEST_CASE("gen_relative targets the unique nearest neighbor in a direction") {
    Screen s = make_screen({{"ok", {100, 180, 100, 160}},
                            {"settings", {600, 680, 100, 160}}});
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        Command c = gen_relative(s, rng, "c");
        CHECK(c.reasoning == Reasoning::RelativeSpatial);
        REQUIRE(c.anchor_id.has_value());
        CHECK(*c.anchor_id != c.target_id);
        int satisfier = -1, anchor = -1;
        int n = relative_satisfiers(s, c.phrase, &satisfier, &anchor);
        REQUIRE(n == 1);
        CHECK(s.elements[static_cast<std::size_t>(satisfier)].id == c.target_id);
        CHECK(s.elements[static_cast<std::size_t>(anchor)].id == *c.anchor_id);
        CHECK(s.elements[static_cast<std::size_t>(anchor)].text !=
              s.elements[static_cast<std::size_t>(satisfier)].text);
    }
}

TEST_CASE("gen_relative fails without a unique nearest candidate") {
    // lone element: no anchor/neighbor pair at all
    Screen s = make_screen({{"ok", {100, 180, 100, 160}}});
    Rng rng(5);
    try {
        gen_relative(s, rng, "c0");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoUniqueRelativeReferent);
    }
}

// ---- corpus-level properties ----------------------------------------------

TEST_CASE("generated corpus: every command has exactly one brute-force referent") {
    GenConfig cfg;
    cfg.screens = 150;
    cfg.seed = 2024;
    Corpus corpus = generate_corpus(cfg, 0.5, 0.2, 0.3, 101, 102);
    REQUIRE(corpus.commands.size() == 450);

    for (const auto& c : corpus.commands) {
        const Screen& s = corpus.screen_of(c);
        c.validate(s);
        int satisfier = -1;
        switch (c.reasoning) {
            case Reasoning::Extractive: {
                int mentions = 0;
                for (std::size_t k = 0; k < s.elements.size(); ++k)
                    if (phrase_mentions(c.phrase, s.elements[k].text)) {
                        ++mentions;
                        satisfier = static_cast<int>(k);
                    }
                CHECK(mentions == 1);
                break;
            }
            case Reasoning::AbsoluteSpatial: {
                CHECK(absolute_satisfiers(s, c.phrase, &satisfier) == 1);
                break;
            }
            case Reasoning::RelativeSpatial: {
                int anchor = -1;
                REQUIRE(relative_satisfiers(s, c.phrase, &satisfier, &anchor) == 1);
                CHECK(s.elements[static_cast<std::size_t>(anchor)].id == *c.anchor_id);
                break;
            }
        }
        REQUIRE(satisfier >= 0);
        CHECK(s.elements[static_cast<std::size_t>(satisfier)].id == c.target_id);
        if (c.reasoning == Reasoning::RelativeSpatial) CHECK(c.anchor_id.has_value());
        else CHECK(!c.anchor_id.has_value());
    }
}

TEST_CASE("generated corpus matches the command mix within 2 points") {
    GenConfig cfg;
    cfg.screens = 400; // 1200 commands
    cfg.seed = 7;
    Corpus corpus = generate_corpus(cfg, 0.5, 0.2, 0.3, 1, 2);
    REQUIRE(corpus.commands.size() >= 1000);
    std::map<Reasoning, int> counts;
    for (const auto& c : corpus.commands) counts[c.reasoning]++;
    double n = static_cast<double>(corpus.commands.size());
    CHECK(std::abs(counts[Reasoning::Extractive] / n - 0.61) <= 0.02);
    CHECK(std::abs(counts[Reasoning::AbsoluteSpatial] / n - 0.04) <= 0.02);
    CHECK(std::abs(counts[Reasoning::RelativeSpatial] / n - 0.35) <= 0.02);
}

TEST_CASE("generate_corpus is deterministic") {
    GenConfig cfg;
    cfg.screens = 40;
    cfg.seed = 99;
    Corpus a = generate_corpus(cfg, 0.5, 0.2, 0.3, 5, 6);
    Corpus b = generate_corpus(cfg, 0.5, 0.2, 0.3, 5, 6);
    CHECK(screens_bytes(a.screens) == screens_bytes(b.screens));
    REQUIRE(a.commands.size() == b.commands.size());
    for (std::size_t i = 0; i < a.commands.size(); ++i) {
        CHECK(a.commands[i].phrase == b.commands[i].phrase);
        CHECK(a.commands[i].target_id == b.commands[i].target_id);
    }
    REQUIRE(a.pairs.size() == b.pairs.size());
    for (std::size_t i = 0; i < a.pairs.size(); ++i) {
        CHECK(a.pairs[i].command_id == b.pairs[i].command_id);
        CHECK(a.pairs[i].element_id == b.pairs[i].element_id);
        CHECK(a.pairs[i].label == b.pairs[i].label);
        CHECK(a.pairs[i].split == b.pairs[i].split);
    }
}

// ---- make_pairs ------------------------------------------------------------

TEST_CASE("make_pairs emits one positive and capped negatives") {
    GenConfig cfg;
    Rng rng(21);
    cfg.elements_min = cfg.elements_max = 5;
    Screen s5 = generate_screen(rng, cfg, "s5");
    Command c = gen_extractive(s5, rng, "c0");
    auto pairs = make_pairs({s5}, {c});
    CHECK(pairs.size() == 5);
    int positives = 0;
    for (const auto& p : pairs) positives += p.label;
    CHECK(positives == 1);

    // 30-element screen: 1 positive + 20 sampled negatives
    GenConfig big;
    big.grid_rows = 6;
    big.grid_cols = 5;
    big.elements_min = big.elements_max = 30;
    Rng rng2(22);
    Screen s30 = generate_screen(rng2, big, "s30");
    Command c2 = gen_extractive(s30, rng2, "c1");
    auto pairs2 = make_pairs({s30}, {c2}, 20, 77);
    CHECK(pairs2.size() == 21);
    std::set<std::string> distinct;
    int pos2 = 0;
    for (const auto& p : pairs2) {
        distinct.insert(p.element_id);
        pos2 += p.label;
    }
    CHECK(pos2 == 1);
    CHECK(distinct.size() == 21);
}

TEST_CASE("make_pairs rejects a dangling screen reference") {
    Command c;
    c.id = "c0";
    c.phrase = "tap ok";
    c.screen_id = "nope";
    c.target_id = "e0";
    try {
        make_pairs({}, {c});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DanglingScreenReference);
    }
}

// ---- split_dataset ----------------------------------------------------------

TEST_CASE("split_dataset: 1000 groups at 30-20-50 give 300/200/500") {
    std::vector<PairInstance> pairs;
    for (int g = 0; g < 1000; ++g) {
        std::string id = "c" + std::to_string(g);
        pairs.push_back({id, "e0", 1, Split::Train});
        pairs.push_back({id, "e1", 0, Split::Train});
    }
    split_dataset(pairs, 0.3, 0.2, 0.5, 31);
    std::map<Split, std::set<std::string>> groups;
    for (const auto& p : pairs) groups[p.split].insert(p.command_id);
    CHECK(groups[Split::Train].size() == 300);
    CHECK(groups[Split::Dev].size() == 200);
    CHECK(groups[Split::Test].size() == 500);

    // no group straddles splits
    std::map<std::string, std::set<Split>> by_group;
    for (const auto& p : pairs) by_group[p.command_id].insert(p.split);
    for (const auto& [id, splits] : by_group) CHECK(splits.size() == 1);
}

TEST_CASE("split_dataset boundary and determinism") {
    std::vector<PairInstance> pairs;
    for (int g = 0; g < 57; ++g)
        pairs.push_back({"c" + std::to_string(g), "e0", 1, Split::Test});

    auto a = pairs;
    split_dataset(a, 1.0, 0.0, 0.0, 5);
    for (const auto& p : a) CHECK(p.split == Split::Train);

    auto b = pairs, c = pairs;
    split_dataset(b, 0.3, 0.2, 0.5, 123);
    split_dataset(c, 0.3, 0.2, 0.5, 123);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(b[i].split == c[i].split);

    std::vector<PairInstance> empty;
    try {
        split_dataset(empty, 0.3, 0.2, 0.5, 1);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyDataset);
    }
}

// ---- corpus files -----------------------------------------------------------

TEST_CASE("commands and pairs files round-trip") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "uiground_datagen_io";
    fs::create_directories(dir);

    GenConfig cfg;
    cfg.screens = 20;
    cfg.seed = 3;
    Corpus corpus = generate_corpus(cfg, 0.5, 0.2, 0.3, 8, 9);

    save_commands(dir / "commands.jsonl", corpus.commands);
    auto commands = load_commands(dir / "commands.jsonl");
    REQUIRE(commands.size() == corpus.commands.size());
    for (std::size_t i = 0; i < commands.size(); ++i) {
        CHECK(commands[i].id == corpus.commands[i].id);
        CHECK(commands[i].phrase == corpus.commands[i].phrase);
        CHECK(commands[i].screen_id == corpus.commands[i].screen_id);
        CHECK(commands[i].target_id == corpus.commands[i].target_id);
        CHECK(commands[i].reasoning == corpus.commands[i].reasoning);
        CHECK(commands[i].anchor_id == corpus.commands[i].anchor_id);
    }

    save_pairs(dir / "pairs.csv", corpus.pairs);
    auto pairs = load_pairs(dir / "pairs.csv");
    REQUIRE(pairs.size() == corpus.pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        CHECK(pairs[i].command_id == corpus.pairs[i].command_id);
        CHECK(pairs[i].element_id == corpus.pairs[i].element_id);
        CHECK(pairs[i].label == corpus.pairs[i].label);
        CHECK(pairs[i].split == corpus.pairs[i].split);
    }

    fs::remove_all(dir);
}
