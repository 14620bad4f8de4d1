#include <doctest.h>

#include "uiground/datagen.hpp"
#include "uiground/encoder.hpp"
#include "uiground/error.hpp"
#include "uiground/io_util.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace uiground;

namespace {

Vocab test_vocab() {
    std::vector<std::string> texts(default_lexicon());
    for (const auto& w : template_words()) texts.push_back(w);
    return Vocab::build(texts);
}

UIElement elem(const std::string& id, const std::string& text, BoundingBox box) {
    return UIElement{id, text, box};
}

// small corpus + models shared by the trained-behavior tests
struct TinyWorld {
    Corpus corpus;
    ScorerModel text_model;
    ScorerModel layout_model;

    TinyWorld() {
        GenConfig cfg;
        cfg.screens = 80;
        cfg.seed = 515;
        corpus = generate_corpus(cfg, 0.5, 0.2, 0.3, 61, 62);
        text_model = ScorerModel::init(ModelKind::TextOnly, test_vocab(), ModelConfig{64, 50, 7101});
        layout_model = ScorerModel::init(ModelKind::LayoutAware, test_vocab(), ModelConfig{64, 50, 7102});
    }
};

TinyWorld& world() {
    static TinyWorld w;
    return w;
}

std::vector<PairInstance> pairs_of(const Corpus& corpus, Split split) {
    std::vector<PairInstance> out;
    for (const auto& p : corpus.pairs)
        if (p.split == split) out.push_back(p);
    return out;
}

} // namespace

TEST_CASE("tokenize lowercases, splits and falls back to UNK") {
    Vocab v = test_vocab();
    auto ids = tokenize("Click on the Cancel button", v);
    REQUIRE(ids.size() == 5);
    CHECK(v.tokens[static_cast<std::size_t>(ids[0])] == "click");
    CHECK(v.tokens[static_cast<std::size_t>(ids[1])] == "on");
    CHECK(v.tokens[static_cast<std::size_t>(ids[2])] == "the");
    CHECK(v.tokens[static_cast<std::size_t>(ids[3])] == "cancel");
    CHECK(v.tokens[static_cast<std::size_t>(ids[4])] == "button");

    CHECK(tokenize("", v).empty());
    CHECK(tokenize("   \t--", v).empty());

    auto unk = tokenize("qwertzuiop", v);
    REQUIRE(unk.size() == 1);
    CHECK(unk[0] == Vocab::kUnk);

    // truncation
    std::string longtext;
    for (int i = 0; i < 50; ++i) longtext += "cancel ";
    CHECK(tokenize(longtext, v).size() == kMaxTokens);
}

TEST_CASE("vocab reserves pad/unk/sep at fixed dense indices") {
    Vocab v = test_vocab();
    CHECK(v.tokens[0] == "<pad>");
    CHECK(v.tokens[1] == "<unk>");
    CHECK(v.tokens[2] == "<sep>");
    for (std::size_t i = 0; i < v.tokens.size(); ++i)
        CHECK(v.index.at(v.tokens[i]) == static_cast<int>(i));
}

TEST_CASE("encode_pair is pure and reflects model kind") {
    ScorerModel text = ScorerModel::init(ModelKind::TextOnly, test_vocab(), ModelConfig{});
    ScorerModel layout = ScorerModel::init(ModelKind::LayoutAware, test_vocab(), ModelConfig{});

    UIElement a = elem("a", "cancel", {0, 100, 0, 100});
    UIElement b = elem("b", "cancel", {600, 900, 500, 800});

    auto r1 = encode_pair(text, "click on the cancel button", a);
    auto r2 = encode_pair(text, "click on the cancel button", a);
    CHECK(r1.values == r2.values); // purity, bit-exact

    // text-only blindness: equal text, different boxes
    auto r3 = encode_pair(text, "click on the cancel button", b);
    CHECK(r1.values == r3.values);

    // layout-aware separates them
    auto l1 = encode_pair(layout, "click on the cancel button", a);
    auto l2 = encode_pair(layout, "click on the cancel button", b);
    CHECK(l1.values != l2.values);

    CHECK(static_cast<int>(l1.values.size()) == layout.dim);
    for (double v : l1.values) CHECK(std::isfinite(v));

    CHECK_THROWS_AS(encode_pair(text, "", a), Error);
    try {
        encode_pair(text, "!!!", a);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyCommand);
    }
}

TEST_CASE("score: softmax properties") {
    ScorerModel m = ScorerModel::init(ModelKind::TextOnly, test_vocab(), ModelConfig{});

    // zero head -> equal logits -> probability one half
    ScorerModel zero = m;
    for (std::size_t i = zero.off_w2; i < zero.params.size(); ++i) zero.params[i] = 0.0f;
    Representation rep;
    rep.values.assign(static_cast<std::size_t>(m.dim), 0.25);
    ScoreResult s0 = score(zero, rep);
    CHECK(s0.logits[0] == s0.logits[1]);
    CHECK(s0.prob_relevant == doctest::Approx(0.5).epsilon(1e-12));

    // shift invariance: adding a constant to both logits via the biases
    ScorerModel shifted = m;
    shifted.params[shifted.off_b2] += 3.25f;
    shifted.params[shifted.off_b2 + 1] += 3.25f;
    ScoreResult s1 = score(m, rep);
    ScoreResult s2 = score(shifted, rep);
    CHECK(s2.prob_relevant == doctest::Approx(s1.prob_relevant).epsilon(1e-9));
    CHECK(s2.relevance == doctest::Approx(s1.relevance).epsilon(1e-9));

    // distribution sums to 1
    double mx = std::max(s1.logits[0], s1.logits[1]);
    double e0 = std::exp(s1.logits[0] - mx), e1 = std::exp(s1.logits[1] - mx);
    double p0 = e0 / (e0 + e1);
    CHECK(p0 + s1.prob_relevant == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s1.prob_relevant >= 0.0);

    // dimension mismatch
    Representation bad;
    bad.values.assign(static_cast<std::size_t>(m.dim) + 1, 0.0);
    try {
        score(m, bad);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("ground: degenerate argmax and score-shift invariance") {
    ScorerModel m = ScorerModel::init(ModelKind::LayoutAware, test_vocab(), ModelConfig{});
    Screen s;
    s.id = "s0";
    s.source_width = s.source_height = kGridMax;
    s.elements = {elem("only", "save", {100, 200, 100, 200})};
    Command c;
    c.id = "c0";
    c.phrase = "tap save";
    c.screen_id = "s0";
    c.target_id = "only";

    CHECK(ground(m, s, c) == "only");

    s.elements.push_back(elem("e1", "delete", {300, 400, 100, 200}));
    s.elements.push_back(elem("e2", "edit", {500, 600, 100, 200}));
    std::string before = ground(m, s, c);
    ScorerModel shifted = m;
    shifted.params[shifted.off_b2 + 1] += 7.5f; // shifts every relevance equally
    CHECK(ground(shifted, s, c) == before);

    Screen empty;
    empty.id = "e";
    try {
        ground(m, empty, c);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyScreen);
    }
}

TEST_CASE("ground equals the exhaustive argmax oracle on random cases") {
    auto& w = world();
    ScorerModel models[2] = {w.text_model, w.layout_model};
    int checked = 0;
    for (const auto& c : w.corpus.commands) {
        const Screen& s = w.corpus.screen_of(c);
        const ScorerModel& m = models[checked % 2];

        // oracle: independent per-element loop over encode+score
        int best = -1;
        double best_rel = 0.0;
        for (std::size_t i = 0; i < s.elements.size(); ++i) {
            ScoreResult sr = score(m, encode_pair(m, c.phrase, s.elements[i]));
            if (best < 0 || sr.relevance > best_rel) {
                best = static_cast<int>(i);
                best_rel = sr.relevance;
            }
        }
        CHECK(ground(m, s, c) == s.elements[static_cast<std::size_t>(best)].id);
        if (++checked >= 200) break;
    }
    CHECK(checked == 200);
}

TEST_CASE("train: initial loss near ln 2 on balanced pairs") {
    auto& w = world();
    // one positive and one negative per command -> balanced
    std::vector<PairInstance> balanced;
    std::string last_cmd;
    int negs = 0;
    for (const auto& p : w.corpus.pairs) {
        if (p.command_id != last_cmd) {
            last_cmd = p.command_id;
            negs = 0;
        }
        if (p.label == 1 || ++negs == 1) balanced.push_back(p);
    }
    PairDataset data = encode_pairs(w.text_model, w.corpus.screens, w.corpus.commands, balanced);
    CHECK(mean_loss(w.text_model, data) == doctest::Approx(std::log(2.0)).epsilon(0.05));

    PairDataset data_layout = encode_pairs(w.layout_model, w.corpus.screens, w.corpus.commands, balanced);
    CHECK(mean_loss(w.layout_model, data_layout) == doctest::Approx(std::log(2.0)).epsilon(0.05));
}

TEST_CASE("train: default config yields non-increasing epoch losses") {
    auto& w = world();
    PairDataset data =
        encode_pairs(w.text_model, w.corpus.screens, w.corpus.commands, pairs_of(w.corpus, Split::Train));

    ScorerModel m = w.text_model;
    TrainConfig cfg; // spec defaults: lr 1e-3, batch 64, epochs 5
    cfg.seed = 99;
    auto losses = train(m, data, cfg);
    REQUIRE(losses.size() == 5);
    for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] + 1e-9);

    // bitwise determinism
    ScorerModel m2 = w.text_model;
    auto losses2 = train(m2, data, cfg);
    CHECK(losses == losses2);
    CHECK(m.params == m2.params);

    TrainConfig bad;
    bad.epochs = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("train: non-finite loss aborts with NonFiniteLoss") {
    auto& w = world();
    PairDataset data =
        encode_pairs(w.text_model, w.corpus.screens, w.corpus.commands, pairs_of(w.corpus, Split::Train));
    ScorerModel m = w.text_model;
    // a corrupted parameter poisons every representation on the first batch
    m.params[m.off_w1] = std::numeric_limits<float>::quiet_NaN();
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.seed = 1;
    try {
        train(m, data, cfg);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteLoss);
    }
}

TEST_CASE("grad_check: analytic gradients match central finite differences") {
    auto& w = world();
    auto train_pairs = pairs_of(w.corpus, Split::Train);
    train_pairs.resize(32);

    for (const ScorerModel* base : {&w.text_model, &w.layout_model}) {
        PairDataset batch = encode_pairs(*base, w.corpus.screens, w.corpus.commands, train_pairs);
        CHECK(grad_check(*base, batch, 1e-4, 150) < 1e-3);

        // also after a little training, away from the init point
        ScorerModel trained = *base;
        PairDataset data =
            encode_pairs(*base, w.corpus.screens, w.corpus.commands, pairs_of(w.corpus, Split::Train));
        TrainConfig cfg;
        cfg.epochs = 2;
        cfg.learning_rate = 0.05;
        cfg.seed = 5;
        train(trained, data, cfg);
        CHECK(grad_check(trained, batch, 1e-4, 150) < 1e-3);
    }

    PairDataset empty;
    CHECK_THROWS_AS(grad_check(w.text_model, empty, 1e-4), Error);
    PairDataset one;
    one.items.push_back(encode_input(w.text_model, "tap ok", elem("e", "ok", {0, 10, 0, 10}), 1));
    CHECK_THROWS_AS(grad_check(w.text_model, one, 0.5), Error); // epsilon out of range
}

TEST_CASE("grad_check: zero weights and balanced labels give zero gradients") {
    ScorerModel m = ScorerModel::init(ModelKind::TextOnly, test_vocab(), ModelConfig{});
    std::fill(m.params.begin(), m.params.end(), 0.0f);
    PairDataset batch;
    batch.items.push_back(encode_input(m, "tap ok", elem("a", "ok", {0, 10, 0, 10}), 1));
    batch.items.push_back(encode_input(m, "tap ok", elem("b", "save", {20, 30, 0, 10}), 0));
    CHECK(grad_check(m, batch, 1e-4, 200) < 1e-9);
}

TEST_CASE("grad_check metric saturates for a sign-flipped gradient") {
    // |g_a - g_f| / (|g_a| + |g_f|) -> 1 when g_a == -g_f: a corrupted
    // backward pass lands three orders of magnitude above the 1e-3 gate
    double gf = 0.137;
    double ga = -gf;
    double err = std::abs(ga - gf) / std::max(1e-8, std::abs(ga) + std::abs(gf));
    CHECK(err == doctest::Approx(1.0));
    CHECK(err > 0.9);
}

TEST_CASE("checkpoint round-trip restores bit-identical inference") {
    namespace fs = std::filesystem;
    auto& w = world();
    ScorerModel m = w.layout_model;
    PairDataset data =
        encode_pairs(m, w.corpus.screens, w.corpus.commands, pairs_of(w.corpus, Split::Train));
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.learning_rate = 0.05;
    train(m, data, cfg);

    fs::path dir = fs::temp_directory_path() / "uiground_ckpt_test";
    fs::create_directories(dir);
    save_checkpoint(m, dir / "model.json");
    ScorerModel loaded = load_checkpoint(dir / "model.json");

    CHECK(loaded.kind == m.kind);
    CHECK(loaded.dim == m.dim);
    CHECK(loaded.buckets == m.buckets);
    CHECK(loaded.vocab.tokens == m.vocab.tokens);
    REQUIRE(loaded.params.size() == m.params.size());
    CHECK(loaded.params == m.params); // bit-exact float32

    const Command& c = w.corpus.commands.front();
    const Screen& s = w.corpus.screen_of(c);
    GroundResult a = ground_scored(m, s, c);
    GroundResult b = ground_scored(loaded, s, c);
    CHECK(a.element_id == b.element_id);
    CHECK(a.relevance == b.relevance); // exact double equality

    std::ofstream(dir / "junk.json") << "{\"format\":\"nope\"}";
    CHECK_THROWS_AS(load_checkpoint(dir / "junk.json"), Error);
    fs::remove_all(dir);
}

TEST_CASE("export_representations writes one bit-exact record per pair") {
    namespace fs = std::filesystem;
    auto& w = world();
    auto pairs = pairs_of(w.corpus, Split::Test);
    pairs.resize(50);

    fs::path dir = fs::temp_directory_path() / "uiground_export_test";
    fs::create_directories(dir);
    export_representations(w.layout_model, w.corpus.screens, w.corpus.commands, pairs, dir / "reps.csv");

    std::ifstream in(dir / "reps.csv");
    std::string line;
    REQUIRE(std::getline(in, line));
    auto header = csv_split_line(line);
    CHECK(header.size() == 11 + static_cast<std::size_t>(w.layout_model.dim));
    CHECK(header[0] == "command_id");
    std::size_t rows = 0;
    std::string first_row;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (rows == 0) first_row = line;
        ++rows;
    }
    CHECK(rows == pairs.size());

    // float fields round-trip bit-exactly against a recomputed representation
    auto fields = csv_split_line(first_row);
    const Command* c = w.corpus.find_command(pairs[0].command_id);
    REQUIRE(c != nullptr);
    const Screen& s = w.corpus.screen_of(*c);
    Representation rep = encode_pair(w.layout_model, c->phrase, *s.find(pairs[0].element_id));
    for (int i = 0; i < w.layout_model.dim; ++i) {
        float expected = static_cast<float>(rep.values[static_cast<std::size_t>(i)]);
        CHECK(parse_float(fields[11 + static_cast<std::size_t>(i)]) == expected);
    }
    fs::remove_all(dir);
}
