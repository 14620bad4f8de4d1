#pragma once

#include "uiground/datagen.hpp"
#include "uiground/ui_model.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace uiground {

// ---- tokenization ----

struct Vocab {
    // reserved: 0 = <pad>, 1 = <unk>, 2 = <sep>; real tokens sorted after
    std::vector<std::string> tokens;
    std::unordered_map<std::string, int> index;

    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kSep = 2;

    static Vocab build(const std::vector<std::string>& texts);

    int lookup(const std::string& token) const;
    int size() const { return static_cast<int>(tokens.size()); }
};

// lowercase words split on non-alphanumeric runs
std::vector<std::string> tokenize_words(const std::string& text);

inline constexpr int kMaxTokens = 32;

// word pieces mapped through the vocab (UNK fallback), truncated to 32
std::vector<int> tokenize(const std::string& text, const Vocab& vocab);

// ---- scorer model ----

enum class ModelKind { TextOnly, LayoutAware };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

struct ModelConfig {
    int dim = 64;
    int coord_buckets = 50;
    std::uint64_t init_seed = 0x5EED;
    double emb_init_std = 0.3;
    double coord_init_std = 0.05;
    // The zero-coordinate bucket rows (added to command tokens and the
    // separator) are held at zero by the trainer: the command side stays
    // position-neutral exactly, and the high-traffic rows stop capping the
    // stable learning rate. Gradients are still computed for them.
    bool train_zero_bucket = false;
};

// Mean-pool pair scorer. Token embeddings feed a shared pooled vector; the
// LayoutAware variant additionally adds four coordinate-bucket embeddings to
// every position (element tokens get the element box's buckets, command
// tokens and the separator the zero-coordinate bucket). The pooled vector
// passes through a tanh layer (the probed representation) and a linear head
// producing 2 logits.
//
// Parameters live in one flat float32 array; arithmetic is double throughout
// and every write rounds back to float32, so checkpoints restore bit-identical
// inference.
struct ScorerModel {
    ModelKind kind = ModelKind::TextOnly;
    Vocab vocab;
    int dim = 64;
    int buckets = 50;
    std::uint64_t init_seed = 0;
    bool train_zero_bucket = false;
    std::vector<float> params;

    // flat offsets
    std::size_t off_tok = 0;
    std::array<std::size_t, 4> off_coord{};
    std::size_t off_w1 = 0, off_b1 = 0, off_w2 = 0, off_b2 = 0;

    static ScorerModel init(ModelKind kind, Vocab vocab, const ModelConfig& cfg);

    std::size_t param_count() const { return params.size(); }
    // bucket 0 is the reserved zero-coordinate bucket; coordinates map to 1..B-1
    int coord_bucket(int coord) const;
};

// pooled joint encoding of (command, element), read before the pair head
struct Representation {
    std::vector<double> values;
};

// pre-resolved (command, element) pair ready for the math kernels
struct EncodedPair {
    std::vector<int> tokens; // command tokens, SEP, element tokens
    int n_cmd = 0;           // positions [0, n_cmd) are command tokens
    std::array<int, 4> bucket{}; // element coordinate buckets (x0, x1, y0, y1)
    int label = 0;
};

EncodedPair encode_input(const ScorerModel& model, const std::string& command_phrase,
                         const UIElement& element, int label = 0);

Representation encode_pair(const ScorerModel& model, const std::string& command_phrase,
                           const UIElement& element);

struct ScoreResult {
    std::array<double, 2> logits{}; // [irrelevant, relevant]
    double prob_relevant = 0.0;
    double relevance = 0.0; // logit(relevant) - logit(irrelevant)
};

ScoreResult score(const ScorerModel& model, const Representation& rep);

struct GroundResult {
    int element_index = -1;
    std::string element_id;
    double relevance = 0.0;
    double prob_relevant = 0.0;
};

// argmax of the relevance score over the screen's elements; ties go to the
// lowest element index
GroundResult ground_scored(const ScorerModel& model, const Screen& screen, const Command& command);
std::string ground(const ScorerModel& model, const Screen& screen, const Command& command);

// ---- training ----

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 64;
    int epochs = 5;
    std::uint64_t seed = 0;

    void validate() const;
};

struct PairDataset {
    std::vector<EncodedPair> items;
};

// Resolves pair instances against screens/commands and pre-encodes them.
PairDataset encode_pairs(const ScorerModel& model, const std::vector<Screen>& screens,
                         const std::vector<Command>& commands,
                         const std::vector<PairInstance>& pairs);

double mean_loss(const ScorerModel& model, const PairDataset& data);

// Mini-batch SGD on 2-class cross-entropy; fixed shuffle schedule per
// (seed, epoch). Returns per-epoch mean training loss; throws NonFiniteLoss
// on divergence.
std::vector<double> train(ScorerModel& model, const PairDataset& data, const TrainConfig& cfg);

// Max relative error between analytic gradients and central finite
// differences over >= n_samples randomly chosen parameters.
double grad_check(const ScorerModel& model, const PairDataset& batch, double epsilon,
                  int n_samples = 100, std::uint64_t seed = 0xC0FFEE);

// ---- files ----

// CSV: command_id, element_id, target_id, element bbox, target bbox, d floats.
// Values are float32; the written text round-trips them bit-exactly.
void export_representations(const ScorerModel& model, const std::vector<Screen>& screens,
                            const std::vector<Command>& commands,
                            const std::vector<PairInstance>& pairs,
                            const std::filesystem::path& path);

void save_checkpoint(const ScorerModel& model, const std::filesystem::path& path);
ScorerModel load_checkpoint(const std::filesystem::path& path);

} // namespace uiground
