#pragma once

#include "uiground/datagen.hpp"
#include "uiground/ui_model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace uiground {

// Four binary spatial features probed on frozen pair representations:
// AT1 element top/bottom of screen, AT2 element left/right of screen,
// AT3 element above/below the command's target, AT4 element left/right of it.
enum class AuxTask { AT1, AT2, AT3, AT4 };

const char* aux_task_name(AuxTask t);
AuxTask aux_task_from_name(const std::string& name);

// One exported (command, element) representation with the geometry needed to
// derive auxiliary labels. Vectors are float32 (what the file format carries).
struct RepRecord {
    std::string command_id;
    std::string element_id;
    std::string target_id;
    BoundingBox elem_bbox;
    BoundingBox target_bbox;
    std::vector<float> vec;
};

struct AuxExample {
    std::vector<float> vec;
    int label = 0;
    Split split = Split::Train;
};

struct AuxDataset {
    AuxTask task = AuxTask::AT1;
    int dim = 0;
    std::vector<AuxExample> examples;
    std::string provenance;
};

// Labels: AT1 1=Top, AT2 1=Left, AT3 1=Above, AT4 1=Left. AT3/AT4 exclude
// the target pair itself and equal-center records. Splits are 30-20-50 per
// record, fixed seed. Throws SingleClassDataset when a split is one-class.
AuxDataset build_aux_dataset(const std::vector<RepRecord>& records, AuxTask task,
                             std::uint64_t split_seed, const std::string& provenance = "");

// Same inputs with fixed random labels: the label is a pure function of
// (vector bytes, seed), so identical vectors share a label.
AuxDataset make_control(const AuxDataset& aux, std::uint64_t seed);

struct ProbeSpec {
    std::vector<int> hidden; // 0, 1 or 2 hidden widths (ReLU)
    long long param_count = 0;
    int epochs = 60;
    double learning_rate = 1e-3;
    int batch_size = 128;
    int patience = 8; // epochs without improvement before stopping early
    std::uint64_t seed = 0;
};

long long probe_param_count(int input_dim, const std::vector<int>& hidden);

struct ProbeRun {
    ProbeSpec spec;
    int index = 0;
    bool failed = false;
    double aux_test_acc = 0.0;
    double aux_test_ce = 0.0;
    double control_train_acc = 0.0;
    double control_train_ce = 0.0;
    double selectivity = 0.0;
};

struct ProbeFamilyConfig {
    int count = 50;
    int max_width = 256;
    int epochs = 60;
    double learning_rate = 1e-3;
    int batch_size = 128;
    int patience = 8; // epochs without improvement before stopping
    std::uint64_t seed = 0x9B0BE;
    int jobs = 1;
};

// 50 specs log-spaced in parameter count from the linear probe (2d + 2)
// up to two hidden layers of max_width; strictly increasing counts.
std::vector<ProbeSpec> make_probe_specs(int input_dim, const ProbeFamilyConfig& cfg);

// Trains every spec on the auxiliary task (dev-selected, test-scored) and on
// the control task (train-scored); deterministic per (spec, seed) and safe to
// run with jobs > 1. Diverged probes are flagged failed, never dropped.
std::vector<ProbeRun> probe_sweep(const AuxDataset& aux, const ProbeFamilyConfig& cfg);

// control_train_ce - aux_test_ce; higher = accuracy attributable to the
// representation rather than probe capacity.
double selectivity(const ProbeRun& run);

// representation file IO (schema written by export_representations)
std::vector<RepRecord> import_representations(const std::filesystem::path& path);

// seeded uniform subsample without replacement; n >= records.size() is a copy
std::vector<RepRecord> sample_records(const std::vector<RepRecord>& records, std::size_t n,
                                      std::uint64_t seed);

// CSV: task, probe_index, param_count, aux_test_acc, aux_test_ce,
// control_train_acc, control_train_ce, selectivity, failed
void save_sweep_csv(const std::filesystem::path& path, const std::vector<ProbeRun>& runs,
                    AuxTask task);
std::vector<ProbeRun> load_sweep_csv(const std::filesystem::path& path, AuxTask* task_out = nullptr);

// ---- probe internals shared with tests ----

// Feed-forward ReLU classifier over float32 inputs; scalar-templated so the
// gradient-check oracle can run the identical algorithm in double.
template <class S>
struct ProbeNet {
    int in_dim = 0;
    std::vector<int> hidden;
    std::vector<std::vector<S>> w; // per layer, row-major out x in
    std::vector<std::vector<S>> b;

    static ProbeNet init(int in_dim, const std::vector<int>& hidden, std::uint64_t seed);
    long long param_count() const;
};

struct ProbeTrainResult {
    bool failed = false;
    double eval_acc = 0.0; // test acc (aux) or train acc (control)
    double eval_ce = 0.0;
};

struct ProbeDataView {
    const AuxDataset* data = nullptr;
    bool control_mode = false; // train on Train split, report train metrics
};

ProbeTrainResult train_probe(const ProbeSpec& spec, const ProbeDataView& view);

// max relative error of analytic vs central-finite-difference gradients for
// one probe architecture, over >= n_samples parameters
double probe_grad_check(int in_dim, const std::vector<int>& hidden, std::uint64_t seed,
                        double epsilon, int n_samples = 100);

} // namespace uiground
