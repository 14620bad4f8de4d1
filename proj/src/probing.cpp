#include "uiground/probing.hpp"

#include "uiground/error.hpp"
#include "uiground/io_util.hpp"
#include "uiground/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

namespace uiground {

const char* aux_task_name(AuxTask t) {
    switch (t) {
        case AuxTask::AT1: return "AT1";
        case AuxTask::AT2: return "AT2";
        case AuxTask::AT3: return "AT3";
        case AuxTask::AT4: return "AT4";
    }
    return "?";
}

AuxTask aux_task_from_name(const std::string& name) {
    if (name == "AT1") return AuxTask::AT1;
    if (name == "AT2") return AuxTask::AT2;
    if (name == "AT3") return AuxTask::AT3;
    if (name == "AT4") return AuxTask::AT4;
    fail(ErrorCode::SchemaMismatch, "unknown auxiliary task '" + name + "'");
}

// ---- dataset construction ----

AuxDataset build_aux_dataset(const std::vector<RepRecord>& records, AuxTask task,
                             std::uint64_t split_seed, const std::string& provenance) {
    if (records.empty()) fail(ErrorCode::EmptyDataset, "no representation records");
    AuxDataset out;
    out.task = task;
    out.dim = static_cast<int>(records.front().vec.size());
    out.provenance = provenance;

    Rng rng(split_seed);
    for (const auto& r : records) {
        if (static_cast<int>(r.vec.size()) != out.dim)
            fail(ErrorCode::InconsistentDimension, "representation dimensions differ");

        int label = 0;
        if (task == AuxTask::AT1 || task == AuxTask::AT2) {
            AbsoluteRegion reg = absolute_region(r.elem_bbox);
            label = task == AuxTask::AT1 ? (reg.vertical == Vertical::Top ? 1 : 0)
                                         : (reg.horizontal == Horizontal::Left ? 1 : 0);
        } else {
            if (r.element_id == r.target_id) continue; // the target pair itself
            RelativePosition rel = relative_position(r.elem_bbox, r.target_bbox);
            if (task == AuxTask::AT3) {
                if (rel.vertical == VerticalRelation::None) continue;
                label = rel.vertical == VerticalRelation::Above ? 1 : 0;
            } else {
                if (rel.horizontal == HorizontalRelation::None) continue;
                label = rel.horizontal == HorizontalRelation::Left ? 1 : 0;
            }
        }

        double u = rng.unit();
        Split split = u < 0.3 ? Split::Train : u < 0.5 ? Split::Dev : Split::Test;
        out.examples.push_back(AuxExample{r.vec, label, split});
    }

    if (out.examples.empty()) fail(ErrorCode::EmptyDataset, "every record was excluded");
    int counts[3][2] = {};
    for (const auto& e : out.examples)
        counts[static_cast<int>(e.split)][e.label]++;
    for (int s = 0; s < 3; ++s)
        if (counts[s][0] == 0 || counts[s][1] == 0)
            fail(ErrorCode::SingleClassDataset,
                 std::string("split '") + split_name(static_cast<Split>(s)) + "' of " + aux_task_name(task) +
                     " has a single class; regenerate or reseed");
    return out;
}

AuxDataset make_control(const AuxDataset& aux, std::uint64_t seed) {
    if (aux.examples.empty()) fail(ErrorCode::EmptyDataset, "control of an empty dataset");
    AuxDataset out = aux;
    out.provenance = aux.provenance.empty() ? "control" : aux.provenance + ";control";
    for (auto& e : out.examples) {
        std::uint64_t h = hash_bytes(e.vec.data(), e.vec.size() * sizeof(float), seed);
        e.label = static_cast<int>(h & 1u);
    }
    return out;
}

// ---- probe family ----

long long probe_param_count(int input_dim, const std::vector<int>& hidden) {
    long long total = 0;
    int in = input_dim;
    for (int h : hidden) {
        total += static_cast<long long>(in) * h + h;
        in = h;
    }
    total += static_cast<long long>(in) * 2 + 2;
    return total;
}

std::vector<ProbeSpec> make_probe_specs(int input_dim, const ProbeFamilyConfig& cfg) {
    if (cfg.count < 2) fail(ErrorCode::ConfigInvalid, "probe family needs at least 2 specs");
    const int d = input_dim;
    const int W = cfg.max_width;
    const long long p_min = probe_param_count(d, {});
    const long long p_max = probe_param_count(d, {W, W});
    const long long one_hidden_max = probe_param_count(d, {W});

    auto finish = [&](ProbeSpec& s, int index) {
        s.param_count = probe_param_count(d, s.hidden);
        s.epochs = cfg.epochs;
        s.learning_rate = cfg.learning_rate;
        s.batch_size = cfg.batch_size;
        s.patience = cfg.patience;
        s.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(index));
    };

    std::vector<ProbeSpec> specs;
    ProbeSpec linear;
    finish(linear, 0);
    specs.push_back(linear);

    const double ratio = static_cast<double>(p_max) / static_cast<double>(p_min);
    for (int i = 1; i < cfg.count - 1; ++i) {
        double t = static_cast<double>(p_min) *
                   std::pow(ratio, static_cast<double>(i) / static_cast<double>(cfg.count - 1));
        ProbeSpec s;
        if (t <= static_cast<double>(one_hidden_max)) {
            int w = std::max(1, static_cast<int>(std::lround((t - 2.0) / static_cast<double>(d + 3))));
            s.hidden = {std::min(w, W)};
        } else {
            double a = static_cast<double>(d + 4);
            int w = std::max(1, static_cast<int>((-a + std::sqrt(a * a + 4.0 * (t - 2.0))) / 2.0));
            s.hidden = {std::min(w, W), std::min(w, W)};
        }
        finish(s, i);
        // enforce strictly increasing parameter counts
        while (s.param_count <= specs.back().param_count) {
            for (auto& h : s.hidden) ++h;
            s.param_count = probe_param_count(d, s.hidden);
        }
        specs.push_back(s);
    }

    ProbeSpec top;
    top.hidden = {W, W};
    finish(top, cfg.count - 1);
    specs.push_back(top);
    return specs;
}

// ---- probe nets ----

template <class S>
ProbeNet<S> ProbeNet<S>::init(int in_dim, const std::vector<int>& hidden, std::uint64_t seed) {
    ProbeNet<S> net;
    net.in_dim = in_dim;
    net.hidden = hidden;
    Rng rng(seed);
    int in = in_dim;
    std::vector<int> outs(hidden);
    outs.push_back(2);
    for (int out : outs) {
        double std = std::sqrt(2.0 / static_cast<double>(in)); // rectifier-friendly
        std::vector<S> w(static_cast<std::size_t>(out) * static_cast<std::size_t>(in));
        for (auto& x : w) x = static_cast<S>(rng.normal(0.0, std));
        net.w.push_back(std::move(w));
        net.b.push_back(std::vector<S>(static_cast<std::size_t>(out), S(0)));
        in = out;
    }
    return net;
}

template <class S>
long long ProbeNet<S>::param_count() const {
    long long total = 0;
    for (std::size_t l = 0; l < w.size(); ++l)
        total += static_cast<long long>(w[l].size()) + static_cast<long long>(b[l].size());
    return total;
}

template struct ProbeNet<float>;
template struct ProbeNet<double>;

namespace {

template <class S>
struct ProbeScratch {
    std::vector<std::vector<S>> act;  // post-ReLU activations per hidden layer
    std::vector<std::vector<S>> dact; // gradients, same shapes
    S logits[2] = {0, 0};

    explicit ProbeScratch(const std::vector<int>& hidden) {
        for (int h : hidden) {
            act.push_back(std::vector<S>(static_cast<std::size_t>(h)));
            dact.push_back(std::vector<S>(static_cast<std::size_t>(h)));
        }
    }
};

template <class S>
void probe_forward(const ProbeNet<S>& net, const float* x, ProbeScratch<S>& sc) {
    const std::size_t layers = net.hidden.size();
    std::vector<S> input_buf; // only used when in != float
    const S* in = nullptr;
    std::vector<S> xin;
    if constexpr (std::is_same_v<S, float>) {
        in = x;
    } else {
        xin.assign(x, x + net.in_dim);
        in = xin.data();
    }
    int in_n = net.in_dim;
    for (std::size_t l = 0; l < layers; ++l) {
        const int out_n = net.hidden[l];
        const S* __restrict W = net.w[l].data();
        const S* __restrict B = net.b[l].data();
        S* __restrict A = sc.act[l].data();
        for (int o = 0; o < out_n; ++o) {
            const S* __restrict row = W + static_cast<std::size_t>(o) * static_cast<std::size_t>(in_n);
            S acc = B[o];
            for (int i = 0; i < in_n; ++i) acc += row[i] * in[i];
            A[o] = acc > S(0) ? acc : S(0);
        }
        in = A;
        in_n = out_n;
    }
    const S* __restrict W = net.w[layers].data();
    const S* __restrict B = net.b[layers].data();
    for (int o = 0; o < 2; ++o) {
        const S* __restrict row = W + static_cast<std::size_t>(o) * static_cast<std::size_t>(in_n);
        S acc = B[o];
        for (int i = 0; i < in_n; ++i) acc += row[i] * in[i];
        sc.logits[o] = acc;
    }
    (void)input_buf;
}

template <class S>
double probe_ce(const ProbeScratch<S>& sc, int label) {
    double l0 = static_cast<double>(sc.logits[0]), l1 = static_cast<double>(sc.logits[1]);
    double mx = std::max(l0, l1);
    double lse = mx + std::log(std::exp(l0 - mx) + std::exp(l1 - mx));
    return lse - (label == 0 ? l0 : l1);
}

template <class S>
void probe_backward(const ProbeNet<S>& net, const float* x, ProbeScratch<S>& sc, int label,
                    double scale, ProbeNet<S>& grad) {
    const std::size_t layers = net.hidden.size();
    double l0 = static_cast<double>(sc.logits[0]), l1 = static_cast<double>(sc.logits[1]);
    double mx = std::max(l0, l1);
    double e0 = std::exp(l0 - mx), e1 = std::exp(l1 - mx);
    double z = e0 + e1;
    S dlog[2] = {static_cast<S>((e0 / z - (label == 0 ? 1.0 : 0.0)) * scale),
                 static_cast<S>((e1 / z - (label == 1 ? 1.0 : 0.0)) * scale)};

    std::vector<S> xin;
    const S* last_in;
    int last_n;
    if (layers == 0) {
        if constexpr (std::is_same_v<S, float>) {
            last_in = x;
        } else {
            xin.assign(x, x + net.in_dim);
            last_in = xin.data();
        }
        last_n = net.in_dim;
    } else {
        last_in = sc.act[layers - 1].data();
        last_n = net.hidden[layers - 1];
    }

    // output layer
    if (layers > 0) std::fill(sc.dact[layers - 1].begin(), sc.dact[layers - 1].end(), S(0));
    for (int o = 0; o < 2; ++o) {
        const S* __restrict row =
            net.w[layers].data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(last_n);
        S* __restrict grow =
            grad.w[layers].data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(last_n);
        const S dk = dlog[o];
        if (layers > 0) {
            S* __restrict dprev = sc.dact[layers - 1].data();
            for (int i = 0; i < last_n; ++i) {
                grow[i] += dk * last_in[i];
                dprev[i] += row[i] * dk;
            }
        } else {
            for (int i = 0; i < last_n; ++i) grow[i] += dk * last_in[i];
        }
        grad.b[layers][static_cast<std::size_t>(o)] += dk;
    }

    // hidden layers, back to front
    for (std::size_t l = layers; l-- > 0;) {
        const int out_n = net.hidden[l];
        const S* __restrict A = sc.act[l].data();
        S* __restrict dA = sc.dact[l].data();
        for (int o = 0; o < out_n; ++o)
            if (A[o] <= S(0)) dA[o] = S(0); // ReLU gate

        const S* in;
        int in_n;
        if (l == 0) {
            if constexpr (std::is_same_v<S, float>) {
                in = x;
            } else {
                if (xin.empty()) xin.assign(x, x + net.in_dim);
                in = xin.data();
            }
            in_n = net.in_dim;
        } else {
            in = sc.act[l - 1].data();
            in_n = net.hidden[l - 1];
        }
        if (l > 0) std::fill(sc.dact[l - 1].begin(), sc.dact[l - 1].end(), S(0));
        for (int o = 0; o < out_n; ++o) {
            const S dk = dA[o];
            if (dk == S(0)) continue;
            const S* __restrict row =
                net.w[l].data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(in_n);
            S* __restrict grow =
                grad.w[l].data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(in_n);
            if (l > 0) {
                S* __restrict dprev = sc.dact[l - 1].data();
                for (int i = 0; i < in_n; ++i) {
                    grow[i] += dk * in[i];
                    dprev[i] += row[i] * dk;
                }
            } else {
                for (int i = 0; i < in_n; ++i) grow[i] += dk * in[i];
            }
            grad.b[l][static_cast<std::size_t>(o)] += dk;
        }
    }
}

template <class S>
ProbeNet<S> zeros_like(const ProbeNet<S>& net) {
    ProbeNet<S> g;
    g.in_dim = net.in_dim;
    g.hidden = net.hidden;
    for (std::size_t l = 0; l < net.w.size(); ++l) {
        g.w.push_back(std::vector<S>(net.w[l].size(), S(0)));
        g.b.push_back(std::vector<S>(net.b[l].size(), S(0)));
    }
    return g;
}

struct Adam {
    double lr, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long long t = 0;
    ProbeNet<float> m, v;

    Adam(const ProbeNet<float>& net, double lr_in) : lr(lr_in), m(zeros_like(net)), v(zeros_like(net)) {}

    void step(ProbeNet<float>& net, ProbeNet<float>& grad) {
        ++t;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t l = 0; l < net.w.size(); ++l) {
            auto update = [&](std::vector<float>& p, std::vector<float>& g, std::vector<float>& mm,
                              std::vector<float>& vv) {
                for (std::size_t i = 0; i < p.size(); ++i) {
                    const double gi = g[i];
                    const double mi = beta1 * mm[i] + (1.0 - beta1) * gi;
                    const double vi = beta2 * vv[i] + (1.0 - beta2) * gi * gi;
                    mm[i] = static_cast<float>(mi);
                    vv[i] = static_cast<float>(vi);
                    p[i] = static_cast<float>(p[i] - lr * (mi / bc1) / (std::sqrt(vi / bc2) + eps));
                    g[i] = 0.0f;
                }
            };
            update(net.w[l], grad.w[l], m.w[l], v.w[l]);
            update(net.b[l], grad.b[l], m.b[l], v.b[l]);
        }
    }
};

struct EvalResult {
    double acc = 0.0;
    double ce = 0.0;
    bool finite = true;
};

EvalResult evaluate_probe(const ProbeNet<float>& net, const AuxDataset& data,
                          const std::vector<std::size_t>& idx, ProbeScratch<float>& sc) {
    EvalResult r;
    if (idx.empty()) return r;
    double ce_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t i : idx) {
        const auto& e = data.examples[i];
        probe_forward(net, e.vec.data(), sc);
        ce_sum += probe_ce(sc, e.label);
        int pred = sc.logits[1] > sc.logits[0] ? 1 : 0;
        if (pred == e.label) ++correct;
    }
    r.acc = static_cast<double>(correct) / static_cast<double>(idx.size());
    r.ce = ce_sum / static_cast<double>(idx.size());
    r.finite = std::isfinite(r.ce);
    return r;
}

} // namespace

ProbeTrainResult train_probe(const ProbeSpec& spec, const ProbeDataView& view) {
    const AuxDataset& data = *view.data;
    std::vector<std::size_t> train_idx, dev_idx, test_idx;
    for (std::size_t i = 0; i < data.examples.size(); ++i) {
        switch (data.examples[i].split) {
            case Split::Train: train_idx.push_back(i); break;
            case Split::Dev: dev_idx.push_back(i); break;
            case Split::Test: test_idx.push_back(i); break;
        }
    }
    if (train_idx.empty()) fail(ErrorCode::EmptyDataset, "probe training split is empty");

    ProbeNet<float> net = ProbeNet<float>::init(data.dim, spec.hidden, spec.seed);
    ProbeNet<float> grad = zeros_like(net);
    ProbeScratch<float> sc(spec.hidden);
    Adam adam(net, spec.learning_rate);

    ProbeTrainResult result;
    ProbeNet<float> best = net;
    double best_metric = view.control_mode ? std::numeric_limits<double>::infinity() : -1.0;
    int since_best = 0;

    std::vector<std::size_t> order(train_idx);
    for (int epoch = 0; epoch < spec.epochs; ++epoch) {
        Rng rng(mix_seed(spec.seed, 1000u + static_cast<std::uint64_t>(epoch)));
        rng.shuffle(order);

        bool finite = true;
        for (std::size_t start = 0; start < order.size() && finite;
             start += static_cast<std::size_t>(spec.batch_size)) {
            const std::size_t bn =
                std::min(static_cast<std::size_t>(spec.batch_size), order.size() - start);
            const double scale = 1.0 / static_cast<double>(bn);
            for (std::size_t k = 0; k < bn; ++k) {
                const auto& e = data.examples[order[start + k]];
                probe_forward(net, e.vec.data(), sc);
                double loss = probe_ce(sc, e.label);
                if (!std::isfinite(loss)) {
                    finite = false;
                    break;
                }
                probe_backward(net, e.vec.data(), sc, e.label, scale, grad);
            }
            if (finite) adam.step(net, grad);
        }
        if (!finite) {
            result.failed = true;
            return result;
        }

        if (view.control_mode) {
            EvalResult tr = evaluate_probe(net, data, train_idx, sc);
            if (!tr.finite) {
                result.failed = true;
                return result;
            }
            if (tr.ce < best_metric - 1e-4) {
                best_metric = tr.ce;
                since_best = 0;
            } else if (++since_best >= spec.patience) {
                break;
            }
        } else {
            EvalResult dv = evaluate_probe(net, data, dev_idx, sc);
            if (!dv.finite) {
                result.failed = true;
                return result;
            }
            if (dv.acc > best_metric) {
                best_metric = dv.acc;
                best = net;
                since_best = 0;
            } else if (++since_best >= spec.patience) {
                break;
            }
        }
    }

    if (view.control_mode) {
        EvalResult tr = evaluate_probe(net, data, train_idx, sc);
        result.failed = !tr.finite;
        result.eval_acc = tr.acc;
        result.eval_ce = tr.ce;
    } else {
        EvalResult ts = evaluate_probe(best, data, test_idx, sc);
        result.failed = !ts.finite;
        result.eval_acc = ts.acc;
        result.eval_ce = ts.ce;
    }
    return result;
}

double selectivity(const ProbeRun& run) { return run.control_train_ce - run.aux_test_ce; }

std::vector<ProbeRun> probe_sweep(const AuxDataset& aux, const ProbeFamilyConfig& cfg) {
    if (aux.examples.empty()) fail(ErrorCode::EmptyDataset, "probe sweep on an empty dataset");
    AuxDataset control = make_control(aux, mix_seed(cfg.seed, 0xC041701ull));
    std::vector<ProbeSpec> specs = make_probe_specs(aux.dim, cfg);

    std::vector<ProbeRun> runs(specs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= specs.size()) return;
            ProbeRun& run = runs[i];
            run.spec = specs[i];
            run.index = static_cast<int>(i);
            ProbeTrainResult aux_res = train_probe(specs[i], ProbeDataView{&aux, false});
            ProbeTrainResult ctl_res = train_probe(specs[i], ProbeDataView{&control, true});
            run.failed = aux_res.failed || ctl_res.failed;
            if (!run.failed) {
                run.aux_test_acc = aux_res.eval_acc;
                run.aux_test_ce = aux_res.eval_ce;
                run.control_train_acc = ctl_res.eval_acc;
                run.control_train_ce = ctl_res.eval_ce;
                run.selectivity = selectivity(run);
            }
        }
    };

    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::stable_sort(runs.begin(), runs.end(), [](const ProbeRun& a, const ProbeRun& b) {
        if (a.spec.param_count != b.spec.param_count) return a.spec.param_count < b.spec.param_count;
        return a.index < b.index;
    });
    return runs;
}

// ---- representation files ----

std::vector<RepRecord> import_representations(const std::filesystem::path& path) {
    std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::SchemaMismatch, path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = csv_split_line(line);
    static const std::vector<std::string> prefix = {"command_id", "element_id", "target_id", "ex0",
                                                    "ex1",        "ey0",        "ey1",       "tx0",
                                                    "tx1",        "ty0",        "ty1"};
    if (header.size() <= prefix.size())
        fail(ErrorCode::SchemaMismatch, path.string() + ": missing id/bbox/vector columns");
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (header[i] != prefix[i])
            fail(ErrorCode::SchemaMismatch,
                 path.string() + ": expected column '" + prefix[i] + "', found '" + header[i] + "'");
    const std::size_t dim = header.size() - prefix.size();
    for (std::size_t i = 0; i < dim; ++i)
        if (header[prefix.size() + i] != "r" + std::to_string(i))
            fail(ErrorCode::SchemaMismatch, path.string() + ": malformed vector columns");

    std::vector<RepRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = csv_split_line(line);
        if (f.size() != header.size())
            fail(ErrorCode::InconsistentDimension,
                 path.string() + ":" + std::to_string(lineno) + ": row has " + std::to_string(f.size()) +
                     " fields, header has " + std::to_string(header.size()));
        RepRecord r;
        r.command_id = f[0];
        r.element_id = f[1];
        r.target_id = f[2];
        auto geom = [&](std::size_t i) { return static_cast<int>(parse_double(f[i])); };
        r.elem_bbox = BoundingBox{geom(3), geom(4), geom(5), geom(6)};
        r.target_bbox = BoundingBox{geom(7), geom(8), geom(9), geom(10)};
        if (!r.elem_bbox.valid() || !r.target_bbox.valid())
            fail(ErrorCode::SchemaMismatch, path.string() + ":" + std::to_string(lineno) + ": invalid bbox");
        r.vec.reserve(dim);
        for (std::size_t i = 0; i < dim; ++i) r.vec.push_back(parse_float(f[prefix.size() + i]));
        out.push_back(std::move(r));
    }
    if (out.empty()) fail(ErrorCode::SchemaMismatch, path.string() + ": no records");
    return out;
}

std::vector<RepRecord> sample_records(const std::vector<RepRecord>& records, std::size_t n,
                                      std::uint64_t seed) {
    if (n >= records.size()) return records;
    std::vector<std::size_t> idx(records.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i + rng.below(idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    std::vector<RepRecord> out;
    out.reserve(n);
    for (std::size_t i : idx) out.push_back(records[i]);
    return out;
}

// ---- sweep files ----

void save_sweep_csv(const std::filesystem::path& path, const std::vector<ProbeRun>& runs,
                    AuxTask task) {
    std::string out =
        "task,probe_index,param_count,aux_test_acc,aux_test_ce,control_train_acc,control_train_ce,"
        "selectivity,failed\n";
    for (const auto& r : runs) {
        out += aux_task_name(task);
        out += ',';
        out += std::to_string(r.index);
        out += ',';
        out += std::to_string(r.spec.param_count);
        for (double v : {r.aux_test_acc, r.aux_test_ce, r.control_train_acc, r.control_train_ce,
                         r.selectivity}) {
            out += ',';
            if (!r.failed) out += format_double(v);
        }
        out += ',';
        out += r.failed ? '1' : '0';
        out += '\n';
    }
    atomic_write_file(path, out);
}

std::vector<ProbeRun> load_sweep_csv(const std::filesystem::path& path, AuxTask* task_out) {
    std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) ||
        csv_split_line(line) !=
            std::vector<std::string>{"task", "probe_index", "param_count", "aux_test_acc", "aux_test_ce",
                                     "control_train_acc", "control_train_ce", "selectivity", "failed"})
        fail(ErrorCode::SchemaMismatch, path.string() + ": bad sweep header");
    std::vector<ProbeRun> out;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = csv_split_line(line);
        if (f.size() != 9) fail(ErrorCode::SchemaMismatch, path.string() + ": bad sweep row");
        ProbeRun r;
        if (task_out) *task_out = aux_task_from_name(f[0]);
        r.index = static_cast<int>(parse_double(f[1]));
        r.spec.param_count = static_cast<long long>(parse_double(f[2]));
        r.failed = f[8] == "1";
        if (!r.failed) {
            r.aux_test_acc = parse_double(f[3]);
            r.aux_test_ce = parse_double(f[4]);
            r.control_train_acc = parse_double(f[5]);
            r.control_train_ce = parse_double(f[6]);
            r.selectivity = parse_double(f[7]);
        }
        out.push_back(std::move(r));
    }
    return out;
}

// ---- probe gradient oracle ----

double probe_grad_check(int in_dim, const std::vector<int>& hidden, std::uint64_t seed,
                        double epsilon, int n_samples) {
    if (epsilon < 1e-6 || epsilon > 1e-3) fail(ErrorCode::ConfigInvalid, "epsilon outside [1e-6, 1e-3]");

    // synthetic batch with both labels present
    Rng rng(seed);
    const int batch = 16;
    std::vector<std::vector<float>> xs;
    std::vector<int> ys;
    for (int k = 0; k < batch; ++k) {
        std::vector<float> x(static_cast<std::size_t>(in_dim));
        for (auto& v : x) v = static_cast<float>(rng.normal(0.0, 1.0));
        xs.push_back(std::move(x));
        ys.push_back(k % 2);
    }

    ProbeNet<double> net = ProbeNet<double>::init(in_dim, hidden, mix_seed(seed, 1));
    ProbeNet<double> grad = zeros_like(net);
    ProbeScratch<double> sc(hidden);
    const double scale = 1.0 / static_cast<double>(batch);
    for (int k = 0; k < batch; ++k) {
        probe_forward(net, xs[static_cast<std::size_t>(k)].data(), sc);
        probe_backward(net, xs[static_cast<std::size_t>(k)].data(), sc, ys[static_cast<std::size_t>(k)],
                       scale, grad);
    }

    auto loss_at = [&]() {
        double sum = 0.0;
        for (int k = 0; k < batch; ++k) {
            probe_forward(net, xs[static_cast<std::size_t>(k)].data(), sc);
            sum += probe_ce(sc, ys[static_cast<std::size_t>(k)]);
        }
        return sum * scale;
    };

    // flatten access: (layer, is_bias, index)
    struct Slot {
        std::size_t layer;
        bool bias;
        std::size_t i;
    };
    std::vector<Slot> slots;
    for (std::size_t l = 0; l < net.w.size(); ++l) {
        for (std::size_t i = 0; i < net.w[l].size(); ++i) slots.push_back({l, false, i});
        for (std::size_t i = 0; i < net.b[l].size(); ++i) slots.push_back({l, true, i});
    }
    Rng pick(mix_seed(seed, 2));
    std::set<std::size_t> chosen;
    const std::size_t want = std::min(static_cast<std::size_t>(n_samples), slots.size());
    while (chosen.size() < want) chosen.insert(pick.below(slots.size()));

    double max_err = 0.0;
    for (std::size_t si : chosen) {
        const Slot& s = slots[si];
        double& p = s.bias ? net.b[s.layer][s.i] : net.w[s.layer][s.i];
        const double save = p;
        p = save + epsilon;
        const double lp = loss_at();
        p = save - epsilon;
        const double lm = loss_at();
        p = save;
        const double gf = (lp - lm) / (2.0 * epsilon);
        const double ga = s.bias ? grad.b[s.layer][s.i] : grad.w[s.layer][s.i];
        max_err = std::max(max_err, std::abs(ga - gf) / std::max(1e-8, std::abs(ga) + std::abs(gf)));
    }
    return max_err;
}

} // namespace uiground
