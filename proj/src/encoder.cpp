#include "uiground/encoder.hpp"

#include "uiground/error.hpp"
#include "uiground/io_util.hpp"
#include "uiground/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_map>

namespace uiground {

using nlohmann::json;

// ---- tokenization ----

std::vector<std::string> tokenize_words(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

Vocab Vocab::build(const std::vector<std::string>& texts) {
    std::set<std::string> unique;
    for (const auto& t : texts)
        for (auto& w : tokenize_words(t)) unique.insert(std::move(w));

    Vocab v;
    v.tokens = {"<pad>", "<unk>", "<sep>"};
    for (const auto& w : unique) v.tokens.push_back(w);
    for (std::size_t i = 0; i < v.tokens.size(); ++i) v.index[v.tokens[i]] = static_cast<int>(i);
    return v;
}

int Vocab::lookup(const std::string& token) const {
    auto it = index.find(token);
    return it == index.end() ? kUnk : it->second;
}

std::vector<int> tokenize(const std::string& text, const Vocab& vocab) {
    std::vector<int> out;
    for (const auto& w : tokenize_words(text)) {
        if (static_cast<int>(out.size()) >= kMaxTokens) break;
        out.push_back(vocab.lookup(w));
    }
    return out;
}

// ---- model ----

const char* model_kind_name(ModelKind k) {
    return k == ModelKind::TextOnly ? "text" : "layout";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "text") return ModelKind::TextOnly;
    if (name == "layout") return ModelKind::LayoutAware;
    fail(ErrorCode::SchemaMismatch, "unknown model kind '" + name + "'");
}

int ScorerModel::coord_bucket(int coord) const {
    // bucket 0 is reserved for the command side; coordinates use 1..B-1
    int c = std::clamp(coord, 0, kGridMax);
    return 1 + c * (buckets - 1) / (kGridMax + 1);
}

ScorerModel ScorerModel::init(ModelKind kind, Vocab vocab, const ModelConfig& cfg) {
    if (cfg.dim < 1 || cfg.coord_buckets < 1)
        fail(ErrorCode::ConfigInvalid, "dim and coord_buckets must be positive");

    ScorerModel m;
    m.kind = kind;
    m.vocab = std::move(vocab);
    m.dim = cfg.dim;
    m.buckets = cfg.coord_buckets;
    m.init_seed = cfg.init_seed;
    m.train_zero_bucket = cfg.train_zero_bucket;

    const std::size_t d = static_cast<std::size_t>(m.dim);
    const std::size_t v = static_cast<std::size_t>(m.vocab.size());
    const std::size_t b = static_cast<std::size_t>(m.buckets);

    std::size_t cursor = 0;
    m.off_tok = cursor;
    cursor += v * d;
    for (int t = 0; t < 4; ++t) {
        m.off_coord[static_cast<std::size_t>(t)] = cursor;
        if (kind == ModelKind::LayoutAware) cursor += b * d;
    }
    m.off_w1 = cursor;
    cursor += d * d;
    m.off_b1 = cursor;
    cursor += d;
    m.off_w2 = cursor;
    cursor += 2 * d;
    m.off_b2 = cursor;
    cursor += 2;
    m.params.assign(cursor, 0.0f);

    Rng rng(cfg.init_seed);
    const double emb_std = cfg.emb_init_std;
    for (std::size_t i = 0; i < v * d; ++i)
        m.params[m.off_tok + i] = static_cast<float>(rng.normal(0.0, emb_std));
    if (kind == ModelKind::LayoutAware)
        for (int t = 0; t < 4; ++t)
            for (std::size_t i = 0; i < b * d; ++i) {
                float v = static_cast<float>(rng.normal(0.0, cfg.coord_init_std));
                if (i < d && !cfg.train_zero_bucket) v = 0.0f; // zero-coordinate bucket row
                m.params[m.off_coord[static_cast<std::size_t>(t)] + i] = v;
            }
    const double w1_std = 1.0 / std::sqrt(static_cast<double>(m.dim));
    for (std::size_t i = 0; i < d * d; ++i)
        m.params[m.off_w1 + i] = static_cast<float>(rng.normal(0.0, w1_std));
    for (std::size_t i = 0; i < 2 * d; ++i)
        m.params[m.off_w2 + i] = static_cast<float>(rng.normal(0.0, 0.01));
    return m;
}

// ---- math kernels ----
// Templated on the parameter scalar: float in production, double for the
// finite-difference oracle, so the checked algorithm is the shipped one.

namespace {

template <class S>
struct Workspace {
    std::vector<S> pooled, rep, dpre, dpooled;
    std::vector<std::size_t> touched_rows; // embedding-row offsets hit by backward
    S logits[2] = {0, 0};

    explicit Workspace(int dim)
        : pooled(static_cast<std::size_t>(dim)),
          rep(static_cast<std::size_t>(dim)),
          dpre(static_cast<std::size_t>(dim)),
          dpooled(static_cast<std::size_t>(dim)) {}
};

template <class S>
void forward_pair(const ScorerModel& m, const S* P, const EncodedPair& ep, Workspace<S>& ws) {
    const int d = m.dim;
    const std::size_t len = ep.tokens.size();
    std::fill(ws.pooled.begin(), ws.pooled.end(), S(0));
    const bool layout = m.kind == ModelKind::LayoutAware;

    for (std::size_t pos = 0; pos < len; ++pos) {
        const S* __restrict e =
            P + m.off_tok + static_cast<std::size_t>(ep.tokens[pos]) * static_cast<std::size_t>(d);
        S* __restrict pooled = ws.pooled.data();
        for (int i = 0; i < d; ++i) pooled[i] += e[i];
    }
    if (layout) {
        // every element token adds the same four bucket rows, every command
        // token (and the separator) the four zero-coordinate rows; add each
        // row once, scaled by its multiplicity
        const S n_cmd_sep = static_cast<S>(ep.n_cmd + 1);
        const S n_elem = static_cast<S>(len - static_cast<std::size_t>(ep.n_cmd) - 1);
        S* __restrict pooled = ws.pooled.data();
        for (int t = 0; t < 4; ++t) {
            const std::size_t table = m.off_coord[static_cast<std::size_t>(t)];
            const S* __restrict zero_row = P + table;
            const S* __restrict elem_row =
                P + table +
                static_cast<std::size_t>(ep.bucket[static_cast<std::size_t>(t)]) * static_cast<std::size_t>(d);
            for (int i = 0; i < d; ++i) pooled[i] += n_cmd_sep * zero_row[i] + n_elem * elem_row[i];
        }
    }
    const S inv_len = S(1) / static_cast<S>(len);
    for (auto& x : ws.pooled) x *= inv_len;

    for (int j = 0; j < d; ++j) {
        const S* __restrict w = P + m.off_w1 + static_cast<std::size_t>(j) * static_cast<std::size_t>(d);
        const S* __restrict pooled = ws.pooled.data();
        S acc = P[m.off_b1 + static_cast<std::size_t>(j)];
        for (int i = 0; i < d; ++i) acc += w[i] * pooled[i];
        ws.rep[static_cast<std::size_t>(j)] = std::tanh(acc);
    }
    for (int k = 0; k < 2; ++k) {
        const S* __restrict w = P + m.off_w2 + static_cast<std::size_t>(k) * static_cast<std::size_t>(d);
        const S* __restrict rep = ws.rep.data();
        S acc = P[m.off_b2 + static_cast<std::size_t>(k)];
        for (int i = 0; i < d; ++i) acc += w[i] * rep[i];
        ws.logits[k] = acc;
    }
}

template <class S>
double ce_loss(const S* logits, int label) {
    double l0 = static_cast<double>(logits[0]), l1 = static_cast<double>(logits[1]);
    double mx = std::max(l0, l1);
    double lse = mx + std::log(std::exp(l0 - mx) + std::exp(l1 - mx));
    return lse - (label == 0 ? l0 : l1);
}

// accumulates d(scale * loss)/dP into G (same flat layout as P)
template <class S>
void backward_pair(const ScorerModel& m, const S* P, const EncodedPair& ep, Workspace<S>& ws,
                   double scale, S* G) {
    const int d = m.dim;
    const std::size_t len = ep.tokens.size();
    const bool layout = m.kind == ModelKind::LayoutAware;

    double mx = std::max(static_cast<double>(ws.logits[0]), static_cast<double>(ws.logits[1]));
    double e0 = std::exp(static_cast<double>(ws.logits[0]) - mx);
    double e1 = std::exp(static_cast<double>(ws.logits[1]) - mx);
    double z = e0 + e1;
    S dlog[2] = {static_cast<S>((e0 / z - (ep.label == 0 ? 1.0 : 0.0)) * scale),
                 static_cast<S>((e1 / z - (ep.label == 1 ? 1.0 : 0.0)) * scale)};

    std::fill(ws.dpre.begin(), ws.dpre.end(), S(0));
    for (int k = 0; k < 2; ++k) {
        const S* __restrict w = P + m.off_w2 + static_cast<std::size_t>(k) * static_cast<std::size_t>(d);
        S* __restrict gw = G + m.off_w2 + static_cast<std::size_t>(k) * static_cast<std::size_t>(d);
        S* __restrict dpre = ws.dpre.data();
        const S* __restrict rep = ws.rep.data();
        const S dk = dlog[k];
        for (int i = 0; i < d; ++i) {
            gw[i] += dk * rep[i];
            dpre[i] += w[i] * dk;
        }
        G[m.off_b2 + static_cast<std::size_t>(k)] += dk;
    }
    for (int j = 0; j < d; ++j) {
        S r = ws.rep[static_cast<std::size_t>(j)];
        ws.dpre[static_cast<std::size_t>(j)] *= S(1) - r * r;
    }
    std::fill(ws.dpooled.begin(), ws.dpooled.end(), S(0));
    for (int j = 0; j < d; ++j) {
        const S coeff = ws.dpre[static_cast<std::size_t>(j)];
        const S* __restrict w = P + m.off_w1 + static_cast<std::size_t>(j) * static_cast<std::size_t>(d);
        S* __restrict gw = G + m.off_w1 + static_cast<std::size_t>(j) * static_cast<std::size_t>(d);
        const S* __restrict pooled = ws.pooled.data();
        S* __restrict dpooled = ws.dpooled.data();
        for (int i = 0; i < d; ++i) {
            gw[i] += coeff * pooled[i];
            dpooled[i] += w[i] * coeff;
        }
        G[m.off_b1 + static_cast<std::size_t>(j)] += coeff;
    }
    const S inv_len = S(1) / static_cast<S>(len);
    for (auto& x : ws.dpooled) x *= inv_len;
    for (std::size_t pos = 0; pos < len; ++pos) {
        const std::size_t tok_row =
            m.off_tok + static_cast<std::size_t>(ep.tokens[pos]) * static_cast<std::size_t>(d);
        ws.touched_rows.push_back(tok_row);
        S* __restrict ge = G + tok_row;
        const S* __restrict dpooled = ws.dpooled.data();
        for (int i = 0; i < d; ++i) ge[i] += dpooled[i];
    }
    if (layout) {
        const S n_cmd_sep = static_cast<S>(ep.n_cmd + 1);
        const S n_elem = static_cast<S>(len - static_cast<std::size_t>(ep.n_cmd) - 1);
        const S* __restrict dpooled = ws.dpooled.data();
        for (int t = 0; t < 4; ++t) {
            const std::size_t table = m.off_coord[static_cast<std::size_t>(t)];
            const std::size_t elem_row =
                table +
                static_cast<std::size_t>(ep.bucket[static_cast<std::size_t>(t)]) * static_cast<std::size_t>(d);
            ws.touched_rows.push_back(table);
            S* __restrict gz = G + table;
            for (int i = 0; i < d; ++i) gz[i] += n_cmd_sep * dpooled[i];
            if (elem_row != table) {
                ws.touched_rows.push_back(elem_row);
                S* __restrict gc = G + elem_row;
                for (int i = 0; i < d; ++i) gc[i] += n_elem * dpooled[i];
            } else {
                for (int i = 0; i < d; ++i) gz[i] += n_elem * dpooled[i];
            }
        }
    }
}

} // namespace

// ---- pair encoding and scoring ----

EncodedPair encode_input(const ScorerModel& model, const std::string& command_phrase,
                         const UIElement& element, int label) {
    EncodedPair ep;
    std::vector<int> cmd = tokenize(command_phrase, model.vocab);
    if (cmd.empty()) fail(ErrorCode::EmptyCommand, "command phrase has no tokens: '" + command_phrase + "'");
    std::vector<int> elem = tokenize(element.text, model.vocab);

    ep.n_cmd = static_cast<int>(cmd.size());
    ep.tokens = std::move(cmd);
    ep.tokens.push_back(Vocab::kSep);
    ep.tokens.insert(ep.tokens.end(), elem.begin(), elem.end());
    ep.bucket = {model.coord_bucket(element.bbox.x0), model.coord_bucket(element.bbox.x1),
                 model.coord_bucket(element.bbox.y0), model.coord_bucket(element.bbox.y1)};
    ep.label = label;
    return ep;
}

Representation encode_pair(const ScorerModel& model, const std::string& command_phrase,
                           const UIElement& element) {
    EncodedPair ep = encode_input(model, command_phrase, element);
    Workspace<float> ws(model.dim);
    forward_pair(model, model.params.data(), ep, ws);
    Representation rep;
    rep.values.reserve(ws.rep.size());
    for (float v : ws.rep) {
        if (!std::isfinite(v)) fail(ErrorCode::NonFiniteLoss, "non-finite representation");
        rep.values.push_back(static_cast<double>(v));
    }
    return rep;
}

ScoreResult score(const ScorerModel& model, const Representation& rep) {
    if (static_cast<int>(rep.values.size()) != model.dim)
        fail(ErrorCode::DimensionMismatch,
             "representation has dimension " + std::to_string(rep.values.size()) + ", model expects " +
                 std::to_string(model.dim));
    const float* P = model.params.data();
    ScoreResult r;
    for (int k = 0; k < 2; ++k) {
        const float* w = P + model.off_w2 + static_cast<std::size_t>(k) * static_cast<std::size_t>(model.dim);
        double acc = static_cast<double>(P[model.off_b2 + static_cast<std::size_t>(k)]);
        for (int i = 0; i < model.dim; ++i)
            acc += static_cast<double>(w[i]) * rep.values[static_cast<std::size_t>(i)];
        r.logits[static_cast<std::size_t>(k)] = acc;
    }
    double mx = std::max(r.logits[0], r.logits[1]);
    double e0 = std::exp(r.logits[0] - mx), e1 = std::exp(r.logits[1] - mx);
    r.prob_relevant = e1 / (e0 + e1);
    r.relevance = r.logits[1] - r.logits[0];
    return r;
}

GroundResult ground_scored(const ScorerModel& model, const Screen& screen, const Command& command) {
    if (screen.elements.empty()) fail(ErrorCode::EmptyScreen, "screen '" + screen.id + "' has no elements");
    GroundResult best;
    for (std::size_t i = 0; i < screen.elements.size(); ++i) {
        Representation rep = encode_pair(model, command.phrase, screen.elements[i]);
        ScoreResult s = score(model, rep);
        if (best.element_index < 0 || s.relevance > best.relevance) {
            best.element_index = static_cast<int>(i);
            best.element_id = screen.elements[i].id;
            best.relevance = s.relevance;
            best.prob_relevant = s.prob_relevant;
        }
    }
    return best;
}

std::string ground(const ScorerModel& model, const Screen& screen, const Command& command) {
    return ground_scored(model, screen, command).element_id;
}

// ---- training ----

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) fail(ErrorCode::ConfigInvalid, "learning_rate must be positive");
    if (epochs < 1) fail(ErrorCode::ConfigInvalid, "epochs must be at least 1");
    if (batch_size < 1) fail(ErrorCode::ConfigInvalid, "batch_size must be at least 1");
}

PairDataset encode_pairs(const ScorerModel& model, const std::vector<Screen>& screens,
                         const std::vector<Command>& commands,
                         const std::vector<PairInstance>& pairs) {
    std::unordered_map<std::string, const Screen*> screen_by_id;
    for (const auto& s : screens) screen_by_id[s.id] = &s;
    std::unordered_map<std::string, const Command*> command_by_id;
    for (const auto& c : commands) command_by_id[c.id] = &c;

    PairDataset out;
    out.items.reserve(pairs.size());
    for (const auto& p : pairs) {
        auto cit = command_by_id.find(p.command_id);
        if (cit == command_by_id.end())
            fail(ErrorCode::DanglingScreenReference, "pair references unknown command '" + p.command_id + "'");
        const Command& c = *cit->second;
        auto sit = screen_by_id.find(c.screen_id);
        if (sit == screen_by_id.end())
            fail(ErrorCode::DanglingScreenReference, "command '" + c.id + "' references unknown screen");
        const UIElement* e = sit->second->find(p.element_id);
        if (!e)
            fail(ErrorCode::DanglingScreenReference,
                 "pair references unknown element '" + p.element_id + "' on screen '" + c.screen_id + "'");
        out.items.push_back(encode_input(model, c.phrase, *e, p.label));
    }
    return out;
}

double mean_loss(const ScorerModel& model, const PairDataset& data) {
    if (data.items.empty()) fail(ErrorCode::EmptyDataset, "no pairs to evaluate");
    Workspace<float> ws(model.dim);
    double sum = 0.0;
    for (const auto& ep : data.items) {
        forward_pair(model, model.params.data(), ep, ws);
        sum += ce_loss(ws.logits, ep.label);
    }
    return sum / static_cast<double>(data.items.size());
}

std::vector<double> train(ScorerModel& model, const PairDataset& data, const TrainConfig& cfg) {
    cfg.validate();
    if (data.items.empty()) fail(ErrorCode::EmptyDataset, "no pairs to train on");

    const std::size_t n = data.items.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::vector<float> grad(model.params.size(), 0.0f);
    Workspace<float> ws(model.dim);
    std::vector<double> losses;
    const std::size_t d = static_cast<std::size_t>(model.dim);
    const std::size_t head_begin = model.off_w1; // w1/b1/w2/b2 are always dense

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
        rng.shuffle(order);

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t bn = std::min(static_cast<std::size_t>(cfg.batch_size), n - start);
            const double scale = 1.0 / static_cast<double>(bn);
            ws.touched_rows.clear();
            for (std::size_t k = 0; k < bn; ++k) {
                const EncodedPair& ep = data.items[order[start + k]];
                forward_pair(model, model.params.data(), ep, ws);
                loss_sum += ce_loss(ws.logits, ep.label);
                backward_pair(model, model.params.data(), ep, ws, scale, grad.data());
            }
            std::sort(ws.touched_rows.begin(), ws.touched_rows.end());
            ws.touched_rows.erase(std::unique(ws.touched_rows.begin(), ws.touched_rows.end()),
                                  ws.touched_rows.end());
            const float step = static_cast<float>(cfg.learning_rate);
            for (std::size_t row : ws.touched_rows) {
                float* __restrict p = model.params.data() + row;
                float* __restrict g = grad.data() + row;
                const bool frozen = !model.train_zero_bucket &&
                                    model.kind == ModelKind::LayoutAware &&
                                    (row == model.off_coord[0] || row == model.off_coord[1] ||
                                     row == model.off_coord[2] || row == model.off_coord[3]);
                for (std::size_t i = 0; i < d; ++i) {
                    if (!frozen) p[i] -= step * g[i];
                    g[i] = 0.0f;
                }
            }
            {
                float* __restrict p = model.params.data() + head_begin;
                float* __restrict g = grad.data() + head_begin;
                const std::size_t nh = grad.size() - head_begin;
                for (std::size_t i = 0; i < nh; ++i) {
                    p[i] -= step * g[i];
                    g[i] = 0.0f;
                }
            }
        }
        const double mean = loss_sum / static_cast<double>(n);
        if (!std::isfinite(mean))
            fail(ErrorCode::NonFiniteLoss, "training diverged at epoch " + std::to_string(epoch));
        losses.push_back(mean);
    }
    return losses;
}

double grad_check(const ScorerModel& model, const PairDataset& batch, double epsilon, int n_samples,
                  std::uint64_t seed) {
    if (epsilon < 1e-6 || epsilon > 1e-3) fail(ErrorCode::ConfigInvalid, "epsilon outside [1e-6, 1e-3]");
    if (batch.items.empty()) fail(ErrorCode::EmptyDataset, "grad_check needs a nonempty batch");

    std::vector<double> P(model.params.begin(), model.params.end());
    std::vector<double> G(P.size(), 0.0);
    Workspace<double> ws(model.dim);
    const double scale = 1.0 / static_cast<double>(batch.items.size());
    for (const auto& ep : batch.items) {
        forward_pair(model, P.data(), ep, ws);
        backward_pair(model, P.data(), ep, ws, scale, G.data());
    }

    auto loss_at = [&]() {
        double sum = 0.0;
        for (const auto& ep : batch.items) {
            forward_pair(model, P.data(), ep, ws);
            sum += ce_loss(ws.logits, ep.label);
        }
        return sum * scale;
    };

    Rng rng(seed);
    std::set<std::size_t> picked;
    const std::size_t want = std::min(static_cast<std::size_t>(n_samples), P.size());
    while (picked.size() < want) picked.insert(rng.below(P.size()));

    double max_err = 0.0;
    for (std::size_t idx : picked) {
        const double save = P[idx];
        P[idx] = save + epsilon;
        const double lp = loss_at();
        P[idx] = save - epsilon;
        const double lm = loss_at();
        P[idx] = save;
        const double gf = (lp - lm) / (2.0 * epsilon);
        const double err = std::abs(G[idx] - gf) / std::max(1e-8, std::abs(G[idx]) + std::abs(gf));
        max_err = std::max(max_err, err);
    }
    return max_err;
}

// ---- files ----

void export_representations(const ScorerModel& model, const std::vector<Screen>& screens,
                            const std::vector<Command>& commands,
                            const std::vector<PairInstance>& pairs,
                            const std::filesystem::path& path) {
    std::unordered_map<std::string, const Screen*> screen_by_id;
    for (const auto& s : screens) screen_by_id[s.id] = &s;
    std::unordered_map<std::string, const Command*> command_by_id;
    for (const auto& c : commands) command_by_id[c.id] = &c;

    std::string out = "command_id,element_id,target_id,ex0,ex1,ey0,ey1,tx0,tx1,ty0,ty1";
    for (int i = 0; i < model.dim; ++i) out += ",r" + std::to_string(i);
    out += '\n';

    Workspace<float> ws(model.dim);
    for (const auto& p : pairs) {
        auto cit = command_by_id.find(p.command_id);
        if (cit == command_by_id.end())
            fail(ErrorCode::DanglingScreenReference, "pair references unknown command '" + p.command_id + "'");
        const Command& c = *cit->second;
        auto sit = screen_by_id.find(c.screen_id);
        if (sit == screen_by_id.end())
            fail(ErrorCode::DanglingScreenReference, "command '" + c.id + "' references unknown screen");
        const UIElement* elem = sit->second->find(p.element_id);
        const UIElement* target = sit->second->find(c.target_id);
        if (!elem || !target)
            fail(ErrorCode::DanglingScreenReference, "pair for command '" + c.id + "' references unknown element");

        EncodedPair ep = encode_input(model, c.phrase, *elem, p.label);
        forward_pair(model, model.params.data(), ep, ws);

        out += csv_escape(p.command_id);
        out += ',';
        out += csv_escape(p.element_id);
        out += ',';
        out += csv_escape(c.target_id);
        const BoundingBox& eb = elem->bbox;
        const BoundingBox& tb = target->bbox;
        for (int v : {eb.x0, eb.x1, eb.y0, eb.y1, tb.x0, tb.x1, tb.y0, tb.y1}) {
            out += ',';
            out += std::to_string(v);
        }
        for (float v : ws.rep) {
            out += ',';
            out += format_float(v);
        }
        out += '\n';
    }
    atomic_write_file(path, out);
}

void save_checkpoint(const ScorerModel& model, const std::filesystem::path& path) {
    json j;
    j["format"] = "uiground-scorer-v1";
    j["kind"] = model_kind_name(model.kind);
    j["dim"] = model.dim;
    j["buckets"] = model.buckets;
    j["init_seed"] = model.init_seed;
    j["train_zero_bucket"] = model.train_zero_bucket;
    j["vocab"] = json::array();
    for (const auto& t : model.vocab.tokens) j["vocab"].push_back(t);
    json params = json::array();
    for (float p : model.params) params.push_back(static_cast<double>(p));
    j["params"] = std::move(params);
    atomic_write_file(path, j.dump());
}

ScorerModel load_checkpoint(const std::filesystem::path& path) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("format", "") != "uiground-scorer-v1")
        fail(ErrorCode::SchemaMismatch, path.string() + ": not a scorer checkpoint");
    for (const char* key : {"kind", "dim", "buckets", "init_seed", "vocab", "params"})
        if (!j.contains(key)) fail(ErrorCode::SchemaMismatch, path.string() + ": missing field " + std::string(key));

    Vocab v;
    for (const auto& t : j["vocab"]) v.tokens.push_back(t.get<std::string>());
    if (v.tokens.size() < 3 || v.tokens[0] != "<pad>" || v.tokens[1] != "<unk>" || v.tokens[2] != "<sep>")
        fail(ErrorCode::SchemaMismatch, path.string() + ": malformed vocab");
    for (std::size_t i = 0; i < v.tokens.size(); ++i) v.index[v.tokens[i]] = static_cast<int>(i);

    ModelConfig cfg;
    cfg.dim = j["dim"].get<int>();
    cfg.coord_buckets = j["buckets"].get<int>();
    cfg.init_seed = j["init_seed"].get<std::uint64_t>();
    cfg.train_zero_bucket = j.value("train_zero_bucket", false);
    ScorerModel m = ScorerModel::init(model_kind_from_name(j["kind"].get<std::string>()), std::move(v), cfg);

    const auto& params = j["params"];
    if (!params.is_array() || params.size() != m.params.size())
        fail(ErrorCode::SchemaMismatch, path.string() + ": parameter count mismatch");
    for (std::size_t i = 0; i < m.params.size(); ++i)
        m.params[i] = static_cast<float>(params[i].get<double>());
    return m;
}

} // namespace uiground
