#include "uiground/datagen.hpp"

#include "uiground/error.hpp"
#include "uiground/io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace uiground {

using nlohmann::json;

// ---- config ----

void GenConfig::validate() const {
    if (screens <= 0) fail(ErrorCode::ConfigInvalid, "screens must be positive");
    if (commands_per_screen <= 0) fail(ErrorCode::ConfigInvalid, "commands_per_screen must be positive");
    if (elements_min < 1 || elements_max < elements_min)
        fail(ErrorCode::ConfigInvalid, "elements_per_screen range is empty");
    if (grid_rows < 1 || grid_cols < 1) fail(ErrorCode::ConfigInvalid, "grid must be at least 1x1");
    if (elements_max > grid_rows * grid_cols)
        fail(ErrorCode::GridCapacityExceeded,
             "elements_max " + std::to_string(elements_max) + " exceeds grid capacity " +
                 std::to_string(grid_rows * grid_cols));
    double sum = mix_extractive + mix_absolute + mix_relative;
    if (mix_extractive < 0 || mix_absolute < 0 || mix_relative < 0 || std::abs(sum - 1.0) > 1e-9)
        fail(ErrorCode::ConfigInvalid, "command mix must be nonnegative and sum to 1");
    if (effective_lexicon().size() < 2) fail(ErrorCode::ConfigInvalid, "lexicon too small");
}

const std::vector<std::string>& GenConfig::effective_lexicon() const {
    return lexicon.empty() ? default_lexicon() : lexicon;
}

const std::vector<std::string>& default_lexicon() {
    static const std::vector<std::string> words = {
        "cancel", "ok", "settings", "search", "home", "back", "next", "done", "save", "delete",
        "edit", "share", "menu", "profile", "login", "logout", "signup", "register", "username",
        "password", "email", "phone", "camera", "gallery", "photos", "videos", "music", "player",
        "volume", "brightness", "wifi", "bluetooth", "airplane", "battery", "storage", "display",
        "sound", "notifications", "privacy", "security", "location", "language", "keyboard",
        "accessibility", "about", "update", "version", "help", "support", "feedback", "contact",
        "terms", "policy", "account", "payment", "wallet", "card", "bank", "transfer", "balance",
        "history", "orders", "cart", "checkout", "shipping", "address", "city", "country",
        "zipcode", "name", "surname", "birthday", "gender", "calendar", "clock", "alarm", "timer",
        "stopwatch", "weather", "maps", "directions", "compass", "notes", "reminders", "tasks",
        "files", "downloads", "documents", "folder", "archive", "trash", "inbox", "outbox",
        "drafts", "sent", "spam", "compose", "reply", "forward", "attach", "send", "receive",
        "sync", "backup", "restore", "reset", "install", "uninstall", "apps", "store", "games",
        "books", "news", "sports", "finance", "stocks", "calculator", "converter", "translator",
        "dictionary", "browser", "tabs", "bookmarks", "favorites", "likes", "comments", "posts",
        "stories", "feed", "explore", "trending", "live", "stream", "podcast", "radio",
        "playlist", "shuffle", "repeat", "pause", "play", "stop", "record", "mute", "unmute",
        "call", "dial", "contacts", "messages", "chat", "groups", "channels", "status", "avatar",
        "theme", "dark", "light", "font", "color", "wallpaper", "widgets", "shortcuts",
        "gestures", "vibration", "ringtone", "silent", "filter", "sort", "refresh", "reload",
        "upload", "import", "export", "print", "scan", "copy", "paste", "cut", "undo", "redo",
        "zoom", "rotate", "crop", "resize", "brush", "eraser", "pencil", "draw", "shapes",
        "layers", "effects", "adjust", "contrast", "saturation", "exposure", "temperature",
        "tint", "blur", "sharpen", "preset", "apply", "confirm", "submit", "continue", "skip",
        "finish", "start", "begin", "exit", "close", "open", "agenda", "invite", "meeting",
        "events", "holidays", "subscriptions", "premium", "upgrade", "trial", "plans", "pricing",
        "invoice", "receipt", "refund", "coupon", "rewards", "points", "badges", "levels",
        "achievements", "leaderboard", "friends", "followers", "following", "labels", "tags",
        "categories", "sections", "overview", "summary", "details", "preview", "editor",
    };
    return words;
}

const std::vector<std::string>& template_words() {
    static const std::vector<std::string> words = {
        "click", "on",   "the",     "button",  "tap",     "select",  "press",   "element",
        "at",    "top",  "bottom",  "left",    "right",   "item",    "in",      "corner",
        "control", "of", "screen",  "topmost", "bottommost", "leftmost", "rightmost",
        "choose", "to",  "above",   "below",
    };
    return words;
}

const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Dev: return "dev";
        case Split::Test: return "test";
    }
    return "?";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "dev") return Split::Dev;
    if (name == "test") return Split::Test;
    fail(ErrorCode::SchemaMismatch, "unknown split '" + name + "'");
}

// ---- screen generation ----

Screen generate_screen(Rng& rng, const GenConfig& cfg, const std::string& screen_id) {
    const auto& lexicon = cfg.effective_lexicon();
    const int capacity = cfg.grid_rows * cfg.grid_cols;
    const int n = cfg.elements_min + rng.below_int(cfg.elements_max - cfg.elements_min + 1);
    if (n > capacity)
        fail(ErrorCode::GridCapacityExceeded,
             std::to_string(n) + " elements on a " + std::to_string(capacity) + "-cell grid");

    // pick n distinct cells, keep row-major order
    std::vector<int> cells(capacity);
    for (int i = 0; i < capacity; ++i) cells[i] = i;
    for (int i = 0; i < n; ++i) {
        int j = i + rng.below_int(capacity - i);
        std::swap(cells[i], cells[j]);
    }
    cells.resize(n);
    std::sort(cells.begin(), cells.end());

    constexpr int kMargin = 4; // keeps centers strictly inside cells
    Screen s;
    s.id = screen_id;
    s.source_width = kGridMax;
    s.source_height = kGridMax;
    for (int k = 0; k < n; ++k) {
        const int row = cells[k] / cfg.grid_cols;
        const int col = cells[k] % cfg.grid_cols;
        const int cx0 = col * kGridMax / cfg.grid_cols;
        const int cx1 = (col + 1) * kGridMax / cfg.grid_cols;
        const int cy0 = row * kGridMax / cfg.grid_rows;
        const int cy1 = (row + 1) * kGridMax / cfg.grid_rows;

        const int avail_w = cx1 - cx0 - 2 * kMargin;
        const int avail_h = cy1 - cy0 - 2 * kMargin;
        const int min_w = std::max(1, avail_w / 3);
        const int min_h = std::max(1, avail_h / 3);
        const int w = min_w + rng.below_int(avail_w - min_w + 1);
        const int h = min_h + rng.below_int(avail_h - min_h + 1);
        const int x0 = cx0 + kMargin + rng.below_int(avail_w - w + 1);
        const int y0 = cy0 + kMargin + rng.below_int(avail_h - h + 1);

        UIElement e;
        e.id = "e" + std::to_string(k);
        e.text = lexicon[rng.below(lexicon.size())];
        e.bbox = BoundingBox{x0, x0 + w, y0, y0 + h};
        s.elements.push_back(std::move(e));
    }
    s.validate();
    return s;
}

// ---- command generation ----

namespace {

// elements whose nonempty text occurs exactly once on the screen
std::vector<int> uniquely_named_indices(const Screen& screen) {
    std::unordered_map<std::string, int> counts;
    for (const auto& e : screen.elements)
        if (!e.text.empty()) counts[e.text]++;
    std::vector<int> out;
    for (std::size_t i = 0; i < screen.elements.size(); ++i) {
        const auto& e = screen.elements[i];
        if (!e.text.empty() && counts[e.text] == 1) out.push_back(static_cast<int>(i));
    }
    return out;
}

std::string fill(const std::string& tmpl, const std::string& key, const std::string& value) {
    std::string out = tmpl;
    auto pos = out.find(key);
    out.replace(pos, key.size(), value);
    return out;
}

// exact center comparisons (sums), matching relative_position
int cx2(const BoundingBox& b) { return b.x0 + b.x1; }
int cy2(const BoundingBox& b) { return b.y0 + b.y1; }

enum class Direction { Left, Right, Above, Below };

const char* direction_word(Direction d) {
    switch (d) {
        case Direction::Left: return "left";
        case Direction::Right: return "right";
        case Direction::Above: return "above";
        case Direction::Below: return "below";
    }
    return "?";
}

// true when `e` lies strictly in direction `d` of `a`
bool in_direction(const BoundingBox& e, const BoundingBox& a, Direction d) {
    switch (d) {
        case Direction::Left: return cx2(e) < cx2(a);
        case Direction::Right: return cx2(e) > cx2(a);
        case Direction::Above: return cy2(e) < cy2(a);
        case Direction::Below: return cy2(e) > cy2(a);
    }
    return false;
}

long long center_dist2(const BoundingBox& a, const BoundingBox& b) {
    long long dx = cx2(a) - cx2(b);
    long long dy = cy2(a) - cy2(b);
    return dx * dx + dy * dy;
}

} // namespace

Command gen_extractive(const Screen& screen, Rng& rng, const std::string& command_id) {
    static const std::vector<std::string> templates = {
        "click on the {t} button",
        "tap {t}",
        "select {t}",
        "press the {t} button",
    };
    auto candidates = uniquely_named_indices(screen);
    if (candidates.empty())
        fail(ErrorCode::NoUniquelyNamedElement, "screen '" + screen.id + "' has no uniquely named element");
    const auto& target = screen.elements[static_cast<std::size_t>(
        candidates[rng.below_int(static_cast<int>(candidates.size()))])];
    const auto& tmpl = templates[rng.below(templates.size())];

    Command c;
    c.id = command_id;
    c.phrase = fill(tmpl, "{t}", target.text);
    c.screen_id = screen.id;
    c.target_id = target.id;
    c.reasoning = Reasoning::Extractive;
    return c;
}

Command gen_absolute(const Screen& screen, Rng& rng, const std::string& command_id) {
    static const std::vector<std::string> quadrant_templates = {
        "click the element at the {v} {h}",
        "tap the item in the {v} {h} corner",
        "select the control at the {v} {h} of the screen",
    };
    static const std::vector<std::string> superlative_templates = {
        "tap the {s} item",
        "click the {s} element",
        "choose the {s} control",
    };

    struct Cand {
        bool superlative;
        std::string v, h, s;
        int target;
    };
    std::vector<Cand> candidates;

    // quadrants with exactly one occupant
    for (Vertical v : {Vertical::Top, Vertical::Bottom}) {
        for (Horizontal h : {Horizontal::Left, Horizontal::Right}) {
            int hit = -1, count = 0;
            for (std::size_t i = 0; i < screen.elements.size(); ++i) {
                if (absolute_region(screen.elements[i].bbox) == AbsoluteRegion{h, v}) {
                    hit = static_cast<int>(i);
                    ++count;
                }
            }
            if (count == 1)
                candidates.push_back(Cand{false, v == Vertical::Top ? "top" : "bottom",
                                          h == Horizontal::Left ? "left" : "right", "", hit});
        }
    }

    // strictly unique superlatives by exact center
    struct Extreme {
        const char* word;
        int (*key)(const BoundingBox&);
        bool min;
    };
    static const Extreme extremes[] = {
        {"topmost", cy2, true},
        {"bottommost", cy2, false},
        {"leftmost", cx2, true},
        {"rightmost", cx2, false},
    };
    for (const auto& ex : extremes) {
        int best = -1, count = 0;
        for (std::size_t i = 0; i < screen.elements.size(); ++i) {
            int k = ex.key(screen.elements[i].bbox);
            if (best < 0) {
                best = static_cast<int>(i);
                count = 1;
                continue;
            }
            int bk = ex.key(screen.elements[static_cast<std::size_t>(best)].bbox);
            if ((ex.min && k < bk) || (!ex.min && k > bk)) {
                best = static_cast<int>(i);
                count = 1;
            } else if (k == bk) {
                ++count;
            }
        }
        if (count == 1 && screen.elements.size() > 1)
            candidates.push_back(Cand{true, "", "", ex.word, best});
    }

    if (candidates.empty())
        fail(ErrorCode::NoUniqueAbsoluteReferent,
             "screen '" + screen.id + "' has no unique absolute referent");

    const Cand& cand = candidates[rng.below(candidates.size())];
    std::string phrase;
    if (cand.superlative) {
        phrase = fill(superlative_templates[rng.below(superlative_templates.size())], "{s}", cand.s);
    } else {
        phrase = fill(fill(quadrant_templates[rng.below(quadrant_templates.size())], "{v}", cand.v),
                      "{h}", cand.h);
    }

    Command c;
    c.id = command_id;
    c.phrase = phrase;
    c.screen_id = screen.id;
    c.target_id = screen.elements[static_cast<std::size_t>(cand.target)].id;
    c.reasoning = Reasoning::AbsoluteSpatial;
    return c;
}

Command gen_relative(const Screen& screen, Rng& rng, const std::string& command_id) {
    static const std::vector<std::string> templates = {
        "click the element {d}",
        "tap the item {d}",
        "press the control {d}",
    };

    struct Cand {
        int anchor;
        int target;
        Direction dir;
    };
    std::vector<Cand> candidates;
    auto anchors = uniquely_named_indices(screen);
    for (int a : anchors) {
        const auto& ab = screen.elements[static_cast<std::size_t>(a)].bbox;
        for (Direction d : {Direction::Left, Direction::Right, Direction::Above, Direction::Below}) {
            int best = -1;
            long long best_d2 = 0;
            bool unique = true;
            for (std::size_t i = 0; i < screen.elements.size(); ++i) {
                if (static_cast<int>(i) == a) continue;
                if (!in_direction(screen.elements[i].bbox, ab, d)) continue;
                long long d2 = center_dist2(screen.elements[i].bbox, ab);
                if (best < 0 || d2 < best_d2) {
                    best = static_cast<int>(i);
                    best_d2 = d2;
                    unique = true;
                } else if (d2 == best_d2) {
                    unique = false;
                }
            }
            if (best >= 0 && unique) candidates.push_back(Cand{a, best, d});
        }
    }

    if (candidates.empty())
        fail(ErrorCode::NoUniqueRelativeReferent,
             "screen '" + screen.id + "' has no unique relative referent");

    const Cand& cand = candidates[rng.below(candidates.size())];
    const auto& anchor = screen.elements[static_cast<std::size_t>(cand.anchor)];
    std::string dir_phrase;
    if (cand.dir == Direction::Left || cand.dir == Direction::Right)
        dir_phrase = "to the " + std::string(direction_word(cand.dir)) + " of " + anchor.text;
    else
        dir_phrase = std::string(direction_word(cand.dir)) + " " + anchor.text;

    Command c;
    c.id = command_id;
    c.phrase = fill(templates[rng.below(templates.size())], "{d}", dir_phrase);
    c.screen_id = screen.id;
    c.target_id = screen.elements[static_cast<std::size_t>(cand.target)].id;
    c.reasoning = Reasoning::RelativeSpatial;
    c.anchor_id = anchor.id;
    return c;
}

// ---- pairing and splits ----

const Screen& Corpus::screen_of(const Command& c) const {
    for (const auto& s : screens)
        if (s.id == c.screen_id) return s;
    fail(ErrorCode::DanglingScreenReference,
         "command '" + c.id + "' references missing screen '" + c.screen_id + "'");
}

const Command* Corpus::find_command(const std::string& id) const {
    for (const auto& c : commands)
        if (c.id == id) return &c;
    return nullptr;
}

std::vector<PairInstance> make_pairs(const std::vector<Screen>& screens,
                                     const std::vector<Command>& commands,
                                     int negatives_cap,
                                     std::uint64_t seed) {
    std::unordered_map<std::string, const Screen*> by_id;
    for (const auto& s : screens) by_id[s.id] = &s;

    std::vector<PairInstance> pairs;
    for (const auto& c : commands) {
        auto it = by_id.find(c.screen_id);
        if (it == by_id.end())
            fail(ErrorCode::DanglingScreenReference,
                 "command '" + c.id + "' references missing screen '" + c.screen_id + "'");
        const Screen& s = *it->second;
        int target = s.index_of(c.target_id);
        if (target < 0)
            fail(ErrorCode::DanglingScreenReference,
                 "command '" + c.id + "' target '" + c.target_id + "' not on screen");

        pairs.push_back(PairInstance{c.id, c.target_id, 1, Split::Train});

        std::vector<int> negatives;
        for (std::size_t i = 0; i < s.elements.size(); ++i)
            if (static_cast<int>(i) != target) negatives.push_back(static_cast<int>(i));
        if (static_cast<int>(negatives.size()) > negatives_cap) {
            Rng pr(mix_seed(seed, hash_bytes(c.id.data(), c.id.size(), 0x70A1u)));
            for (int i = 0; i < negatives_cap; ++i) {
                int j = i + pr.below_int(static_cast<int>(negatives.size()) - i);
                std::swap(negatives[static_cast<std::size_t>(i)], negatives[static_cast<std::size_t>(j)]);
            }
            negatives.resize(static_cast<std::size_t>(negatives_cap));
            std::sort(negatives.begin(), negatives.end());
        }
        for (int i : negatives)
            pairs.push_back(PairInstance{c.id, s.elements[static_cast<std::size_t>(i)].id, 0, Split::Train});
    }
    return pairs;
}

void split_dataset(std::vector<PairInstance>& pairs, double train, double dev, double test,
                   std::uint64_t seed) {
    if (pairs.empty()) fail(ErrorCode::EmptyDataset, "no pair instances to split");
    if (train < 0 || dev < 0 || test < 0 || std::abs(train + dev + test - 1.0) > 1e-9)
        fail(ErrorCode::ConfigInvalid, "split ratios must be nonnegative and sum to 1");

    std::vector<std::string> groups;
    std::unordered_set<std::string> seen;
    for (const auto& p : pairs)
        if (seen.insert(p.command_id).second) groups.push_back(p.command_id);

    Rng rng(seed);
    rng.shuffle(groups);

    const std::size_t n = groups.size();
    double exact[3] = {train * static_cast<double>(n), dev * static_cast<double>(n),
                       test * static_cast<double>(n)};
    std::size_t counts[3];
    for (int i = 0; i < 3; ++i) counts[i] = static_cast<std::size_t>(exact[i]);
    std::size_t assigned = counts[0] + counts[1] + counts[2];
    // largest-remainder rounding, ties resolved train > dev > test
    while (assigned < n) {
        int best = 0;
        double best_frac = -1.0;
        for (int i = 0; i < 3; ++i) {
            double frac = exact[i] - static_cast<double>(counts[i]);
            if (frac > best_frac + 1e-12) {
                best_frac = frac;
                best = i;
            }
        }
        counts[best]++;
        assigned++;
    }

    std::unordered_map<std::string, Split> assignment;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < counts[0]; ++i) assignment[groups[idx++]] = Split::Train;
    for (std::size_t i = 0; i < counts[1]; ++i) assignment[groups[idx++]] = Split::Dev;
    for (std::size_t i = 0; i < counts[2]; ++i) assignment[groups[idx++]] = Split::Test;

    for (auto& p : pairs) p.split = assignment.at(p.command_id);
}

Corpus generate_corpus(const GenConfig& cfg, double train, double dev, double test,
                       std::uint64_t split_seed, std::uint64_t pair_seed, int negatives_cap) {
    cfg.validate();

    Corpus corpus;
    corpus.screens.reserve(static_cast<std::size_t>(cfg.screens));
    int width = std::max(4, static_cast<int>(std::to_string(cfg.screens).size()));
    auto pad = [](int v, int w) {
        std::string s = std::to_string(v);
        return std::string(static_cast<std::size_t>(std::max(0, w - static_cast<int>(s.size()))), '0') + s;
    };
    for (int i = 0; i < cfg.screens; ++i) {
        Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(i)));
        corpus.screens.push_back(generate_screen(rng, cfg, "s" + pad(i, width)));
    }

    // per-type quotas by largest remainder over the full corpus
    const long total = static_cast<long>(cfg.screens) * cfg.commands_per_screen;
    double exact[3] = {cfg.mix_extractive * static_cast<double>(total),
                       cfg.mix_absolute * static_cast<double>(total),
                       cfg.mix_relative * static_cast<double>(total)};
    long remaining[3];
    for (int i = 0; i < 3; ++i) remaining[i] = static_cast<long>(exact[i]);
    long assigned = remaining[0] + remaining[1] + remaining[2];
    while (assigned < total) {
        int best = 0;
        double best_frac = -1.0;
        for (int i = 0; i < 3; ++i) {
            double frac = exact[i] - static_cast<double>(remaining[i]);
            if (frac > best_frac + 1e-12) {
                best_frac = frac;
                best = i;
            }
        }
        remaining[best]++;
        assigned++;
    }

    int seq = 0;
    int cmd_width = std::max(6, static_cast<int>(std::to_string(total).size()));
    for (int i = 0; i < cfg.screens; ++i) {
        for (int j = 0; j < cfg.commands_per_screen; ++j) {
            Rng rng(mix_seed(cfg.seed ^ 0x5A17C0DEull,
                             static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(cfg.commands_per_screen) +
                                 static_cast<std::uint64_t>(j)));
            long left = remaining[0] + remaining[1] + remaining[2];
            if (left <= 0) break;

            // draw a type proportional to remaining quota; fall back to the
            // others (largest quota first) when this screen cannot satisfy it
            double u = rng.unit() * static_cast<double>(left);
            int first = u < static_cast<double>(remaining[0])                  ? 0
                        : u < static_cast<double>(remaining[0] + remaining[1]) ? 1
                                                                               : 2;
            int rest[2], r = 0;
            for (int t = 0; t < 3; ++t)
                if (t != first) rest[r++] = t;
            if (remaining[rest[0]] < remaining[rest[1]]) std::swap(rest[0], rest[1]);
            int order[3] = {first, rest[0], rest[1]};

            for (int t : order) {
                if (remaining[t] <= 0) continue;
                try {
                    std::string id = "c" + pad(seq, cmd_width);
                    Command c = t == 0   ? gen_extractive(corpus.screens[static_cast<std::size_t>(i)], rng, id)
                                : t == 1 ? gen_absolute(corpus.screens[static_cast<std::size_t>(i)], rng, id)
                                         : gen_relative(corpus.screens[static_cast<std::size_t>(i)], rng, id);
                    corpus.commands.push_back(std::move(c));
                    remaining[t]--;
                    ++seq;
                    break;
                } catch (const Error&) {
                    // this screen cannot host the type; try the next type
                }
            }
        }
    }

    corpus.pairs = make_pairs(corpus.screens, corpus.commands, negatives_cap, pair_seed);
    split_dataset(corpus.pairs, train, dev, test, split_seed);
    return corpus;
}

// ---- corpus files ----

void save_commands(const std::filesystem::path& path, const std::vector<Command>& commands) {
    std::string out;
    for (const auto& c : commands) {
        json j = {{"id", c.id},
                  {"phrase", c.phrase},
                  {"screen_id", c.screen_id},
                  {"target_id", c.target_id},
                  {"reasoning", reasoning_name(c.reasoning)}};
        if (c.anchor_id) j["anchor_id"] = *c.anchor_id;
        out += j.dump();
        out += '\n';
    }
    atomic_write_file(path, out);
}

std::vector<Command> load_commands(const std::filesystem::path& path) {
    std::string text = read_file(path);
    std::vector<Command> out;
    auto from_json = [](const json& j) {
        if (!j.is_object() || !j.contains("id") || !j.contains("phrase") || !j.contains("screen_id") ||
            !j.contains("target_id") || !j.contains("reasoning"))
            fail(ErrorCode::SchemaMismatch, "command object missing required fields");
        Command c;
        c.id = j["id"].get<std::string>();
        c.phrase = j["phrase"].get<std::string>();
        c.screen_id = j["screen_id"].get<std::string>();
        c.target_id = j["target_id"].get<std::string>();
        c.reasoning = reasoning_from_name(j["reasoning"].get<std::string>());
        if (j.contains("anchor_id")) c.anchor_id = j["anchor_id"].get<std::string>();
        return c;
    };
    json whole = json::parse(text, nullptr, false);
    if (!whole.is_discarded() && whole.is_array()) {
        for (const auto& j : whole) out.push_back(from_json(j));
        return out;
    }
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            fail(ErrorCode::SchemaMismatch, path.string() + ":" + std::to_string(lineno) + ": bad JSON");
        out.push_back(from_json(j));
    }
    return out;
}

void save_pairs(const std::filesystem::path& path, const std::vector<PairInstance>& pairs) {
    std::string out = "command_id,element_id,label,split\n";
    for (const auto& p : pairs) {
        out += csv_escape(p.command_id);
        out += ',';
        out += csv_escape(p.element_id);
        out += ',';
        out += std::to_string(p.label);
        out += ',';
        out += split_name(p.split);
        out += '\n';
    }
    atomic_write_file(path, out);
}

std::vector<PairInstance> load_pairs(const std::filesystem::path& path) {
    std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) ||
        csv_split_line(line) != std::vector<std::string>{"command_id", "element_id", "label", "split"})
        fail(ErrorCode::SchemaMismatch, path.string() + ": bad pairs header");
    std::vector<PairInstance> out;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = csv_split_line(line);
        if (f.size() != 4) fail(ErrorCode::SchemaMismatch, path.string() + ": bad pairs row");
        PairInstance p;
        p.command_id = f[0];
        p.element_id = f[1];
        if (f[2] != "0" && f[2] != "1") fail(ErrorCode::SchemaMismatch, "pair label must be 0 or 1");
        p.label = f[2] == "1" ? 1 : 0;
        p.split = split_from_name(f[3]);
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace uiground
