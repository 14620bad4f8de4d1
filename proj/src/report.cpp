#include "uiground/report.hpp"

#include "uiground/error.hpp"
#include "uiground/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace uiground {

// ---- grounding report ----

GroundingReport grounding_report(
    const std::vector<std::pair<std::string, const ScorerModel*>>& models, const Corpus& corpus,
    Split split, std::vector<std::vector<PredictionRow>>* predictions) {
    std::map<std::string, Split> cmd_split;
    for (const auto& p : corpus.pairs) cmd_split.emplace(p.command_id, p.split);

    std::vector<const Command*> commands;
    for (const auto& c : corpus.commands) {
        auto it = cmd_split.find(c.id);
        if (it != cmd_split.end() && it->second == split) commands.push_back(&c);
    }
    if (commands.empty())
        fail(ErrorCode::EmptySplit, std::string("no commands in split '") + split_name(split) + "'");

    GroundingReport report;
    if (predictions) predictions->clear();
    for (const auto& [name, model] : models) {
        std::vector<PredictionRow> preds;
        preds.reserve(commands.size());
        for (const Command* c : commands) {
            const Screen& s = corpus.screen_of(*c);
            PredictionRow row;
            row.command_id = c->id;
            row.reasoning = c->reasoning;
            row.predicted_id = ground(*model, s, *c);
            row.target_id = c->target_id;
            row.correct = row.predicted_id == row.target_id;
            preds.push_back(std::move(row));
        }
        GroundingReportRow out;
        out.model = name;
        out.split = split;
        out.acc = accuracy_from_predictions(preds);
        report.rows.push_back(std::move(out));
        if (predictions) predictions->push_back(std::move(preds));
    }
    return report;
}

TypeAccuracy accuracy_from_predictions(const std::vector<PredictionRow>& rows) {
    TypeAccuracy acc;
    int correct[3] = {0, 0, 0};
    int total[3] = {0, 0, 0};
    for (const auto& r : rows) {
        int t = static_cast<int>(r.reasoning);
        total[t]++;
        if (r.correct) correct[t]++;
    }
    acc.n_ext = total[0];
    acc.n_abs = total[1];
    acc.n_rel = total[2];
    acc.ext_acc = total[0] ? static_cast<double>(correct[0]) / total[0] : 0.0;
    acc.abs_acc = total[1] ? static_cast<double>(correct[1]) / total[1] : 0.0;
    acc.rel_acc = total[2] ? static_cast<double>(correct[2]) / total[2] : 0.0;
    int n = total[0] + total[1] + total[2];
    acc.all_acc = n ? static_cast<double>(correct[0] + correct[1] + correct[2]) / n : 0.0;
    return acc;
}

void save_grounding_report(const std::filesystem::path& path, const GroundingReport& report) {
    std::string out = "model,split,ext_acc,abs_acc,rel_acc,all_acc,n_ext,n_abs,n_rel\n";
    for (const auto& r : report.rows) {
        out += csv_escape(r.model);
        out += ',';
        out += split_name(r.split);
        for (double v : {r.acc.ext_acc, r.acc.abs_acc, r.acc.rel_acc, r.acc.all_acc}) {
            out += ',';
            out += format_double(v);
        }
        for (int n : {r.acc.n_ext, r.acc.n_abs, r.acc.n_rel}) {
            out += ',';
            out += std::to_string(n);
        }
        out += '\n';
    }
    atomic_write_file(path, out);
}

void save_predictions(const std::filesystem::path& path, const std::vector<PredictionRow>& rows) {
    std::string out = "command_id,reasoning,predicted_id,target_id,correct\n";
    for (const auto& r : rows) {
        out += csv_escape(r.command_id);
        out += ',';
        out += reasoning_name(r.reasoning);
        out += ',';
        out += csv_escape(r.predicted_id);
        out += ',';
        out += csv_escape(r.target_id);
        out += ',';
        out += r.correct ? '1' : '0';
        out += '\n';
    }
    atomic_write_file(path, out);
}

std::vector<PredictionRow> load_predictions(const std::filesystem::path& path) {
    std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) ||
        csv_split_line(line) != std::vector<std::string>{"command_id", "reasoning", "predicted_id",
                                                         "target_id", "correct"})
        fail(ErrorCode::SchemaMismatch, path.string() + ": bad predictions header");
    std::vector<PredictionRow> out;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = csv_split_line(line);
        if (f.size() != 5) fail(ErrorCode::SchemaMismatch, path.string() + ": bad predictions row");
        PredictionRow r;
        r.command_id = f[0];
        r.reasoning = reasoning_from_name(f[1]);
        r.predicted_id = f[2];
        r.target_id = f[3];
        r.correct = f[4] == "1";
        out.push_back(std::move(r));
    }
    return out;
}

// ---- trivial-example filtering ----

FilterResult filter_trivial(const Corpus& corpus, const ScorerModel& position_blind_model,
                            double tau) {
    if (position_blind_model.kind != ModelKind::TextOnly)
        fail(ErrorCode::WrongModelKind, "filter_trivial requires a TextOnly (position-blind) model");
    if (!(tau > 0.5 && tau < 1.0)) fail(ErrorCode::ConfigInvalid, "tau must lie in (0.5, 1)");

    FilterResult result;
    for (const auto& c : corpus.commands) {
        const Screen& s = corpus.screen_of(c);
        GroundResult g = ground_scored(position_blind_model, s, c);
        FilterLogRow row;
        row.command_id = c.id;
        row.reasoning = c.reasoning;
        row.top1_prob = g.prob_relevant;
        row.removed = g.element_id == c.target_id && g.prob_relevant > tau;
        if (!row.removed) result.kept.push_back(c);
        result.log.push_back(std::move(row));
    }
    return result;
}

void save_removal_log(const std::filesystem::path& path, const std::vector<FilterLogRow>& log) {
    std::string out = "command_id,reasoning,top1_prob,removed\n";
    for (const auto& r : log) {
        out += csv_escape(r.command_id);
        out += ',';
        out += reasoning_name(r.reasoning);
        out += ',';
        out += format_double(r.top1_prob);
        out += ',';
        out += r.removed ? '1' : '0';
        out += '\n';
    }
    atomic_write_file(path, out);
}

// ---- probe curves ----

namespace {

std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct Panel {
    double x0, y0, w, h; // drawing area in svg coords
    double xmin, xmax;   // log10 param count
    double ymin, ymax;

    double sx(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
    double sy(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

void draw_panel(std::string& svg, const Panel& p, const std::string& title,
                const std::vector<std::pair<double, double>>& pts, const char* color) {
    svg += "<rect x='" + svg_num(p.x0) + "' y='" + svg_num(p.y0) + "' width='" + svg_num(p.w) +
           "' height='" + svg_num(p.h) + "' fill='none' stroke='#444'/>\n";
    svg += "<text x='" + svg_num(p.x0 + p.w / 2) + "' y='" + svg_num(p.y0 - 8) +
           "' text-anchor='middle' font-size='13'>" + title + "</text>\n";

    // x ticks at integer powers of ten
    for (int e = static_cast<int>(std::ceil(p.xmin)); e <= static_cast<int>(std::floor(p.xmax)); ++e) {
        double x = p.sx(e);
        svg += "<line x1='" + svg_num(x) + "' y1='" + svg_num(p.y0 + p.h) + "' x2='" + svg_num(x) +
               "' y2='" + svg_num(p.y0 + p.h + 4) + "' stroke='#444'/>\n";
        svg += "<text x='" + svg_num(x) + "' y='" + svg_num(p.y0 + p.h + 16) +
               "' text-anchor='middle' font-size='10'>1e" + std::to_string(e) + "</text>\n";
    }
    // y ticks: 5 divisions
    for (int k = 0; k <= 4; ++k) {
        double yv = p.ymin + (p.ymax - p.ymin) * k / 4.0;
        double y = p.sy(yv);
        svg += "<line x1='" + svg_num(p.x0 - 4) + "' y1='" + svg_num(y) + "' x2='" + svg_num(p.x0) +
               "' y2='" + svg_num(y) + "' stroke='#444'/>\n";
        char lab[32];
        std::snprintf(lab, sizeof(lab), "%.2f", yv);
        svg += "<text x='" + svg_num(p.x0 - 8) + "' y='" + svg_num(y + 3) +
               "' text-anchor='end' font-size='10'>" + lab + "</text>\n";
    }
    svg += "<text x='" + svg_num(p.x0 + p.w / 2) + "' y='" + svg_num(p.y0 + p.h + 30) +
           "' text-anchor='middle' font-size='11'>parameters (log scale)</text>\n";

    if (!pts.empty()) {
        std::string poly;
        for (const auto& [x, y] : pts) {
            poly += svg_num(p.sx(x)) + "," + svg_num(p.sy(y)) + " ";
        }
        svg += "<polyline points='" + poly + "' fill='none' stroke='" + color + "' stroke-width='1.5'/>\n";
        for (const auto& [x, y] : pts)
            svg += "<circle cx='" + svg_num(p.sx(x)) + "' cy='" + svg_num(p.sy(y)) +
                   "' r='2.2' fill='" + color + "'/>\n";
    }
}

} // namespace

void emit_curves(const std::filesystem::path& dir, const std::string& model_name, AuxTask task,
                 const std::vector<ProbeRun>& runs) {
    if (runs.empty()) fail(ErrorCode::EmptyDataset, "no sweep results to plot");

    // CSV mirrors every run; curves use non-failed points with distinct
    // param counts (first occurrence wins)
    std::string csv = "param_count,aux_test_acc,selectivity,failed\n";
    std::vector<std::pair<double, double>> acc_pts, sel_pts;
    long long last_count = -1;
    for (const auto& r : runs) {
        csv += std::to_string(r.spec.param_count);
        csv += ',';
        if (!r.failed) {
            csv += format_double(r.aux_test_acc);
            csv += ',';
            csv += format_double(r.selectivity);
        } else {
            csv += ',';
        }
        csv += ',';
        csv += r.failed ? '1' : '0';
        csv += '\n';
        if (r.failed || r.spec.param_count == last_count) continue;
        last_count = r.spec.param_count;
        double lx = std::log10(static_cast<double>(r.spec.param_count));
        acc_pts.push_back({lx, r.aux_test_acc});
        sel_pts.push_back({lx, r.selectivity});
    }

    std::string base = "curves_" + model_name + "_" + aux_task_name(task);
    atomic_write_file(dir / (base + ".csv"), csv);

    double xmin = 1e300, xmax = -1e300, smin = 0.0, smax = 0.0;
    for (const auto& [x, y] : acc_pts) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
    }
    for (const auto& [x, y] : sel_pts) {
        smin = std::min(smin, y);
        smax = std::max(smax, y);
    }
    if (acc_pts.empty()) {
        xmin = 0;
        xmax = 1;
    }
    if (xmax - xmin < 1e-9) xmax = xmin + 1;
    smin = std::floor((smin - 0.1) * 10.0) / 10.0;
    smax = std::ceil((smax + 0.1) * 10.0) / 10.0;

    std::string svg =
        "<svg xmlns='http://www.w3.org/2000/svg' width='880' height='320' viewBox='0 0 880 320' "
        "font-family='sans-serif'>\n<rect width='880' height='320' fill='white'/>\n";
    svg += "<text x='440' y='20' text-anchor='middle' font-size='14'>" + model_name + " / " +
           aux_task_name(task) + "</text>\n";

    Panel acc_panel{60, 50, 330, 210, xmin, xmax, 0.0, 1.0};
    Panel sel_panel{510, 50, 330, 210, xmin, xmax, smin, smax};
    draw_panel(svg, acc_panel, "auxiliary task test accuracy", acc_pts, "#1f6fb2");
    draw_panel(svg, sel_panel, "selectivity", sel_pts, "#b23a1f");
    svg += "</svg>\n";
    atomic_write_file(dir / (base + ".svg"), svg);
}

} // namespace uiground
