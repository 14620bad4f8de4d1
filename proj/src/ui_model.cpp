#include "uiground/ui_model.hpp"

#include "uiground/error.hpp"
#include "uiground/io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace uiground {

using nlohmann::json;

int Screen::index_of(const std::string& element_id) const {
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (elements[i].id == element_id) return static_cast<int>(i);
    return -1;
}

const UIElement* Screen::find(const std::string& element_id) const {
    int i = index_of(element_id);
    return i < 0 ? nullptr : &elements[static_cast<std::size_t>(i)];
}

void Screen::validate() const {
    if (elements.empty()) fail(ErrorCode::EmptyScreen, "screen '" + id + "' has no elements");
    std::unordered_set<std::string> seen;
    for (const auto& e : elements) {
        if (!seen.insert(e.id).second)
            fail(ErrorCode::SchemaMismatch, "duplicate element id '" + e.id + "' on screen '" + id + "'");
        if (!e.bbox.valid())
            fail(ErrorCode::CoordinateOutOfRange, "element '" + e.id + "' has an invalid normalized box");
    }
}

const char* reasoning_name(Reasoning r) {
    switch (r) {
        case Reasoning::Extractive: return "extractive";
        case Reasoning::AbsoluteSpatial: return "absolute";
        case Reasoning::RelativeSpatial: return "relative";
    }
    return "?";
}

Reasoning reasoning_from_name(const std::string& name) {
    if (name == "extractive") return Reasoning::Extractive;
    if (name == "absolute") return Reasoning::AbsoluteSpatial;
    if (name == "relative") return Reasoning::RelativeSpatial;
    fail(ErrorCode::SchemaMismatch, "unknown reasoning type '" + name + "'");
}

void Command::validate(const Screen& screen) const {
    if (screen.id != screen_id)
        fail(ErrorCode::DanglingScreenReference, "command '" + id + "' validated against wrong screen");
    if (screen.index_of(target_id) < 0)
        fail(ErrorCode::DanglingScreenReference,
             "command '" + id + "' target '" + target_id + "' not on screen '" + screen_id + "'");
    if (reasoning == Reasoning::RelativeSpatial) {
        if (!anchor_id)
            fail(ErrorCode::SchemaMismatch, "relative command '" + id + "' lacks an anchor");
        if (screen.index_of(*anchor_id) < 0)
            fail(ErrorCode::DanglingScreenReference,
                 "command '" + id + "' anchor '" + *anchor_id + "' not on screen '" + screen_id + "'");
        if (*anchor_id == target_id)
            fail(ErrorCode::SchemaMismatch, "command '" + id + "' anchor equals target");
    } else if (anchor_id) {
        fail(ErrorCode::SchemaMismatch, "non-relative command '" + id + "' carries an anchor");
    }
}

// ---- geometry ----

namespace {

int scale_coord(double coord, double dim) {
    long v = std::lround(coord / dim * kGridMax);
    return static_cast<int>(std::clamp(v, 0L, static_cast<long>(kGridMax)));
}

} // namespace

BoundingBox normalize_bbox(const RawBox& raw, int width, int height) {
    if (width <= 0 || height <= 0)
        fail(ErrorCode::NonPositiveScreenDims,
             "screen dims " + std::to_string(width) + "x" + std::to_string(height));
    auto in_range = [](double lo, double hi, double dim) {
        return 0.0 <= lo && lo <= hi && hi <= dim;
    };
    if (!in_range(raw.x0, raw.x1, width) || !in_range(raw.y0, raw.y1, height))
        fail(ErrorCode::CoordinateOutOfRange, "raw box outside screen bounds");
    BoundingBox b;
    b.x0 = scale_coord(raw.x0, width);
    b.x1 = scale_coord(raw.x1, width);
    b.y0 = scale_coord(raw.y0, height);
    b.y1 = scale_coord(raw.y1, height);
    return b;
}

Center bbox_center(const BoundingBox& b) {
    return Center{(b.x0 + b.x1) / 2, (b.y0 + b.y1) / 2};
}

AbsoluteRegion absolute_region(const BoundingBox& b) {
    Center c = bbox_center(b);
    AbsoluteRegion r{};
    r.horizontal = c.x < kGridMax / 2 ? Horizontal::Left : Horizontal::Right;
    r.vertical = c.y < kGridMax / 2 ? Vertical::Top : Vertical::Bottom;
    return r;
}

RelativePosition relative_position(const BoundingBox& probe, const BoundingBox& target) {
    // Centers are compared exactly via coordinate sums: flooring them first
    // would break the x -> 1000-x reflection symmetry on odd sums.
    int px2 = probe.x0 + probe.x1, tx2 = target.x0 + target.x1;
    int py2 = probe.y0 + probe.y1, ty2 = target.y0 + target.y1;
    RelativePosition r{HorizontalRelation::None, VerticalRelation::None};
    if (px2 < tx2) r.horizontal = HorizontalRelation::Left;
    else if (px2 > tx2) r.horizontal = HorizontalRelation::Right;
    if (py2 < ty2) r.vertical = VerticalRelation::Above;
    else if (py2 > ty2) r.vertical = VerticalRelation::Below;
    return r;
}

// ---- screen files ----

namespace {

Screen screen_from_json(const json& j) {
    if (!j.is_object() || !j.contains("id") || !j.contains("width") || !j.contains("height") ||
        !j.contains("elements") || !j["elements"].is_array())
        fail(ErrorCode::SchemaMismatch, "screen object missing id/width/height/elements");
    Screen s;
    s.id = j["id"].get<std::string>();
    s.source_width = j["width"].get<int>();
    s.source_height = j["height"].get<int>();
    for (const auto& je : j["elements"]) {
        if (!je.contains("id") || !je.contains("bbox") || !je["bbox"].is_array() || je["bbox"].size() != 4)
            fail(ErrorCode::SchemaMismatch, "element on screen '" + s.id + "' missing id or 4-field bbox");
        UIElement e;
        e.id = je["id"].get<std::string>();
        e.text = je.value("text", std::string());
        RawBox raw;
        raw.x0 = je["bbox"][0].get<double>();
        raw.x1 = je["bbox"][1].get<double>();
        raw.y0 = je["bbox"][2].get<double>();
        raw.y1 = je["bbox"][3].get<double>();
        e.bbox = normalize_bbox(raw, s.source_width, s.source_height);
        s.elements.push_back(std::move(e));
    }
    s.validate();
    return s;
}

} // namespace

std::vector<Screen> load_screens(const std::filesystem::path& path) {
    std::string text = read_file(path);
    std::vector<Screen> screens;
    // Whole-file JSON first (array of screens or a single screen object),
    // falling back to one JSON document per line.
    json whole = json::parse(text, nullptr, false);
    if (!whole.is_discarded()) {
        if (whole.is_array()) {
            for (const auto& j : whole) screens.push_back(screen_from_json(j));
        } else {
            screens.push_back(screen_from_json(whole));
        }
        return screens;
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
        screens.push_back(screen_from_json(j));
    }
    if (screens.empty()) fail(ErrorCode::SchemaMismatch, path.string() + ": no screens found");
    return screens;
}

void save_screens(const std::filesystem::path& path, const std::vector<Screen>& screens) {
    std::string out;
    for (const auto& s : screens) {
        json je = json::array();
        for (const auto& e : s.elements) {
            je.push_back({{"id", e.id},
                          {"text", e.text},
                          {"bbox", {e.bbox.x0, e.bbox.x1, e.bbox.y0, e.bbox.y1}}});
        }
        json j = {{"id", s.id}, {"width", kGridMax}, {"height", kGridMax}, {"elements", je}};
        out += j.dump();
        out += '\n';
    }
    atomic_write_file(path, out);
}

} // namespace uiground
