#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace uiground {

inline constexpr int kGridMax = 1000; // normalized coordinate grid [0, 1000]

// Axis-aligned rectangle on the normalized grid. x grows rightward, y grows
// downward (screen convention). Degenerate boxes (zero width or height) are
// legal values.
struct BoundingBox {
    int x0 = 0;
    int x1 = 0;
    int y0 = 0;
    int y1 = 0;

    bool valid() const {
        return 0 <= x0 && x0 <= x1 && x1 <= kGridMax && 0 <= y0 && y0 <= y1 && y1 <= kGridMax;
    }
    bool degenerate() const { return x0 == x1 || y0 == y1; }

    bool operator==(const BoundingBox&) const = default;
};

struct UIElement {
    std::string id;
    std::string text; // may be empty
    BoundingBox bbox;
};

struct Screen {
    std::string id;
    int source_width = 0;  // original pixel dimensions
    int source_height = 0;
    std::vector<UIElement> elements;

    // Index of element id, or -1.
    int index_of(const std::string& element_id) const;
    const UIElement* find(const std::string& element_id) const;

    // Enforces: at least one element, all ids distinct, boxes valid.
    void validate() const;
};

enum class Reasoning { Extractive, AbsoluteSpatial, RelativeSpatial };

const char* reasoning_name(Reasoning r);
Reasoning reasoning_from_name(const std::string& name);

struct Command {
    std::string id;
    std::string phrase;
    std::string screen_id;
    std::string target_id;
    Reasoning reasoning = Reasoning::Extractive;
    std::optional<std::string> anchor_id; // present iff reasoning == RelativeSpatial

    // Checks target/anchor resolution against the screen.
    void validate(const Screen& screen) const;
};

// ---- geometry operations ----

struct RawBox {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0; // source pixels
};

// Maps source-pixel coordinates onto the [0,1000] grid: round(coord/dim*1000),
// clamped. Throws NonPositiveScreenDims / CoordinateOutOfRange.
BoundingBox normalize_bbox(const RawBox& raw, int width, int height);

struct Center {
    int x = 0;
    int y = 0;
    bool operator==(const Center&) const = default;
};

Center bbox_center(const BoundingBox& b);

enum class Horizontal { Left, Right };
enum class Vertical { Top, Bottom };

struct AbsoluteRegion {
    Horizontal horizontal;
    Vertical vertical;
    bool operator==(const AbsoluteRegion&) const = default;
};

// Screen-half classification by center; ties (cx == 500, cy == 500) resolve
// to Right / Bottom.
AbsoluteRegion absolute_region(const BoundingBox& b);

enum class HorizontalRelation { Left, Right, None };
enum class VerticalRelation { Above, Below, None };

struct RelativePosition {
    HorizontalRelation horizontal;
    VerticalRelation vertical;
    bool operator==(const RelativePosition&) const = default;
};

// Where `probe` sits relative to `target`, comparing centers; equal
// coordinates yield None on that axis.
RelativePosition relative_position(const BoundingBox& probe, const BoundingBox& target);

// ---- screen files ----
// One document per screen: either a JSON array of screen objects or one
// object per line. Schema per screen:
//   {"id", "width", "height", "elements": [{"id", "text", "bbox": [x0,x1,y0,y1]}]}
// with bbox in source pixels; the loader applies normalize_bbox.

std::vector<Screen> load_screens(const std::filesystem::path& path);

// Writes screens in the same schema. In-memory boxes are already normalized,
// so screens are emitted with width = height = 1000; loading them back is the
// identity (normalize_bbox is idempotent on the 1000-grid).
void save_screens(const std::filesystem::path& path, const std::vector<Screen>& screens);

} // namespace uiground
