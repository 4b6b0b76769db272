#pragma once

#include "mise/catalog.hpp"
#include "mise/cluster.hpp"
#include "mise/embed.hpp"
#include "mise/heatmap.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mise::render {

struct Rgb {
    std::uint8_t r = 255, g = 255, b = 255;

    double luminance() const;  // relative luminance, 0..1
    std::string hex() const;
    bool operator==(const Rgb&) const = default;
};

/// Linear ramp between two colours; white -> dark blue by default.
struct Colormap {
    Rgb low{255, 255, 255};
    Rgb high{8, 48, 107};

    /// t is clamped to [0, 1].
    Rgb at(double t) const;
};

enum class LabelMode { year, title, none };
enum class ColorBy { year, cluster, group };

LabelMode parse_label_mode(std::string_view s);
ColorBy parse_color_by(std::string_view s);
std::string_view label_mode_name(LabelMode m);
std::string_view color_by_name(ColorBy c);

struct RenderStyle {
    int cell_px = 8;
    Colormap colormap;
    double point_radius = 4.0;
    LabelMode label_mode = LabelMode::year;
    ColorBy color_by = ColorBy::cluster;

    void validate() const;  // throws ConfigError
};

/// One rect per cell, colour scaled to the grid maximum (printed in the caption).
std::string render_heatmap(const Grid& grid, const RenderStyle& style, std::string_view title_text);

/// Scatter of title-years with optional cluster colouring and a legend.
/// Throws InputError when assignment ids do not match embedding ids.
std::string render_constellation(const tsne::Embedding& embedding,
                                 const cluster::ClusterAssignment* assignment,
                                 const catalog::CorpusManifest& manifest, const RenderStyle& style);

} // namespace mise::render
