#include "mise/render.hpp"

#include "mise/error.hpp"
#include "mise/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace mise::render {
namespace {

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    return s == "-0.00" ? "0.00" : s;
}

double srgb_to_linear(std::uint8_t c) {
    const double v = c / 255.0;
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

std::uint8_t lerp_channel(std::uint8_t a, std::uint8_t b, double t) {
    return static_cast<std::uint8_t>(std::lround(a + (static_cast<double>(b) - a) * t));
}

constexpr const char* kSvgHeader = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";

std::string svg_open(double width, double height) {
    return std::string(kSvgHeader) + "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + px(width) +
           "\" height=\"" + px(height) + "\" viewBox=\"0 0 " + px(width) + " " + px(height) + "\">\n";
}

// Tableau 10
constexpr std::array<Rgb, 10> kCategorical = {{{31, 119, 180}, {255, 127, 14}, {44, 160, 44}, {214, 39, 40}, {148, 103, 189},
                                               {140, 86, 75}, {227, 119, 194}, {127, 127, 127}, {188, 189, 34}, {23, 190, 207}}};
constexpr Colormap kYearRamp{{253, 231, 37}, {68, 1, 84}};
constexpr Rgb kNoise{190, 190, 190};

} // namespace

double Rgb::luminance() const {
    return 0.2126 * srgb_to_linear(r) + 0.7152 * srgb_to_linear(g) + 0.0722 * srgb_to_linear(b);
}

std::string Rgb::hex() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

Rgb Colormap::at(double t) const {
    t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
    return {lerp_channel(low.r, high.r, t), lerp_channel(low.g, high.g, t), lerp_channel(low.b, high.b, t)};
}

LabelMode parse_label_mode(std::string_view s) {
    if (s == "year") return LabelMode::year;
    if (s == "title") return LabelMode::title;
    if (s == "none") return LabelMode::none;
    throw ConfigError("unknown label mode '" + std::string(s) + "' (expected year, title, or none)");
}

ColorBy parse_color_by(std::string_view s) {
    if (s == "year") return ColorBy::year;
    if (s == "cluster") return ColorBy::cluster;
    if (s == "group") return ColorBy::group;
    throw ConfigError("unknown color mode '" + std::string(s) + "' (expected year, cluster, or group)");
}

std::string_view label_mode_name(LabelMode m) {
    switch (m) {
    case LabelMode::year: return "year";
    case LabelMode::title: return "title";
    case LabelMode::none: return "none";
    }
    return "";
}

std::string_view color_by_name(ColorBy c) {
    switch (c) {
    case ColorBy::year: return "year";
    case ColorBy::cluster: return "cluster";
    case ColorBy::group: return "group";
    }
    return "";
}

void RenderStyle::validate() const {
    if (cell_px < 1) throw ConfigError("cell_px must be at least 1");
    if (!(point_radius > 0.0)) throw ConfigError("point_radius must be positive");
    // Channel-wise monotone ramps keep luminance monotone.
    const bool darkening = colormap.high.r <= colormap.low.r && colormap.high.g <= colormap.low.g && colormap.high.b <= colormap.low.b;
    const bool lightening = colormap.high.r >= colormap.low.r && colormap.high.g >= colormap.low.g && colormap.high.b >= colormap.low.b;
    if (!darkening && !lightening) throw ConfigError("colormap must be monotone in luminance");
}

std::string render_heatmap(const Grid& grid, const RenderStyle& style, std::string_view title_text) {
    style.validate();
    constexpr double kCaption = 20.0;
    const double cell = style.cell_px;
    const double width = std::max(1.0, static_cast<double>(grid.cols) * cell);
    const double height = static_cast<double>(grid.rows) * cell + kCaption;
    const double top = grid.max();

    std::string out = svg_open(width, height);
    out += "<title>" + xml_escape(title_text) + "</title>\n";
    out += "<text x=\"2.00\" y=\"14.00\" font-family=\"sans-serif\" font-size=\"11\">" + xml_escape(title_text) +
           " (max = " + format_sig9(top) + ")</text>\n";
    out += "<g class=\"cells\" shape-rendering=\"crispEdges\">\n";
    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            const double t = top > 0.0 ? grid.at(r, c) / top : 0.0;
            out += "<rect class=\"cell\" x=\"" + px(static_cast<double>(c) * cell) + "\" y=\"" + px(kCaption + static_cast<double>(r) * cell) +
                   "\" width=\"" + px(cell) + "\" height=\"" + px(cell) + "\" fill=\"" + style.colormap.at(t).hex() + "\"/>\n";
        }
    }
    out += "</g>\n</svg>\n";
    return out;
}

std::string render_constellation(const tsne::Embedding& embedding, const cluster::ClusterAssignment* assignment,
                                 const catalog::CorpusManifest& manifest, const RenderStyle& style) {
    style.validate();
    const std::size_t n = embedding.ids.size();
    if (embedding.y.size() != 2 * n) throw InputError("embedding coordinates do not align with ids");
    if (assignment != nullptr && (assignment->ids != embedding.ids || assignment->labels.size() != n))
        throw InputError("cluster assignment ids do not align with embedding ids");

    constexpr double kPlot = 800.0;
    constexpr double kMargin = 40.0;
    constexpr double kLegendWidth = 240.0;

    // Colour key per point, with a sortable rank.
    struct Key {
        double rank;
        std::string text;
        auto operator<=>(const Key&) const = default;
    };
    std::vector<Key> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TitleYear& id = embedding.ids[i];
        switch (style.color_by) {
        case ColorBy::year: keys[i] = {static_cast<double>(id.year), std::to_string(id.year)}; break;
        case ColorBy::cluster:
            if (assignment == nullptr) {
                keys[i] = {0, "all"};
            } else {
                const int l = assignment->labels[i];
                keys[i] = l < 0 ? Key{1e18, "noise"} : Key{static_cast<double>(l), "cluster " + std::to_string(l)};
            }
            break;
        case ColorBy::group: {
            const catalog::ManifestEntry* e = manifest.find(id.lccn);
            const std::string g = e == nullptr || e->groups.empty() ? std::string("unknown") : join(e->groups, "; ");
            keys[i] = {0, g};
            break;
        }
        }
    }
    std::vector<Key> legend = keys;
    std::sort(legend.begin(), legend.end());
    legend.erase(std::unique(legend.begin(), legend.end()), legend.end());

    std::map<std::string, Rgb> colour;
    for (std::size_t k = 0; k < legend.size(); ++k) {
        Rgb c = kCategorical[k % kCategorical.size()];
        if (legend[k].text == "noise") {
            c = kNoise;
        } else if (style.color_by == ColorBy::year) {
            const double lo = legend.front().rank, hi = legend.back().rank;
            c = kYearRamp.at(hi > lo ? (legend[k].rank - lo) / (hi - lo) : 0.0);
        }
        colour[legend[k].text] = c;
    }

    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = embedding.y[2 * i], y = embedding.y[2 * i + 1];
        if (i == 0 || x < xmin) xmin = x;
        if (i == 0 || x > xmax) xmax = x;
        if (i == 0 || y < ymin) ymin = y;
        if (i == 0 || y > ymax) ymax = y;
    }
    const double span = std::max(xmax - xmin, ymax - ymin);
    const double scale = span > 0.0 ? (kPlot - 2 * kMargin) / span : 1.0;
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);

    std::string out = svg_open(kPlot + kLegendWidth, kPlot);
    out += "<title>constellation</title>\n";
    out += "<rect x=\"0.00\" y=\"0.00\" width=\"" + px(kPlot + kLegendWidth) + "\" height=\"" + px(kPlot) + "\" fill=\"#ffffff\"/>\n";
    out += "<g class=\"points\" font-family=\"sans-serif\" font-size=\"9\">\n";
    for (std::size_t i = 0; i < n; ++i) {
        const TitleYear& id = embedding.ids[i];
        const double x = kPlot / 2 + (embedding.y[2 * i] - cx) * scale;
        const double y = kPlot / 2 - (embedding.y[2 * i + 1] - cy) * scale;
        out += "<circle class=\"point\" data-id=\"" + xml_escape(id.str()) + "\" cx=\"" + px(x) + "\" cy=\"" + px(y) + "\" r=\"" +
               px(style.point_radius) + "\" fill=\"" + colour[keys[i].text].hex() + "\"/>\n";
        std::string label;
        if (style.label_mode == LabelMode::year) {
            label = std::to_string(id.year);
        } else if (style.label_mode == LabelMode::title) {
            const catalog::ManifestEntry* e = manifest.find(id.lccn);
            label = e != nullptr && !e->title.empty() ? e->title : id.lccn;
        }
        if (!label.empty()) {
            out += "<text class=\"label\" x=\"" + px(x + style.point_radius + 1.0) + "\" y=\"" + px(y + 3.0) + "\">" + xml_escape(label) + "</text>\n";
        }
    }
    out += "</g>\n";

    out += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out += "<text x=\"" + px(kPlot + 10.0) + "\" y=\"" + px(kMargin) + "\">colour: " + std::string(color_by_name(style.color_by)) + "</text>\n";
    for (std::size_t k = 0; k < legend.size(); ++k) {
        const double y = kMargin + 18.0 * static_cast<double>(k + 1);
        out += "<rect class=\"swatch\" x=\"" + px(kPlot + 10.0) + "\" y=\"" + px(y - 9.0) + "\" width=\"10.00\" height=\"10.00\" fill=\"" +
               colour[legend[k].text].hex() + "\"/>\n";
        out += "<text x=\"" + px(kPlot + 26.0) + "\" y=\"" + px(y) + "\">" + xml_escape(legend[k].text) + "</text>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

} // namespace mise::render
