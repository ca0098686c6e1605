#include "toonfuse/grid.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

namespace toonfuse {

namespace {

constexpr std::size_t kGlyphW = 5;
constexpr std::size_t kGlyphH = 7;
constexpr std::size_t kBand = kGlyphH + 2;
constexpr double kSeparator = 0.5;

struct Glyph {
    char ch;
    std::array<std::uint8_t, kGlyphH> rows;  // low 5 bits, MSB = leftmost column
};

// clang-format off
constexpr Glyph kFont[] = {
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {'=', {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
    {'a', {0x00, 0x00, 0x0E, 0x01, 0x0F, 0x11, 0x0F}},
    {'c', {0x00, 0x00, 0x0E, 0x10, 0x10, 0x11, 0x0E}},
    {'e', {0x00, 0x00, 0x0E, 0x11, 0x1F, 0x10, 0x0E}},
    {'g', {0x00, 0x0F, 0x11, 0x11, 0x0F, 0x01, 0x0E}},
    {'m', {0x00, 0x00, 0x1A, 0x15, 0x15, 0x11, 0x11}},
    {'s', {0x00, 0x00, 0x0E, 0x10, 0x0E, 0x01, 0x1E}},
    {'t', {0x08, 0x08, 0x1C, 0x08, 0x08, 0x09, 0x06}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
};
// clang-format on

constexpr Glyph kUnknown = {'?', {0x1F, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1F}};

const Glyph& glyph_for(char ch) {
    for (const Glyph& g : kFont) {
        if (g.ch == ch) return g;
    }
    return kUnknown;
}

struct Canvas {
    std::size_t height;
    std::size_t width;
    std::vector<double> px;

    Canvas(std::size_t h, std::size_t w) : height(h), width(w), px(h * w * 3, 1.0) {}

    void set(std::size_t y, std::size_t x, double v) {
        if (y >= height || x >= width) return;
        for (std::size_t c = 0; c < 3; ++c) px[(y * width + x) * 3 + c] = v;
    }

    void text(std::size_t top, std::size_t left, const std::string& s) {
        for (std::size_t n = 0; n < s.size(); ++n) {
            const Glyph& g = glyph_for(s[n]);
            for (std::size_t r = 0; r < kGlyphH; ++r) {
                for (std::size_t c = 0; c < kGlyphW; ++c) {
                    if (g.rows[r] & (0x10 >> c)) set(top + r, left + n * (kGlyphW + 1) + c, 0.0);
                }
            }
        }
    }

    void blit(std::size_t top, std::size_t left, const ImageBuffer& img) {
        for (std::size_t y = 0; y < img.height(); ++y) {
            for (std::size_t x = 0; x < img.width(); ++x) {
                for (std::size_t c = 0; c < 3; ++c) px[((top + y) * width + left + x) * 3 + c] = img.at(y, x, c);
            }
        }
    }
};

}  // namespace

std::size_t text_width(const std::string& text) {
    return text.empty() ? 0 : text.size() * (kGlyphW + 1) - 1;
}

ImageBuffer render_grid(const GridResult& grid) {
    if (grid.cells.empty() || grid.cells.size() != grid.rows * grid.cols) {
        throw DimensionError("render_grid: cell count does not match rows x cols");
    }
    if ((!grid.col_labels.empty() && grid.col_labels.size() != grid.cols) ||
        (!grid.row_labels.empty() && grid.row_labels.size() != grid.rows)) {
        throw DimensionError("render_grid: label count does not match grid shape");
    }
    const std::size_t cell_h = grid.cells.front().height();
    const std::size_t cell_w = grid.cells.front().width();
    for (const auto& c : grid.cells) {
        if (c.height() != cell_h || c.width() != cell_w) throw DimensionError("render_grid: cells differ in size");
    }

    std::size_t col_w = cell_w;
    for (const auto& l : grid.col_labels) col_w = std::max(col_w, text_width(l) + 2);
    std::size_t row_band = 0;
    for (const auto& l : grid.row_labels) row_band = std::max(row_band, text_width(l) + 2);
    const std::size_t top_band = grid.col_labels.empty() ? 0 : kBand;
    const std::size_t row_h = std::max(cell_h, grid.row_labels.empty() ? std::size_t{0} : kBand);

    const std::size_t width = row_band + 1 + grid.cols * (col_w + 1);
    const std::size_t height = top_band + 1 + grid.rows * (row_h + 1);
    Canvas canvas(height, width);

    for (std::size_t x = row_band; x < width; ++x) {
        for (std::size_t r = 0; r <= grid.rows; ++r) canvas.set(top_band + r * (row_h + 1), x, kSeparator);
    }
    for (std::size_t y = top_band; y < height; ++y) {
        for (std::size_t c = 0; c <= grid.cols; ++c) canvas.set(y, row_band + c * (col_w + 1), kSeparator);
    }

    for (std::size_t c = 0; c < grid.cols; ++c) {
        const std::size_t left = row_band + 1 + c * (col_w + 1);
        if (!grid.col_labels.empty()) {
            canvas.text(1, left + (col_w - text_width(grid.col_labels[c])) / 2, grid.col_labels[c]);
        }
        for (std::size_t r = 0; r < grid.rows; ++r) {
            const std::size_t top = top_band + 1 + r * (row_h + 1);
            canvas.blit(top + (row_h - cell_h) / 2, left + (col_w - cell_w) / 2, grid.cell(r, c));
        }
    }
    for (std::size_t r = 0; r < grid.row_labels.size(); ++r) {
        const std::size_t top = top_band + 1 + r * (row_h + 1);
        canvas.text(top + (row_h - kGlyphH) / 2, 1, grid.row_labels[r]);
    }
    return ImageBuffer(height, width, std::move(canvas.px));
}

}  // namespace toonfuse
