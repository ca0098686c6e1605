#pragma once

#include <string>

#include "toonfuse/image.hpp"
#include "toonfuse/pipeline.hpp"

namespace toonfuse {

/// Lays out grid cells on a white canvas with 1-pixel grey separators, column
/// labels in a band above and row labels in a band to the left, drawn with a
/// built-in 5x7 bitmap font. Columns widen to fit their label.
ImageBuffer render_grid(const GridResult& grid);

/// Pixel width of `text` in the built-in font (5 px glyphs, 1 px spacing).
std::size_t text_width(const std::string& text);

}  // namespace toonfuse
