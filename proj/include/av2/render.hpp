#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "av2/portrait.hpp"

namespace av2 {

/// Parameter-plane render window: alpha fixed, beta ranges over the
/// rectangle centered at `center` with the given extents.
struct RenderSpec {
    cx alpha{1.0};
    cx center{0.0, 6.283185307179586476925286766559};
    double width = 8.0;
    double height = 8.0;
    int px_w = 64;
    int px_h = 64;
    int max_iter = 96;
    double escape_radius = 1e10;
};

enum class PixelClass { escaped, cycle, undecided };

struct PixelResult {
    PixelClass cls = PixelClass::undecided;
    int escape_time = 0;  // for escaped
    int period = 0;       // for cycle
};

/// Classifies the singular orbits at (alpha, beta): the orbit of 1 = g(0)
/// and, when lambda is finite, the orbit of g(lambda). Escape wins (earliest
/// time), then the smallest detected cycle period (<= 16), else undecided.
PixelResult classify_parameter(cx alpha, cx beta, int max_iter, double escape_radius);

/// Deterministic RGB raster of the window (3 bytes per pixel, rows top to
/// bottom); identical bytes for any thread count.
std::vector<std::uint8_t> render(const RenderSpec& spec, int n_threads);

/// beta value at the center of pixel (ix, iy).
cx pixel_beta(const RenderSpec& spec, int ix, int iy);

/// Binary P6 with maxval 255.
std::string ppm_encode(const std::vector<std::uint8_t>& rgb, int w, int h);

}  // namespace av2
