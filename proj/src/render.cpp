#include "av2/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace av2 {

namespace {

constexpr int kMaxRenderPeriod = 16;

// fixed palette for cycle periods 1..16
constexpr std::uint8_t kPalette[16][3] = {
    {230, 60, 60},  {60, 160, 230}, {70, 200, 90},   {235, 200, 60},
    {170, 90, 220}, {240, 140, 50}, {70, 220, 200},  {220, 90, 170},
    {140, 190, 60}, {90, 110, 230}, {210, 160, 120}, {120, 220, 140},
    {200, 70, 110}, {80, 170, 160}, {180, 120, 200}, {150, 150, 150}};

PixelResult classify_orbit(const Av2Params& p, const SpherePoint& start, int max_iter,
                           double escape_radius) {
    OrbitOptions opts;
    opts.n_max = max_iter;
    opts.tol = 1e-9;
    opts.escape_radius = escape_radius;
    opts.max_period = kMaxRenderPeriod;
    const OrbitResult r = forward_orbit(p, start, opts);
    PixelResult out;
    switch (r.status) {
        case OrbitStatus::preperiodic:
            out.cls = PixelClass::cycle;
            out.period = r.period;
            break;
        case OrbitStatus::escaped:
        case OrbitStatus::terminated_at_infinity:
            out.cls = PixelClass::escaped;
            out.escape_time = static_cast<int>(r.points.size()) - 1;
            break;
        case OrbitStatus::undecided:
            out.cls = PixelClass::undecided;
            break;
    }
    return out;
}

PixelResult combine(const PixelResult& a, const PixelResult& b) {
    if (a.cls == PixelClass::escaped || b.cls == PixelClass::escaped) {
        PixelResult out;
        out.cls = PixelClass::escaped;
        if (a.cls == PixelClass::escaped && b.cls == PixelClass::escaped)
            out.escape_time = std::min(a.escape_time, b.escape_time);
        else
            out.escape_time = a.cls == PixelClass::escaped ? a.escape_time : b.escape_time;
        return out;
    }
    if (a.cls == PixelClass::cycle || b.cls == PixelClass::cycle) {
        PixelResult out;
        out.cls = PixelClass::cycle;
        if (a.cls == PixelClass::cycle && b.cls == PixelClass::cycle)
            out.period = std::min(a.period, b.period);
        else
            out.period = a.cls == PixelClass::cycle ? a.period : b.period;
        return out;
    }
    return a;
}

void color_pixel(const PixelResult& r, int max_iter, std::uint8_t* px) {
    switch (r.cls) {
        case PixelClass::escaped: {
            const double t = std::min(1.0, static_cast<double>(r.escape_time) / max_iter);
            const auto v = static_cast<std::uint8_t>(255 - std::min(255, static_cast<int>(255.0 * t)));
            px[0] = px[1] = px[2] = v;
            break;
        }
        case PixelClass::cycle: {
            const int idx = (r.period - 1) % 16;
            px[0] = kPalette[idx][0];
            px[1] = kPalette[idx][1];
            px[2] = kPalette[idx][2];
            break;
        }
        case PixelClass::undecided:
            px[0] = px[1] = px[2] = 0;
            break;
    }
}

}  // namespace

PixelResult classify_parameter(cx alpha, cx beta, int max_iter, double escape_radius) {
    if (beta == cx(0.0)) return {};  // undecided; the family excludes beta = 0
    const Av2Params p(alpha, beta);
    PixelResult r = classify_orbit(p, SpherePoint(cx(1.0)), max_iter, escape_radius);
    if (!p.is_exponential()) {
        const SpherePoint l1 = eval(p, p.lambda());
        if (l1.is_inf()) {
            // lambda sits on a pole: its orbit ends immediately
            PixelResult pole;
            pole.cls = PixelClass::escaped;
            pole.escape_time = 1;
            r = combine(r, pole);
        } else {
            r = combine(r, classify_orbit(p, l1, max_iter, escape_radius));
        }
    }
    return r;
}

cx pixel_beta(const RenderSpec& spec, int ix, int iy) {
    const double fx = (ix + 0.5) / spec.px_w - 0.5;
    const double fy = 0.5 - (iy + 0.5) / spec.px_h;
    return spec.center + cx(fx * spec.width, fy * spec.height);
}

std::vector<std::uint8_t> render(const RenderSpec& spec, int n_threads) {
    if (spec.px_w < 1 || spec.px_h < 1) throw InvalidInput("render: resolution must be >= 1x1");
    if (!(spec.width > 0.0) || !(spec.height > 0.0))
        throw InvalidInput("render: window extents must be positive");
    std::vector<std::uint8_t> rgb(static_cast<size_t>(spec.px_w) * spec.px_h * 3);

    const int threads = std::clamp(n_threads, 1, 64);
    auto worker = [&](int row0, int row1) {
        for (int iy = row0; iy < row1; ++iy) {
            for (int ix = 0; ix < spec.px_w; ++ix) {
                const PixelResult r =
                    classify_parameter(spec.alpha, pixel_beta(spec, ix, iy), spec.max_iter,
                                       spec.escape_radius);
                color_pixel(r, spec.max_iter, &rgb[(static_cast<size_t>(iy) * spec.px_w + ix) * 3]);
            }
        }
    };

    if (threads == 1) {
        worker(0, spec.px_h);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (spec.px_h + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int row0 = std::min(t * chunk, spec.px_h);
            const int row1 = std::min(row0 + chunk, spec.px_h);
            if (row0 < row1) pool.emplace_back(worker, row0, row1);
        }
        for (auto& th : pool) th.join();
    }
    return rgb;
}

std::string ppm_encode(const std::vector<std::uint8_t>& rgb, int w, int h) {
    std::ostringstream os;
    os << "P6\n" << w << " " << h << "\n255\n";
    os.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    return os.str();
}

}  // namespace av2
