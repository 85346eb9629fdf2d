#pragma once
// Radar products from frequency sweeps: range profiles (inverse DFT of a
// coherent sweep) and small-aperture ISAR images (2D inverse transform over
// frequency x azimuth). Ranges follow the monostatic two-way convention:
// the axis is scaled by c0/2 and a flat plate at standoff R peaks at R.

#include <string>
#include <vector>

#include "mcsbr/farfield.hpp"

namespace mcsbr {

enum class Window { kNone, kHann };

struct SignalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RangeProfile {
    std::vector<double> range_m;   // monotone bin centers
    std::vector<double> mag_db;    // 20 log10 |.|
    Window window = Window::kHann;
    int zero_pad = 4;
    double bin_spacing = 0.0;      // c0 / (2 B_padded)
};

/// Inverse DFT of one polarization channel. Requires a uniform frequency
/// grid. Ranges are wrapped to the symmetric unambiguous window.
RangeProfile range_profile(const SweepResult& sweep, PolChannel channel, Window window,
                           int zero_pad);

struct IsarImage {
    std::vector<double> down_range_m;    // row coordinates
    std::vector<double> cross_range_m;   // column coordinates
    std::vector<double> mag_db;          // row-major, clipped at peak + floor
    double dynamic_floor_db = -40.0;
    double peak_db = 0.0;
    Window window = Window::kHann;
    int zero_pad = 4;

    double at(size_t row, size_t col) const { return mag_db[row * cross_range_m.size() + col]; }
};

/// Small-angle range-Doppler image from sweeps collected over a uniform
/// azimuth grid (aperture must stay below 30 degrees). Cross-range scaling
/// uses the center frequency and total aperture.
IsarImage isar(const std::vector<SweepResult>& sweeps, const std::vector<double>& angles_deg,
               PolChannel channel, Window window, int zero_pad, double dynamic_floor_db);

}  // namespace mcsbr
