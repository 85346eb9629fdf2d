#include "mcsbr/signal_processing.hpp"

#include <algorithm>
#include <cmath>

namespace mcsbr {

namespace {

double uniform_step(const std::vector<double>& grid, const char* what) {
    if (grid.size() < 2) throw SignalError(std::string(what) + ": need at least 2 samples");
    const double step = grid[1] - grid[0];
    for (size_t i = 1; i < grid.size(); ++i) {
        if (std::abs(grid[i] - grid[i - 1] - step) > 1e-6 * std::abs(step))
            throw SignalError(std::string(what) + ": grid is not uniform");
    }
    return step;
}

std::vector<double> window_coefficients(Window window, size_t n) {
    std::vector<double> w(n, 1.0);
    if (window == Window::kHann && n > 1) {
        for (size_t k = 0; k < n; ++k)
            w[k] = 0.5 - 0.5 * std::cos(2.0 * kPi * k / (n - 1));
    }
    return w;
}

// out[m] = (1/m_count) sum_k in[k] e^{+-j 2 pi k m / m_count}
void padded_idft(const std::vector<complexd>& in, std::vector<complexd>& out, size_t m_count,
                 bool conjugate) {
    out.assign(m_count, complexd{0.0, 0.0});
    const double sign = conjugate ? -1.0 : 1.0;
    for (size_t k = 0; k < in.size(); ++k) {
        if (in[k] == complexd{0.0, 0.0}) continue;
        const double base = sign * 2.0 * kPi * k / m_count;
        const complexd w = std::polar(1.0, base);
        complexd z{1.0, 0.0};
        for (size_t m = 0; m < m_count; ++m) {
            out[m] += in[k] * z;
            z *= w;
        }
    }
    const double scale = 1.0 / static_cast<double>(m_count);
    for (auto& v : out) v *= scale;
}

// Reorder a transform so the axis runs from -extent/2 upward through 0.
template <typename T>
void center_shift(std::vector<T>& values) {
    const size_t m = values.size();
    std::rotate(values.begin(), values.begin() + (m - m / 2), values.end());
}

std::vector<double> centered_axis(size_t m, double bin) {
    std::vector<double> axis(m);
    for (size_t i = 0; i < m; ++i)
        axis[i] = (static_cast<double>(i) - static_cast<double>(m / 2)) * bin;
    return axis;
}

double to_db(double mag) { return 20.0 * std::log10(std::max(mag, 1e-300)); }

}  // namespace

RangeProfile range_profile(const SweepResult& sweep, PolChannel channel, Window window,
                           int zero_pad) {
    if (zero_pad < 1) throw SignalError("range_profile: zero_pad must be >= 1");
    const double df = uniform_step(sweep.frequencies, "range_profile");
    const size_t n = sweep.frequencies.size();
    const size_t m = n * static_cast<size_t>(zero_pad);

    const std::vector<double> w = window_coefficients(window, n);
    std::vector<complexd> data(n);
    for (size_t k = 0; k < n; ++k) data[k] = sweep.values[channel][k] * w[k];

    std::vector<complexd> spectrum;
    padded_idft(data, spectrum, m, /*conjugate=*/false);
    center_shift(spectrum);

    RangeProfile p;
    p.window = window;
    p.zero_pad = zero_pad;
    p.bin_spacing = kSpeedOfLight / (2.0 * df * static_cast<double>(m));
    p.range_m = centered_axis(m, p.bin_spacing);
    p.mag_db.resize(m);
    for (size_t i = 0; i < m; ++i) p.mag_db[i] = to_db(std::abs(spectrum[i]));
    return p;
}

IsarImage isar(const std::vector<SweepResult>& sweeps, const std::vector<double>& angles_deg,
               PolChannel channel, Window window, int zero_pad, double dynamic_floor_db) {
    if (zero_pad < 1) throw SignalError("isar: zero_pad must be >= 1");
    if (sweeps.size() != angles_deg.size() || sweeps.empty())
        throw SignalError("isar: one sweep per angle required");
    const double dtheta_deg = uniform_step(angles_deg, "isar angles");
    const double aperture_deg = std::abs(angles_deg.back() - angles_deg.front());
    if (aperture_deg > 30.0)
        throw SignalError("isar: aperture exceeds the small-angle limit (30 degrees)");

    const size_t nf = sweeps.front().frequencies.size();
    const double df = uniform_step(sweeps.front().frequencies, "isar frequencies");
    for (const auto& s : sweeps) {
        if (s.frequencies.size() != nf || std::abs(s.frequencies.front() -
                                                   sweeps.front().frequencies.front()) > 1e-3)
            throw SignalError("isar: sweeps must share one frequency grid");
    }

    const size_t na = sweeps.size();
    const size_t mr = nf * static_cast<size_t>(zero_pad);   // down-range bins
    const size_t mc = na * static_cast<size_t>(zero_pad);   // cross-range bins

    const std::vector<double> wf = window_coefficients(window, nf);
    const std::vector<double> wa = window_coefficients(window, na);

    // Down-range transform per angle.
    std::vector<std::vector<complexd>> columns(na);
    std::vector<complexd> data(nf);
    for (size_t a = 0; a < na; ++a) {
        for (size_t k = 0; k < nf; ++k)
            data[k] = sweeps[a].values[channel][k] * wf[k] * wa[a];
        padded_idft(data, columns[a], mr, /*conjugate=*/false);
        center_shift(columns[a]);
    }

    // Cross-range transform per range bin (conjugate kernel so a scatterer at
    // positive cross-range lands on the positive axis).
    IsarImage img;
    img.window = window;
    img.zero_pad = zero_pad;
    img.dynamic_floor_db = dynamic_floor_db;

    const double f_center = 0.5 * (sweeps.front().frequencies.front() +
                                   sweeps.front().frequencies.back());
    const double dtheta = dtheta_deg * kPi / 180.0;
    const double range_bin = kSpeedOfLight / (2.0 * df * static_cast<double>(mr));
    const double cross_bin = kSpeedOfLight / (2.0 * f_center * dtheta * static_cast<double>(mc));

    img.down_range_m = centered_axis(mr, range_bin);
    img.cross_range_m = centered_axis(mc, cross_bin);
    img.mag_db.assign(mr * mc, 0.0);

    std::vector<complexd> row(na), out;
    double peak = 0.0;
    std::vector<double> mags(mr * mc, 0.0);
    for (size_t r = 0; r < mr; ++r) {
        for (size_t a = 0; a < na; ++a) row[a] = columns[a][r];
        padded_idft(row, out, mc, /*conjugate=*/true);
        center_shift(out);
        for (size_t c = 0; c < mc; ++c) {
            const double mag = std::abs(out[c]);
            mags[r * mc + c] = mag;
            peak = std::max(peak, mag);
        }
    }

    img.peak_db = to_db(peak);
    const double floor_db = img.peak_db + dynamic_floor_db;
    for (size_t i = 0; i < mags.size(); ++i)
        img.mag_db[i] = std::max(to_db(mags[i]), floor_db);
    return img;
}

}  // namespace mcsbr
