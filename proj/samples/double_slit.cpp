// Two-pinhole interference on a distant screen, with the fringe spacing
// compared against 2 pi L / (k d).

#include <cstdio>

#include "pathlab/pathlab.hpp"

using namespace pathlab;

int main() {
    DoubleSlit ds;
    ds.k = 2.0 * pi / 0.5;
    const auto f = analyze_fringes(ds);
    std::printf("predicted spacing %.4f, measured %.4f\n", f.predicted_spacing, f.measured_spacing);
    if (f.near_field) std::printf("note: screen is in the near field\n");

    std::vector<double> xs;
    for (int i = -80; i <= 80; ++i) xs.push_back(0.5 * i);
    const auto p = double_slit_pattern(ds, xs);
    double peak = 0.0;
    for (double v : p.intensity) peak = std::max(peak, v);
    for (std::size_t i = 0; i < xs.size(); i += 4) {
        const int bar = static_cast<int>(60.0 * p.intensity[i] / peak);
        std::printf("%7.2f %s\n", xs[i], std::string(static_cast<std::size_t>(bar), '#').c_str());
    }
}
