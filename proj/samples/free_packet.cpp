// Spread of a free Gaussian packet, once through the time-sliced propagator
// and once through the split-step solver.

#include <cmath>
#include <cstdio>

#include "pathlab/pathlab.hpp"

using namespace pathlab;

int main() {
    const Grid1D g(-20.0, 20.0, 512);
    const auto psi0 = gaussian_packet(g, -2.0, 1.0, 1.5);
    const auto a = evolve_wavefunction(psi0, potential::Free{}, {2.0, 128});
    const auto b = split_step_evolve(psi0, {g, 1e-3, 2000, potential::Free{}, {}});

    ComplexField d(g);
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = a[i] - b[i];
    std::printf("L2 distance between the two evolutions: %.3e\n", std::sqrt(discrete_norm(d)));

    std::printf("%8s %14s %14s\n", "x", "|psi|^2 path", "|psi|^2 split");
    for (std::size_t i = 0; i < g.size(); i += 32)
        std::printf("%8.3f %14.6e %14.6e\n", g.x(i), std::norm(a[i]), std::norm(b[i]));
}
