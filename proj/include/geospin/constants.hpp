#pragma once

#include <numbers>

namespace geospin {

// Unit system: tesla, picoseconds, meV. Fixed project wide.
inline constexpr double mu_B_meV_per_T = 5.7883818060e-2;
inline constexpr double hbar_meV_ps = 0.6582119569;

inline constexpr double pi = std::numbers::pi;

// Sign and basis conventions. Every emitted report carries this string so a
// phase value can never be quoted apart from the convention it was measured
// under.
inline constexpr const char* convention_string =
    "H=+(g*mu_B/2) sigma.B; U(t)=exp(-i H t/hbar); basis (|1>,|0>)=(up,down); "
    "|+/-> = (|1> +/- i|0>)/sqrt(2); total phase = arg<initial|final>; "
    "dynamic = -(1/hbar) int <H> dt; geometric = total - dynamic in (-pi,pi]";

// Default integration controls.
inline constexpr int default_steps_per_pulse = 2048;
inline constexpr int default_loop_steps = 16384;
inline constexpr double default_t_relax_ps = 1.0e4;

}  // namespace geospin
