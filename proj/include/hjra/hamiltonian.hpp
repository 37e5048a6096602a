#ifndef HJRA_HAMILTONIAN_HPP
#define HJRA_HAMILTONIAN_HPP

#include <span>
#include <vector>

#include "hjra/dynamics.hpp"

namespace hjra {

enum class HamMode { Standard, Frozen };

// Game Hamiltonian H(p, x) = sup_v inf_u p' f(x, u, v), disturbance outer,
// control inner. Frozen mode clips at zero: min{0, H}, which realizes the
// reach-at-any-time value by letting the controller stop the clock.
//
// Input boxes are discretized as a uniform lattice of samples_per_input_axis
// points per axis; box vertices are always included, so for dynamics affine
// (or bilinear) in the inputs the sampled optimum is exact. When the dynamics
// carry an affine decomposition the per-axis sign rule replaces sampling.
class HamiltonianSpec {
public:
    HamiltonianSpec(DynamicsSpec dyn, int samples_per_input_axis = 3, HamMode mode = HamMode::Standard);

    const DynamicsSpec& dyn() const { return dyn_; }
    int samples_per_input_axis() const { return samples_; }
    HamMode mode() const { return mode_; }

    // Sample lattices, flattened points of the respective box dimension.
    std::span<const double> control_samples() const { return control_samples_; }
    std::span<const double> disturbance_samples() const { return disturbance_samples_; }
    std::size_t control_count() const { return control_count_; }
    std::size_t disturbance_count() const { return disturbance_count_; }

private:
    DynamicsSpec dyn_;
    int samples_;
    HamMode mode_;
    std::vector<double> control_samples_, disturbance_samples_;
    std::size_t control_count_ = 1, disturbance_count_ = 1;
};

double ham_value(const HamiltonianSpec& spec, std::span<const double> p, std::span<const double> x);

// min{0, ham_value}.
double ham_frozen(const HamiltonianSpec& spec, std::span<const double> p, std::span<const double> x);

// Lax-Friedrichs numerical Hamiltonian:
//   Hhat = H((Dminus + Dplus)/2, x) - sum_i alpha_i (Dplus_i - Dminus_i)/2
// with H selected by the spec's mode. alpha must dominate the per-axis speed
// bound on the domain for the scheme to stay monotone.
double lax_friedrichs(const HamiltonianSpec& spec, std::span<const double> dminus, std::span<const double> dplus,
                      std::span<const double> x, std::span<const double> alpha);

} // namespace hjra

#endif
