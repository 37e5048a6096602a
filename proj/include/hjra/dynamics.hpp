#ifndef HJRA_DYNAMICS_HPP
#define HJRA_DYNAMICS_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hjra/grid.hpp"

namespace hjra {

// Compact per-axis input box. Zero dimensions means the player is absent.
struct InputBox {
    std::vector<double> lower, upper;

    InputBox() = default;
    InputBox(std::vector<double> lo, std::vector<double> hi);
    static InputBox absent() { return InputBox(); }
    static InputBox symmetric(std::vector<double> bound);

    std::size_t dim() const { return lower.size(); }
    bool contains(std::span<const double> v, double tol = 0.0) const;
};

// f(x, u, v) = a(x) + B(x) u + C(x) v. B is state_dim x control_dim and C is
// state_dim x disturbance_dim, both row-major.
struct AffineParts {
    std::vector<double> a;
    std::vector<double> B;
    std::vector<double> C;
};

using FlowFn =
    std::function<void(std::span<const double> x, std::span<const double> u, std::span<const double> v, std::span<double> out)>;
using AffineFn = std::function<void(std::span<const double> x, AffineParts& parts)>;

// Game dynamics xdot = f(x, u, v) with compact input boxes. `affine`
// provides the (a, B, C) decomposition when affine_in_inputs is set, which
// lets the Hamiltonian optimize inputs analytically instead of sampling.
struct DynamicsSpec {
    std::size_t state_dim = 0;
    FlowFn flow;
    InputBox control;
    InputBox disturbance;
    std::optional<std::vector<double>> speed_bound; // per-axis |f_i| bound, if known
    bool affine_in_inputs = false;
    AffineFn affine;
};

// Contract-checked flow evaluation: validates dimensions and box membership.
std::vector<double> flow_eval(const DynamicsSpec& dyn, std::span<const double> x, std::span<const double> u,
                              std::span<const double> v);

// Per-axis bound alpha_i >= max |f_i| over a deterministic sample lattice of
// the domain and the input boxes (vertices always included), inflated by 5%.
// Feeds CFL step control and Lax-Friedrichs dissipation.
std::vector<double> per_axis_speed_bound(const DynamicsSpec& dyn, const Grid& domain);

// Sparse polynomial in the state vector, used by the scenario format to
// specify custom control-affine dynamics.
struct Monomial {
    double coef = 0.0;
    std::vector<unsigned> powers; // exponent per state axis
};

struct Polynomial {
    std::vector<Monomial> terms;
    double eval(std::span<const double> x) const;
};

// Built-in systems.
DynamicsSpec make_integrator_1d(InputBox control, InputBox disturbance = InputBox::absent());
DynamicsSpec make_double_integrator_2d(InputBox control, InputBox disturbance = InputBox::absent());
DynamicsSpec make_game_2d(InputBox control, InputBox disturbance);
DynamicsSpec make_zero_dynamics(std::size_t state_dim);

// f_i = a_i(x) + sum_j B_ij(x) u_j + sum_k C_ik(x) v_k.
DynamicsSpec make_polynomial_affine(std::size_t state_dim, std::vector<Polynomial> a,
                                    std::vector<std::vector<Polynomial>> B, std::vector<std::vector<Polynomial>> C,
                                    InputBox control, InputBox disturbance);

} // namespace hjra

#endif
