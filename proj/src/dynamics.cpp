#include "hjra/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace hjra {

InputBox::InputBox(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi))
{
    if (lower.size() != upper.size()) throw ValidationError("InputBox: lower/upper length mismatch");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw ValidationError("InputBox: non-finite bound on axis " + std::to_string(i));
        if (!(lower[i] <= upper[i]))
            throw ValidationError("InputBox: lower > upper on axis " + std::to_string(i));
    }
}

InputBox InputBox::symmetric(std::vector<double> bound)
{
    std::vector<double> lo(bound.size());
    for (std::size_t i = 0; i < bound.size(); ++i) lo[i] = -bound[i];
    return InputBox(std::move(lo), std::move(bound));
}

bool InputBox::contains(std::span<const double> v, double tol) const
{
    if (v.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
        if (v[i] < lower[i] - tol || v[i] > upper[i] + tol) return false;
    return true;
}

std::vector<double> flow_eval(const DynamicsSpec& dyn, std::span<const double> x, std::span<const double> u,
                              std::span<const double> v)
{
    if (x.size() != dyn.state_dim) throw ValidationError("flow_eval: state dimension mismatch");
    if (u.size() != dyn.control.dim()) throw ValidationError("flow_eval: control dimension mismatch");
    if (v.size() != dyn.disturbance.dim()) throw ValidationError("flow_eval: disturbance dimension mismatch");
    if (!dyn.control.contains(u)) throw ValidationError("flow_eval: control outside input box");
    if (!dyn.disturbance.contains(v)) throw ValidationError("flow_eval: disturbance outside input box");
    std::vector<double> out(dyn.state_dim);
    dyn.flow(x, u, v, out);
    return out;
}

namespace {

// Inclusive uniform lattice over [lo, hi]; endpoints always present.
std::vector<double> axis_lattice(double lo, double hi, std::size_t count)
{
    if (lo == hi || count < 2) return {lo};
    std::vector<double> pts(count);
    for (std::size_t k = 0; k < count; ++k)
        pts[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    pts.front() = lo;
    pts.back() = hi;
    return pts;
}

// Cartesian product of per-axis lattices, flattened as consecutive points.
std::vector<double> box_lattice(const InputBox& box, std::size_t per_axis, std::size_t& count)
{
    const std::size_t d = box.dim();
    if (d == 0) {
        count = 1;
        return {};
    }
    std::vector<std::vector<double>> axes(d);
    count = 1;
    for (std::size_t a = 0; a < d; ++a) {
        axes[a] = axis_lattice(box.lower[a], box.upper[a], per_axis);
        count *= axes[a].size();
    }
    std::vector<double> flat(count * d);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t p = 0; p < count; ++p) {
        for (std::size_t a = 0; a < d; ++a) flat[p * d + a] = axes[a][idx[a]];
        for (std::size_t a = d; a-- > 0;) {
            if (++idx[a] < axes[a].size()) break;
            idx[a] = 0;
        }
    }
    return flat;
}

} // namespace

std::vector<double> per_axis_speed_bound(const DynamicsSpec& dyn, const Grid& domain)
{
    if (domain.dim() != dyn.state_dim) throw ValidationError("per_axis_speed_bound: grid dimension mismatch");

    constexpr std::size_t kStateSamples = 9;
    constexpr std::size_t kInputSamples = 3;

    std::vector<std::vector<double>> state_axes(dyn.state_dim);
    for (std::size_t a = 0; a < dyn.state_dim; ++a)
        state_axes[a] = axis_lattice(domain.axis(a).min, domain.axis(a).max, kStateSamples);

    std::size_t u_count = 0, v_count = 0;
    const std::vector<double> us = box_lattice(dyn.control, kInputSamples, u_count);
    const std::vector<double> vs = box_lattice(dyn.disturbance, kInputSamples, v_count);
    const std::size_t udim = dyn.control.dim();
    const std::size_t vdim = dyn.disturbance.dim();

    std::vector<double> alpha(dyn.state_dim, 0.0);
    std::vector<double> x(dyn.state_dim), f(dyn.state_dim);
    std::vector<std::size_t> idx(dyn.state_dim, 0);
    std::size_t state_count = 1;
    for (const auto& ax : state_axes) state_count *= ax.size();

    for (std::size_t s = 0; s < state_count; ++s) {
        for (std::size_t a = 0; a < dyn.state_dim; ++a) x[a] = state_axes[a][idx[a]];
        for (std::size_t pu = 0; pu < u_count; ++pu) {
            std::span<const double> u(us.data() + pu * udim, udim);
            for (std::size_t pv = 0; pv < v_count; ++pv) {
                std::span<const double> v(vs.data() + pv * vdim, vdim);
                dyn.flow(x, u, v, f);
                for (std::size_t a = 0; a < dyn.state_dim; ++a) {
                    if (!std::isfinite(f[a]))
                        throw NumericalError("per_axis_speed_bound: non-finite flow value on axis " + std::to_string(a));
                    alpha[a] = std::max(alpha[a], std::abs(f[a]));
                }
            }
        }
        for (std::size_t a = dyn.state_dim; a-- > 0;) {
            if (++idx[a] < state_axes[a].size()) break;
            idx[a] = 0;
        }
    }
    for (double& v : alpha) v *= 1.05;
    return alpha;
}

double Polynomial::eval(std::span<const double> x) const
{
    double acc = 0.0;
    for (const auto& m : terms) {
        double t = m.coef;
        for (std::size_t a = 0; a < m.powers.size() && a < x.size(); ++a) {
            for (unsigned k = 0; k < m.powers[a]; ++k) t *= x[a];
        }
        acc += t;
    }
    return acc;
}

namespace {

DynamicsSpec make_constant_affine(std::size_t state_dim, std::vector<double> drift_matrix, std::vector<double> B,
                                  std::vector<double> C, InputBox control, InputBox disturbance)
{
    // drift_matrix is state_dim x state_dim acting on x (row-major).
    DynamicsSpec dyn;
    dyn.state_dim = state_dim;
    dyn.control = std::move(control);
    dyn.disturbance = std::move(disturbance);
    dyn.affine_in_inputs = true;
    const std::size_t m = dyn.control.dim();
    const std::size_t p = dyn.disturbance.dim();
    if (B.size() != state_dim * m) throw ValidationError("dynamics: B size mismatch");
    if (C.size() != state_dim * p) throw ValidationError("dynamics: C size mismatch");

    auto drift = std::make_shared<std::vector<double>>(std::move(drift_matrix));
    auto Bm = std::make_shared<std::vector<double>>(std::move(B));
    auto Cm = std::make_shared<std::vector<double>>(std::move(C));

    dyn.flow = [state_dim, m, p, drift, Bm, Cm](std::span<const double> x, std::span<const double> u,
                                                std::span<const double> v, std::span<double> out) {
        for (std::size_t i = 0; i < state_dim; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < state_dim; ++j) acc += (*drift)[i * state_dim + j] * x[j];
            for (std::size_t j = 0; j < m; ++j) acc += (*Bm)[i * m + j] * u[j];
            for (std::size_t k = 0; k < p; ++k) acc += (*Cm)[i * p + k] * v[k];
            out[i] = acc;
        }
    };
    dyn.affine = [state_dim, m, p, drift, Bm, Cm](std::span<const double> x, AffineParts& parts) {
        parts.a.assign(state_dim, 0.0);
        for (std::size_t i = 0; i < state_dim; ++i)
            for (std::size_t j = 0; j < state_dim; ++j) parts.a[i] += (*drift)[i * state_dim + j] * x[j];
        parts.B = *Bm;
        parts.C = *Cm;
    };
    return dyn;
}

} // namespace

DynamicsSpec make_integrator_1d(InputBox control, InputBox disturbance)
{
    if (control.dim() != 1) throw ValidationError("integrator_1d: control must be 1-dimensional");
    if (disturbance.dim() > 1) throw ValidationError("integrator_1d: disturbance must be absent or 1-dimensional");
    std::vector<double> C(disturbance.dim(), 1.0);
    return make_constant_affine(1, {0.0}, {1.0}, std::move(C), std::move(control), std::move(disturbance));
}

DynamicsSpec make_double_integrator_2d(InputBox control, InputBox disturbance)
{
    if (control.dim() != 1) throw ValidationError("double_integrator_2d: control must be 1-dimensional");
    if (disturbance.dim() > 1)
        throw ValidationError("double_integrator_2d: disturbance must be absent or 1-dimensional");
    std::vector<double> C;
    if (disturbance.dim() == 1) C = {0.0, 1.0};
    return make_constant_affine(2, {0.0, 1.0, 0.0, 0.0}, {0.0, 1.0}, std::move(C), std::move(control),
                                std::move(disturbance));
}

DynamicsSpec make_game_2d(InputBox control, InputBox disturbance)
{
    if (control.dim() != 2 || disturbance.dim() != 2)
        throw ValidationError("game_2d: control and disturbance must be 2-dimensional");
    return make_constant_affine(2, {0.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 0.0, 1.0},
                                std::move(control), std::move(disturbance));
}

DynamicsSpec make_zero_dynamics(std::size_t state_dim)
{
    DynamicsSpec dyn;
    dyn.state_dim = state_dim;
    dyn.affine_in_inputs = true;
    dyn.speed_bound = std::vector<double>(state_dim, 0.0);
    dyn.flow = [](std::span<const double>, std::span<const double>, std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
    dyn.affine = [state_dim](std::span<const double>, AffineParts& parts) {
        parts.a.assign(state_dim, 0.0);
        parts.B.clear();
        parts.C.clear();
    };
    return dyn;
}

DynamicsSpec make_polynomial_affine(std::size_t state_dim, std::vector<Polynomial> a,
                                    std::vector<std::vector<Polynomial>> B, std::vector<std::vector<Polynomial>> C,
                                    InputBox control, InputBox disturbance)
{
    if (a.size() != state_dim) throw ValidationError("polynomial dynamics: drift row count mismatch");
    if (B.size() != state_dim || C.size() != state_dim)
        throw ValidationError("polynomial dynamics: matrix row count mismatch");
    const std::size_t m = control.dim();
    const std::size_t p = disturbance.dim();
    for (const auto& row : B)
        if (row.size() != m) throw ValidationError("polynomial dynamics: B column count mismatch");
    for (const auto& row : C)
        if (row.size() != p) throw ValidationError("polynomial dynamics: C column count mismatch");

    DynamicsSpec dyn;
    dyn.state_dim = state_dim;
    dyn.control = std::move(control);
    dyn.disturbance = std::move(disturbance);
    dyn.affine_in_inputs = true;

    auto pa = std::make_shared<std::vector<Polynomial>>(std::move(a));
    auto pB = std::make_shared<std::vector<std::vector<Polynomial>>>(std::move(B));
    auto pC = std::make_shared<std::vector<std::vector<Polynomial>>>(std::move(C));

    dyn.flow = [state_dim, m, p, pa, pB, pC](std::span<const double> x, std::span<const double> u,
                                             std::span<const double> v, std::span<double> out) {
        for (std::size_t i = 0; i < state_dim; ++i) {
            double acc = (*pa)[i].eval(x);
            for (std::size_t j = 0; j < m; ++j) acc += (*pB)[i][j].eval(x) * u[j];
            for (std::size_t k = 0; k < p; ++k) acc += (*pC)[i][k].eval(x) * v[k];
            out[i] = acc;
        }
    };
    dyn.affine = [state_dim, m, p, pa, pB, pC](std::span<const double> x, AffineParts& parts) {
        parts.a.resize(state_dim);
        parts.B.resize(state_dim * m);
        parts.C.resize(state_dim * p);
        for (std::size_t i = 0; i < state_dim; ++i) {
            parts.a[i] = (*pa)[i].eval(x);
            for (std::size_t j = 0; j < m; ++j) parts.B[i * m + j] = (*pB)[i][j].eval(x);
            for (std::size_t k = 0; k < p; ++k) parts.C[i * p + k] = (*pC)[i][k].eval(x);
        }
    };
    return dyn;
}

} // namespace hjra
