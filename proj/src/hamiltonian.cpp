#include "hjra/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hjra {

namespace {

// Inclusive uniform lattice; degenerate interval collapses to a single point.
void append_axis(std::vector<std::vector<double>>& axes, double lo, double hi, int count)
{
    if (lo == hi) {
        axes.push_back({lo});
        return;
    }
    std::vector<double> pts(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k)
        pts[static_cast<std::size_t>(k)] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    pts.front() = lo;
    pts.back() = hi;
    axes.push_back(std::move(pts));
}

void build_lattice(const InputBox& box, int per_axis, std::vector<double>& flat, std::size_t& count)
{
    const std::size_t d = box.dim();
    count = 1;
    flat.clear();
    if (d == 0) return; // one empty sample: the player is absent
    std::vector<std::vector<double>> axes;
    axes.reserve(d);
    for (std::size_t a = 0; a < d; ++a) append_axis(axes, box.lower[a], box.upper[a], per_axis);
    for (const auto& ax : axes) count *= ax.size();
    flat.resize(count * d);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t pnt = 0; pnt < count; ++pnt) {
        for (std::size_t a = 0; a < d; ++a) flat[pnt * d + a] = axes[a][idx[a]];
        for (std::size_t a = d; a-- > 0;) {
            if (++idx[a] < axes[a].size()) break;
            idx[a] = 0;
        }
    }
}

} // namespace

HamiltonianSpec::HamiltonianSpec(DynamicsSpec dyn, int samples_per_input_axis, HamMode mode)
    : dyn_(std::move(dyn)), samples_(samples_per_input_axis), mode_(mode)
{
    if (samples_ < 2) throw ValidationError("HamiltonianSpec: samples_per_input_axis must be >= 2");
    if (!dyn_.flow) throw ValidationError("HamiltonianSpec: dynamics carry no flow function");
    build_lattice(dyn_.control, samples_, control_samples_, control_count_);
    build_lattice(dyn_.disturbance, samples_, disturbance_samples_, disturbance_count_);
}

namespace {

double ham_affine(const HamiltonianSpec& spec, std::span<const double> p, std::span<const double> x)
{
    thread_local AffineParts parts;
    spec.dyn().affine(x, parts);
    const std::size_t n = spec.dyn().state_dim;
    const std::size_t m = spec.dyn().control.dim();
    const std::size_t q = spec.dyn().disturbance.dim();

    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i) h += p[i] * parts.a[i];
    // inf over the control box: componentwise sign rule on p'B.
    for (std::size_t j = 0; j < m; ++j) {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += p[i] * parts.B[i * m + j];
        h += c * (c > 0.0 ? spec.dyn().control.lower[j] : spec.dyn().control.upper[j]);
    }
    // sup over the disturbance box.
    for (std::size_t k = 0; k < q; ++k) {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += p[i] * parts.C[i * q + k];
        h += c * (c > 0.0 ? spec.dyn().disturbance.upper[k] : spec.dyn().disturbance.lower[k]);
    }
    return h;
}

double ham_sampled(const HamiltonianSpec& spec, std::span<const double> p, std::span<const double> x)
{
    const std::size_t n = spec.dyn().state_dim;
    const std::size_t udim = spec.dyn().control.dim();
    const std::size_t vdim = spec.dyn().disturbance.dim();
    const auto us = spec.control_samples();
    const auto vs = spec.disturbance_samples();

    thread_local std::vector<double> f;
    f.resize(n);

    double outer = -std::numeric_limits<double>::infinity();
    for (std::size_t pv = 0; pv < spec.disturbance_count(); ++pv) {
        std::span<const double> v(vs.data() + pv * vdim, vdim);
        double inner = std::numeric_limits<double>::infinity();
        for (std::size_t pu = 0; pu < spec.control_count(); ++pu) {
            std::span<const double> u(us.data() + pu * udim, udim);
            spec.dyn().flow(x, u, v, f);
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += p[i] * f[i];
            if (!std::isfinite(dot)) throw NumericalError("ham_value: non-finite flow value");
            inner = std::min(inner, dot);
        }
        outer = std::max(outer, inner);
    }
    return outer;
}

} // namespace

double ham_value(const HamiltonianSpec& spec, std::span<const double> p, std::span<const double> x)
{
    if (p.size() != spec.dyn().state_dim || x.size() != spec.dyn().state_dim)
        throw ValidationError("ham_value: dimension mismatch");
    if (spec.dyn().affine_in_inputs && spec.dyn().affine) return ham_affine(spec, p, x);
    return ham_sampled(spec, p, x);
}

double ham_frozen(const HamiltonianSpec& spec, std::span<const double> p, std::span<const double> x)
{
    return std::min(0.0, ham_value(spec, p, x));
}

double lax_friedrichs(const HamiltonianSpec& spec, std::span<const double> dminus, std::span<const double> dplus,
                      std::span<const double> x, std::span<const double> alpha)
{
    const std::size_t n = spec.dyn().state_dim;
    if (dminus.size() != n || dplus.size() != n || alpha.size() != n)
        throw ValidationError("lax_friedrichs: dimension mismatch");
    thread_local std::vector<double> p;
    p.resize(n);
    double dissipation = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] < 0.0) throw ValidationError("lax_friedrichs: negative dissipation coefficient");
        p[i] = 0.5 * (dminus[i] + dplus[i]);
        dissipation += 0.5 * alpha[i] * (dplus[i] - dminus[i]);
    }
    const double h = spec.mode() == HamMode::Frozen ? ham_frozen(spec, p, x) : ham_value(spec, p, x);
    return h - dissipation;
}

} // namespace hjra
