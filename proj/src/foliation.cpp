#include "folcomp/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "folcomp/error.hpp"
#include "folcomp/parallel.hpp"

namespace folcomp {

SlopeFn field_slope(const Field& field) {
    return [&field](std::span<const double> x, double y, std::span<double> out) {
        const auto v = interpolate(field, x, y);
        std::copy(v.begin(), v.end(), out.begin());
    };
}

SegmentResult integrate_segment(const SlopeFn& nu, std::vector<double> x, double y, int axis, double target,
                                double step, std::vector<LeafSample>* trace) {
    SegmentResult r{y, false};
    const double start = x[axis];
    const double dist = target - start;
    if (dist == 0.0) return r;
    const long steps = static_cast<long>(std::ceil(std::abs(dist) / step));
    const double h = dist / static_cast<double>(steps);
    std::vector<double> slope(x.size());
    auto f = [&](double t, double yy) {
        x[axis] = t;
        nu(x, yy, slope);
        return slope[axis];
    };
    for (long s = 0; s < steps; ++s) {
        const double t0 = start + static_cast<double>(s) * h;
        const double t1 = s + 1 == steps ? target : start + static_cast<double>(s + 1) * h;
        const double k1 = f(t0, r.y);
        const double k2 = f(t0 + 0.5 * h, r.y + 0.5 * h * k1);
        const double k3 = f(t0 + 0.5 * h, r.y + 0.5 * h * k2);
        const double k4 = f(t1, r.y + h * k3);
        const double next = r.y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        if (!(std::abs(next) <= 1.0)) {
            r.left_domain = true;
            return r;
        }
        r.y = next;
        if (trace) {
            x[axis] = t1;
            trace->push_back({x, r.y});
        }
    }
    return r;
}

SegmentResult integrate_path(const SlopeFn& nu, std::span<const double> x0, double y0,
                             std::span<const double> x_target, std::span<const int> order, double step) {
    std::vector<double> x(x0.begin(), x0.end());
    SegmentResult r{y0, false};
    for (int axis : order) {
        r = integrate_segment(nu, x, r.y, axis, x_target[axis], step);
        if (r.left_domain) return r;
        x[axis] = x_target[axis];
    }
    return r;
}

Leaf trace_leaf(const SlopeFn& nu, const LeafSample& base, double step) {
    Leaf leaf;
    leaf.base = base;
    leaf.step = step;
    const int n = static_cast<int>(base.x.size());
    if (n == 1) {
        std::vector<LeafSample> left;
        leaf.truncated |= integrate_segment(nu, base.x, base.y, 0, -1.0, step, &left).left_domain;
        std::reverse(left.begin(), left.end());
        leaf.samples = std::move(left);
        leaf.samples.push_back(base);
        leaf.truncated |= integrate_segment(nu, base.x, base.y, 0, 1.0, step, &leaf.samples).left_domain;
        return leaf;
    }
    leaf.samples.push_back(base);
    for (int axis = 0; axis < n; ++axis)
        for (double end : {-1.0, 1.0})
            leaf.truncated |= integrate_segment(nu, base.x, base.y, axis, end, step, &leaf.samples).left_domain;
    return leaf;
}

Leaf trace_leaf(const Field& field, const LeafSample& base, double step) {
    return trace_leaf(field_slope(field), base, step);
}

InvarianceReport check_invariance(const LorenzMap& map, const SlopeFn& nu, const Leaf& leaf, double step) {
    InvarianceReport rep;
    if (leaf.base.y == 0.0) return rep;
    const Image tb = map.eval_T(leaf.base.x, leaf.base.y);
    std::vector<int> order(leaf.base.x.size());
    std::iota(order.begin(), order.end(), 0);

    // -1: skipped (outside D), otherwise the deviation.
    std::vector<double> dev(leaf.samples.size(), -1.0);
    parallel_for(leaf.samples.size(), [&](std::size_t s) {
        const auto& p = leaf.samples[s];
        if (p.y == 0.0) return;
        const Image img = map.eval_T(p.x, p.y);
        if (img.outside_D) return;
        const SegmentResult r = integrate_path(nu, tb.x, tb.y, img.x, order, step);
        if (r.left_domain) return;
        dev[s] = std::abs(r.y - img.y);
    });
    for (std::size_t s = 0; s < dev.size(); ++s) {
        if (leaf.samples[s].y == 0.0) continue;
        if (dev[s] < 0.0) {
            ++rep.outside;
            continue;
        }
        ++rep.checked;
        rep.max_deviation = std::max(rep.max_deviation, dev[s]);
    }
    return rep;
}

std::vector<double> signed_log_samples(double lo, double hi, int per_side) {
    std::vector<double> ys;
    for (int i = 0; i < per_side; ++i) {
        const double s = per_side == 1 ? hi : lo + (hi - lo) * i / (per_side - 1);
        ys.push_back(std::pow(10.0, s));
    }
    std::vector<double> out;
    for (auto it = ys.rbegin(); it != ys.rend(); ++it) out.push_back(-*it);
    out.insert(out.end(), ys.begin(), ys.end());
    return out;
}

namespace {

bool strictly_monotone(const std::vector<double>& v) {
    if (v.size() < 2) return true;
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        inc = inc && v[i] > v[i - 1];
        dec = dec && v[i] < v[i - 1];
    }
    return inc || dec;
}

} // namespace

ReducedMap reduce_1d(const LorenzMap& map, const SlopeFn& nu, double transversal_x, std::span<const double> ys,
                     double step) {
    const int n = map.n();
    ReducedMap rm;
    rm.transversal_x = transversal_x;
    const std::vector<double> xt(static_cast<std::size_t>(n), transversal_x);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    auto slide = [&](std::span<const double> x, double y) {
        if (!(std::abs(y) <= 1.0))
            throw Error(ErrorCode::LeafEscapes, "image point lies outside D; no leaf to slide along");
        for (double c : x)
            if (!(std::abs(c) <= 1.0))
                throw Error(ErrorCode::LeafEscapes, "image point lies outside D; no leaf to slide along");
        const SegmentResult r = integrate_path(nu, x, y, xt, order, step);
        if (r.left_domain) throw Error(ErrorCode::LeafEscapes, "leaf left D before reaching the transversal");
        return r.y;
    };

    rm.samples.resize(ys.size());
    parallel_for(ys.size(), [&](std::size_t i) {
        const Image img = map.eval_T(xt, ys[i]);
        rm.samples[i] = {ys[i], slide(img.x, img.y)};
    });
    const MapSpec& spec = map.spec();
    rm.G_zero_plus = slide(spec.x_star_plus, spec.y_star_plus);
    rm.G_zero_minus = slide(spec.x_star_minus, spec.y_star_minus);

    std::vector<double> plus, minus;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (const auto& s : rm.samples) {
        (s.y > 0 ? plus : minus).push_back(s.G);
        const double ay = std::abs(s.y);
        if (ay < 1e-3 || ay > 1e-1) continue;
        const double diff = std::abs(s.G - (s.y > 0 ? rm.G_zero_plus : rm.G_zero_minus));
        if (diff == 0.0) continue;
        const double lx = std::log(ay), ly = std::log(diff);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    rm.alpha_fit = count >= 2 ? (count * sxy - sx * sy) / (count * sxx - sx * sx) : 0.0;
    rm.monotone_plus = strictly_monotone(plus);
    rm.monotone_minus = strictly_monotone(minus);
    return rm;
}

double path_independence(const SlopeFn& nu, std::span<const double> base_x, double base_y,
                         std::span<const double> target_x, double step) {
    std::vector<int> order(base_x.size());
    std::iota(order.begin(), order.end(), 0);
    const SegmentResult a = integrate_path(nu, base_x, base_y, target_x, order, step);
    std::reverse(order.begin(), order.end());
    const SegmentResult b = integrate_path(nu, base_x, base_y, target_x, order, step);
    return std::abs(a.y - b.y);
}

} // namespace folcomp
