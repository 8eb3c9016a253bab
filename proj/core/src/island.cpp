#include <algorithm>
#include <cmath>
#include <vector>

#include "fpend/classical.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fpend {

namespace {

// One period of the island-center trajectory, tabulated on the step grid.
// The center is a strobe fixed point, so q advances by an exact multiple of
// 2 pi per period and the table extends periodically.
struct CenterPath {
    std::vector<double> q;  // unwrapped, size steps + 1
    std::vector<double> p;
    double q_shift = 0.0;   // q(t + tau) - q(t)

    CenterPath(const SystemParams& par, const PhaseSpacePoint& center, int steps) {
        q.reserve(steps + 1);
        p.reserve(steps + 1);
        TrajectoryStepper s(par, center, 0.0);
        q.push_back(s.q_unwrapped());
        p.push_back(s.p());
        const double h = kTau / steps;
        for (int i = 0; i < steps; ++i) {
            s.step(h);
            q.push_back(s.q_unwrapped());
            p.push_back(s.p());
        }
        q_shift = q.back() - q.front();
    }

    double q_at(long global_step, int steps) const {
        long wrap = global_step / steps, idx = global_step % steps;
        return q[idx] + wrap * q_shift;
    }
    double p_at(long global_step, int steps) const { return p[global_step % steps]; }
};

enum class CellKind { Island, Sea, Outside };

// One seed of the area grid: paired-orbit divergence plus the libration bound
// |q - q_center|(t) < pi that separates island orbits from rotational tori.
CellKind classify_cell(const SystemParams& par, const PhaseSpacePoint& seed,
                       const CenterPath& path, const IslandAreaOptions& opt) {
    const double h = kTau / opt.steps_per_period;
    TrajectoryStepper a(par, seed, 0.0);
    TrajectoryStepper b(par, {seed.p + opt.pair_offset, seed.q}, 0.0);

    long step = 0;
    for (int k = 0; k < opt.n_iter; ++k) {
        for (int i = 0; i < opt.steps_per_period; ++i) {
            a.step(h);
            b.step(h);
            ++step;
            double x = a.q_unwrapped() - path.q_at(step, opt.steps_per_period);
            if (std::abs(x) > 0.999 * kPi) return CellKind::Outside;
        }
        if (std::abs(a.p()) > opt.escape_bound) return CellKind::Sea;
        double dp = a.p() - b.p();
        double dq = a.q_unwrapped() - b.q_unwrapped();
        if (dp * dp + dq * dq > opt.divergence_threshold * opt.divergence_threshold)
            return CellKind::Sea;
    }
    return CellKind::Island;
}

}  // namespace

IslandData island_area(const SystemParams& par, const IslandData& island,
                       const IslandAreaOptions& opt) {
    const int np = opt.grid_p, nq = opt.grid_q;
    const double p_lo = island.center.p - opt.span_p;
    const double dp = 2.0 * opt.span_p / np;
    const double dq = kTau / nq;

    const CenterPath path(par, island.center, opt.steps_per_period);
    std::vector<CellKind> kind(static_cast<size_t>(np) * nq, CellKind::Sea);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
    for (int idx = 0; idx < np * nq; ++idx) {
        int i = idx / nq, j = idx % nq;
        PhaseSpacePoint seed{p_lo + (i + 0.5) * dp,
                             wrap_angle(island.center.q - kPi + (j + 0.5) * dq)};
        kind[idx] = classify_cell(par, seed, path, opt);
    }

    // flood fill the island cells connected to the center (angle wraps)
    auto cell_of = [&](const PhaseSpacePoint& x) {
        int i = static_cast<int>(std::floor((x.p - p_lo) / dp));
        int j = static_cast<int>(
            std::floor(angle_diff(x.q, island.center.q - kPi) / dq));
        j = ((j % nq) + nq) % nq;
        return std::pair<int, int>(i, j);
    };
    auto [ci, cj] = cell_of(island.center);
    if (ci < 0 || ci >= np)
        throw GridTooCoarse("island_area: center outside the momentum window");
    if (kind[static_cast<size_t>(ci) * nq + cj] != CellKind::Island)
        throw GridTooCoarse("island_area: center cell not classified as island");

    std::vector<char> filled(kind.size(), 0);
    std::vector<int> stack = {ci * nq + cj};
    filled[stack[0]] = 1;
    long count = 0;
    bool touches_boundary = false;
    while (!stack.empty()) {
        int idx = stack.back();
        stack.pop_back();
        ++count;
        int i = idx / nq, j = idx % nq;
        if (i == 0 || i == np - 1) touches_boundary = true;
        const int di[4] = {1, -1, 0, 0};
        for (int d = 0; d < 4; ++d) {
            int ni = i + di[d];
            int nj = (d < 2) ? j : (j + (d == 2 ? 1 : nq - 1)) % nq;
            if (ni < 0 || ni >= np) continue;
            int nidx = ni * nq + nj;
            if (!filled[nidx] && kind[nidx] == CellKind::Island) {
                filled[nidx] = 1;
                stack.push_back(nidx);
            }
        }
    }
    if (touches_boundary)
        throw GridTooCoarse("island_area: island region reaches the grid momentum edge");

    IslandData out = island;
    out.area = count * dp * dq;
    out.action = out.area / kTau;
    return out;
}

std::vector<RotationSample> rotation_profile(const SystemParams& par, const IslandData& island,
                                             int n_samples, double span_p, int periods) {
    std::vector<RotationSample> samples(n_samples);
    std::vector<char> valid(n_samples, 0);
    const int steps = kDefaultStrobeSteps;
    const CenterPath path(par, island.center, steps);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (int k = 0; k < n_samples; ++k) {
        double r = span_p * (k + 1.0) / n_samples;
        PhaseSpacePoint seed{island.center.p + r, island.center.q};

        const double h = kTau / steps;
        TrajectoryStepper a(par, seed, 0.0);
        TrajectoryStepper b(par, {seed.p + 1e-9, seed.q}, 0.0);

        double cx = seed.q - island.center.q;
        double cy = seed.p - island.center.p;
        double angle = 0.0, area = 0.0;
        long step = 0;
        bool ok = true;
        for (int period = 0; period < periods && ok; ++period) {
            for (int i = 0; i < steps; ++i) {
                a.step(h);
                b.step(h);
                ++step;
                double x = a.q_unwrapped() - path.q_at(step, steps);
                double y = a.p() - path.p_at(step, steps);
                double cross = cx * y - cy * x;
                double dot = cx * x + cy * y;
                angle += std::atan2(cross, dot);
                area += 0.5 * cross;
                cx = x;
                cy = y;
                if (std::abs(x) > 0.999 * kPi) {
                    ok = false;
                    break;
                }
            }
            double dpb = a.p() - b.p();
            double dqb = a.q_unwrapped() - b.q_unwrapped();
            if (std::abs(a.p()) > 4.0 || dpb * dpb + dqb * dqb > 1e-6) ok = false;
        }
        if (!ok || std::abs(angle) < kTau) continue;
        samples[k].seed = seed;
        double omega_raw = std::abs(angle) / (periods * kTau);
        samples[k].omega_raw = omega_raw;
        double frac = omega_raw - std::floor(omega_raw);
        samples[k].omega = std::min(frac, 1.0 - frac);
        // enclosed action: (area per loop) / (2 pi) = |area| / |angle|
        samples[k].action = std::abs(area) / std::abs(angle);
        valid[k] = 1;
    }

    std::vector<RotationSample> out;
    out.reserve(n_samples);
    for (int k = 0; k < n_samples; ++k)
        if (valid[k]) out.push_back(samples[k]);
    return out;
}

double measure_libration_frequency(const SystemParams& par, const PhaseSpacePoint& anchor,
                                   int periods, int steps_per_period) {
    TrajectoryStepper s(par, anchor, 0.0);
    const double h = kTau / steps_per_period;
    double vx = 0.0, vy = 1.0;  // tangent vector components (q, p)
    double angle = 0.0;
    for (long i = 0; i < static_cast<long>(periods) * steps_per_period; ++i) {
        Mat2 m = Mat2::identity();
        s.step_with_tangent(h, m);
        double nx = m.qp * vy + m.qq * vx;
        double ny = m.pp * vy + m.pq * vx;
        angle += std::atan2(vx * ny - vy * nx, vx * nx + vy * ny);
        // renormalize to avoid under/overflow on long runs
        double norm = std::hypot(nx, ny);
        vx = nx / norm;
        vy = ny / norm;
    }
    return std::abs(angle) / (periods * kTau);
}

}  // namespace fpend
