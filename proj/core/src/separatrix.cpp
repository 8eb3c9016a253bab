#include "fpend/separatrix.hpp"

#include <algorithm>
#include <cmath>

#include "fpend/errors.hpp"

namespace fpend {

namespace {

struct Frame {
    PhaseSpacePoint center;
    double aspect = 1.0;  // p extent over q extent of the chain

    double dq(const PhaseSpacePoint& x) const { return angle_diff(x.q, center.q); }
    double dp(const PhaseSpacePoint& x) const { return x.p - center.p; }
    double radius(const PhaseSpacePoint& x) const {
        return std::hypot(dp(x), aspect * dq(x));
    }
    double angle(const PhaseSpacePoint& x) const { return std::atan2(dp(x), aspect * dq(x)); }
};

double polygon_area(std::vector<PhaseSpacePoint>& pts, const Frame& frame, int ell,
                    bool cylinder_band) {
    if (cylinder_band) {
        // p(q) graph winding the cylinder: enclosed area = closed integral p dq
        std::sort(pts.begin(), pts.end(),
                  [&](const PhaseSpacePoint& a, const PhaseSpacePoint& b) {
                      return frame.dq(a) < frame.dq(b);
                  });
        double max_gap = kTau + frame.dq(pts.front()) - frame.dq(pts.back());
        for (size_t i = 0; i + 1 < pts.size(); ++i)
            max_gap = std::max(max_gap, frame.dq(pts[i + 1]) - frame.dq(pts[i]));
        if (max_gap > kPi / std::max(2, ell))
            throw ManifoldEscape("separatrix band has a coverage gap; chain too eroded");
        double area = 0.0;
        for (size_t i = 0; i < pts.size(); ++i) {
            const PhaseSpacePoint& a = pts[i];
            const PhaseSpacePoint& b = pts[(i + 1) % pts.size()];
            double dq = b.q - a.q;
            if (i + 1 == pts.size()) dq += kTau;  // close across the seam
            area += 0.5 * (a.p + b.p) * dq;
        }
        return std::abs(area);
    }

    std::sort(pts.begin(), pts.end(), [&](const PhaseSpacePoint& a, const PhaseSpacePoint& b) {
        return frame.angle(a) < frame.angle(b);
    });
    // angular coverage check: a valid loop leaves no gap wider than half the
    // spacing between neighbouring chain cells
    double max_gap = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        double a0 = frame.angle(pts[i]);
        double a1 = (i + 1 < pts.size()) ? frame.angle(pts[i + 1]) : frame.angle(pts[0]) + kTau;
        max_gap = std::max(max_gap, a1 - a0);
    }
    if (max_gap > kPi / std::max(2, ell))
        throw ManifoldEscape("separatrix polygon has an angular gap; chain too eroded");

    double area = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const PhaseSpacePoint& a = pts[i];
        const PhaseSpacePoint& b = pts[(i + 1) % pts.size()];
        area += frame.dq(a) * frame.dp(b) - frame.dq(b) * frame.dp(a);
    }
    return 0.5 * std::abs(area);
}

}  // namespace

SeparatrixAreas trace_separatrix_areas(const MapSystem& sys,
                                       const std::vector<PhaseSpacePoint>& chain_points,
                                       const PhaseSpacePoint& center,
                                       const SeparatrixOptions& opt) {
    if (chain_points.empty())
        throw std::invalid_argument("trace_separatrix_areas: empty chain");
    const int ell = static_cast<int>(chain_points.size());

    Frame frame;
    frame.center = center;
    if (opt.cylinder_band) {
        frame.aspect = 0.0;  // radius degenerates to |dp|: bands are p(q) graphs
    } else {
        double pext = 1e-12, qext = 1e-12;
        for (const auto& c : chain_points) {
            pext = std::max(pext, std::abs(c.p - center.p));
            qext = std::max(qext, std::abs(angle_diff(c.q, center.q)));
        }
        frame.aspect = pext / qext;
    }

    double chain_radius = 0.0;
    for (const auto& c : chain_points) chain_radius += frame.radius(c);
    chain_radius /= ell;

    double intercell = std::numeric_limits<double>::infinity();
    for (int a = 0; a < ell; ++a)
        for (int b = a + 1; b < ell; ++b)
            intercell = std::min(intercell,
                                 phase_space_distance(chain_points[a], chain_points[b]));
    if (!std::isfinite(intercell)) intercell = 1.0;

    const double escape_radius =
        opt.escape_factor * std::max(chain_radius, 0.5 * intercell);

    // the branch with the larger median radius forms the outer loop
    struct Branch {
        double median_radius;
        std::vector<PhaseSpacePoint> cloud;
    };
    std::vector<Branch> branches;
    std::vector<PhaseSpacePoint> outer, inner;

    // traces both unstable branches out of one hyperbolic point; `replicate`
    // copies the arcs into the remaining cells when a symmetry is available
    auto trace_cell = [&](const PhaseSpacePoint& pt, bool replicate) {
        auto [img, mono] = sys.map_tangent(pt);
        (void)img;
        double tr = mono.trace();
        if (std::abs(tr) <= 2.0)
            throw std::invalid_argument(
                "trace_separatrix_areas: chain point is not hyperbolic");
        double disc = std::sqrt(tr * tr - 4.0);
        double lam = 0.5 * (tr + (tr > 0 ? disc : -disc));  // expanding eigenvalue
        double up = mono.pq, uq = lam - mono.pp;            // eigenvector in (dp, dq)
        if (std::hypot(up, uq) < 1e-14) {
            up = lam - mono.qq;
            uq = mono.qp;
        }
        double norm = std::hypot(up, uq);
        up /= norm;
        uq /= norm;

        const double expansion = std::max(std::abs(lam), opt.min_expansion);
        for (double sign : {+1.0, -1.0}) {
            std::vector<PhaseSpacePoint> arc;
            int contributing = 0;
            for (int j = 0; j < opt.seeds_per_segment; ++j) {
                double scale =
                    opt.seed_offset * std::pow(expansion, double(j) / opt.seeds_per_segment);
                PhaseSpacePoint x{pt.p + sign * scale * up,
                                  wrap_angle(pt.q + sign * scale * uq)};
                // trace to the closest approach of a neighbouring cell; a
                // developed chain has a thick tangle, so the post-approach
                // part of the trajectory is discarded rather than waited out
                std::vector<PhaseSpacePoint> path;
                std::vector<double> dist;
                for (int it = 0; it < opt.max_applications; ++it) {
                    x = sys.map(x);
                    if (frame.radius(x) > escape_radius) break;
                    double dmin = std::numeric_limits<double>::infinity();
                    for (const auto& c : chain_points) {
                        bool is_start = phase_space_distance(c, pt) < 1e-9;
                        if (is_start && !(ell == 1 && it > 2)) continue;
                        dmin = std::min(dmin, phase_space_distance(x, c));
                    }
                    path.push_back(x);
                    dist.push_back(dmin);
                    if (dmin < opt.arrive_tol) break;  // clean heteroclinic arrival
                }
                if (path.empty()) continue;
                size_t cut = std::min_element(dist.begin(), dist.end()) - dist.begin();
                if (dist[cut] > 0.5 * intercell) continue;  // never reached a neighbour
                arc.insert(arc.end(), path.begin(), path.begin() + cut + 1);
                ++contributing;
            }
            if (contributing == 0)
                throw ManifoldEscape("unstable manifold never approaches a neighbouring "
                                     "chain cell");
            // drop the crawl near the seed point before classifying
            std::vector<PhaseSpacePoint> trimmed;
            for (const auto& x : arc)
                if (phase_space_distance(x, pt) > 0.05 * intercell) trimmed.push_back(x);
            if (trimmed.empty()) trimmed = arc;

            std::vector<PhaseSpacePoint> cloud = trimmed;
            if (replicate && sys.arc_symmetry) {
                std::vector<PhaseSpacePoint> cur = trimmed;
                for (int k = 1; k < ell; ++k) {
                    for (auto& x : cur) x = sys.arc_symmetry(x);
                    cloud.insert(cloud.end(), cur.begin(), cur.end());
                }
            }
            std::vector<double> radii(cloud.size());
            for (size_t i = 0; i < cloud.size(); ++i)
                radii[i] = opt.cylinder_band ? frame.dp(cloud[i]) : frame.radius(cloud[i]);
            std::nth_element(radii.begin(), radii.begin() + radii.size() / 2, radii.end());
            branches.push_back({radii[radii.size() / 2], std::move(cloud)});
        }
    };

    if (sys.arc_symmetry) {
        trace_cell(chain_points.front(), true);
    } else {
        for (const auto& pt : chain_points) trace_cell(pt, false);
    }
    // branches come in pairs per traced cell; split each pair by radius
    for (size_t i = 0; i + 1 < branches.size(); i += 2) {
        bool first_outer = branches[i].median_radius > branches[i + 1].median_radius;
        auto& out_cloud = first_outer ? branches[i].cloud : branches[i + 1].cloud;
        auto& in_cloud = first_outer ? branches[i + 1].cloud : branches[i].cloud;
        outer.insert(outer.end(), out_cloud.begin(), out_cloud.end());
        inner.insert(inner.end(), in_cloud.begin(), in_cloud.end());
    }

    if (outer.empty() || inner.empty())
        throw ManifoldEscape("could not separate outer and inner manifold branches");
    for (const auto& c : chain_points) {
        outer.push_back(c);
        inner.push_back(c);
    }

    SeparatrixAreas areas;
    areas.outer = polygon_area(outer, frame, ell, opt.cylinder_band);
    areas.inner = polygon_area(inner, frame, ell, opt.cylinder_band);
    if (areas.outer < areas.inner) std::swap(areas.outer, areas.inner);
    return areas;
}

SeparatrixAreas separatrix_areas(const SystemParams& par, const PeriodicOrbit& chain,
                                 const PhaseSpacePoint& island_center, int steps_per_period,
                                 const SeparatrixOptions& opt) {
    StrobeMap strobe(par, steps_per_period);
    const int ell = chain.period_multiplier;

    std::vector<PhaseSpacePoint> chain_points;
    chain_points.reserve(ell);
    PhaseSpacePoint x = chain.anchor;
    for (int k = 0; k < ell; ++k) {
        chain_points.push_back(x);
        x = strobe.apply(x);
    }

    MapSystem sys;
    sys.map = [strobe, ell](const PhaseSpacePoint& p) { return strobe.apply_n(p, ell); };
    sys.map_tangent = [strobe, ell](const PhaseSpacePoint& p) {
        return strobe.apply_with_tangent(p, ell);
    };
    sys.arc_symmetry = [strobe](const PhaseSpacePoint& p) { return strobe.apply(p); };
    return trace_separatrix_areas(sys, chain_points, island_center, opt);
}

}  // namespace fpend
