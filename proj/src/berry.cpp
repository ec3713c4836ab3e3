#include "rytov/berry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "rytov/errors.hpp"

namespace rytov {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

int checked_sigma(int sigma) {
    if (sigma != 1 && sigma != -1)
        throw DomainError("helicity must be +1 or -1, got " + std::to_string(sigma));
    return sigma;
}

bool on_axis(const Vec3& p, double guard_rel) {
    const double rho2 = p.x * p.x + p.y * p.y;
    const double guard = guard_rel * p.norm();
    return rho2 <= guard * guard;
}

void check_resolution(const std::vector<PathSample>& s, const EstimatorOptions& opts) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const Vec3 a = s[i].p.normalized();
        const Vec3 b = s[i + 1].p.normalized();
        if (dot(a, b) < -1.0 + 1e-12)
            throw AntipodalSegmentError("consecutive direction samples are antipodal at index " +
                                        std::to_string(i));
        const double step = angle_between(a, b);
        if (step > opts.max_angular_step)
            throw ResolutionError("angular step " + std::to_string(step) + " rad at index " +
                                  std::to_string(i) + " exceeds the resolution limit " +
                                  std::to_string(opts.max_angular_step));
    }
}

void check_closed(const MomentumPath& path) {
    if (!path.closed()) throw NotClosedError("path is not flagged closed");
    const double gap = path.endpoint_gap();
    if (gap > path.closure_tol())
        throw NotClosedError("closed-flagged path endpoints differ by " + std::to_string(gap) +
                             " rad (tolerance " + std::to_string(path.closure_tol()) + ")");
}

/// Azimuth steps with nearest-branch continuation; phi is frozen across
/// samples inside the axis guard, where the azimuth is meaningless.
class AzimuthTracker {
public:
    explicit AzimuthTracker(double guard_rel) : guard_rel_(guard_rel) {}

    /// Returns the unwrapped increment from the previous off-axis sample.
    double step(const Vec3& p) {
        if (on_axis(p, guard_rel_)) return 0.0;
        const double phi = std::atan2(p.y, p.x);
        double dphi = 0.0;
        if (have_prev_) dphi = std::remainder(phi - prev_phi_, kTwoPi);
        prev_phi_ = phi;
        have_prev_ = true;
        return dphi;
    }

private:
    double guard_rel_;
    double prev_phi_ = 0.0;
    bool have_prev_ = false;
};

double cos_zenith(const Vec3& p) { return p.z / p.norm(); }

/// Signed spherical excess of the triangle (a, b, c) on the unit sphere,
/// oriented by the sign of det[a b c]. L'Huilier's formula is stable for the
/// skinny triangles a fan produces.
double signed_excess(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double sa = angle_between(b, c);
    const double sb = angle_between(a, c);
    const double sc = angle_between(a, b);
    const double s = 0.5 * (sa + sb + sc);
    const double t = std::tan(0.5 * s) * std::tan(0.5 * (s - sa)) * std::tan(0.5 * (s - sb)) *
                     std::tan(0.5 * (s - sc));
    if (!(t > 0.0)) return 0.0;  // degenerate or rounding below zero
    const double excess = 4.0 * std::atan(std::sqrt(t));
    const double orientation = dot(a, cross(b, c));
    if (orientation > 0.0) return excess;
    if (orientation < 0.0) return -excess;
    return 0.0;
}

/// Deterministic fan apex: a direction with geodesic clearance from every
/// vertex (no near-antipodal pair). The fan sum measures the solid angle
/// relative to the winding degree at the apex's antipode, and the branch the
/// phase formula gamma = sigma (2 pi w - Omega) needs is the one relative to
/// the south pole, so the polar axis is tried first: it keeps the unwrapped
/// gamma on the line integral's branch whenever the curve clears the south
/// pole. Fallback apexes still give the right phase modulo 2 pi.
Vec3 pick_apex(const std::vector<Vec3>& verts) {
    std::vector<Vec3> candidates{{0, 0, 1}};
    Vec3 normal{};
    Vec3 mean{};
    for (std::size_t i = 0; i < verts.size(); ++i) {
        normal += cross(verts[i], verts[(i + 1) % verts.size()]);
        mean += verts[i];
    }
    if (normal.norm() > 1e-9) candidates.push_back(normal.normalized());
    if (mean.norm() > 1e-9) candidates.push_back(mean.normalized());
    candidates.insert(candidates.end(), {{0, 0, -1}, {1, 0, 0}, {0, 1, 0}});
    // golden-spiral fallback directions
    for (int k = 0; k < 16; ++k) {
        const double z = -1.0 + (2.0 * k + 1.0) / 16.0;
        const double phi = 2.399963229728653 * k;
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        candidates.push_back({s * std::cos(phi), s * std::sin(phi), z});
    }

    Vec3 best{};
    double best_clearance = -1.0;
    for (const Vec3& cand : candidates) {
        double clearance = kPi;
        for (const Vec3& v : verts) clearance = std::min(clearance, kPi - angle_between(cand, v));
        if (clearance > 0.15) return cand;
        if (clearance > best_clearance) {
            best_clearance = clearance;
            best = cand;
        }
    }
    if (best_clearance <= 1e-9)
        throw AntipodalSegmentError("no valid triangulation apex for this direction curve");
    return best;
}

struct Polygon {
    std::vector<Vec3> verts;      // unit directions, implicit wrap-around edge
    double closure_arc = 0.0;     // geodesic angle appended for open paths
};

/// Direction polygon of the path. Closed paths drop the duplicated endpoint;
/// open paths are completed with a sampled geodesic arc between the endpoint
/// directions (the arc itself carries no geometric phase).
Polygon direction_polygon(const MomentumPath& path) {
    const auto& s = path.samples();
    Polygon poly;
    poly.verts.reserve(s.size() + 8);
    for (const auto& ps : s) poly.verts.push_back(ps.p.normalized());

    if (path.closed() && path.endpoint_gap() <= path.closure_tol()) {
        poly.verts.pop_back();
        return poly;
    }

    const Vec3 a = poly.verts.back();
    const Vec3 b = poly.verts.front();
    const double arc = angle_between(a, b);
    poly.closure_arc = arc;
    if (arc < 1e-15) {
        poly.verts.pop_back();
        return poly;
    }
    if (dot(a, b) < -1.0 + 1e-12)
        throw AntipodalSegmentError("open-path endpoints are antipodal; geodesic closure undefined");
    // slerp intermediate points, fine enough for the winding unwrap
    const int n_arc = std::max(1, static_cast<int>(std::ceil(arc / 0.05)));
    const Vec3 axis_dir = cross(a, b).normalized();
    for (int k = 1; k < n_arc; ++k) {
        const double ang = arc * k / n_arc;
        // rotate a towards b about axis_dir by ang (Rodrigues, unit inputs)
        const Vec3 v = a * std::cos(ang) + cross(axis_dir, a) * std::sin(ang) +
                       axis_dir * (dot(axis_dir, a) * (1.0 - std::cos(ang)));
        poly.verts.push_back(v.normalized());
    }
    return poly;
}

Vec3 rodrigues(const Vec3& v, const Vec3& unit_axis, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return v * c + cross(unit_axis, v) * s + unit_axis * (dot(unit_axis, v) * (1.0 - c));
}

/// Newton-iterated Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

}  // namespace

MomentumPath::MomentumPath(std::vector<PathSample> samples, bool closed, double closure_tol)
    : samples_(std::move(samples)), closed_(closed), closure_tol_(closure_tol) {
    if (samples_.size() < 3)
        throw ValidationError("momentum path needs at least 3 samples, got " +
                              std::to_string(samples_.size()));
    if (!(closure_tol_ > 0.0)) throw ValidationError("closure tolerance must be positive");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!(samples_[i].p.norm() > 0.0))
            throw ZeroMomentumError("path sample " + std::to_string(i) + " has zero momentum");
        if (i > 0 && !(samples_[i].t > samples_[i - 1].t))
            throw ValidationError("path times must be strictly increasing (index " +
                                  std::to_string(i) + ")");
    }
}

double MomentumPath::endpoint_gap() const {
    return angle_between(samples_.front().p, samples_.back().p);
}

MomentumPath MomentumPath::circle(double theta, double p_mag, int samples, int windings,
                                  double phase0, double period) {
    if (samples < 3) throw ValidationError("circle path needs at least 3 samples");
    if (!(p_mag > 0.0)) throw ZeroMomentumError("circle path needs p_mag > 0");
    if (windings == 0) throw ValidationError("circle path needs a nonzero winding count");
    std::vector<PathSample> s;
    s.reserve(samples + 1);
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    for (int i = 0; i <= samples; ++i) {
        const double u = static_cast<double>(i) / samples;
        const double phi = phase0 + kTwoPi * windings * u;
        s.push_back({period * u,
                     {p_mag * st * std::cos(phi), p_mag * st * std::sin(phi), p_mag * ct}});
    }
    return MomentumPath(std::move(s), /*closed=*/true);
}

Vec3 connection(const Vec3& p, double axis_guard_rel) {
    const double norm = p.norm();
    if (!(norm > 0.0)) throw ZeroMomentumError("connection undefined at zero momentum");
    if (on_axis(p, axis_guard_rel))
        throw AxisSingularityError("momentum within the axis guard; rotate the gauge or use the "
                                   "solid-angle estimator");
    const double rho2 = p.x * p.x + p.y * p.y;
    const double pref = p.z / (norm * rho2);
    return {-pref * p.y, pref * p.x, 0.0};
}

Vec3 curvature(const Vec3& p, int sigma) {
    checked_sigma(sigma);
    const double norm = p.norm();
    if (!(norm > 0.0)) throw ZeroMomentumError("curvature undefined at zero momentum");
    return p * (-sigma / (norm * norm * norm));
}

PhaseResult rytov_line_integral(const MomentumPath& path, int sigma,
                                const EstimatorOptions& opts) {
    checked_sigma(sigma);
    check_closed(path);
    const auto& s = path.samples();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (on_axis(s[i].p, opts.axis_guard_rel))
            throw AxisSingularityError("path sample " + std::to_string(i) +
                                       " lies within the axis guard");
    }
    check_resolution(s, opts);

    AzimuthTracker az(opts.axis_guard_rel);
    az.step(s[0].p);
    double gamma = 0.0;
    double phi_total = 0.0;
    double cos_prev = cos_zenith(s[0].p);
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double dphi = az.step(s[i].p);
        const double cos_next = cos_zenith(s[i].p);
        gamma += 0.5 * (cos_prev + cos_next) * dphi;
        phi_total += dphi;
        cos_prev = cos_next;
    }

    PhaseResult result;
    result.method = PhaseMethod::line_integral;
    result.gamma = sigma * gamma;
    result.winding = std::lround(phi_total / kTwoPi);
    return result;
}

PhaseResult rytov_solid_angle(const MomentumPath& path, int sigma, const EstimatorOptions& opts) {
    checked_sigma(sigma);
    if (path.closed() && path.endpoint_gap() > path.closure_tol())
        throw NotClosedError("closed-flagged path endpoints differ by " +
                             std::to_string(path.endpoint_gap()) + " rad");
    check_resolution(path.samples(), opts);

    const Polygon poly = direction_polygon(path);
    // fewer than 3 distinct directions bound a degenerate (zero-area) loop
    const double omega =
        poly.verts.size() >= 3 ? spherical_polygon_solid_angle(poly.verts) : 0.0;

    AzimuthTracker az(opts.axis_guard_rel);
    double phi_total = 0.0;
    az.step(poly.verts[0]);
    for (std::size_t i = 1; i < poly.verts.size(); ++i) phi_total += az.step(poly.verts[i]);
    phi_total += az.step(poly.verts[0]);  // wrap-around edge

    PhaseResult result;
    result.method = PhaseMethod::solid_angle;
    result.winding = std::lround(phi_total / kTwoPi);
    result.gamma = sigma * (kTwoPi * result.winding - omega);
    result.closure_correction = 0.0;  // geodesic closure carries no phase
    result.closure_arc_length = poly.closure_arc;
    return result;
}

double transport_polarization(const MomentumPath& path, const Vec3& e0,
                              const EstimatorOptions& opts) {
    check_closed(path);
    if (std::abs(e0.norm() - 1.0) > 1e-10)
        throw NotTransverseError("initial polarization must be unit length, |e0| = " +
                                 std::to_string(e0.norm()));
    const auto& s = path.samples();
    const Vec3 u0 = s.front().p.normalized();
    if (std::abs(dot(e0, u0)) > 1e-10)
        throw NotTransverseError("initial polarization is not transverse to the initial "
                                 "direction");
    check_resolution(s, opts);

    Vec3 e = e0;
    Vec3 u_prev = u0;
    for (std::size_t i = 1; i <= s.size(); ++i) {
        const Vec3 u_next = (i < s.size() ? s[i].p : s.front().p).normalized();
        const Vec3 axis = cross(u_prev, u_next);
        const double sin_a = axis.norm();
        if (sin_a > 0.0) {
            const double ang = std::atan2(sin_a, dot(u_prev, u_next));
            e = rodrigues(e, axis / sin_a, ang);
        }
        // keep e exactly transverse against rounding drift
        e -= u_next * dot(e, u_next);
        e = e.normalized();
        u_prev = u_next;
    }
    // rotation of the polarization plane, oriented to match the line
    // integral's sign convention (facing the incoming direction)
    return std::atan2(dot(u0, cross(e, e0)), dot(e0, e));
}

MomentumPath rotate_gauge(const MomentumPath& path, const Vec3& axis,
                          const EstimatorOptions& opts) {
    if (std::abs(axis.norm() - 1.0) > 1e-10)
        throw DomainError("gauge rotation axis must be unit length");

    const Vec3 zhat{0.0, 0.0, 1.0};
    const Vec3 k = cross(axis, zhat);
    const double sin_a = k.norm();
    const double cos_a = dot(axis, zhat);

    std::vector<PathSample> rotated;
    rotated.reserve(path.size());
    if (sin_a < 1e-15) {
        if (cos_a > 0.0) {
            rotated = path.samples();  // axis already the pole
        } else {
            for (const auto& ps : path.samples())
                rotated.push_back({ps.t, {ps.p.x, -ps.p.y, -ps.p.z}});  // pi turn about x
        }
    } else {
        const Vec3 k_unit = k / sin_a;
        const double ang = std::atan2(sin_a, cos_a);
        for (const auto& ps : path.samples()) rotated.push_back({ps.t, rodrigues(ps.p, k_unit, ang)});
    }

    MomentumPath out(std::move(rotated), path.closed(), path.closure_tol());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (on_axis(out.samples()[i].p, opts.axis_guard_rel))
            throw StillSingularError("rotated path still touches the axis guard at sample " +
                                     std::to_string(i));
    }
    return out;
}

double spherical_polygon_solid_angle(std::span<const Vec3> vertices) {
    if (vertices.size() < 3)
        throw ValidationError("solid angle needs at least 3 polygon vertices");
    std::vector<Vec3> verts;
    verts.reserve(vertices.size());
    for (const Vec3& v : vertices) {
        if (!(v.norm() > 0.0)) throw ZeroMomentumError("polygon vertex has zero norm");
        verts.push_back(v.normalized());
    }
    const Vec3 apex = pick_apex(verts);
    double omega = 0.0;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        omega += signed_excess(apex, verts[i], verts[(i + 1) % verts.size()]);
    }
    return omega;
}

double monopole_flux(int sigma, double radius, int n_theta, int n_phi) {
    checked_sigma(sigma);
    if (!(radius > 0.0)) throw DomainError("flux sphere radius must be positive");
    if (n_theta < 2 || n_phi < 4) throw DomainError("flux quadrature order too low");
    std::vector<double> nodes, weights;
    gauss_legendre(n_theta, nodes, weights);
    const double dphi = kTwoPi / n_phi;
    double flux = 0.0;
    for (int i = 0; i < n_theta; ++i) {
        const double mu = nodes[i];
        const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        for (int j = 0; j < n_phi; ++j) {
            const double phi = dphi * j;
            const Vec3 n{st * std::cos(phi), st * std::sin(phi), mu};
            flux += weights[i] * dphi * radius * radius * dot(curvature(n * radius, sigma), n);
        }
    }
    return flux;
}

}  // namespace rytov
