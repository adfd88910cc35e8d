#include "charkin/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "collision_detail.hpp"

namespace charkin {

namespace {
constexpr double kOriginEps = 1e-14;

double wall_ms_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}
}  // namespace

CharEval Datum::eval() const {
    switch (kind) {
        case Kind::Discrete: return make_discrete_eval(F);
        case Kind::Gaussian: return make_gaussian_eval(variance);
        case Kind::Levy: return make_levy_eval(alpha);
    }
    throw std::logic_error("Datum::eval: bad kind");
}

Datum Datum::discrete(DiscreteMeasure F) {
    F.validate();
    Datum d;
    d.kind = Kind::Discrete;
    d.F = std::move(F);
    return d;
}

Datum Datum::gaussian(double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("datum: variance must be > 0");
    Datum d;
    d.kind = Kind::Gaussian;
    d.variance = variance;
    return d;
}

Datum Datum::levy(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("datum: levy alpha out of (0,2)");
    Datum d;
    d.kind = Kind::Levy;
    d.alpha = alpha;
    return d;
}

void SolverConfig::validate() const {
    if (!(T_final >= 0.0)) throw std::invalid_argument("solver: T_final must be >= 0");
    if (time_nodes < 2) throw std::invalid_argument("solver: need at least 2 time nodes");
    if (!(picard_tol > 0.0)) throw std::invalid_argument("solver: picard_tol must be > 0");
    if (max_picard < 1) throw std::invalid_argument("solver: max_picard must be >= 1");
    if (sphere_polar < 4 || sphere_azimuth < 2 || sphere_azimuth % 2 != 0)
        throw std::invalid_argument("solver: bad sphere quadrature orders");
    if (zeta_radial < 4 || zeta_polar < 2 || zeta_azimuth < 2 || zeta_azimuth % 2 != 0)
        throw std::invalid_argument("solver: bad zeta quadrature orders");
    if (!(Z > 0.0)) throw std::invalid_argument("solver: Z must be > 0");
    if (!(R_eval > 0.0)) throw std::invalid_argument("solver: R_eval must be > 0");
    if (grid_M < 9 || grid_M % 2 == 0)
        throw std::invalid_argument("solver: grid_M must be odd and >= 9");
    if (!(radial_h > 0.0)) throw std::invalid_argument("solver: radial_h must be > 0");
    if (!(norm_alpha > 0.0 && norm_alpha <= 2.0))
        throw std::invalid_argument("solver: norm_alpha out of (0,2]");
    if (!(interval_safety > 0.0 && interval_safety < 1.0))
        throw std::invalid_argument("solver: interval_safety out of (0,1)");
    if (export_M < 9 || export_M % 2 == 0)
        throw std::invalid_argument("solver: export_M must be odd and >= 9");
}

double xi_geometry_factor(const RestitutionParams& rp) {
    const double cp = 0.5 * (1.0 + rp.a_minus);
    const double sh = 0.5 * rp.a_plus;
    return 2.0 * std::sqrt(cp * cp + sh * sh);
}

std::vector<std::pair<double, Moments>> RunResult::trace() const {
    std::vector<std::pair<double, Moments>> out;
    for (std::size_t k = 0; k < intervals.size(); ++k) {
        const IntervalResult& iv = intervals[k];
        for (std::size_t j = (k == 0 ? 0 : 1); j < iv.times.size(); ++j)
            out.emplace_back(iv.times[j], iv.moments[j]);
    }
    return out;
}

namespace detail {

class EngineBase {
  public:
    EngineBase(const Datum& datum, const RestitutionParams& rp, const KernelConfig& kernel,
               const SolverConfig& cfg)
        : cfg_(cfg), kcfg_(kernel), datum_(datum) {
        cfg_.validate();
        kcfg_.validate();

        const AngularKernel bn = cutoff_angular(make_angular(kcfg_), kcfg_.n);
        rc_.ang = make_angular_rule(bn, cfg_.sphere_polar, cfg_.normalize_angular);
        rc_.az = AzimuthTable(cfg_.sphere_azimuth);
        rc_.rp = rp;

        kinetic_ = std::make_shared<KineticCutoff>(kcfg_.gamma, kcfg_.r,
                                                   std::max(40.0, 2.0 * cfg_.Z), 0.05);
        rc_.A = kinetic_->sup_abs();
        rc_.mass_b = 0.0;
        for (double w : rc_.ang.wb) rc_.mass_b += w;
        rc_.A_eff = rc_.mass_b * rc_.A;
    }
    virtual ~EngineBase() = default;

    /// Build the zeta rule once the derived engine fixed its ball radius.
    void finish_zeta_rule(double Z) {
        rc_.zeta = make_zeta_rule(*kinetic_, Z, cfg_.zeta_radial, cfg_.zeta_polar,
                                  cfg_.zeta_azimuth);
    }

    const SolverConfig& cfg() const { return cfg_; }
    const RuleContext& rules() const { return rc_; }
    const KineticCutoff& kinetic() const { return *kinetic_; }
    const Datum& datum() const { return datum_; }

    int dof() const { return int(node_radius_.size()); }
    const std::vector<Complex>& state() const { return state_; }

    virtual void set_state(std::vector<Complex> s) = 0;
    virtual std::vector<Complex> initial_dof() const = 0;
    virtual void rhs(const std::vector<Complex>& s, std::vector<Complex>& out) = 0;
    virtual Complex eval_current(const Vec3& xi) const = 0;
    virtual Moments moments_of(const std::vector<Complex>& s) = 0;
    virtual double mass_defect_of(const std::vector<Complex>& s) const = 0;
    virtual double max_abs_of(const std::vector<Complex>& s) = 0;
    virtual double norm_alpha_of(const std::vector<Complex>& s, double alpha) = 0;
    virtual CharGrid export_of(const std::vector<Complex>& s, double R, int M) = 0;
    virtual double hermitian_defect_current() const = 0;
    virtual RadialAverage radial_average_current() const = 0;

    double norm_weight(int i, double alpha) const {
        const double r = node_radius_[i];
        return r < kOriginEps ? 0.0 : std::pow(r, -alpha);
    }

  protected:
    SolverConfig cfg_;
    KernelConfig kcfg_;
    Datum datum_;
    RuleContext rc_;
    std::shared_ptr<KineticCutoff> kinetic_;
    std::vector<double> node_radius_;  // |xi| per dof
    std::vector<Complex> state_;
};

/// Full 3D grid engine.  The state lives on [-R_grid, R_grid]^3; only nodes
/// with |xi| <= R_eval evolve (upper half + conjugate mirror), the remainder
/// is frozen at phi_0.  Lookups stay inside the cube by construction:
/// |xi_e|+Z <= R_grid.
///
/// For discrete data the engine runs in exact-background form: the sweeps see
/// the deviation psi = phi - phi0 (compactly supported in the evolved ball),
/// the phi0 (x) phi0 collision block is summed in closed form, and the zeta
/// ball shrinks to the support of the psi terms, removing the far-field
/// truncation entirely.
class GridEngine final : public EngineBase {
  public:
    GridEngine(const Datum& datum, const RestitutionParams& rp, const KernelConfig& kernel,
               const SolverConfig& cfg)
        : EngineBase(datum, rp, kernel, cfg),
          base_(1.0, 3),
          work_(1.0, 3),
          cur_(1.0, 3),
          psi_work_(1.0, 3) {
        const double cgeom = xi_geometry_factor(rp);
        const int M = cfg_.grid_M;
        const bool exact_bg = datum_.kind == Datum::Kind::Discrete && cfg_.far_field_closure &&
                              datum_.F.w.size() <= 8;

        double Z = cfg_.Z;
        if (exact_bg) {
            // R_grid = (c_geom + 2) R_eval + 5h with h = 2 R_grid / (M-1).
            const double shrink = 1.0 - 10.0 / (M - 1);
            if (!(shrink > 0.0)) throw std::invalid_argument("solver: grid_M too small");
            R_grid_ = (cgeom + 2.0) * cfg_.R_eval / shrink;
            const double h = 2.0 * R_grid_ / (M - 1);
            Z = 2.0 * cfg_.R_eval + 3.0 * h;
        } else {
            const double shrink = 1.0 - 4.0 / (M - 1);
            if (!(shrink > 0.0)) throw std::invalid_argument("solver: grid_M too small");
            R_grid_ = (cgeom * cfg_.R_eval + cfg_.Z) / shrink;
        }
        finish_zeta_rule(Z);

        if (exact_bg) {
            rc_.exact_bg = true;
            rc_.exact_pairs = make_plane_wave_terms(datum_.F, *kinetic_);
            rc_.bg_v = datum_.F.v;
            rc_.bg_w = datum_.F.w;
            rc_.build_background_tables();
        } else if (datum_.kind == Datum::Kind::Discrete && cfg_.far_field_closure) {
            if (cfg_.Z < 2.0 * cfg_.R_eval)
                throw std::invalid_argument(
                    "solver: far-field closure requires Z >= 2*R_eval (frozen tail region)");
            rc_.closure = make_closure(datum_.F, *kinetic_, cfg_.Z);
        }

        base_ = CharGrid::sample(datum_.eval(), R_grid_, M);
        work_ = base_;
        cur_ = base_;
        psi_work_ = CharGrid(R_grid_, M);  // zeros

        if (cfg_.R_eval < 4.5 * base_.h())
            throw std::invalid_argument(
                "solver: R_eval must cover the moment-extraction stencil (>= 4.5 h)");

        const int c = base_.center();
        for (int ix = c; ix < M; ++ix)
            for (int iy = 0; iy < M; ++iy)
                for (int iz = 0; iz < M; ++iz) {
                    if (ix == c && iy < c) continue;
                    if (ix == c && iy == c && iz < c) continue;
                    const Vec3 xi = base_.node(ix, iy, iz);
                    if (xi.norm() > cfg_.R_eval) continue;
                    GridNodeRef ref;
                    ref.flat = base_.index(ix, iy, iz);
                    ref.mirror = base_.index(M - 1 - ix, M - 1 - iy, M - 1 - iz);
                    ref.xi = xi;
                    nodes_.push_back(ref);
                    node_radius_.push_back(xi.norm());
                }
        if (nodes_.empty()) throw std::invalid_argument("solver: no evolved nodes inside R_eval");
        if (rc_.exact_bg) {
            phi0_node_.resize(nodes_.size());
            const CharEval phi0 = datum_.eval();
            for (std::size_t i = 0; i < nodes_.size(); ++i) phi0_node_[i] = phi0(nodes_[i].xi);
        }
        set_state(initial_dof());
    }

    double R_grid() const { return R_grid_; }
    const std::vector<GridNodeRef>& nodes() const { return nodes_; }

    void set_state(std::vector<Complex> s) override {
        state_ = std::move(s);
        materialize(state_, cur_);
    }

    std::vector<Complex> initial_dof() const override {
        std::vector<Complex> s(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i) s[i] = base_.data()[nodes_[i].flat];
        return s;
    }

    void rhs(const std::vector<Complex>& s, std::vector<Complex>& out) override {
        out.resize(nodes_.size());
        if (rc_.exact_bg) {
            materialize_psi(s, psi_work_);
            const GridView view(psi_work_);
            psi_zeta_.resize(rc_.zeta.node.size());
            for (std::size_t k = 0; k < rc_.zeta.node.size(); ++k) {
                const Vec3& z = rc_.zeta.node[k];
                psi_zeta_[k] = view.interp(z.x, z.y, z.z);
            }
            if (cfg_.backend == Backend::OpenMP)
                sweep_grid_omp(rc_, view, nodes_, psi_zeta_.data(), out.data());
            else
                sweep_grid_serial(rc_, view, nodes_, psi_zeta_.data(), out.data());
        } else {
            materialize(s, work_);
            const GridView view(work_);
            if (cfg_.backend == Backend::OpenMP)
                sweep_grid_omp(rc_, view, nodes_, nullptr, out.data());
            else
                sweep_grid_serial(rc_, view, nodes_, nullptr, out.data());
        }
    }

    Complex eval_current(const Vec3& xi) const override { return cur_.interp(xi); }

    Moments moments_of(const std::vector<Complex>& s) override {
        materialize(s, work_);
        return moments_from_char(work_);
    }

    double mass_defect_of(const std::vector<Complex>& s) const override {
        // The origin is always an evolved node (center of the upper half).
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (node_radius_[i] < kOriginEps) return std::abs(s[i] - 1.0);
        return 0.0;
    }

    double max_abs_of(const std::vector<Complex>& s) override {
        materialize(s, work_);
        return work_.max_abs();
    }

    double norm_alpha_of(const std::vector<Complex>& s, double alpha) override {
        materialize(s, work_);
        return knorm(work_, alpha);
    }

    CharGrid export_of(const std::vector<Complex>& s, double R, int M) override {
        materialize(s, work_);
        if (M == work_.M() && std::fabs(R - work_.R()) < 1e-12) return work_;
        const GridView view(work_);
        return CharGrid::sample(
            [&view](const Vec3& xi) { return view.interp(xi.x, xi.y, xi.z); }, R, M);
    }

    double hermitian_defect_current() const override { return cur_.hermitian_defect(); }

    RadialAverage radial_average_current() const override {
        return radial_average_grid(cur_, 12);
    }

  private:
    void materialize(const std::vector<Complex>& s, CharGrid& target) const {
        target.data() = base_.data();
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            target.data()[nodes_[i].flat] = s[i];
            if (nodes_[i].mirror != nodes_[i].flat)
                target.data()[nodes_[i].mirror] = std::conj(s[i]);
        }
    }

    /// Deviation grid: psi = phi - phi0 at evolved nodes, zero elsewhere.
    void materialize_psi(const std::vector<Complex>& s, CharGrid& target) const {
        std::fill(target.data().begin(), target.data().end(), Complex{0.0, 0.0});
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const Complex psi = s[i] - phi0_node_[i];
            target.data()[nodes_[i].flat] = psi;
            if (nodes_[i].mirror != nodes_[i].flat)
                target.data()[nodes_[i].mirror] = std::conj(psi);
        }
    }

    double R_grid_ = 0.0;
    CharGrid base_, work_, cur_, psi_work_;
    std::vector<GridNodeRef> nodes_;
    std::vector<Complex> phi0_node_;
    std::vector<Complex> psi_zeta_;
};

/// Radial engine for isotropic data: the state is a real profile phi(|xi|)
/// on a fine 1D mesh; the azimuth of sigma collapses by isotropy.
class RadialEngine final : public EngineBase {
  public:
    RadialEngine(const Datum& datum, const RestitutionParams& rp, const KernelConfig& kernel,
                 const SolverConfig& cfg)
        : EngineBase(datum, rp, kernel, cfg) {
        if (!datum_.isotropic())
            throw std::invalid_argument("solver: radial mode requires an isotropic datum");
        finish_zeta_rule(cfg_.Z);
        h_ = cfg_.radial_h;
        const double R_rad = cfg_.R_eval + cfg_.Z + 6.0 * h_;
        n_ = int(std::ceil(R_rad / h_)) + 1;
        base_.resize(n_);
        const CharEval phi0 = datum_.eval();
        for (int i = 0; i < n_; ++i) base_[i] = phi0(Vec3{0.0, 0.0, i * h_}).real();
        work_ = base_;
        cur_ = base_;

        n_eval_ = std::min(n_, int(std::floor(cfg_.R_eval / h_)) + 1);
        if (n_eval_ < 9)
            throw std::invalid_argument("solver: radial mesh too coarse for moment extraction");
        radii_.resize(n_eval_);
        for (int i = 0; i < n_eval_; ++i) {
            radii_[i] = i * h_;
            node_radius_.push_back(i * h_);
        }
        set_state(initial_dof());
    }

    void set_state(std::vector<Complex> s) override {
        state_ = std::move(s);
        materialize(state_, cur_);
    }

    std::vector<Complex> initial_dof() const override {
        std::vector<Complex> s(n_eval_);
        for (int i = 0; i < n_eval_; ++i) s[i] = Complex{base_[i], 0.0};
        return s;
    }

    void rhs(const std::vector<Complex>& s, std::vector<Complex>& out) override {
        materialize(s, work_);
        out.resize(n_eval_);
        rout_.resize(n_eval_);
        const RadialView view(work_.data(), n_, h_);
        if (cfg_.backend == Backend::OpenMP)
            sweep_radial_omp(rc_, view, radii_, rout_.data());
        else
            sweep_radial_serial(rc_, view, radii_, rout_.data());
        for (int i = 0; i < n_eval_; ++i) out[i] = Complex{rout_[i], 0.0};
    }

    Complex eval_current(const Vec3& xi) const override {
        const RadialView view(cur_.data(), n_, h_);
        return Complex{view.interp(xi.norm()), 0.0};
    }

    Moments moments_of(const std::vector<Complex>& s) override {
        materialize(s, work_);
        Moments m;
        m.mass = work_[0];
        m.momentum = Vec3{};
        // Laplacian at the origin of a radial function is 3 f''(0); central
        // differences use step multiples and Richardson as in the grid path.
        auto d2 = [&](int k) {
            const double hk = k * h_;
            return 2.0 * (work_[k] - work_[0]) / (hk * hk);
        };
        const double e2 = -3.0 * d2(2);
        const double e4 = -3.0 * d2(4);
        const double e8 = -3.0 * d2(8);
        m.energy = (64.0 * e2 - 20.0 * e4 + e8) / 45.0;
        const double floor = 1e-10;
        m.energy_finite = !(std::fabs(e2) > floor && std::fabs(e4) > floor &&
                            std::fabs(e8) > floor && e2 > 1.15 * e4 && e4 > 1.15 * e8);
        return m;
    }

    double mass_defect_of(const std::vector<Complex>& s) const override {
        return std::abs(s[0] - 1.0);
    }

    double max_abs_of(const std::vector<Complex>& s) override {
        materialize(s, work_);
        double mx = 0.0;
        for (double v : work_) mx = std::max(mx, std::fabs(v));
        return mx;
    }

    double norm_alpha_of(const std::vector<Complex>& s, double alpha) override {
        materialize(s, work_);
        double sup = 0.0;
        for (int i = 1; i < n_; ++i)
            sup = std::max(sup, std::fabs(work_[i] - 1.0) / std::pow(i * h_, alpha));
        return sup;
    }

    CharGrid export_of(const std::vector<Complex>& s, double R, int M) override {
        materialize(s, work_);
        const RadialView view(work_.data(), n_, h_);
        return CharGrid::sample(
            [&view](const Vec3& xi) { return Complex{view.interp(xi.norm()), 0.0}; }, R, M);
    }

    double hermitian_defect_current() const override { return 0.0; }  // real radial state

    RadialAverage radial_average_current() const override {
        RadialAverage ra;
        const std::vector<double> profile = cur_;
        const int n = n_;
        const double h = h_;
        ra.rho_cap = cfg_.R_eval;
        ra.avg = [profile, n, h](double rho) {
            const RadialView view(profile.data(), n, h);
            return 1.0 - view.interp(rho);
        };
        return ra;
    }

  private:
    void materialize(const std::vector<Complex>& s, std::vector<double>& target) const {
        target = base_;
        for (int i = 0; i < n_eval_; ++i) target[i] = s[i].real();
    }

    double h_ = 0.0;
    int n_ = 0;
    int n_eval_ = 0;
    std::vector<double> base_, work_, cur_, rout_;
    std::vector<double> radii_;
};

/// Closed-form G1+G2 for an exact discrete-measure characteristic function:
/// the zeta integral against plane waves collapses to Phi_c values, leaving
/// only the sigma quadrature.  Used for contraction estimates.
struct MeasureG {
    struct PairTerm {
        Vec3 vj, vk;
        double wjk, phic;
    };
    std::vector<PairTerm> pairs;
    CharEval phi;

    MeasureG(const DiscreteMeasure& F, const KineticCutoff& kc) : phi(make_discrete_eval(F)) {
        for (std::size_t j = 0; j < F.w.size(); ++j)
            for (std::size_t k = 0; k < F.w.size(); ++k) {
                PairTerm t;
                t.vj = F.v[j];
                t.vk = F.v[k];
                t.wjk = F.w[j] * F.w[k];
                t.phic = kc.eval((F.v[j] - F.v[k]).norm());
                pairs.push_back(t);
            }
    }

    Complex operator()(const RuleContext& rc, const Vec3& xi) const {
        const double xin = xi.norm();
        Complex loss{0.0, 0.0};
        for (const PairTerm& t : pairs) loss += t.wjk * t.phic * unit_phase(t.vk.dot(xi));

        Complex gain{0.0, 0.0};
        if (xin < kOriginEps) {
            for (const PairTerm& t : pairs) gain += t.wjk * t.phic;
            gain *= rc.mass_b;
        } else {
            const Vec3 axis = xi / xin;
            const Vec3 e1 = any_orthogonal(axis);
            const Vec3 e2 = axis.cross(e1);
            const double cplus = 0.5 + 0.5 * rc.rp.a_minus;
            const double cminus = 0.5 - 0.5 * rc.rp.a_minus;
            const double shalf = 0.5 * rc.rp.a_plus;
            const int naz = rc.az.size();
            for (std::size_t i = 0; i < rc.ang.t.size(); ++i) {
                const double ct = rc.ang.t[i];
                const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
                const double wi = rc.ang.wb[i] / naz;
                for (int a = 0; a < naz; ++a) {
                    const Vec3 sigma = ct * axis + st * (rc.az.c[a] * e1 + rc.az.s[a] * e2);
                    const Vec3 xp = cplus * xi + (shalf * xin) * sigma;
                    const Vec3 xm = cminus * xi - (shalf * xin) * sigma;
                    Complex inner{0.0, 0.0};
                    for (const PairTerm& t : pairs)
                        inner += t.wjk * t.phic * unit_phase(t.vj.dot(xp) + t.vk.dot(xm));
                    gain += wi * inner;
                }
            }
        }
        return gain + rc.A_eff * phi(xi) - rc.mass_b * loss;
    }
};

std::vector<Vec3> contraction_sample_points(std::mt19937_64& rng, double rmax, int count) {
    std::normal_distribution<double> g;
    std::vector<Vec3> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) {
        Vec3 dir{g(rng), g(rng), g(rng)};
        while (dir.norm() < 1e-8) dir = Vec3{g(rng), g(rng), g(rng)};
        const double r = rmax * std::pow(10.0, -2.0 + 2.0 * (double(i) + 0.5) / count);
        pts.push_back(r * dir.normalized());
    }
    return pts;
}

}  // namespace detail

Solver::Solver(const Datum& datum, const RestitutionParams& rp, const KernelConfig& kernel,
               const SolverConfig& cfg) {
    SolverMode mode = cfg.mode;
    if (mode == SolverMode::Auto)
        mode = datum.isotropic() ? SolverMode::Radial : SolverMode::Grid3D;
    if (mode == SolverMode::Radial)
        engine_ = std::make_unique<detail::RadialEngine>(datum, rp, kernel, cfg);
    else
        engine_ = std::make_unique<detail::GridEngine>(datum, rp, kernel, cfg);
}

Solver::~Solver() = default;

double Solver::A() const { return engine_->rules().A; }
double Solver::A_eff() const { return engine_->rules().A_eff; }
double Solver::mass_b() const { return engine_->rules().mass_b; }
double Solver::zeta_tail_estimate() const {
    return engine_->kinetic().tail_mass(engine_->cfg().Z);
}
const SolverConfig& Solver::config() const { return engine_->cfg(); }

double Solver::estimate_contraction(int pair_count, std::uint64_t seed) const {
    if (pair_count < 1) throw std::invalid_argument("estimate_contraction: pair_count >= 1");
    std::mt19937_64 rng(seed);
    const detail::RuleContext& rc = engine_->rules();
    const double alpha = engine_->cfg().norm_alpha;
    double chat = 0.0;
    for (int p = 0; p < pair_count; ++p) {
        const DiscreteMeasure F1 = random_discrete_measure(rng, 4, 1.2);
        const DiscreteMeasure F2 = random_discrete_measure(rng, 4, 1.2);
        const detail::MeasureG g1(F1, engine_->kinetic());
        const detail::MeasureG g2(F2, engine_->kinetic());
        const std::vector<Vec3> pts = detail::contraction_sample_points(
            rng, 2.0 * engine_->cfg().R_eval, 96);
        double num = 0.0, den = 0.0;
        for (const Vec3& xi : pts) {
            const double w = std::pow(xi.norm(), -alpha);
            num = std::max(num, std::abs(g1(rc, xi) - g2(rc, xi)) * w);
            den = std::max(den, std::abs(g1.phi(xi) - g2.phi(xi)) * w);
        }
        if (den < 1e-12) continue;
        chat = std::max(chat, num / den - rc.A_eff);
    }
    return std::max(chat, 0.0);
}

double Solver::picard_pair_ratio(double T, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    const detail::RuleContext& rc = engine_->rules();
    const double alpha = engine_->cfg().norm_alpha;
    const DiscreteMeasure F1 = random_discrete_measure(rng, 4, 1.2);
    const DiscreteMeasure F2 = random_discrete_measure(rng, 4, 1.2);
    const detail::MeasureG g1(F1, engine_->kinetic());
    const detail::MeasureG g2(F2, engine_->kinetic());
    const std::vector<Vec3> pts =
        detail::contraction_sample_points(rng, 2.0 * engine_->cfg().R_eval, 96);
    double num = 0.0, den = 0.0;
    for (const Vec3& xi : pts) {
        const double w = std::pow(xi.norm(), -alpha);
        num = std::max(num, std::abs(g1(rc, xi) - g2(rc, xi)) * w);
        den = std::max(den, std::abs(g1.phi(xi) - g2.phi(xi)) * w);
    }
    if (den < 1e-12) return 0.0;
    // Constant-in-time paths with a shared initial datum: the Picard images
    // differ by int_0^t e^{-A(t-tau)} dtau * (G difference).
    const double factor = (1.0 - std::exp(-rc.A_eff * T)) / rc.A_eff;
    return factor * num / den;
}

std::vector<double> Solver::picard_residual_profile(double T) {
    detail::EngineBase& eng = *engine_;
    const SolverConfig& cfg = eng.cfg();
    const int m = cfg.time_nodes;
    const double dt = T / m;
    const double A = eng.rules().A_eff;
    const double E = std::exp(-A * dt);
    const double c1 = 1.0 / A - (1.0 - E) / (A * A * dt);
    const double c0 = (1.0 - E) / A - c1;

    const std::vector<Complex> S0 = eng.state();
    std::vector<Complex> G;
    eng.rhs(S0, G);  // constant path: G is time independent
    std::vector<double> profile(m + 1, 0.0);
    std::vector<Complex> I(S0.size(), Complex{0.0, 0.0});
    double Ecum = 1.0;
    for (int j = 1; j <= m; ++j) {
        for (std::size_t i = 0; i < I.size(); ++i) I[i] = E * I[i] + (c0 + c1) * G[i];
        Ecum *= E;
        double sup = 0.0;
        for (std::size_t i = 0; i < I.size(); ++i)
            sup = std::max(sup, std::abs(Ecum * S0[i] + I[i] - S0[i]));
        profile[j] = sup;
    }
    return profile;
}

IntervalResult Solver::solve_interval(double t0, double T) {
    detail::EngineBase& eng = *engine_;
    const SolverConfig& cfg = eng.cfg();
    const int m = cfg.time_nodes;
    const double dt = T / m;
    const double A = eng.rules().A_eff;
    const double E = std::exp(-A * dt);
    const double c1 = 1.0 / A - (1.0 - E) / (A * A * dt);
    const double c0 = (1.0 - E) / A - c1;
    const double alpha = cfg.norm_alpha;

    IntervalResult res;
    res.t0 = t0;
    res.t1 = t0 + T;

    const std::vector<Complex> S0 = eng.state();
    const std::size_t n = S0.size();
    std::vector<std::vector<Complex>> S(m + 1, S0);
    std::vector<std::vector<Complex>> G(m + 1);
    eng.rhs(S0, G[0]);

    const auto tstart = std::chrono::steady_clock::now();
    for (int iter = 1; iter <= cfg.max_picard; ++iter) {
        for (int j = 1; j <= m; ++j) eng.rhs(S[j], G[j]);

        std::vector<Complex> I(n, Complex{0.0, 0.0});
        double Ecum = 1.0;
        double resid = 0.0;
        for (int j = 1; j <= m; ++j) {
            Ecum *= E;
            for (std::size_t i = 0; i < n; ++i) {
                I[i] = E * I[i] + c0 * G[j - 1][i] + c1 * G[j][i];
                const Complex cand = Ecum * S0[i] + I[i];
                resid = std::max(resid,
                                 std::abs(cand - S[j][i]) * eng.norm_weight(int(i), alpha));
                S[j][i] = cand;
            }
        }
        res.history.push_back({iter, resid, wall_ms_since(tstart)});
        res.iterations = iter;
        res.final_residual = resid;
        if (resid < cfg.picard_tol) {
            res.converged = true;
            break;
        }
    }

    for (int j = 0; j <= m; ++j) {
        res.times.push_back(t0 + j * dt);
        res.moments.push_back(eng.moments_of(S[j]));
        res.mass_defect.push_back(eng.mass_defect_of(S[j]));
        res.max_abs.push_back(eng.max_abs_of(S[j]));
    }
    if (res.converged) {
        eng.set_state(S[m]);
        if (!cfg.trace_fractional_orders.empty()) {
            res.fractional_orders = cfg.trace_fractional_orders;
            const RadialAverage avg = eng.radial_average_current();
            for (double order : res.fractional_orders)
                res.fractional_t1.push_back(
                    fractional_moment(avg, order, cfg.fractional_delta));
        }
    }
    return res;
}

RunResult Solver::solve() {
    detail::EngineBase& eng = *engine_;
    const SolverConfig& cfg = eng.cfg();

    RunResult out;
    out.A = A();
    out.mass_b = mass_b();
    out.A_eff = A_eff();
    out.initial = export_state();

    out.C_hat = estimate_contraction(cfg.contraction_pairs, cfg.seed);
    double T = cfg.interval_safety / (out.A_eff + out.C_hat);
    out.T_interval = T;

    double t = 0.0;
    const double t_end = cfg.T_final;
    while (t < t_end - 1e-12) {
        const double Tk = std::min(T, t_end - t);
        const std::vector<Complex> snapshot = eng.state();
        IntervalResult iv = solve_interval(t, Tk);
        int halvings = 0;
        double Th = Tk;
        while (!iv.converged && halvings < 3) {
            eng.set_state(snapshot);
            Th *= 0.5;
            ++halvings;
            iv = solve_interval(t, Th);
        }
        if (!iv.converged) {
            out.failure = "picard iteration did not converge (last residual " +
                          std::to_string(iv.final_residual) + ")";
            out.intervals.push_back(std::move(iv));
            out.terminal = export_state();
            return out;
        }
        if (halvings > 0) T = Th;  // keep the shorter interval from here on
        t = iv.t1;
        out.intervals.push_back(std::move(iv));
    }
    out.completed = true;
    out.terminal = export_state();
    return out;
}

Complex Solver::eval_state(const Vec3& xi) const { return engine_->eval_current(xi); }

CharGrid Solver::export_state(double R, int M) const {
    std::vector<Complex> s = engine_->state();
    return engine_->export_of(s, R, M);
}

CharGrid Solver::export_state() const {
    const SolverConfig& cfg = engine_->cfg();
    return export_state(cfg.export_R, cfg.export_M);
}

Moments Solver::current_moments() const {
    std::vector<Complex> s = engine_->state();
    return engine_->moments_of(s);
}

double Solver::current_norm(double alpha) const {
    std::vector<Complex> s = engine_->state();
    return engine_->norm_alpha_of(s, alpha);
}

double Solver::hermitian_defect() const { return engine_->hermitian_defect_current(); }

RadialAverage Solver::current_radial_average() const {
    return engine_->radial_average_current();
}

RunResult run_solver(const Datum& datum, const RestitutionParams& rp, const KernelConfig& kernel,
                     const SolverConfig& cfg) {
    Solver solver(datum, rp, kernel, cfg);
    return solver.solve();
}

CutoffSequenceResult noncutoff_sequence(const Datum& datum, const RestitutionParams& rp,
                                        KernelConfig kernel, SolverConfig cfg,
                                        const std::vector<int>& n_list) {
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw std::invalid_argument("noncutoff_sequence: n_list must be increasing");
    // The sequence drives b_n toward the non-cutoff kernel, so the levels
    // stay un-normalized.
    cfg.normalize_angular = false;

    CutoffSequenceResult out;
    out.levels = n_list;
    for (int n : n_list) {
        kernel.n = n;
        Solver solver(datum, rp, kernel, cfg);
        RunResult run = solver.solve();
        out.terminals.push_back(solver.export_state(cfg.export_R, cfg.export_M));
        out.runs.push_back(std::move(run));
    }
    for (std::size_t i = 0; i + 1 < out.terminals.size(); ++i) {
        const CharGrid& a = out.terminals[i];
        const CharGrid& b = out.terminals[i + 1];
        double sup = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k)
            sup = std::max(sup, std::abs(a.data()[k] - b.data()[k]));
        out.sup_differences.push_back(sup);
    }
    return out;
}

}  // namespace charkin
