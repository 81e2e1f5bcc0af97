#include "mpbenders/mplp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <random>
#include <string>

#include "mpbenders/errors.hpp"
#include "mpbenders/polytope.hpp"

namespace mpb {

namespace {

constexpr double kLocateTol = 1e-8;
// Tiny, irregular right-hand-side and cost shifts used to pick one optimal
// basis per parameter under degeneracy. Maps are always built from the
// unshifted data.
constexpr double kShift = 1e-8;
constexpr double kZeroRow = 1e-9;
// Facet pieces thinner than this are treated as covered.
constexpr double kPieceRadius = 1e-9;
constexpr int kPieceBudget = 5000;

LpOptions mp_lp_options() {
  LpOptions o;
  o.primal_tol = 1e-11;
  o.dual_tol = 1e-11;
  o.vertex_basis = true;
  return o;
}

struct Shifted {
  // Shift directions; the shifted data is b + kShift * wb, c + kShift * wc.
  Vec wb;
  Vec wc;
  Vec b;
  Vec c;
};

Shifted shifted_data(const MpLp& p) {
  Shifted s;
  const double g1 = 0.6180339887498949, g2 = 0.7548776662466927;
  s.wb = Vec(p.b.size());
  s.wc = Vec(p.c.size());
  for (int i = 0; i < s.wb.size(); ++i) s.wb[i] = 1.0 + std::fmod(g1 * (i + 1), 1.0);
  for (int j = 0; j < s.wc.size(); ++j) s.wc[j] = 1.0 + std::fmod(g2 * (j + 1), 1.0);
  s.b = p.b + kShift * s.wb;
  s.c = p.c + kShift * s.wc;
  return s;
}

enum RowKind : std::int8_t { kTheta = 0, kPrimal = 1, kDual = 2 };

struct Built {
  CriticalRegion region;
  std::vector<std::int8_t> kinds;
};

std::optional<Built> build_region(const MpLp& p, const Shifted& sh, const std::vector<int>& as,
                                  double min_radius) {
  const int n = p.x_dim(), me = p.num_eq(), mi = p.num_ineq(), td = p.theta_dim();
  const int na = static_cast<int>(as.size());
  if (na + me != n) return std::nullopt;
  Mat A_as(n, n), F_as(n, td);
  Vec b_as(n), w_as = Vec::Zero(n);
  for (int k = 0; k < na; ++k) {
    A_as.row(k) = p.A.row(as[k]);
    F_as.row(k) = p.F.row(as[k]);
    b_as[k] = p.b[as[k]];
    w_as[k] = sh.wb[as[k]];
  }
  for (int k = 0; k < me; ++k) {
    A_as.row(na + k) = p.A_eq.row(k);
    F_as.row(na + k) = p.F_eq.row(k);
    b_as[na + k] = p.b_eq[k];
  }
  Eigen::FullPivLU<Mat> lu(A_as);
  lu.setThreshold(1e-9);
  if (lu.rank() < n) return std::nullopt;
  Eigen::FullPivLU<Mat> lut(A_as.transpose());

  Built out;
  CriticalRegion& r = out.region;
  r.active_set = as;
  r.A_aff = lu.solve(F_as);
  r.b_aff = lu.solve(b_as);
  const Vec x_w = lu.solve(w_as);
  r.G = -lut.solve(p.H);
  r.g = -lut.solve(p.c);
  const Vec g_w = -lut.solve(sh.wc);

  std::vector<bool> in_as(mi, false);
  for (int i : as) in_as[i] = true;
  // Rows are built from the exact data. A row that vanishes identically
  // (degenerate over the whole region) is decided by the sign of its
  // first-order term under the shift, which picks one basis among ties.
  const int rows = (mi - na) + na + static_cast<int>(p.A_theta.rows());
  Polytope np{Mat(rows, td), Vec(rows)};
  std::vector<std::int8_t> nk;
  int row = 0;
  auto push = [&](const Eigen::RowVectorXd& e, double f0, double f1, std::int8_t kind) {
    const double nrm = e.norm();
    if (nrm <= kZeroRow) {
      if (f0 < -kZeroRow) return false;
      if (f0 <= kZeroRow && f1 < -kZeroRow) return false;
      return true;
    }
    np.E.row(row) = e / nrm;
    np.f[row++] = f0 / nrm;
    nk.push_back(kind);
    return true;
  };
  for (int i = 0; i < mi; ++i) {
    if (in_as[i]) continue;
    const Eigen::RowVectorXd e = p.A.row(i) * r.A_aff - p.F.row(i);
    if (!push(e, p.b[i] - p.A.row(i).dot(r.b_aff), sh.wb[i] - p.A.row(i).dot(x_w), kPrimal))
      return std::nullopt;
  }
  for (int k = 0; k < na; ++k) {
    if (!push(-r.G.row(k), r.g[k], g_w[k], kDual)) return std::nullopt;
  }
  for (int k = 0; k < p.A_theta.rows(); ++k) {
    if (!push(p.A_theta.row(k), p.b_theta[k], 0.0, kTheta)) return std::nullopt;
  }
  np.E.conservativeResize(row, td);
  np.f.conservativeResize(row);
  const Ball ball = chebyshev_ball(np);
  if (ball.empty || ball.radius <= min_radius) return std::nullopt;
  const std::vector<int> kept = remove_redundant_rows(np);
  for (int k : kept) out.kinds.push_back(nk[k]);
  r.E = std::move(np.E);
  r.f = std::move(np.f);
  r.cheb_center = ball.center;
  r.cheb_radius = ball.radius;
  return out;
}

std::optional<std::vector<int>> shifted_active_set(const MpLp& p, const Shifted& sh,
                                                   const Vec& theta) {
  const int n = p.x_dim(), mi = p.num_ineq(), me = p.num_eq();
  StandardLp lp = p.at(theta);
  lp.c += sh.c - p.c;
  lp.b_ub += sh.b - p.b;
  const LpSolution s = solve_lp(lp, mp_lp_options());
  if (s.status != LpStatus::Optimal) return std::nullopt;
  for (int j = 0; j < n; ++j)
    if (s.basis.status[j] != VarStatus::Basic) return std::nullopt;
  for (int i = 0; i < me; ++i)
    if (s.basis.status[n + mi + i] == VarStatus::Basic) return std::nullopt;
  std::vector<int> as;
  for (int i = 0; i < mi; ++i)
    if (s.basis.status[n + i] != VarStatus::Basic) as.push_back(i);
  return as;
}

bool in_theta(const MpLp& p, const Vec& t) {
  return ((p.A_theta * t - p.b_theta).array() <= 1e-12).all();
}

class Enumerator {
 public:
  Enumerator(const MpLp& p, const EnumerationOptions& opt) : p_(p), opt_(opt), sh_(shifted_data(p)) {}

  std::vector<CriticalRegion> run();

 private:
  std::optional<std::vector<int>> active_set_at(const Vec& theta) const;
  // Adds the region of an active set; returns its index (existing or new) or -1.
  int add(const std::vector<int>& as);
  int find(const Vec& theta, double tol) const;
  void explore();
  // Returns the number of feasible samples left uncovered.
  int coverage_repair();
  void combinatorial();
  std::optional<Vec> facet_point(int r, int row, const Mat& Ex, const Vec& fx) const;
  // Region reached by stepping outward from a facet point, or -1.
  int cross(const Vec& fp, const Vec& normal);

  const MpLp& p_;
  EnumerationOptions opt_;
  Shifted sh_;
  std::vector<Built> regions_;
  std::map<std::vector<int>, int> seen_;
  std::deque<int> queue_;
};

std::optional<std::vector<int>> Enumerator::active_set_at(const Vec& theta) const {
  return shifted_active_set(p_, sh_, theta);
}

int Enumerator::add(const std::vector<int>& as) {
  auto it = seen_.find(as);
  if (it != seen_.end()) return it->second;
  auto b = build_region(p_, sh_, as, opt_.min_radius);
  if (!b) {
    seen_[as] = -1;
    return -1;
  }
  const int idx = static_cast<int>(regions_.size());
  regions_.push_back(std::move(*b));
  seen_[as] = idx;
  queue_.push_back(idx);
  return idx;
}

int Enumerator::find(const Vec& theta, double tol) const {
  for (size_t v = 0; v < regions_.size(); ++v)
    if (regions_[v].region.contains(theta, tol)) return static_cast<int>(v);
  return -1;
}

std::optional<Vec> Enumerator::facet_point(int r, int row, const Mat& Ex, const Vec& fx) const {
  const CriticalRegion& cr = regions_[r].region;
  const int td = p_.theta_dim(), m = static_cast<int>(cr.E.rows()), mx = static_cast<int>(Ex.rows());
  const Vec a = cr.E.row(row).transpose();
  StandardLp lp;
  lp.c = Vec::Zero(td + 1);
  lp.c[td] = -1.0;
  Mat Aub(m - 1 + mx, td + 1);
  Vec bub(m - 1 + mx);
  int k = 0;
  auto put = [&](const Vec& e, double f) {
    Aub.row(k).head(td) = e.transpose();
    Aub(k, td) = (e - e.dot(a) * a).norm();
    bub[k++] = f;
  };
  for (int i = 0; i < m; ++i)
    if (i != row) put(cr.E.row(i).transpose(), cr.f[i]);
  for (int i = 0; i < mx; ++i) put(Ex.row(i).transpose(), fx[i]);
  Mat Aeq = Mat::Zero(1, td + 1);
  Aeq.row(0).head(td) = a.transpose();
  lp.A_ub = to_sparse(Aub);
  lp.b_ub = bub;
  lp.A_eq = to_sparse(Aeq);
  lp.b_eq = Vec::Constant(1, cr.f[row]);
  lp.lb = Vec::Constant(td + 1, -kInf);
  lp.ub = Vec::Constant(td + 1, kInf);
  lp.lb[td] = 0.0;
  lp.ub[td] = 1.0;  // a point facet (one-dimensional theta) has unbounded radius
  LpOptions o;
  o.primal_tol = o.dual_tol = 1e-11;
  const LpSolution s = solve_lp(lp, o);
  if (s.status != LpStatus::Optimal || s.x[td] <= kPieceRadius) return std::nullopt;
  return Vec(s.x.head(td));
}

int Enumerator::cross(const Vec& fp, const Vec& normal) {
  for (double step = opt_.step; step <= 1e-4 * (1 + 1e-9); step *= 10) {
    const Vec t = fp + step * normal;
    if (!in_theta(p_, t)) return -1;
    if (const int hit = find(t, 0.0); hit >= 0) return hit;
    const auto as = active_set_at(t);
    if (!as) return -1;
    const int idx = add(*as);
    if (idx >= 0 && regions_[idx].region.contains(t, kLocateTol)) return idx;
  }
  return -1;
}

// Facets need not match between neighbours. Each facet is crossed at the
// Chebyshev point of every piece not yet covered by the region found on the
// other side; pieces are split off along that region's rows.
void Enumerator::explore() {
  const int td = p_.theta_dim();
  while (!queue_.empty()) {
    const int r = queue_.front();
    queue_.pop_front();
    const int rows = static_cast<int>(regions_[r].region.E.rows());
    for (int row = 0; row < rows; ++row) {
      if (regions_[r].kinds[row] == kTheta) continue;
      const Vec normal = regions_[r].region.E.row(row).transpose();
      std::vector<std::pair<Mat, Vec>> pieces{{Mat(0, td), Vec(0)}};
      for (int budget = 0; !pieces.empty() && budget < kPieceBudget; ++budget) {
        auto [Ex, fx] = std::move(pieces.back());
        pieces.pop_back();
        const auto fp = facet_point(r, row, Ex, fx);
        if (!fp) continue;
        const int nb = cross(*fp, normal);
        if (nb < 0 || nb == r) continue;
        const Built& n = regions_[nb];
        Mat E = Ex;
        Vec f = fx;
        for (int j = 0; j < n.region.E.rows(); ++j) {
          if (n.kinds[j] == kTheta) continue;
          const Eigen::RowVectorXd e = n.region.E.row(j);
          if (e.dot(normal) < -1.0 + 1e-9) continue;  // the shared hyperplane
          Mat Ep(E.rows() + 1, td);
          Vec fp2(f.size() + 1);
          Ep << E, -e;
          fp2 << f, -n.region.f[j];
          pieces.emplace_back(std::move(Ep), std::move(fp2));
          Mat En(E.rows() + 1, td);
          Vec fn(f.size() + 1);
          En << E, e;
          fn << f, n.region.f[j];
          E = std::move(En);
          f = std::move(fn);
        }
      }
    }
  }
}

int Enumerator::coverage_repair() {
  if (opt_.coverage_samples <= 0) return 0;
  Polytope theta{p_.A_theta, p_.b_theta};
  Vec lo, hi;
  bounding_box(theta, lo, hi);
  std::mt19937_64 eng(opt_.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int uncovered = 0;
  for (int s = 0; s < opt_.coverage_samples; ++s) {
    Vec t(lo.size());
    for (int k = 0; k < t.size(); ++k) t[k] = lo[k] + (hi[k] - lo[k]) * u(eng);
    if (!in_theta(p_, t) || find(t, kLocateTol) >= 0) continue;
    const auto as = active_set_at(t);
    if (!as) continue;
    const int idx = add(*as);
    explore();
    if (idx < 0 || find(t, kLocateTol) < 0) ++uncovered;
  }
  return uncovered;
}

void Enumerator::combinatorial() {
  const int mi = p_.num_ineq();
  const int need = p_.x_dim() - p_.num_eq();
  if (need < 0 || need > mi) return;
  std::vector<int> pick(need);
  for (int i = 0; i < need; ++i) pick[i] = i;
  for (;;) {
    add(pick);
    int i = need - 1;
    while (i >= 0 && pick[i] == mi - need + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < need; ++k) pick[k] = pick[k - 1] + 1;
  }
  queue_.clear();
}

std::vector<CriticalRegion> Enumerator::run() {
  const int n = p_.x_dim(), td = p_.theta_dim();
  // Joint feasibility over (x, theta).
  StandardLp joint;
  joint.c = Vec::Zero(n + td);
  Mat Aub(p_.num_ineq() + p_.A_theta.rows(), n + td);
  Aub.setZero();
  Aub.topLeftCorner(p_.num_ineq(), n) = p_.A;
  Aub.topRightCorner(p_.num_ineq(), td) = -p_.F;
  Aub.bottomRightCorner(p_.A_theta.rows(), td) = p_.A_theta;
  Vec bub(Aub.rows());
  bub << p_.b, p_.b_theta;
  Mat Aeq(p_.num_eq(), n + td);
  Aeq << p_.A_eq, -p_.F_eq;
  joint.A_ub = to_sparse(Aub);
  joint.b_ub = bub;
  joint.A_eq = to_sparse(Aeq);
  joint.b_eq = p_.b_eq;
  joint.lb = Vec::Constant(n + td, -kInf);
  joint.ub = Vec::Constant(n + td, kInf);
  const LpSolution js = solve_lp(joint);
  if (js.status == LpStatus::Infeasible)
    throw EmptySolution("mp-LP is infeasible for every parameter in its parameter set");

  const bool small = p_.num_ineq() <= opt_.combinatorial_limit;
  if (opt_.method == EnumerationMethod::Combinatorial ||
      (opt_.method == EnumerationMethod::Auto && small)) {
    combinatorial();
  } else {
    const Ball tb = chebyshev_ball(Polytope{p_.A_theta, p_.b_theta});
    if (tb.empty) throw EmptySolution("parameter set is empty");
    for (const Vec& seed : {tb.center, Vec(js.x.tail(td))}) {
      if (!regions_.empty()) break;
      if (const auto as = active_set_at(seed)) add(*as);
    }
    explore();
    coverage_repair();
  }
  std::vector<CriticalRegion> out;
  out.reserve(regions_.size());
  for (Built& b : regions_) out.push_back(std::move(b.region));
  return out;
}

}  // namespace

void MpLp::validate() const {
  const int n = x_dim(), td = theta_dim();
  auto fail = [](const std::string& w) { throw DimensionMismatch("MpLp: " + w); };
  if (H.rows() != n) fail("H must have x_dim rows");
  if (A.rows() != b.size() || F.rows() != b.size()) fail("A, b, F row counts differ");
  if (A_eq.rows() != b_eq.size() || F_eq.rows() != b_eq.size()) fail("A_eq, b_eq, F_eq row counts differ");
  if ((A.rows() && A.cols() != n) || (A_eq.rows() && A_eq.cols() != n)) fail("A/A_eq must have x_dim columns");
  if ((F.rows() && F.cols() != td) || (F_eq.rows() && F_eq.cols() != td) || A_theta.cols() != td)
    fail("F/F_eq/A_theta must have theta_dim columns");
  if (A_theta.rows() != b_theta.size()) fail("A_theta rows != len(b_theta)");
  if (n < 1) fail("x dimension must be at least 1");
}

StandardLp MpLp::at(const Vec& theta) const {
  const int n = x_dim();
  StandardLp lp;
  lp.c = c + H * theta;
  lp.A_ub = to_sparse(A);
  lp.b_ub = b + F * theta;
  lp.A_eq = to_sparse(A_eq);
  lp.b_eq = b_eq + F_eq * theta;
  lp.lb = Vec::Constant(n, -kInf);
  lp.ub = Vec::Constant(n, kInf);
  return lp;
}

bool CriticalRegion::contains(const Vec& theta, double tol) const {
  if (box_lo.size() == theta.size()) {
    for (int k = 0; k < theta.size(); ++k)
      if (theta[k] < box_lo[k] - tol || theta[k] > box_hi[k] + tol) return false;
  }
  for (int i = 0; i < E.rows(); ++i)
    if (E.row(i).dot(theta) > f[i] + tol) return false;
  return true;
}

MpSolution enumerate_regions(const MpLp& p, const EnumerationOptions& opt) {
  p.validate();
  Polytope theta{p.A_theta, p.b_theta};
  Vec lo, hi;
  bounding_box(theta, lo, hi);
  if (!lo.allFinite() || !hi.allFinite())
    throw DimensionMismatch("MpLp: parameter set must be bounded");
  Enumerator en(p, opt);
  MpSolution sol;
  sol.problem = p;
  sol.theta_dim = p.theta_dim();
  sol.x_dim = p.x_dim();
  sol.regions = en.run();
  if (sol.regions.empty())
    throw EmptySolution("no full-dimensional critical region found");
  compute_region_boxes(sol);
  return sol;
}

void compute_region_boxes(MpSolution& sol) {
  for (CriticalRegion& r : sol.regions) {
    r.box_lo.resize(0);
    r.box_hi.resize(0);
    Vec lo, hi;
    bounding_box(Polytope{r.E, r.f}, lo, hi);
    r.box_lo = lo;
    r.box_hi = hi;
  }
}

std::optional<int> try_locate_region(const MpSolution& sol, const Vec& theta) {
  if (theta.size() != sol.theta_dim)
    throw DimensionMismatch("locate_region: theta has " + std::to_string(theta.size()) +
                            " entries, expected " + std::to_string(sol.theta_dim));
  for (size_t v = 0; v < sol.regions.size(); ++v)
    if (sol.regions[v].contains(theta, kLocateTol)) return static_cast<int>(v);
  return std::nullopt;
}

int locate_region(const MpSolution& sol, const Vec& theta) {
  if (auto v = try_locate_region(sol, theta)) return *v;
  throw NoRegionFound("no critical region contains the parameter vector");
}

Vec evaluate_primal(const CriticalRegion& r, const Vec& theta) { return r.A_aff * theta + r.b_aff; }

double evaluate_value(const CriticalRegion& r, const MpLp& p, const Vec& theta) {
  return (p.c + p.H * theta).dot(r.A_aff * theta + r.b_aff);
}

Vec evaluate_duals(const CriticalRegion& r, const Vec& theta) { return r.G * theta + r.g; }

Vec subgradient_wrt_master(const CriticalRegion& r, const ThetaLayout& layout, const MpLp& p,
                           const Vec& theta) {
  const Vec grad = r.A_aff.transpose() * (p.c + p.H * theta) +
                   p.H.transpose() * (r.A_aff * theta + r.b_aff);
  Vec out(layout.master_idx.size());
  for (size_t k = 0; k < layout.master_idx.size(); ++k) out[k] = grad[layout.master_idx[k]];
  return out;
}

std::optional<std::vector<int>> optimal_active_set(const MpLp& p, const Vec& theta) {
  return shifted_active_set(p, shifted_data(p), theta);
}

}  // namespace mpb
