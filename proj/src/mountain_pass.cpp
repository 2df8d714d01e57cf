#include <lichmp/error.hpp>
#include <lichmp/mountain_pass.hpp>

#include "functional_detail.hpp"
#include "parallel.hpp"
#include "sparse_ops.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace lichmp {

namespace {

using Vec = std::vector<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec axpy(const Vec& x, double a, const Vec& d) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + a * d[i];
  return y;
}

Vec lerp(const Vec& x, const Vec& y, double s) {
  Vec z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (1.0 - s) * x[i] + s * y[i];
  return z;
}

double distance(const Landscape& L, const Vec& x, const Vec& y) {
  Vec d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  return L.norm(d);
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Linear resampling at equal arc length; endpoints are copied, not recomputed.
std::vector<Vec> resample(const Landscape& L, const std::vector<Vec>& pts, std::size_t count) {
  std::vector<double> s(pts.size(), 0.0);
  for (std::size_t j = 1; j < pts.size(); ++j) s[j] = s[j - 1] + distance(L, pts[j - 1], pts[j]);
  const double total = s.back();
  std::vector<Vec> out(count);
  out.front() = pts.front();
  out.back() = pts.back();
  std::size_t seg = 0;
  for (std::size_t k = 1; k + 1 < count; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(count - 1);
    while (seg + 2 < pts.size() && s[seg + 1] < target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double a = len > 0.0 ? std::clamp((target - s[seg]) / len, 0.0, 1.0) : 0.0;
    out[k] = lerp(pts[seg], pts[seg + 1], a);
  }
  return out;
}

}  // namespace

int thread_count() {
  if (const char* env = std::getenv("LICHMP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

double Landscape::norm(std::span<const double> x) const {
  return std::sqrt(std::max(0.0, inner(x, x)));
}

FieldLandscape::FieldLandscape(const CoefficientSet& c, double eps)
    : c_(&c), eps_(eps), riesz_(c) {
  if (!(eps > 0.0)) throw Error(ErrorKind::Parameter, "landscape requires epsilon > 0");
}

std::size_t FieldLandscape::dim() const { return c_->domain().size(); }

double FieldLandscape::energy(std::span<const double> x) const {
  return energy_value(*c_, x, eps_);
}

void FieldLandscape::gradient(std::span<const double> x, std::span<double> g) const {
  gradient_into(*c_, x, eps_, g);
}

void FieldLandscape::riesz(std::span<const double> g, std::span<double> out) const {
  riesz_.apply(g, out);
}

double FieldLandscape::inner(std::span<const double> x, std::span<const double> y) const {
  const Domain& d = c_->domain();
  const auto w = d.weights();
  const auto bnd = d.boundary_conductance();
  double s = 0.0;
  for (const auto& e : d.couplings()) s += e.conductance * (x[e.i] - x[e.j]) * (y[e.i] - y[e.j]);
  for (std::size_t i = 0; i < x.size(); ++i) s += (bnd[i] + w[i] * c_->V[i]) * x[i] * y[i];
  return s;
}

SubspaceLandscape::SubspaceLandscape(const CoefficientSet& c, double eps, std::vector<Field> basis)
    : c_(&c), eps_(eps), basis_(std::move(basis)) {
  if (!(eps > 0.0)) throw Error(ErrorKind::Parameter, "landscape requires epsilon > 0");
  if (basis_.empty()) throw Error(ErrorKind::Parameter, "empty subspace basis");
  const std::size_t k = basis_.size();
  gram_.assign(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) gram_[a * k + b] = inner_product(c, basis_[a], basis_[b]);
  }
}

Field SubspaceLandscape::embed(std::span<const double> a) const {
  Field u(basis_.front().domain_ptr());
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += a[k] * basis_[k][i];
  }
  return u;
}

double SubspaceLandscape::energy(std::span<const double> a) const {
  const Field u = embed(a);
  return energy_value(*c_, u.values(), eps_);
}

void SubspaceLandscape::gradient(std::span<const double> a, std::span<double> g) const {
  const Field u = embed(a);
  Field full(u.domain_ptr());
  gradient_into(*c_, u.values(), eps_, full.values());
  for (std::size_t k = 0; k < basis_.size(); ++k) g[k] = directional_derivative(full, basis_[k]);
}

void SubspaceLandscape::riesz(std::span<const double> g, std::span<double> out) const {
  const auto k = static_cast<Eigen::Index>(basis_.size());
  const Eigen::Map<const Eigen::MatrixXd> G(gram_.data(), k, k);
  detail::view(out) = G.ldlt().solve(detail::view(g));
}

double SubspaceLandscape::inner(std::span<const double> a, std::span<const double> b) const {
  const std::size_t k = basis_.size();
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) s += a[i] * gram_[i * k + j] * b[j];
  }
  return s;
}

Field MpPath::field(std::size_t j) const {
  if (!domain) throw Error(ErrorKind::Parameter, "path has no grid domain");
  return Field(domain, nodes.at(j));
}

void MpPath::evaluate(const Landscape& L) {
  energies.assign(nodes.size(), 0.0);
  detail::parallel_for(nodes.size(), thread_count(),
                       [&](std::size_t j) { energies[j] = L.energy(nodes[j]); });
  peak_index = argmax(energies);
}

double find_t2(const CoefficientSet& c, const Field& psi, double t0, double t1, double eps0,
               const ApproxSequence* first_step) {
  require_same_domain(c.domain(), psi);
  const Domain& d = c.domain();
  const double p = two_star(d.dimension());
  const auto w = d.weights();

  std::function<double(double)> upper;
  double lower = 0.0;
  if (first_step == nullptr) {
    Field u = psi;
    u *= t1;
    lower = energy(c, u, eps0).total;
    upper = [&](double t) {
      Field v = psi;
      v *= t;
      return energy(c, v, 0.0).total;
    };
  } else {
    double b_first = 0.0;  // ∫(B_{1,+} - B_-)|ψ|^{2*}
    double b_limit = 0.0;  // ∫(B_+ - B_{1,-})|ψ|^{2*}
    double sing = 0.0;     // ∫_{supp A} A/|ψ|^{2*}
    double sing_first = 0.0;
    bool sing_infinite = false;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const double a = std::fabs(psi[i]);
      const double ap = std::pow(a, p);
      const double bp = std::max(c.B[i], 0.0);
      const double bm = std::max(-c.B[i], 0.0);
      b_first += w[i] * (first_step->B_n_plus[i] - bm) * ap;
      b_limit += w[i] * (bp - first_step->B_n_minus[i]) * ap;
      if (c.supp_A[i]) {
        if (a < kPositivityFloor) {
          sing_infinite = true;
        } else {
          sing += w[i] * c.A[i] / ap;
        }
        sing_first += w[i] * first_step->A_n[i] / std::pow(eps0 + t1 * t1 * a * a, 0.5 * p);
      }
    }
    if (sing_infinite) throw Error(ErrorKind::Geometry, "psi vanishes on supp A");
    lower = 0.5 * t1 * t1 - std::pow(t1, p) / p * b_limit + sing_first / p;
    upper = [=](double t) {
      return 0.5 * t * t - std::pow(t, p) / p * b_first + sing / (p * std::pow(t, p));
    };
  }
  double t = 2.0 * t0;
  for (int k = 1; k <= 60; ++k, t *= 2.0) {
    if (upper(t) <= lower) return t;
  }
  throw Error(ErrorKind::Geometry,
              "energy along t*psi does not descend below the t1 level up to 2^60 t0");
}

MpPath polyline_path(const Landscape& L, const std::vector<std::vector<double>>& anchors, int P,
                     DomainPtr domain) {
  if (P < 3 || anchors.size() < 2) throw Error(ErrorKind::Parameter, "path needs >= 3 nodes");
  MpPath path;
  path.domain = std::move(domain);
  path.nodes = resample(L, anchors, static_cast<std::size_t>(P));
  path.evaluate(L);
  return path;
}

MpPath initial_path(const Landscape& L, const Field& psi, double t1, double t2, int P) {
  if (P < 16) throw Error(ErrorKind::Parameter, "initial path needs P >= 16");
  MpPath path;
  path.domain = psi.domain_ptr();
  path.nodes.resize(static_cast<std::size_t>(P));
  for (int j = 0; j < P; ++j) {
    const double s = static_cast<double>(j) / (P - 1);
    const double t = j == P - 1 ? t2 : s * t2 + (1.0 - s) * t1;
    Vec v(psi.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = t * psi[i];
    path.nodes[static_cast<std::size_t>(j)] = std::move(v);
  }
  path.evaluate(L);
  return path;
}

DeformResult deform(MpPath path, const Landscape& L, const DeformOptions& opt) {
  DeformResult res;
  const std::size_t P = path.size();
  const std::size_t n = L.dim();
  if (P < 3) throw Error(ErrorKind::Parameter, "path needs >= 3 nodes");
  if (path.energies.size() != P) path.evaluate(L);
  const int workers = thread_count();

  std::vector<Vec> grads(P, Vec(n));
  std::vector<Vec> dirs(P, Vec(n));
  std::vector<double> gnorm(P, 0.0);
  std::vector<double> maxima;

  // Step lengths are bounded by the starting resolution; tying them to the
  // current spacing lets a stretching path accelerate its own runaway.
  double spacing = 0.0;
  for (std::size_t j = 1; j < P; ++j) spacing += distance(L, path.nodes[j - 1], path.nodes[j]);
  spacing /= static_cast<double>(P - 1);
  const double cap = opt.step_cap * spacing;
  // Nodes already below both endpoints cannot carry the path maximum.
  const double floor_level = std::max(path.energies.front(), path.energies.back());

  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    // Tangents come from the nodes as they were at the start of the sweep, so
    // the update does not depend on the order in which nodes are visited.
    const std::vector<Vec> before = path.nodes;
    detail::parallel_for(P - 2, workers, [&](std::size_t k) {
      const std::size_t j = k + 1;
      if (path.energies[j] < floor_level) return;
      L.gradient(path.nodes[j], grads[j]);
      L.riesz(grads[j], dirs[j]);
      double gd = 0.0;
      for (std::size_t i = 0; i < n; ++i) gd += grads[j][i] * dirs[j][i];
      gnorm[j] = std::sqrt(std::max(0.0, gd));
      // Only the component normal to the path moves the node, so nodes do
      // not slide off the barrier along the string.
      Vec tangent(n);
      for (std::size_t i = 0; i < n; ++i) tangent[i] = before[j + 1][i] - before[j - 1][i];
      const double tn = L.norm(tangent);
      if (opt.normal_only && tn > 0.0) {
        const double along = L.inner(dirs[j], tangent) / (tn * tn);
        for (std::size_t i = 0; i < n; ++i) dirs[j][i] -= along * tangent[i];
        gd = 0.0;
        for (std::size_t i = 0; i < n; ++i) gd += grads[j][i] * dirs[j][i];
      }
      const double dn = L.norm(dirs[j]);
      for (double& x : dirs[j]) x = -x;
      double slope = -gd;
      if (dn > cap && dn > 0.0) {
        const double scale = cap / dn;
        for (double& x : dirs[j]) x *= scale;
        slope *= scale;
      }
      double tau = opt.armijo_start;
      for (int trial = 0; trial < opt.armijo_trials; ++trial, tau *= opt.armijo_factor) {
        Vec cand = axpy(path.nodes[j], tau, dirs[j]);
        const double e = L.energy(cand);
        if (std::isfinite(e) && e <= path.energies[j] + opt.armijo_c1 * tau * slope) {
          path.nodes[j] = std::move(cand);
          path.energies[j] = e;
          break;
        }
      }
    });
    path.peak_index = argmax(path.energies);

    if (opt.reparametrize) {
      std::vector<Vec> moved = resample(L, path.nodes, P);
      path.nodes = std::move(moved);
      path.evaluate(L);
    }

    const std::size_t pk = path.peak_index;
    double peak_grad = 0.0;
    if (pk == 0 || pk + 1 == P) {
      peak_grad = kInf;
    } else {
      Vec g(n), r(n);
      L.gradient(path.nodes[pk], g);
      L.riesz(g, r);
      double gd = 0.0;
      for (std::size_t i = 0; i < n; ++i) gd += g[i] * r[i];
      peak_grad = std::sqrt(std::max(0.0, gd));
    }
    res.history.push_back({sweep, path.max_energy(), peak_grad});
    maxima.push_back(path.max_energy());
    res.sweeps = sweep;

    const double scale = std::max(1.0, L.norm(path.nodes[pk]));
    if (peak_grad < opt.grad_tol * scale) {
      res.converged = true;
      break;
    }
    if (maxima.size() > static_cast<std::size_t>(opt.stagnation_window)) {
      const double old = maxima[maxima.size() - 1 - static_cast<std::size_t>(opt.stagnation_window)];
      const double now = maxima.back();
      if (old - now <= opt.stagnation_tol * std::max(1.0, std::fabs(now))) {
        res.stagnated = true;
        break;
      }
    }
  }
  if (!res.converged && !res.stagnated) {
    res.warning = "nonconvergence: sweep budget exhausted with peak gradient " +
                  std::to_string(res.history.empty() ? kInf : res.history.back().peak_grad_norm);
  }
  res.path = std::move(path);
  return res;
}

std::vector<double> peak_estimate(const MpPath& path, const Landscape& L, int samples) {
  const std::size_t pk = path.peak_index;
  Vec best = path.nodes[pk];
  double best_e = path.energies[pk];
  auto scan = [&](std::size_t a, std::size_t b) {
    for (int k = 1; k < samples; ++k) {
      Vec x = lerp(path.nodes[a], path.nodes[b], static_cast<double>(k) / samples);
      const double e = L.energy(x);
      if (e > best_e) {
        best_e = e;
        best = std::move(x);
      }
    }
  };
  if (pk > 0) scan(pk - 1, pk);
  if (pk + 1 < path.size()) scan(pk, pk + 1);
  return best;
}

CriticalPoint refine_critical(const Field& peak, const CoefficientSet& c, double eps,
                              const RefineOptions& opt) {
  require_same_domain(c.domain(), peak);
  if (!(eps > 0.0)) throw Error(ErrorKind::Parameter, "refine requires epsilon > 0");
  const RieszMap riesz(c);
  const detail::SparseMatrix v_op = detail::v_operator(c);
  const std::size_t n = peak.size();

  Field u = peak;
  if (opt.project_positive) {
    for (std::size_t i = 0; i < n; ++i) u[i] = std::max(u[i], 0.0);
  }
  Field g(u.domain_ptr());
  gradient_into(c, u.values(), eps, g.values());
  double merit = riesz.dual_norm(g.values());

  CriticalPoint cp;
  cp.eps = eps;
  Eigen::SparseLU<detail::SparseMatrix> lu;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    if (merit < opt.rel_tol * std::max(1.0, v_norm(c, u))) break;
    const detail::SparseMatrix jac = detail::jacobian(c, u.values(), eps, v_op);
    lu.compute(jac);
    detail::Vector delta;
    bool newton_ok = lu.info() == Eigen::Success;
    if (newton_ok) {
      delta = -lu.solve(detail::view(g.values()));
      newton_ok = lu.info() == Eigen::Success && delta.allFinite();
    }
    auto try_direction = [&](const detail::Vector& dir) {
      double tau = 1.0;
      for (int trial = 0; trial < 40; ++trial, tau *= 0.5) {
        Field cand = u;
        for (std::size_t i = 0; i < n; ++i) {
          double x = u[i] + tau * dir[static_cast<Eigen::Index>(i)];
          cand[i] = opt.project_positive ? std::max(x, 0.0) : x;
        }
        Field gc(u.domain_ptr());
        gradient_into(c, cand.values(), eps, gc.values());
        const double mc = riesz.dual_norm(gc.values());
        if (std::isfinite(mc) && mc < merit * (1.0 - 1e-4 * tau)) {
          u = std::move(cand);
          g = std::move(gc);
          merit = mc;
          return true;
        }
      }
      return false;
    };
    bool moved = newton_ok && try_direction(delta);
    if (!moved) {
      // Steepest descent on the merit: -K⁻¹ J K⁻¹ g.
      Field kg = riesz.apply(g);
      detail::Vector jkg = jac * detail::view(kg.values());
      Field tmp(u.domain_ptr());
      riesz.apply(std::span<const double>(jkg.data(), n), tmp.values());
      detail::Vector dir = -detail::view(tmp.values());
      moved = try_direction(dir);
    }
    if (!moved) break;
  }
  cp.u = std::move(u);
  cp.iterations = it;
  cp.grad_norm = merit;
  cp.m = energy(c, cp.u, eps).total;
  if (opt.barrier && !(cp.m > *opt.barrier)) {
    throw Error(ErrorKind::SaddleLost, "refined level " + std::to_string(cp.m) +
                                           " is not above the barrier " +
                                           std::to_string(*opt.barrier));
  }
  return cp;
}

MpSolveResult solve_mountain_pass(const CoefficientSet& c, const Field& psi, double t1, double t2,
                                  double eps, const MpSolveOptions& opt, const Field* warm) {
  const FieldLandscape L(c, eps);
  MpSolveResult res;
  MpPath path;
  if (warm == nullptr) {
    path = initial_path(L, psi, t1, t2, opt.path_nodes);
  } else {
    require_same_domain(c.domain(), *warm);
    Vec a(psi.size()), b(psi.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = t1 * psi[i];
      b[i] = t2 * psi[i];
    }
    const Vec mid(warm->values().begin(), warm->values().end());
    path = polyline_path(L, {a, mid, b}, opt.path_nodes, psi.domain_ptr());
  }
  res.initial_path_max = path.max_energy();
  res.deformation = deform(std::move(path), L, opt.deform);
  const Vec start = peak_estimate(res.deformation.path, L);
  res.point = refine_critical(Field(psi.domain_ptr(), start), c, eps, opt.refine);
  return res;
}

}  // namespace lichmp
