#include <lichmp/domain.hpp>
#include <lichmp/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

namespace lichmp {

namespace {

constexpr std::size_t kMaxNodes = std::size_t{1} << 26;

void fnv_mix(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t k = 0; k < n; ++k) {
    h ^= p[k];
    h *= 0x100000001b3ULL;
  }
}

std::uint64_t spec_hash(const DomainSpec& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::int32_t kind = s.kind == DomainKind::RadialEuclidean ? 0 : 1;
  const std::int32_t dim = s.dimension;
  const std::uint64_t nodes = s.nodes;
  fnv_mix(h, &kind, sizeof kind);
  fnv_mix(h, &dim, sizeof dim);
  fnv_mix(h, &nodes, sizeof nodes);
  fnv_mix(h, &s.extent, sizeof s.extent);
  return h;
}

double periodic_gap(double a, double b, double period) {
  double d = std::fabs(a - b);
  d = std::fmod(d, period);
  return std::min(d, period - d);
}

}  // namespace

std::string to_string(DomainKind kind) {
  return kind == DomainKind::RadialEuclidean ? "radial" : "torus";
}

DomainKind domain_kind_from_string(const std::string& name) {
  if (name == "radial" || name == "RadialEuclidean" || name == "radial-euclidean") {
    return DomainKind::RadialEuclidean;
  }
  if (name == "torus" || name == "FlatTorus" || name == "flat-torus") return DomainKind::FlatTorus;
  throw Error(ErrorKind::Spec, "unknown domain kind '" + name + "'");
}

double unit_sphere_area(int dimension) {
  const double half = 0.5 * dimension;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

DomainPtr build_domain(const DomainSpec& spec) {
  if (spec.dimension < 3) {
    throw Error(ErrorKind::Dimension, "dimension must be at least 3, got " +
                                          std::to_string(spec.dimension));
  }
  if (!(spec.extent > 0.0) || !std::isfinite(spec.extent)) {
    throw Error(ErrorKind::Spec, "extent must be positive and finite");
  }
  if (spec.nodes == 0) throw Error(ErrorKind::Spec, "grid size must be positive");

  std::shared_ptr<Domain> d(new Domain());
  d->spec_ = spec;
  d->hash_ = spec_hash(spec);
  const int n_dim = spec.dimension;

  if (spec.kind == DomainKind::RadialEuclidean) {
    const std::size_t m = spec.nodes;
    const double h = spec.extent / static_cast<double>(m);
    const double omega = unit_sphere_area(n_dim);
    d->spacing_ = h;
    d->weights_.resize(m);
    d->radii_.resize(m);
    d->boundary_.assign(m, 0.0);
    const double cell = omega / n_dim * std::pow(h, n_dim);
    for (std::size_t i = 0; i < m; ++i) {
      const double lo = static_cast<double>(i);
      const double hi = static_cast<double>(i + 1);
      d->weights_[i] = cell * (std::pow(hi, n_dim) - std::pow(lo, n_dim));
      d->radii_[i] = (lo + 0.5) * h;
    }
    d->couplings_.reserve(m);
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const double face = static_cast<double>(i + 1) * h;
      d->couplings_.push_back({i, i + 1, omega * std::pow(face, n_dim - 1) / h});
    }
    // u = 0 on the face r = R_max, half a cell away from the last centre.
    d->boundary_[m - 1] = omega * std::pow(spec.extent, n_dim - 1) / (0.5 * h);
  } else {
    const std::size_t n = spec.nodes;
    double total = 1.0;
    for (int a = 0; a < n_dim; ++a) total *= static_cast<double>(n);
    if (total > static_cast<double>(kMaxNodes)) {
      throw Error(ErrorKind::Spec, "torus grid too large");
    }
    if (n < 3) throw Error(ErrorKind::Spec, "torus needs at least 3 nodes per axis");
    const auto count = static_cast<std::size_t>(total);
    const double h = spec.extent / static_cast<double>(n);
    d->spacing_ = h;
    d->weights_.assign(count, std::pow(h, n_dim));
    d->boundary_.assign(count, 0.0);
    d->radii_.resize(count);
    const double conductance = std::pow(h, n_dim - 2);
    d->couplings_.reserve(count * static_cast<std::size_t>(n_dim));
    std::vector<std::size_t> idx(static_cast<std::size_t>(n_dim), 0);
    const double centre = 0.5 * spec.extent;
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t rem = i;
      double r2 = 0.0;
      std::size_t stride = 1;
      for (int a = 0; a < n_dim; ++a) {
        idx[a] = rem % n;
        rem /= n;
        const double gap = periodic_gap(static_cast<double>(idx[a]) * h, centre, spec.extent);
        r2 += gap * gap;
        const std::size_t next = (idx[a] + 1) % n;
        const std::size_t j = i + (next - idx[a]) * stride;
        d->couplings_.push_back({i, j, conductance});
        stride *= n;
      }
      d->radii_[i] = std::sqrt(r2);
    }
  }
  return d;
}

std::vector<double> Domain::position(std::size_t i) const {
  if (kind() == DomainKind::RadialEuclidean) return {radii_[i]};
  std::vector<double> x(static_cast<std::size_t>(dimension()));
  std::size_t rem = i;
  for (auto& c : x) {
    c = static_cast<double>(rem % spec_.nodes) * spacing_;
    rem /= spec_.nodes;
  }
  return x;
}

double Domain::distance(std::size_t i, std::span<const double> point) const {
  if (kind() == DomainKind::RadialEuclidean) return std::fabs(radii_[i] - point[0]);
  const auto x = position(i);
  double r2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double g = periodic_gap(x[a], point[a], spec_.extent);
    r2 += g * g;
  }
  return std::sqrt(r2);
}

double Domain::analytic_volume() const {
  if (kind() == DomainKind::RadialEuclidean) {
    return unit_sphere_area(dimension()) * std::pow(extent(), dimension()) / dimension();
  }
  return std::pow(extent(), dimension());
}

double Domain::total_weight() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

Field::Field(DomainPtr domain, double fill)
    : domain_(std::move(domain)), values_(domain_->size(), fill) {}

Field::Field(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (values_.size() != domain_->size()) {
    throw Error(ErrorKind::DomainMismatch, "value count does not match domain size");
  }
}

Field Field::from_radius(DomainPtr domain, const std::function<double(double)>& f) {
  Field out(domain);
  const auto r = domain->radii();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(r[i]);
  return out;
}

Field Field::from_position(DomainPtr domain,
                           const std::function<double(std::span<const double>)>& f) {
  Field out(domain);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto x = domain->position(i);
    out[i] = f(x);
  }
  return out;
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

Field& Field::operator+=(const Field& other) {
  require_same_domain(*domain_, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_domain(*domain_, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

void require_same_domain(const Domain& d, const Field& f) {
  if (&f.domain() == &d) return;
  if (f.domain().hash() != d.hash() || f.size() != d.size()) {
    throw Error(ErrorKind::DomainMismatch, "field does not live on this domain");
  }
}

double integrate(const Domain& d, const Field& f) {
  require_same_domain(d, f);
  const auto w = d.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i];
  return s;
}

void apply_stiffness(const Domain& d, std::span<const double> u, std::span<double> out) {
  const auto bnd = d.boundary_conductance();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = bnd[i] * u[i];
  for (const auto& c : d.couplings()) {
    const double flux = c.conductance * (u[c.i] - u[c.j]);
    out[c.i] += flux;
    out[c.j] -= flux;
  }
}

Field apply_laplacian(const Domain& d, const Field& u) {
  require_same_domain(d, u);
  Field out(u.domain_ptr());
  apply_stiffness(d, u.values(), out.values());
  const auto w = d.weights();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -out[i] / w[i];
  return out;
}

double dirichlet_energy(const Domain& d, const Field& u, const Field& v) {
  require_same_domain(d, u);
  require_same_domain(d, v);
  const auto bnd = d.boundary_conductance();
  double s = 0.0;
  for (const auto& c : d.couplings()) {
    s += c.conductance * (u[c.i] - u[c.j]) * (v[c.i] - v[c.j]);
  }
  for (std::size_t i = 0; i < bnd.size(); ++i) {
    if (bnd[i] != 0.0) s += bnd[i] * u[i] * v[i];
  }
  return s;
}

}  // namespace lichmp
