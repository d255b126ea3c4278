#include "clamped/shapederiv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace clamped {

namespace {

constexpr int kDim = 2;

GridDomain::Predicate base_predicate(const DomainSpec& spec) {
  if (spec.shape != "mask") return spec.predicate();
  auto grid = std::make_shared<const GridDomain>(make_domain(spec));
  const double h = spec.h;
  return [grid, h](double x, double y) {
    return grid->is_interior(static_cast<int>(std::lround(x / h)), static_cast<int>(std::lround(y / h)));
  };
}

// (id + t V) Omega, approximated on the same lattice by x in the image iff
// x - t V(x) in Omega.
GridDomain perturbed(const DomainSpec& spec, const VectorFieldSpec& v, double t) {
  const auto inside = base_predicate(spec);
  auto box = spec.bounding_box();
  const double h = spec.spacing();
  const double pad = std::abs(t) * v.max_norm(box) * 1.5 + 2.0 * h;
  box = {box[0] - pad, box[1] + pad, box[2] - pad, box[3] + pad};
  if (v.kind == VectorFieldSpec::Kind::dilation) {
    return GridDomain::from_predicate([inside, t](double x, double y) { return inside(x / (1.0 + t), y / (1.0 + t)); },
                                      box[0], box[1], box[2], box[3], h);
  }
  return GridDomain::from_predicate(
      [inside, v, t](double x, double y) {
        double vx = 0.0, vy = 0.0;
        v.eval(x, y, vx, vy);
        return inside(x - t * vx, y - t * vy);
      },
      box[0], box[1], box[2], box[3], h);
}

GridDomain shifted(const DomainSpec& spec, double dx, double dy) {
  const auto inside = base_predicate(spec);
  const auto box = spec.bounding_box();
  const double h = spec.spacing();
  const double pad = std::hypot(dx, dy) + 2.0 * h;
  return GridDomain::from_predicate([inside, dx, dy](double x, double y) { return inside(x - dx, y - dy); },
                                    box[0] - pad, box[1] + pad, box[2] - pad, box[3] + pad, h);
}

double gamma_of(GridDomain domain, const EigenOptions& opts = {}) {
  return principal_eigenpair(std::make_shared<const GridDomain>(std::move(domain)), opts).eigenvalue;
}

std::vector<double> squared_face_traces(const ScalarField& u) {
  const Eigen::VectorXd t = face_trace_of_laplacian(u);
  std::vector<double> out(static_cast<std::size_t>(t.size()));
  for (Eigen::Index i = 0; i < t.size(); ++i) out[static_cast<std::size_t>(i)] = t[i] * t[i];
  return out;
}

struct BasePair {
  DomainPtr domain;
  EigenPair first;
  double second = 0.0;
};

BasePair base_pair(const DomainSpec& spec, const DerivativeOptions& options) {
  BasePair b;
  b.domain = make_domain_ptr(spec);
  auto pairs = lowest_eigenpairs(b.domain, 2);
  b.first = std::move(pairs[0]);
  b.second = pairs[1].eigenvalue;
  const double gap = (b.second - b.first.eigenvalue) / b.first.eigenvalue;
  if (gap < options.min_relative_gap) {
    std::ostringstream msg;
    msg << "relative spectral gap " << gap << " below " << options.min_relative_gap
        << "; the principal eigenvalue is not numerically simple";
    throw SpectralGapError(msg.str());
  }
  return b;
}

}  // namespace

VectorFieldSpec VectorFieldSpec::dilation() { return {}; }

VectorFieldSpec VectorFieldSpec::translation(double vx, double vy) {
  VectorFieldSpec v;
  v.kind = Kind::translation;
  v.vx = vx;
  v.vy = vy;
  return v;
}

VectorFieldSpec VectorFieldSpec::normal_bump(double theta, double width, double amplitude, double cx, double cy) {
  if (!(width > 0.0) || width > std::numbers::pi) throw std::invalid_argument("normal_bump: width must lie in (0, pi]");
  VectorFieldSpec v;
  v.kind = Kind::normal_bump;
  v.theta = theta;
  v.width = width;
  v.amplitude = amplitude;
  v.cx = cx;
  v.cy = cy;
  return v;
}

void VectorFieldSpec::eval(double x, double y, double& out_x, double& out_y) const {
  switch (kind) {
    case Kind::dilation:
      out_x = x;
      out_y = y;
      return;
    case Kind::translation:
      out_x = vx;
      out_y = vy;
      return;
    case Kind::normal_bump: {
      const double rx = x - cx, ry = y - cy;
      const double r = std::hypot(rx, ry);
      out_x = out_y = 0.0;
      if (r == 0.0) return;
      const double diff = std::remainder(std::atan2(ry, rx) - theta, 2.0 * std::numbers::pi);
      if (std::abs(diff) >= width) return;
      const double c = std::cos(0.5 * std::numbers::pi * diff / width);
      out_x = amplitude * c * c * rx / r;
      out_y = amplitude * c * c * ry / r;
      return;
    }
  }
}

double VectorFieldSpec::max_norm(const std::array<double, 4>& box) const {
  switch (kind) {
    case Kind::dilation:
      return std::hypot(std::max(std::abs(box[0]), std::abs(box[1])), std::max(std::abs(box[2]), std::abs(box[3])));
    case Kind::translation:
      return std::hypot(vx, vy);
    case Kind::normal_bump:
      return std::abs(amplitude);
  }
  return 0.0;
}

VectorFieldSpec parse_vector_field(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad number '" + item + "' in vector field '" + text + "'");
      }
    }
  }
  if (head == "dilation" && args.empty()) return VectorFieldSpec::dilation();
  if (head == "translation") {
    if (args.empty()) return VectorFieldSpec::translation(std::cos(0.3), std::sin(0.3));
    if (args.size() == 2) return VectorFieldSpec::translation(args[0], args[1]);
  }
  if (head == "bump" && args.size() == 3) return VectorFieldSpec::normal_bump(args[0], args[1], args[2]);
  throw std::invalid_argument("unknown vector field '" + text + "'");
}

std::string describe(const VectorFieldSpec& v) {
  std::ostringstream out;
  switch (v.kind) {
    case VectorFieldSpec::Kind::dilation:
      out << "dilation";
      break;
    case VectorFieldSpec::Kind::translation:
      out << "translation:" << v.vx << "," << v.vy;
      break;
    case VectorFieldSpec::Kind::normal_bump:
      out << "bump:" << v.theta << "," << v.width << "," << v.amplitude << "@" << v.cx << "," << v.cy;
      break;
  }
  return out.str();
}

std::array<double, 2> centroid(const GridDomain& d) {
  double sx = 0.0, sy = 0.0;
  for (int k = 0; k < d.interior_count(); ++k) {
    sx += d.x(k);
    sy += d.y(k);
  }
  return {sx / d.interior_count(), sy / d.interior_count()};
}

double boundary_flux(const GridDomain& d, const std::vector<double>& weights, const VectorFieldSpec& v) {
  const auto faces = d.faces();
  if (!weights.empty() && weights.size() != faces.size()) throw std::invalid_argument("boundary_flux: one weight per face");
  const double h = d.h();
  double total = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const int k = d.ring()[faces[f].ring].node;
    const double qx = d.x(k) + h * faces[f].di, qy = d.y(k) + h * faces[f].dj;
    double vx = 0.0, vy = 0.0;
    v.eval(qx, qy, vx, vy);
    const double w = weights.empty() ? 1.0 : weights[f];
    total += h * w * (vx * faces[f].di + vy * faces[f].dj);
  }
  return total;
}

VolumeDerivative volume_derivative(const DomainSpec& spec, const VectorFieldSpec& v, double step) {
  VolumeDerivative out;
  const double h = spec.spacing();
  out.step = step > 0.0 ? step : 4.0 * h;
  out.exact = boundary_flux(make_domain(spec), {}, v);
  const double plus = perturbed(spec, v, out.step).area();
  const double minus = perturbed(spec, v, -out.step).area();
  out.finite_difference = (plus - minus) / (2.0 * out.step);
  return out;
}

EigenDerivativeReport eigenvalue_derivative_check(const DomainSpec& spec, const VectorFieldSpec& v,
                                                  const DerivativeOptions& options) {
  const BasePair base = base_pair(spec, options);
  EigenDerivativeReport r;
  r.eigenvalue = base.first.eigenvalue;
  r.second_eigenvalue = base.second;
  r.formula_value = -boundary_flux(*base.domain, squared_face_traces(base.first.mode), v);

  const double h = spec.spacing();
  auto central = [&](double delta) {
    if (r.by_rescaling) {
      return (gamma_of(base.domain->rescaled(1.0 + delta)) - gamma_of(base.domain->rescaled(1.0 - delta))) /
             (2.0 * delta);
    }
    return (gamma_of(perturbed(spec, v, delta)) - gamma_of(perturbed(spec, v, -delta))) / (2.0 * delta);
  };
  // Only the origin-centred dilation is an exact rescaling of the mask.
  r.by_rescaling = v.kind == VectorFieldSpec::Kind::dilation;
  r.step = options.step > 0.0 ? options.step : (r.by_rescaling ? 1e-3 : 4.0 * h);
  r.fd_central = central(r.step);
  const double wide = central(2.0 * r.step);
  r.fd_value = (4.0 * r.fd_central - wide) / 3.0;

  if (options.estimate_noise) {
    const double offsets[][2] = {{0.5, 0.0}, {0.0, 0.5}, {0.5, 0.5}, {0.25, 0.75}, {0.75, 0.25}};
    double lo = r.eigenvalue, hi = r.eigenvalue;
    for (const auto& o : offsets) {
      const double g = gamma_of(shifted(spec, o[0] * h, o[1] * h));
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    r.fd_noise = (hi - lo) / r.step;
  }
  const double scale = std::max(std::abs(r.formula_value), std::abs(r.fd_value));
  r.relative_discrepancy = scale > 0.0 ? std::abs(r.formula_value - r.fd_value) / scale : 0.0;
  return r;
}

GDerivativeReport G_derivative_check(const DomainSpec& spec, const VectorFieldSpec& v, const DerivativeOptions& options) {
  const BasePair base = base_pair(spec, options);
  const auto& d = *base.domain;
  GDerivativeReport r;
  r.eigenvalue = base.first.eigenvalue;
  r.area = d.area();
  const double alpha2 = 4.0 * r.eigenvalue / (kDim * r.area);
  const double bracket = alpha2 * boundary_flux(d, {}, v) - boundary_flux(d, squared_face_traces(base.first.mode), v);
  r.derivative = bracket * std::pow(r.area, 4.0 / kDim);

  // int |V . n| with the same quadrature.
  double abs_flux = 0.0;
  const auto faces = d.faces();
  for (const auto& f : faces) {
    const int k = d.ring()[f.ring].node;
    double vx = 0.0, vy = 0.0;
    v.eval(d.x(k) + d.h() * f.di, d.y(k) + d.h() * f.dj, vx, vy);
    abs_flux += d.h() * std::abs(vx * f.di + vy * f.dj);
  }
  r.normalized = abs_flux > 0.0 ? bracket / (alpha2 * abs_flux) : 0.0;
  return r;
}

std::vector<ComponentStats> boundary_constancy_scan(const EigenPair& pair) {
  const RingValues t = boundary_trace_of_laplacian(pair.mode);
  return component_stats(*pair.mode.domain, t.cwiseProduct(t));
}

}  // namespace clamped
