#include "clamped/domain.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace clamped {

namespace {

void require_params(const DomainSpec& spec, std::size_t count) {
  if (spec.params.size() != count) {
    throw std::invalid_argument("domain spec '" + spec.shape + "' expects " + std::to_string(count) + " params");
  }
  for (double p : spec.params) {
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("domain spec params must be positive");
  }
}

void validate(const DomainSpec& spec) {
  if (spec.shape == "disk") {
    require_params(spec, 1);
  } else if (spec.shape == "square") {
    require_params(spec, 1);
  } else if (spec.shape == "annulus") {
    require_params(spec, 2);
    if (spec.params[0] >= spec.params[1]) throw std::invalid_argument("annulus needs R_in < R_out");
  } else if (spec.shape == "mask") {
    if (!(spec.h > 0.0)) throw std::invalid_argument("mask spec needs h > 0");
    return;
  } else {
    throw std::invalid_argument("unknown shape '" + spec.shape + "'");
  }
  if (spec.resolution < 2) throw std::invalid_argument("resolution must be >= 2");
}

}  // namespace

DomainSpec DomainSpec::disk(double radius, int resolution) { return {"disk", {radius}, resolution, {}, 0.0}; }

DomainSpec DomainSpec::square(double side, int resolution) { return {"square", {side}, resolution, {}, 0.0}; }

DomainSpec DomainSpec::annulus(double inner, double outer, int resolution) {
  return {"annulus", {inner, outer}, resolution, {}, 0.0};
}

double DomainSpec::spacing() const {
  validate(*this);
  if (shape == "mask") return h;
  if (shape == "square") return params[0] / resolution;
  return 2.0 * params.back() / resolution;
}

GridDomain::Predicate DomainSpec::predicate() const {
  validate(*this);
  if (shape == "disk") {
    const double r2 = params[0] * params[0];
    return [r2](double x, double y) { return x * x + y * y < r2; };
  }
  if (shape == "square") {
    const double side = params[0];
    return [side](double x, double y) { return x > 0.0 && x < side && y > 0.0 && y < side; };
  }
  if (shape == "annulus") {
    const double a2 = params[0] * params[0], b2 = params[1] * params[1];
    return [a2, b2](double x, double y) {
      const double s = x * x + y * y;
      return s > a2 && s < b2;
    };
  }
  return {};
}

std::array<double, 4> DomainSpec::bounding_box() const {
  validate(*this);
  if (shape == "square") return {0.0, params[0], 0.0, params[0]};
  if (shape == "mask") {
    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.size());
    return {0.0, h * static_cast<double>(width), 0.0, h * static_cast<double>(rows.size())};
  }
  const double r = params.back();
  return {-r, r, -r, r};
}

GridDomain make_domain(const DomainSpec& spec) {
  validate(spec);
  if (spec.shape == "mask") return GridDomain::from_mask(spec.rows, spec.h);
  const auto box = spec.bounding_box();
  return GridDomain::from_predicate(spec.predicate(), box[0], box[1], box[2], box[3], spec.spacing());
}

DomainPtr make_domain_ptr(const DomainSpec& spec) { return std::make_shared<const GridDomain>(make_domain(spec)); }

DomainSpec parse_domain_spec(const nlohmann::json& doc) {
  DomainSpec spec;
  spec.shape = doc.at("shape").get<std::string>();
  if (spec.shape == "mask") {
    spec.h = doc.at("h").get<double>();
    for (const auto& row : doc.at("rows")) {
      std::vector<int> cells;
      if (row.is_string()) {
        for (char c : row.get<std::string>()) cells.push_back(c == '1' ? 1 : 0);
      } else {
        cells = row.get<std::vector<int>>();
      }
      spec.rows.push_back(std::move(cells));
    }
  } else {
    spec.params = doc.at("params").get<std::vector<double>>();
    spec.resolution = doc.value("resolution", 64);
  }
  validate(spec);
  return spec;
}

DomainSpec load_domain_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open domain spec '" + path + "'");
  return parse_domain_spec(nlohmann::json::parse(in));
}

nlohmann::json to_json(const DomainSpec& spec) {
  nlohmann::json doc;
  doc["shape"] = spec.shape;
  if (spec.shape == "mask") {
    doc["h"] = spec.h;
    doc["rows"] = spec.rows;
  } else {
    doc["params"] = spec.params;
    doc["resolution"] = spec.resolution;
  }
  return doc;
}

}  // namespace clamped
