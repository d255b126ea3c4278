#pragma once

#include <json.hpp>

#include <array>
#include <string>
#include <vector>

#include "clamped/grid.hpp"

namespace clamped {

/// Shape description: disk [R], square [L], annulus [R_in, R_out] or an
/// explicit mask. `resolution` is the number of cells across the bounding box
/// (disk and annulus span [-R, R], the square spans [0, L]).
struct DomainSpec {
  std::string shape;
  std::vector<double> params;
  int resolution = 64;
  // shape == "mask" only
  std::vector<std::vector<int>> rows;
  double h = 0.0;

  static DomainSpec disk(double radius, int resolution);
  static DomainSpec square(double side, int resolution);
  static DomainSpec annulus(double inner, double outer, int resolution);

  double spacing() const;
  /// Closed-form membership test; empty for mask specs.
  GridDomain::Predicate predicate() const;
  /// [xmin, xmax, ymin, ymax] of the shape.
  std::array<double, 4> bounding_box() const;
};

/// Node centre strictly inside the shape -> interior. Throws
/// std::invalid_argument on unknown shapes, bad parameters or an empty mask.
GridDomain make_domain(const DomainSpec& spec);
DomainPtr make_domain_ptr(const DomainSpec& spec);

/// {"shape": "disk", "params": [1.0], "resolution": 128}
/// {"shape": "mask", "h": 0.1, "rows": ["0110", "1111"]}
DomainSpec parse_domain_spec(const nlohmann::json& doc);
DomainSpec load_domain_spec(const std::string& path);
nlohmann::json to_json(const DomainSpec& spec);

}  // namespace clamped
