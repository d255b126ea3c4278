#include "clamped/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace clamped {

namespace {

constexpr int kMargin = 2;
constexpr int kDirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

}  // namespace

GridDomain GridDomain::from_predicate(const Predicate& inside, double xmin, double xmax, double ymin, double ymax,
                                      double h) {
  if (!(h > 0.0)) throw std::invalid_argument("GridDomain: spacing must be positive");
  const int ilo = static_cast<int>(std::floor(xmin / h)) - kMargin;
  const int ihi = static_cast<int>(std::ceil(xmax / h)) + kMargin;
  const int jlo = static_cast<int>(std::floor(ymin / h)) - kMargin;
  const int jhi = static_cast<int>(std::ceil(ymax / h)) + kMargin;
  const int nx = ihi - ilo + 1;
  const int ny = jhi - jlo + 1;
  std::vector<char> mask(static_cast<std::size_t>(nx) * ny, 0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      mask[static_cast<std::size_t>(j) * nx + i] = inside(h * (ilo + i), h * (jlo + j)) ? 1 : 0;
    }
  }
  GridDomain d;
  d.build(std::move(mask), ilo, jlo, nx, ny, h);
  return d;
}

GridDomain GridDomain::from_mask(const std::vector<std::vector<int>>& rows, double h, int i0, int j0) {
  if (!(h > 0.0)) throw std::invalid_argument("GridDomain: spacing must be positive");
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.size());
  const int nx = static_cast<int>(width) + 2 * kMargin;
  const int ny = static_cast<int>(rows.size()) + 2 * kMargin;
  std::vector<char> mask(static_cast<std::size_t>(nx) * ny, 0);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i < rows[j].size(); ++i) {
      mask[(j + kMargin) * nx + i + kMargin] = rows[j][i] != 0 ? 1 : 0;
    }
  }
  GridDomain d;
  d.build(std::move(mask), i0 - kMargin, j0 - kMargin, nx, ny, h);
  return d;
}

void GridDomain::build(std::vector<char> box_mask, int i0, int j0, int nx, int ny, double h) {
  // Clear anything inside the margin so the exterior always surrounds the interior.
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (i < kMargin || j < kMargin || i >= nx - kMargin || j >= ny - kMargin) {
        box_mask[static_cast<std::size_t>(j) * nx + i] = 0;
      }
    }
  }
  h_ = h;
  i0_ = i0;
  j0_ = j0;
  nx_ = nx;
  ny_ = ny;
  box_index_.assign(box_mask.size(), -1);
  nodes_.clear();
  lower_ = {i0 + nx, j0 + ny};
  upper_ = {i0, j0};
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t b = static_cast<std::size_t>(j) * nx + i;
      if (!box_mask[b]) continue;
      box_index_[b] = static_cast<int>(nodes_.size());
      nodes_.push_back({i0 + i, j0 + j});
      lower_ = {std::min(lower_.i, i0 + i), std::min(lower_.j, j0 + j)};
      upper_ = {std::max(upper_.i, i0 + i), std::max(upper_.j, j0 + j)};
    }
  }
  if (nodes_.empty()) throw std::invalid_argument("GridDomain: empty interior");

  // 8-connected components of the exterior; the box corner is exterior so
  // the unbounded component gets label 0.
  std::vector<int> label(box_mask.size(), -1);
  component_count_ = 0;
  for (std::size_t start = 0; start < box_mask.size(); ++start) {
    if (box_mask[start] || label[start] >= 0) continue;
    const int id = component_count_++;
    std::deque<std::size_t> queue{start};
    label[start] = id;
    while (!queue.empty()) {
      const std::size_t b = queue.front();
      queue.pop_front();
      const int bi = static_cast<int>(b % nx), bj = static_cast<int>(b / nx);
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int ni = bi + di, nj = bj + dj;
          if (ni < 0 || nj < 0 || ni >= nx || nj >= ny) continue;
          const std::size_t nb = static_cast<std::size_t>(nj) * nx + ni;
          if (box_mask[nb] || label[nb] >= 0) continue;
          label[nb] = id;
          queue.push_back(nb);
        }
      }
    }
  }

  ring_.clear();
  faces_.clear();
  ring_pos_.assign(nodes_.size(), -1);
  for (int k = 0; k < interior_count(); ++k) {
    const int bi = nodes_[k].i - i0_, bj = nodes_[k].j - j0_;
    int component = -1;
    std::vector<BoundaryFace> local;
    for (const auto& dir : kDirs) {
      const std::size_t nb = static_cast<std::size_t>(bj + dir[1]) * nx + bi + dir[0];
      if (box_mask[nb]) continue;
      if (component < 0) component = label[nb];
      local.push_back({static_cast<int>(ring_.size()), dir[0], dir[1]});
    }
    if (local.empty()) continue;

    // Sobel gradient of the exterior indicator points outward.
    double gx = 0.0, gy = 0.0;
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const std::size_t nb = static_cast<std::size_t>(bj + dj) * nx + bi + di;
        if (box_mask[nb]) continue;
        const double w = (di == 0 || dj == 0) ? 2.0 : 1.0;
        gx += w * di;
        gy += w * dj;
      }
    }
    double norm = std::hypot(gx, gy);
    if (norm == 0.0) {
      for (const auto& f : local) {
        gx += f.di;
        gy += f.dj;
      }
      norm = std::hypot(gx, gy);
    }
    if (norm == 0.0) {
      gx = local.front().di;
      gy = local.front().dj;
      norm = 1.0;
    }
    ring_pos_[k] = static_cast<int>(ring_.size());
    ring_.push_back({k, gx / norm, gy / norm, component});
    faces_.insert(faces_.end(), local.begin(), local.end());
  }
}

int GridDomain::index_of(int i, int j) const {
  const int bi = i - i0_, bj = j - j0_;
  if (bi < 0 || bj < 0 || bi >= nx_ || bj >= ny_) return -1;
  return box_index_[static_cast<std::size_t>(bj) * nx_ + bi];
}

GridDomain GridDomain::rescaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("GridDomain::rescaled: factor must be positive");
  GridDomain d = *this;
  d.h_ = h_ * factor;
  return d;
}

ScalarField::ScalarField(DomainPtr d, Eigen::VectorXd v) : domain(std::move(d)), values(std::move(v)) {
  if (!domain) throw std::invalid_argument("ScalarField: null domain");
  if (values.size() != domain->interior_count()) {
    throw std::invalid_argument("ScalarField: value count does not match interior count");
  }
}

ScalarField ScalarField::zeros(DomainPtr d) {
  const int n = d->interior_count();
  return ScalarField(std::move(d), Eigen::VectorXd::Zero(n));
}

ScalarField ScalarField::from_function(DomainPtr d, const std::function<double(double, double)>& f) {
  Eigen::VectorXd v(d->interior_count());
  for (int k = 0; k < d->interior_count(); ++k) v[k] = f(d->x(k), d->y(k));
  return ScalarField(std::move(d), std::move(v));
}

double ScalarField::integral() const {
  const double h = domain->h();
  return h * h * values.sum();
}

double ScalarField::l2_norm() const { return domain->h() * values.norm(); }

}  // namespace clamped
