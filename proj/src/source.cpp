#include "islab/source.hpp"

#include <cmath>

namespace islab {

Real Bump::support_radius() const {
  if (kind == BumpKind::Power) return width;
  return cut_radius > 0.0 ? cut_radius : 4.0 * width;
}

Real Bump::profile(Real r) const {
  switch (kind) {
    case BumpKind::Gaussian: {
      if (r >= support_radius()) return 0.0;
      const Real t = r / width;
      return std::exp(-0.5 * t * t);
    }
    case BumpKind::Power: {
      if (r >= width) return 0.0;
      const Real t = r / width;
      return std::pow(1.0 - t * t, exponent);
    }
  }
  return 0.0;
}

Vec3 evaluate_bumps(const std::vector<Bump>& bumps, const Vec3& x) {
  Vec3 value = Vec3::Zero();
  for (const Bump& b : bumps) value += b.amplitude * b.profile((x - b.center).norm());
  return value;
}

bool SourcePair::is_zero() const {
  return f0.cwiseAbs().maxCoeff() == 0.0 && f1.cwiseAbs().maxCoeff() == 0.0;
}

namespace {

void check_bump(const Bump& b, const Domain& domain) {
  require(b.width > 0.0, "rasterize_source: bump width must be positive");
  const Real clearance = inside_distance(domain.shape, b.center);
  require(clearance > 0.0, "rasterize_source: bump center outside the domain");
  require(clearance >= b.support_radius() + domain.standoff(),
          "rasterize_source: bump support violates the boundary standoff");
}

void rasterize_component(const std::vector<Bump>& bumps, const Domain& domain,
                         const std::vector<char>& mask, int arity,
                         Eigen::MatrixXd& field) {
  const Index cells = domain.grid.cells();
  field.setZero(cells, arity);
  if (bumps.empty()) return;
  parallel_for(0, cells, [&](Index c) {
    if (!mask[static_cast<std::size_t>(c)]) return;
    const Vec3 v = evaluate_bumps(bumps, domain.grid.center(c));
    for (int a = 0; a < arity; ++a) field(c, a) = v[a];
  });
}

}  // namespace

SourcePair rasterize_source(const SourceSpec& spec, const Domain& domain) {
  require(spec.arity == 1 || spec.arity == 3, "rasterize_source: arity must be 1 or 3");
  for (const Bump& b : spec.f0) check_bump(b, domain);
  for (const Bump& b : spec.f1) check_bump(b, domain);

  SourcePair src;
  src.grid = domain.grid;
  src.arity = spec.arity;
  const Index cells = domain.grid.cells();
  src.mask.assign(static_cast<std::size_t>(cells), 0);
  for (Index c = 0; c < cells; ++c)
    src.mask[static_cast<std::size_t>(c)] = domain.in_support(c) ? 1 : 0;

  rasterize_component(spec.f0, domain, src.mask, spec.arity, src.f0);
  rasterize_component(spec.f1, domain, src.mask, spec.arity, src.f1);
  return src;
}

void scale_source(SourcePair& source, Real factor) {
  source.f0 *= factor;
  source.f1 *= factor;
}

}  // namespace islab
