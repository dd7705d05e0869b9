#include "nanorod/fourier_block.hpp"

#include <Eigen/LU>

namespace nanorod {

HalfCoord half_coord(const RodGeometry&, const Vec3& x) {
  double t = std::atan2(x(2), x(1));
  if (t < 0) t += 2 * kPi;
  if (t < kPi) return {x(0), t, true};
  return {x(0), t - kPi, false};
}

Mat3 d_kernel(const LameMaterial& mat, double delta, int i, int j, double x1, double t1, double y1, double t2) {
  const double d = delta, s = x1 - y1;
  const double lm = mat.lambda, mu = mat.mu;
  const double c1 = std::cos(t1), s1 = std::sin(t1), c2 = std::cos(t2), s2 = std::sin(t2);
  const double pre = mu * d / (4 * kPi * (lm + 2 * mu)), pre3 = 3 * (lm + mu) * d / (4 * kPi * (lm + 2 * mu));
  const bool same = i == j;
  const double sg = same ? -1.0 : 1.0;
  const double den = s * s + 2 * d * d * (1 + sg * std::cos(t1 - t2));
  const double q = d * (1 + sg * std::cos(t2 - t1));
  const double p = d * std::sin(t2 - t1);

  // A_1, A_2, A_3, A_0 share the axial pattern up to sign
  Mat3 a;
  const double ax = (i == 1) ? 1.0 : -1.0;
  double e23;
  if (i == 1 && j == 1) e23 = -p;
  else if (i == 1 && j == 2) e23 = p;
  else if (i == 2 && j == 1) e23 = p;
  else e23 = -p;
  a << 0, ax * c1 * s, ax * s1 * s, -ax * c1 * s, 0, e23, -ax * s1 * s, -e23, 0;

  Vec3 r;
  if (i == 1 && j == 1) r = Vec3(s, -d * (c1 - c2), -d * (s1 - s2));
  else if (i == 1 && j == 2) r = Vec3(s, -d * (c1 + c2), -d * (s1 + s2));
  else if (i == 2 && j == 1) r = Vec3(s, d * (c1 + c2), d * (s1 + s2));
  else r = Vec3(s, d * (c1 - c2), d * (s1 - s2));
  const Mat3 cm = r * r.transpose();

  const double d3 = std::pow(den, 1.5), d5 = std::pow(den, 2.5);
  Mat3 k = pre * a / d3 - (pre * q / d3) * Mat3::Identity() - (pre3 * q / d5) * cm;
  return same ? Mat3(-k) : k;
}

Vec3 f_H(const LameMaterial& mat, const BackgroundField& H, const HalfCoord& c) {
  const Vec3 z(c.x1, 0, 0), nu(0, std::cos(c.theta), std::sin(c.theta));
  const Mat3 g = H.gradient(z);
  return mat.lambda * g.trace() * nu + mat.mu * (g + g.transpose()) * nu;
}

FourierBlockResult fourier_block_solve(const LameMaterial& mat, cplx lambda1, const BackgroundField& H,
                                       const SurfaceContext& ctx, const SolveOptions& opt) {
  const SurfaceMesh& m = ctx.mesh();
  const RodGeometry& rod = m.rod;
  const int nl = m.n_lateral();
  if (3 * m.size() > kMaxUnknowns) throw AssemblyError("fourier block system exceeds the dense size limit");
  MatX blk(3 * nl, 3 * nl);
  std::vector<RowBlock<double>> rows(ctx.threads());
  parallel_for(nl, ctx.threads(), [&](int n, int tid) {
    const HalfCoord xc = half_coord(rod, m.nodes[n].position);
    const int bi = xc.upper ? 2 : 1;
    const auto k = [&](const Vec3& y, const Vec3& ny) -> Mat3 {
      if (std::abs(ny(0)) > 1e-12) return Mat3::Zero();
      const HalfCoord yc = half_coord(rod, y);
      const int bj = yc.upper ? 2 : 1;
      const Mat3 dk = d_kernel(mat, rod.delta, bi, bj, xc.x1, xc.theta, yc.x1, yc.theta) / rod.delta;
      // off-diagonal blocks enter the system with a plus sign
      return bi == bj ? dk : Mat3(-dk);
    };
    integrate_row<double>(m, ctx.interp(), k, m.nodes[n].position, n, ctx.options(), rows[tid], ctx.sizes());
    blk.middleRows<3>(3 * n) = rows[tid].leftCols(3 * nl);
  });
  MatX a = -blk;
  blk.resize(0, 0);
  VecX rhs(3 * nl);
  for (int n = 0; n < nl; ++n) {
    const HalfCoord c = half_coord(rod, m.nodes[n].position);
    const Vec3 f = f_H(mat, H, c);
    rhs.segment<3>(3 * n) = c.upper ? f : Vec3(-f);
  }
  FourierBlockResult res;
  MatXc ac = a.cast<cplx>();
  ac.diagonal().array() += lambda1;
  Eigen::PartialPivLU<MatXc> lu(ac);
  const double rc = lu.rcond();
  res.cond_estimate = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (opt.throw_if_ill_conditioned && res.cond_estimate > kConditionGuard)
    throw IllConditionedError("fourier block system is ill-conditioned", res.cond_estimate);
  res.psi = lu.solve(rhs.cast<cplx>());
  return res;
}

}  // namespace nanorod
