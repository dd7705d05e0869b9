#include "nanorod/diagnostics.hpp"

#include <cmath>
#include <random>

namespace nanorod {

std::vector<Vec3> random_points(int n, double r_min, double r_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(r_min, r_max);
  std::vector<Vec3> pts;
  pts.reserve(n);
  while (static_cast<int>(pts.size()) < n) {
    Vec3 d(g(rng), g(rng), g(rng));
    const double nd = d.norm();
    if (nd < 1e-8) continue;
    pts.push_back(d / nd * u(rng));
  }
  return pts;
}

namespace {

// second derivative d_k d_l of the kernel by central differences with step h
Mat3c second_difference(const LameMaterial& mat, double omega, const Vec3& r, int k, int l, double h) {
  auto K = [&](const Vec3& x) { return omega == 0.0 ? Mat3c(kelvin(mat, x).cast<cplx>()) : kupradze(mat, omega, x); };
  const Vec3 ek = Vec3::Unit(k) * h, el = Vec3::Unit(l) * h;
  if (k == l) return (K(r + ek) - 2.0 * K(r) + K(r - ek)) / (h * h);
  return (K(r + ek + el) - K(r + ek - el) - K(r - ek + el) + K(r - ek - el)) / (4.0 * h * h);
}

}  // namespace

double kernel_lame_residual(const LameMaterial& mat, double omega, const Vec3& r, double h_rel) {
  const double h = h_rel * r.norm();
  Mat3c d2[3][3];
  for (int k = 0; k < 3; ++k)
    for (int l = k; l < 3; ++l) {
      d2[k][l] = (4.0 * second_difference(mat, omega, r, k, l, h) - second_difference(mat, omega, r, k, l, 2 * h)) / 3.0;
      d2[l][k] = d2[k][l];
    }
  const Mat3c u = omega == 0.0 ? Mat3c(kelvin(mat, r).cast<cplx>()) : kupradze(mat, omega, r);
  double worst = 0;
  for (int j = 0; j < 3; ++j) {
    Eigen::Vector3cd lap = Eigen::Vector3cd::Zero(), gdiv = Eigen::Vector3cd::Zero();
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) {
        lap(i) += d2[k][k](i, j);
        gdiv(i) += d2[i][k](k, j);
      }
    const Eigen::Vector3cd w2u = omega * omega * u.col(j);
    const Eigen::Vector3cd res = mat.mu * lap + (mat.lambda + mat.mu) * gdiv + w2u;
    const double scale = mat.mu * lap.norm() + std::abs(mat.lambda + mat.mu) * gdiv.norm() + w2u.norm();
    worst = std::max(worst, res.norm() / scale);
  }
  return worst;
}

JumpReport jump_reconstruction(const LameMaterial& mat, const SurfaceContext& ctx, const VecX& phi, double band,
                               int stride, double h_rel) {
  const SurfaceMesh& m = ctx.mesh();
  const double d = m.rod.delta, h0 = h_rel * d;
  std::vector<int> nodes;
  for (int ia = 0; ia < m.res.n_axial; ia += stride)
    if (std::abs(m.axial_nodes[ia]) <= m.rod.L / 2 - band * d)
      for (int it = 0; it < m.res.n_theta; ++it) nodes.push_back(m.lateral_index(ia, it));
  std::vector<double> err(nodes.size()), ref(nodes.size());
  parallel_for(static_cast<int>(nodes.size()), ctx.threads(), [&](int q, int) {
    const SurfacePoint& p = m.nodes[nodes[q]];
    auto jump = [&](double h) {
      return Vec3(single_layer_traction(mat, ctx, phi, p.position + h * p.normal, p.normal) -
                  single_layer_traction(mat, ctx, phi, p.position - h * p.normal, p.normal));
    };
    const Vec3 rec = 2.0 * jump(h0) - jump(2.0 * h0);
    const Vec3 f = phi.segment<3>(3 * nodes[q]);
    err[q] = m.weights[nodes[q]] * (rec - f).squaredNorm();
    ref[q] = m.weights[nodes[q]] * f.squaredNorm();
  });
  double e = 0, r = 0;
  for (size_t q = 0; q < nodes.size(); ++q) e += err[q], r += ref[q];
  return {std::sqrt(e / r), static_cast<int>(nodes.size())};
}

ExpansionReport omega_expansion(const LameMaterial& mat, const SurfaceContext& ctx, const std::vector<double>& omegas,
                                const std::vector<VecX>& densities) {
  const SurfaceMesh& m = ctx.mesh();
  const int n = m.size();
  MatXc phi(3 * n, static_cast<int>(densities.size()));
  for (size_t c = 0; c < densities.size(); ++c) phi.col(c) = densities[c].cast<cplx>();
  const cplx a3 = alpha3(mat);
  ExpansionReport rep;
  rep.omega = omegas;
  for (double w : omegas) {
    const cplx wc(w, 0.0);
    MatXc rs(3 * n, phi.cols()), rk(3 * n, phi.cols());
    std::vector<RowBlock<cplx>> rows(ctx.threads());
    parallel_for(n, ctx.threads(), [&](int i, int tid) {
      const Vec3 x = m.nodes[i].position, nu = m.nodes[i].normal;
      const auto ks = [&](const Vec3& y, const Vec3&) -> Mat3c {
        const Vec3 r = x - y;
        Mat3c v = kupradze_c(mat, wc, r) - kelvin(mat, r).cast<cplx>() - (w * w) * gamma2(mat, r).cast<cplx>();
        v.diagonal().array() -= w * a3;
        return v;
      };
      integrate_row<cplx>(m, ctx.interp(), ks, x, i, ctx.options(), rows[tid], ctx.sizes());
      rs.middleRows<3>(3 * i) = rows[tid] * phi;
      const auto kk = [&](const Vec3& y, const Vec3&) -> Mat3c {
        const Vec3 r = x - y;
        if (r.norm() == 0.0) return Mat3c::Zero();
        return traction_kupradze(mat, wc, r, nu) - traction_kernel(mat, r, nu, KernelKind::Kelvin).cast<cplx>() -
               (w * w) * traction_kernel(mat, r, nu, KernelKind::Gamma2).cast<cplx>();
      };
      integrate_row<cplx>(m, ctx.interp(), kk, x, i, ctx.options(), rows[tid], ctx.sizes());
      rk.middleRows<3>(3 * i) = rows[tid] * phi;
    });
    double s = 0, k = 0;
    for (int c = 0; c < phi.cols(); ++c) {
      s += weighted_l2(m, rs.col(c));
      k += weighted_l2(m, rk.col(c));
    }
    rep.res_s.push_back(s);
    rep.res_k.push_back(k);
  }
  rep.fit_s = fit_loglog(rep.omega, rep.res_s);
  rep.fit_k = fit_loglog(rep.omega, rep.res_k);
  return rep;
}

HStarRatio hstar_e1_ratio(const LameMaterial& mat, const SurfaceContext& ctx) {
  const SurfaceMesh& m = ctx.mesh();
  VecX e1 = VecX::Zero(3 * m.size());
  for (int i = 0; i < m.size(); ++i) e1(3 * i) = 1.0;
  HStarRatio r;
  const double nrm = hstar_norm(mat, ctx, e1);
  r.discrete = nrm * nrm;
  const double d = m.rod.delta;
  r.predicted = 8.0 * kPi * kPi * d * d * std::abs(std::log(d)) * (-(alpha1(mat) + alpha2(mat))) * m.rod.L;
  r.ratio = r.discrete / r.predicted;
  return r;
}

OracleComparison compare_oracle(const LameMaterial& mat, cplx c, double omega, const BackgroundField& H0,
                                const BackgroundField& H1, const RodGeometry& rod, const MeshResolution& res,
                                double ring_factor, int ring_points, int threads) {
  OracleComparison out;
  std::vector<Vec3> ring(ring_points);
  for (int i = 0; i < ring_points; ++i) {
    const double t = 2 * kPi * (i + 0.5) / ring_points;
    ring[i] = Vec3(0.0, ring_factor * rod.delta * std::cos(t), ring_factor * rod.delta * std::sin(t));
  }
  if (c == cplx(1.0, 0.0)) {
    // no inclusion: both fields vanish identically
    for (const Vec3& x : ring) out.rows.push_back({x, Eigen::Vector3cd::Zero(), Eigen::Vector3cd::Zero()});
    return out;
  }
  const Contrast k = contrast(c);
  SurfaceContext ctx(mesh_surface(rod, res.n_axial, res.n_theta, res.n_cap), {}, threads);
  out.unknowns = ctx.unknowns();
  const TransmissionResult sol = solve_transmission(mat, k, omega, ctx, H0, H1);
  out.cond_estimate = sol.cond_estimate;
  out.rows.resize(ring.size());
  parallel_for(ring_points, ctx.threads(), [&](int i, int) {
    Eigen::Vector3cd num;
    if (omega == 0.0) {
      const VecX re = sol.psi.real(), im = sol.psi.imag();
      num = single_layer(mat, ctx, re, ring[i]).cast<cplx>() + cplx(0, 1) * single_layer(mat, ctx, im, ring[i]).cast<cplx>();
    } else {
      num = single_layer(mat, omega, ctx, sol.psi, ring[i]);
    }
    out.rows[i] = {ring[i], num, scattered_field(rod, mat, k, omega, H0, H1, ring[i])};
  });
  out.rel_l2 = relative_l2(out.rows);
  return out;
}

}  // namespace nanorod
