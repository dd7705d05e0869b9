#include "nanorod/potentials.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>

namespace nanorod {

const char* operator_kind_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::SingleLayer: return "single_layer";
    case OperatorKind::NPStar: return "np_star";
    case OperatorKind::SystemA: return "system_A";
  }
  return "unknown";
}

SurfaceContext::SurfaceContext(SurfaceMesh mesh, NearFieldOptions opt, int threads)
    : mesh_(std::move(mesh)), interp_(mesh_), opt_(opt), sizes_(cell_sizes(mesh_)), threads_(thread_count(threads)) {}

namespace {

void check_size(const SurfaceContext& ctx) {
  if (ctx.unknowns() > kMaxUnknowns)
    throw AssemblyError("dense assembly of " + std::to_string(ctx.unknowns()) + " unknowns exceeds the limit of " +
                        std::to_string(kMaxUnknowns));
}

// make(i) returns the kernel callable for target node i
template <class T, class Make>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> assemble(const SurfaceContext& ctx, const Make& make) {
  check_size(ctx);
  const SurfaceMesh& m = ctx.mesh();
  const int n = m.size();
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> out(3 * n, 3 * n);
  std::vector<RowBlock<T>> rows(ctx.threads());
  parallel_for(n, ctx.threads(), [&](int i, int tid) {
    const auto k = make(i);
    integrate_row<T>(m, ctx.interp(), k, m.nodes[i].position, i, ctx.options(), rows[tid], ctx.sizes());
    out.template middleRows<3>(3 * i) = rows[tid];
  });
  return out;
}

template <class T, class Make>
Eigen::Matrix<T, Eigen::Dynamic, 1> apply(const SurfaceContext& ctx, const Make& make,
                                           const Eigen::Matrix<T, Eigen::Dynamic, 1>& phi) {
  const SurfaceMesh& m = ctx.mesh();
  const int n = m.size();
  Eigen::Matrix<T, Eigen::Dynamic, 1> out(3 * n);
  std::vector<RowBlock<T>> rows(ctx.threads());
  parallel_for(n, ctx.threads(), [&](int i, int tid) {
    const auto k = make(i);
    integrate_row<T>(m, ctx.interp(), k, m.nodes[i].position, i, ctx.options(), rows[tid], ctx.sizes());
    out.template segment<3>(3 * i) = rows[tid] * phi;
  });
  return out;
}

void check_off_surface(const SurfaceMesh& m, const Vec3& x) {
  for (const SurfacePoint& p : m.nodes)
    if ((p.position - x).norm() < 1e-12) throw SingularEvaluationError("evaluation point coincides with a mesh node");
}

template <class Dec>
double cond_from(const Dec& lu) {
  const double rc = lu.rcond();
  return rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
}

}  // namespace

MatX assemble_single_layer(const LameMaterial& mat, const SurfaceContext& ctx) {
  return assemble<double>(ctx, [&](int i) {
    const Vec3 x = ctx.mesh().nodes[i].position;
    return [&mat, x](const Vec3& y, const Vec3&) { return kelvin(mat, x - y); };
  });
}

MatXc assemble_single_layer(const LameMaterial& mat, cplx omega, const SurfaceContext& ctx) {
  return assemble<cplx>(ctx, [&](int i) {
    const Vec3 x = ctx.mesh().nodes[i].position;
    return [&mat, omega, x](const Vec3& y, const Vec3&) { return kupradze_c(mat, omega, x - y); };
  });
}

MatX assemble_np_star(const LameMaterial& mat, const SurfaceContext& ctx) {
  return assemble<double>(ctx, [&](int i) {
    const Vec3 x = ctx.mesh().nodes[i].position, nu = ctx.mesh().nodes[i].normal;
    return [&mat, x, nu](const Vec3& y, const Vec3&) { return traction_kernel(mat, x - y, nu, KernelKind::Kelvin); };
  });
}

MatXc assemble_np_star(const LameMaterial& mat, cplx omega, const SurfaceContext& ctx) {
  return assemble<cplx>(ctx, [&](int i) {
    const Vec3 x = ctx.mesh().nodes[i].position, nu = ctx.mesh().nodes[i].normal;
    return [&mat, omega, x, nu](const Vec3& y, const Vec3&) { return traction_kupradze(mat, omega, x - y, nu); };
  });
}

MatX assemble_gamma2_single(const LameMaterial& mat, const SurfaceContext& ctx) {
  return assemble<double>(ctx, [&](int i) {
    const Vec3 x = ctx.mesh().nodes[i].position;
    return [&mat, x](const Vec3& y, const Vec3&) { return gamma2(mat, x - y); };
  });
}

MatX assemble_gamma2_np(const LameMaterial& mat, const SurfaceContext& ctx) {
  return assemble<double>(ctx, [&](int i) {
    const Vec3 x = ctx.mesh().nodes[i].position, nu = ctx.mesh().nodes[i].normal;
    return [&mat, x, nu](const Vec3& y, const Vec3&) {
      const Vec3 r = x - y;
      if (r.norm() == 0.0) return Mat3(Mat3::Zero());
      return traction_kernel(mat, r, nu, KernelKind::Gamma2);
    };
  });
}

VecX apply_single_layer(const LameMaterial& mat, const SurfaceContext& ctx, const VecX& phi) {
  return apply<double>(
      ctx,
      [&](int i) {
        const Vec3 x = ctx.mesh().nodes[i].position;
        return [&mat, x](const Vec3& y, const Vec3&) { return kelvin(mat, x - y); };
      },
      phi);
}

VecX apply_np_star(const LameMaterial& mat, const SurfaceContext& ctx, const VecX& phi) {
  return apply<double>(
      ctx,
      [&](int i) {
        const Vec3 x = ctx.mesh().nodes[i].position, nu = ctx.mesh().nodes[i].normal;
        return [&mat, x, nu](const Vec3& y, const Vec3&) { return traction_kernel(mat, x - y, nu, KernelKind::Kelvin); };
      },
      phi);
}

VecXc apply_s1(const LameMaterial& mat, const SurfaceMesh& mesh, const VecXc& phi) {
  const cplx a3 = alpha3(mat);
  Eigen::Vector3cd total = Eigen::Vector3cd::Zero();
  for (int j = 0; j < mesh.size(); ++j) total += mesh.weights[j] * phi.segment<3>(3 * j);
  VecXc out(3 * mesh.size());
  for (int i = 0; i < mesh.size(); ++i) out.segment<3>(3 * i) = a3 * total;
  return out;
}

Vec3 single_layer(const LameMaterial& mat, const SurfaceContext& ctx, const VecX& phi, const Vec3& x) {
  check_off_surface(ctx.mesh(), x);
  RowBlock<double> row;
  const auto k = [&mat, &x](const Vec3& y, const Vec3&) { return kelvin(mat, x - y); };
  integrate_row<double>(ctx.mesh(), ctx.interp(), k, x, -1, ctx.options(), row, ctx.sizes());
  return row * phi;
}

Eigen::Vector3cd single_layer(const LameMaterial& mat, double omega, const SurfaceContext& ctx, const VecXc& phi,
                              const Vec3& x) {
  check_off_surface(ctx.mesh(), x);
  RowBlock<cplx> row;
  const cplx w(omega, 0.0);
  const auto k = [&mat, w, &x](const Vec3& y, const Vec3&) { return kupradze_c(mat, w, x - y); };
  integrate_row<cplx>(ctx.mesh(), ctx.interp(), k, x, -1, ctx.options(), row, ctx.sizes());
  return row * phi;
}

Vec3 single_layer_traction(const LameMaterial& mat, const SurfaceContext& ctx, const VecX& phi, const Vec3& x,
                           const Vec3& nu) {
  check_off_surface(ctx.mesh(), x);
  RowBlock<double> row;
  const auto k = [&mat, &x, &nu](const Vec3& y, const Vec3&) {
    return traction_kernel(mat, x - y, nu, KernelKind::Kelvin);
  };
  integrate_row<double>(ctx.mesh(), ctx.interp(), k, x, -1, ctx.options(), row, ctx.sizes());
  return row * phi;
}

VecX sample_field(const SurfaceMesh& mesh, const BackgroundField& f) {
  VecX v(3 * mesh.size());
  for (int i = 0; i < mesh.size(); ++i) v.segment<3>(3 * i) = f.value(mesh.nodes[i].position);
  return v;
}

VecX sample_traction(const LameMaterial& mat, const SurfaceMesh& mesh, const BackgroundField& f) {
  VecX v(3 * mesh.size());
  for (int i = 0; i < mesh.size(); ++i)
    v.segment<3>(3 * i) = field_traction(mat, f, mesh.nodes[i].position, mesh.nodes[i].normal);
  return v;
}

TransmissionResult solve_static_reduced(const MatX& kstar, cplx lambda1, const VecX& traction,
                                        const SolveOptions& opt) {
  TransmissionResult res;
  res.reduced = true;
  if (lambda1.imag() == 0.0) {
    MatX a = -kstar;
    a.diagonal().array() += lambda1.real();
    Eigen::PartialPivLU<MatX> lu(a);
    res.cond_estimate = cond_from(lu);
    if (opt.throw_if_ill_conditioned && res.cond_estimate > kConditionGuard)
      throw IllConditionedError("static transmission system is ill-conditioned", res.cond_estimate);
    res.psi = lu.solve(traction).cast<cplx>();
  } else {
    MatXc a = -kstar.cast<cplx>();
    a.diagonal().array() += lambda1;
    Eigen::PartialPivLU<MatXc> lu(a);
    res.cond_estimate = cond_from(lu);
    if (opt.throw_if_ill_conditioned && res.cond_estimate > kConditionGuard)
      throw IllConditionedError("static transmission system is ill-conditioned", res.cond_estimate);
    res.psi = lu.solve(traction.cast<cplx>());
  }
  return res;
}

TransmissionResult solve_transmission(const LameMaterial& mat, const Contrast& k, double omega,
                                      const SurfaceContext& ctx, const BackgroundField& H0,
                                      const BackgroundField& H1, const SolveOptions& opt) {
  const SurfaceMesh& m = ctx.mesh();
  const int n3 = ctx.unknowns();
  const VecX t0 = sample_traction(mat, m, H0), t1 = sample_traction(mat, m, H1);
  if (omega == 0.0) {
    const MatX kstar = assemble_np_star(mat, ctx);
    return solve_static_reduced(kstar, k.lambda1, t0, opt);
  }
  if (2 * n3 > kMaxUnknowns) throw AssemblyError("block transmission system exceeds the dense size limit");
  const cplx w1 = cplx(omega, 0.0) / std::sqrt(k.c), w2(omega, 0.0);
  MatXc a(2 * n3, 2 * n3);
  a.topLeftCorner(n3, n3) = assemble_single_layer(mat, w1, ctx);
  a.topRightCorner(n3, n3) = -assemble_single_layer(mat, w2, ctx);
  a.bottomLeftCorner(n3, n3) = k.c * assemble_np_star(mat, w1, ctx);
  a.bottomLeftCorner(n3, n3).diagonal().array() -= 0.5 * k.c;
  a.bottomRightCorner(n3, n3) = -assemble_np_star(mat, w2, ctx);
  a.bottomRightCorner(n3, n3).diagonal().array() -= 0.5;
  VecXc rhs(2 * n3);
  rhs.head(n3) = (sample_field(m, H0) + omega * sample_field(m, H1)).cast<cplx>();
  rhs.tail(n3) = (t0 + omega * t1).cast<cplx>();
  Eigen::PartialPivLU<MatXc> lu(a);
  TransmissionResult res;
  res.cond_estimate = cond_from(lu);
  if (opt.throw_if_ill_conditioned && res.cond_estimate > kConditionGuard)
    throw IllConditionedError("transmission block system is ill-conditioned", res.cond_estimate);
  const VecXc sol = lu.solve(rhs);
  res.phi = sol.head(n3);
  res.psi = sol.tail(n3);
  return res;
}

VecX weights3(const SurfaceMesh& mesh) {
  VecX w(3 * mesh.size());
  for (int i = 0; i < mesh.size(); ++i) w.segment<3>(3 * i).setConstant(mesh.weights[i]);
  return w;
}

double hstar_inner(const SurfaceMesh& mesh, const VecX& a, const VecX& s_b) {
  return -(weights3(mesh).array() * a.array() * s_b.array()).sum();
}

double hstar_norm(const LameMaterial& mat, const SurfaceContext& ctx, const VecX& phi) {
  if (phi.isZero(0.0)) return 0.0;
  const double v = hstar_inner(ctx.mesh(), phi, apply_single_layer(mat, ctx, phi));
  if (v < -1e-10) throw AssemblyError("discrete H* inner product is negative: " + std::to_string(v));
  return std::sqrt(std::max(v, 0.0));
}

SpectralReport hstar_spectrum(const MatX& S, const MatX& K, const SurfaceMesh& mesh) {
  const VecX w = weights3(mesh);
  MatX g = -(w.asDiagonal() * S);
  g = 0.5 * (g + g.transpose());
  Eigen::LLT<MatX> llt(g);
  if (llt.info() != Eigen::Success) throw AssemblyError("H* Gram matrix is not positive definite");
  // B = U K U^{-1} with G = U^T U is K* written in an H*-orthonormal basis
  const MatX u = llt.matrixU();
  g.resize(0, 0);
  MatX b = u * K;
  u.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(b);
  SpectralReport rep;
  rep.adjoint_defect = (b - b.transpose()).norm() / b.norm();
  {
    Eigen::SelfAdjointEigenSolver<MatX> ss(0.5 * (b + b.transpose()), Eigen::EigenvaluesOnly);
    rep.sym_min = ss.eigenvalues().minCoeff();
    rep.sym_max = ss.eigenvalues().maxCoeff();
  }
  // K and B are similar; the Schur iteration converges more reliably on K
  Eigen::EigenSolver<MatX> es;
  es.compute(K, false);
  if (es.info() != Eigen::Success) es.compute(b, false);
  if (es.info() != Eigen::Success) throw AssemblyError("eigenvalue iteration for K* did not converge");
  const VecXc ev = es.eigenvalues();
  rep.radius = ev.cwiseAbs().maxCoeff();
  rep.max_imag = ev.imag().cwiseAbs().maxCoeff();
  rep.min_real = ev.real().minCoeff();
  rep.max_real = ev.real().maxCoeff();
  return rep;
}

double rigid_annihilation_residual(const LameMaterial& mat, const SurfaceContext& ctx, const BackgroundField& v) {
  const VecX rhs = sample_field(ctx.mesh(), v);
  VecX phi;
  {
    const MatX s = assemble_single_layer(mat, ctx);
    Eigen::PartialPivLU<MatX> lu(s);
    phi = lu.solve(rhs);
  }
  const VecX r = apply_np_star(mat, ctx, phi) - 0.5 * phi;
  return weighted_l2(ctx.mesh(), r.cast<cplx>()) / weighted_l2(ctx.mesh(), phi.cast<cplx>());
}

EndpointMoments endpoint_moments(const LameMaterial& mat, cplx lambda1, const BackgroundField& H0,
                                 const BackgroundField& H1, double omega, const RodGeometry& rod) {
  const cplx d = lambda1 - 0.5;
  if (std::abs(d) < 1e-13) throw ResonantDenominatorError("lambda1 = 1/2: use the case-4 decomposition");
  const cplx s = kPi * rod.delta * rod.delta / d;
  const auto bracket = [&](const Vec3& x) -> Eigen::Vector3cd {
    return (endpoint_bracket(mat, H0, x) + omega * endpoint_bracket(mat, H1, x)).cast<cplx>();
  };
  return {-s * bracket(rod.P), s * bracket(rod.Q)};
}

Eigen::Vector3cd masked_integral(const SurfaceMesh& mesh, const VecXc& psi, const std::vector<bool>& mask) {
  Eigen::Vector3cd s = Eigen::Vector3cd::Zero();
  for (int i = 0; i < mesh.size(); ++i)
    if (mask[i]) s += mesh.weights[i] * psi.segment<3>(3 * i);
  return s;
}

double weighted_l2(const SurfaceMesh& mesh, const VecXc& v, const std::vector<bool>* mask) {
  double s = 0;
  for (int i = 0; i < mesh.size(); ++i)
    if (!mask || (*mask)[i]) s += mesh.weights[i] * v.segment<3>(3 * i).squaredNorm();
  return std::sqrt(s);
}

VecX smooth_random_density(const SurfaceMesh& mesh, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  // low-order trigonometric modes in the position, one set per component
  constexpr int kModes = 4;
  double a[3][kModes][4];
  for (auto& c : a)
    for (auto& mode : c)
      for (double& v : mode) v = g(rng);
  const double L = mesh.rod.L, d = mesh.rod.delta;
  VecX phi(3 * mesh.size());
  for (int i = 0; i < mesh.size(); ++i) {
    const Vec3& x = mesh.nodes[i].position;
    for (int c = 0; c < 3; ++c) {
      double s = 0;
      for (int k = 0; k < kModes; ++k)
        s += a[c][k][0] * std::cos(kPi * k * x(0) / L + a[c][k][1]) *
             (1.0 + 0.5 * a[c][k][2] * x(1) / d + 0.5 * a[c][k][3] * x(2) / d);
      phi(3 * i + c) = s;
    }
  }
  return phi;
}

namespace {

void write_dump(const std::string& path, const std::string& kind, std::int64_t rows, std::int64_t cols,
                std::int32_t complex_flag, const double* data, std::size_t n_doubles) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open dump file " + path);
  char magic[8] = {'N', 'R', 'D', 'U', 'M', 'P', '1', '\0'};
  char tag[32] = {};
  std::strncpy(tag, kind.c_str(), sizeof(tag) - 1);
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(&rows), 8);
  out.write(reinterpret_cast<const char*>(&cols), 8);
  out.write(reinterpret_cast<const char*>(&complex_flag), 4);
  out.write(tag, 32);
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n_doubles * sizeof(double)));
}

}  // namespace

void dump_binary(const std::string& path, const MatX& m, const std::string& kind) {
  write_dump(path, kind, m.rows(), m.cols(), 0, m.data(), static_cast<std::size_t>(m.size()));
}

void dump_binary(const std::string& path, const MatXc& m, const std::string& kind) {
  write_dump(path, kind, m.rows(), m.cols(), 1, reinterpret_cast<const double*>(m.data()),
             2 * static_cast<std::size_t>(m.size()));
}

MatXc load_binary(const std::string& path, std::string* kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dump file " + path);
  char magic[8];
  std::int64_t rows = 0, cols = 0;
  std::int32_t complex_flag = 0;
  char tag[32];
  in.read(magic, 8);
  if (std::memcmp(magic, "NRDUMP1", 8) != 0) throw std::runtime_error("not a dump file: " + path);
  in.read(reinterpret_cast<char*>(&rows), 8);
  in.read(reinterpret_cast<char*>(&cols), 8);
  in.read(reinterpret_cast<char*>(&complex_flag), 4);
  in.read(tag, 32);
  if (kind) *kind = std::string(tag, strnlen(tag, 32));
  MatXc m(rows, cols);
  if (complex_flag) {
    in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * 16));
  } else {
    MatX r(rows, cols);
    in.read(reinterpret_cast<char*>(r.data()), static_cast<std::streamsize>(r.size() * 8));
    m = r.cast<cplx>();
  }
  if (!in) throw std::runtime_error("truncated dump file: " + path);
  return m;
}

}  // namespace nanorod
