// Copyright 2026 The lnest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lnest/channel.hpp"

#include <cmath>
#include <string>

#include "lnest/rng.hpp"

namespace lnest {

namespace {

constexpr double kValidityMargin = 1e-12;
constexpr double kTraceTol = 1e-8;

ComplexMatrix identity(int n) { return ComplexMatrix::Identity(n, n); }

// Five-point forward Richardson estimate of a closure derivative. Forward
// stencils keep every probe inside eps >= 0.
template <class F>
ComplexMatrix numeric_derivative(F f, const ParamVector& eps, int nu) {
  const double h = 1e-4 * std::max(1e-3, eps.cwiseAbs().maxCoeff());
  auto stencil = [&](double step) {
    ParamVector e1 = eps, e2 = eps;
    e1(nu) += step;
    e2(nu) += 2.0 * step;
    return ComplexMatrix((-3.0 * f(eps) + 4.0 * f(e1) - f(e2)) / (2.0 * step));
  };
  return (4.0 * stencil(0.5 * h) - stencil(h)) / 3.0;
}

struct SqrtParts {
  HermitianSpectrum x;   // of sum eps S_mu
  HermitianSpectrum k;   // of sum eps G_mu
  ComplexMatrix r_dev;   // sqrt(1 - X) - 1
  ComplexMatrix u_dev;   // exp(-i K) - 1
  ComplexMatrix r, u;
  bool has_generators = false;
};

SqrtParts sqrt_parts(const LowNoiseChannel& ch, const ParamVector& eps) {
  const int n = ch.dim();
  SqrtParts p;
  ComplexMatrix xm = ComplexMatrix::Zero(n, n);
  for (int mu = 0; mu < ch.num_params(); ++mu) xm += eps(mu) * ch.dissipator_weight(mu);
  p.x = hermitian_eigendecompose_sym(xm);
  if (1.0 - p.x.values(0) < kValidityMargin)
    throw Error(ErrorCode::TPCPViolation,
                "1 - sum eps M^dag M is not positive (largest eigenvalue " +
                    std::to_string(p.x.values(0)) + ")");
  p.r_dev = hermitian_function(p.x, [](double x) {
    return cplx(-x / (1.0 + std::sqrt(1.0 - x)));
  });
  p.r = identity(n) + p.r_dev;
  p.has_generators = !ch.generators().empty();
  if (p.has_generators) {
    ComplexMatrix km = ComplexMatrix::Zero(n, n);
    for (int mu = 0; mu < ch.num_params(); ++mu) km += eps(mu) * ch.generators()[mu];
    p.k = hermitian_eigendecompose_sym(km);
    p.u_dev = hermitian_function(p.k, [](double k) {
      return cplx(0.0, -2.0 * std::sin(0.5 * k)) * std::exp(cplx(0.0, -0.5 * k));
    });
  } else {
    p.u_dev = ComplexMatrix::Zero(n, n);
  }
  p.u = identity(n) + p.u_dev;
  return p;
}

// Daleckii-Krein: derivative of f(A) along dA is V (F o V^dag dA V) V^dag with
// F the first divided differences of f on the spectrum of A.
template <class DD>
ComplexMatrix frechet(const HermitianSpectrum& sp, const ComplexMatrix& da, DD dd) {
  const auto& v = sp.vectors;
  ComplexMatrix t = v.adjoint() * da * v;
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    for (Eigen::Index j = 0; j < t.cols(); ++j)
      t(i, j) *= dd(sp.values(i), sp.values(j));
  return v * t * v.adjoint();
}

}  // namespace

void check_params(const ParamVector& eps, int D) {
  if (eps.size() != D)
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(D) +
                                                  " parameters, got " +
                                                  std::to_string(eps.size()));
  for (Eigen::Index k = 0; k < eps.size(); ++k)
    if (!std::isfinite(eps(k)) || eps(k) < 0.0)
      throw Error(ErrorCode::InvalidArgument, "parameters must be finite and >= 0");
}

LowNoiseChannel LowNoiseChannel::sqrt_completion(int dim, int D, std::vector<CTerm> c_terms,
                                                 std::vector<ComplexMatrix> generators,
                                                 bool validate) {
  if (dim < 1 || D < 1) throw Error(ErrorCode::InvalidArgument, "dim and D must be >= 1");
  if (!generators.empty() && static_cast<int>(generators.size()) != D)
    throw Error(ErrorCode::DimensionMismatch, "need one generator per parameter");
  LowNoiseChannel ch;
  ch.dim_ = dim;
  ch.D_ = D;
  ch.builder_ = Builder::SqrtCompletion;
  ch.c_terms_ = std::move(c_terms);
  for (auto& g : generators) {
    if (g.rows() != dim || g.cols() != dim)
      throw Error(ErrorCode::DimensionMismatch, "generator has the wrong size");
    if (!is_hermitian(g, 1e-12))
      throw Error(ErrorCode::NonHermitian, "generator is not Hermitian");
    g = hermitian_part(g);
  }
  ch.generators_ = std::move(generators);
  ch.finalize();
  BTerm b;
  b.kappa = 1.0;
  for (int mu = 0; mu < D; ++mu) {
    ComplexMatrix nm = 0.5 * ch.s_mu_[mu];
    if (!ch.generators_.empty()) nm += cplx(0.0, 1.0) * ch.generators_[mu];
    b.linear.push_back(nm);
  }
  ch.b_terms_ = {b};
  ch.finalize();
  if (validate) ch.validate();
  return ch;
}

LowNoiseChannel LowNoiseChannel::explicit_form(int dim, int D, std::vector<BTerm> b_terms,
                                               std::vector<CTerm> c_terms, HigherFn higher_b,
                                               HigherFn higher_c, HigherDerivFn d_higher_b,
                                               HigherDerivFn d_higher_c, bool validate) {
  if (dim < 1 || D < 1) throw Error(ErrorCode::InvalidArgument, "dim and D must be >= 1");
  LowNoiseChannel ch;
  ch.dim_ = dim;
  ch.D_ = D;
  ch.builder_ = Builder::Explicit;
  ch.b_terms_ = std::move(b_terms);
  ch.c_terms_ = std::move(c_terms);
  for (const auto& b : ch.b_terms_) {
    if (static_cast<int>(b.linear.size()) != D)
      throw Error(ErrorCode::DimensionMismatch, "B-term needs one linear operator per parameter");
    for (const auto& nm : b.linear)
      if (nm.rows() != dim || nm.cols() != dim)
        throw Error(ErrorCode::DimensionMismatch, "B-term operator has the wrong size");
  }
  ch.higher_b_ = std::move(higher_b);
  ch.higher_c_ = std::move(higher_c);
  ch.d_higher_b_ = std::move(d_higher_b);
  ch.d_higher_c_ = std::move(d_higher_c);
  ch.finalize();
  if (validate) ch.validate();
  return ch;
}

void LowNoiseChannel::finalize() {
  s_mu_.assign(D_, ComplexMatrix::Zero(dim_, dim_));
  for (const auto& c : c_terms_) {
    if (c.mu < 0 || c.mu >= D_)
      throw Error(ErrorCode::DimensionMismatch, "C-term parameter index out of range");
    if (c.base.rows() != dim_ || c.base.cols() != dim_)
      throw Error(ErrorCode::DimensionMismatch, "C-term operator has the wrong size");
    s_mu_[c.mu] += c.base.adjoint() * c.base;
  }
  hamiltonians_.assign(D_, ComplexMatrix::Zero(dim_, dim_));
  hermiticity_defect_ = 0.0;
  for (int mu = 0; mu < D_; ++mu) {
    ComplexMatrix acc = -0.5 * s_mu_[mu];
    for (const auto& b : b_terms_) acc += std::conj(b.kappa) * b.linear[mu];
    ComplexMatrix h = acc / cplx(0.0, 1.0);
    hermiticity_defect_ = std::max(hermiticity_defect_, hermiticity_residual(h));
    hamiltonians_[mu] = hermitian_part(h);
  }
}

std::vector<int> LowNoiseChannel::k_mu() const {
  std::vector<int> k(D_, 0);
  for (const auto& c : c_terms_) ++k[c.mu];
  return k;
}

void LowNoiseChannel::validate() const {
  double ksum = 0.0;
  for (const auto& b : b_terms_) ksum += std::norm(b.kappa);
  if (std::abs(ksum - 1.0) > 1e-12)
    throw Error(ErrorCode::InconsistentKrausData,
                "sum |kappa|^2 = " + std::to_string(ksum) + ", expected 1");
  for (std::size_t i = 0; i < c_terms_.size(); ++i) {
    const auto& a = c_terms_[i].base;
    if (a.norm() == 0.0)
      throw Error(ErrorCode::InconsistentKrausData, "C-term operator vanishes");
    for (std::size_t j = 0; j < i; ++j) {
      if (c_terms_[j].mu != c_terms_[i].mu) continue;
      const auto& b = c_terms_[j].base;
      const double overlap = std::abs((b.adjoint() * a).trace());
      if (overlap >= (1.0 - 1e-10) * a.norm() * b.norm())
        throw Error(ErrorCode::InconsistentKrausData,
                    "two C-terms of one parameter are proportional");
    }
  }
  for (int mu = 0; mu < D_; ++mu) hamiltonian_part(*this, mu);
  const double idr = identity_limit_residual(*this);
  if (idr > 1e-12)
    throw Error(ErrorCode::InconsistentKrausData,
                "channel at eps = 0 is not the identity (residual " + std::to_string(idr) + ")");
}

KrausEval LowNoiseChannel::kraus(const ParamVector& eps) const {
  check_params(eps, D_);
  KrausEval out;
  if (builder_ == Builder::SqrtCompletion) {
    auto p = sqrt_parts(*this, eps);
    out.kappa = {1.0};
    // (U - 1)(R - 1) + (U - 1) + (R - 1)
    out.b_dev = {p.has_generators ? ComplexMatrix(p.u_dev * p.r_dev + p.u_dev + p.r_dev)
                                  : p.r_dev};
    for (const auto& c : c_terms_) out.c.push_back(c.base);
    return out;
  }
  for (std::size_t a = 0; a < b_terms_.size(); ++a) {
    const auto& b = b_terms_[a];
    ComplexMatrix e = ComplexMatrix::Zero(dim_, dim_);
    for (int mu = 0; mu < D_; ++mu)
      if (eps(mu) != 0.0) e -= eps(mu) * b.linear[mu];
    if (higher_b_) e += higher_b_(eps, a);
    out.kappa.push_back(b.kappa);
    out.b_dev.push_back(e);
  }
  for (std::size_t t = 0; t < c_terms_.size(); ++t) {
    ComplexMatrix c = c_terms_[t].base;
    if (higher_c_) c += higher_c_(eps, t);
    out.c.push_back(c);
  }
  return out;
}

KrausEval LowNoiseChannel::kraus_derivative(const ParamVector& eps, int nu) const {
  check_params(eps, D_);
  if (nu < 0 || nu >= D_) throw Error(ErrorCode::InvalidArgument, "parameter index out of range");
  KrausEval out;
  if (builder_ == Builder::SqrtCompletion) {
    auto p = sqrt_parts(*this, eps);
    ComplexMatrix dr = frechet(p.x, s_mu_[nu], [](double xi, double xj) {
      return cplx(-1.0 / (std::sqrt(1.0 - xi) + std::sqrt(1.0 - xj)));
    });
    ComplexMatrix db = p.u * dr;
    if (p.has_generators) {
      ComplexMatrix du = frechet(p.k, generators_[nu], [](double ki, double kj) {
        const double d = 0.5 * (ki - kj);
        const double sinc = std::abs(d) < 1e-8 ? 1.0 - d * d / 6.0 : std::sin(d) / d;
        return cplx(0.0, -1.0) * std::exp(cplx(0.0, -0.5 * (ki + kj))) * sinc;
      });
      db += du * p.r;
    }
    out.kappa = {1.0};
    out.b_dev = {db};
    for (std::size_t t = 0; t < c_terms_.size(); ++t)
      out.c.push_back(ComplexMatrix::Zero(dim_, dim_));
    return out;
  }
  for (std::size_t a = 0; a < b_terms_.size(); ++a) {
    ComplexMatrix d = -b_terms_[a].linear[nu];
    if (higher_b_) {
      if (d_higher_b_)
        d += d_higher_b_(eps, a, nu);
      else
        d += numeric_derivative([&](const ParamVector& e) { return higher_b_(e, a); }, eps, nu);
    }
    out.kappa.push_back(b_terms_[a].kappa);
    out.b_dev.push_back(d);
  }
  for (std::size_t t = 0; t < c_terms_.size(); ++t) {
    ComplexMatrix d = ComplexMatrix::Zero(dim_, dim_);
    if (higher_c_) {
      if (d_higher_c_)
        d = d_higher_c_(eps, t, nu);
      else
        d = numeric_derivative([&](const ParamVector& e) { return higher_c_(e, t); }, eps, nu);
    }
    out.c.push_back(d);
  }
  return out;
}

LowNoiseChannel LowNoiseChannel::ancilla_extended() const {
  const ComplexMatrix one = identity(dim_);
  LowNoiseChannel ext;
  ext.dim_ = dim_ * dim_;
  ext.D_ = D_;
  ext.builder_ = builder_;
  for (const auto& b : b_terms_) {
    BTerm nb;
    nb.kappa = b.kappa;
    for (const auto& nm : b.linear) nb.linear.push_back(tensor_product(nm, one));
    ext.b_terms_.push_back(nb);
  }
  for (const auto& c : c_terms_) ext.c_terms_.push_back({c.mu, tensor_product(c.base, one)});
  for (const auto& g : generators_) ext.generators_.push_back(tensor_product(g, one));
  auto wrap = [one](HigherFn f) -> HigherFn {
    if (!f) return {};
    return [f, one](const ParamVector& e, std::size_t i) { return tensor_product(f(e, i), one); };
  };
  auto wrap_d = [one](HigherDerivFn f) -> HigherDerivFn {
    if (!f) return {};
    return [f, one](const ParamVector& e, std::size_t i, int nu) {
      return tensor_product(f(e, i, nu), one);
    };
  };
  ext.higher_b_ = wrap(higher_b_);
  ext.higher_c_ = wrap(higher_c_);
  ext.d_higher_b_ = wrap_d(d_higher_b_);
  ext.d_higher_c_ = wrap_d(d_higher_c_);
  ext.finalize();
  return ext;
}

namespace {

ComplexMatrix deviation_unchecked(const LowNoiseChannel& ch, const ComplexMatrix& rho,
                                  const ParamVector& eps) {
  if (rho.rows() != ch.dim() || rho.cols() != ch.dim())
    throw Error(ErrorCode::DimensionMismatch, "state dimension does not match the channel");
  const auto k = ch.kraus(eps);
  ComplexMatrix out = ComplexMatrix::Zero(ch.dim(), ch.dim());
  double ksum = 0.0;
  for (std::size_t a = 0; a < k.kappa.size(); ++a) {
    const ComplexMatrix& e = k.b_dev[a];
    ComplexMatrix er = e * rho;
    out += k.kappa[a] * er.adjoint() + std::conj(k.kappa[a]) * er + er * e.adjoint();
    ksum += std::norm(k.kappa[a]);
  }
  out += (ksum - 1.0) * rho;
  const auto& terms = ch.c_terms();
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const double w = eps(terms[t].mu);
    if (w == 0.0) continue;
    out += w * k.c[t] * rho * k.c[t].adjoint();
  }
  return hermitian_part(out);
}

}  // namespace

ComplexMatrix output_deviation(const LowNoiseChannel& ch, const ComplexMatrix& rho,
                               const ParamVector& eps) {
  ComplexMatrix d = deviation_unchecked(ch, rho, eps);
  const double tr = d.trace().real() + rho.trace().real() - 1.0;
  if (std::abs(d.trace().real()) > kTraceTol || std::abs(tr) > kTraceTol)
    throw Error(ErrorCode::TPCPViolation,
                "output trace deviates from 1 by " + std::to_string(tr));
  return d;
}

ComplexMatrix apply_channel(const LowNoiseChannel& ch, const ComplexMatrix& rho,
                            const ParamVector& eps) {
  return rho + output_deviation(ch, rho, eps);
}

double tpcp_residual(const LowNoiseChannel& ch, const ParamVector& eps) {
  const int n = ch.dim();
  const auto k = ch.kraus(eps);
  ComplexMatrix acc = ComplexMatrix::Zero(n, n);
  double ksum = 0.0;
  for (std::size_t a = 0; a < k.kappa.size(); ++a) {
    const ComplexMatrix& e = k.b_dev[a];
    acc += std::conj(k.kappa[a]) * e + k.kappa[a] * e.adjoint() + e.adjoint() * e;
    ksum += std::norm(k.kappa[a]);
  }
  acc += (ksum - 1.0) * identity(n);
  const auto& terms = ch.c_terms();
  for (std::size_t t = 0; t < terms.size(); ++t)
    acc += eps(terms[t].mu) * k.c[t].adjoint() * k.c[t];
  return acc.norm();
}

double identity_limit_residual(const LowNoiseChannel& ch) {
  const int n = ch.dim();
  const ParamVector zero = ParamVector::Zero(ch.num_params());
  std::vector<ComplexMatrix> probes;
  for (int i = 0; i < n; ++i) {
    ComplexMatrix p = ComplexMatrix::Zero(n, n);
    p(i, i) = 1.0;
    probes.push_back(p);
  }
  CounterRng rng(0x1D5EEDull, static_cast<std::uint64_t>(n));
  for (int r = 0; r < 2 * n; ++r) {
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(rng.normal(), rng.normal());
    v.normalize();
    probes.push_back(pure_state(v));
  }
  double worst = 0.0;
  for (const auto& p : probes) worst = std::max(worst, deviation_unchecked(ch, p, zero).norm());
  return worst;
}

ComplexMatrix hamiltonian_part(const LowNoiseChannel& ch, int mu) {
  if (mu < 0 || mu >= ch.num_params())
    throw Error(ErrorCode::InvalidArgument, "parameter index out of range");
  ComplexMatrix acc = -0.5 * ch.dissipator_weight(mu);
  double scale = 1.0 + ch.dissipator_weight(mu).norm();
  for (const auto& b : ch.b_terms()) {
    acc += std::conj(b.kappa) * b.linear[mu];
    scale += b.linear[mu].norm();
  }
  ComplexMatrix h = acc / cplx(0.0, 1.0);
  const double defect = hermiticity_residual(h);
  if (defect > 1e-8 * scale)
    throw Error(ErrorCode::InconsistentKrausData,
                "H_" + std::to_string(mu) + " is not Hermitian (residual " +
                    std::to_string(defect) + ")");
  return hermitian_part(h);
}

ComplexMatrix derivative_at_zero(const LowNoiseChannel& ch, int mu, const ComplexMatrix& rho) {
  if (mu < 0 || mu >= ch.num_params())
    throw Error(ErrorCode::InvalidArgument, "parameter index out of range");
  if (rho.rows() != ch.dim() || rho.cols() != ch.dim())
    throw Error(ErrorCode::DimensionMismatch, "state dimension does not match the channel");
  const ComplexMatrix& s = ch.dissipator_weight(mu);
  ComplexMatrix out = -0.5 * (s * rho + rho * s);
  for (const auto& c : ch.c_terms())
    if (c.mu == mu) out += c.base * rho * c.base.adjoint();
  const ComplexMatrix h = hamiltonian_part(ch, mu);
  out -= cplx(0.0, 1.0) * (h * rho - rho * h);
  return hermitian_part(out);
}

LowNoiseChannel ancilla_extend(const LowNoiseChannel& ch) { return ch.ancilla_extended(); }

ComplexMatrix channel_derivative(const LowNoiseChannel& ch, const ComplexMatrix& rho,
                                 const ParamVector& eps, int nu) {
  if (rho.rows() != ch.dim() || rho.cols() != ch.dim())
    throw Error(ErrorCode::DimensionMismatch, "state dimension does not match the channel");
  const auto k = ch.kraus(eps);
  const auto dk = ch.kraus_derivative(eps, nu);
  const int n = ch.dim();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (std::size_t a = 0; a < k.kappa.size(); ++a) {
    ComplexMatrix b = k.kappa[a] * identity(n) + k.b_dev[a];
    ComplexMatrix x = dk.b_dev[a] * rho * b.adjoint();
    out += x + x.adjoint();
  }
  const auto& terms = ch.c_terms();
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const ComplexMatrix& c = k.c[t];
    if (terms[t].mu == nu) out += c * rho * c.adjoint();
    const double w = eps(terms[t].mu);
    if (w != 0.0 && dk.c[t].norm() != 0.0) {
      ComplexMatrix x = dk.c[t] * rho * c.adjoint();
      out += w * (x + x.adjoint());
    }
  }
  return hermitian_part(out);
}

ComplexMatrix finite_difference_derivative(const LowNoiseChannel& ch, const ComplexMatrix& rho,
                                           int mu, const ParamVector& eps0, double h) {
  check_params(eps0, ch.num_params());
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  auto probe = [&](double shift) {
    ParamVector e = eps0;
    e(mu) += shift;
    try {
      if (tpcp_residual(ch, e) > 1e-8)
        throw Error(ErrorCode::StepTooLarge, "probe point leaves the TPCP region");
      return output_deviation(ch, rho, e);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::TPCPViolation)
        throw Error(ErrorCode::StepTooLarge, err.what());
      throw;
    }
  };
  if (eps0(mu) >= h) return (probe(h) - probe(-h)) / (2.0 * h);
  return (4.0 * probe(h) - 3.0 * probe(0.0) - probe(2.0 * h)) / (2.0 * h);
}

bool is_density_matrix(const ComplexMatrix& rho, double tol) {
  if (rho.rows() != rho.cols() || !is_hermitian(rho, 1e-12)) return false;
  if (std::abs(rho.trace() - cplx(1.0)) > 1e-12) return false;
  return hermitian_eigendecompose_sym(rho).values.minCoeff() >= -tol;
}

ComplexMatrix pure_state(const ComplexVector& phi) { return phi * phi.adjoint(); }

}  // namespace lnest
