#include "substrat/cutoff.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "substrat/error.hpp"

namespace substrat {

CutoffSpec CutoffSpec::scalar(double c, double rho, CutoffShape shape, double lambda) {
  CutoffSpec out;
  out.center = Vec::Constant(1, c);
  out.radius = rho;
  out.shape = shape;
  out.lambda = lambda;
  return out;
}

namespace {

double bump(double q) {
  // q = |x - c|^2 / rho^2.
  if (q >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - q));
}

}  // namespace

double CutoffSpec::operator()(const Vec& x) const {
  if (x.size() != center.size()) fail(ErrorKind::InvalidInput, "cutoff argument has wrong length");
  const double rho = effective_radius();
  if (amplitude == 0.0 || !(rho > 0.0)) return 0.0;
  return amplitude * bump((x - center).squaredNorm() / (rho * rho));
}

double CutoffSpec::operator()(double s) const {
  if (center.size() != 1) fail(ErrorKind::InvalidInput, "scalar evaluation of a vector cutoff");
  const double rho = effective_radius();
  if (amplitude == 0.0 || !(rho > 0.0)) return 0.0;
  const double q = (s - center[0]) / rho;
  return amplitude * bump(q * q);
}

CutoffSpec mirrored(const CutoffSpec& chi) {
  CutoffSpec out = chi;
  out.center = -chi.center;
  return out;
}

Complex cutoff_fourier(const CutoffSpec& chi, double lambda) {
  if (chi.dim() != 1) fail(ErrorKind::InvalidInput, "Fourier transform needs a scalar cutoff");
  const double rho = chi.effective_radius();
  if (chi.amplitude == 0.0 || !(rho > 0.0)) return Complex(0.0, 0.0);
  const double c = chi.center[0];
  // The bump is even about c, so chi-hat = 2 rho e^{-i c lambda}
  // int_0^1 phi(q) cos(rho lambda q) dq. tanh-sinh absorbs the flat
  // essential singularity at q = 1 that slows Gauss rules down.
  const double w = rho * lambda;
  auto f = [w](double q) { return bump(q * q) * std::cos(w * q); };
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  const double I = rule.integrate(f, 0.0, 1.0, 1e-15);
  return 2.0 * rho * chi.amplitude * I * std::exp(Complex(0.0, -c * lambda));
}

Complex multiplier_m(const CutoffSpec& chi, double t, double lambda) {
  return std::exp(Complex(0.0, t * lambda)) * cutoff_fourier(chi, lambda);
}

}  // namespace substrat
