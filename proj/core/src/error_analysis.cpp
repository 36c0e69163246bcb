#include "asplat/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "asplat/errors.hpp"
#include "asplat/parallel.hpp"
#include "asplat/rng.hpp"

namespace asplat {

double true_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x, double sigma) {
  const double t = x / sigma;
  return std::exp(-0.5 * t * t) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

void require_sigma(double sigma) {
  if (!(sigma >= kMinSigma && sigma <= kMaxSigma))
    throw DomainError("sigma must lie in [0.3, 6.6], got " + std::to_string(sigma));
}

SymMat2 rotated_cov(double theta, double s1, double s2) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * c * s1 * s1 + s * s * s2 * s2, c * s * (s1 * s1 - s2 * s2), s * s * s1 * s1 + c * c * s2 * s2};
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

double quad_1d(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

double window_truth_1d(double x, double sigma) {
  return quad_1d([sigma](double t) { return normal_pdf(t, sigma); }, x - 0.5, x + 0.5);
}

double mc_2d(const SymMat2& cov, Vec2 offset, std::uint64_t seed, int n) {
  const Conic2 conic = conic_from_cov(cov);
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(cov.det()));
  const CounterRng rng(seed, 0x3C2D);
  double sum = 0.0;
  std::uint64_t counter = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double px = offset.x - 0.5 + (i + rng.uniform_at(counter++)) / n;
      const double py = offset.y - 0.5 + (j + rng.uniform_at(counter++)) / n;
      sum += std::exp(-0.5 * (conic.a * px * px + 2.0 * conic.b * px * py + conic.c * py * py));
    }
  return norm * sum / (static_cast<double>(n) * n);
}

double scheme_window_1d(const ShadeScheme& scheme, double x, double sigma) {
  switch (scheme.kind) {
    case ShadeScheme::Kind::Analytic:
      return window_integral_1d(x, sigma);
    case ShadeScheme::Kind::CenterSample:
      return normal_pdf(x, sigma);
    case ShadeScheme::Kind::SuperSample: {
      const int n = scheme.samples;
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += normal_pdf(x + (i + 0.5) / n - 0.5, sigma);
      return sum / n;
    }
    case ShadeScheme::Kind::Prefilter:
      return normal_pdf(x, std::sqrt(sigma * sigma + scheme.sigma_w * scheme.sigma_w));
  }
  return 0.0;
}

double scheme_window_2d(const ShadeScheme& scheme, const SymMat2& cov, Vec2 offset) {
  Gaussian2D g;
  g.cov = cov;
  const double to_normalized = 1.0 / (2.0 * std::numbers::pi * std::sqrt(cov.det()));
  if (scheme.kind == ShadeScheme::Kind::Analytic) {
    // Unclamped, so the comparison sees the raw approximation error.
    double raw = 0.0;
    analytic_response(eigendecompose(cov), offset, false, &raw);
    return raw * to_normalized;
  }
  return shade(offset, g, scheme) * to_normalized;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 0) return out;
  if (n == 1) return {lo};
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out.push_back(std::exp(a + (b - a) * i / (n - 1)));
  out.front() = lo;
  out.back() = hi;
  return out;
}

const ErrorCurve::Row& ErrorCurve::at(double param, const std::string& scheme) const {
  for (const Row& r : rows)
    if (r.scheme == scheme && std::abs(r.param - param) <= 1e-12 * std::max(1.0, std::abs(param))) return r;
  throw std::out_of_range("no curve row for " + scheme + " at " + format_g(param));
}

std::string ErrorCurve::to_csv() const {
  std::string out = "param,scheme,max_error,mean_error\n";
  for (const Row& r : rows)
    out += format_g(r.param) + "," + r.scheme + "," + format_g(r.max_error) + "," + format_g(r.mean_error) + "\n";
  return out;
}

ErrorCurve e_cdf_curve(const std::vector<double>& sigmas) {
  for (double s : sigmas) require_sigma(s);
  ErrorCurve curve;
  curve.param_name = "sigma";
  curve.schemes = {"logistic"};
  curve.rows.resize(sigmas.size());
  parallel_for(sigmas.size(), [&](std::size_t i) {
    const double sigma = sigmas[i];
    double mx = 0.0;
    double sum = 0.0;
    constexpr int steps = 6000;
    for (int k = 0; k <= steps; ++k) {
      const double x = k * 1e-3;
      const double e = std::abs(logistic_cdf_scaled(x, sigma) - true_cdf(x / sigma));
      mx = std::max(mx, e);
      sum += e;
    }
    curve.rows[i] = {sigma, "logistic", mx, sum / (steps + 1)};
  });
  return curve;
}

ErrorCurve e_int_curve(const std::vector<double>& sigmas, const std::vector<ShadeScheme>& schemes) {
  for (double s : sigmas) require_sigma(s);
  ErrorCurve curve;
  curve.param_name = "sigma";
  for (const ShadeScheme& s : schemes) curve.schemes.push_back(s.label());
  curve.rows.resize(sigmas.size() * schemes.size());
  parallel_for(sigmas.size(), [&](std::size_t i) {
    const double sigma = sigmas[i];
    const int steps = static_cast<int>(std::floor(3.0 * sigma / 1e-3 + 1e-9));
    std::vector<double> mx(schemes.size(), 0.0);
    std::vector<double> sum(schemes.size(), 0.0);
    for (int k = 0; k <= steps; ++k) {
      const double x = k * 1e-3;
      const double truth = window_truth_1d(x, sigma);
      for (std::size_t s = 0; s < schemes.size(); ++s) {
        const double e = std::abs(scheme_window_1d(schemes[s], x, sigma) - truth);
        mx[s] = std::max(mx[s], e);
        sum[s] += e;
      }
    }
    for (std::size_t s = 0; s < schemes.size(); ++s)
      curve.rows[i * schemes.size() + s] = {sigma, curve.schemes[s], mx[s], sum[s] / (steps + 1)};
  });
  return curve;
}

ErrorCurve rotation_error_curve(const std::vector<double>& angles_deg,
                                const std::vector<std::pair<double, double>>& sigma_pairs,
                                const std::vector<ShadeScheme>& schemes, std::uint64_t seed) {
  for (double a : angles_deg)
    if (!(a >= 0.0 && a <= 45.0)) throw DomainError("rotation angle must lie in [0, 45] degrees");
  for (auto [s1, s2] : sigma_pairs) {
    require_sigma(s1);
    require_sigma(s2);
    if (s2 > s1) throw DomainError("sigma pairs must satisfy sigma1 >= sigma2");
  }

  ErrorCurve curve;
  curve.param_name = "angle_deg";
  for (const ShadeScheme& s : schemes) curve.schemes.push_back(s.label());

  struct Job {
    double angle;
    double s1;
    double s2;
  };
  std::vector<Job> jobs;
  for (double a : angles_deg)
    for (auto [s1, s2] : sigma_pairs) jobs.push_back({a, s1, s2});

  const std::size_t ns = schemes.size();
  std::vector<ErrorCurve::Row> rows(jobs.size() * ns);
  parallel_for(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    const double theta = job.angle * std::numbers::pi / 180.0;
    const SymMat2 cov = rotated_cov(theta, job.s1, job.s2);
    const Vec2 a1{std::cos(theta), std::sin(theta)};
    const Vec2 a2{-std::sin(theta), std::cos(theta)};
    std::vector<double> mx(ns, 0.0);
    std::vector<double> sum(ns, 0.0);
    int count = 0;
    for (int q = -6; q <= 6; ++q)
      for (int p = -6; p <= 6; ++p) {
        if (p * p + q * q > 36) continue;  // within 3 sigma
        const Vec2 offset = a1 * (0.5 * p * job.s1) + a2 * (0.5 * q * job.s2);
        const double truth = mc_2d(cov, offset, seed);
        for (std::size_t s = 0; s < ns; ++s) {
          const double e = std::abs(scheme_window_2d(schemes[s], cov, offset) - truth);
          mx[s] = std::max(mx[s], e);
          sum[s] += e;
        }
        ++count;
      }
    const std::string pair = "@" + format_g(job.s1) + "/" + format_g(job.s2);
    for (std::size_t s = 0; s < ns; ++s) rows[j * ns + s] = {job.angle, curve.schemes[s] + pair, mx[s], sum[s] / count};
  });
  curve.rows = std::move(rows);
  return curve;
}

std::vector<ShadeScheme> default_error_schemes() {
  return {ShadeScheme::analytic(), ShadeScheme::center(), ShadeScheme::supersample(2), ShadeScheme::prefilter(0.1)};
}

}  // namespace asplat
