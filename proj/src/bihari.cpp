#include "iins/bihari.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace iins {

namespace {

/// Adaptive Simpson on [a, b].
double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double eps,
                   int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double eps) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, eps, 60);
}

/// Integrate 1/w from u0 to z. For wide ranges substitute s = e^tau so the
/// quadrature grid is logarithmic.
double integrate_inv_w(const std::function<double(double)>& w, double u0, double z,
                       double rel_eps) {
  if (z == u0) return 0.0;
  auto run = [&](double eps) {
    if (u0 > 0.0 && z > 0.0 && z / u0 > 4.0) {
      auto f = [&](double tau) {
        double s = std::exp(tau);
        return s / w(s);
      };
      return adaptive_simpson(f, std::log(u0), std::log(z), eps);
    }
    auto f = [&](double s) { return 1.0 / w(s); };
    return adaptive_simpson(f, u0, z, eps);
  };
  // Two passes: a coarse value fixes the scale, the second meets the relative
  // target with an absolute threshold.
  double rough = std::abs(z - u0) / w(std::min(u0, z));
  double coarse = run(1e-6 * std::max(rough, 1e-30));
  return run(rel_eps * std::max(std::abs(coarse), 1e-30));
}

void validate(const BihariSpec& spec) {
  if (!spec.w) throw std::invalid_argument("bihari: w not set");
  if (spec.u0 <= 0.0) throw std::invalid_argument("bihari: u0 must be positive");
}

}  // namespace

double G_of(const BihariSpec& spec, double z) {
  validate(spec);
  if (z < spec.u0) throw std::domain_error("G_of: z below u0");
  return integrate_inv_w(spec.w, spec.u0, z, 1e-12);
}

double G_inverse(const BihariSpec& spec, double y) {
  validate(spec);
  if (y < 0.0) throw std::domain_error("G_inverse: y must be nonnegative");
  if (y == 0.0) return spec.u0;
  const double cutoff = 1e12;
  double lo = spec.u0, glo = 0.0;
  double hi = spec.u0, ghi = 0.0;
  double span = spec.u0;
  while (ghi < y) {
    lo = hi;
    glo = ghi;
    hi = hi + span;
    span *= 2.0;
    if (hi > cutoff)
      throw std::overflow_error("G_inverse: bound exceeds cutoff 1e12");
    ghi = G_of(spec, hi);
  }
  // Bisection with a secant proposal each iteration; G is strictly increasing.
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    double mid;
    if (ghi > glo) {
      mid = lo + (y - glo) * (hi - lo) / (ghi - glo);
      double lim = 0.1 * (hi - lo);
      mid = std::min(std::max(mid, lo + lim), hi - lim);
    } else {
      mid = 0.5 * (lo + hi);
    }
    double gm = G_of(spec, mid);
    if (std::abs(gm - y) <= 1e-10 * std::max(1.0, std::abs(y))) return mid;
    if (gm < y) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
      ghi = gm;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> bihari_bound(const BihariSpec& spec) {
  validate(spec);
  if (spec.t.size() != spec.g.size())
    throw std::invalid_argument("bihari_bound: t and g size mismatch");
  if (spec.a < spec.u0) throw std::invalid_argument("bihari_bound: a below u0");
  double Ga = G_of(spec, spec.a);
  std::vector<double> out(spec.t.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.t.size(); ++i) {
    if (i > 0) {
      double dt = spec.t[i] - spec.t[i - 1];
      if (dt < 0.0) throw std::invalid_argument("bihari_bound: t not nondecreasing");
      acc += 0.5 * (spec.g[i] + spec.g[i - 1]) * dt;
    }
    out[i] = G_inverse(spec, Ga + acc);
  }
  return out;
}

bool divergence_suspect(const BihariSpec& spec, std::string* note) {
  validate(spec);
  // Compare consecutive dyadic-window contributions near the 1e9 cutoff: for
  // a divergent integral of a nondecreasing w their ratio tends to 1 (even
  // with logarithmic corrections), while any convergent power w ~ s^p with
  // p > 1 gives the constant ratio 2^(1-p) < 1.
  double prev = integrate_inv_w(spec.w, 2.5e8, 5e8, 1e-8);
  double last = integrate_inv_w(spec.w, 5e8, 1e9, 1e-8);
  bool suspect = last < 0.8 * prev || last < 1e-12;
  if (note && suspect)
    *note = "partial integral of 1/w appears convergent near 1e9; the "
            "divergence hypothesis on w may fail";
  return suspect;
}

DecayVerdict decay_detect(const std::vector<double>& t, const std::vector<double>& y,
                          const std::vector<double>& h, double C, double tol) {
  const std::size_t n = y.size();
  if (n < 10 || t.size() != n || h.size() != n)
    throw std::invalid_argument("decay_detect: need >= 10 aligned samples");
  DecayVerdict v;

  auto trapz = [&](std::size_t i0, std::size_t i1) {
    double acc = 0.0;
    for (std::size_t i = i0 + 1; i <= i1; ++i)
      acc += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
    return acc;
  };
  v.integral = trapz(0, n - 1);
  // Integrability heuristic: the last two dyadic windows must not carry as
  // much mass as their predecessors (1/(1+t) stalls at ratio ~1).
  double t0 = t.front(), T = t.back();
  auto idx_at = [&](double tt) {
    std::size_t i = 0;
    while (i + 1 < n && t[i + 1] <= tt) ++i;
    return i;
  };
  std::size_t iq2 = idx_at(t0 + 0.25 * (T - t0));
  std::size_t iq3 = idx_at(t0 + 0.5 * (T - t0));
  double w_mid = trapz(iq2, iq3);
  double w_tail = trapz(iq3, n - 1);
  v.integral_converging = (w_tail <= 0.9 * w_mid) || (w_tail <= tol);

  v.slope_enveloped = true;
  for (std::size_t i = 1; i < n; ++i) {
    double dt = t[i] - t[i - 1];
    if (dt <= 0.0) continue;
    double slope = (y[i] - y[i - 1]) / dt;
    double ym = 0.5 * (y[i] + y[i - 1]);
    double hm = 0.5 * (h[i] + h[i - 1]);
    if (std::abs(slope + hm) > ym * ym + C + 1e-12) {
      v.slope_enveloped = false;
      break;
    }
  }

  v.h_bound = 0.0;
  v.h_bounded = true;
  for (double hv : h) {
    if (!std::isfinite(hv)) v.h_bounded = false;
    v.h_bound = std::max(v.h_bound, std::abs(hv));
  }

  std::size_t tail_start = n - std::max<std::size_t>(1, n / 10);
  v.tail_max = 0.0;
  for (std::size_t i = tail_start; i < n; ++i) v.tail_max = std::max(v.tail_max, y[i]);

  v.hypotheses_ok = v.integral_converging && v.slope_enveloped && v.h_bounded;
  v.decayed = v.hypotheses_ok && v.tail_max <= tol;
  return v;
}

}  // namespace iins
