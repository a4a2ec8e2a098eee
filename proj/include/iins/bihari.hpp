#pragma once

#include <functional>
#include <string>
#include <vector>

namespace iins {

/// Integral-inequality bound machinery: from y(t) <= a + int_0^t g(s) w(y(s)) ds
/// with w positive nondecreasing conclude y(t) <= G^{-1}(G(a) + int_0^t g),
/// where G(z) = int_{u0}^z ds / w(s).
struct BihariSpec {
  double a = 1.0;   // initial bound, a >= u0
  double u0 = 1.0;  // reference point for G, w > 0 on [u0, inf)
  std::function<double(double)> w;
  std::vector<double> t;  // nondecreasing sample times
  std::vector<double> g;  // samples of g(t) >= 0
};

/// G(z) = int_{u0}^z ds / w(s), adaptive quadrature, relative error <= 1e-10.
double G_of(const BihariSpec& spec, double z);

/// Monotone inverse: z with G(z) = y, bracketing + bisection/secant, residual
/// 1e-10. Throws std::overflow_error if the bracket exceeds 1e12.
double G_inverse(const BihariSpec& spec, double y);

/// y_bound(t_i) = G^{-1}(G(a) + trapz(g, [t_0, t_i])) on the caller's grid.
std::vector<double> bihari_bound(const BihariSpec& spec);

/// Heuristic for the hypothesis int^inf ds/w(s) = inf: integrate up to 1e9
/// and report true when the partial integral looks convergent (suspect).
bool divergence_suspect(const BihariSpec& spec, std::string* note = nullptr);

struct DecayVerdict {
  bool integral_converging = false;  // dyadic tail windows of int y dt shrink
  bool slope_enveloped = false;      // |y' + h| <= y*q(y) + C with q(s) = s
  bool h_bounded = false;
  bool hypotheses_ok = false;
  double integral = 0.0;
  double tail_max = 0.0;  // max y over the last 10% of samples
  double h_bound = 0.0;
  bool decayed = false;   // hypotheses_ok and tail_max <= tol
};

/// Discrete surrogate of the decay lemma: y >= 0 with integrable tail and a
/// slope envelope forces y(t) -> 0. Throws std::invalid_argument for series
/// shorter than 10 samples.
DecayVerdict decay_detect(const std::vector<double>& t, const std::vector<double>& y,
                          const std::vector<double>& h, double C, double tol = 1e-6);

}  // namespace iins
