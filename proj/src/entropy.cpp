// SPDX-License-Identifier: Apache-2.0
#include "phaseid/entropy.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "phaseid/numerics.hpp"

namespace phaseid::entropy {

namespace {
const double kLn2 = std::log(2.0);
const double kPi = 3.14159265358979323846;
const double kE = std::exp(1.0);
}  // namespace

double EntropyBounds::lower_bits() const { return lower_nats / kLn2; }
double EntropyBounds::upper_bits() const { return upper_nats / kLn2; }

EntropyBounds feeder_entropy_bounds(size_t n) {
  if (n < 2) throw OutOfRange("feeder_entropy_bounds: n must be >= 2");
  const double nd = static_cast<double>(n);
  EntropyBounds b;
  b.lower_nats = std::log(kE / nd) -
                 std::log(std::sqrt(2.0 * kPi / (kE * kE)) / (nd + 1.0)) / nd;
  b.upper_nats = 0.5 * std::log(12.0 * kE / nd) -
                 std::log(std::sqrt(kE * kE / (4.0 * kPi)) / (nd + 1.0)) / nd;
  return b;
}

SymMatrix scale_to_unit_diagonal(const SymMatrix& sigma) {
  const size_t n = sigma.n;
  std::vector<double> d(n);
  for (size_t i = 0; i < n; ++i) {
    const double v = sigma(i, i);
    if (v <= 0.0)
      throw ZeroDiagonal("scale_to_unit_diagonal: nonpositive diagonal at " +
                         std::to_string(i));
    d[i] = 1.0 / std::sqrt(v);
  }
  SymMatrix out(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < i; ++j) out.set(i, j, sigma(i, j) * d[i] * d[j]);
    out.set(i, i, 1.0);
  }
  return out;
}

double gaussian_entropy(const SymMatrix& sigma_tilde) {
  const double n = static_cast<double>(sigma_tilde.n);
  return 0.5 * (n * std::log(2.0 * kPi * kE) + numerics::log_det_spd(sigma_tilde));
}

double fano_expression(double p_e, size_t n_classes) {
  if (p_e < 0.0 || p_e > 1.0)
    throw OutOfRange("fano_expression: p_e must lie in [0, 1]");
  if (n_classes < 2) throw OutOfRange("fano_expression: need >= 2 classes");
  double h2 = 0.0;
  if (p_e > 0.0 && p_e < 1.0)
    h2 = -p_e * std::log2(p_e) - (1.0 - p_e) * std::log2(1.0 - p_e);
  return h2 + p_e * std::log2(static_cast<double>(n_classes - 1));
}

double delta_bound_term(const SymMatrix& k, const IndexSet& s, double p_y) {
  if (p_y < 0.0 || p_y > 1.0)
    throw OutOfRange("delta_bound_term: p_y must lie in [0, 1]");
  if (p_y == 0.0) return 0.0;
  return p_y / static_cast<double>(k.n) *
         numerics::trace_elementwise_sqrt(numerics::schur_complement(k, s));
}

std::string EntropyReport::to_text() const {
  auto fmt = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "n=" << n << '\n';
  os << "per_customer_lower_nats=" << fmt(lower_nats) << '\n';
  os << "per_customer_upper_nats=" << fmt(upper_nats) << '\n';
  os << "per_customer_lower_bits=" << fmt(lower_nats / kLn2) << '\n';
  os << "per_customer_upper_bits=" << fmt(upper_nats / kLn2) << '\n';
  if (gaussian_entropy_nats) {
    os << "gaussian_entropy_nats=" << fmt(*gaussian_entropy_nats) << '\n';
    os << "gaussian_entropy_per_customer_nats="
       << fmt(*gaussian_entropy_nats / static_cast<double>(n)) << '\n';
  }
  if (!notes.empty()) os << "notes=" << notes << '\n';
  return os.str();
}

EntropyReport make_report(size_t n, std::optional<double> gaussian_nats,
                          const std::string& notes) {
  const EntropyBounds b = feeder_entropy_bounds(n);
  EntropyReport r;
  r.n = n;
  r.lower_nats = b.lower_nats;
  r.upper_nats = b.upper_nats;
  r.gaussian_entropy_nats = gaussian_nats;
  r.notes = notes;
  return r;
}

}  // namespace phaseid::entropy
