#include "mixreg/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "mixreg/csv.hpp"
#include "mixreg/errors.hpp"

namespace mixreg {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
}

Predicate at_least(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, lhs >= rhs, ">="};
}

Predicate at_most(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, lhs <= rhs, "<="};
}

// lhs^{1 - 2/s} >= c3 s^2 moment^{2/s} / (scale delta^{2/s})
Predicate moment_burnin(double blocks, double s, double moment, double scale, double delta, double c3) {
  const double lhs = std::pow(blocks, 1.0 - 2.0 / s);
  const double rhs = scale > 0.0 ? c3 * s * s * std::pow(moment, 2.0 / s) / (scale * std::pow(delta, 2.0 / s))
                                 : std::numeric_limits<double>::infinity();
  return at_least("burnin_1b", lhs, rhs);
}

}  // namespace

void UniversalConstants::validate() const {
  for (double c : {c1, c2, c3, c4, c5, c6, c_lower}) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ArgumentError("universal constants must be finite and positive");
  }
}

double bernstein_threshold(std::size_t n, double var, double b, double delta) {
  return blocked_bernstein_threshold(n, 1, var, b, delta);
}

double blocked_bernstein_threshold(std::size_t n, std::size_t k, double blockvar, double b, double delta) {
  if (n == 0 || k == 0) throw ArgumentError("Bernstein threshold needs n, k >= 1");
  if (n % k != 0) throw ArgumentError("block length must divide n");
  if (!(blockvar >= 0.0) || !(b > 0.0)) throw ArgumentError("Bernstein threshold needs var >= 0 and b > 0");
  check_delta(delta);
  const double nn = static_cast<double>(n);
  const double log_term = std::log(1.0 / delta);
  return 2.0 * std::sqrt(blockvar * log_term / nn) + 4.0 * b * static_cast<double>(k) * log_term / (3.0 * nn);
}

double edim(const Matrix& m) {
  const double op = op_norm_psd(sym(m));
  if (!(op > 0.0)) throw ArgumentError("edim of the zero matrix is undefined");
  return m.trace() / op;
}

double fuk_nagaev_constant(double eps, double eta, double s) {
  if (!(eps > 0.0) || !(eta > 0.0 && eta <= 1.0) || !(s > 2.0)) {
    throw ArgumentError("Fuk-Nagaev constant needs eps > 0, eta in (0, 1], s > 2");
  }
  const double k = std::pow(2.0 * s / std::numbers::e, 2.0 * s);
  const double inner = 2.0 * (1.0 + 2.0 / eps) * (3.0 + 4.0 / eta);
  return 1.0 + k * inner * inner + std::pow(eps, -s);
}

double fuk_nagaev_tail(double lambda, std::span<const double> moments_s, double t, double eps,
                       double eta, double s) {
  if (!(t > 0.0)) throw ArgumentError("Fuk-Nagaev tail needs t > 0");
  if (!(lambda > 0.0)) throw ArgumentError("Fuk-Nagaev tail needs Lambda > 0");
  const double c = fuk_nagaev_constant(eps, eta, s);
  double poly = 0.0;
  for (double m : moments_s) poly += m;
  return std::exp(-t * t / ((2.0 + eta) * lambda)) + c * poly / std::pow(t, s);
}

double noise_term_threshold(double lambda_odd, double lambda_even, std::size_t size_odd,
                            std::size_t size_even, double r, double eps, double eta, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ArgumentError("delta must lie in (0, 1]");
  if (!(eps > 0.0) || !(eta > 0.0) || !(r >= 0.0)) throw ArgumentError("noise threshold needs eps, eta > 0, r >= 0");
  if (size_odd == 0 || size_even == 0 || lambda_odd < 0.0 || lambda_even < 0.0) {
    throw ArgumentError("noise threshold needs non-empty unions and Lambda >= 0");
  }
  const double shape =
      (1.0 + 2.0 * eta) * std::sqrt(r) + (1.0 + 9.0 * eps) * std::sqrt((2.0 + eta) * std::log(1.0 / delta));
  const double odd = std::sqrt(lambda_odd / static_cast<double>(size_odd));
  const double even = std::sqrt(lambda_even / static_cast<double>(size_even));
  return std::max(odd, even) * shape;
}

double noise_term_failure_budget(const NoiseTermBudgetInput& in) {
  if (!(in.r > 0.0)) throw ArgumentError("failure budget needs r > 0");
  const double c = fuk_nagaev_constant(in.eps, in.eta, in.s);
  const double s = in.s;
  const double lead = c * std::pow(1.0 + 9.0 * in.eps, s) / (std::pow(in.r, s / 2.0) * std::pow(in.eta, s));
  auto part = [&](double moment, std::size_t size, double lambda) {
    if (moment == 0.0) return 0.0;
    return moment / (std::pow(static_cast<double>(size), s / 2.0) * std::pow(lambda, s / 2.0));
  };
  return 2.0 * in.delta + in.mixing_sum +
         lead * (part(in.block_moment_odd, in.size_odd, in.lambda_odd) +
                 part(in.block_moment_even, in.size_even, in.lambda_even));
}

bool BoundReport::burnin_holds() const {
  for (const auto& p : predicates) {
    if (!p.holds) return false;
  }
  return true;
}

const Predicate& BoundReport::predicate(std::string_view name) const {
  for (const auto& p : predicates) {
    if (p.name == name) return p;
  }
  throw ArgumentError("report has no predicate '" + std::string(name) + "'");
}

void BoundReport::write_text(std::ostream& out) const {
  out << kind << " bound\n";
  out << "  bound_value   " << format_double(bound_value) << "\n";
  out << "  n             " << n << "\n";
  out << "  delta         " << format_double(delta) << "\n";
  out << "  sigma2        " << format_double(sigma2) << "\n";
  out << "  edim          " << format_double(edim) << "\n";
  out << "  mixing_sum    " << format_double(mixing_sum) << "\n";
  for (const auto& p : predicates) {
    out << "  " << p.name << (p.holds ? "  true " : "  false") << "  lhs " << format_double(p.lhs) << ' '
        << p.relation << " rhs " << format_double(p.rhs) << "\n";
  }
  const auto& c = constants;
  out << "  constants     c1=" << format_double(c.c1) << " c2=" << format_double(c.c2)
      << " c3=" << format_double(c.c3) << " c4=" << format_double(c.c4) << " c5=" << format_double(c.c5)
      << " c6=" << format_double(c.c6) << " C_lower=" << format_double(c.c_lower)
      << " (placeholders, not certified)\n";
}

std::vector<std::string> BoundReport::csv_header() {
  return {"kind",         "n",           "delta",       "bound",       "sigma2",      "edim",
          "mixing_sum",   "burnin_1a",   "burnin_1a_lhs", "burnin_1a_rhs", "burnin_1b", "burnin_1b_lhs",
          "burnin_1b_rhs", "burnin_2a",  "burnin_2a_lhs", "burnin_2a_rhs", "burnin_2b", "burnin_2b_lhs",
          "burnin_2b_rhs", "burnin_3",   "burnin_3_lhs", "burnin_3_rhs", "c1",         "c2",
          "c3",           "c4",          "c5",          "c6"};
}

void BoundReport::write_csv_row(std::ostream& out) const {
  std::vector<std::string> fields{kind, std::to_string(n), format_double(delta), format_double(bound_value),
                                  format_double(sigma2), format_double(edim), format_double(mixing_sum)};
  for (const char* name : {"burnin_1a", "burnin_1b", "burnin_2a", "burnin_2b", "burnin_3"}) {
    bool found = false;
    for (const auto& p : predicates) {
      if (p.name != name) continue;
      fields.push_back(p.holds ? "1" : "0");
      fields.push_back(format_double(p.lhs));
      fields.push_back(format_double(p.rhs));
      found = true;
    }
    if (!found) fields.insert(fields.end(), {"", "", ""});
  }
  for (double c : {constants.c1, constants.c2, constants.c3, constants.c4, constants.c5, constants.c6}) {
    fields.push_back(format_double(c));
  }
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line.push_back(',');
    line += fields[i];
  }
  line.push_back('\n');
  out << line;
}

BoundReport main_bound(const NoiseSpectrum& spectrum, const BlockPartition& partition,
                       const MixingProfile& profile, double delta, const UniversalConstants& constants) {
  check_delta(delta);
  constants.validate();
  if (spectrum.n != partition.n()) throw ArgumentError("spectrum and partition disagree on n");
  BoundReport rep;
  rep.kind = "main";
  rep.constants = constants;
  rep.n = partition.n();
  rep.delta = delta;
  rep.sigma2 = spectrum.sigma2;
  rep.edim = spectrum.edim;
  const double n = static_cast<double>(partition.n());
  const double log_term = std::log(1.0 / delta);
  rep.bound_value = constants.c1 * spectrum.sigma2 * (spectrum.edim + log_term) / n;

  const double blocks = n / static_cast<double>(partition.a_max());
  rep.predicates.push_back(at_least("burnin_1a", blocks,
                                    constants.c2 * (static_cast<double>(spectrum.d_x) + spectrum.h2 * log_term)));
  rep.predicates.push_back(moment_burnin(blocks, spectrum.moment_s, spectrum.block_moment_s,
                                         spectrum.edim * spectrum.sigma2, delta, constants.c3));

  const double ratio = static_cast<double>(partition.even_size()) / static_cast<double>(partition.odd_size());
  rep.predicates.push_back(
      {"burnin_2a", ratio, constants.c4, ratio > 1.0 / constants.c4 && ratio < constants.c4, "in"});

  const Matrix& so = spectrum.sigma_odd;
  const Matrix& se = spectrum.sigma_even;
  const double tol = 1e-8 * std::abs((so + se).trace());
  const double lo = std::min(min_eigenvalue(sym(se - so / constants.c5)),
                             min_eigenvalue(sym(constants.c5 * so - se)));
  rep.predicates.push_back({"burnin_2b", lo, -tol, lo >= -tol, "psd"});

  rep.mixing_sum = mixing_sum(profile, partition);
  rep.predicates.push_back(at_most("burnin_3", rep.mixing_sum, constants.c6 * delta));
  return rep;
}

BoundReport corollary_bound(const CorollaryInput& in, const MixingProfile& profile, double delta,
                            const UniversalConstants& constants) {
  check_delta(delta);
  constants.validate();
  if (in.tau == 0 || in.n == 0 || in.n % (2 * in.tau) != 0) throw ArgumentError("2 tau must divide n");
  BoundReport rep;
  rep.kind = "corollary";
  rep.constants = constants;
  rep.n = in.n;
  rep.delta = delta;
  rep.sigma2 = in.sigma2;
  rep.edim = static_cast<double>(in.d_x);
  const double n = static_cast<double>(in.n);
  const double log_term = std::log(1.0 / delta);
  rep.bound_value = constants.c1 * in.sigma2 * (static_cast<double>(in.d_x) + log_term) / n;
  const double blocks = n / static_cast<double>(in.tau);
  rep.predicates.push_back(
      at_least("burnin_1a", blocks, constants.c2 * (static_cast<double>(in.d_x) + in.h * in.h * log_term)));
  rep.predicates.push_back(moment_burnin(blocks, in.s, in.block_moment, in.sigma2, delta, constants.c3));
  rep.mixing_sum = blocks * profile.at(in.tau);
  rep.predicates.push_back(at_most("burnin_3", rep.mixing_sum, constants.c6 * delta));
  return rep;
}

void LowerTailCertificate::write_text(std::ostream& out) const {
  out << "lower tail certificate: " << (certified ? "certified" : "not certified") << "\n";
  for (const auto& p : predicates) {
    out << "  " << p.name << (p.holds ? "  true " : "  false") << "  lhs " << format_double(p.lhs) << ' '
        << p.relation << " rhs " << format_double(p.rhs) << "\n";
  }
  if (certified) out << "  event: " << event << "\n";
}

LowerTailCertificate lower_tail_certificate(const BlockPartition& partition, std::size_t d_x,
                                            double h, double delta, const MixingProfile& profile,
                                            double c_lower) {
  check_delta(delta);
  if (!(c_lower > 0.0)) throw ArgumentError("C_lower must be positive");
  LowerTailCertificate cert;
  const double need = c_lower * static_cast<double>(partition.a_max()) *
                      (static_cast<double>(d_x) + h * h * std::log(1.0 / delta));
  cert.predicates.push_back(at_least("sample_size", static_cast<double>(partition.n()), need));
  cert.predicates.push_back(at_most("mixing", mixing_sum(profile, partition), delta / 2.0));
  cert.certified = cert.predicates[0].holds && cert.predicates[1].holds;
  cert.event = "for all v: (1/n) sum <v,X_i>^2 >= (1/2n) sum E<v,X_i>^2, with probability >= " +
               format_double(1.0 - delta);
  return cert;
}

double phi_tau(double u, double tau) {
  if (!(tau > 0.0)) throw ArgumentError("phi_tau needs tau > 0");
  return std::min(u * u, tau * tau);
}

CsComparison cs_comparison(const NoiseSpectrum& spectrum, const BlockPartition& partition,
                           double per_sample_var) {
  if (spectrum.d_x != 1 || spectrum.d_y != 1) {
    throw UnsupportedSpec("the Cauchy-Schwarz comparison is defined for d_X = d_Y = 1");
  }
  return {spectrum.sigma2, static_cast<double>(partition.a_max()) * per_sample_var};
}

}  // namespace mixreg
