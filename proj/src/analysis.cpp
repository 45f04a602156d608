#include "streamlsh/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "streamlsh/error.hpp"

namespace streamlsh::analysis {

namespace {

template <typename... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <typename... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

void check_unit(double value, std::string_view name) {
  if (!(value >= 0.0 && value <= 1.0)) throw ValidationError(fmt::format("{} must lie in [0, 1], got {}", name, value));
}

void check_shape(unsigned k, unsigned tables) {
  if (k == 0) throw ValidationError("k must be positive");
  if (tables == 0) throw ValidationError("L must be positive");
}

void check_retention(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError(fmt::format("retention p must lie in (0, 1), got {}", p));
}

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

// Mass of [lo, 1] under `dist` and the integral of f against it.
struct Weighted {
  double mass = 0.0;
  double integral = 0.0;
};

Weighted integrate_quality(const QualityDistribution& dist, double lo, const std::function<double(double)>& g,
                           double tol) {
  return std::visit(
      Overloaded{
          [&](const UniformQuality&) {
            if (lo >= 1.0) return Weighted{};
            return Weighted{1.0 - lo, integrate(g, lo, 1.0, tol)};
          },
          [&](const PointQuality& q) {
            if (q.value < lo) return Weighted{};
            return Weighted{1.0, g(q.value)};
          },
          [&](const HistogramQuality& h) {
            Weighted out;
            for (std::size_t i = 0; i + 1 < h.edges.size(); ++i) {
              const double a = std::max(lo, h.edges[i]);
              const double b = h.edges[i + 1];
              if (b <= a || h.weights[i] <= 0.0) continue;
              const double density = h.weights[i] / (h.edges[i + 1] - h.edges[i]);
              out.mass += density * (b - a);
              out.integral += density * integrate(g, a, b, tol);
            }
            return out;
          },
      },
      dist);
}

void validate_distribution(const QualityDistribution& dist) {
  if (const auto* q = std::get_if<PointQuality>(&dist)) check_unit(q->value, "point quality");
  if (const auto* h = std::get_if<HistogramQuality>(&dist)) {
    if (h->edges.size() < 2 || h->weights.size() + 1 != h->edges.size()) {
      throw ValidationError("histogram needs n+1 edges for n weights");
    }
    for (std::size_t i = 0; i + 1 < h->edges.size(); ++i) {
      if (!(h->edges[i] < h->edges[i + 1])) throw ValidationError("histogram edges must increase");
      if (h->weights[i] < 0.0) throw ValidationError("histogram weights must be non-negative");
    }
    if (h->edges.front() < 0.0 || h->edges.back() > 1.0) throw ValidationError("histogram must lie within [0, 1]");
  }
}

}  // namespace

double lsh_success(unsigned k, unsigned tables, double s, double presence) {
  check_shape(k, tables);
  check_unit(s, "similarity");
  check_unit(presence, "presence probability");
  const double hit = presence * std::pow(s, static_cast<double>(k));
  return 1.0 - std::pow(1.0 - hit, static_cast<double>(tables));
}

double sp_threshold(unsigned k, unsigned tables, double max_age, double s, double age, double quality) {
  if (!(max_age >= 0.0)) throw ValidationError("T_age must be non-negative");
  if (!(age >= 0.0)) throw ValidationError("age must be non-negative");
  check_unit(quality, "quality");
  if (!(age < max_age)) {
    check_shape(k, tables);
    check_unit(s, "similarity");
    return 0.0;
  }
  return lsh_success(k, tables, s, quality);
}

double sp_smooth(unsigned k, unsigned tables, double retention, double s, double age, double quality) {
  check_retention(retention);
  if (!(age >= 0.0)) throw ValidationError("age must be non-negative");
  check_unit(quality, "quality");
  return lsh_success(k, tables, s, std::pow(retention, age) * quality);
}

double sp(const PolicyModel& policy, unsigned k, unsigned tables, double s, double age, double quality) {
  return std::visit(Overloaded{
                        [&](const ThresholdModel& m) { return sp_threshold(k, tables, m.max_age, s, age, quality); },
                        [&](const SmoothModel& m) { return sp_smooth(k, tables, m.retention, s, age, quality); },
                    },
                    policy);
}

double threshold_age(double table_size, double arrivals_per_tick, double mean_quality) {
  if (!(arrivals_per_tick > 0.0) || !(mean_quality > 0.0)) {
    throw ValidationError("arrival rate and mean quality must be positive");
  }
  return table_size / (arrivals_per_tick * mean_quality);
}

double expected_index_size(double arrivals_per_tick, double mean_quality, double retention, unsigned tables) {
  check_retention(retention);
  if (!(arrivals_per_tick >= 0.0)) throw ValidationError("arrival rate must be non-negative");
  check_unit(mean_quality, "mean quality");
  return arrivals_per_tick * mean_quality / (1.0 - retention) * tables;
}

double expected_copies(const PolicyModel& policy, unsigned tables, double quality, double age) {
  check_unit(quality, "quality");
  if (!(age >= 0.0)) throw ValidationError("age must be non-negative");
  return std::visit(Overloaded{
                        [&](const ThresholdModel& m) { return age < m.max_age ? quality * tables : 0.0; },
                        [&](const SmoothModel& m) {
                          check_retention(m.retention);
                          return quality * tables * std::pow(m.retention, age);
                        },
                    },
                    policy);
}

double sb(double retention, double insertion, double interest, double quality) {
  if (!(retention > 0.0 && retention <= 1.0)) throw ValidationError("retention p must lie in (0, 1]");
  if (!(insertion > 0.0 && insertion <= 1.0)) throw ValidationError("insertion u must lie in (0, 1]");
  check_unit(interest, "interest probability");
  check_unit(quality, "quality");
  const double c = quality * insertion * interest;
  const double denominator = 1.0 - retention * (1.0 - c);
  if (denominator == 0.0) throw DomainError("SB is undefined for p = 1 with z u rho = 0");
  return c / denominator;
}

double sp_dynapop(unsigned k, unsigned tables, double retention, double insertion, double s, double popularity,
                  double quality) {
  return lsh_success(k, tables, s, sb(retention, insertion, popularity, quality));
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (hi == lo) return 0.0;
  const double fa = f(lo);
  const double fb = f(hi);
  const double fm = f(0.5 * (lo + hi));
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, lo, hi, fa, fm, fb, whole, tol, 48);
}

double csp(const PolicyModel& policy, unsigned k, unsigned tables, double r_sim, unsigned r_age) {
  check_shape(k, tables);
  check_unit(r_sim, "R_sim");
  if (r_sim >= 1.0) throw DomainError("CSP is undefined for the degenerate similarity interval R_sim = 1");
  unsigned last = r_age;
  bool any = true;
  if (const auto* t = std::get_if<ThresholdModel>(&policy)) {
    const double cutoff = std::ceil(t->max_age) - 1.0;
    if (cutoff < 0.0) {
      any = false;
    } else if (cutoff < last) {
      last = static_cast<unsigned>(cutoff);
    }
  }
  double total = 0.0;
  if (any) {
    for (unsigned a = 0; a <= last; ++a) {
      total += integrate([&](double s) { return sp(policy, k, tables, s, a, 1.0); }, r_sim, 1.0, 1e-11);
    }
  }
  return total / ((static_cast<double>(r_age) + 1.0) * (1.0 - r_sim));
}

double mean_quality(const QualityDistribution& dist) {
  validate_distribution(dist);
  const auto w = integrate_quality(dist, 0.0, [](double z) { return z; }, 1e-12);
  return w.mass > 0.0 ? w.integral / w.mass : 0.0;
}

double csp_quality(QualityIndexing indexing, unsigned k, unsigned tables, double retention, double r_sim,
                   unsigned r_age, double r_quality, const QualityDistribution& dist) {
  check_shape(k, tables);
  check_retention(retention);
  check_unit(r_sim, "R_sim");
  check_unit(r_quality, "R_quality");
  validate_distribution(dist);
  if (r_sim >= 1.0) throw DomainError("CSP is undefined for the degenerate similarity interval R_sim = 1");
  const double mass = integrate_quality(dist, r_quality, [](double) { return 1.0; }, 1e-12).mass;
  if (!(mass > 0.0)) throw DomainError("quality radius leaves no probability mass");

  double total = 0.0;
  for (unsigned a = 0; a <= r_age; ++a) {
    if (indexing == QualityIndexing::Insensitive) {
      total += integrate([&](double s) { return sp_smooth(k, tables, retention, s, a, 1.0); }, r_sim, 1.0, 1e-11);
      continue;
    }
    auto over_quality = [&](double s) {
      return integrate_quality(dist, r_quality,
                               [&](double z) { return sp_smooth(k, tables, retention, s, a, z); }, 1e-11)
                 .integral /
             mass;
    };
    total += integrate(over_quality, r_sim, 1.0, 1e-10);
  }
  return total / ((static_cast<double>(r_age) + 1.0) * (1.0 - r_sim));
}

double csp_empirical(const PolicyModel& policy, unsigned k, unsigned tables, std::span<const Observation> sample) {
  if (sample.empty()) throw DomainError("empirical CSP needs at least one observation");
  double total = 0.0;
  for (const auto& o : sample) total += sp(policy, k, tables, o.similarity, o.age, o.quality);
  return total / static_cast<double>(sample.size());
}

void require_equal_capacity(double size_a, double size_b, double rel_tol, std::string_view what) {
  const double scale = std::max(std::abs(size_a), std::abs(size_b));
  if (std::abs(size_a - size_b) > rel_tol * scale) {
    throw ValidationError(fmt::format("{}: index sizes {:.6g} and {:.6g} differ by more than {}%", what, size_a, size_b,
                                      rel_tol * 100.0));
  }
}

}  // namespace streamlsh::analysis
