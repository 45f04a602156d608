#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace streamlsh::analysis {

/// Threshold viewed analytically: copies vanish once age reaches `max_age`
/// (T_age = T_size / (mu * phi)).
struct ThresholdModel {
  double max_age = 20.0;
};

/// Smooth viewed analytically: a copy survives each tick with probability p.
struct SmoothModel {
  double retention = 0.95;
};

using PolicyModel = std::variant<ThresholdModel, SmoothModel>;

/// Probability that LSH(k, L) finds an s-similar item that is present in
/// each of its buckets independently with probability `presence`:
///   1 - (1 - presence * s^k)^L.
double lsh_success(unsigned k, unsigned tables, double s, double presence = 1.0);

/// 1 - (1 - s^k z)^L if a < T_age, else 0.
double sp_threshold(unsigned k, unsigned tables, double max_age, double s, double age, double quality);

/// 1 - (1 - p^a s^k z)^L.
double sp_smooth(unsigned k, unsigned tables, double retention, double s, double age, double quality);

double sp(const PolicyModel& policy, unsigned k, unsigned tables, double s, double age, double quality);

/// Threshold's cutoff age T_size / (mu * phi).
double threshold_age(double table_size, double arrivals_per_tick, double mean_quality);

/// Expected size of a Smooth index: mu * phi / (1 - p) * L.
double expected_index_size(double arrivals_per_tick, double mean_quality, double retention, unsigned tables);

/// Expected number of copies of a quality-z item at age a:
/// z L p^a (Smooth), z L if a < T_age else 0 (Threshold).
double expected_copies(const PolicyModel& policy, unsigned tables, double quality, double age);

/// Probability that a DynaPop item is in its bucket (Smooth retention):
///   z u rho / (1 - p (1 - z u rho)).
/// Throws DomainError when p = 1 and z u rho = 0.
double sb(double retention, double insertion, double interest, double quality);

/// 1 - (1 - SB(p, u, w, z) s^k)^L.
double sp_dynapop(unsigned k, unsigned tables, double retention, double insertion, double s, double popularity,
                  double quality);

/// Adaptive Simpson quadrature of f over [lo, hi] to absolute tolerance `tol`.
double integrate(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-9);

/// Cumulative success probability for uniform similarity on [R_sim, 1],
/// uniform discrete age on {0, ..., R_age} and quality 1. Threshold's age
/// sum stops at min(R_age, ceil(T_age) - 1). Throws DomainError if
/// R_sim >= 1.
double csp(const PolicyModel& policy, unsigned k, unsigned tables, double r_sim, unsigned r_age);

/// Density of quality scores on [0, 1].
struct UniformQuality {};
struct PointQuality {
  double value = 1.0;
};
/// Piecewise-constant density: `weights[i]` is the mass of
/// [edges[i], edges[i+1]).
struct HistogramQuality {
  std::vector<double> edges;
  std::vector<double> weights;
};
using QualityDistribution = std::variant<UniformQuality, PointQuality, HistogramQuality>;

double mean_quality(const QualityDistribution& dist);

enum class QualityIndexing { Sensitive, Insensitive };

/// CSP over similarity [R_sim, 1], age {0..R_age} and quality
/// [R_quality, 1] under a Smooth index with retention p. Sensitive
/// indexing inserts with probability z; insensitive always inserts.
/// Throws DomainError if the similarity or quality interval carries no mass.
double csp_quality(QualityIndexing indexing, unsigned k, unsigned tables, double retention, double r_sim,
                   unsigned r_age, double r_quality, const QualityDistribution& dist = UniformQuality{});

/// One (similarity, age, quality) observation of an empirical density.
struct Observation {
  double similarity = 1.0;
  double age = 0.0;
  double quality = 1.0;
};

/// CSP against an empirical density: the mean SP over the observations.
/// Throws DomainError on an empty sample.
double csp_empirical(const PolicyModel& policy, unsigned k, unsigned tables, std::span<const Observation> sample);

/// Throws ValidationError unless |a - b| <= rel_tol * max(a, b).
void require_equal_capacity(double size_a, double size_b, double rel_tol, std::string_view what);

}  // namespace streamlsh::analysis
