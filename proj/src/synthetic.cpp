#include "streamlsh/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_set>

#include <fmt/core.h>

#include "streamlsh/error.hpp"
#include "streamlsh/random.hpp"

namespace streamlsh {

namespace {

double parse_number(std::string_view text, std::string_view whole) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError(fmt::format("bad number '{}' in quality spec '{}'", text, whole));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

/// `count` distinct dimensions from [0, dimensions), avoiding `taken`.
std::vector<std::uint32_t> pick_dimensions(std::uint32_t count, std::uint32_t dimensions,
                                           const std::unordered_set<std::uint32_t>& taken, Rng& rng) {
  std::unordered_set<std::uint32_t> chosen;
  std::vector<std::uint32_t> out;
  while (out.size() < count) {
    const auto d = static_cast<std::uint32_t>(rng.below(dimensions));
    if (taken.count(d) || !chosen.insert(d).second) continue;
    out.push_back(d);
  }
  return out;
}

}  // namespace

QualitySpec QualitySpec::parse(std::string_view text) {
  const auto parts = split(text, ':');
  QualitySpec q;
  if (parts[0] == "constant" && parts.size() == 2) {
    q.kind = Kind::Constant;
    q.a = q.b = parse_number(parts[1], text);
  } else if (parts[0] == "uniform" && parts.size() == 3) {
    q.kind = Kind::Uniform;
    q.a = parse_number(parts[1], text);
    q.b = parse_number(parts[2], text);
  } else if (parts[0] == "followers" && parts.size() == 2) {
    q.kind = Kind::Followers;
    q.a = q.b = parse_number(parts[1], text);
  } else {
    throw ValidationError(fmt::format("unknown quality spec '{}'", text));
  }
  const bool ok = q.kind == Kind::Followers ? q.a > 0.0 : (q.a >= 0.0 && q.b <= 1.0 && q.a <= q.b);
  if (!ok) throw ValidationError(fmt::format("quality spec '{}' is out of range", text));
  return q;
}

std::string QualitySpec::format() const {
  switch (kind) {
    case Kind::Constant: return fmt::format("constant:{}", a);
    case Kind::Uniform: return fmt::format("uniform:{}:{}", a, b);
    case Kind::Followers: return fmt::format("followers:{}", a);
  }
  return {};
}

void SyntheticSpec::validate() const {
  if (clusters == 0) throw ValidationError("clusters must be positive");
  if (center_terms == 0) throw ValidationError("center_terms must be positive");
  if (noise_terms == 0 && min_similarity < 1.0) throw ValidationError("noise_terms must be positive unless min_similarity is 1");
  if (static_cast<std::uint64_t>(center_terms) + noise_terms > dimensions) {
    throw ValidationError("center_terms + noise_terms exceeds dimensions");
  }
  if (!(min_similarity > 0.5 && min_similarity <= 1.0)) {
    throw ValidationError(fmt::format("min_similarity must lie in (0.5, 1], got {}", min_similarity));
  }
  if (!(skew >= 0.0)) throw ValidationError("skew must be non-negative");
  if (!(lifetime >= 0.0 && std::isfinite(lifetime))) throw ValidationError("lifetime must be non-negative");
}

std::vector<CorpusRecord> generate_corpus(const SyntheticSpec& spec) {
  spec.validate();
  Rng center_rng(derive_seed(spec.seed, {1}));
  std::vector<std::vector<SparseVector::Entry>> centers(spec.clusters);
  std::vector<std::unordered_set<std::uint32_t>> supports(spec.clusters);
  std::vector<double> center_norms(spec.clusters);
  for (std::uint32_t c = 0; c < spec.clusters; ++c) {
    auto dims = pick_dimensions(spec.center_terms, spec.dimensions, {}, center_rng);
    std::sort(dims.begin(), dims.end());
    double ss = 0.0;
    for (auto d : dims) {
      const double w = 0.5 + center_rng.uniform();
      centers[c].push_back({d, w});
      supports[c].insert(d);
      ss += w * w;
    }
    center_norms[c] = std::sqrt(ss);
  }

  std::vector<double> base(spec.clusters);
  for (std::uint32_t c = 0; c < spec.clusters; ++c) base[c] = std::pow(static_cast<double>(c + 1), -spec.skew);
  std::vector<double> births;
  if (spec.lifetime > 0.0) {
    const double span = static_cast<double>(spec.ticks) + 2.0 * spec.lifetime;
    births.resize(spec.clusters);
    for (auto& b : births) b = static_cast<double>(spec.first_tick) - spec.lifetime + span * center_rng.uniform();
  }
  std::vector<double> cumulative(spec.clusters);
  double total = 0.0;
  const auto weigh = [&](Tick tick) {
    total = 0.0;
    for (std::uint32_t c = 0; c < spec.clusters; ++c) {
      double w = base[c];
      if (!births.empty()) {
        const double x = (static_cast<double>(tick) - births[c]) / spec.lifetime;
        w *= std::exp(-0.5 * x * x);
      }
      total += w;
      cumulative[c] = total;
    }
  };
  weigh(spec.first_tick);

  std::vector<CorpusRecord> out;
  out.reserve(spec.ticks * spec.items_per_tick);
  std::uint64_t serial = 0;
  for (std::uint64_t t = 0; t < spec.ticks; ++t) {
    const Tick tick = spec.first_tick + t;
    Rng rng(derive_seed(spec.seed, {2, t}));
    if (!births.empty()) weigh(tick);
    if (!(total > 0.0)) throw ValidationError(fmt::format("no cluster is alive at tick {}", tick));
    for (std::uint64_t i = 0; i < spec.items_per_tick; ++i) {
      const double pick = rng.uniform() * total;
      const auto c = static_cast<std::uint32_t>(
          std::min<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin(),
                                spec.clusters - 1));
      const double target = spec.min_similarity + (1.0 - spec.min_similarity) * rng.uniform();
      const double theta = std::numbers::pi * (1.0 - target);

      auto entries = centers[c];
      if (theta > 0.0 && spec.noise_terms > 0) {
        const auto dims = pick_dimensions(spec.noise_terms, spec.dimensions, supports[c], rng);
        std::vector<double> weights(dims.size());
        double ss = 0.0;
        for (auto& w : weights) {
          w = 0.5 + rng.uniform();
          ss += w * w;
        }
        const double scale = center_norms[c] * std::tan(theta) / std::sqrt(ss);
        for (std::size_t j = 0; j < dims.size(); ++j) entries.push_back({dims[j], weights[j] * scale});
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
      }

      CorpusRecord record;
      record.id = fmt::format("s{}", serial++);
      record.tick = tick;
      record.vector = std::move(entries);
      switch (spec.quality.kind) {
        case QualitySpec::Kind::Constant: record.quality = spec.quality.a; break;
        case QualitySpec::Kind::Uniform:
          record.quality = spec.quality.a + (spec.quality.b - spec.quality.a) * rng.uniform();
          break;
        case QualitySpec::Kind::Followers:
          record.followers = static_cast<std::uint64_t>(std::floor(-spec.quality.a * std::log1p(-rng.uniform())));
          break;
      }
      out.push_back(std::move(record));
    }
  }
  return out;
}

}  // namespace streamlsh
