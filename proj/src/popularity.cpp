#include "streamlsh/popularity.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "streamlsh/error.hpp"

namespace streamlsh {

PopularityLedger::PopularityLedger(double decay) : decay_(decay) {
  if (!(decay > 0.0 && decay < 1.0)) throw ValidationError(fmt::format("interest decay must lie in (0, 1), got {}", decay));
}

void PopularityLedger::touch(const std::string& id, Tick t) {
  auto [it, inserted] = states_.try_emplace(id, State{1.0, t});
  if (inserted) return;
  State& s = it->second;
  if (t < s.last) throw ProtocolError(fmt::format("interest for '{}' at tick {} precedes tick {}", id, t, s.last));
  if (t == s.last) return;
  s.sum = s.sum * std::pow(decay_, static_cast<double>(t - s.last)) + 1.0;
  s.last = t;
}

void PopularityLedger::record(std::span<const std::string> ids, Tick t) {
  if (clock_ && t < *clock_) throw ProtocolError(fmt::format("interest at tick {} after tick {}", t, *clock_));
  clock_ = t;
  for (const auto& id : ids) touch(id, t);
}

void PopularityLedger::record(std::span<const InterestEvent> events, Tick t) {
  if (clock_ && t < *clock_) throw ProtocolError(fmt::format("interest at tick {} after tick {}", t, *clock_));
  clock_ = t;
  for (const auto& e : events) {
    if (e.tick != t) throw ProtocolError(fmt::format("interest event for '{}' has tick {}, expected {}", e.item_id, e.tick, t));
    touch(e.item_id, t);
  }
}

double PopularityLedger::pop(std::string_view id, Tick now) const {
  auto it = states_.find(std::string(id));
  if (it == states_.end()) return 0.0;
  const State& s = it->second;
  if (now < s.last) throw ProtocolError(fmt::format("popularity of '{}' requested at tick {} before its last record {}", id, now, s.last));
  return (1.0 - decay_) * s.sum * std::pow(decay_, static_cast<double>(now - s.last));
}

std::size_t PopularityLedger::prune(Tick now, double threshold) {
  return std::erase_if(states_, [&](const auto& kv) {
    const State& s = kv.second;
    return now >= s.last && (1.0 - decay_) * s.sum * std::pow(decay_, static_cast<double>(now - s.last)) < threshold;
  });
}

std::vector<std::pair<std::string, PopularityLedger::State>> PopularityLedger::export_states() const {
  std::vector<std::pair<std::string, State>> out(states_.begin(), states_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

void PopularityLedger::restore(std::string id, State state) {
  if (!clock_ || state.last > *clock_) clock_ = state.last;
  states_[std::move(id)] = state;
}

}  // namespace streamlsh
