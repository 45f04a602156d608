#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "streamlsh/hash_table.hpp"

namespace streamlsh {

/// Interest in an item at a tick. `quality` optionally overrides the
/// item's stored quality from this tick on.
struct InterestEvent {
  std::string item_id;
  Tick tick = 0;
  std::optional<double> quality;
};

/// Exponentially decayed interest counts:
///   pop(x) = (1 - alpha) * sum_i a_i(x) alpha^(n - i)
/// where a_i(x) is 1 iff x received interest at tick i. Kept incrementally
/// as (decayed sum, last tick) per item.
class PopularityLedger {
 public:
  struct State {
    double sum = 0.0;
    Tick last = 0;
  };

  explicit PopularityLedger(double decay);

  double decay() const noexcept { return decay_; }

  /// Records interest in each id at tick `t`. Repeated ids within one tick
  /// count once. Throws ProtocolError if `t` precedes an earlier record.
  void record(std::span<const std::string> ids, Tick t);
  void record(std::span<const InterestEvent> events, Tick t);

  /// Popularity at `now`; 0 for ids never seen. Throws ProtocolError if
  /// `now` precedes the item's last record.
  double pop(std::string_view id, Tick now) const;

  /// Drops items whose popularity at `now` fell below `threshold`.
  std::size_t prune(Tick now, double threshold);

  std::size_t size() const noexcept { return states_.size(); }
  std::optional<Tick> clock() const noexcept { return clock_; }

  /// Raw state access for snapshots, sorted by id.
  std::vector<std::pair<std::string, State>> export_states() const;
  void restore(std::string id, State state);
  void restore_clock(std::optional<Tick> clock) noexcept { clock_ = clock; }

 private:
  void touch(const std::string& id, Tick t);

  double decay_;
  std::optional<Tick> clock_;
  std::unordered_map<std::string, State> states_;
};

}  // namespace streamlsh
