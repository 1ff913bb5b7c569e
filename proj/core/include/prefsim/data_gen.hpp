#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prefsim/choice_models.hpp"
#include "prefsim/core_types.hpp"
#include "prefsim/random.hpp"

namespace prefsim {

/// Dichotomy preference data: each set holds `set_size` messages drawn iid
/// from the base policy, and a random individual of type Z ~ p* picks
/// uniformly among the category-Z members.
struct GenerationConfig {
  BasePolicy base;
  TypeDistribution p_star;
  std::size_t set_size = 2;
  std::uint64_t num_data = 1;

  void validate() const;
};

/// One record, reduced to what every loss under the category-constant
/// architectures depends on.
struct PreferenceDatum {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  Category chosen = Category::kOne;
};

struct StatsEntry {
  std::size_t n1;
  std::size_t n2;
  Category chosen;
  std::uint64_t count;
};

/// Occurrence counts keyed by (n1, chosen) for a dataset with a fixed set size.
class SufficientStats {
 public:
  explicit SufficientStats(std::size_t set_size);

  static SufficientStats from_records(std::size_t set_size,
                                      std::span<const PreferenceDatum> records);

  // Throws InvalidArgument if (n1, chosen) is not a possible record.
  void add(std::size_t n1, Category chosen, std::uint64_t count = 1);

  std::uint64_t count(std::size_t n1, Category chosen) const;
  std::size_t set_size() const noexcept { return set_size_; }
  std::uint64_t num_data() const noexcept { return num_data_; }

  // Nonzero entries ordered by (n1, chosen).
  std::vector<StatsEntry> entries() const;

  friend bool operator==(const SufficientStats&, const SufficientStats&) = default;

 private:
  std::size_t set_size_;
  std::uint64_t num_data_ = 0;
  std::vector<std::uint64_t> counts_;  // [n1 * 2 + (chosen - 1)]
};

/// Text form: a `set_size,num_data` line, then one `n1,chosen,count` line per
/// nonzero entry. Reading validates every invariant and throws
/// UnsupportedFormat on malformed input.
void write_stats(std::ostream& out, const SufficientStats& stats);
SufficientStats read_stats(std::istream& in);
std::string stats_to_string(const SufficientStats& stats);
SufficientStats stats_from_string(const std::string& text);

/// Category counts (n1, n2) of one choice set sampled from the base policy.
std::pair<std::size_t, std::size_t> sample_choice_set(const BasePolicy& base,
                                                      std::size_t set_size, Rng& rng);

/// A full choice set with message ids, for IIA diagnostics. Ids are drawn
/// uniformly without replacement within a category while its pool lasts;
/// past that, messages repeat with increasing `copy` tags.
ChoiceSet sample_full_choice_set(const BasePolicy& base, std::size_t set_size, Rng& rng);

PreferenceDatum sample_datum(const GenerationConfig& config, Rng& rng);
std::vector<PreferenceDatum> sample_records(const GenerationConfig& config, Rng& rng);

/// Same draws as sample_records, aggregated on the fly.
SufficientStats sample_dataset(const GenerationConfig& config, Rng& rng);

struct RhoStats {
  double rho_chosen;  // fraction of records whose choice is in M1
  double rho_data;    // mean fraction of M1 members per set
};
RhoStats rho_stats(const SufficientStats& stats);

struct PartitionCounts {
  std::uint64_t size_i;   // records whose set has both categories
  std::uint64_t size_i1;  // ... and an M1 choice
  std::uint64_t size_i2;  // ... and an M2 choice
};
PartitionCounts partition_counts(const SufficientStats& stats);

}  // namespace prefsim
