#include "prefsim/data_gen.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include "prefsim/errors.hpp"

namespace prefsim {

void GenerationConfig::validate() const {
  if (set_size < 2) throw InvalidParameter("set size must be at least 2");
  if (num_data < 1) throw InvalidParameter("dataset must contain at least one record");
}

SufficientStats::SufficientStats(std::size_t set_size)
    : set_size_(set_size), counts_(2 * (set_size + 1), 0) {
  if (set_size < 1) throw InvalidArgument("set size must be positive");
}

SufficientStats SufficientStats::from_records(std::size_t set_size,
                                              std::span<const PreferenceDatum> records) {
  SufficientStats stats(set_size);
  for (const auto& r : records) {
    if (r.n1 + r.n2 != set_size) {
      throw InvalidArgument("record does not match the dataset set size");
    }
    stats.add(r.n1, r.chosen);
  }
  return stats;
}

void SufficientStats::add(std::size_t n1, Category chosen, std::uint64_t count) {
  if (n1 > set_size_) throw InvalidArgument("n1 exceeds the set size");
  const std::size_t n_chosen = chosen == Category::kOne ? n1 : set_size_ - n1;
  if (n_chosen == 0) {
    throw InvalidArgument("chosen category is absent from the set");
  }
  counts_[n1 * 2 + static_cast<std::size_t>(index_of(chosen))] += count;
  num_data_ += count;
}

std::uint64_t SufficientStats::count(std::size_t n1, Category chosen) const {
  if (n1 > set_size_) return 0;
  return counts_[n1 * 2 + static_cast<std::size_t>(index_of(chosen))];
}

std::vector<StatsEntry> SufficientStats::entries() const {
  std::vector<StatsEntry> out;
  for (std::size_t n1 = 0; n1 <= set_size_; ++n1) {
    for (Category c : {Category::kOne, Category::kTwo}) {
      const std::uint64_t k = count(n1, c);
      if (k != 0) out.push_back({n1, set_size_ - n1, c, k});
    }
  }
  return out;
}

void write_stats(std::ostream& out, const SufficientStats& stats) {
  out << stats.set_size() << ',' << stats.num_data() << '\n';
  for (const auto& e : stats.entries()) {
    out << e.n1 << ',' << static_cast<int>(e.chosen) << ',' << e.count << '\n';
  }
}

namespace {

std::vector<std::uint64_t> parse_fields(std::string_view line, std::size_t expected,
                                        std::size_t line_no) {
  std::vector<std::uint64_t> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view field =
        line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                           : comma - start);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
      throw UnsupportedFormat("stats line " + std::to_string(line_no) +
                              ": expected unsigned integer, got '" + std::string(field) + "'");
    }
    fields.push_back(value);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() != expected) {
    throw UnsupportedFormat("stats line " + std::to_string(line_no) + ": expected " +
                            std::to_string(expected) + " fields");
  }
  return fields;
}

}  // namespace

SufficientStats read_stats(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw UnsupportedFormat("stats input is empty");
  const auto header = parse_fields(line, 2, line_no);
  if (header[0] < 1) throw UnsupportedFormat("stats header: set size must be positive");
  SufficientStats stats(static_cast<std::size_t>(header[0]));
  std::unordered_set<std::uint64_t> seen;
  while (next_line()) {
    const auto f = parse_fields(line, 3, line_no);
    if (f[1] != 1 && f[1] != 2) {
      throw UnsupportedFormat("stats line " + std::to_string(line_no) +
                              ": chosen category must be 1 or 2");
    }
    if (!seen.insert(f[0] * 2 + f[1]).second) {
      throw UnsupportedFormat("stats line " + std::to_string(line_no) + ": duplicate key");
    }
    try {
      stats.add(static_cast<std::size_t>(f[0]), f[1] == 1 ? Category::kOne : Category::kTwo,
                f[2]);
    } catch (const InvalidArgument& e) {
      throw UnsupportedFormat("stats line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (stats.num_data() != header[1]) {
    throw UnsupportedFormat("stats counts sum to " + std::to_string(stats.num_data()) +
                            " but header declares " + std::to_string(header[1]));
  }
  return stats;
}

std::string stats_to_string(const SufficientStats& stats) {
  std::ostringstream out;
  write_stats(out, stats);
  return out.str();
}

SufficientStats stats_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_stats(in);
}

std::pair<std::size_t, std::size_t> sample_choice_set(const BasePolicy& base,
                                                      std::size_t set_size, Rng& rng) {
  std::size_t n1 = 0;
  for (std::size_t i = 0; i < set_size; ++i) n1 += rng.bernoulli(base.mass1()) ? 1 : 0;
  return {n1, set_size - n1};
}

ChoiceSet sample_full_choice_set(const BasePolicy& base, std::size_t set_size, Rng& rng) {
  const auto [n1, n2] = sample_choice_set(base, set_size, rng);
  std::vector<Member> members;
  members.reserve(set_size);
  auto draw = [&](Category c, std::size_t n) {
    const std::uint64_t pool = base.pool().size(c);
    std::vector<std::uint64_t> taken;
    for (std::size_t slot = 0; slot < n; ++slot) {
      const auto copy = static_cast<std::uint32_t>(slot / pool);
      if (slot % pool == 0) taken.clear();
      std::uint64_t id = rng.below(pool);
      while (std::find(taken.begin(), taken.end(), id) != taken.end()) id = rng.below(pool);
      taken.push_back(id);
      members.push_back({c, id, copy});
    }
  };
  draw(Category::kOne, n1);
  draw(Category::kTwo, n2);
  return ChoiceSet(std::move(members));
}

PreferenceDatum sample_datum(const GenerationConfig& config, Rng& rng) {
  const auto [n1, n2] = sample_choice_set(config.base, config.set_size, rng);
  const Category type = rng.bernoulli(config.p_star.p1()) ? Category::kOne : Category::kTwo;
  const std::size_t present = type == Category::kOne ? n1 : n2;
  // Preferred category absent: uniform over the set, all of which is the
  // other category.
  const Category chosen = present > 0 ? type : other(type);
  return {n1, n2, chosen};
}

std::vector<PreferenceDatum> sample_records(const GenerationConfig& config, Rng& rng) {
  config.validate();
  std::vector<PreferenceDatum> records;
  records.reserve(config.num_data);
  for (std::uint64_t i = 0; i < config.num_data; ++i) records.push_back(sample_datum(config, rng));
  return records;
}

SufficientStats sample_dataset(const GenerationConfig& config, Rng& rng) {
  config.validate();
  SufficientStats stats(config.set_size);
  for (std::uint64_t i = 0; i < config.num_data; ++i) {
    const PreferenceDatum d = sample_datum(config, rng);
    stats.add(d.n1, d.chosen);
  }
  return stats;
}

RhoStats rho_stats(const SufficientStats& stats) {
  if (stats.num_data() == 0) throw InvalidArgument("rho statistics need at least one record");
  double chosen1 = 0.0;
  double m1_members = 0.0;
  for (const auto& e : stats.entries()) {
    const auto w = static_cast<double>(e.count);
    if (e.chosen == Category::kOne) chosen1 += w;
    m1_members += w * static_cast<double>(e.n1);
  }
  const auto d = static_cast<double>(stats.num_data());
  return {chosen1 / d, m1_members / (d * static_cast<double>(stats.set_size()))};
}

PartitionCounts partition_counts(const SufficientStats& stats) {
  PartitionCounts p{0, 0, 0};
  for (const auto& e : stats.entries()) {
    if (e.n1 == 0 || e.n2 == 0) continue;
    p.size_i += e.count;
    (e.chosen == Category::kOne ? p.size_i1 : p.size_i2) += e.count;
  }
  return p;
}

}  // namespace prefsim
