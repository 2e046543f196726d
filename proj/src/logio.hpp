#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "env.hpp"
#include "metrics.hpp"
#include "tissue.hpp"

namespace biovolt {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Shortest exact decimal form of a double (%.17g).
std::string format_double(double v);

/// Order-dependent digest of the full dynamic tissue state: voltages,
/// concentrations, signalling pools, phenotypes and site occupancy.
std::uint64_t tissue_digest(const Tissue& tissue);

/// Line-delimited JSON episode log: one header record, then one record per
/// step (strictly step-ordered), with optional tissue snapshots every
/// snapshot_every steps.
class EpisodeLogger {
public:
  EpisodeLogger(std::string scenario_name, std::uint64_t seed, std::uint64_t config_digest,
                int snapshot_every = 0);

  void log_step(int step, const std::vector<double>& action, const RewardBreakdown& info,
                const Tissue& tissue);

  const std::string& text() const { return text_; }
  void write(const std::string& path) const;

private:
  std::string text_;
  int snapshot_every_ = 0;
};

/// Tidy per-step reward-term CSV for one episode.
std::string steps_to_csv(const std::vector<RewardBreakdown>& steps);

/// (env step, eval return) learning-curve CSV.
std::string curve_to_csv(const std::vector<std::pair<int, double>>& curve);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace biovolt
