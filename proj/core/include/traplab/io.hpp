#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "traplab/coupling.hpp"
#include "traplab/environment.hpp"
#include "traplab/stats.hpp"
#include "traplab/tails.hpp"
#include "traplab/trap_walk.hpp"

namespace traplab {

// Round-trip-exact, locale-independent float formatting, shared by all
// writers so identical runs produce byte-identical files.
std::string format_double(double v);

// CSV files start with "# config: <one-line JSON>"; NDJSON files start with a
// {"type":"meta",...} line carrying the same echo. Readers skip both.

void write_tail_curve_csv(const std::filesystem::path& path, const TailCurve& curve,
                          const std::string& config_echo);

void write_fit_json(const std::filesystem::path& path, const FitReport& fit,
                    const std::string& config_echo);

void write_marginal_csv(const std::filesystem::path& path, const TrapEnvironment& env,
                        std::span<const double> probs, const std::string& config_echo);

void write_trajectory_ndjson(const std::filesystem::path& path, const Trajectory& traj,
                             const std::string& config_echo);

void write_environment_ndjson(const std::filesystem::path& path, const TrapEnvironment& env,
                              const std::string& config_echo);
TrapEnvironment read_environment_ndjson(const std::filesystem::path& path);

void write_measure_ndjson(const std::filesystem::path& path, const AtomicMeasure& m,
                          const std::string& config_echo);
AtomicMeasure read_measure_ndjson(const std::filesystem::path& path);

void write_coupling_map_csv(const std::filesystem::path& path, const CouplingMap& map,
                            const std::string& config_echo);

} // namespace traplab
