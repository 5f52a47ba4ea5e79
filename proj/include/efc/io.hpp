#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "efc/equilibrium.hpp"
#include "efc/measures.hpp"
#include "efc/simulator.hpp"

namespace efc {

// Characteristics document:
//   { "schema_version": 1, "c_e": .., "c_k": ..,
//     "nu_disl": [ {"weight": w, "masses": [..]}, .. ], "nu_coag": [..] }
// Unknown keys are rejected.
Characteristics characteristics_from_json(const nlohmann::json& doc);
Characteristics characteristics_from_json_text(const std::string& text);
nlohmann::json characteristics_to_json(const Characteristics& chars);

nlohmann::json validation_report_to_json(const ValidationReport& report);
nlohmann::json collision_rates_to_json(int b, const CollisionRates& rates);
nlohmann::json comes_down_report_to_json(const ComesDownReport& report);
nlohmann::json equilibrium_report_to_json(const EquilibriumReport& report);
// aligned-column human summary of the same report
std::string equilibrium_report_to_text(const EquilibriumReport& report);

// shortest exactly-round-tripping decimal form
std::string format_double(double value);

// CSV schemas (one header line each):
//   distribution:          index,partition,weight
//   partition trajectory:  time,event,block_count,dust_fraction,state
//   event log:             time,event_kind,detail
//   scalar trajectory:     time,value
void write_distribution_csv(const std::vector<Partition>& states, const DistributionOnPn& dist,
                            const std::string& path);
void write_partition_trajectory_csv(const PartitionTrajectory& traj, const std::string& path);
void write_event_log(const PartitionTrajectory& traj, const std::string& path);
void write_scalar_trajectory_csv(const ScalarTrajectory& traj, const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::uint64_t fnv1a(std::string_view bytes);
std::string read_text_file(const std::string& path);

}  // namespace efc
