#include "efc/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace efc {

namespace {

using nlohmann::json;

void expect_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                 const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

DiscreteMeasureOnSimplex measure_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ValidationError(where + " must be an array of atoms");
  DiscreteMeasureOnSimplex measure;
  for (const auto& entry : arr) {
    expect_keys(entry, {"weight", "masses"}, where + " atom");
    if (!entry.contains("weight") || !entry.contains("masses"))
      throw ValidationError(where + " atoms need 'weight' and 'masses'");
    if (!entry["masses"].is_array()) throw ValidationError(where + " masses must be an array");
    measure.add(entry["weight"].get<double>(),
                RankedMassVector::from(entry["masses"].get<std::vector<double>>()));
  }
  return measure;
}

}  // namespace

Characteristics characteristics_from_json(const json& doc) {
  expect_keys(doc, {"schema_version", "c_e", "c_k", "nu_disl", "nu_coag"}, "characteristics");
  if (doc.contains("schema_version") && doc["schema_version"].get<int>() != 1)
    throw ValidationError("unsupported characteristics schema version");
  Characteristics chars;
  if (doc.contains("c_e")) chars.erosion_rate = doc["c_e"].get<double>();
  if (doc.contains("c_k")) chars.kingman_rate = doc["c_k"].get<double>();
  if (doc.contains("nu_disl")) chars.dislocation = measure_from_json(doc["nu_disl"], "nu_disl");
  if (doc.contains("nu_coag")) chars.coagulation = measure_from_json(doc["nu_coag"], "nu_coag");
  return chars;
}

Characteristics characteristics_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& err) {
    throw ValidationError(std::string("characteristics JSON malformed: ") + err.what());
  }
  return characteristics_from_json(doc);
}

nlohmann::json characteristics_to_json(const Characteristics& chars) {
  auto measure_to_json = [](const DiscreteMeasureOnSimplex& measure) {
    json arr = json::array();
    for (const auto& atom : measure.atoms())
      arr.push_back({{"weight", atom.weight}, {"masses", atom.vector.masses()}});
    return arr;
  };
  return json{{"schema_version", 1},
              {"c_e", chars.erosion_rate},
              {"c_k", chars.kingman_rate},
              {"nu_disl", measure_to_json(chars.dislocation)},
              {"nu_coag", measure_to_json(chars.coagulation)}};
}

nlohmann::json validation_report_to_json(const ValidationReport& report) {
  return json{{"valid", report.valid()},
              {"violations", report.violations},
              {"degenerate", report.degenerate},
              {"dislocation_mass", report.dislocation_mass},
              {"coagulation_mass", report.coagulation_mass},
              {"coag_sum_sq_integral", report.coag_sum_sq_integral},
              {"disl_one_minus_sq_integral", report.disl_one_minus_sq_integral},
              {"coag_sum_integral", report.coag_sum_integral}};
}

nlohmann::json collision_rates_to_json(int b, const CollisionRates& rates) {
  return json{{"b", b},
              {"total_collision_rate", rates.total_collision_rate},
              {"block_decrease_rate", rates.block_decrease_rate},
              {"tagged_capture_rate", rates.tagged_capture_rate},
              {"block_decrease_stderr", rates.block_decrease_stderr},
              {"monte_carlo", rates.monte_carlo}};
}

nlohmann::json comes_down_report_to_json(const ComesDownReport& report) {
  return json{{"horizon", report.horizon},
              {"block_decrease_rates", report.block_decrease_rates},
              {"partial_sums", report.partial_sums},
              {"conservative_coag_mass", report.conservative_coag_mass},
              {"gamma_has_monte_carlo", report.gamma_has_monte_carlo},
              {"verdict", report.verdict}};
}

nlohmann::json equilibrium_report_to_json(const EquilibriumReport& report) {
  json block_bounds = json::array();
  for (const auto& row : report.block_count_bounds)
    block_bounds.push_back({{"K", row.K},
                            {"mass", row.mass},
                            {"reentry_rate", row.reentry_rate},
                            {"min_exit_rate", row.min_exit_rate},
                            {"bound", row.bound},
                            {"holds", row.holds}});
  json balance = json::array();
  for (const auto& row : report.balance_rows)
    balance.push_back({{"K", row.K}, {"lhs", row.lhs}, {"rhs", row.rhs}, {"holds", row.holds}});
  json dust = json::array();
  for (const auto& row : report.dust_bounds)
    dust.push_back({{"b", row.b},
                    {"exit_rate", row.exit_rate},
                    {"isolated_tail_mass", row.isolated_tail_mass},
                    {"bound", row.bound},
                    {"isolated_low_mass", row.isolated_low_mass},
                    {"holds", row.holds}});
  return json{{"n", report.n},
              {"closed_class_size", report.closed_class_size},
              {"block_count_marginal", report.block_count_marginal},
              {"isolated_one_mass", report.isolated_one_mass},
              {"pair_split_bound", report.pair_split_bound},
              {"fragmentates_quickly", report.fragmentates_quickly},
              {"coalesces_quickly", report.coalesces_quickly},
              {"dislocation_mass", report.dislocation_mass},
              {"coag_sum_integral", report.coag_sum_integral},
              {"block_count_bounds", block_bounds},
              {"balance_rows", balance},
              {"dust_bounds", dust}};
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string equilibrium_report_to_text(const EquilibriumReport& report) {
  std::ostringstream out;
  char line[160];
  out << "equilibrium summary, n = " << report.n << "\n";
  out << "closed class size: " << report.closed_class_size << "\n";
  out << "regime: "
      << (report.fragmentates_quickly ? "fragmentates quickly (c_e > 0)"
                                      : "fragmentates slowly (c_e = 0)")
      << ", "
      << (report.coalesces_quickly ? "coalesces quickly (c_k > 0)"
                                   : "coalesces slowly (c_k = 0)")
      << "\n\n";
  out << "  K     rho(#blocks = K)\n";
  for (std::size_t i = 0; i < report.block_count_marginal.size(); ++i) {
    std::snprintf(line, sizeof(line), "%3zu     %-24.16g\n", i + 1,
                  report.block_count_marginal[i]);
    out << line;
  }
  if (!report.block_count_bounds.empty()) {
    out << "\nblock-count tail bounds (consistent with the vanishing finite-count limit)\n";
    out << "  K          a_K      reentry     min exit        bound  holds\n";
    for (const auto& row : report.block_count_bounds) {
      std::snprintf(line, sizeof(line), "%3d  %11.5g  %11.5g  %11.5g  %11.5g  %5s\n", row.K,
                    row.mass, row.reentry_rate, row.min_exit_rate, row.bound,
                    row.holds ? "yes" : "NO");
      out << line;
    }
  }
  if (report.balance_applicable) {
    out << "\nbinary birth/death balance rows\n";
    out << "  K          lhs          rhs  holds\n";
    for (const auto& row : report.balance_rows) {
      std::snprintf(line, sizeof(line), "%3d  %11.5g  %11.5g  %5s\n", row.K, row.lhs, row.rhs,
                    row.holds ? "yes" : "NO");
      out << line;
    }
  }
  out << "\nisolated-element mass rho(I_n) = " << format_double(report.isolated_one_mass)
      << " (pair split bound q_2 = " << format_double(report.pair_split_bound) << ")\n";
  if (!report.dust_bounds.empty()) {
    out << "  b    exit rate    tail mass        bound   low mass  holds\n";
    for (const auto& row : report.dust_bounds) {
      std::snprintf(line, sizeof(line), "%3d  %11.5g  %11.5g  %11.5g  %10.5g  %5s\n", row.b,
                    row.exit_rate, row.isolated_tail_mass, row.bound, row.isolated_low_mass,
                    row.holds ? "yes" : "NO");
      out << line;
    }
  }
  return out.str();
}

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

}  // namespace

void write_distribution_csv(const std::vector<Partition>& states, const DistributionOnPn& dist,
                            const std::string& path) {
  if (states.size() != dist.weights.size())
    throw ValidationError("state list and distribution length differ");
  auto out = open_for_write(path);
  out << "index,partition,weight\n";
  for (std::size_t i = 0; i < states.size(); ++i)
    out << i << ',' << states[i].to_string() << ',' << format_double(dist.weights[i]) << '\n';
  if (!out.flush()) throw IoError("failed writing " + path);
}

void write_partition_trajectory_csv(const PartitionTrajectory& traj, const std::string& path) {
  auto out = open_for_write(path);
  out << "time,event,block_count,dust_fraction,state\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << format_double(traj.times[i]) << ',' << event_kind_name(traj.events[i]) << ','
        << traj.block_counts[i] << ','
        << format_double(static_cast<double>(traj.dust_counts[i]) / traj.n) << ',';
    if (!traj.states.empty()) out << traj.states[i].to_string();
    out << '\n';
  }
  if (!out.flush()) throw IoError("failed writing " + path);
}

void write_event_log(const PartitionTrajectory& traj, const std::string& path) {
  auto out = open_for_write(path);
  out << "time,event_kind,detail\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << format_double(traj.times[i]) << ',' << event_kind_name(traj.events[i]) << ',';
    if (!traj.states.empty())
      out << traj.states[i].to_string();
    else
      out << "blocks=" << traj.block_counts[i];
    out << '\n';
  }
  if (!out.flush()) throw IoError("failed writing " + path);
}

void write_scalar_trajectory_csv(const ScalarTrajectory& traj, const std::string& path) {
  auto out = open_for_write(path);
  out << "time,value\n";
  for (std::size_t i = 0; i < traj.size(); ++i)
    out << format_double(traj.times[i]) << ',' << format_double(traj.values[i]) << '\n';
  if (!out.flush()) throw IoError("failed writing " + path);
}

void write_text_file(const std::string& path, const std::string& content) {
  auto out = open_for_write(path);
  out << content;
  if (!out.flush()) throw IoError("failed writing " + path);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) h = (h ^ c) * 1099511628211ull;
  return h;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace efc
