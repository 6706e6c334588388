#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtd/analytic.hpp"
#include "qtd/experiments.hpp"
#include "qtd/model.hpp"
#include "qtd/oracle.hpp"

namespace qtd::io {

using Json = nlohmann::json;

/// "%.17g".
std::string format_double(double v);

/// Parses a file; ConfigError("config") when it is missing or malformed.
Json load_json(const std::filesystem::path& path);

/// Rejects keys outside `allowed`, naming the first stray one as `where.key`.
void require_keys(const Json& obj, const std::vector<std::string>& allowed, const std::string& where);

PhysicalParams parse_params(const Json& j);

/// State records in SI ({"z1_m", ...}) or already dimensionless ({"zeta1", ...}).
/// Returned in the internal frame (heights in units of c^2/g).
StateSpec parse_state(const Json& j, const DimensionlessScales& sc);

QuadratureSpec parse_quadrature(const Json& j, QuadratureSpec base);

struct OracleConfig {
  double zeta = 0;
  double r = 1e3;
  double s_max = 10;
  double s_compare = 5;
  std::optional<ModeGrid> grid;  // standard grid when absent
  OracleOptions options;
};

struct TcohConfig {
  CoherenceParams params;
  double z1_m = 0;
  double z2_m = 0;
};

struct RunConfig {
  PhysicalParams params = earth_aluminium_preset();
  std::vector<StateSpec> states;  // internal frame
  std::optional<QuadratureSpec> quadrature;
  Axis spectrum_nu{-5, 5, 4001};
  Axis survival_s{0, 10, 101};
  std::optional<RateMethod> rate_method;
  OracleConfig oracle;
  std::optional<SweepSpec> sweep;
  std::optional<TcohConfig> tcoh;
  std::uint64_t seed = 20240101;
};

/// Exhaustive schema check; unknown keys at any level are errors.
RunConfig parse_run_config(const Json& j);

void write_text(const std::filesystem::path& path, const std::string& text);

std::string rate_json(const RateResult& r);
std::string spectrum_csv(const SpectrumResult& s);
std::string survival_csv(const std::vector<double>& s, const std::vector<double>& p);
std::string oracle_alpha_csv(const OracleRun& run);
std::string oracle_beta_csv(const OracleRun& run);
std::string oracle_summary_json(const SinglePoleReport& rep);
std::string figure1_csv(const std::vector<SweepRow>& rows);
std::string figure2_csv(const LinePair& lines);
std::string scan_json(const ScanReport& rep);
std::string tcoh_json(const CoherenceTerms& full, double reduced, const TermReport& report);

}  // namespace qtd::io
