#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slk/nonlocal.hpp"
#include "slk/report.hpp"
#include "slk/solver.hpp"

namespace slk {

/// Named preset or inline bounds. Presets: constant, holder, mixed, bumped.
struct KernelConfig {
  std::string name = "constant";
  double a = 1.0;
  double amp = 0.4;
  double beta = 0.6;
  double period = 2 * M_PI;
  std::optional<double> kappa1, kappa2, c3;
};

/// Every threshold used by an audit; echoed in the report config.
struct Tolerances {
  double symbol = 1e-3;
  double density = 1e-4;
  double integrability = 0.02;
  double decay_factor = 3.0;
  double mollifier_factor = 4.0;
  double fd_stability = 1.5;
  double gain_factor = 1.5;
  double f_growth = 2.0;
  double resolvent = 1e-2;
  double apriori_factor = 2.0;
  double frozen_factor = 1.3;
  double freezing_factor = 5.0;
  double sharpness = 0.1;
  double zero_order = 1e-3;
  double first_order_factor = 2.0;
  double mc = 0.02;
};

struct ExperimentConfig {
  std::string command;
  double alpha = 0.8;
  double beta = 0.3;
  int dim = 1;
  KernelConfig kernel;
  std::vector<std::string> fields;
  std::vector<int> grids = {128, 256, 512};
  double lambda = 1.0;
  Tolerances tol;
  std::uint64_t seed = 1;
  std::string output;
  std::string format = "json";

  // Family-specific inputs.
  double t = 1.0;
  double xmax = 10.0;
  int n = 201;
  double xi = 1.0;
  double gamma = 0.5;
  std::string zero_order;
  std::string drift;
  std::string dump_matrix;
  double x0 = 1.0;
  double eps = 0.3;
  std::vector<double> r_list = {1, 2, 4, 8};
  double delta = 0.15;

  /// Throws InvalidArgument on inadmissible exponents or tolerances.
  void validate() const;
  std::string hash() const;
};

nlohmann::json to_json(const ExperimentConfig& c);
/// Keys present in j override the corresponding fields of base.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

const std::vector<std::string>& command_names();

KernelSpec build_kernel(const KernelConfig& k, double alpha, int dim);
/// "damp" (-0.5 - 0.3 sin x_1) or "const-<v>".
std::function<double(const Point&)> zero_order_term(const std::string& id);
/// "sin" (0.3 sin x_1 e_1) or "const-<v>" (v e_1).
std::function<Point(const Point&)> drift_term(const std::string& id);

/// Validates, dispatches and returns the finalized report (timestamp left empty).
VerificationReport run(const ExperimentConfig& c);

}  // namespace slk
