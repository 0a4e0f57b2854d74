#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "l0bb/datafit.hpp"
#include "l0bb/penalty.hpp"

namespace l0bb::io {

using Json = nlohmann::json;

/// Header-free, comma-separated, one matrix row per line.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& A);

/// One value per line (a single comma-separated line is accepted too).
Eigen::VectorXd read_vector_csv(const std::filesystem::path& path);
void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& v);

/// "L0BBMAT1", uint64 rows, uint64 cols, row-major little-endian doubles.
Eigen::MatrixXd read_matrix_binary(const std::filesystem::path& path);
void write_matrix_binary(const std::filesystem::path& path, const Eigen::MatrixXd& A);

/// +inf is null, -inf is "-inf", NaN is rejected.
Json ext_real(double v);
double ext_real_from(const Json& j, const std::string& field);

LossFamily loss_from_string(const std::string& name, const std::string& field);
PenaltyModel penalty_from_json(const Json& j, const std::string& field);
Json penalty_to_json(const PenaltyModel& h);

struct Config {
  LossFamily loss = LossFamily::LeastSquares;
  PenaltyModel penalty;
  std::optional<double> lambda;
  std::optional<int> num_points;
  std::optional<double> ratio_min;
};

/// {"loss": {"family": ...}, "penalty": {"family": ..., ...}, "lambda": ..., "path": {"points", "ratio_min"}}
Config config_from_json(const Json& j);
Json config_to_json(const Config& c);

struct ProblemFile {
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
  Config config;
};

/// Reads A.csv (or A.bin), y.csv and config.json from a directory.
ProblemFile load_problem(const std::filesystem::path& dir);
void save_problem(const std::filesystem::path& dir, const ProblemFile& problem, bool binary = false);

}  // namespace l0bb::io
