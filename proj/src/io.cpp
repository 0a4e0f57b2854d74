#include "l0bb/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "l0bb/errors.hpp"

namespace l0bb::io {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'L', '0', 'B', 'B', 'M', 'A', 'T', '1'};

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ConfigError(path.string(), "cannot open for reading");
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw ConfigError(path.string(), "cannot open for writing");
  out.precision(std::numeric_limits<double>::max_digits10);
  return out;
}

double parse_number(const std::string& token, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ConfigError(where, "not a number: '" + token + "'");
  }
  while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) ++used;
  if (used != token.size()) throw ConfigError(where, "not a number: '" + token + "'");
  if (!std::isfinite(v)) throw ConfigError(where, "value must be finite");
  return v;
}

std::vector<std::vector<double>> read_rows(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string token;
    int col = 0;
    while (std::getline(ss, token, ',')) {
      ++col;
      row.push_back(parse_number(token, path.filename().string() + "[" + std::to_string(lineno) +
                                            "," + std::to_string(col) + "]"));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename T>
T json_get(const Json& j, const std::string& key, const std::string& field) {
  if (!j.contains(key)) throw ConfigError(field + "." + key, "missing");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(field + "." + key, "has the wrong type");
  }
}

}  // namespace

Eigen::MatrixXd read_matrix_csv(const fs::path& path) {
  const auto rows = read_rows(path);
  if (rows.empty()) throw ConfigError(path.filename().string(), "empty matrix");
  const std::size_t n = rows.front().size();
  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != n) {
      throw ConfigError(path.filename().string(), "row " + std::to_string(r + 1) + " has " +
                                                      std::to_string(rows[r].size()) +
                                                      " entries, expected " + std::to_string(n));
    }
    for (std::size_t c = 0; c < n; ++c) A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return A;
}

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& A) {
  std::ofstream out = open_out(path);
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
      if (c) out << ',';
      out << A(r, c);
    }
    out << '\n';
  }
}

Eigen::VectorXd read_vector_csv(const fs::path& path) {
  const auto rows = read_rows(path);
  std::vector<double> flat;
  if (rows.size() == 1) {
    flat = rows.front();
  } else {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != 1) {
        throw ConfigError(path.filename().string(), "line " + std::to_string(r + 1) + " must hold one value");
      }
      flat.push_back(rows[r][0]);
    }
  }
  if (flat.empty()) throw ConfigError(path.filename().string(), "empty vector");
  return Eigen::Map<Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

void write_vector_csv(const fs::path& path, const Eigen::VectorXd& v) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i] << '\n';
}

Eigen::MatrixXd read_matrix_binary(const fs::path& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  char magic[8];
  std::uint64_t dims[2];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw ConfigError(path.filename().string(), "bad magic");
  }
  if (!in.read(reinterpret_cast<char*>(dims), sizeof dims)) {
    throw ConfigError(path.filename().string(), "truncated header");
  }
  if (dims[0] == 0 || dims[1] == 0 || dims[0] > (1u << 30) || dims[1] > (1u << 30)) {
    throw ConfigError(path.filename().string(), "bad dimensions");
  }
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> M(
      static_cast<Eigen::Index>(dims[0]), static_cast<Eigen::Index>(dims[1]));
  const auto bytes = static_cast<std::streamsize>(sizeof(double) * M.size());
  if (!in.read(reinterpret_cast<char*>(M.data()), bytes)) {
    throw ConfigError(path.filename().string(), "truncated data");
  }
  if (!M.allFinite()) throw ConfigError(path.filename().string(), "values must be finite");
  return M;
}

void write_matrix_binary(const fs::path& path, const Eigen::MatrixXd& A) {
  std::ofstream out = open_out(path, std::ios::binary);
  const std::uint64_t dims[2] = {static_cast<std::uint64_t>(A.rows()), static_cast<std::uint64_t>(A.cols())};
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> M = A;
  out.write(kMagic, 8);
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(M.data()), static_cast<std::streamsize>(sizeof(double) * M.size()));
}

Json ext_real(double v) {
  if (std::isnan(v)) throw NumericalError("cannot encode NaN");
  if (v == kInf) return nullptr;
  if (v == -kInf) return "-inf";
  return v;
}

double ext_real_from(const Json& j, const std::string& field) {
  if (j.is_null()) return kInf;
  if (j.is_string() && j.get<std::string>() == "-inf") return -kInf;
  if (j.is_number()) return j.get<double>();
  throw ConfigError(field, "expected a number, null or \"-inf\"");
}

LossFamily loss_from_string(const std::string& name, const std::string& field) {
  for (LossFamily f : {LossFamily::LeastSquares, LossFamily::Logistic, LossFamily::SquaredHinge}) {
    if (name == loss_name(f)) return f;
  }
  throw ConfigError(field, "unknown loss family '" + name + "'");
}

PenaltyModel penalty_from_json(const Json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, "must be an object");
  const std::string family = json_get<std::string>(j, "family", field);
  auto num = [&](const char* key) { return json_get<double>(j, key, field); };
  try {
    if (family == "BigM") return PenaltyModel::big_m(num("M"));
    if (family == "L1") return PenaltyModel::l1(num("sigma"));
    if (family == "PowerP") return PenaltyModel::power(num("sigma"), num("p"));
    if (family == "L1L2") return PenaltyModel::l1_l2(num("sigma"), num("sigma2"));
    if (family == "BigML1") return PenaltyModel::big_m_l1(num("M"), num("sigma"));
    if (family == "BigML2") return PenaltyModel::big_m_l2(num("M"), num("sigma"));
    if (family == "PositiveL1") return PenaltyModel::positive_l1(num("sigma"));
    if (family == "PositiveL2") return PenaltyModel::positive_l2(num("sigma"));
  } catch (const ConfigError& e) {
    if (e.field().empty() || e.field().find('.') != std::string::npos) throw;
    throw ConfigError(field + "." + e.field(), e.what() + e.field().size() + 2);
  }
  throw ConfigError(field + ".family", "unknown penalty family '" + family + "'");
}

Json penalty_to_json(const PenaltyModel& h) {
  Json j;
  j["family"] = std::string(family_name(h.family));
  switch (h.family) {
    case PenaltyFamily::BigM: j["M"] = h.M; break;
    case PenaltyFamily::L1:
    case PenaltyFamily::PositiveL1:
    case PenaltyFamily::PositiveL2: j["sigma"] = h.sigma; break;
    case PenaltyFamily::PowerP:
      j["sigma"] = h.sigma;
      j["p"] = h.p;
      break;
    case PenaltyFamily::L1L2:
      j["sigma"] = h.sigma;
      j["sigma2"] = h.sigma2;
      break;
    case PenaltyFamily::BigML1:
    case PenaltyFamily::BigML2:
      j["M"] = h.M;
      j["sigma"] = h.sigma;
      break;
  }
  return j;
}

Config config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config", "must be a JSON object");
  Config c;
  if (!j.contains("loss")) throw ConfigError("config.loss", "missing");
  const Json& loss = j.at("loss");
  if (loss.is_string()) {
    c.loss = loss_from_string(loss.get<std::string>(), "config.loss");
  } else {
    c.loss = loss_from_string(json_get<std::string>(loss, "family", "config.loss"), "config.loss.family");
  }
  if (!j.contains("penalty")) throw ConfigError("config.penalty", "missing");
  c.penalty = penalty_from_json(j.at("penalty"), "config.penalty");
  if (j.contains("lambda")) {
    const double lambda = json_get<double>(j, "lambda", "config");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("config.lambda", "must be positive");
    c.lambda = lambda;
  }
  if (j.contains("path")) {
    const Json& path = j.at("path");
    if (path.contains("points")) c.num_points = json_get<int>(path, "points", "config.path");
    if (path.contains("ratio_min")) c.ratio_min = json_get<double>(path, "ratio_min", "config.path");
  }
  return c;
}

Json config_to_json(const Config& c) {
  Json j;
  j["loss"] = {{"family", std::string(loss_name(c.loss))}};
  j["penalty"] = penalty_to_json(c.penalty);
  if (c.lambda) j["lambda"] = *c.lambda;
  if (c.num_points || c.ratio_min) {
    Json path = Json::object();
    if (c.num_points) path["points"] = *c.num_points;
    if (c.ratio_min) path["ratio_min"] = *c.ratio_min;
    j["path"] = path;
  }
  return j;
}

ProblemFile load_problem(const fs::path& dir) {
  ProblemFile pf;
  if (fs::exists(dir / "A.bin")) {
    pf.A = read_matrix_binary(dir / "A.bin");
  } else {
    pf.A = read_matrix_csv(dir / "A.csv");
  }
  pf.y = read_vector_csv(dir / "y.csv");
  if (pf.y.size() != pf.A.rows()) {
    throw ConfigError("y", "length " + std::to_string(pf.y.size()) + " does not match the " +
                               std::to_string(pf.A.rows()) + " rows of A");
  }
  std::ifstream in = open_in(dir / "config.json");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  pf.config = config_from_json(j);
  return pf;
}

void save_problem(const fs::path& dir, const ProblemFile& problem, bool binary) {
  fs::create_directories(dir);
  if (binary) {
    write_matrix_binary(dir / "A.bin", problem.A);
  } else {
    write_matrix_csv(dir / "A.csv", problem.A);
  }
  write_vector_csv(dir / "y.csv", problem.y);
  std::ofstream out = open_out(dir / "config.json");
  out << config_to_json(problem.config).dump(2) << '\n';
}

}  // namespace l0bb::io
