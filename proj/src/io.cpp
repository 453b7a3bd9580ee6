#include "secbf/io.hpp"

#include <cmath>

namespace secbf {

using nlohmann::json;

namespace {

RMat real_grid(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) throw DataError(std::string(what) + ": expected 2-D array");
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  RMat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw DataError(std::string(what) + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw DataError(std::string(what) + ": non-numeric entry");
      m(Eigen::Index(r), Eigen::Index(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

json grid(const RMat& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

template <class T>
void read(const json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace

json matrix_to_json(const CMat& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", grid(m.real())}, {"im", grid(m.imag())}};
}

CMat matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("re")) throw DataError("matrix: expected object with \"re\"");
  const RMat re = real_grid(j.at("re"), "matrix re");
  try {
    if (j.contains("rows") && j.at("rows").get<Eigen::Index>() != re.rows())
      throw DataError("matrix: \"rows\" disagrees with the data");
    if (j.contains("cols") && j.at("cols").get<Eigen::Index>() != re.cols())
      throw DataError("matrix: \"cols\" disagrees with the data");
  } catch (const json::exception& e) {
    throw DataError(std::string("matrix: ") + e.what());
  }
  if (!j.contains("im")) return re.cast<cd>();
  const RMat im = real_grid(j.at("im"), "matrix im");
  if (im.rows() != re.rows() || im.cols() != re.cols()) throw DataError("matrix: re/im shapes differ");
  CMat m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

json channels_to_json(const ChannelPair& ch) {
  return {{"h_info", matrix_to_json(ch.info_raw())},
          {"h_energy", matrix_to_json(ch.energy_raw())},
          {"sigma2_info_dbm", watts_to_dbm(ch.sigma2_info())},
          {"sigma2_energy_dbm", watts_to_dbm(ch.sigma2_energy())},
          {"zeta", ch.zeta()}};
}

ChannelPair channels_from_json(const json& j) {
  try {
    return ChannelPair(matrix_from_json(j.at("h_info")), matrix_from_json(j.at("h_energy")),
                       dbm_to_watts(j.at("sigma2_info_dbm").get<double>()),
                       dbm_to_watts(j.at("sigma2_energy_dbm").get<double>()),
                       j.value("zeta", 0.5));
  } catch (const json::exception& e) {
    throw DataError(std::string("channels: ") + e.what());
  }
}

void apply_config_json(const json& j, ScenarioConfig& cfg) {
  if (!j.is_object()) throw DataError("config: expected a JSON object");
  try {
    read(j, "nt", cfg.n_t);
    read(j, "ni", cfg.n_i);
    read(j, "ne", cfg.n_e);
    read(j, "streams", cfg.streams);
    read(j, "pt_dbm", cfg.pt_dbm);
    read(j, "pe_dbm", cfg.pe_dbm);
    read(j, "sigma2_dbm", cfg.sigma2_dbm);
    read(j, "zeta", cfg.zeta);
    read(j, "pathloss_db", cfg.pathloss_db);
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("seed")) cfg.seeds = {j.at("seed").get<std::uint64_t>()};
    if (j.contains("method")) cfg.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("eps")) cfg.ibcd.eps = cfg.ibcd.eps_bisection = j.at("eps").get<double>();
    read(j, "max_iter", cfg.ibcd.max_iter);
  } catch (const json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
}

json config_to_json(const ScenarioConfig& cfg) {
  return {{"nt", cfg.n_t},
          {"ni", cfg.n_i},
          {"ne", cfg.n_e},
          {"streams", cfg.streams},
          {"pt_dbm", cfg.pt_dbm},
          {"pe_dbm", cfg.pe_dbm},
          {"sigma2_dbm", cfg.sigma2_dbm},
          {"zeta", cfg.zeta},
          {"pathloss_db", cfg.pathloss_db},
          {"seeds", cfg.seeds},
          {"method", to_string(cfg.method)},
          {"eps", cfg.ibcd.eps},
          {"max_iter", cfg.ibcd.max_iter}};
}

json outcome_to_json(const ChannelPair& ch, const DesignBudget& budget, const SolveOutcome& out) {
  const CMat cov = out.V_E.size() ? CMat(out.V * out.V.adjoint() + out.V_E * out.V_E.adjoint())
                                  : CMat(out.V * out.V.adjoint());
  json j{{"method", to_string(out.method)},
         {"rate_bits", out.rate_bits},
         {"iterations", out.iterations},
         {"nonpositive_rate", out.nonpositive_rate},
         {"power_w", std::real(cov.trace())},
         {"harvested_w", harvested_power(ch, cov)},
         {"power_budget_w", budget.power_total},
         {"harvest_target_w", budget.power_harvest},
         {"V", matrix_to_json(out.V)}};
  if (out.V_E.size()) j["V_E"] = matrix_to_json(out.V_E);
  if (out.trace) j["rates_bits"] = out.trace->rates_bits;
  return j;
}

}  // namespace secbf
