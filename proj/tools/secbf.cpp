// Command-line front end: solve one instance, record convergence traces, run
// parameter sweeps, or generate random channels.
//
// Exit codes: 0 success, 1 bad input, 2 infeasible scenario, 3 solver failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "secbf/bench.hpp"
#include "secbf/io.hpp"

using namespace secbf;
using nlohmann::json;

namespace {

constexpr int kBadInput = 1;
constexpr int kInfeasible = 2;
constexpr int kSolverFailure = 3;

// Scenario flags shared by every subcommand. Unset flags fall back to the
// config file and then to the built-in defaults.
struct ScenarioFlags {
  std::string config;
  std::optional<long> nt, ni, ne, streams, max_iter;
  std::optional<double> pt_dbm, pe_dbm, sigma2_dbm, zeta, pathloss_db, eps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON file with scenario keys")->check(CLI::ExistingFile);
    app->add_option("--nt", nt, "transmit antennas");
    app->add_option("--ni", ni, "information receiver antennas");
    app->add_option("--ne", ne, "energy receiver antennas");
    app->add_option("--streams,-d", streams, "data streams");
    app->add_option("--pt-dbm", pt_dbm, "total transmit power");
    app->add_option("--pe-dbm", pe_dbm, "harvested power target");
    app->add_option("--sigma2-dbm", sigma2_dbm, "receiver noise power");
    app->add_option("--zeta", zeta, "energy conversion efficiency");
    app->add_option("--pathloss-db", pathloss_db, "channel attenuation");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--method", method, "single_stream | full_stream | ibcd | an_ibcd");
    app->add_option("--eps", eps, "stopping tolerance for the outer loop and the bisection");
    app->add_option("--max-iter", max_iter, "outer iteration cap");
  }

  ScenarioConfig resolve(const json& file) const {
    ScenarioConfig cfg;
    apply_config_json(file, cfg);
    if (nt) cfg.n_t = *nt;
    if (ni) cfg.n_i = *ni;
    if (ne) cfg.n_e = *ne;
    if (streams) cfg.streams = *streams;
    if (pt_dbm) cfg.pt_dbm = *pt_dbm;
    if (pe_dbm) cfg.pe_dbm = *pe_dbm;
    if (sigma2_dbm) cfg.sigma2_dbm = *sigma2_dbm;
    if (zeta) cfg.zeta = *zeta;
    if (pathloss_db) cfg.pathloss_db = *pathloss_db;
    if (seed) cfg.seeds = {*seed};
    if (method) cfg.method = parse_method(*method);
    if (eps) cfg.ibcd.eps = cfg.ibcd.eps_bisection = *eps;
    if (max_iter) cfg.ibcd.max_iter = int(*max_iter);
    return cfg;
  }
};

json read_json(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

template <class T>
T pick(const std::optional<T>& flag, const json& file, const char* key, T fallback) {
  if (flag) return *flag;
  if (file.contains(key)) return file.at(key).get<T>();
  return fallback;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << text;
}

// Channels from a file (dimensions then follow the file) or drawn from the seed.
ChannelPair load_channels(const std::string& path, ScenarioConfig& cfg) {
  if (path.empty()) return gen_channels(cfg, derive_seed(cfg.seeds.front(), 0));
  ChannelPair ch = channels_from_json(read_json(path));
  cfg.n_t = ch.n_t();
  cfg.n_i = ch.n_i();
  cfg.n_e = ch.n_e();
  return ch;
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw DataError("bad axis value '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secrecy-rate beamforming for MIMO wireless information and power transfer"};
  app.require_subcommand(1);

  ScenarioFlags flags;
  std::string out_path, channels_path;
  std::optional<int> starts, channels_per_point;
  std::optional<unsigned> threads;
  std::optional<std::string> axis, values, arms;

  auto* solve = app.add_subcommand("solve", "solve one instance and print the result as JSON");
  flags.attach(solve);
  solve->add_option("--channels", channels_path, "channel JSON file (otherwise drawn from --seed)")
      ->check(CLI::ExistingFile);
  solve->add_option("--out", out_path, "output file (default stdout)");

  auto* trace = app.add_subcommand("trace", "convergence traces from several warmstarts as CSV");
  flags.attach(trace);
  trace->add_option("--channels", channels_path, "channel JSON file (otherwise drawn from --seed)")
      ->check(CLI::ExistingFile);
  trace->add_option("--starts", starts, "number of warmstarts (default 5)");
  trace->add_option("--out", out_path, "output file (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "average rates over random channels along one axis as CSV");
  flags.attach(sweep);
  sweep->add_option("--axis", axis, "pt_dbm | pe_dbm | nt");
  sweep->add_option("--values", values, "ascending comma-separated axis values");
  sweep->add_option("--channels-per-point", channels_per_point, "channels per axis value (default 100)");
  sweep->add_option("--arms", arms, "comma-separated methods compared on the same channels (default --method)");
  sweep->add_option("--threads", threads, "worker threads (default: all cores)");
  sweep->add_option("--out", out_path, "output file (default stdout)");

  auto* gen = app.add_subcommand("gen-channels", "draw one channel pair and print it as JSON");
  flags.attach(gen);
  gen->add_option("--out", out_path, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    const json file = read_json(flags.config);
    ScenarioConfig cfg = flags.resolve(file);
    if (channels_path.empty() && file.contains("channels")) channels_path = file.at("channels").get<std::string>();

    if (*solve) {
      const ChannelPair ch = load_channels(channels_path, cfg);
      if (cfg.method == Method::SingleStream) cfg.streams = 1;
      if (cfg.method == Method::FullStream) cfg.streams = cfg.n_t;
      const auto outcome = solve_instance(cfg, ch, derive_seed(cfg.seeds.front(), 1));
      json j = outcome_to_json(ch, cfg.budget(), outcome);
      j["config"] = config_to_json(cfg);
      emit(out_path, j.dump(2) + "\n");
    } else if (*trace) {
      const ChannelPair ch = load_channels(channels_path, cfg);
      std::ostringstream os;
      write_trace_run_csv(os, run_trace(cfg, ch, pick(starts, file, "starts", 5)));
      emit(out_path, os.str());
    } else if (*sweep) {
      const std::string axis_name = pick(axis, file, "axis", std::string("pt_dbm"));
      std::vector<double> vals;
      if (values) {
        vals = parse_values(*values);
      } else if (file.contains("values")) {
        vals = file.at("values").get<std::vector<double>>();
      } else {
        throw DataError("sweep needs --values");
      }
      std::vector<Method> arm_list;
      if (arms) {
        std::stringstream ss(*arms);
        for (std::string a; std::getline(ss, a, ',');) arm_list.push_back(parse_method(a));
      } else if (file.contains("arms")) {
        for (const auto& a : file.at("arms")) arm_list.push_back(parse_method(a.get<std::string>()));
      } else {
        arm_list = {cfg.method};
      }
      const auto result = run_sweep(cfg, arm_list, parse_axis(axis_name), vals,
                                    pick(channels_per_point, file, "channels_per_point", 100),
                                    pick(threads, file, "threads", 0u));
      std::ostringstream os;
      write_sweep_csv(os, result);
      emit(out_path, os.str());
    } else if (*gen) {
      emit(out_path, channels_to_json(gen_channels(cfg, derive_seed(cfg.seeds.front(), 0))).dump(2) + "\n");
    }
  } catch (const FeasibilityError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const DataError& e) {
    std::cerr << "bad input: " << e.what() << '\n';
    return kBadInput;
  } catch (const DimensionError& e) {
    std::cerr << "bad input: " << e.what() << '\n';
    return kBadInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "bad input: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  }
  return 0;
}
