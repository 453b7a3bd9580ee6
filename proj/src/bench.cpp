#include "secbf/bench.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "secbf/anopt.hpp"
#include "secbf/global.hpp"

namespace secbf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t channel_seed(std::uint64_t master, std::uint64_t j) { return derive_seed(master, 2 * j); }
std::uint64_t start_seed(std::uint64_t master, std::uint64_t j) { return derive_seed(master, 2 * j + 1); }

ScenarioConfig at_axis(ScenarioConfig cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::PtDbm: cfg.pt_dbm = value; break;
    case SweepAxis::PeDbm: cfg.pe_dbm = value; break;
    case SweepAxis::Nt: cfg.n_t = Eigen::Index(std::llround(value)); break;
  }
  return cfg;
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::SingleStream: return "single_stream";
    case Method::FullStream: return "full_stream";
    case Method::Ibcd: return "ibcd";
    case Method::AnIbcd: return "an_ibcd";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  for (Method m : {Method::SingleStream, Method::FullStream, Method::Ibcd, Method::AnIbcd})
    if (s == to_string(m)) return m;
  throw DataError("unknown method '" + s + "'");
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::PtDbm: return "pt_dbm";
    case SweepAxis::PeDbm: return "pe_dbm";
    case SweepAxis::Nt: return "nt";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& s) {
  for (SweepAxis a : {SweepAxis::PtDbm, SweepAxis::PeDbm, SweepAxis::Nt})
    if (s == to_string(a)) return a;
  throw DataError("unknown sweep axis '" + s + "'");
}

void ScenarioConfig::validate() const {
  if (n_t < 1 || n_i < 1 || n_e < 1) throw DimensionError("antenna counts must be at least 1");
  if (streams < 1 || streams > n_t) throw DimensionError("need 1 <= streams <= N_T");
  for (double x : {pt_dbm, pe_dbm, sigma2_dbm, pathloss_db})
    if (!std::isfinite(x)) throw DataError("non-finite scenario parameter");
  if (!(zeta > 0 && zeta <= 1)) throw DataError("zeta must lie in (0, 1]");
  if (seeds.empty()) throw DataError("at least one seed is required");
  if (!(ibcd.eps >= 0) || !(ibcd.eps_bisection > 0) || ibcd.max_iter < 1)
    throw DataError("need eps >= 0, eps_bisection > 0 and max_iter >= 1");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k) {
  std::seed_seq seq{std::uint32_t(master), std::uint32_t(master >> 32), std::uint32_t(k), std::uint32_t(k >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t(out[1]) << 32) | out[0];
}

ChannelPair gen_channels(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5 * std::pow(10.0, -cfg.pathloss_db / 10.0)));
  const auto draw = [&](Eigen::Index rows) {
    CMat h(rows, cfg.n_t);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cfg.n_t; ++c) {
        const double re = g(rng);
        h(r, c) = cd(re, g(rng));
      }
    return h;
  };
  CMat hi = draw(cfg.n_i);
  CMat he = draw(cfg.n_e);
  const double s2 = dbm_to_watts(cfg.sigma2_dbm);
  return ChannelPair(std::move(hi), std::move(he), s2, s2, cfg.zeta);
}

SolveOutcome solve_instance(const ScenarioConfig& cfg, const ChannelPair& ch, std::uint64_t start) {
  cfg.validate();
  const DesignBudget b = cfg.budget();
  require_feasible(ch, b);
  SolveOutcome out;
  out.method = cfg.method;
  switch (cfg.method) {
    case Method::SingleStream: {
      const auto s = solve_single_stream(ch, b);
      out.V = s.v;
      out.rate_bits = s.rate;
      break;
    }
    case Method::FullStream: {
      const auto s = solve_full_stream(ch, b);
      out.V = s.V;
      out.rate_bits = s.rate;
      out.iterations = s.iterations;
      break;
    }
    case Method::Ibcd: {
      auto r = ibcd_solve(ch, b, warmstart(ch, cfg.streams, b, start), cfg.ibcd);
      out.V = r.bf.V;
      out.rate_bits = r.rate;
      out.iterations = r.iterations;
      out.trace = std::move(r.trace);
      break;
    }
    case Method::AnIbcd: {
      auto r = an_ibcd_solve(ch, b, an_warmstart(ch, cfg.streams, b, start), cfg.ibcd);
      out.V = r.bf.V;
      out.V_E = r.bf.V_E;
      out.rate_bits = r.rate;
      out.iterations = r.iterations;
      out.trace = std::move(r.trace);
      break;
    }
  }
  out.nonpositive_rate = out.rate_bits <= 0;
  return out;
}

TraceRun run_trace(const ScenarioConfig& cfg, const ChannelPair& ch, int n_starts) {
  if (cfg.method != Method::Ibcd && cfg.method != Method::AnIbcd)
    throw PreconditionError("traces need an iterative method (ibcd or an_ibcd)");
  if (n_starts < 1) throw DataError("need at least one start");
  cfg.validate();
  const DesignBudget b = cfg.budget();
  require_feasible(ch, b);

  TraceRun run;
  for (int k = 0; k < n_starts; ++k)
    run.traces.push_back(*solve_instance(cfg, ch, start_seed(cfg.seeds.front(), std::uint64_t(k))).trace);

  if (cfg.method == Method::Ibcd) {
    if (cfg.streams == 1) {
      run.reference_bits = solve_single_stream(ch, b).rate;
      run.reference_method = to_string(Method::SingleStream);
    } else if (cfg.streams == ch.n_t()) {
      try {
        run.reference_bits = solve_full_stream(ch, b).rate;
        run.reference_method = to_string(Method::FullStream);
      } catch (const PreconditionError&) {
      }
    }
  }
  return run;
}

void write_trace_run_csv(std::ostream& os, const TraceRun& run) {
  const bool an = !run.traces.empty() && !run.traces.front().an_power_w.empty();
  os << "start,iter,rate_bits,power_w,eh_margin_w" << (an ? ",an_power_w" : "")
     << (run.reference_bits ? ",reference_bits" : "") << '\n';
  os << std::setprecision(17);
  for (std::size_t s = 0; s < run.traces.size(); ++s) {
    const auto& t = run.traces[s];
    for (std::size_t i = 0; i < t.rates_bits.size(); ++i) {
      os << s << ',' << i << ',' << t.rates_bits[i] << ',' << t.power_w[i] << ',' << t.eh_margin_w[i];
      if (an) os << ',' << t.an_power_w[i];
      if (run.reference_bits) os << ',' << *run.reference_bits;
      os << '\n';
    }
  }
}

SweepResult run_sweep(const ScenarioConfig& cfg, const std::vector<Method>& arms, SweepAxis axis,
                      const std::vector<double>& values, int n_channels, unsigned threads) {
  if (arms.empty()) throw DataError("run_sweep: no arms");
  if (values.empty()) throw DataError("run_sweep: no axis values");
  if (n_channels < 1) throw DataError("run_sweep: need at least one channel per point");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1])) throw DataError("run_sweep: axis values must be strictly ascending");
  for (double v : values) at_axis(cfg, axis, v).validate();

  const std::size_t n_points = values.size();
  const std::size_t n_ch = std::size_t(n_channels);
  SweepResult r;
  r.axis = axis;
  r.values = values;
  r.arms = arms;
  r.per_seed_rates.assign(arms.size(), std::vector<std::vector<double>>(n_points, std::vector<double>(n_ch, kNaN)));

  const std::uint64_t master = cfg.seeds.front();
  const auto task = [&](std::size_t idx) {
    const std::size_t p = idx / n_ch;
    const std::size_t j = idx % n_ch;
    const ScenarioConfig point = at_axis(cfg, axis, values[p]);
    const ChannelPair ch = gen_channels(point, channel_seed(master, j));
    if (!feasibility(ch, point.budget()).feasible) return;
    std::vector<double> rates(arms.size());
    for (std::size_t a = 0; a < arms.size(); ++a) {
      ScenarioConfig arm = point;
      arm.method = arms[a];
      if (arms[a] == Method::SingleStream) arm.streams = 1;
      if (arms[a] == Method::FullStream) arm.streams = arm.n_t;
      try {
        const auto out = solve_instance(arm, ch, start_seed(master, j));
        if (out.nonpositive_rate) return;
        rates[a] = out.rate_bits;
      } catch (const Error&) {
        return;
      }
    }
    for (std::size_t a = 0; a < arms.size(); ++a) r.per_seed_rates[a][p][j] = rates[a];
  };

  const std::size_t n_tasks = n_points * n_ch;
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = unsigned(std::min<std::size_t>(workers, n_tasks));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t idx; (idx = next.fetch_add(1)) < n_tasks;) {
      try {
        task(idx);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  r.mean_rate_bits.assign(arms.size(), std::vector<double>(n_points, kNaN));
  r.n_used.assign(n_points, 0);
  r.n_skipped.assign(n_points, 0);
  for (std::size_t p = 0; p < n_points; ++p) {
    for (std::size_t j = 0; j < n_ch; ++j) (std::isnan(r.per_seed_rates[0][p][j]) ? r.n_skipped : r.n_used)[p]++;
    if (r.n_used[p] == 0) continue;
    for (std::size_t a = 0; a < arms.size(); ++a) {
      double sum = 0;
      for (std::size_t j = 0; j < n_ch; ++j)
        if (!std::isnan(r.per_seed_rates[a][p][j])) sum += r.per_seed_rates[a][p][j];
      r.mean_rate_bits[a][p] = sum / double(r.n_used[p]);
    }
  }
  return r;
}

void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << "axis_value,mean_rate_bits,n_used,n_skipped";
  for (Method m : r.arms) os << ',' << to_string(m) << "_mean_bits";
  os << '\n' << std::setprecision(17);
  for (std::size_t p = 0; p < r.values.size(); ++p) {
    os << r.values[p] << ',' << r.mean_rate_bits[0][p] << ',' << r.n_used[p] << ',' << r.n_skipped[p];
    for (std::size_t a = 0; a < r.arms.size(); ++a) os << ',' << r.mean_rate_bits[a][p];
    os << '\n';
  }
}

}  // namespace secbf
