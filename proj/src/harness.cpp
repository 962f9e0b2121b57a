#include "sfn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "sfn/geometry.hpp"
#include "sfn/linmodel.hpp"

namespace sfn::harness {

using stcodes::CodeKind;

SchemeEntry scheme_for(CodeKind code, int eta) {
  using bics::CodeRate;
  if (eta == 4) {
    switch (code) {
      case CodeKind::Alamouti: return {64, CodeRate::R2_3};
      case CodeKind::SpatialMultiplexing:
      case CodeKind::Golden:
      case CodeKind::ThreeD: return {16, CodeRate::R1_2};
    }
  } else if (eta == 6) {
    switch (code) {
      case CodeKind::Alamouti: return {256, CodeRate::R3_4};
      case CodeKind::SpatialMultiplexing:
      case CodeKind::Golden:
      case CodeKind::ThreeD: return {64, CodeRate::R1_2};
    }
  }
  throw config::ConfigError("no scheme for spectral efficiency " + std::to_string(eta) + " (expected 4 or 6)");
}

SimConfig SimConfig::from_key_values(const config::KeyValues& kv) {
  SimConfig c;
  try {
    c.code = stcodes::parse_code_kind(kv.get_or("st_code", "golden"));
    c.eta = int(kv.integer("eta", 4));
    const SchemeEntry entry = scheme_for(c.code, c.eta);
    c.qam = int(kv.integer("qam", entry.qam));
    c.rate = kv.has("rc") ? bics::parse_code_rate(kv.get("rc")) : entry.rate;
    if (c.qam != entry.qam || c.rate != entry.rate) {
      throw config::ConfigError("scheme " + std::string(stcodes::code_name(c.code)) + " at eta=" +
                                std::to_string(c.eta) + " requires " + std::to_string(entry.qam) + "-QAM rate " +
                                std::string(bics::rate_name(entry.rate)));
    }
    c.subcarriers = int(kv.integer("nc", c.subcarriers));
    c.n_rx = int(kv.integer("mr", c.n_rx));
    c.channel = channel::parse_channel_kind(kv.get_or("channel", "rayleigh"));
    c.spacing_hz = kv.number("spacing_hz", c.spacing_hz);
    c.guard_s = kv.number("guard_s", c.guard_s);
    c.d1_m = kv.number("d1_m", c.d1_m);
    c.alpha_prop = kv.number("alpha_prop", c.alpha_prop);
    c.betas_db = kv.numbers("betas_db", c.betas_db);
    c.ebn0_db = kv.numbers("ebn0_db", c.ebn0_db);
    c.target_ber = kv.number("target_ber", c.target_ber);
    c.receiver.iterations = int(kv.integer("iterations", c.receiver.iterations));
    c.receiver.mode = receiver::parse_mode(kv.get_or("receiver", std::string(receiver::mode_name(c.receiver.mode))));
    c.receiver.extrinsic_scale = kv.number("extrinsic_scale", c.receiver.extrinsic_scale);
    c.seed = std::uint64_t(kv.integer("seed", long(c.seed)));
    c.interleaver_seed = std::uint64_t(kv.integer("interleaver_seed", long(c.interleaver_seed)));
    c.min_frames = kv.integer("min_frames", c.min_frames);
    c.max_frames = kv.integer("max_frames", c.max_frames);
    c.error_target = kv.integer("error_target", c.error_target);
    c.bit_budget = kv.number("bit_budget", c.bit_budget);
    c.threads = int(kv.integer("threads", c.threads));
    c.ebn0_start = kv.number("ebn0_start", c.ebn0_start);
    c.ebn0_min = kv.number("ebn0_min", c.ebn0_min);
    c.ebn0_max = kv.number("ebn0_max", c.ebn0_max);
    c.grid_db = kv.number("grid_db", c.grid_db);
    c.coarse_db = kv.number("coarse_db", c.coarse_db);
  } catch (const config::ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw config::ConfigError(e.what());
  }
  static const char* kKnown[] = {"st_code", "eta", "qam", "rc", "nc", "mr", "channel", "spacing_hz", "guard_s",
                                 "d1_m", "alpha_prop", "betas_db", "ebn0_db", "target_ber", "iterations",
                                 "receiver", "extrinsic_scale", "seed", "interleaver_seed", "min_frames", "max_frames", "error_target",
                                 "bit_budget", "threads", "ebn0_start", "ebn0_min", "ebn0_max", "grid_db",
                                 "coarse_db"};
  for (const auto& [key, value] : kv.entries()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* k) { return key == k; }) ==
        std::end(kKnown)) {
      throw config::ConfigError("unknown config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw config::ConfigError(msg); };
  const SchemeEntry entry = scheme_for(code, eta);
  if (entry.qam != qam || entry.rate != rate) fail("(code, eta) does not match the scheme table");
  const double st_rate = stcodes::StCode<double>(code).rate();
  const double realized = std::log2(double(qam)) * bics::rate_value(rate) * st_rate;
  if (std::abs(realized - eta) > 1e-9) fail("realized spectral efficiency differs from eta");
  if (subcarriers <= 0) fail("nc must be positive");
  if (n_rx <= 0) fail("mr must be positive");
  if (!(spacing_hz > 0.0)) fail("spacing_hz must be positive");
  if (!(d1_m > 0.0) || !(alpha_prop > 0.0)) fail("d1_m and alpha_prop must be positive");
  for (double b : betas_db) {
    if (b > 0.0) fail("betas_db entries must be <= 0");
  }
  if (betas_db.empty()) fail("betas_db is empty");
  if (!(target_ber > 0.0 && target_ber < 0.5)) fail("target_ber must be in (0, 0.5)");
  if (receiver.iterations < 1) fail("iterations must be >= 1");
  if (min_frames < 1 || max_frames < min_frames) fail("need 1 <= min_frames <= max_frames");
  if (threads < 1) fail("threads must be >= 1");
  if (!(grid_db > 0.0) || !(coarse_db >= grid_db)) fail("need 0 < grid_db <= coarse_db");
  if (!(ebn0_min < ebn0_max)) fail("ebn0_min must be below ebn0_max");
}

double SimConfig::bits_budget() const { return bit_budget > 0.0 ? bit_budget : 200.0 / target_ber; }

AntennaProfile scenario_from_geometry(double d1_m, double alpha_prop, double beta_db, int n_tx) {
  AntennaProfile a;
  if (n_tx == 2) {
    a.beta_db = {0.0, beta_db};
  } else if (n_tx == 4) {
    a.beta_db = {0.0, 0.0, beta_db, beta_db};
  } else {
    throw std::invalid_argument("scenario_from_geometry: supports 2 or 4 transmit antennas");
  }
  geometry::SfnScenario sc{d1_m, alpha_prop, a.beta_db};
  a.power = sc.powers_linear();
  a.delay_s = sc.delays_s();
  for (double& d : a.delay_s) {
    if (std::isinf(d)) d = 0.0;  // silent antenna
  }
  return a;
}

double noise_n0(double ebn0_db, double eta) { return 1.0 / (eta * std::pow(10.0, ebn0_db / 10.0)); }

double PointResult::ci95() const {
  if (bits == 0) return 0.0;
  const double p = ber();
  return 1.96 * std::sqrt(p * (1.0 - p) / double(bits));
}

LinkSimulator::LinkSimulator(const SimConfig& config, double beta_db)
    : cfg_(config),
      beta_db_(beta_db),
      code_(config.code),
      qam_(config.qam),
      layout_(receiver::FrameLayout::make(config.subcarriers, code_.symbols(), qam_, config.rate)),
      interleaver_(layout_.coded_bits, config.interleaver_seed),
      receiver_(layout_, qam_, interleaver_, config.receiver),
      antennas_(scenario_from_geometry(config.d1_m, config.alpha_prop, beta_db, code_.n_tx())) {
  cfg_.validate();
}

LinkSimulator::FrameOutcome LinkSimulator::simulate_frame(double ebn0_db, long frame_index) const {
  Rng rng(derive_seed(cfg_.seed, {std::uint64_t(frame_index)}));
  const int nsub = layout_.subcarriers, q = code_.symbols(), t = code_.slots();

  Bits info(std::size_t(layout_.info_bits));
  for (auto& b : info) b = std::uint8_t(rng() >> 63);
  const std::vector<cd> symbols = receiver::encode_frame(layout_, conv_, qam_, interleaver_, info);

  const channel::ChannelRealization ch =
      cfg_.channel == channel::ChannelKind::RayleighIid
          ? channel::draw_rayleigh(rng, cfg_.n_rx, code_.n_tx(), nsub)
          : channel::draw_tu6(rng, cfg_.n_rx, code_.n_tx(), nsub, cfg_.spacing_hz, antennas_.delay_s, cfg_.guard_s);

  const double n0 = noise_n0(ebn0_db, cfg_.eta);
  const std::span<const double> powers(antennas_.power);
  std::vector<Eigen::MatrixXd> geq(static_cast<std::size_t>(nsub));
  std::vector<Eigen::VectorXd> y(static_cast<std::size_t>(nsub));
  for (int n = 0; n < nsub; ++n) {
    const Eigen::Map<const Eigen::VectorXcd> s(symbols.data() + std::size_t(n) * q, q);
    const Eigen::MatrixXcd x = code_.encode(s);
    // Unit-variance draw scaled afterwards so every Eb/N0 sees the same noise shape.
    const Eigen::MatrixXcd w = linmodel::draw_noise<double>(rng, cfg_.n_rx, t, 1.0) * std::sqrt(n0);
    y[n] = stcodes::stack_real_imag(linmodel::forward_complex<double>(ch.at(n), powers, x, w));
    geq[n] = linmodel::equivalent_matrix<double>(ch.at(n), powers, code_);
  }

  const receiver::TurboResult res = receiver_.detect(geq, y, 0.5 * n0);
  FrameOutcome out;
  out.bits = layout_.info_bits;
  for (const Bits& decided : res.per_iteration) {
    long e = 0;
    for (std::size_t i = 0; i < info.size(); ++i) e += decided[i] != info[i];
    out.errors_per_iteration.push_back(e);
  }
  return out;
}

PointResult LinkSimulator::run_point(double ebn0_db) const {
  const auto start = std::chrono::steady_clock::now();
  PointResult p;
  p.beta_db = beta_db_;
  p.ebn0_db = ebn0_db;
  p.errors_per_iteration.assign(std::size_t(cfg_.receiver.iterations), 0);
  const double budget = cfg_.bits_budget();
  auto done = [&] {
    if (p.frames >= cfg_.max_frames) return true;
    return p.frames >= cfg_.min_frames && (p.errors >= cfg_.error_target || double(p.bits) >= budget);
  };
  long next = 0;
  while (!done()) {
    const long batch = std::min<long>(cfg_.threads, cfg_.max_frames - p.frames);
    std::vector<FrameOutcome> outcomes(static_cast<std::size_t>(batch));
    if (batch == 1) {
      outcomes[0] = simulate_frame(ebn0_db, next);
    } else {
      std::vector<std::thread> workers;
      for (long i = 0; i < batch; ++i) {
        workers.emplace_back([&, i] { outcomes[std::size_t(i)] = simulate_frame(ebn0_db, next + i); });
      }
      for (auto& w : workers) w.join();
    }
    // Merge in frame order; frames past the stopping point are dropped so the
    // result does not depend on the thread count.
    for (const auto& o : outcomes) {
      if (done()) break;
      ++p.frames;
      p.bits += o.bits;
      const long e = o.errors_per_iteration.back();
      p.errors += e;
      p.frame_errors += e > 0;
      for (std::size_t it = 0; it < o.errors_per_iteration.size(); ++it) {
        p.errors_per_iteration[it] += o.errors_per_iteration[it];
      }
    }
    next += batch;
  }
  p.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return p;
}

RequiredResult LinkSimulator::required_ebn0(double target_ber, std::optional<double> start_db) const {
  RequiredResult r;
  r.beta_db = beta_db_;
  const double grid = cfg_.grid_db;
  const long step = std::max(1L, std::lround(cfg_.coarse_db / grid));
  const long gmin = long(std::ceil(cfg_.ebn0_min / grid - 1e-9));
  const long gmax = long(std::floor(cfg_.ebn0_max / grid + 1e-9));
  std::map<long, PointResult> cache;
  auto eval = [&](long g) -> const PointResult& {
    auto it = cache.find(g);
    if (it == cache.end()) it = cache.emplace(g, run_point(double(g) * grid)).first;
    return it->second;
  };
  auto above = [&](long g) { return eval(g).ber() > target_ber; };

  long g = std::clamp(std::lround(start_db.value_or(cfg_.ebn0_start) / grid), gmin, gmax);
  long lo = g, hi = g;  // BER(lo) > target >= BER(hi)
  if (above(g)) {
    lo = g;
    while (true) {
      if (lo >= gmax) {
        r.censored = true;
        r.ebn0_db = double(gmax) * grid;
        break;
      }
      const long cand = std::min(lo + step, gmax);
      if (!above(cand)) {
        hi = cand;
        break;
      }
      lo = cand;
    }
  } else {
    hi = g;
    while (true) {
      if (hi <= gmin) {
        r.censored = true;
        r.ebn0_db = double(gmin) * grid;
        break;
      }
      const long cand = std::max(hi - step, gmin);
      if (above(cand)) {
        lo = cand;
        break;
      }
      hi = cand;
    }
  }
  if (!r.censored) {
    while (hi - lo > 1) {
      const long mid = lo + (hi - lo) / 2;
      (above(mid) ? lo : hi) = mid;
    }
    const PointResult& plo = eval(lo);
    const PointResult& phi = eval(hi);
    // Interpolate in log10(BER); a zero-error upper point counts as half an error.
    const double blo = std::log10(plo.ber());
    const double bhi = std::log10(phi.errors > 0 ? phi.ber() : 0.5 / double(std::max(phi.bits, 1L)));
    const double bt = std::log10(target_ber);
    const double frac = blo > bhi ? std::clamp((blo - bt) / (blo - bhi), 0.0, 1.0) : 1.0;
    r.ebn0_db = (double(lo) + frac) * grid;
    r.low_confidence = plo.low_confidence() || double(phi.bits) * target_ber < 100.0;
  }
  for (const auto& [key, p] : cache) r.evaluated.push_back(p);
  return r;
}

SweepResult run_sweep(const SimConfig& config) {
  config.validate();
  if (config.ebn0_db.empty()) throw config::ConfigError("simulate needs ebn0_db");
  SweepResult out{config, {}};
  for (double beta : config.betas_db) {
    const LinkSimulator sim(config, beta);
    for (double e : config.ebn0_db) out.points.push_back(sim.run_point(e));
  }
  return out;
}

std::vector<RequiredResult> required_sweep(const SimConfig& config) {
  config.validate();
  std::vector<RequiredResult> out;
  std::optional<double> hint;
  for (double beta : config.betas_db) {
    const LinkSimulator sim(config, beta);
    out.push_back(sim.required_ebn0(config.target_ber, hint));
    if (!out.back().censored) hint = out.back().ebn0_db;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "scheme", "eta", "beta_db", "ebn0_db", "ber", "fer", "bits", "errors", "iters", "seed", "nc", "channel",
      "alpha_prop", "d1_m", "kind", "mr", "qam", "rc", "receiver", "interleaver_seed", "spacing_hz", "guard_s",
      "extrinsic_scale", "min_frames", "max_frames", "error_target", "bit_budget", "frames",
      "frame_errors", "ber_ci95", "low_confidence", "target_ber", "censored", "version"};
  return cols;
}

void write_common(std::ostream& out, const SimConfig& c, double beta, double ebn0, double ber, double fer, long bits,
                  long errors, const char* kind) {
  out << stcodes::code_name(c.code) << ',' << c.eta << ',' << fmt(beta) << ',' << fmt(ebn0) << ',' << fmt(ber) << ','
      << fmt(fer) << ',' << bits << ',' << errors << ',' << c.receiver.iterations << ',' << c.seed << ','
      << c.subcarriers << ',' << channel::channel_name(c.channel) << ',' << fmt(c.alpha_prop) << ',' << fmt(c.d1_m)
      << ',' << kind << ',' << c.n_rx << ',' << c.qam << ',' << bics::rate_name(c.rate) << ','
      << receiver::mode_name(c.receiver.mode) << ',' << c.interleaver_seed << ',' << fmt(c.spacing_hz) << ',' << fmt(c.guard_s) << ','
      << fmt(c.receiver.extrinsic_scale) << ',' << c.min_frames << ',' << c.max_frames << ',' << c.error_target << ','
      << fmt(c.bits_budget());
}
}  // namespace

void write_csv_header(std::ostream& out) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_point_row(std::ostream& out, const SimConfig& c, const PointResult& p) {
  write_common(out, c, p.beta_db, p.ebn0_db, p.ber(), p.fer(), p.bits, p.errors, "point");
  out << ',' << p.frames << ',' << p.frame_errors << ',' << fmt(p.ci95()) << ',' << int(p.low_confidence()) << ','
      << fmt(c.target_ber) << ",0," << kVersion << '\n';
}

void write_required_row(std::ostream& out, const SimConfig& c, const RequiredResult& r) {
  long frames = 0, frame_errors = 0, bits = 0, errors = 0;
  for (const auto& p : r.evaluated) {
    frames += p.frames;
    frame_errors += p.frame_errors;
    bits += p.bits;
    errors += p.errors;
  }
  write_common(out, c, r.beta_db, r.ebn0_db, c.target_ber, frames ? double(frame_errors) / double(frames) : 0.0, bits,
               errors, "required");
  out << ',' << frames << ',' << frame_errors << ",0," << int(r.low_confidence || r.censored) << ','
      << fmt(c.target_ber) << ',' << int(r.censored) << ',' << kVersion << '\n';
}

const std::string& CsvTable::at(std::size_t row, const std::string& column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw std::out_of_range("CSV has no column '" + column + "'");
  return rows.at(row).at(std::size_t(it - columns.begin()));
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty input");
  t.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.columns.size()) throw std::runtime_error("read_csv: ragged row");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace sfn::harness
