#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sfn/bics.hpp"
#include "sfn/channel.hpp"
#include "sfn/config.hpp"
#include "sfn/receiver.hpp"
#include "sfn/stcodes.hpp"

namespace sfn::harness {

inline constexpr const char* kVersion = "0.1.0";

/// Constellation and convolutional rate for a (code, spectral efficiency) pair.
struct SchemeEntry {
  int qam;
  bics::CodeRate rate;
};
SchemeEntry scheme_for(stcodes::CodeKind code, int eta);

struct SimConfig {
  stcodes::CodeKind code = stcodes::CodeKind::Golden;
  int eta = 4;
  int qam = 16;
  bics::CodeRate rate = bics::CodeRate::R1_2;
  int subcarriers = 1024;
  int n_rx = 2;
  channel::ChannelKind channel = channel::ChannelKind::RayleighIid;
  double spacing_hz = 8e6 / 7168.0;  // 8K mode, 8 MHz raster
  double guard_s = 224e-6;           // 8K mode, guard 1/4
  double d1_m = 5000.0;
  double alpha_prop = 2.0;
  std::vector<double> betas_db{0.0};
  std::vector<double> ebn0_db;
  double target_ber = 1e-3;
  receiver::ReceiverConfig receiver;
  std::uint64_t seed = 1;
  std::uint64_t interleaver_seed = 1;

  // Monte-Carlo stopping rule per point.
  long min_frames = 16;
  long max_frames = 4000;
  long error_target = 100;
  double bit_budget = 0.0;  // 0 = 200 / target_ber
  int threads = 1;

  // Required-Eb/N0 search window (dB).
  double ebn0_start = 8.0;
  double ebn0_min = -6.0;
  double ebn0_max = 40.0;
  double grid_db = 0.25;
  double coarse_db = 2.0;

  static SimConfig from_key_values(const config::KeyValues& kv);
  void validate() const;
  double bits_budget() const;
};

/// Per-antenna linear powers and delays for one beta. Single-layer codes get
/// {0, beta}; the double-layer code gets {0, 0, beta, beta}.
struct AntennaProfile {
  std::vector<double> beta_db;
  std::vector<double> power;
  std::vector<double> delay_s;
};
AntennaProfile scenario_from_geometry(double d1_m, double alpha_prop, double beta_db, int n_tx);

/// N0 per complex receive sample: Es/N0 = eta * Eb/N0 with unit received symbol
/// energy per antenna in the balanced configuration.
double noise_n0(double ebn0_db, double eta);

struct PointResult {
  double beta_db = 0.0;
  double ebn0_db = 0.0;
  long frames = 0;
  long frame_errors = 0;
  long bits = 0;
  long errors = 0;
  std::vector<long> errors_per_iteration;
  double wall_s = 0.0;

  double ber() const { return bits ? double(errors) / double(bits) : 0.0; }
  double fer() const { return frames ? double(frame_errors) / double(frames) : 0.0; }
  double ber_iteration(std::size_t it) const {
    return bits ? double(errors_per_iteration.at(it)) / double(bits) : 0.0;
  }
  double ci95() const;
  bool low_confidence() const { return errors < 100; }
};

struct RequiredResult {
  double beta_db = 0.0;
  double ebn0_db = 0.0;
  bool censored = false;
  bool low_confidence = false;
  std::vector<PointResult> evaluated;
};

/// Simulation context for one (config, beta): codes, layout, receiver.
class LinkSimulator {
 public:
  LinkSimulator(const SimConfig& config, double beta_db);
  LinkSimulator(const LinkSimulator&) = delete;
  LinkSimulator& operator=(const LinkSimulator&) = delete;

  PointResult run_point(double ebn0_db) const;
  RequiredResult required_ebn0(double target_ber, std::optional<double> start_db = std::nullopt) const;

  const receiver::FrameLayout& layout() const { return layout_; }
  const AntennaProfile& antennas() const { return antennas_; }

  struct FrameOutcome {
    long bits = 0;
    std::vector<long> errors_per_iteration;
  };
  FrameOutcome simulate_frame(double ebn0_db, long frame_index) const;

 private:
  SimConfig cfg_;
  double beta_db_;
  stcodes::StCode<double> code_;
  bics::Qam qam_;
  bics::ConvCode conv_;
  receiver::FrameLayout layout_;
  bics::Interleaver interleaver_;
  receiver::TurboReceiver receiver_;
  AntennaProfile antennas_;
};

struct SweepResult {
  SimConfig config;
  std::vector<PointResult> points;
};

SweepResult run_sweep(const SimConfig& config);
std::vector<RequiredResult> required_sweep(const SimConfig& config);

// CSV output. One header line, one row per point.
void write_csv_header(std::ostream& out);
void write_point_row(std::ostream& out, const SimConfig& config, const PointResult& p);
void write_required_row(std::ostream& out, const SimConfig& config, const RequiredResult& r);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  const std::string& at(std::size_t row, const std::string& column) const;
};
CsvTable read_csv(std::istream& in);

}  // namespace sfn::harness
