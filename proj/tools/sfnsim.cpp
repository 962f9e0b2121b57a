// sfnsim: link-level SFN space-time coding simulator.
//
//   sfnsim simulate --config run.cfg --out points.csv
//   sfnsim required-ebn0 --config run.cfg --target-ber 1e-3 --out required.csv
//
// Any config key may be overridden with --set key=value.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sfn/harness.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string st_code;
  std::vector<std::string> overrides;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "key = value configuration file");
  cmd->add_option("--out", o.out_path, "CSV output path (default: stdout)");
  cmd->add_option("--st-code", o.st_code, "space-time code")->check(CLI::IsMember({"alamouti", "sm", "golden", "3d"}));
  cmd->add_option("--set", o.overrides, "override a config key (key=value), repeatable");
  cmd->add_flag("--quiet", o.quiet, "no progress on stderr");
}

sfn::config::KeyValues load_config(const CommonOptions& o) {
  sfn::config::KeyValues kv;
  if (!o.config_path.empty()) kv = sfn::config::KeyValues::load(o.config_path);
  if (!o.st_code.empty()) kv.set("st_code", o.st_code);
  for (const auto& a : o.overrides) kv.set_assignment(a);
  return kv;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  return file;
}

void print_banner(const sfn::harness::SimConfig& c) {
  std::cerr << "# " << sfn::stcodes::code_name(c.code) << " eta=" << c.eta << " " << c.qam << "-QAM rate "
            << sfn::bics::rate_name(c.rate) << " nc=" << c.subcarriers << " mr=" << c.n_rx << " channel="
            << sfn::channel::channel_name(c.channel) << " receiver=" << sfn::receiver::mode_name(c.receiver.mode)
            << '\n'
            << "# Eb/N0: N0 = 1 / (eta * Eb/N0) per complex receive sample; Eb is referenced to the balanced"
               " (beta = 0) case with unit received power per transmit antenna group\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Link-level simulator for space-time coded single frequency networks"};
  app.require_subcommand(1);

  CommonOptions sim_opts;
  auto* simulate = app.add_subcommand("simulate", "BER/FER at each (beta, Eb/N0) point");
  add_common(simulate, sim_opts);

  CommonOptions req_opts;
  double target_ber = 0.0;
  auto* required = app.add_subcommand("required-ebn0", "Eb/N0 needed to reach a target BER, per beta");
  add_common(required, req_opts);
  required->add_option("--target-ber", target_ber, "target bit error rate");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      const auto cfg = sfn::harness::SimConfig::from_key_values(load_config(sim_opts));
      if (cfg.ebn0_db.empty()) throw sfn::config::ConfigError("simulate needs ebn0_db");
      if (!sim_opts.quiet) print_banner(cfg);
      std::ofstream file;
      std::ostream& out = open_out(sim_opts.out_path, file);
      sfn::harness::write_csv_header(out);
      for (double beta : cfg.betas_db) {
        const sfn::harness::LinkSimulator sim(cfg, beta);
        for (double e : cfg.ebn0_db) {
          const auto p = sim.run_point(e);
          sfn::harness::write_point_row(out, cfg, p);
          out.flush();
          if (!sim_opts.quiet) {
            std::cerr << sfn::stcodes::code_name(cfg.code) << " beta=" << beta << " ebn0=" << e << " ber=" << p.ber()
                      << " frames=" << p.frames << " per-iteration:";
            for (std::size_t it = 0; it < p.errors_per_iteration.size(); ++it) std::cerr << ' ' << p.ber_iteration(it);
            std::cerr << " (" << p.wall_s << " s)\n";
          }
        }
      }
    } else {
      auto kv = load_config(req_opts);
      if (target_ber > 0.0) kv.set("target_ber", std::to_string(target_ber));
      const auto cfg = sfn::harness::SimConfig::from_key_values(kv);
      if (!req_opts.quiet) print_banner(cfg);
      std::ofstream file;
      std::ostream& out = open_out(req_opts.out_path, file);
      sfn::harness::write_csv_header(out);
      for (const auto& r : sfn::harness::required_sweep(cfg)) {
        sfn::harness::write_required_row(out, cfg, r);
        if (!req_opts.quiet) {
          std::cerr << sfn::stcodes::code_name(cfg.code) << " beta=" << r.beta_db << " required=" << r.ebn0_db
                    << (r.censored ? " (censored)" : "") << '\n';
        }
      }
    }
  } catch (const sfn::config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
