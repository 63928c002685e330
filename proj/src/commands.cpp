#include "tfq/commands.hpp"

#include "tfq/circuits.hpp"
#include "tfq/io.hpp"
#include "tfq/nmr.hpp"
#include "tfq/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <random>
#include <sstream>

namespace tfq::cli {

namespace {

using nlohmann::json;

json base_report(const RunConfig& c) {
  return json{{"command", c.command}, {"seed", c.seed}, {"tolerance", c.tol}};
}

CommandResult input_error(const std::string& message) {
  CommandResult r;
  r.exit_code = kInputError;
  r.error = message;
  return r;
}

std::string number(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

Encoding encoding_for(const std::string& name, std::size_t d) {
  if (name == "spin") return d == 2 ? Encoding::spin_half() : Encoding::higher_spin(d);
  if (name == "photon") return Encoding::photon_number(d);
  throw io::ParseError("unknown encoding '" + name + "'");
}

json nonmax_report(const io::CircuitDescription& desc, json report) {
  const NonmaxLoss loss = nonmax_loss(desc.phi, desc.psi);
  report["kind"] = "nonmax";
  report["singular_values"] = loss.singular_values;
  report["transmitted_norm2"] = loss.transmitted_norm2;
  report["raw"] = io::to_json(loss.raw);
  report["entanglement_entropy"] = entanglement_entropy(desc.phi);
  return report;
}

json circuit_json(const io::CircuitDescription& s) {
  return json{{"d", s.d},
              {"psi", io::to_json(s.psi)},
              {"U", io::to_json(s.u)},
              {"V", io::to_json(s.v)},
              {"W", io::to_json(s.w)},
              {"phi", io::to_json(s.phi.state())},
              {"omega", io::to_json(s.omega.state())}};
}

std::string spectrum_csv(const nmr::Spectrum& s) {
  std::string out = "frequency_hz,real,imag\n";
  for (std::size_t k = 0; k < s.frequencies.size(); ++k) {
    out += number(s.frequencies[k]) + "," + number(s.intensities[k].real()) + "," +
           number(s.intensities[k].imag()) + "\n";
  }
  return out;
}

}  // namespace

CommandResult cmd_verify(const RunConfig& config) {
  verify::Config vc{config.seed, config.trials, config.tol, config.dims,
                    config.inject_fault};
  verify::Report rep;
  try {
    rep = verify::run(vc);
  } catch (const std::invalid_argument& e) {
    return input_error(std::string("verify: ") + e.what());
  }
  CommandResult r;
  r.report = base_report(config);
  r.report["trials"] = config.trials;
  r.report["dims"] = config.dims;
  r.report["inject_fault"] = config.inject_fault;
  r.report["properties"] = json::array();
  r.report["failing"] = json::array();
  r.csv = "property,trials,max_deviation,passed\n";
  for (const auto& p : rep.results) {
    r.report["properties"].push_back({{"name", p.name},
                                      {"trials", p.trials},
                                      {"max_deviation", p.max_deviation},
                                      {"passed", p.passed}});
    if (!p.passed) r.report["failing"].push_back(p.name);
    r.csv += p.name + "," + std::to_string(p.trials) + "," +
             number(p.max_deviation) + "," + (p.passed ? "true" : "false") + "\n";
  }
  r.report["passed"] = rep.all_passed();
  r.exit_code = rep.all_passed() ? kOk : kVerificationFailed;
  if (!rep.all_passed()) {
    r.error = "verify: failing properties: " + r.report["failing"].dump();
  }
  return r;
}

CommandResult cmd_teleport(const RunConfig& config) {
  std::optional<io::CircuitDescription> desc;
  try {
    if (config.random_circuit) {
      if (!config.inputs.empty()) throw io::ParseError("--random takes no circuit file");
      if (config.dim < 2 || config.dim > 16) throw io::ParseError("--dim must lie in [2, 16]");
      std::mt19937_64 rng(config.seed);
      const TeleportCircuit c = TeleportCircuit::random(config.dim, rng);
      desc = io::CircuitDescription{config.dim, random::haar_state(config.dim, rng),
                             c.u(), c.v(), c.w(), c.phi(), c.omega()};
    } else {
      if (config.inputs.size() != 1) throw io::ParseError("expected one circuit file");
      desc = io::load_circuit(config.inputs[0]);
    }
  } catch (const io::ParseError& e) {
    return input_error(std::string("teleport: ") + e.what());
  }

  CommandResult r;
  r.report = base_report(config);
  r.report["circuit"] = circuit_json(*desc);
  if (!is_maximally_entangled(desc->phi, 1e-9)) {
    r.report = nonmax_report(*desc, r.report);
    r.csv = "singular_value\n";
    for (double s : r.report["singular_values"]) r.csv += number(s) + "\n";
    return r;
  }

  std::optional<Encoding> enc;
  try {
    enc = encoding_for(config.encoding, desc->d);
  } catch (const io::ParseError& e) {
    return input_error(std::string("teleport: ") + e.what());
  }
  const TeleportCircuit c(desc->u, desc->v, desc->w, desc->phi, desc->omega);
  const auto oracle = forward_oracle(c, desc->psi);
  const OutcomeReport tf = timeflow_eval(c, desc->psi, *enc);
  const OutcomeReport& selected = oracle.at(0);

  const double state_dev = phase_aligned_distance(selected.state, tf.state);
  const double prob_dev = std::abs(selected.probability - tf.probability);
  const bool agree = state_dev <= config.tol && prob_dev <= config.tol;

  r.report["kind"] = "maximal";
  r.report["encoding"] = enc->name();
  r.report["outcomes"] = json::array();
  r.csv = "index,probability\n";
  for (const auto& [k, o] : oracle) {
    r.report["outcomes"].push_back(
        {{"index", k}, {"probability", o.probability}, {"state", io::to_json(o.state)}});
    r.csv += std::to_string(k) + "," + number(o.probability) + "\n";
  }
  r.report["timeflow"] = {{"probability", tf.probability},
                          {"state", io::to_json(tf.state)}};
  r.report["oracle"] = {{"probability", selected.probability},
                        {"state", io::to_json(selected.state)}};
  r.report["deviation"] = std::max(state_dev, prob_dev);
  r.report["agreement"] = agree;
  r.report["trace"] = json::array();
  for (const auto& step : timeflow_trace(c, desc->psi, *enc)) {
    r.report["trace"].push_back({{"label", step.label}, {"vector", io::to_json(step.vector)}});
  }
  if (!agree) {
    r.exit_code = kVerificationFailed;
    r.error = "teleport: time-flow and oracle disagree";
  }
  return r;
}

CommandResult cmd_acausal(const RunConfig& config) {
  CommandResult r;
  r.report = base_report(config);
  r.report["branches"] = json::array();
  r.csv = "a,probability,fidelity\n";
  for (int a : {0, 1}) {
    const OutcomeReport out = acausal_experiment(a);
    const std::size_t expected = a == 0 ? 0 : 3;
    const double fidelity = std::norm(out.state(expected));
    r.report["branches"].push_back({{"a", a},
                                    {"expected", a == 0 ? "00" : "11"},
                                    {"state", io::to_json(out.state)},
                                    {"probability", out.probability},
                                    {"fidelity", fidelity}});
    r.csv += std::to_string(a) + "," + number(out.probability) + "," +
             number(fidelity) + "\n";
  }
  return r;
}

CommandResult cmd_nmr(const RunConfig& config) {
  if (config.inputs.size() != 2) {
    return input_error("nmr: expected a spin-system file and a sequence file");
  }
  CommandResult r;
  try {
    const nmr::SpinSystem system = io::load_spin_system(config.inputs[0]);
    const io::SequenceFile seq = io::load_sequence(config.inputs[1]);
    std::optional<nmr::PauliProductState> init = seq.init;
    if (config.init) init.emplace(*config.init);
    if (!init) throw io::ParseError("no initial state: add 'init' or pass --init");

    const DensityMatrix final_state = nmr::run_sequence(system, *init, seq.sequence);
    r.report = base_report(config);
    r.report["spins"] = system.n();
    r.report["init"] = init->symbols();
    r.report["decomposition"] = json::array();
    r.csv = "label,coefficient\n";
    for (const auto& t : nmr::pauli_decompose(final_state, config.tol)) {
      r.report["decomposition"].push_back({{"label", t.label}, {"coefficient", t.coefficient}});
      r.csv += t.label + "," + number(t.coefficient) + "\n";
    }

    if (seq.acquisition) {
      const auto& acq = *seq.acquisition;
      const nmr::Fid f =
          nmr::fid(system, final_state, acq.detect, acq.duration, acq.points);
      const nmr::Spectrum s =
          nmr::rephase(nmr::spectrum(f, acq.line_broadening), seq.readout_phase);
      json lines = json::array();
      for (const auto& l : nmr::multiplet(system, final_state, acq.detect)) {
        lines.push_back({{"frequency", l.frequency},
                         {"amplitude", io::to_json(l.amplitude * std::polar(1.0, seq.readout_phase))}});
      }
      r.report["acquisition"] = {{"detect", acq.detect + 1},
                                 {"duration", acq.duration},
                                 {"points", acq.points},
                                 {"dwell", f.dwell},
                                 {"line_broadening", acq.line_broadening},
                                 {"readout_phase", seq.readout_phase},
                                 {"lines", lines}};
      const std::string spectrum = spectrum_csv(s);
      if (config.spectrum_out) {
        std::ofstream file(*config.spectrum_out);
        if (!file) throw io::ParseError("cannot write " + *config.spectrum_out);
        file << spectrum;
      }
      if (config.format == Format::Csv) r.csv = spectrum;
    }
  } catch (const io::ParseError& e) {
    return input_error(std::string("nmr: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return input_error(std::string("nmr: ") + e.what());
  } catch (const std::out_of_range& e) {
    return input_error(std::string("nmr: ") + e.what());
  }
  return r;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-flow evaluation of teleportation-like circuits and NMR simulation", "tfq"};
  app.require_subcommand(1);
  RunConfig config;
  std::string format = "json";
  std::string out_path;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", config.seed, "Random seed")->capture_default_str();
    sub->add_option("--tol", config.tol, "Tolerance")->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out_path, "Write the report to this file");
    sub->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  };

  auto* verify_cmd = app.add_subcommand("verify", "Run the randomized property suites");
  common(verify_cmd);
  verify_cmd->add_option("--trials", config.trials, "Trials per property and dimension")
      ->capture_default_str();
  verify_cmd->add_option("--dims", config.dims, "Carrier dimensions")->delimiter(',')
      ->capture_default_str();
  verify_cmd->add_flag("--inject-fault", config.inject_fault,
                       "Skip the complex conjugation in the time-reversal steps");

  auto* teleport_cmd = app.add_subcommand("teleport", "Evaluate a teleportation-like circuit");
  common(teleport_cmd);
  teleport_cmd->add_option("circuit", config.inputs, "Circuit JSON file");
  teleport_cmd->add_flag("--random", config.random_circuit, "Draw a random circuit from --seed");
  teleport_cmd->add_option("--dim", config.dim, "Dimension for --random")->capture_default_str();
  teleport_cmd->add_option("--encoding", config.encoding, "Carrier encoding")
      ->check(CLI::IsMember({"spin", "photon"}))->capture_default_str();

  auto* acausal_cmd = app.add_subcommand("acausal", "Run the four-carrier acausality circuit");
  common(acausal_cmd);

  auto* nmr_cmd = app.add_subcommand("nmr", "Simulate a pulse sequence");
  common(nmr_cmd);
  nmr_cmd->add_option("spins", config.inputs, "Spin-system file and sequence file")
      ->expected(2)->required();
  nmr_cmd->add_option("--init", config.init, "Initial product-operator label");
  nmr_cmd->add_option("--spectrum", config.spectrum_out, "Write the spectrum CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  config.format = format == "csv" ? Format::Csv : Format::Json;
  if (!out_path.empty()) config.out = out_path;

  CommandResult result;
  if (verify_cmd->parsed()) {
    config.command = "verify";
    result = cmd_verify(config);
  } else if (teleport_cmd->parsed()) {
    config.command = "teleport";
    result = cmd_teleport(config);
  } else if (acausal_cmd->parsed()) {
    config.command = "acausal";
    result = cmd_acausal(config);
  } else {
    config.command = "nmr";
    result = cmd_nmr(config);
  }

  if (result.exit_code == kInputError) {
    err << "error: " << result.error << "\n";
    return kInputError;
  }
  if (!result.error.empty()) err << result.error << "\n";

  const std::string text =
      config.format == Format::Json ? result.report.dump(2) + "\n" : result.csv;
  if (config.out) {
    std::ofstream file(*config.out);
    if (!file) {
      err << "error: cannot write " << *config.out << "\n";
      return kInputError;
    }
    file << text;
  } else {
    out << text;
  }
  return result.exit_code;
}

}  // namespace tfq::cli
