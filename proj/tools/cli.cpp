#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "acq/analysis.hpp"
#include "acq/coder.hpp"
#include "acq/container.hpp"
#include "acq/corpus.hpp"
#include "acq/error.hpp"
#include "acq/io.hpp"
#include "acq/model.hpp"
#include "acq/threshold.hpp"

namespace acq::cli {
namespace {

std::string fmt(double x, int digits = 9) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

/// Writes to `path`, or to `out` when path is "-" or empty.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

struct CorpusSource {
  std::string input;
  bool records = false;
  bool simulate = false;
  std::size_t count = 100000;
  std::uint64_t seed = 1;
  std::size_t max_strings = 0;

  void add_options(CLI::App* cmd) {
    auto* in = cmd->add_option("--input", input,
                               "Text file, mapped through the model alphabet");
    auto* sim = cmd->add_flag("--simulate", simulate,
                              "Generate i.i.d. strings from the model instead");
    in->excludes(sim);
    cmd->add_flag("--records", records,
                  "Treat each input line as one string (default: fixed-M chunks)");
    cmd->add_option("--count", count, "Strings to simulate")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "Simulation seed");
    cmd->add_option("--max-strings", max_strings,
                    "Use at most this many strings (0 = all)");
  }

  bool present() const { return simulate || !input.empty(); }

  StringSet load(const SymbolModel& model, std::size_t length, unsigned threads,
                 std::ostream& err) const {
    StringSet strings;
    if (simulate) {
      strings = chunk(generate_iid(model, count, length, seed, threads), length);
    } else {
      const AlphabetSpec spec = AlphabetSpec::from_model(model);
      const std::string raw = read_file(input);
      if (records) {
        std::vector<std::vector<std::uint32_t>> rows;
        std::istringstream lines(raw);
        std::string line;
        std::uint64_t dropped = 0;
        while (std::getline(lines, line)) {
          if (line.empty()) continue;
          Corpus c = ingest_bytes(line, spec);
          dropped += c.dropped_bytes;
          if (c.symbol_ids.size() != length) throw DataError("ragged strings");
          rows.push_back(std::move(c.symbol_ids));
        }
        if (dropped > 0) err << "dropped " << dropped << " bytes outside the alphabet\n";
        strings = StringSet::from_strings(rows);
      } else {
        const Corpus c = ingest_bytes(raw, spec, input);
        if (c.dropped_bytes > 0) {
          err << "dropped " << c.dropped_bytes << " bytes outside the alphabet\n";
        }
        strings = chunk(c, length);
      }
    }
    if (max_strings > 0 && strings.size() > max_strings) {
      std::vector<std::uint32_t> head(
          strings.symbols().begin(),
          strings.symbols().begin() + static_cast<std::ptrdiff_t>(max_strings * length));
      strings = StringSet(length, std::move(head));
    }
    if (strings.empty()) throw DataError("empty corpus: no complete strings of length M");
    return strings;
  }
};

void warn_ties(std::ostream& err) {
  if (const auto ties = ceiling_tie_count(); ties > 0) {
    err << "warning: " << ties
        << " codeword lengths had a pre-ceiling value within 1e-9 of an "
           "integer and were snapped to it\n";
  }
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  try {
    if (text.find(':') != std::string::npos) {
      std::vector<double> parts;
      std::istringstream in(text);
      std::string piece;
      while (std::getline(in, piece, ':')) parts.push_back(std::stod(piece));
      if (parts.size() != 3) throw DomainError("grid must be start:stop:step");
      return make_q_grid(parts[0], parts[1], parts[2]);
    }
    std::istringstream in(text);
    std::string piece;
    while (std::getline(in, piece, ',')) {
      if (!piece.empty()) values.push_back(std::stod(piece));
    }
  } catch (const std::invalid_argument&) {
    throw DomainError("cannot parse grid: " + text);
  }
  if (values.empty()) throw DomainError("empty grid: " + text);
  return values;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Escort-distribution arithmetic coding toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option values");
  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  // model
  auto* model_cmd = app.add_subcommand("model", "Estimate a symbol model from text");
  std::string model_input;
  std::string model_alphabet = "fil9_27";
  std::string model_out;
  std::string entropy_grid;
  model_cmd->add_option("--input", model_input, "Text file")->required();
  model_cmd->add_option("--alphabet", model_alphabet,
                        "fil9_27 | bytes_256 | custom:<bytes>");
  model_cmd->add_option("--out", model_out, "Model JSON (default: stdout)");
  model_cmd->add_option("--entropy-grid", entropy_grid,
                        "CSV of H_q for q in {0, 0.1, ..., 2}");

  // encode / decode
  auto* enc_cmd = app.add_subcommand("encode", "Encode a file with AC_q");
  std::string enc_input, enc_model, enc_out;
  std::optional<double> enc_q, enc_t;
  int enc_k = kDefaultPrecision;
  enc_cmd->add_option("--input", enc_input, "File to encode")->required();
  enc_cmd->add_option("--model", enc_model, "Model JSON")->required();
  auto* q_opt = enc_cmd->add_option("--q", enc_q, "Escort order q >= 0");
  auto* t_opt = enc_cmd->add_option("--t", enc_t, "Exponent t > -1 (q = 1/(1+t))");
  q_opt->excludes(t_opt);
  enc_cmd->add_option("--K", enc_k, "Precision bits")->check(CLI::Range(8, 62));
  enc_cmd->add_option("--out", enc_out, "Container output")->required();

  auto* dec_cmd = app.add_subcommand("decode", "Decode an ACQ1 container");
  std::string dec_input, dec_model, dec_out;
  dec_cmd->add_option("--input", dec_input, "Container file")->required();
  dec_cmd->add_option("--model", dec_model, "Model JSON")->required();
  dec_cmd->add_option("--out", dec_out, "Decoded output")->required();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Empirical exponential length over a q grid");
  std::string sweep_model, sweep_grid = "0:2:0.1", sweep_t = "0.2,0.8,1.8";
  std::string sweep_csv, sweep_summary;
  std::size_t sweep_m = 20;
  CorpusSource sweep_src;
  sweep_cmd->add_option("--model", sweep_model, "Model JSON")->required();
  sweep_cmd->add_option("--M", sweep_m, "String length")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--q-grid", sweep_grid, "start:stop:step or list");
  sweep_cmd->add_option("--t", sweep_t, "Comma-separated exponents t");
  sweep_cmd->add_option("--csv-out", sweep_csv, "Long CSV q,t,L_emp");
  sweep_cmd->add_option("--summary-out", sweep_summary, "Summary CSV (default: stdout)");
  sweep_src.add_options(sweep_cmd);

  // threshold
  auto* thr_cmd = app.add_subcommand("threshold", "Plan q* for a length budget");
  std::string thr_model, thr_json, thr_csv;
  std::optional<double> thr_a;
  std::string thr_grid;
  std::size_t thr_m = 20;
  bool thr_exact = false;
  int thr_k = kDefaultPrecision;
  CorpusSource thr_src;
  thr_cmd->add_option("--model", thr_model, "Model JSON")->required();
  auto* a_opt = thr_cmd->add_option("--a", thr_a, "Per-symbol budget in bits");
  auto* ag_opt = thr_cmd->add_option("--a-grid", thr_grid, "start:stop:step or list");
  a_opt->excludes(ag_opt);
  thr_cmd->add_option("--M", thr_m, "String length")->check(CLI::PositiveNumber);
  thr_cmd->add_option("--json-out", thr_json, "Plan JSON (default: stdout)");
  thr_cmd->add_option("--csv-out", thr_csv, "CSV a,q_star,ub,exceed_frac_qstar,exceed_frac_q1");
  thr_cmd->add_flag("--exact-lengths", thr_exact, "Exceed fractions from the exact coder");
  thr_cmd->add_option("--K", thr_k, "Precision for --exact-lengths")->check(CLI::Range(8, 62));
  thr_src.add_options(thr_cmd);

  // erq
  auto* erq_cmd = app.add_subcommand("erq", "Mismatch cost ER_q[p||r] over a q grid");
  std::string erq_p, erq_r, erq_grid = "0.05:1:0.05", erq_out;
  erq_cmd->add_option("--p", erq_p, "True model JSON")->required();
  erq_cmd->add_option("--r", erq_r, "Coding model JSON")->required();
  erq_cmd->add_option("--q-grid", erq_grid, "start:stop:step or list (q > 0)");
  erq_cmd->add_option("--out", erq_out, "CSV q,er_q,d_kl (default: stdout)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Write i.i.d. text drawn from a model");
  std::string sim_model, sim_out;
  std::size_t sim_count = 1000, sim_m = 20;
  std::uint64_t sim_seed = 1;
  sim_cmd->add_option("--model", sim_model, "Model JSON")->required();
  sim_cmd->add_option("--count", sim_count, "Number of strings")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--M", sim_m, "String length")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim_seed, "Seed");
  sim_cmd->add_option("--out", sim_out, "Output text file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    reset_ceiling_tie_count();
    if (model_cmd->parsed()) {
      const AlphabetSpec spec = AlphabetSpec::parse(model_alphabet);
      const Corpus corpus = ingest_text(model_input, spec);
      const EstimatedModel est =
          estimate_model(corpus.symbol_ids, spec.size(), spec.symbols());
      const SymbolModel& m = est.model;
      if (model_out.empty()) {
        out << model_to_json(m).dump(2) << "\n";
      } else {
        save_model(m, model_out);
        out << "symbols " << m.size() << " of " << spec.size() << "\n"
            << "total " << m.total() << "\n"
            << "dropped_bytes " << corpus.dropped_bytes << "\n"
            << "H0 " << fmt(renyi_entropy(m, 0.0)) << "\n"
            << "H1 " << fmt(renyi_entropy(m, 1.0)) << "\n";
        for (double q : {0.25, 0.5, 0.75, 1.5, 2.0}) {
          out << "H_" << q << " " << fmt(renyi_entropy(m, q)) << "\n";
        }
      }
      if (!entropy_grid.empty()) {
        std::string csv = "q,renyi_entropy\n";
        for (double q : make_q_grid(0.0, 2.0, 0.1)) {
          csv += fmt(q) + "," + fmt(renyi_entropy(m, q), 12) + "\n";
        }
        emit(entropy_grid, csv, out);
      }
    } else if (enc_cmd->parsed()) {
      const SymbolModel m = load_model(enc_model);
      const double q = enc_t ? campbell_q(*enc_t) : enc_q.value_or(1.0);
      const AlphabetSpec spec = AlphabetSpec::from_model(m);
      const Corpus c = ingest_bytes(read_file(enc_input), spec, enc_input);
      if (c.dropped_bytes > 0) {
        throw DataError("input has " + std::to_string(c.dropped_bytes) +
                        " bytes outside the model alphabet");
      }
      if (c.symbol_ids.empty()) throw DataError("empty input");
      const QuantizedModel qm = quantize(m, q, enc_k);
      Container container{enc_k, q, encode(c.symbol_ids, qm)};
      write_file_atomic(enc_out, serialize_container(container));
      out << "M " << container.codeword.message_len << "\n"
          << "q " << fmt(q, 12) << "\n"
          << "bits " << container.codeword.bit_count << "\n"
          << "analytic_bits " << analytic_length(c.symbol_ids, m, q) << "\n";
    } else if (dec_cmd->parsed()) {
      const SymbolModel m = load_model(dec_model);
      const Container container = parse_container(read_file(dec_input));
      const QuantizedModel qm = quantize(m, container.q, container.precision);
      const std::vector<std::uint32_t> msg = decode(container.codeword, qm);
      write_file_atomic(dec_out, render(msg, AlphabetSpec::from_model(m)));
      out << "M " << msg.size() << "\n";
    } else if (sweep_cmd->parsed()) {
      const SymbolModel m = load_model(sweep_model);
      const std::vector<double> grid = parse_grid(sweep_grid);
      const std::vector<double> ts = parse_grid(sweep_t);
      if (!sweep_src.present()) throw DomainError("sweep needs --input or --simulate");
      const StringSet strings = sweep_src.load(m, sweep_m, threads, err);
      SweepOptions opts;
      opts.threads = threads;
      opts.keep_matrix = false;
      const SweepOutput res = sweep(strings, m, grid, ts, opts);
      if (!sweep_csv.empty()) {
        std::string csv = "q,t,L_emp\n";
        for (const auto& r : res.results) {
          for (std::size_t i = 0; i < grid.size(); ++i) {
            csv += fmt(grid[i]) + "," + fmt(r.t) + "," + fmt(r.l_emp[i], 12) + "\n";
          }
        }
        emit(sweep_csv, csv, out);
      }
      const std::vector<double> info = string_information(strings, m, threads);
      std::string summary =
          "t,argmin_q,refined_argmin_q,q_t,gap,L_emp_at_qt,renyi_line,"
          "cost_advantage,strings,M\n";
      for (const auto& r : res.results) {
        const double adv = empirical_exp_length(info, sweep_m, m, 1.0, r.t) - r.l_emp_at_qt;
        summary += fmt(r.t) + "," + fmt(r.argmin_q) + "," + fmt(r.refined_argmin_q) +
                   "," + fmt(r.q_t) + "," + fmt(r.gap_at_qt) + "," +
                   fmt(r.l_emp_at_qt, 12) + "," + fmt(r.renyi_line, 12) + "," +
                   fmt(adv) + "," + std::to_string(strings.size()) + "," +
                   std::to_string(sweep_m) + "\n";
      }
      emit(sweep_summary, summary, out);
    } else if (thr_cmd->parsed()) {
      const SymbolModel m = load_model(thr_model);
      std::vector<double> as;
      if (thr_a) {
        as.push_back(*thr_a);
      } else if (!thr_grid.empty()) {
        as = parse_grid(thr_grid);
      } else {
        throw DomainError("threshold needs --a or --a-grid");
      }
      std::optional<StringSet> strings;
      if (thr_src.present()) strings = thr_src.load(m, thr_m, threads, err);
      const LengthSource source =
          thr_exact ? LengthSource::kExactCoder : LengthSource::kAnalytic;

      nlohmann::json plans = nlohmann::json::array();
      std::string csv = "a,q_star,ub,exceed_frac_qstar,exceed_frac_q1\n";
      for (double a : as) {
        const ThresholdPlan plan = plan_threshold(m, a, thr_m);
        nlohmann::json j = {{"a", plan.a},
                            {"regime", to_string(plan.regime)},
                            {"q_star", plan.q_star},
                            {"ub", plan.ub},
                            {"M", plan.length}};
        if (plan.warning) j["warning"] = *plan.warning;
        plans.push_back(j);
        csv += fmt(a) + "," + fmt(plan.q_star, 12) + "," + fmt(plan.ub, 12) + ",";
        if (strings) {
          csv += fmt(exceed_fraction(*strings, m, plan.q_star, a, source, thr_k, threads)) +
                 "," + fmt(exceed_fraction(*strings, m, 1.0, a, source, thr_k, threads));
        } else {
          csv += ",";
        }
        csv += "\n";
      }
      const nlohmann::json doc = thr_a ? plans.front() : plans;
      emit(thr_json, doc.dump(2) + "\n", out);
      if (!thr_csv.empty()) emit(thr_csv, csv, out);
    } else if (erq_cmd->parsed()) {
      const SymbolModel p = load_model(erq_p);
      const SymbolModel r = load_model(erq_r);
      if (p.alphabet() != r.alphabet()) {
        throw DataError("models p and r have different alphabets");
      }
      const double dkl = kl_divergence(p.probs(), r.probs());
      std::string csv = "q,er_q,d_kl\n";
      for (double q : parse_grid(erq_grid)) {
        csv += fmt(q) + "," + fmt(er_q(p.probs(), r.probs(), q), 12) + "," +
               fmt(dkl, 12) + "\n";
      }
      emit(erq_out, csv, out);
    } else if (sim_cmd->parsed()) {
      const SymbolModel m = load_model(sim_model);
      const Corpus c = generate_iid(m, sim_count, sim_m, sim_seed, threads);
      write_file_atomic(sim_out, render(c.symbol_ids, AlphabetSpec::from_model(m)));
      out << "strings " << sim_count << "\nM " << sim_m << "\n";
    }
    warn_ties(err);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace acq::cli
