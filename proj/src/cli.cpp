#include "hrsearch/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <map>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hrsearch/divergence.hpp"
#include "hrsearch/errors.hpp"

namespace hrsearch {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct CommonOptions {
  std::string fn;
  std::string poly_file;
  int p = 0;
  int eps_bits = 0;
  std::vector<int> binades;
  int domain_bits = 0;
  std::uint64_t first_domain = 0;
  std::uint64_t domains = 0;
  std::string algo = "regular";
  std::string div_mode = "hybrid";
  int word_bits = 64;
  std::uint64_t tau = 0;
  std::uint64_t nu = 0;
  int degree = 2;
  std::size_t limbs = 8;
  int frac_bits = 128;
  std::uint64_t split = 8;
  unsigned threads = 1;
  double auto_threshold = 1e-3;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--fn", o.fn, "Function: exp, log, exp2 or poly-file")
      ->required()
      ->check(CLI::IsMember({"exp", "log", "exp2", "poly-file"}));
  cmd->add_option("--poly", o.poly_file, "Coefficient file for --fn poly-file");
  cmd->add_option("--p", o.p, "Precision in bits")->required();
  cmd->add_option("--eps-bits", o.eps_bits, "Threshold exponent: eps = 2^-eps-bits")->required();
  cmd->add_option("--binade", o.binades, "Binade exponent(s) E for [2^E, 2^(E+1))")
      ->required()
      ->delimiter(',');
  cmd->add_option("--domain-bits", o.domain_bits, "log2 of the domain size");
  cmd->add_option("--first-domain", o.first_domain, "First domain of the binade to search");
  cmd->add_option("--domains", o.domains, "Number of domains to search (default: all)");
  cmd->add_option("--algo", o.algo, "lefevre, lefevre-swap, regular, regular-unrolled or auto")
      ->check(CLI::IsMember({"lefevre", "lefevre-swap", "regular", "regular-unrolled", "auto"}));
  cmd->add_option("--div-mode", o.div_mode, "sub, hw or hybrid")
      ->transform(CLI::IsMember(std::map<std::string, std::string>{
          {"sub", "subtractive"}, {"subtractive", "subtractive"}, {"hw", "hardware"},
          {"hardware", "hardware"}, {"hybrid", "hybrid"}}));
  cmd->add_option("--word-bits", o.word_bits, "Fixed-point word size")->check(CLI::IsMember({32, 64}));
  cmd->add_option("--tau", o.tau, "Domains per super-domain (default: automatic)");
  cmd->add_option("--nu", o.nu, "Coefficients per packet");
  cmd->add_option("--degree", o.degree, "Approximation degree");
  cmd->add_option("--limbs", o.limbs, "32-bit limbs per coefficient");
  cmd->add_option("--frac-bits", o.frac_bits, "Fraction bits of the coefficients");
  cmd->add_option("--phase2-split", o.split, "Phase-2 subdomains per failing domain");
  cmd->add_option("--workers", o.threads, "Worker threads");
  cmd->add_option("--auto-threshold", o.auto_threshold, "Phase-3 ratio above which auto picks lefevre");
  cmd->add_option("--seed", o.seed, "Accepted for scripting; the search makes no random choices");
}

std::shared_ptr<const Function> build_function(const CommonOptions& o) {
  if (o.fn == "poly-file") {
    if (o.poly_file.empty()) throw ConfigError("--fn poly-file needs --poly FILE");
    return load_polynomial_file(o.poly_file);
  }
  return make_function(o.fn);
}

SearchPlan build_plan(const CommonOptions& o, std::shared_ptr<const Function> f, int binade) {
  SearchPlan plan;
  plan.function = std::move(f);
  plan.format = {o.p, o.eps_bits};
  plan.format.validate();
  plan.binade = binade;
  if (o.domain_bits < 0 || o.domain_bits >= o.p) throw ConfigError("domain bits must be below p so that 2^bits divides the binade size 2^(p-1)");
  plan.polygen.domain_size = o.domain_bits > 0 ? std::uint64_t{1} << o.domain_bits : 0;
  plan.polygen.tau = o.tau;
  plan.polygen.nu = o.nu;
  plan.polygen.degree = o.degree;
  plan.polygen.limbs = o.limbs;
  plan.polygen.frac_bits = o.frac_bits;
  plan.phases.algorithm = *parse_algorithm_choice(o.algo);
  plan.phases.division = *parse_division_mode(o.div_mode);
  plan.phases.word_bits = o.word_bits;
  plan.phases.split = o.split;
  plan.phases.workers = o.threads;
  plan.phases.auto_threshold = o.auto_threshold;
  plan.first_domain = o.first_domain;
  plan.domain_count = o.domains;
  return plan;
}

PipelineResult run_all(const CommonOptions& o, bool timing, std::ostream* log = nullptr) {
  auto f = build_function(o);
  PipelineResult total;
  for (int b : o.binades) {
    SearchPlan plan = build_plan(o, f, b);
    plan.timing = timing;
    auto r = run_pipeline(plan);
    if (log && plan.phases.algorithm == AlgorithmChoice::automatic) {
      for (const auto& ch : r.stats.choices) {
        *log << "binade " << b << " interval " << ch.interval << ": " << to_string(ch.algorithm) << "\n";
      }
    }
    total.records.insert(total.records.end(), r.records.begin(), r.records.end());
    total.stats.merge(r.stats);
  }
  return total;
}

std::vector<HrCaseRecord> oracle_all(const CommonOptions& o) {
  auto f = build_function(o);
  std::vector<HrCaseRecord> out;
  for (int b : o.binades) {
    SearchPlan plan = resolve_plan(build_plan(o, f, b));
    BinadeSplit split(b, plan.format, plan.polygen.domain_size);
    for (std::uint64_t i = plan.first_domain; i < plan.first_domain + plan.domain_count; ++i) {
      auto recs = exhaustive_hr_search(*f, split.at(i), plan.format);
      recs = resolve_undecided(recs, *f, plan.format);
      out.insert(out.end(), recs.begin(), recs.end());
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string records_text(const std::vector<HrCaseRecord>& rs, const std::string& format) {
  std::string s;
  if (format == "csv") s += "arg_bits,distance_num,distance_den_log2,domain\n";
  for (const auto& r : rs) s += (format == "csv" ? record_to_csv(r) : record_to_json(r)) + "\n";
  return s;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

int cmd_search(const CommonOptions& o, const std::string& format, const std::string& out_dir,
               bool timing, std::ostream& out, std::ostream& err) {
  auto result = run_all(o, timing, &err);
  std::string recs = records_text(result.records, format);
  std::string stats = stats_to_csv(result.stats);
  if (out_dir.empty()) {
    out << recs;
    err << stats;
  } else {
    std::filesystem::create_directories(out_dir);
    write_file(std::filesystem::path(out_dir) / (format == "csv" ? "hr_cases.csv" : "hr_cases.jsonl"),
               recs);
    write_file(std::filesystem::path(out_dir) / "phase_stats.csv", stats);
    out << result.records.size() << " hard-to-round cases written to " << out_dir << "\n";
  }
  return kExitOk;
}

int cmd_oracle_check(const CommonOptions& o, bool inject_fault, std::ostream& out,
                     std::ostream& err) {
  auto pipeline = run_all(o, false).records;
  auto oracle = oracle_all(o);
  if (inject_fault && !pipeline.empty()) pipeline.pop_back();
  std::sort(oracle.begin(), oracle.end());
  std::sort(pipeline.begin(), pipeline.end());
  std::vector<HrCaseRecord> missing, extra;
  std::set_difference(oracle.begin(), oracle.end(), pipeline.begin(), pipeline.end(),
                      std::back_inserter(missing));
  std::set_difference(pipeline.begin(), pipeline.end(), oracle.begin(), oracle.end(),
                      std::back_inserter(extra));
  out << missing.size() + extra.size() << " differences (oracle " << oracle.size()
      << ", pipeline " << pipeline.size() << ", missing " << missing.size() << ", extra "
      << extra.size() << ")\n";
  for (const auto& r : missing) err << "missing " << record_to_json(r) << "\n";
  for (const auto& r : extra) err << "extra " << record_to_json(r) << "\n";
  return missing.empty() && extra.empty() ? kExitOk : kExitMismatch;
}

template <FracWord Word>
int divergence_for(const CommonOptions& o, unsigned warp_size, const std::string& out_dir,
                   std::ostream& out) {
  auto f = build_function(o);
  std::vector<SearchProblem<Word>> problems;
  for (int b : o.binades) {
    auto ps = phase1_problems<Word>(build_plan(o, f, b));
    problems.insert(problems.end(), ps.begin(), ps.end());
  }
  struct Row {
    std::string label;
    LowerBoundAlgorithm algo;
    DivisionMode mode;
  };
  const std::vector<Row> rows = {
      {"lefevre", LowerBoundAlgorithm::lefevre, DivisionMode::subtractive},
      {"lefevre-specific", LowerBoundAlgorithm::lefevre, DivisionMode::hybrid},
      {"lefevre-swap", LowerBoundAlgorithm::lefevre_swap, DivisionMode::hybrid},
      {"regular", LowerBoundAlgorithm::regular, DivisionMode::hybrid},
      {"regular-unrolled", LowerBoundAlgorithm::regular_unrolled, DivisionMode::hybrid},
  };
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  std::ostringstream summary;
  summary << "algorithm,warps,lanes,mean_iter,min_iter,max_iter,mean_mdm,mean_nmdm,"
             "tight_warps,serialized_instructions\n";
  for (const auto& r : rows) {
    std::span<const SearchProblem<Word>> ps(problems);
    if (!out_dir.empty()) {
      std::ostringstream csv;
      csv << "warp_id,max_iter,mean_iter,mdm,nmdm\n";
      for (const auto& w : simulate_warps(ps, r.algo, r.mode, warp_size)) {
        csv << w.warp_id << "," << w.max_iter << "," << fixed(w.mean_iter, 6) << ","
            << fixed(w.mdm, 6) << "," << fixed(w.nmdm, 6) << "\n";
      }
      write_file(std::filesystem::path(out_dir) / ("warps_" + r.label + ".csv"), csv.str());
    }
    auto s = summarize_divergence(r.label, ps, r.algo, r.mode, warp_size);
    summary << s.label << "," << s.warps << "," << s.lanes << "," << fixed(s.mean_iter, 4) << ","
            << s.min_iter << "," << s.max_iter << "," << fixed(s.mean_mdm, 4) << ","
            << fixed(s.mean_nmdm, 6) << "," << fixed(s.tight_warps, 4) << ","
            << s.serialized_instructions << "\n";
  }
  if (!out_dir.empty()) write_file(std::filesystem::path(out_dir) / "divergence_summary.csv", summary.str());
  out << summary.str();
  return kExitOk;
}

int cmd_dump_coeffs(const CommonOptions& o, std::uint64_t interval, std::ostream& out) {
  auto f = build_function(o);
  for (int b : o.binades) {
    SearchPlan plan = resolve_plan(build_plan(o, f, b));
    if (interval >= plan.domain_count / plan.polygen.tau) throw ConfigError("interval out of range");
    out << "# binade " << b << " interval " << interval << " tau " << plan.polygen.tau
        << " frac_bits " << plan.polygen.frac_bits << "\n";
    for (const auto& dp : interval_polys(plan, interval)) {
      out << dp.domain;
      for (const auto& c : dp.poly.coeffs) out << " " << c.to_hex();
      out << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

std::string record_to_json(const HrCaseRecord& r) {
  nlohmann::json j;
  j["arg_bits"] = hex64(r.arg_bits);
  j["distance_num"] = r.distance_num;
  j["distance_den_log2"] = r.distance_den_log2;
  j["domain"] = r.domain;
  return j.dump();
}

std::string record_to_csv(const HrCaseRecord& r) {
  return hex64(r.arg_bits) + "," + std::to_string(r.distance_num) + "," +
         std::to_string(r.distance_den_log2) + "," + std::to_string(r.domain);
}

std::string stats_to_csv(const PhaseStats& s) {
  std::ostringstream o;
  o << "phase,domains_in,domains_out,arguments_covered,wall_ms\n";
  for (const auto& r : s.rows()) {
    o << r.phase << "," << r.domains_in << "," << r.domains_out << "," << r.arguments_covered
      << "," << fixed(r.wall_ms, 3) << "\n";
  }
  return o.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Search for hard-to-round cases of elementary functions"};
  app.require_subcommand(1);
  CommonOptions search_opts, check_opts, div_opts, dump_opts;

  auto* search = app.add_subcommand("search", "Run the three-phase search");
  add_common(search, search_opts);
  std::string format = "jsonl", out_dir;
  bool timing = false;
  search->add_option("--format", format, "jsonl or csv")->check(CLI::IsMember({"jsonl", "csv"}));
  search->add_option("--out", out_dir, "Directory for hr_cases and phase_stats files");
  search->add_flag("--timing", timing, "Record wall-clock times in the phase statistics");

  auto* check = app.add_subcommand("oracle-check", "Compare the search with exhaustive evaluation");
  add_common(check, check_opts);
  bool inject_fault = false;
  check->add_flag("--inject-fault", inject_fault)->group("");

  auto* div = app.add_subcommand("divergence", "Simulate warp divergence of the lower-bound algorithms");
  add_common(div, div_opts);
  unsigned warp_size = 32;
  std::string div_out;
  div->add_option("--warp-size", warp_size, "Lanes per warp");
  div->add_option("--out", div_out, "Directory for per-warp CSV files");

  auto* dump = app.add_subcommand("dump-coeffs", "Print the domain coefficients of one interval");
  add_common(dump, dump_opts);
  std::uint64_t interval = 0;
  dump->add_option("--interval", interval, "Interval (super-domain) index");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*search) return cmd_search(search_opts, format, out_dir, timing, out, err);
    if (*check) return cmd_oracle_check(check_opts, inject_fault, out, err);
    if (*div) {
      return div_opts.word_bits == 32 ? divergence_for<std::uint32_t>(div_opts, warp_size, div_out, out)
                                      : divergence_for<std::uint64_t>(div_opts, warp_size, div_out, out);
    }
    if (*dump) return cmd_dump_coeffs(dump_opts, interval, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const OracleMismatch& e) {
    err << "oracle mismatch: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace hrsearch
