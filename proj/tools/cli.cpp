#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "monopart/equivalence.hpp"
#include "monopart/error.hpp"
#include "monopart/oracle.hpp"
#include "monopart/shape.hpp"
#include "monopart/scenario.hpp"
#include "monopart/solver.hpp"
#include "monopart/valuation.hpp"

namespace monopart::cli {

using nlohmann::json;

namespace {

constexpr int kRefuted = 3;

struct RefutedExit {};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  return f;
}

void write_nu_csv(const std::string& path, const NuFunction& nu) {
  auto f = open_out(path);
  f << "m,nu,dnu\n";
  const std::size_t n = 1001;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = nu.lo() + (nu.hi() - nu.lo()) * static_cast<double>(i) / static_cast<double>(n - 1);
    f << num(m) << ',' << num(nu(m)) << ',' << num(nu.dnu()(m)) << '\n';
  }
}

void write_price_csv(const std::string& path, const PiecewisePoly& price) {
  auto f = open_out(path);
  f << "gamma,x_star\n";
  const std::size_t n = 1001;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = price.lo() + (price.hi() - price.lo()) * static_cast<double>(i) / static_cast<double>(n - 1);
    f << num(g) << ',' << num(price(g)) << '\n';
  }
}

void write_partition_csv(const std::string& path, const MonotoneSet& s) {
  auto f = open_out(path);
  f << "interval_lo,interval_hi,kind\n";
  const auto& iv = s.intervals();
  for (std::size_t i = 0; i < iv.size(); ++i) {
    f << num(iv[i].lo) << ',' << num(iv[i].hi) << ',' << (iv[i].hi > iv[i].lo ? "separated" : "point") << '\n';
    if (i + 1 < iv.size()) f << num(iv[i].hi) << ',' << num(iv[i + 1].lo) << ",pooled\n";
  }
}

json certificate_json(const Certificate& c) {
  json j{{"verdict", std::string(to_string(c.verdict))},
         {"convexity_residual", c.convexity_residual},
         {"dominance_gap", c.dominance_gap},
         {"tol", c.tol},
         {"notes", c.notes},
         {"price_function", to_json(c.p_fn)}};
  j["witness"] = c.witness ? json(*c.witness) : json(nullptr);
  return j;
}

json payoffs_json(const Payoffs& p) {
  json j{{"principal", p.principal}, {"agent", p.agent}};
  if (p.principal_unnormalized) j["principal_unnormalized"] = *p.principal_unnormalized;
  if (p.agent_unnormalized) j["agent_unnormalized"] = *p.agent_unnormalized;
  return j;
}

struct NuProblem {
  NuFunction nu;
  PiecewisePoly c;
};

bool is_regulation(const Scenario& s) {
  return s.theta_bar && s.distribution && s.distribution->kind == DistributionSpec::Kind::Density;
}

NuProblem nu_problem(const Scenario& s, std::optional<double> theta_bar = std::nullopt) {
  if (is_regulation(s)) {
    const double tb = theta_bar.value_or(*s.theta_bar);
    return {NuFunction::regulation(*s.distribution->density, std::max(2.0, tb)),
            PiecewisePoly::identity(0.0, tb)};
  }
  const Primitive p = s.primitive();
  const Primitive pp = p.orientation() == Orientation::Delegation ? delegation_to_persuasion(p)
                                                                   : quantile_reparameterize(p);
  return {build_nu(pp), pp.u().state};
}

// Linear delegation primitive cut down to its bounding interval.
std::optional<BoundingInterval> bound_scenario(Scenario& s) {
  if (!s.reference_decision || !s.linear || s.orientation != Orientation::Delegation) return std::nullopt;
  const BoundingInterval bi = bounding_interval(s.primitive(), *s.reference_decision);
  s.linear->c = s.linear->c.restrict_to(bi.y_lo, bi.y_hi);
  return bi;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int main(const std::vector<std::string>& args) {
    CLI::App app{"Monotone persuasion and balanced delegation toolkit", "monopart"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--out", out_path_, "Write the JSON report here instead of stdout");
    app.add_flag("--strict", strict_, "Exit with code 3 when a certificate is refuted");

    std::function<void()> action;
    std::string scenario_path, builtin, set_path, tie_break, emit_nu, partition_csv, price_csv,
        nu_csv, top_csv, mode, out_dir, demo_name;
    std::optional<double> theta_bar;
    std::size_t n = 12, top_k = 5;

    auto add_source = [&](CLI::App* sub) {
      sub->add_option("scenario", scenario_path, "Scenario file (JSON)");
      sub->add_option("--builtin", builtin, "Use a bundled scenario instead of a file")
          ->check(CLI::IsMember(builtin_scenario_names()));
    };
    auto load = [&] {
      if (!builtin.empty()) return builtin_scenario(builtin);
      if (scenario_path.empty()) throw Error(ErrorKind::InvalidArgument, "no scenario given");
      return load_scenario(scenario_path);
    };
    auto candidate = [&](const Scenario& s) {
      if (!set_path.empty()) {
        std::ifstream f(set_path);
        if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open '" + set_path + "'");
        json j;
        try {
          f >> j;
        } catch (const json::exception& e) {
          throw Error(ErrorKind::InvalidScenario, std::string("set file is not valid JSON: ") + e.what());
        }
        return set_from_json(j);
      }
      if (!s.candidate) throw Error(ErrorKind::InvalidArgument, "no candidate set: pass --set");
      return *s.candidate;
    };

    auto* transform = app.add_subcommand("transform", "Equivalent primitive of the other problem");
    add_source(transform);
    transform->callback([&] { action = [&] { do_transform(load()); }; });

    auto* eval = app.add_subcommand("eval", "Expected payoffs of a set");
    add_source(eval);
    eval->add_option("--set", set_path, "Set file (JSON with lo, hi, intervals)");
    eval->add_option("--tie-break", tie_break, "principal-preferred, principal-worst or lowest");
    eval->add_option("--emit-nu", emit_nu, "Write m, nu, dnu rows here");
    eval->add_option("--partition-csv", partition_csv, "Write the set's cells here");
    eval->callback([&] {
      action = [&] {
        Scenario s = load();
        if (!tie_break.empty()) s.tie_break = scenario_from_json({{"name", "x"}, {"tie_break", tie_break}}).tie_break;
        do_eval(s, candidate(s), emit_nu, partition_csv);
      };
    });

    auto* reg = app.add_subcommand("solve-regulation", "Upper censorship for a unimodal cost density");
    add_source(reg);
    reg->add_option("--theta-bar", theta_bar, "Right end of the pooling interval (>= 1)");
    reg->add_option("--price-csv", price_csv, "Write gamma, x_star rows here");
    reg->add_option("--nu-csv", nu_csv, "Write m, nu, dnu rows here");
    reg->callback([&] { action = [&] { do_regulation(load(), theta_bar, price_csv, nu_csv); }; });

    auto* lin = app.add_subcommand("solve-linear", "Classify nu and build the optimal set");
    add_source(lin);
    lin->add_option("--partition-csv", partition_csv, "Write the set's cells here");
    lin->add_option("--nu-csv", nu_csv, "Write m, nu, dnu rows here");
    lin->callback([&] { action = [&] { do_linear(load(), partition_csv, nu_csv); }; });

    auto* ver = app.add_subcommand("verify", "Certificate for a candidate set");
    add_source(ver);
    ver->add_option("--set", set_path, "Set file (JSON with lo, hi, intervals)");
    ver->callback([&] {
      action = [&] {
        const Scenario s = load();
        do_verify(s, candidate(s));
      };
    });

    auto* orc = app.add_subcommand("oracle", "Exhaustive search over grid-aligned sets");
    add_source(orc);
    orc->add_option("-n,--cells", n, "Grid cells")->check(CLI::Range(1, 22));
    orc->add_option("--mode", mode, "persuasion, delegation or nu")
        ->check(CLI::IsMember({"persuasion", "delegation", "nu"}));
    orc->add_option("--top-k", top_k, "Ranked sets to report");
    orc->add_option("--top-csv", top_csv, "Write the ranked sets here");
    orc->callback([&] { action = [&] { do_oracle(load(), n, mode, top_k, top_csv); }; });

    auto* demo = app.add_subcommand("demo", "Run a bundled example end to end");
    demo->add_option("name", demo_name, "kg, regulation-triangular or producer")
        ->required()
        ->check(CLI::IsMember({"kg", "regulation-triangular", "producer"}));
    demo->add_option("--out-dir", out_dir, "Directory for CSV side files");
    demo->callback([&] { action = [&] { do_demo(demo_name, out_dir); }; });

    try {
      std::vector<std::string> rev(args.rbegin(), args.rend());
      app.parse(rev);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n";
      return 2;
    }

    try {
      action();
      return emit();
    } catch (const RefutedExit&) {
      emit();
      return kRefuted;
    } catch (const Error& e) {
      err_ << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return 1;
    }
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  std::string out_path_;
  bool strict_ = false;
  json report_;

  int emit() {
    const std::string text = canonical_dump(report_);
    if (out_path_.empty()) {
      out_ << text;
    } else {
      auto f = open_out(out_path_);
      f << text;
    }
    return 0;
  }

  void check_strict(const Certificate& c) {
    if (strict_ && !c.verified()) throw RefutedExit{};
  }

  void do_transform(const Scenario& s) {
    const Primitive p = s.primitive();
    const bool del = p.orientation() == Orientation::Delegation;
    const Primitive q = del ? delegation_to_persuasion(p) : persuasion_to_delegation(p);
    const Primitive pq = quantile_reparameterize(p);
    const DualityResidual r = del ? duality_residual(pq, q) : duality_residual(q, pq);
    Scenario t = scenario_from_primitive(q, s.name + (del ? "-persuasion" : "-delegation"));
    t.principal_anchor.reset();
    t.agent_anchor.reset();
    t.candidate = s.candidate;
    t.critical_points = s.critical_points;
    report_ = {{"transformed", to_json(t)},
               {"duality_residual", {{"max_abs_U", r.max_abs_U}, {"max_abs_V", r.max_abs_V}, {"grid_size", r.grid_size}}}};
  }

  void do_eval(const Scenario& s, const MonotoneSet& set, const std::string& emit_nu,
               const std::string& partition_csv) {
    const Primitive p = s.primitive();
    report_ = {{"scenario", s.name},
               {"orientation", std::string(to_string(p.orientation()))},
               {"tie_break", std::string(to_string(s.tie_break))},
               {"set", to_json(set)},
               {"payoffs", payoffs_json(expected_payoffs(p, set, s.tie_break))}};
    std::optional<NuProblem> np;
    try {
      np = nu_problem(s);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnsupportedPrimitive) throw;
      report_["nu_note"] = e.what();
    }
    if (np && np->c.lo() == set.lo() && np->c.hi() == set.hi())
      report_["nu_value"] = expected_nu(set, np->nu, np->c);
    if (!emit_nu.empty()) {
      if (!np) throw Error(ErrorKind::UnsupportedPrimitive, "nu is not available for this scenario");
      write_nu_csv(emit_nu, np->nu);
    }
    if (!partition_csv.empty()) write_partition_csv(partition_csv, set);
  }

  void do_regulation(const Scenario& s, std::optional<double> theta_bar, const std::string& price_csv,
                     const std::string& nu_csv) {
    if (!s.distribution || s.distribution->kind != DistributionSpec::Kind::Density)
      throw Error(ErrorKind::InvalidScenario, "regulation needs a density distribution");
    const double tb = theta_bar.value_or(s.theta_bar.value_or(1.0));
    const RegulationSolution sol = solve_upper_censorship(*s.distribution->density, tb);
    const Certificate cert = verify_optimal(sol.pi, sol.nu, PiecewisePoly::identity(0.0, tb));
    report_ = regulation_json(sol, cert);
    report_["scenario"] = s.name;
    if (!price_csv.empty()) write_price_csv(price_csv, sol.price_fn);
    if (!nu_csv.empty()) write_nu_csv(nu_csv, sol.nu);
    check_strict(cert);
  }

  static json regulation_json(const RegulationSolution& sol, const Certificate& cert) {
    json j{{"theta_star", sol.theta_star},
           {"theta_bar", sol.theta_bar},
           {"foc_residual", sol.foc_residual},
           {"bracket", {sol.bracket.first, sol.bracket.second}},
           {"bracket_widened", sol.bracket_widened},
           {"mode", sol.mode},
           {"value", sol.value},
           {"set", to_json(sol.pi)},
           {"price_function", to_json(sol.price_fn)},
           {"certificate", certificate_json(cert)}};
    j["foc_rewrite_residual"] = sol.foc_rewrite_residual ? json(*sol.foc_rewrite_residual) : json(nullptr);
    return j;
  }

  void do_linear(Scenario s, const std::string& partition_csv, const std::string& nu_csv) {
    const auto bi = bound_scenario(s);
    const NuProblem np = nu_problem(s);
    const ShapeSolution sol = classify_and_solve(np.nu, np.c);
    report_ = {{"scenario", s.name},
               {"shape", std::string(to_string(sol.shape))},
               {"case", sol.case_label},
               {"set", to_json(sol.pi)},
               {"value", sol.value},
               {"cutoffs", sol.cutoffs},
               {"multiple", sol.multiple},
               {"slope_lo", sol.slope_lo},
               {"slope_hi", sol.slope_hi},
               {"notes", sol.notes},
               {"certificate", certificate_json(sol.certificate)}};
    report_["inflection"] = sol.inflection ? json(*sol.inflection) : json(nullptr);
    if (bi)
      report_["bounding_interval"] = {{"y_lo", bi->y_lo}, {"y_hi", bi->y_hi}, {"z_lo", bi->z_lo},
                                      {"z_hi", bi->z_hi}, {"x_lo", bi->x_lo}, {"x_hi", bi->x_hi}};
    if (!partition_csv.empty()) write_partition_csv(partition_csv, sol.pi);
    if (!nu_csv.empty()) write_nu_csv(nu_csv, np.nu);
    check_strict(sol.certificate);
  }

  void do_verify(const Scenario& s, const MonotoneSet& set) {
    const NuProblem np = nu_problem(s, is_regulation(s) ? std::optional(set.hi()) : std::nullopt);
    const Certificate cert = verify_optimal(set, np.nu, np.c);
    report_ = {{"scenario", s.name}, {"set", to_json(set)}, {"value", expected_nu(set, np.nu, np.c)},
               {"certificate", certificate_json(cert)}};
    check_strict(cert);
  }

  void do_oracle(const Scenario& s, std::size_t n, std::string mode, std::size_t top_k,
                 const std::string& top_csv) {
    OracleOptions opt;
    opt.n = n;
    opt.tb = s.tie_break;
    opt.critical_points = s.critical_points;
    opt.top_k = top_k;
    if (mode.empty()) mode = is_regulation(s) ? "nu" : std::string(to_string(s.orientation));
    OracleResult r;
    std::optional<Primitive> prim;
    if (mode == "nu") {
      const NuProblem np = nu_problem(s);
      r = enumerate_optimum(np.nu, np.c, opt);
    } else {
      const Primitive p = s.primitive();
      const bool want_del = mode == "delegation";
      const bool is_del = p.orientation() == Orientation::Delegation;
      prim = want_del == is_del ? p : (is_del ? delegation_to_persuasion(p) : persuasion_to_delegation(p));
      r = enumerate_optimum(*prim, want_del ? OracleMode::Delegation : OracleMode::Persuasion, opt);
    }
    json top = json::array();
    for (const RankedSet& e : r.top) {
      json row{{"set", to_json(e.set)}, {"value", e.value}};
      if (e.agent_value) row["agent_value"] = *e.agent_value;
      top.push_back(row);
    }
    report_ = {{"scenario", s.name}, {"mode", mode},       {"n", n},
               {"grid", r.grid},     {"set", to_json(r.best)}, {"value", r.value},
               {"evaluated", r.evaluated}, {"top", top}};
    if (prim) report_["payoffs"] = payoffs_json(expected_payoffs(*prim, r.best, s.tie_break));
    if (!top_csv.empty()) {
      auto f = open_out(top_csv);
      f << "rank,value,set\n";
      for (std::size_t i = 0; i < r.top.size(); ++i)
        f << i + 1 << ',' << num(r.top[i].value) << ",\"" << r.top[i].set.to_string() << "\"\n";
    }
  }

  void do_demo(const std::string& name, const std::string& out_dir) {
    auto side = [&](const std::string& file) { return out_dir.empty() ? std::string() : out_dir + "/" + file; };
    if (name == "kg") {
      const Scenario s = builtin_scenario("kg");
      const Primitive pD = s.primitive();
      OracleOptions opt;
      opt.n = 10;
      opt.critical_points = s.critical_points;
      const OracleResult r = enumerate_optimum(pD, OracleMode::Delegation, opt);
      const Payoffs d = expected_payoffs(pD, r.best);
      const Payoffs p = expected_payoffs(delegation_to_persuasion(pD), r.best);
      report_ = {{"demo", name},
                 {"set", to_json(r.best)},
                 {"principal", *d.principal_unnormalized},
                 {"persuasion_principal", p.principal},
                 {"evaluated", r.evaluated}};
    } else if (name == "regulation-triangular") {
      const Scenario s = builtin_scenario("regulation-triangular");
      const PiecewisePoly& f = *s.distribution->density;
      const RegulationSolution one = solve_upper_censorship(f, 1.0);
      const RegulationSolution two = solve_upper_censorship(f, 2.0);
      const Certificate c1 = verify_optimal(one.pi, one.nu, PiecewisePoly::identity(0.0, 1.0));
      const Certificate c2 = verify_optimal(two.pi, two.nu, PiecewisePoly::identity(0.0, 2.0));
      report_ = {{"demo", name},
                 {"theta_star", one.theta_star},
                 {"theta_star_star", two.theta_star},
                 {"ordered", one.theta_star > two.theta_star},
                 {"with_participation", regulation_json(one, c1)},
                 {"without_participation", regulation_json(two, c2)}};
      if (!out_dir.empty()) {
        write_price_csv(side("price_theta_bar_1.csv"), one.price_fn);
        write_price_csv(side("price_theta_bar_2.csv"), two.price_fn);
        write_nu_csv(side("nu.csv"), one.nu);
      }
      check_strict(c1);
      check_strict(c2);
    } else {
      const Scenario s = builtin_scenario("producer");
      const Primitive p = s.primitive();
      const Payoffs v = expected_payoffs(p, *s.candidate);
      const RegulationSolution sol =
          solve_upper_censorship(*builtin_scenario("regulation-triangular").distribution->density, 1.0);
      report_ = {{"demo", name},
                 {"set", to_json(*s.candidate)},
                 {"payoffs", payoffs_json(v)},
                 {"regulation_value", sol.value},
                 {"gap", v.principal - sol.value}};
      if (!out_dir.empty()) write_partition_csv(side("partition.csv"), *s.candidate);
    }
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Runner(out, err).main(args);
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace monopart::cli
