#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "conclab/apps.hpp"
#include "conclab/io.hpp"
#include "conclab/selftest.hpp"
#include "conclab/stats.hpp"
#include "conclab/verify.hpp"
#include "json.hpp"

namespace {

using namespace conclab;

std::string timestamp_tag() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d%H%M%S", &tm_utc);
  return buf;
}

// --out semantics: empty -> stdout; existing directory or trailing '/' ->
// <stem>_<tag>.<ext> inside it; anything else -> exact path
void emit(const std::string& content, const std::string& out, const std::string& format,
          const std::string& stem, const std::string& tag) {
  if (out.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << "\n";
    return;
  }
  namespace fs = std::filesystem;
  fs::path path(out);
  if (out.back() == '/' || (fs::exists(path) && fs::is_directory(path))) {
    const std::string t = tag.empty() ? timestamp_tag() : tag;
    path /= stem + "_" + t + (format == "csv" ? ".csv" : ".json");
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!content.empty() && content.back() != '\n') f << "\n";
}

std::vector<double> parse_point_list(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
  return vals;
}

PointVec parse_point(const std::string& text) {
  PointVec p;
  for (double v : parse_point_list(text)) p.push_back(Symbol(v));
  return p;
}

// pre-scan for --config <file>, strip it, and inject the file's key/value
// pairs right after the subcommand so explicit flags override them
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string config_path;
  for (size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      config_path = args[i + 1];
      args.erase(args.begin() + long(i), args.begin() + long(i) + 2);
      break;
    }
  }
  if (config_path.empty()) return args;
  std::ifstream in(config_path);
  if (!in) throw CLI::FileError("cannot read config: " + config_path);
  nlohmann::json j;
  in >> j;
  if (!j.is_object()) throw CLI::FileError("config must be a JSON object");
  std::vector<std::string> injected;
  for (auto it = j.begin(); it != j.end(); ++it) {
    injected.push_back("--" + it.key());
    if (it->is_array()) {
      std::string joined;
      for (const auto& v : *it) {
        if (!joined.empty()) joined += ",";
        joined += v.dump();
      }
      injected.push_back(joined);
    } else if (it->is_string()) {
      injected.push_back(it->get<std::string>());
    } else if (!it->is_boolean() || !it->get<bool>()) {
      injected.push_back(it->dump());
    }
  }
  // locate the subcommand (first non-flag token)
  size_t pos = 0;
  while (pos < args.size() && args[pos].rfind("--", 0) == 0) pos += 2;
  if (pos < args.size()) ++pos;
  args.insert(args.begin() + long(pos), injected.begin(), injected.end());
  return args;
}

int run(std::vector<std::string> args) {
  CLI::App app{"finite product-space concentration toolkit"};
  app.require_subcommand(1);

  // ---- bound ----
  auto* bound_cmd = app.add_subcommand("bound", "evaluate a closed-form bound");
  std::string b_eq, b_out, b_format = "json", b_tag;
  BoundQuery query;
  double b_c = 0.9;
  int b_alphabet = 2;
  bound_cmd->add_option("--eq", b_eq, "equation id")->required();
  bound_cmd->add_option("--N", query.N);
  bound_cmd->add_option("--pA", query.pA);
  bound_cmd->add_option("--t", query.t);
  bound_cmd->add_option("--k", query.k);
  bound_cmd->add_option("--u", query.u);
  bound_cmd->add_option("--alpha", query.alpha);
  bound_cmd->add_option("--q", query.q);
  bound_cmd->add_option("--p", query.p);
  bound_cmd->add_option("--p1", query.p1);
  bound_cmd->add_option("--K", query.K);
  bound_cmd->add_option("--c", b_c, "indicator-kernel scale for 2.4.x");
  bound_cmd->add_option("--alphabet", b_alphabet, "alphabet for 2.4.x");
  bound_cmd->add_option("--out", b_out);
  bound_cmd->add_option("--format", b_format)->check(CLI::IsMember({"json", "csv"}));
  bound_cmd->add_option("--tag", b_tag);

  // ---- distance ----
  auto* dist_cmd = app.add_subcommand("distance", "evaluate a distance functional");
  std::string d_kind, d_space = "uniform2^3", d_x, d_profile;
  std::vector<std::string> d_events;
  double d_alpha = 1.0, d_c = 1.0;
  dist_cmd->add_option("--kind", d_kind, "hamming|one-sided|penalty|q-point|convex|xi|perm")
      ->required();
  dist_cmd->add_option("--space", d_space);
  dist_cmd->add_option("--A", d_events, "event JSON or @file; repeat for q-point")
      ->required();
  dist_cmd->add_option("--x", d_x, "comma-separated coordinates")->required();
  dist_cmd->add_option("--profile", d_profile, "comma-separated penalties");
  dist_cmd->add_option("--alpha", d_alpha);
  dist_cmd->add_option("--c", d_c, "indicator-kernel scale");

  // ---- verify-exact ----
  auto* verify_cmd = app.add_subcommand("verify-exact", "exact inequality sweep");
  SweepOptions sweep;
  sweep.workers = default_workers();
  std::string v_eq, v_out, v_format = "json", v_tag;
  verify_cmd->add_option("--eq", v_eq, "equation id")->required();
  verify_cmd->add_option("--space", sweep.space);
  verify_cmd->add_option("--events", sweep.events, "all | random:<n>");
  verify_cmd->add_option("--t-grid", sweep.t_grid)->delimiter(',');
  verify_cmd->add_option("--alpha", sweep.alpha);
  verify_cmd->add_option("--q", sweep.q);
  verify_cmd->add_option("--p1", sweep.p1);
  verify_cmd->add_option("--penalty-c", sweep.penalty_c);
  verify_cmd->add_option("--seed", sweep.seed);
  verify_cmd->add_option("--workers", sweep.workers);
  verify_cmd->add_option("--out", v_out);
  verify_cmd->add_option("--format", v_format)->check(CLI::IsMember({"json", "csv"}));
  verify_cmd->add_option("--tag", v_tag);

  // ---- mc ----
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo tail of a named statistic");
  std::string m_stat = "uniform01", m_out, m_format = "json", m_tag;
  std::vector<double> m_grid;
  int64_t m_samples = 10000;
  uint64_t m_seed = 0;
  int m_workers = default_workers();
  mc_cmd->add_option("--stat", m_stat, "uniform01 | normal01 | constant:<c>");
  mc_cmd->add_option("--u-grid", m_grid)->delimiter(',')->required();
  mc_cmd->add_option("--samples", m_samples);
  mc_cmd->add_option("--seed", m_seed);
  mc_cmd->add_option("--workers", m_workers);
  mc_cmd->add_option("--out", m_out);
  mc_cmd->add_option("--format", m_format)->check(CLI::IsMember({"json", "csv"}));
  mc_cmd->add_option("--tag", m_tag);

  // ---- app ----
  auto* app_cmd = app.add_subcommand("app", "application simulators");
  std::string a_name, a_out, a_format = "json", a_tag;
  std::string a_mode = "ffd", a_dist = "uniform01", a_disorder = "normal";
  std::string a_variant = "13.17", a_family;
  int a_n = 100, a_n2 = 0, a_alphabet = 2, a_q = 2, a_workers = default_workers();
  double a_beta = 0.5, a_quantile = 0.60, a_rscale = -1.0;
  int64_t a_samples = 10000;
  uint64_t a_seed = 0;
  std::vector<double> a_ugrid, a_tgrid;
  std::vector<int> a_klist{2, 4};
  app_cmd->add_option("name", a_name,
                      "binpack|lis|lcs|supsum|supsum-perm|supsum-qk|fpp|spinglass")
      ->required();
  app_cmd->add_option("--N", a_n);
  app_cmd->add_option("--N2", a_n2);
  app_cmd->add_option("--alphabet", a_alphabet);
  app_cmd->add_option("--mode", a_mode, "binpack: exact|ffd");
  app_cmd->add_option("--dist", a_dist);
  app_cmd->add_option("--disorder", a_disorder);
  app_cmd->add_option("--beta", a_beta);
  app_cmd->add_option("--variant", a_variant);
  app_cmd->add_option("--family", a_family, "JSON {\"alphas\":[[...],...]} or @file");
  app_cmd->add_option("--q", a_q);
  app_cmd->add_option("--k-list", a_klist)->delimiter(',');
  app_cmd->add_option("--a-quantile", a_quantile);
  app_cmd->add_option("--r-scale", a_rscale);
  app_cmd->add_option("--samples", a_samples);
  app_cmd->add_option("--seed", a_seed);
  app_cmd->add_option("--u-grid", a_ugrid)->delimiter(',');
  app_cmd->add_option("--t-grid", a_tgrid)->delimiter(',');
  app_cmd->add_option("--workers", a_workers);
  app_cmd->add_option("--out", a_out);
  app_cmd->add_option("--format", a_format)->check(CLI::IsMember({"json", "csv"}));
  app_cmd->add_option("--tag", a_tag);

  // ---- selftest ----
  auto* self_cmd = app.add_subcommand("selftest", "run the acceptance suite");
  bool s_quick = false, s_fault = false;
  int s_workers = default_workers();
  self_cmd->add_flag("--quick", s_quick, "reduced sample counts");
  self_cmd->add_flag("--inject-fault", s_fault)->group("");  // test hook
  self_cmd->add_option("--workers", s_workers)->group("");   // accepted; suite runs 1 and 8

  std::vector<const char*> argv;
  argv.push_back("conclab");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (bound_cmd->parsed()) {
    std::string json, csv;
    if (b_eq.rfind("2.4.", 0) == 0) {
      FiniteSpace mu;
      mu.weights.assign(size_t(b_alphabet), 1.0 / b_alphabet);
      const PenaltyKernel kernel = indicator_kernel(b_alphabet, mu, b_c);
      nlohmann::json arr = nlohmann::json::array();
      std::ostringstream cs;
      cs << "equation,value,note\n";
      for (const auto& b : penalty_bounds(query, kernel)) {
        if (b.equation != b_eq && b_eq != "2.4.*") continue;
        arr.push_back({{"equation", b.equation}, {"params", b.params},
                       {"value", b.value}, {"note", b.note}});
        cs << b.equation << "," << b.value << "," << b.note << "\n";
      }
      if (arr.empty()) {
        std::cerr << "error: unknown penalty bound " << b_eq << "\n";
        return 2;
      }
      json = arr.size() == 1 ? arr[0].dump() : arr.dump();
      csv = cs.str();
    } else {
      const BoundValue b = evaluate_bound(b_eq, query);
      nlohmann::json j = {{"equation", b.equation}, {"params", b.params},
                          {"value", b.value}, {"note", b.note}};
      json = j.dump();
      std::ostringstream cs;
      cs << "equation,value,note\n" << b.equation << "," << b.value << "," << b.note << "\n";
      csv = cs.str();
    }
    emit(b_format == "csv" ? csv : json, b_out, b_format, "bound_" + b_eq, b_tag);
    return 0;
  }

  if (dist_cmd->parsed()) {
    nlohmann::json j;
    j["kind"] = d_kind;
    if (d_kind == "perm") {
      std::vector<Permutation> perms;
      const auto ev = nlohmann::json::parse(d_events.at(0));
      for (const auto& p : ev.at("points")) {
        Permutation perm;
        for (const auto& c : p) perm.push_back(Symbol(c.get<unsigned>()));
        perms.push_back(std::move(perm));
      }
      const MinNormResult r = perm_convex_distance(perms, parse_point(d_x));
      j["value"] = r.value;
      j["gap"] = r.gap;
    } else {
      const ProductSpace s = space_from_cli(d_space);
      const PointVec x = parse_point(d_x);
      std::vector<Event> events;
      for (const auto& e : d_events) events.push_back(event_from_cli(s, e));
      if (d_kind == "hamming") {
        WeightProfile profile;
        const bool has_profile = !d_profile.empty();
        if (has_profile) profile = make_profile(parse_point_list(d_profile));
        j["value"] = hamming_distance(s, events.at(0), x, has_profile ? &profile : nullptr);
      } else if (d_kind == "one-sided") {
        j["value"] = one_sided_distance(s, events.at(0), x);
      } else if (d_kind == "penalty") {
        const PenaltyKernel kernel = indicator_kernel(s.factors[0].size(), s.factors[0], d_c);
        j["value"] = penalty_distance(s, events.at(0), x, kernel);
      } else if (d_kind == "q-point") {
        std::vector<const Event*> ptrs;
        for (const auto& e : events) ptrs.push_back(&e);
        j["value"] = q_point_distance(s, ptrs, x);
      } else if (d_kind == "convex") {
        const ConvexDistance r = convex_distance(s, events.at(0), x);
        j["value"] = r.fc;
        j["squared"] = r.mnp.value;
        j["gap"] = r.mnp.gap;
        j["dual_min"] = r.dual_min;
      } else if (d_kind == "xi") {
        const MinNormResult r = xi_distance(s, events.at(0), x, d_alpha);
        j["value"] = r.value;
        j["gap"] = r.gap;
      } else {
        std::cerr << "error: unknown distance kind " << d_kind << "\n";
        return 2;
      }
    }
    std::cout << j.dump() << "\n";
    return 0;
  }

  if (verify_cmd->parsed()) {
    const ExactCheckReport rep = run_sweep(v_eq, sweep);
    emit(v_format == "csv" ? rep.to_csv() : rep.to_json(), v_out, v_format,
         "verify_" + v_eq, v_tag);
    return rep.pass() ? 0 : 1;
  }

  if (mc_cmd->parsed()) {
    std::function<double(RngStream&)> stat;
    if (m_stat == "uniform01") stat = [](RngStream& r) { return r.next_double(); };
    else if (m_stat == "normal01") stat = [](RngStream& r) { return r.next_normal(); };
    else if (m_stat.rfind("constant:", 0) == 0) {
      const double c = std::stod(m_stat.substr(9));
      stat = [c](RngStream&) { return c; };
    } else {
      std::cerr << "error: unknown statistic " << m_stat << "\n";
      return 2;
    }
    const TailEstimate est = mc_tail(m_stat, stat, m_grid, m_samples, m_seed, m_workers);
    emit(m_format == "csv" ? est.to_csv() : est.to_json(), m_out, m_format, "mc_" + m_stat,
         m_tag);
    return 0;
  }

  if (app_cmd->parsed()) {
    AppReport rep;
    if (a_name == "binpack") {
      if (a_ugrid.empty()) a_ugrid = {5, 10, 20, 40, 60, 80};
      rep = binpack_experiment(a_n, ItemDist::parse(a_dist), a_samples, a_seed, a_mode,
                               a_ugrid, a_workers);
    } else if (a_name == "lis" || a_name == "lcs") {
      if (a_ugrid.empty()) a_ugrid = {10, 20, 30, 40, 50};
      if (a_n2 == 0) a_n2 = a_n;
      rep = subsequence_experiment(a_name, a_n, a_n2, a_alphabet, a_samples, a_seed,
                                   a_ugrid, a_workers);
    } else if (a_name == "supsum" || a_name == "supsum-perm" || a_name == "supsum-qk") {
      FamilySpec family = [&] {
        if (!a_family.empty()) {
          const std::string text =
              a_family[0] == '@'
                  ? [&] {
                      std::ifstream in(a_family.substr(1));
                      std::ostringstream os;
                      os << in.rdbuf();
                      return os.str();
                    }()
                  : a_family;
          const auto fj = nlohmann::json::parse(text);
          std::vector<std::vector<double>> alphas;
          for (const auto& row : fj.at("alphas"))
            alphas.push_back(row.get<std::vector<double>>());
          return FamilySpec::make(std::move(alphas));
        }
        if (a_name == "supsum-perm") {
          std::vector<std::vector<double>> rows;
          for (int j = 0; j + 1 < a_n; j += 2) {
            std::vector<double> row(size_t(a_n), 0.0), neg(size_t(a_n), 0.0);
            row[size_t(j)] = row[size_t(j + 1)] = 1.0;
            neg[size_t(j)] = neg[size_t(j + 1)] = -1.0;
            rows.push_back(std::move(row));
            rows.push_back(std::move(neg));
          }
          return FamilySpec::make(std::move(rows));
        }
        return FamilySpec::make({std::vector<double>(
            size_t(a_n), 1.0 / std::sqrt(double(a_n)))});
      }();
      if (a_name == "supsum") {
        if (a_ugrid.empty()) a_ugrid = {1, 2, 3, 4, 5, 6};
        rep = supsum_experiment(family, {}, a_samples, a_seed, a_ugrid, a_workers);
      } else if (a_name == "supsum-perm") {
        if (a_ugrid.empty()) a_ugrid = {1, 2, 4, 8, 12};
        std::vector<double> avec(size_t(a_n), 0.0);
        for (int i = 0; i < a_n / 2; ++i) avec[size_t(i)] = 1.0;
        rep = supsum_perm_experiment(family, avec, a_variant, a_samples, a_seed, a_ugrid,
                                     a_workers);
      } else {
        if (a_tgrid.empty()) a_tgrid = {0.05, 0.1, 0.2, 0.4};
        rep = supsum_qk_experiment(family, a_samples, a_seed, a_q, a_klist, a_quantile,
                                   a_tgrid, a_workers);
      }
    } else if (a_name == "fpp") {
      if (a_ugrid.empty()) a_ugrid = {1, 2, 4, 8, 16};
      const double r = a_rscale > 0 ? a_rscale : 4.0 * double(a_n);
      rep = fpp_experiment(a_n, EdgeDist::parse(a_dist == "uniform01" ? a_dist : a_dist),
                           a_samples, a_seed, a_ugrid, r, a_workers);
    } else if (a_name == "spinglass") {
      if (a_tgrid.empty()) a_tgrid = {5, 10, 20, 25, 30, 40};
      SpinGlassConfig cfg;
      cfg.n = a_n;
      cfg.beta = a_beta;
      cfg.disorder = a_disorder;
      rep = spin_glass_experiment(cfg, a_samples, a_seed, a_tgrid, a_workers);
    } else {
      std::cerr << "error: unknown app " << a_name << "\n";
      return 2;
    }
    emit(a_format == "csv" ? rep.to_csv() : rep.to_json(), a_out, a_format,
         "app_" + a_name, a_tag);
    return rep.pass ? 0 : 1;
  }

  if (self_cmd->parsed()) {
    const auto results = run_acceptance(s_quick, std::cerr, s_fault);
    std::printf("%-4s %-60s %-6s %8s\n", "id", "criterion", "result", "seconds");
    for (const auto& r : results)
      std::printf("%-4d %-60s %-6s %8.2f\n", r.id, r.name.c_str(),
                  r.pass ? "PASS" : "FAIL", r.seconds);
    return all_pass(results) ? 0 : 1;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(expand_config(std::move(args)));
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
