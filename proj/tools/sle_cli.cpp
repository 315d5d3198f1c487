// Batch driver: runs the verification stages and writes JSON reports plus
// CSV and jet artifacts. Exit 0 when nothing fails, 1 on any FAIL, 2 on
// usage or infrastructure errors.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "sle/claims.hpp"
#include "sle/spectral.hpp"

namespace fs = std::filesystem;
using namespace sle;

namespace {

using LD = long double;

std::string file_safe(std::string name) {
  std::replace(name.begin(), name.end(), '/', '_');
  return name;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

std::string value_text(const ClaimValue& v) {
  return std::visit(
      [](const auto& x) {
        std::ostringstream os;
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, double>) {
          os << std::setprecision(6) << x;
        } else {
          os << x;
        }
        return os.str();
      },
      v);
}

std::string values_text(const ClaimValues& vs) {
  std::string s;
  for (const auto& [k, v] : vs) s += (s.empty() ? "" : ", ") + k + "=" + value_text(v);
  return s;
}

void print_reports(const std::vector<ClaimReport>& reports) {
  for (const auto& r : reports) {
    std::cout << std::left << std::setw(8) << to_string(r.status) << r.id << '\n';
    if (r.status != ClaimStatus::kPass) {
      std::cout << "        measured: " << values_text(r.measured) << '\n'
                << "        claimed:  " << values_text(r.claimed) << '\n';
      if (!r.notes.empty()) std::cout << "        " << r.notes << '\n';
      if (!r.open_question.empty()) std::cout << "        see README #" << r.open_question << '\n';
    }
  }
}

int emit(const RunConfig& config, const std::string& name, const std::vector<ClaimReport>& reports,
         const Artifacts& artifacts) {
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  write_file(dir / (file_safe(name) + ".json"), reports_to_json(reports));
  for (const auto& [file, text] : artifacts) write_file(dir / file_safe(file), text);
  write_file(dir / "config.txt", config_text(config));
  print_reports(reports);
  return any_fail(reports) ? 1 : 0;
}

struct Transform {
  Jet u;
  LegendreTransform<LD> lt;
  double fold;

  Transform(const Coeff& c, const RunConfig& config)
      : u(solved_jet(c, config.jet_degree)),
        lt(u, {.radius = LD(config.working_radius)}),
        fold(static_cast<double>(fold_radius(lt.gradient_map(), LD(config.working_radius), fibonacci_sphere(400)))) {}
};

int cmd_report(const std::string& dir) {
  std::vector<fs::path> files;
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::string, std::vector<ClaimReport>>> runs;
  for (const auto& f : files) {
    std::ifstream is(f);
    const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    try {
      runs.emplace_back(f.stem().string(), reports_from_json(text));
    } catch (const Error&) {
      // Not a report file (for example solver statistics).
    }
  }
  if (runs.empty()) throw Error(ErrorCode::kMissingArtifacts, "no report files in " + dir);
  bool failed = false;
  std::vector<const ClaimReport*> flagged;
  for (const auto& [run, reports] : runs) {
    std::cout << "== " << run << '\n';
    for (const auto& r : reports) {
      std::cout << "  " << std::left << std::setw(44) << r.id << to_string(r.status) << '\n';
      failed = failed || r.status == ClaimStatus::kFail;
      if (r.status == ClaimStatus::kFlagged) flagged.push_back(&r);
    }
  }
  if (!flagged.empty()) std::cout << "\nFlagged items\n";
  for (const auto* r : flagged) {
    std::cout << "  " << r->id << " (README #" << r->open_question << ")\n"
              << "    printed:  " << values_text(r->claimed) << '\n'
              << "    computed: " << values_text(r->measured) << '\n';
  }
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular special Lagrangian solutions: verification runs"};
  app.require_subcommand(0, 1);
  std::string config_file;
  std::vector<std::string> settings;
  bool print_config = false;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_file, "key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", settings, "override one setting, key=value (repeatable)");
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");

  std::string c_text = "0";
  std::optional<int> degree;
  double theta = 0.0;
  std::string report_dir;
  auto* verify = app.add_subcommand("verify-seeds", "seed residuals and origin eigenvalues over the c battery");
  auto* series = app.add_subcommand("solve-series", "extend the seed to a degree-N jet");
  series->add_option("--c", c_text, "rational parameter c");
  series->add_option("--N", degree, "jet degree (default jet_degree)");
  auto* transform = app.add_subcommand("transform", "Legendre involution, injectivity and branch checks");
  transform->add_option("--c", c_text, "rational parameter c");
  auto* regularity = app.add_subcommand("regularity", "Hoelder and blow-up profiles at the image of the origin");
  regularity->add_option("--c", c_text, "rational parameter c");
  auto* dirichlet = app.add_subcommand("dirichlet", "grid residual, Dirichlet solves and subaffine check");
  dirichlet->add_option("--c", c_text, "rational parameter c");
  auto* spectral = app.add_subcommand("spectral", "eigenvalue-space checks");
  auto* pipeline = app.add_subcommand("pipeline", "every stage for one theta");
  pipeline->add_option("--theta", theta, "angle in (-pi/2, pi/2)")->required();
  auto* report = app.add_subcommand("report", "summarize the reports in a directory");
  report->add_option("--dir", report_dir, "directory holding JSON reports")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    RunConfig config;
    if (!config_file.empty()) {
      std::ifstream is(config_file);
      const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
      config = parse_config(text, config);
    }
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::kParse, "--set expects key=value, got " + s);
      apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
    }
    if (out_dir) config.out_dir = *out_dir;
    if (seed) config.seed = *seed;
    validate(config);

    if (print_config) {
      std::cout << config_text(config);
      return 0;
    }
    if (*report) return cmd_report(report_dir);

    Artifacts artifacts;
    std::vector<ClaimReport> reports;
    if (*verify) {
      for (const auto& c : config.c_battery) reports.push_back(seed_residual_claim(c, &artifacts));
      reports.push_back(printed_cubic_claim());
      for (const auto& c : config.c_battery) reports.push_back(origin_eigenvalue_claim(c));
      return emit(config, "verify-seeds", reports, artifacts);
    }
    if (*spectral) return emit(config, "spectral", spectral_claims(config), artifacts);
    if (*pipeline) {
      reports = pipeline_claims(theta, config, &artifacts);
      std::ostringstream name;
      name << "pipeline_theta=" << theta;
      return emit(config, name.str(), reports, artifacts);
    }

    const Coeff c = parse_coeff(c_text);
    const std::string suffix = "_c=" + c.get_str();
    if (*series) {
      reports.push_back(series_claim(c, degree.value_or(config.jet_degree), &artifacts));
      return emit(config, "series" + suffix, reports, artifacts);
    }
    const Transform t(c, config);
    const std::string c_id = "-c=" + c.get_str();
    if (*transform) {
      const double radius = std::min(t.fold, config.working_radius);
      run_stage(reports, "legendre-involution-error" + c_id,
                [&] { reports.push_back(involution_claim(c, t.lt, radius, config, &artifacts)); });
      run_stage(reports, "gradient-injectivity-error" + c_id,
                [&] { reports.push_back(injectivity_claim(c, t.lt, radius, config)); });
      run_stage(reports, "branch-error" + c_id, [&] {
        for (auto& r : branch_claims(c, t.lt, branch_settings(config, t.fold), config)) reports.push_back(r);
      });
      return emit(config, "transform" + suffix, reports, artifacts);
    }
    if (*regularity) {
      run_stage(reports, "regularity-error" + c_id, [&] {
        for (auto& r : regularity_claims(c, t.u, t.lt, config, &artifacts)) reports.push_back(r);
      });
      return emit(config, "regularity" + suffix, reports, artifacts);
    }
    if (*dirichlet) {
      std::vector<std::pair<BallGrid, GridField>> solved;
      run_stage(reports, "grid-residual-error" + c_id,
                [&] { reports.push_back(grid_residual_claim(c, t.lt, config, &artifacts)); });
      run_stage(reports, "dirichlet-error" + c_id,
                [&] { reports.push_back(dirichlet_claim(c, t.lt, config, &artifacts, &solved)); });
      run_stage(reports, "subaffine-error" + c_id,
                [&] { reports.push_back(subaffine_claim(c, t.lt, config, solved)); });
      return emit(config, "dirichlet" + suffix, reports, artifacts);
    }
    std::cerr << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
