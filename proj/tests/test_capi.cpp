#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mellinridge/mellinridge.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

fs::path
scratch(const std::string& name)
{
  const auto dir = fs::temp_directory_path() / "mellinridge_capi";
  fs::create_directories(dir);
  return dir / name;
}

} // namespace

TEST_SUITE("capi")
{
  TEST_CASE("status strings and version")
  {
    CHECK(std::string(mr_status_string(MR_OK)) == "ok");
    CHECK(std::string(mr_status_string(MR_PARSE)) == "parse error");
    CHECK(std::string(mr_version()) == "0.1.0");
  }

  TEST_CASE("catalog lookups")
  {
    mr_density d{};
    REQUIRE(mr_density_from_name("gamma5", &d) == MR_OK);
    CHECK(d == MR_GAMMA5);
    CHECK(std::string(mr_density_name(MR_NOISE_BETA)) == "noise_beta");
    CHECK(mr_density_from_name("cauchy", &d) == MR_UNKNOWN_ID);
    CHECK(std::string(mr_last_error()).find("cauchy") != std::string::npos);
    CHECK(mr_density_from_name(nullptr, &d) == MR_INVALID_ARGUMENT);
    CHECK(mr_density_is_error(MR_NOISE_UNIFORM) == 1);
    CHECK(mr_density_is_error(MR_LOGNORMAL) == 0);

    mr_method m{};
    CHECK(mr_method_from_name("cutoff", &m) == MR_OK);
    CHECK(m == MR_CUTOFF);
    CHECK(mr_method_from_name("lasso", &m) == MR_UNKNOWN_ID);

    double v = 0.0;
    REQUIRE(mr_density_eval(MR_NOISE_BETA, 0.25, &v) == MR_OK);
    CHECK(v == 0.5);
    CHECK(mr_density_eval(MR_NOISE_BETA, -1.0, &v) == MR_INVALID_ARGUMENT);
    CHECK(mr_density_eval(static_cast<mr_density>(42), 1.0, &v) == MR_UNKNOWN_ID);

    double re = 0.0, im = 0.0;
    REQUIRE(mr_catalog_mellin(MR_NOISE_BETA, 1.0, 2.0, &re, &im) == MR_OK);
    CHECK(re == doctest::Approx(0.5));
    CHECK(im == doctest::Approx(-0.5));
    CHECK(mr_catalog_mellin(MR_LOGGAMMA, 7.0, 0.0, &re, &im) == MR_DOMAIN);
  }

  TEST_CASE("samples: arrays, files and simulation")
  {
    const double ys[] = { 0.5, 1.25, 3.0 };
    mr_sample* s = nullptr;
    REQUIRE(mr_sample_from_array(ys, 3, &s) == MR_OK);
    CHECK(mr_sample_size(s) == 3);
    CHECK(mr_sample_data(s)[1] == 1.25);
    const auto path = scratch("three.csv").string();
    REQUIRE(mr_sample_write_csv(s, path.c_str()) == MR_OK);
    mr_sample_destroy(s);

    mr_sample* back = nullptr;
    REQUIRE(mr_sample_read_csv(path.c_str(), &back) == MR_OK);
    CHECK(mr_sample_size(back) == 3);
    CHECK(mr_sample_data(back)[2] == 3.0);
    mr_sample_destroy(back);

    const double bad[] = { 1.0, -2.0 };
    CHECK(mr_sample_from_array(bad, 2, &s) == MR_INVALID_ARGUMENT);
    CHECK(s == nullptr);
    CHECK(mr_sample_from_array(ys, 0, &s) == MR_INVALID_ARGUMENT);

    const auto broken = scratch("broken.csv");
    std::ofstream(broken) << "y\n1\n-1\n";
    CHECK(mr_sample_read_csv(broken.string().c_str(), &s) == MR_PARSE);
    CHECK(std::string(mr_last_error()).find("line 3") != std::string::npos);
    CHECK(mr_sample_read_csv(scratch("missing.csv").string().c_str(), &s) == MR_IO);

    mr_sample* a = nullptr;
    mr_sample* b = nullptr;
    REQUIRE(mr_sample_simulate(MR_GAMMA5, MR_NOISE_UNIFORM, 2000, 7, &a) == MR_OK);
    REQUIRE(mr_sample_simulate(MR_GAMMA5, MR_NOISE_UNIFORM, 2000, 7, &b) == MR_OK);
    CHECK(mr_sample_size(a) == 2000);
    CHECK(std::memcmp(mr_sample_data(a), mr_sample_data(b), 2000 * sizeof(double)) == 0);
    for (std::size_t i = 0; i < 2000; ++i)
      CHECK(mr_sample_data(a)[i] > 0.0);
    mr_sample_destroy(a);
    mr_sample_destroy(b);
    CHECK(mr_sample_simulate(MR_NOISE_BETA, MR_NOISE_UNIFORM, 10, 1, &a) == MR_INVALID_ARGUMENT);
    CHECK(mr_sample_simulate(MR_GAMMA5, MR_LOGNORMAL, 10, 1, &a) == MR_INVALID_ARGUMENT);
    mr_sample_destroy(nullptr);
  }

  TEST_CASE("estimation through the C interface")
  {
    mr_sample* s = nullptr;
    REQUIRE(mr_sample_simulate(MR_BETA25, MR_NOISE_UNIFORM, 2000, 3, &s) == MR_OK);
    mr_estimate_options opts{};
    REQUIRE(mr_estimate_options_default(MR_NOISE_UNIFORM, &opts) == MR_OK);
    CHECK(opts.selection.chi1 == 72.0);
    CHECK(opts.x_points == 512);

    for (mr_method m : { MR_RIDGE, MR_CUTOFF }) {
      opts.method = m;
      mr_estimate* e = nullptr;
      REQUIRE(mr_estimate_run(s, &opts, &e) == MR_OK);
      CHECK(mr_estimate_k(e) >= 1.0);
      CHECK(mr_estimate_sigma_hat(e) == 1.0);
      CHECK(mr_estimate_admissible_count(e) >= 1);
      REQUIRE(mr_estimate_size(e) == 512);
      CHECK(mr_estimate_x(e)[0] == doctest::Approx(0.01));
      CHECK(mr_estimate_x(e)[511] == doctest::Approx(30.0));
      const auto out = scratch("est.csv").string();
      CHECK(mr_estimate_write_csv(e, out.c_str()) == MR_OK);
      const auto diag = scratch("diag.csv").string();
      CHECK(mr_estimate_write_diagnostics_csv(e, diag.c_str()) == MR_OK);
      std::ifstream in(diag);
      std::string header;
      std::getline(in, header);
      CHECK(header == "k,A_hat,V_hat,objective,admissible");
      mr_estimate_destroy(e);
    }

    opts.method = MR_RIDGE;
    opts.fixed_k = 3.0;
    mr_estimate* fixed = nullptr;
    REQUIRE(mr_estimate_run(s, &opts, &fixed) == MR_OK);
    CHECK(mr_estimate_k(fixed) == 3.0);
    CHECK(mr_estimate_write_diagnostics_csv(fixed, scratch("d.csv").string().c_str()) ==
          MR_INVALID_ARGUMENT);
    mr_estimate_destroy(fixed);

    opts.fixed_k = 0.0;
    const int grid[] = { 1, 2, 4, 3 };
    opts.selection.k_grid = grid;
    opts.selection.k_grid_len = 4;
    mr_estimate* e = nullptr;
    CHECK(mr_estimate_run(s, &opts, &e) == MR_INVALID_ARGUMENT);
    CHECK(e == nullptr);
    mr_sample_destroy(s);
  }

  TEST_CASE("empty admissible set and zero in the cut-off window")
  {
    const double ys[] = { 0.5, 0.7, 0.9 };
    mr_sample* s = nullptr;
    REQUIRE(mr_sample_from_array(ys, 1, &s) == MR_OK);
    mr_estimate_options opts{};
    REQUIRE(mr_estimate_options_default(MR_NOISE_BETA, &opts) == MR_OK);
    mr_estimate* e = nullptr;
    CHECK(mr_estimate_run(s, &opts, &e) == MR_EMPTY_ADMISSIBLE);

    REQUIRE(mr_estimate_options_default(MR_NOISE_UNIFORM, &opts) == MR_OK);
    opts.c = 0.0;
    opts.method = MR_CUTOFF;
    opts.fixed_k = 10.0;
    CHECK(mr_estimate_run(s, &opts, &e) == MR_G0_VIOLATION);
    mr_sample_destroy(s);
  }

  TEST_CASE("Monte-Carlo runs and CSV rows")
  {
    mr_experiment cfg{};
    REQUIRE(mr_experiment_default(MR_GAMMA5, MR_NOISE_BETA, 300, MR_CUTOFF, &cfg) == MR_OK);
    CHECK(cfg.selection.chi == 3.0);
    cfg.replications = 4;
    mr_mise* m = nullptr;
    REQUIRE(mr_mise_run(&cfg, &m) == MR_OK);
    CHECK(mr_mise_replications(m) == 4);
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      sum += mr_mise_errors(m)[i];
    CHECK(mr_mise_value(m) == doctest::Approx(sum / 4.0));
    CHECK(mr_mise_scaled(m) == doctest::Approx(100.0 * mr_mise_value(m)));
    CHECK(mr_mise_se(m) > 0.0);
    CHECK(mr_mise_levels(m)[0] >= 1.0);

    CHECK(std::string(mr_mise_csv_header()) == "scenario,method,n,c,reps,mise_x100,se_x100");
    char tiny[4];
    std::size_t needed = 0;
    CHECK(mr_mise_csv_row(&cfg, m, tiny, sizeof tiny, &needed) == MR_INVALID_ARGUMENT);
    std::vector<char> buf(needed);
    REQUIRE(mr_mise_csv_row(&cfg, m, buf.data(), buf.size(), &needed) == MR_OK);
    const std::string row(buf.data());
    CHECK(row.rfind("gamma5/noise_beta,cutoff,300,1,4,", 0) == 0);
    CHECK(row.back() == '\n');
    mr_mise_destroy(m);

    const std::size_t ns[] = { 500, 2000 };
    double k[2], mise[2], se[2];
    cfg.method = MR_RIDGE;
    cfg.replications = 3;
    REQUIRE(mr_oracle_rate(&cfg, ns, 2, 2.0, 1.0, k, mise, se) == MR_OK);
    CHECK(k[0] == std::round(std::pow(500.0, 1.0 / 7.0)));
    CHECK(k[1] == std::round(std::pow(2000.0, 1.0 / 7.0)));
    CHECK(mr_oracle_rate(&cfg, ns, 0, 2.0, 1.0, k, mise, se) == MR_INVALID_ARGUMENT);
  }

  TEST_CASE("profiles")
  {
    mr_profile_options opts{};
    REQUIRE(mr_profile_options_default(MR_GAMMA5, MR_NOISE_BETA, 2000, &opts) == MR_OK);
    const int grid[] = { 1, 2, 3 };
    opts.k_grid = grid;
    opts.k_grid_len = 3;
    opts.replications = 4;
    mr_profile_row rows[3];
    REQUIRE(mr_profile_run(&opts, rows) == MR_OK);
    CHECK(rows[0].k == 1);
    CHECK(rows[2].bound_var > rows[0].bound_var);
    const auto path = scratch("profile.csv").string();
    CHECK(mr_profile_write_csv(rows, 3, path.c_str()) == MR_OK);
    CHECK(mr_profile_write_csv(rows, 3, "/nonexistent/dir/p.csv") == MR_IO);
  }
}
