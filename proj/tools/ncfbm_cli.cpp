#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ncfbm/acceptance.hpp"
#include "ncfbm/combinat.hpp"
#include "ncfbm/errors.hpp"
#include "ncfbm/kernel.hpp"
#include "ncfbm/levy_exact.hpp"
#include "ncfbm/matrix_model.hpp"
#include "ncfbm/moments.hpp"
#include "ncfbm/ncalg.hpp"
#include "ncfbm/parallel.hpp"
#include "ncfbm/rough.hpp"

#ifndef NCFBM_VERSION
#define NCFBM_VERSION "0.0.0"
#endif

namespace {

using namespace ncfbm;

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct Common {
  std::string out;
  std::string plot_script;
  std::uint64_t seed = 20240601;
  int threads = 0;
};

// CSV sink with a '#' metadata block; the body is deterministic for a fixed config.
// Output is buffered so that a failing experiment writes nothing.
class Csv {
 public:
  Csv(const Common& c, const std::string& experiment, const std::string& config_text) : common_(c) {
    std::ostream& os = stream();
    os << std::setprecision(17);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    os << "# ncfbm " << NCFBM_VERSION << "\n";
    os << "# experiment " << experiment << "\n";
    os << "# config_hash " << std::hex << std::setw(16) << std::setfill('0')
       << std::hash<std::string>{}(experiment + "\n" + config_text) << std::dec << std::setfill(' ')
       << "\n";
    os << "# seed " << c.seed << "\n";
    os << "# threads " << thread_count() << "\n";
    std::istringstream cfg(config_text);
    for (std::string line; std::getline(cfg, line);) {
      if (!line.empty()) os << "# config " << line << "\n";
    }
    os << "# timestamp " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << "\n";
  }

  std::ostream& stream() { return buffer_; }

  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) stream() << (i ? "," : "") << cols[i];
    stream() << "\n";
  }

  template <class... T>
  void row(const T&... v) {
    std::ostringstream os;
    os << std::setprecision(17);
    bool first = true;
    ((os << (first ? "" : ",") << v, first = false), ...);
    stream() << os.str() << "\n";
  }

  void note(const std::string& key, double value) {
    stream() << "# " << key << " " << std::setprecision(17) << value << "\n";
  }

  void finish() {
    if (common_.out.empty()) {
      std::cout << buffer_.str() << std::flush;
    } else {
      std::ofstream file(common_.out);
      if (!file) throw ParameterError("cannot open output file " + common_.out);
      file << buffer_.str();
    }
    if (!common_.plot_script.empty()) write_plot_script();
  }

 private:
  void write_plot_script() {
    std::ofstream py(common_.plot_script);
    if (!py) throw ParameterError("cannot open plot script path " + common_.plot_script);
    const std::string csv = common_.out.empty() ? "data.csv" : common_.out;
    py << "import sys\n"
          "import pandas as pd\n"
          "import matplotlib\n"
          "matplotlib.use('Agg')\n"
          "import matplotlib.pyplot as plt\n\n"
          "path = sys.argv[1] if len(sys.argv) > 1 else '"
       << csv
       << "'\n"
          "df = pd.read_csv(path, comment='#')\n"
          "x = df.columns[0]\n"
          "fig, ax = plt.subplots()\n"
          "for col in df.columns[1:]:\n"
          "    if pd.api.types.is_numeric_dtype(df[col]):\n"
          "        ax.plot(df[x], df[col], marker='o', label=col)\n"
          "ax.set_xlabel(x)\n"
          "ax.legend()\n"
          "fig.savefig(path.rsplit('.', 1)[0] + '.png', dpi=120)\n";
  }

  const Common& common_;
  std::ostringstream buffer_;
};

std::string config_text(const CLI::App& sub) { return sub.config_to_str(true, false); }

TensorPoly parse_mode_integrand(const std::string& P, const std::string& Q) {
  return outer(parse_poly(P), parse_poly(Q));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for the non-commutative fractional Brownian motion"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file");

  Common common;
  app.add_option("--out,-o", common.out, "CSV output path (default stdout)");
  app.add_option("--seed", common.seed, "base seed");
  app.add_option("--threads", common.threads, "worker threads (default NCFBM_THREADS or hardware)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--emit-plot-script", common.plot_script, "write a matplotlib script for the CSV");

  std::function<void()> action;

  // pairings
  auto* pairings = app.add_subcommand("pairings", "enumerate or count pairings of 2m points");
  int m = 3;
  bool noncrossing = false, count_only = false;
  pairings->add_option("--m", m, "number of blocks")->required();
  pairings->add_flag("--noncrossing", noncrossing, "non-crossing pairings only");
  pairings->add_flag("--count-only", count_only, "print the count only");
  pairings->callback([&] {
    action = [&] {
      if (m < 0) throw ParameterError("m must be nonnegative");
      if (count_only) {
        std::cout << (noncrossing ? catalan(m) : double_factorial_odd(m)) << "\n";
        return;
      }
      Csv csv(common, "pairings", config_text(*pairings));
      csv.header({"index", "blocks", "crossings"});
      long index = 0;
      const auto emit = [&](const Pairing& p) { csv.row(index++, p.to_string(), crossing_number(p).value); };
      for (const auto& p : noncrossing ? enumerate_noncrossing(m) : enumerate_pairings(m)) emit(p);
      csv.finish();
    };
  });

  // kernel
  auto* kernel = app.add_subcommand("kernel", "fractional covariance on a uniform grid");
  double kH = 0.5;
  int kgrid = 8;
  kernel->add_option("--H", kH, "Hurst index")->required();
  kernel->add_option("--grid", kgrid, "grid points per unit time")->check(CLI::PositiveNumber);
  kernel->callback([&] {
    action = [&] {
      const auto K = CovKernel::fbm(kH);
      Csv csv(common, "kernel", config_text(*kernel));
      csv.header({"s", "t", "covariance"});
      for (int i = 0; i <= kgrid; ++i)
        for (int j = 0; j <= kgrid; ++j) csv.row(double(i) / kgrid, double(j) / kgrid, K(double(i) / kgrid, double(j) / kgrid));
      csv.finish();
    };
  });

  // moments
  auto* moments = app.add_subcommand("moments", "trace of a word of process letters");
  double mH = 0.5, mq = 0.0;
  std::string word;
  moments->add_option("--H", mH, "Hurst index")->required();
  moments->add_option("--word", word, "letters separated by ';', e.g. \"X(0.5);dX(0.25,1)\"")->required();
  moments->add_option("--q", mq, "q parameter (0 gives the semicircular case)");
  moments->callback([&] {
    action = [&] {
      const auto K = CovKernel::fbm(mH);
      const Word w = parse_word(word);
      const MomentValue v = mq == 0.0 ? wick_moment_counted(K, w) : q_wick_moment_counted(K, w, mq);
      Csv csv(common, "moments", config_text(*moments));
      csv.header({"length", "q", "trace_value", "pairings_summed"});
      csv.row(w.size(), mq, v.value, v.pairings);
      csv.finish();
    };
  });

  // nonconv
  auto* nonconv = app.add_subcommand("nonconv", "exact Levy-area gap M_n across levels");
  double nH = 0.2;
  int n_max = 10;
  bool oracle = false;
  nonconv->add_option("--H", nH, "Hurst index")->required();
  nonconv->add_option("--n-max", n_max, "largest level")->check(CLI::Range(0, kClosedFormMaxLevel));
  nonconv->add_flag("--oracle", oracle, "also evaluate the independent covariance-sum route");
  nonconv->callback([&] {
    action = [&] {
      Csv csv(common, "nonconv", config_text(*nonconv));
      csv.header({"n", "M_closed", "M_oracle", "log2_ratio"});
      double prev = NAN;
      for (int n = 0; n <= n_max; ++n) {
        const double closed = m_n_closed(nH, n).value;
        const double orc = oracle && n <= kWickOracleMaxLevel ? m_n_wick_oracle(nH, n).value : NAN;
        const double ratio = n == 0 ? NAN : std::log2(closed / prev);
        csv.row(n, closed, orc, ratio);
        prev = closed;
      }
      csv.note("expected_log2_ratio", 1.0 - 4.0 * nH);
      csv.note("lower_bound_constant", nH <= 0.25 ? levy_gap_lower_constant(nH) : NAN);
      csv.finish();
    };
  });

  // diagnostics
  auto* diag = app.add_subcommand("diagnostics", "covariance-sum ratios over the full window");
  double dH = 0.4, eps = 0.1;
  int dn = 8;
  diag->add_option("--H", dH, "Hurst index")->required();
  diag->add_option("--n", dn, "largest level")->check(CLI::Range(1, 14));
  diag->add_option("--eps", eps, "exponent slack in [0,H)");
  diag->callback([&] {
    action = [&] {
      Csv csv(common, "diagnostics", config_text(*diag));
      csv.header({"n", "sum_even_even", "sum_even_odd", "sum_odd_odd", "pair_bound", "pair_ratio",
                  "increment_sum_even", "increment_ratio"});
      for (int n = 1; n <= dn; ++n) {
        const long l = 1L << n;
        const auto d = cova_sum_diag(dH, n, l / 2, l, eps, std::make_pair(0.0, 0.5));
        csv.row(n, d.sum_even_even, d.sum_even_odd, d.sum_odd_odd, d.pair_bound, d.pair_ratio,
                d.increment->sum_even, d.increment->ratio);
      }
      csv.finish();
    };
  });

  // matrix-sim
  auto* msim = app.add_subcommand("matrix-sim", "sample the matrix model and measure traces and norms");
  MatrixEnsembleConfig mcfg;
  int bins = 0;
  msim->add_option("--H", mcfg.H, "Hurst index")->required();
  msim->add_option("--d", mcfg.d, "matrix dimension");
  msim->add_option("--level", mcfg.level, "dyadic grid level");
  msim->add_option("--replicas", mcfg.replicas, "independent replicas");
  msim->add_option("--hist-bins", bins, "spectral histogram of X_1 for replica 0 instead");
  msim->callback([&] {
    action = [&] {
      mcfg.seed = common.seed;
      mcfg.validate();
      Csv csv(common, "matrix-sim", config_text(*msim));
      const FbmSampler sampler(mcfg.H, mcfg.grid());
      if (bins > 0) {
        const auto path = sample_matrix_path(mcfg, sampler, 0);
        const auto h = spectral_histogram(path.mats.back(), bins);
        csv.header({"bin_left", "bin_right", "density", "semicircle_density"});
        const SemicircleLaw law(1.0);
        for (std::size_t b = 0; b < h.density.size(); ++b)
          csv.row(h.left[b], h.right[b], h.density[b], semicircle_density(law, 0.5 * (h.left[b] + h.right[b])));
        csv.finish();
        return;
      }
      csv.header({"replica", "t", "trace_X2", "expected_trace_X2", "operator_norm", "limit_norm"});
      for (int r = 0; r < mcfg.replicas; ++r) {
        const auto path = sample_matrix_path(mcfg, sampler, r);
        for (long i = 1; i <= path.cells(); ++i) {
          const double t = path.times[static_cast<std::size_t>(i)];
          const Eigen::MatrixXd& X = path.at(i);
          csv.row(r, t, trace_state(X * X), std::pow(t, 2 * mcfg.H) * (1.0 + 1.0 / mcfg.d), operator_norm(X),
                  2.0 * std::pow(t, mcfg.H));
        }
      }
      csv.finish();
    };
  });

  // integrate
  auto* integ = app.add_subcommand("integrate", "integral of P(X) dX Q(X) across partition levels");
  MatrixEnsembleConfig icfg;
  std::string P = "0,1", Q = "1", mode = "rough";
  double s = 0.0, t = 1.0;
  integ->add_option("--H", icfg.H, "Hurst index")->required();
  integ->add_option("--d", icfg.d, "matrix dimension");
  integ->add_option("--level", icfg.level, "path grid level");
  integ->add_option("--P", P, "left polynomial coefficients, constant first");
  integ->add_option("--Q", Q, "right polynomial coefficients, constant first");
  integ->add_option("--mode", mode, "young, rough, strato or lebesgue")
      ->check(CLI::IsMember({"young", "rough", "strato", "lebesgue"}));
  integ->add_option("--s", s, "window start (grid time)");
  integ->add_option("--t", t, "window end (grid time)");
  integ->callback([&] {
    action = [&] {
      icfg.seed = common.seed;
      icfg.validate();
      const auto path = sample_matrix_path(icfg);
      const LevyAreaEval area(path, icfg.level);
      const Poly p = parse_poly(P), q = parse_poly(Q);
      Csv csv(common, "integrate", config_text(*integ));
      csv.header({"level", "norm_integral", "norm_difference_to_previous_level", "trace_integral"});
      Eigen::MatrixXd prev;
      for (int n = 0; n <= icfg.level; ++n) {
        Eigen::MatrixXd v;
        try {
          if (mode == "young") v = young_integral(path, p, q, s, t, n);
          else if (mode == "rough") v = rough_integral(area, p, q, s, t, n);
          else if (mode == "strato") v = strato_free_integral(path, p, q, s, t, n);
          else v = lebesgue_integral(path, n, parse_mode_integrand(P, Q), s, t);
        } catch (const GridError&) {
          continue;  // window not aligned at this level
        }
        const double diff = prev.size() ? operator_norm(v - prev) : NAN;
        csv.row(n, operator_norm(v), diff, trace_state(v));
        prev = v;
      }
      csv.finish();
    };
  });

  // rates
  auto* rates = app.add_subcommand("rates", "Ito-formula defect of R(X) across levels");
  MatrixEnsembleConfig rcfg;
  std::string R = "0,0,0,1", rmode = "rough";
  int n_min = 4;
  rates->add_option("--H", rcfg.H, "Hurst index")->required();
  rates->add_option("--d", rcfg.d, "matrix dimension");
  rates->add_option("--level", rcfg.level, "path grid level (largest partition level)");
  rates->add_option("--R", R, "polynomial coefficients, constant first");
  rates->add_option("--mode", rmode, "young or rough")->check(CLI::IsMember({"young", "rough"}));
  rates->add_option("--n-min", n_min, "smallest partition level");
  rates->callback([&] {
    action = [&] {
      rcfg.seed = common.seed;
      rcfg.validate();
      if (n_min < 0 || rcfg.level - n_min < 3) throw ParameterError("rates needs at least 4 levels");
      const auto path = sample_matrix_path(rcfg);
      const LevyAreaEval area(path, rcfg.level);
      const Poly r = parse_poly(R);
      const auto m = rmode == "young" ? IntegralMode::Young : IntegralMode::Rough;
      Csv csv(common, "rates", config_text(*rates));
      csv.header({"level", "ito_defect_operator_norm", "log2_defect"});
      RateSeries series;
      for (int n = n_min; n <= rcfg.level; ++n) {
        const double e = ito_defect(area, r, 0.0, 1.0, n, m);
        series.add(n, e);
        csv.row(n, e, std::log2(e));
      }
      csv.note("fitted_slope_log2_per_level", rate_estimate(series));
      csv.finish();
    };
  });

  // report
  auto* report = app.add_subcommand("report", "run the acceptance experiments");
  std::vector<int> ids;
  report->add_option("--criteria", ids, "criterion ids (default all)")->check(CLI::Range(1, kCriterionCount))->delimiter(',');
  int failures = 0;
  report->callback([&] {
    action = [&] {
      if (ids.empty())
        for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
      for (int id : ids) {
        const auto r = run_criterion(id, common.seed);
        std::cout << format_result(r) << std::endl;
        if (!r.pass) ++failures;
      }
      std::cout << (ids.size() - static_cast<std::size_t>(failures)) << "/" << ids.size() << " criteria passed\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (app.get_subcommands().empty()) {
      std::cerr << "valid experiments:";
      for (const auto* sub : app.get_subcommands({})) std::cerr << " " << sub->get_name();
      std::cerr << "\n";
    }
    return kExitValidation;
  }

  try {
    if (common.threads > 0) set_threads(common.threads);
    action();
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SizeLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const GridError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return failures == 0 ? 0 : 1;
}
