// plperiod: period-function toolbox for p-Laplacian Hamiltonian wells.
//
// Subcommands compute period curves by two quadrature routes, dT/dE by two
// analytic routes plus finite differences, monotonicity-criterion reports,
// phase-plane simulations and small-energy fits. Curves go out as CSV,
// verdicts as JSON. Exit codes: 0 all requested checks pass, 1 a check
// failed, 2 usage or configuration error, 3 numerical non-convergence.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "plperiod/asymptotics.hpp"
#include "plperiod/criteria.hpp"
#include "plperiod/dynamics.hpp"
#include "plperiod/period.hpp"
#include "plperiod/quadrature.hpp"

using nlohmann::json;
using namespace plperiod;

namespace {

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

struct CommonOpts {
    double p = 3.0;
    double q = 6.0;
    std::string preset = "model";  // model | harmonic
    double omega = 1.0;
    std::string e_grid = "log:1e-4:relmax:20";
    double tol = 1e-10;
    double dtol = 1e-4;
    double cross_tol = 1e-8;
    int nodes = 48;
    std::string out;
    std::string format;
    int threads = 0;
    std::string config;
};

int default_threads() {
    if (const char* env = std::getenv("PLPERIOD_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned n = std::thread::hardware_concurrency();
    return n ? static_cast<int>(n) : 1;
}

// Runs fn(i) for i in [0, n) on a small worker pool; the first exception
// wins and is rethrown after all workers join, so output stays deterministic.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

PotentialSpec make_potential(const CommonOpts& o) {
    if (o.preset == "harmonic") return make_harmonic_potential(o.omega);
    if (o.preset == "model") return make_model_potential(o.p, o.q);
    throw CLI::ValidationError("--preset must be 'model' or 'harmonic'");
}

// "spacing:min:max:count" with spacing in {linear, log, geom}. "geom" packs
// points against E* as E*(1 - r^k), probing the blow-up region. max may be
// the literal "relmax", meaning 0.95 E*.
std::vector<double> build_e_grid(const std::string& text, double Estar) {
    std::istringstream ss(text);
    std::string spacing, smin, smax, scount;
    if (!std::getline(ss, spacing, ':') || !std::getline(ss, smin, ':') ||
        !std::getline(ss, smax, ':') || !std::getline(ss, scount, ':'))
        throw CLI::ValidationError("--e-grid expects spacing:min:max:count");
    const double lo = std::stod(smin);
    const double hi = smax == "relmax" ? 0.95 * Estar : std::stod(smax);
    const int n = std::stoi(scount);
    if (n < 2) throw CLI::ValidationError("--e-grid count must be >= 2");
    if (!(lo > 0.0) || !(hi > lo) || !(hi < Estar))
        throw CLI::ValidationError("--e-grid must lie strictly inside (0, E*)");
    std::vector<double> E(n);
    if (spacing == "linear") {
        for (int i = 0; i < n; ++i) E[i] = lo + (hi - lo) * i / (n - 1.0);
    } else if (spacing == "log") {
        for (int i = 0; i < n; ++i)
            E[i] = lo * std::pow(hi / lo, i / (n - 1.0));
    } else if (spacing == "geom" || spacing == "geometric-to-estar") {
        // log-spaced distances from E*: E_k = E* (1 - r^k)
        const double d_lo = 1.0 - hi / Estar;  // closest approach
        const double d_hi = 1.0 - lo / Estar;
        for (int i = 0; i < n; ++i)
            E[i] = Estar * (1.0 - d_hi * std::pow(d_lo / d_hi, i / (n - 1.0)));
    } else {
        throw CLI::ValidationError("--e-grid spacing must be linear, log or geom");
    }
    return E;
}

class OutputStream {
public:
    explicit OutputStream(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw CLI::ValidationError("cannot open output file " + path);
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void check_format(const std::string& given, const std::string& natural) {
    if (!given.empty() && given != natural)
        throw CLI::ValidationError("this subcommand emits " + natural + " only");
}

json report_to_json(const CriterionReport& rep) {
    json j{{"criterion", rep.criterion},
           {"verdict", to_string(rep.verdict)},
           {"worst_margin", rep.worst_margin},
           {"witness", rep.witness.primary}};
    if (std::isfinite(rep.witness.secondary)) j["witness_secondary"] = rep.witness.secondary;
    if (!rep.note.empty()) j["note"] = rep.note;
    return j;
}

void add_common(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--p", o.p, "exponent p of the p-Laplace operator (> 1)");
    sub->add_option("--q", o.q, "second exponent of the model potential (> p)");
    sub->add_option("--preset", o.preset, "potential preset: model | harmonic");
    sub->add_option("--omega", o.omega, "frequency of the harmonic preset");
    sub->add_option("--e-grid", o.e_grid,
                    "energy grid spacing:min:max:count, spacing in {linear, log, "
                    "geom}; max may be 'relmax' (= 0.95 E*)");
    sub->add_option("--tol", o.tol, "quadrature relative tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--dtol", o.dtol, "derivative cross-check relative tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--cross-tol", o.cross_tol,
                    "period cross-method agreement tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--nodes", o.nodes, "Gauss nodes per half-interval");
    sub->add_option("--out", o.out, "output path (default: stdout)");
    sub->add_option("--format", o.format, "output format: csv | json");
    sub->add_option("--threads", o.threads,
                    "worker threads (default: PLPERIOD_THREADS or hardware)");
    sub->add_option("--config", o.config, "JSON config file; flags take precedence");
}

// Flags win over config file entries; config entries win over defaults.
void merge_config(CLI::App* sub, CommonOpts& o) {
    if (o.config.empty()) return;
    std::ifstream in(o.config);
    if (!in) throw CLI::ValidationError("cannot read config file " + o.config);
    json cfg;
    in >> cfg;
    const auto take = [&](const char* flag, const char* key, auto& var) {
        if (sub->count(flag) == 0 && cfg.contains(key)) cfg.at(key).get_to(var);
    };
    take("--p", "p", o.p);
    take("--q", "q", o.q);
    take("--preset", "preset", o.preset);
    take("--omega", "omega", o.omega);
    take("--e-grid", "e_grid", o.e_grid);
    take("--tol", "tol", o.tol);
    take("--dtol", "dtol", o.dtol);
    take("--cross-tol", "cross_tol", o.cross_tol);
    take("--nodes", "nodes", o.nodes);
    take("--out", "out", o.out);
    take("--format", "format", o.format);
    take("--threads", "threads", o.threads);
}

int resolve_threads(const CommonOpts& o) {
    return o.threads > 0 ? o.threads : default_threads();
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int run_period_curve(const CommonOpts& o) {
    check_format(o.format, "csv");
    const PotentialSpec pot = make_potential(o);
    const std::vector<double> grid = build_e_grid(o.e_grid, pot.Estar);
    const bool theta_ok = pot.p >= 2.0;

    struct Row {
        double E, Tw, Tt, rel;
    };
    std::vector<Row> rows(grid.size());
    parallel_for(static_cast<int>(grid.size()), resolve_threads(o), [&](int i) {
        const double E = grid[i];
        const double Tw = period_direct(pot, E, o.tol).T;
        double Tt = std::numeric_limits<double>::quiet_NaN();
        double rel = std::numeric_limits<double>::quiet_NaN();
        if (theta_ok) {
            Tt = period_theta(pot, E, o.nodes).T;
            rel = std::fabs(Tw - Tt) / Tw;
        }
        rows[i] = {E, Tw, Tt, rel};
    });

    OutputStream out(o.out);
    auto& os = out.get();
    os.precision(16);
    os << "E,T_w,T_theta,rel_disagreement\n";
    for (const Row& r : rows)
        os << r.E << ',' << r.Tw << ',' << r.Tt << ',' << r.rel << '\n';

    int rc = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (theta_ok && !(rows[i].rel < o.cross_tol)) {
            std::cerr << "period-curve: cross-method disagreement "
                      << rows[i].rel << " at row " << i << " (E = " << rows[i].E
                      << ")\n";
            rc = 1;
        }
        if (i > 0 && !(rows[i].Tw > rows[i - 1].Tw)) {
            std::cerr << "period-curve: T not increasing at row " << i
                      << " (E = " << rows[i].E << ")\n";
            rc = 1;
        }
    }
    return rc;
}

int run_derivative_curve(const CommonOpts& o) {
    check_format(o.format, "csv");
    const PotentialSpec pot = make_potential(o);
    if (pot.p < 2.0)
        throw CLI::ValidationError("derivative-curve requires p >= 2");
    const std::vector<double> grid = build_e_grid(o.e_grid, pot.Estar);

    struct Row {
        double E, cw, th, fd;
    };
    std::vector<Row> rows(grid.size());
    parallel_for(static_cast<int>(grid.size()), resolve_threads(o), [&](int i) {
        const double E = grid[i];
        rows[i] = {E, *dperiod_chow_wang(pot, E, o.tol).dT_dE,
                   *dperiod_theta(pot, E, o.nodes).dT_dE,
                   *dperiod_finite_difference(pot, E, 0.0, std::min(o.tol, 1e-11))
                        .dT_dE};
    });

    OutputStream out(o.out);
    auto& os = out.get();
    os.precision(16);
    os << "E,dT_chow_wang,dT_theta,dT_finite_diff\n";
    for (const Row& r : rows)
        os << r.E << ',' << r.cw << ',' << r.th << ',' << r.fd << '\n';

    int rc = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double scale = std::fabs(rows[i].fd);
        if (!(std::fabs(rows[i].cw - rows[i].fd) <= o.dtol * scale) ||
            !(std::fabs(rows[i].th - rows[i].fd) <= o.dtol * scale)) {
            std::cerr << "derivative-curve: routes disagree beyond " << o.dtol
                      << " at row " << i << " (E = " << rows[i].E << ")\n";
            rc = 1;
        }
    }
    return rc;
}

int run_criteria(const CommonOpts& o) {
    check_format(o.format, "json");
    const PotentialSpec pot = make_potential(o);

    json out;
    out["potential"] = {{"preset", o.preset}, {"p", pot.p}};
    json list = json::array();

    list.push_back(report_to_json(chow_wang_report(pot)));
    list.push_back(report_to_json(chicone_report(pot)));
    if (pot.has_d2())
        list.push_back(
            report_to_json(k_monotonicity_report(pot, pot.Estar * (1.0 - 1e-6))));

    if (pot.exps && pot.exps->q) {
        const double m = pot.exps->m();
        const double a = pot.exps->a();
        out["potential"]["q"] = *pot.exps->q;
        out["potential"]["m"] = m;
        out["potential"]["a"] = a;
        list.push_back(report_to_json(h_convexity_report(m)));
        list.push_back(report_to_json(inv_hprime2_convexity_report(m)));
        list.push_back(report_to_json(f_nonneg_scan(a, m)));

        const Discriminant d = discriminant(a, m);
        CriterionReport disc;
        disc.criterion = "discriminant";
        disc.worst_margin = d.beta;
        disc.witness = {a, m};
        if (admissible(a, m)) {
            disc.verdict = d.beta > 0.0 ? Verdict::holds : Verdict::fails;
        } else {
            disc.verdict = Verdict::inconclusive;
            disc.note = "(a, m) outside the admissible rectangle";
        }
        std::ostringstream note;
        note << "delta = " << d.delta;
        disc.note = disc.note.empty() ? note.str() : disc.note + "; " + note.str();
        list.push_back(report_to_json(disc));
    }

    out["criteria"] = list;
    OutputStream os(o.out);
    os.get() << out.dump(2) << '\n';
    return 0;
}

int run_simulate(const CommonOpts& o, double E, double sim_tol, double check_tol) {
    check_format(o.format, "csv");
    const PotentialSpec pot = make_potential(o);
    const SimulationResult res = simulate_period(pot, E, 1e30, sim_tol);
    const PeriodSample quad = period_direct(pot, E, o.tol);
    const double rel = std::fabs(res.T - quad.T) / quad.T;

    OutputStream out(o.out);
    write_trace_csv(out.get(), pot, res.trace);

    std::cerr << "simulate: T_ode = " << res.T << ", T_quadrature = " << quad.T
              << ", rel_diff = " << rel << ", max_drift = " << res.trace.max_drift
              << "\n";
    if (!(rel <= check_tol)) {
        std::cerr << "simulate: measured period deviates from quadrature beyond "
                  << check_tol << "\n";
        return 1;
    }
    return 0;
}

int run_asymptotics(const CommonOpts& o, double e_lo, double e_hi) {
    check_format(o.format, "json");
    const PotentialSpec pot = make_potential(o);
    const AsymptoticFit fit = asymptotic_report(pot, e_lo, e_hi, 10, o.tol);
    const std::vector<double> probe = blowup_probe(pot, 2, 8, o.tol);
    bool monotone = true;
    for (std::size_t i = 1; i < probe.size(); ++i)
        monotone = monotone && probe[i] > probe[i - 1];

    json out{{"exponent_fit", fit.exponent_fit},
             {"exponent_theory", fit.exponent_theory},
             {"exponent_abs_err", std::fabs(fit.exponent_fit - fit.exponent_theory)},
             {"coeff_fit", fit.coeff_fit},
             {"coeff_theory", fit.coeff_theory},
             {"coeff_rel_err", fit.rel_err},
             {"blowup_T", probe},
             {"blowup_monotone", monotone}};
    OutputStream os(o.out);
    os.get() << out.dump(2) << '\n';

    int rc = 0;
    if (!(std::fabs(fit.exponent_fit - fit.exponent_theory) <= 1e-3)) {
        std::cerr << "asymptotics: exponent off by more than 1e-3\n";
        rc = 1;
    }
    if (!(fit.rel_err <= 0.01)) {
        std::cerr << "asymptotics: coefficient off by more than 1%\n";
        rc = 1;
    }
    if (!monotone) {
        std::cerr << "asymptotics: period not increasing along the homoclinic "
                     "approach\n";
        rc = 1;
    }
    return rc;
}

int run_sweep(const CommonOpts& o, double p_min, double p_max, int p_count,
              double q_min, double q_max, int q_count, int e_count) {
    check_format(o.format, "csv");
    struct Pair {
        double p, q;
    };
    std::vector<Pair> pairs;
    for (int i = 0; i < p_count; ++i)
        for (int j = 0; j < q_count; ++j) {
            const double p = p_count == 1
                                 ? p_min
                                 : p_min + (p_max - p_min) * i / (p_count - 1.0);
            const double q = q_count == 1
                                 ? q_min
                                 : q_min + (q_max - q_min) * j / (q_count - 1.0);
            if (q > p && p > 1.0) pairs.push_back({p, q});
        }

    struct Row {
        double p, q, m, margin, witness;
        bool increasing;
    };
    std::vector<Row> rows(pairs.size());
    parallel_for(static_cast<int>(pairs.size()), resolve_threads(o), [&](int k) {
        const auto [p, q] = pairs[k];
        const PotentialSpec pot = make_model_potential(p, q);
        double prev = 0.0, margin = std::numeric_limits<double>::infinity();
        double witness = 0.0;
        bool increasing = true;
        for (int i = 0; i < e_count; ++i) {
            const double E =
                pot.Estar * std::pow(10.0, -4.0 + (4.0 - 0.022) * i / (e_count - 1.0));
            const double T = period_direct(pot, E, o.tol).T;
            if (i > 0) {
                const double rel = (T - prev) / prev;
                if (rel < margin) {
                    margin = rel;
                    witness = E;
                }
                increasing = increasing && T > prev;
            }
            prev = T;
        }
        rows[k] = {p, q, q / p, margin, witness, increasing};
    });

    OutputStream out(o.out);
    auto& os = out.get();
    os.precision(16);
    os << "p,q,m,T_increasing,worst_rel_step,witness_E\n";
    int rc = 0;
    for (const Row& r : rows) {
        os << r.p << ',' << r.q << ',' << r.m << ','
           << (r.increasing ? "true" : "false") << ',' << r.margin << ','
           << r.witness << '\n';
        if (!r.increasing) {
            std::cerr << "sweep: T not increasing for p = " << r.p
                      << ", q = " << r.q << " near E = " << r.witness << "\n";
            rc = 1;
        }
    }
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"period function of p-Laplacian Hamiltonian wells"};
    app.require_subcommand(1);

    CommonOpts o;
    double sim_E = 0.05;
    double sim_tol = 1e-8;
    double sim_check = 1e-5;
    double asy_lo = 1e-8, asy_hi = 1e-7;
    double p_min = 2.5, p_max = 4.0, q_min = 3.0, q_max = 9.0;
    int p_count = 4, q_count = 4, e_count = 20;

    CLI::App* c_period = app.add_subcommand(
        "period-curve", "T(E) by both routes; checks agreement and monotonicity");
    add_common(c_period, o);

    CLI::App* c_deriv = app.add_subcommand(
        "derivative-curve", "dT/dE by Chow-Wang, theta route and finite differences");
    add_common(c_deriv, o);

    CLI::App* c_crit = app.add_subcommand(
        "criteria", "monotonicity criterion verdicts as JSON");
    add_common(c_crit, o);

    CLI::App* c_sim = app.add_subcommand(
        "simulate", "integrate one orbit; trace CSV plus measured-vs-quadrature period");
    add_common(c_sim, o);
    c_sim->add_option("--E", sim_E, "orbit energy in (0, E*)")->required();
    c_sim->add_option("--sim-tol", sim_tol, "integrator tolerance");
    c_sim->add_option("--sim-check", sim_check,
                      "measured vs quadrature period tolerance");

    CLI::App* c_asy = app.add_subcommand(
        "asymptotics", "small-energy fit summary and blow-up probe as JSON");
    add_common(c_asy, o);
    c_asy->add_option("--e-lo", asy_lo, "fit window lower energy");
    c_asy->add_option("--e-hi", asy_hi, "fit window upper energy");

    CLI::App* c_sweep = app.add_subcommand(
        "sweep", "monotonicity verdict over a (p, q) rectangle, one row per pair");
    add_common(c_sweep, o);
    c_sweep->add_option("--p-min", p_min);
    c_sweep->add_option("--p-max", p_max);
    c_sweep->add_option("--p-count", p_count);
    c_sweep->add_option("--q-min", q_min);
    c_sweep->add_option("--q-max", q_max);
    c_sweep->add_option("--q-count", q_count);
    c_sweep->add_option("--e-count", e_count, "energies per pair");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (c_period->parsed()) {
            merge_config(c_period, o);
            return run_period_curve(o);
        }
        if (c_deriv->parsed()) {
            merge_config(c_deriv, o);
            return run_derivative_curve(o);
        }
        if (c_crit->parsed()) {
            merge_config(c_crit, o);
            return run_criteria(o);
        }
        if (c_sim->parsed()) {
            merge_config(c_sim, o);
            return run_simulate(o, sim_E, sim_tol, sim_check);
        }
        if (c_asy->parsed()) {
            merge_config(c_asy, o);
            return run_asymptotics(o, asy_lo, asy_hi);
        }
        if (c_sweep->parsed()) {
            merge_config(c_sweep, o);
            return run_sweep(o, p_min, p_max, p_count, q_min, q_max, q_count,
                             e_count);
        }
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const QuadratureError& e) {
        std::cerr << "numerical non-convergence: " << e.what() << "\n";
        return 3;
    } catch (const IntegrationError& e) {
        std::cerr << "numerical non-convergence: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
