#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "choq/analysis.hpp"
#include "choq/errors.hpp"
#include "choq/io.hpp"
#include "choq/solvers.hpp"

using namespace choq;
namespace fs = std::filesystem;

namespace {

std::string join_argv(int argc, char** argv) {
    std::ostringstream os;
    for (int i = 0; i < argc; ++i) os << (i ? " " : "") << argv[i];
    return os.str();
}

RunConfig load_config(const std::string& config_path,
                      const std::vector<std::string>& overrides) {
    RunConfig cfg =
        config_path.empty() ? RunConfig{} : parse_config_file(config_path);
    for (const auto& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw OutOfRange("override must be key=value: " + ov);
        apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
    }
    validate_params(cfg.params.dim, cfg.params.s, cfg.params.alpha, cfg.params.p,
                    cfg.params.omega);
    return cfg;
}

SolveReport run_solver(const RunConfig& cfg) {
    Grid grid = make_grid(cfg.params.dim, cfg.n, cfg.L);
    if (cfg.solver == "ngf")
        return solve_ground_state_ngf(cfg.params, cfg.rho, grid, cfg.opts);
    if (cfg.solver == "petviashvili")
        return solve_petviashvili(cfg.params, cfg.params.omega, grid, cfg.opts);
    throw OutOfRange("solver (ngf|petviashvili)");
}

int do_solve(const RunConfig& cfg, const std::string& invocation) {
    fs::create_directories(cfg.out_dir);
    SolveReport rep = run_solver(cfg);
    write_field(cfg.out_dir + "/field.chqf", rep.field);
    write_text(cfg.out_dir + "/report.json", report_to_json(rep));
    CertifyOptions copts;
    copts.mode = cfg.opts.mode;
    copts.converged = rep.termination == Termination::Converged;
    Certificate cert = certify(rep.field, cfg.params, rep.lambda, copts);
    write_text(cfg.out_dir + "/certificate.json", certificate_to_json(cert));
    write_text(cfg.out_dir + "/manifest.json", manifest_json(cfg, invocation));
    if (rep.termination != Termination::Converged) {
        std::cerr << "solver did not converge (termination="
                  << (rep.termination == Termination::MaxIter ? "MaxIter" : "Diverged")
                  << ")\n";
        return 3;
    }
    std::cout << "converged in " << rep.iterations << " iterations, E_omega = "
              << rep.functionals.e_omega << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral laboratory for fractional Choquard ground states"};
    app.require_subcommand(1);

    std::string config_path, field_path, out_dir = ".";
    std::vector<std::string> overrides;
    double omega = 1.0, t_param = 1.0, x0 = 0.0;
    int k = 8;
    double win_lo = 0.0, win_hi = 0.0;
    std::string sweep_key = "p";
    std::vector<double> sweep_values;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config file (key = value)");
        cmd->add_option("--set", overrides, "override key=value (repeatable)");
        cmd->add_option("--out", out_dir, "output directory");
    };

    auto* c_solve = app.add_subcommand("solve", "run a solver, write field + certificate");
    add_common(c_solve);

    auto* c_cert = app.add_subcommand("certify", "load a field, emit certificate");
    c_cert->add_option("--field", field_path, "CHQF field file")->required();
    c_cert->add_option("--omega", omega, "frequency for the certificate");
    add_common(c_cert);

    auto* c_bubble = app.add_subcommand("bubble", "make_bubble + residual report");
    c_bubble->add_option("--t", t_param, "bubble scale t");
    c_bubble->add_option("--x0", x0, "bubble center offset");
    add_common(c_bubble);

    auto* c_scaling = app.add_subcommand("scaling-test", "scaling_report on a Gaussian trial");
    add_common(c_scaling);

    auto* c_spec = app.add_subcommand("spectrum", "morse_spectrum of a stored field");
    c_spec->add_option("--field", field_path, "CHQF field file")->required();
    c_spec->add_option("--omega", omega, "multiplier lambda (=omega)");
    c_spec->add_option("--k", k, "number of eigenvalues");
    add_common(c_spec);

    auto* c_sweep = app.add_subcommand("sweep", "parallel solve over a parameter grid");
    c_sweep->add_option("--key", sweep_key, "parameter to sweep (p|omega)");
    c_sweep->add_option("--values", sweep_values, "values")->required();
    add_common(c_sweep);

    auto* c_regime = app.add_subcommand("regime", "classify_regime table");
    add_common(c_regime);

    auto* c_decay = app.add_subcommand("decay", "decay fit of a stored field");
    c_decay->add_option("--field", field_path, "CHQF field file")->required();
    c_decay->add_option("--rmin", win_lo, "window inner radius")->required();
    c_decay->add_option("--rmax", win_hi, "window outer radius")->required();
    add_common(c_decay);

    CLI11_PARSE(app, argc, argv);
    const std::string invocation = join_argv(argc, argv);

    try {
        RunConfig cfg = load_config(config_path, overrides);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        fs::create_directories(cfg.out_dir);

        if (c_solve->parsed()) return do_solve(cfg, invocation);

        if (c_cert->parsed()) {
            Field f = read_field(field_path);
            cfg.params.omega = omega;
            CertifyOptions copts;
            copts.mode = cfg.opts.mode;
            Certificate cert = certify(f, cfg.params, omega, copts);
            write_text(cfg.out_dir + "/certificate.json", certificate_to_json(cert));
            write_text(cfg.out_dir + "/manifest.json", manifest_json(cfg, invocation));
            std::cout << certificate_to_json(cert) << "\n";
            return 0;
        }

        if (c_bubble->parsed()) {
            Grid grid = make_grid(cfg.params.dim, cfg.n, cfg.L);
            auto [field, res] = make_bubble(cfg.params.dim, cfg.params.s, t_param, x0,
                                            std::nullopt, grid);
            write_field(cfg.out_dir + "/bubble.chqf", field);
            std::ostringstream os;
            os << "{\n  \"residual\": " << res << ",\n  \"center_value\": "
               << field.v[field.v.size() / 2] << "\n}";
            write_text(cfg.out_dir + "/bubble.json", os.str());
            write_text(cfg.out_dir + "/manifest.json", manifest_json(cfg, invocation));
            std::cout << "bubble residual " << res << "\n";
            return 0;
        }

        if (c_scaling->parsed()) {
            Grid grid = make_grid(cfg.params.dim, cfg.n, cfg.L);
            Field u(grid);
            std::vector<int> idx(grid.dim);
            for (std::size_t i = 0; i < u.v.size(); ++i) {
                unravel(i, grid.dim, grid.n, idx.data());
                double r2 = 0.0;
                for (int d = 0; d < grid.dim; ++d) {
                    double x = grid.coord(idx[d]);
                    r2 += x * x;
                }
                u.v[i] = std::exp(-r2 / 2.0);
            }
            auto fv = functional_suite(u, cfg.params, cfg.opts.mode);
            auto rep = scaling_report(fv, cfg.params);
            std::cout << "prop41_i_gap   " << rep.prop41_i_gap << " (" << rep.has_i << ")\n"
                      << "prop41_ii_gap  " << rep.prop41_ii_gap << " (" << rep.has_ii << ")\n"
                      << "prop41_iii_gap " << rep.prop41_iii_gap << " (" << rep.has_iii << ")\n"
                      << "prop41_iv_gap  " << rep.prop41_iv_gap << " (" << rep.has_iv << ")\n"
                      << "w_invariance   " << rep.w_invariance_gap << "\n";
            return 0;
        }

        if (c_spec->parsed()) {
            Field f = read_field(field_path);
            MorseData md = morse_spectrum(f, omega, cfg.params, k, cfg.opts.mode);
            std::cout << "eigenvalues:";
            for (double e : md.eigenvalues) std::cout << " " << e;
            std::cout << "\nnegative_count " << md.negative_count << "\nzero_modes "
                      << md.zero_modes << "\ntranslation_overlap "
                      << md.translation_overlap << "\n";
            return 0;
        }

        if (c_decay->parsed()) {
            Field f = read_field(field_path);
            DecayFit fit = fit_decay_exponent(f, {win_lo, win_hi});
            write_decay_csv(cfg.out_dir + "/decay.csv", fit);
            std::cout << "exponent " << fit.exponent << " amplitude " << fit.amplitude
                      << " r2 " << fit.r2 << "\n";
            return 0;
        }

        if (c_sweep->parsed()) {
            std::vector<std::future<std::pair<double, SolveReport>>> jobs;
            for (double v : sweep_values) {
                RunConfig sub = cfg;
                if (sweep_key == "p") sub.params.p = v;
                else if (sweep_key == "omega") sub.params.omega = v;
                else throw OutOfRange("sweep key (p|omega)");
                validate_params(sub.params.dim, sub.params.s, sub.params.alpha,
                                sub.params.p, sub.params.omega);
                jobs.push_back(std::async(std::launch::async, [sub, v] {
                    return std::make_pair(v, run_solver(sub));
                }));
            }
            std::ostringstream csv;
            csv << sweep_key << ",iterations,termination,e_omega,K,M,P,nehari_res,pohozaev_res\n";
            csv.precision(17);
            bool all_ok = true;
            for (auto& j : jobs) {
                auto [v, rep] = j.get();
                bool ok = rep.termination == Termination::Converged;
                all_ok = all_ok && ok;
                csv << v << "," << rep.iterations << "," << (ok ? "Converged" : "Failed")
                    << "," << rep.functionals.e_omega << "," << rep.functionals.K << ","
                    << rep.functionals.M << "," << rep.functionals.P << ","
                    << rep.functionals.nehari_res << "," << rep.functionals.pohozaev_res
                    << "\n";
            }
            write_text(cfg.out_dir + "/sweep.csv", csv.str());
            write_text(cfg.out_dir + "/manifest.json", manifest_json(cfg, invocation));
            std::cout << csv.str();
            return all_ok ? 0 : 3;
        }

        if (c_regime->parsed()) {
            Regime r = classify_regime(cfg.params);
            std::cout << "p_low " << r.p_low << "\np_mass " << r.p_mass << "\np_high "
                      << r.p_high << "\nregime " << regime_name(r.tag) << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return int(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
