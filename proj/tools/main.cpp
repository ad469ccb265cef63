#include "harness.hpp"

#include <quadtwist/error.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace quadtwist;
using namespace quadtwist::harness;

namespace
{

void add_common(CLI::App *cmd, RunConfig &cfg, std::string &shifts)
{
    cmd->add_option("--shifts", shifts, "shift set as re,im:re,im");
    cmd->add_option("--ell", cfg.ell, "twist parameter (odd)");
    cmd->add_option("--seed", cfg.seed, "random seed");
    cmd->add_option("--threads", cfg.threads, "worker threads (0: environment or hardware)");
    cmd->add_option("--out", cfg.out, "CSV output path");
    cmd->add_option("--tolerance", cfg.tolerance, "override every pass tolerance");
    cmd->add_flag("--timing", cfg.timing, "record wall-clock timings");
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Shifted moments of quadratic twists: empirical averages, recipe predictions and checks"};
    app.set_config("--config", "", "key=value configuration file");
    app.require_subcommand(1);

    RunConfig cfg;
    std::string shifts;

    CLI::App *compare = app.add_subcommand("compare", "empirical average against the recipe prediction");
    add_common(compare, cfg, shifts);
    compare->add_option("--big-d", cfg.big_d, "family sizes D")->delimiter(',');
    compare->add_option("--eta", cfg.eta, "polynomial length exponent in (1, 2)");
    compare->add_option("--a-line", cfg.a_line, "real part of the recipe contour");
    compare->add_option("--ramp", cfg.ramp, "smooth cutoff ramp width");
    compare->add_option("--prime-cutoff", cfg.prime_cutoff, "Euler product prime cutoff");
    compare->add_option("--j", cfg.max_swap, "largest swap order (0 or 1)");
    compare->add_option("--budget", cfg.budget, "work budget in coefficient operations");

    CLI::App *verify = app.add_subcommand("verify", "run the oracle suites");
    add_common(verify, cfg, shifts);
    verify->add_option("--order", cfg.order, "formal series order M");

    CLI::App *decay = app.add_subcommand("swap-decay", "d-exponent of the j-swap terms");
    add_common(decay, cfg, shifts);
    decay->add_option("--j", cfg.max_swap, "swap order j");
    decay->add_option("--a-line", cfg.a_line, "real part of s");
    decay->add_option("--s-im", cfg.s_im, "imaginary part of s");
    decay->add_option("--points", cfg.points, "grid points between 1e3 and 1e5");

    CLI::App *poisson = app.add_subcommand("poisson-check", "Poisson summation against the direct sum");
    add_common(poisson, cfg, shifts);
    poisson->add_option("--big-d", cfg.big_d, "family sizes D")->delimiter(',');
    poisson->add_option("--moduli", cfg.moduli, "odd moduli m")->delimiter(',');
    poisson->add_option("--y", cfg.y, "sieve cutoff Y (0: 4 sqrt(2D))");
    poisson->add_option("--k-limit", cfg.k_limit, "largest dual frequency");

    CLI::App *ident = app.add_subcommand("identities", "local series identities");
    add_common(ident, cfg, shifts);
    ident->add_option("--order", cfg.order, "formal series order M");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        if (!shifts.empty()) {
            cfg.shifts = parse_shifts(shifts);
        }
        Report rep = dispatch(cfg);
        if (!cfg.out.empty()) {
            std::ofstream f(cfg.out, std::ios::binary);
            if (!f) {
                throw ConfigError("cannot open " + cfg.out);
            }
            f << rep.csv;
        }
        std::cout << report_json(rep).dump(2) << "\n";
        return rep.pass ? 0 : 1;
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParameterError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetError &e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
