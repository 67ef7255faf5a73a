#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gkls/gkls.h"

namespace {

int exit_code(gkls_status s)
{
    switch (s) {
    case GKLS_OK: return 0;
    case GKLS_ERR_CONFIG:
    case GKLS_ERR_INVALID_ARGUMENT: return 2;
    case GKLS_ERR_IO: return 4;
    case GKLS_ERR_INTERNAL: return 1;
    default: return 3;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Run GKLS master-equation experiments"};
    app.set_version_flag("--version", std::string(gkls_version()));

    std::string experiment;
    std::string config;
    std::string out;
    std::vector<double> alphas;
    double tmax = NAN;
    int steps = 0;
    bool quiet = false;

    app.add_option("experiment", experiment, "fig2, jc-sim, eigenops, attractor, coefficients or touchard")
        ->required()
        ->check(CLI::IsMember({"fig2", "jc-sim", "eigenops", "attractor", "coefficients", "touchard"}));
    app.add_option("--config", config, "JSON configuration file");
    app.add_option("--out", out, "output directory");
    app.add_option("--alpha", alphas, "coherent amplitudes, e.g. --alpha 5 25")->delimiter(',');
    app.add_option("--tmax", tmax, "end of the time grid, in the grid's units");
    app.add_option("--steps", steps, "number of grid intervals")->check(CLI::PositiveNumber);
    app.add_flag("-q,--quiet", quiet, "do not print the summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    gkls_overrides ov{};
    ov.out_dir = out.empty() ? nullptr : out.c_str();
    ov.alphas = alphas.empty() ? nullptr : alphas.data();
    ov.n_alphas = alphas.size();
    ov.tmax = tmax;
    ov.steps = steps;

    char* summary = nullptr;
    gkls_status st = gkls_run_experiment(experiment.c_str(), config.empty() ? nullptr : config.c_str(),
                                         &ov, &summary);
    if (st != GKLS_OK) {
        std::fprintf(stderr, "gkls-run: %s error: %s\n", gkls_status_name(st), gkls_last_error());
        return exit_code(st);
    }
    if (!quiet) std::printf("%s\n", summary);
    gkls_string_free(summary);
    return 0;
}
