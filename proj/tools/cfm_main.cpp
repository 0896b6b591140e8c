// Command-line front end: gen, run, analyze, verify.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cfm/commands.hpp"
#include "cfm/error.hpp"

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
    auto* opt = cmd->add_option("--config", c.config, "run config (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "override the config seed");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_flag("--quiet", c.quiet, "suppress progress output");
}

std::optional<cfm::config::RunConfig> load(const Common& c, cfm::cli::Console& console) {
    try {
        auto cfg = cfm::config::parse_config(std::filesystem::path(c.config));
        if (c.seed) {
            cfg.seed = *c.seed;
            cfg.schedule.seed = *c.seed;
        }
        cfm::config::apply_environment(cfg);
        if (!c.out.empty()) cfg.output_dir = c.out;
        if (c.quiet) cfg.quiet = true;
        console.quiet = cfg.quiet;
        return cfg;
    } catch (const std::exception& e) {
        console.err << "config: " << e.what() << '\n';
        return std::nullopt;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Income circulation simulator: column-stochastic wealth dynamics"};
    app.require_subcommand(1);

    Common gen_opts, run_opts, verify_opts, analyze_common;
    auto* gen = app.add_subcommand("gen", "generate circulation matrices");
    add_common(gen, gen_opts, true);
    auto* run = app.add_subcommand("run", "run a simulation");
    add_common(run, run_opts, true);
    auto* verify = app.add_subcommand("verify", "compare the sparse engine with the dense oracle");
    add_common(verify, verify_opts, true);
    cfm::cli::VerifyOptions vopts;
    verify->add_option("--tolerance", vopts.step_tolerance, "single-step max-abs tolerance");
    verify->add_option("--chain-tolerance", vopts.chain_tolerance, "chained-run max-abs tolerance");
    verify->add_option("--product-tolerance", vopts.product_tolerance, "explicit product max-abs tolerance");

    auto* analyze = app.add_subcommand("analyze", "inequality, tail and convergence reports for a trace");
    cfm::cli::AnalyzeOptions aopts;
    std::string trace, reference;
    std::optional<std::size_t> hill_k;
    analyze->add_option("--trace", trace, "run directory or snapshots.csv")->required();
    analyze->add_option("--out", analyze_common.out, "report directory (default: the trace directory)");
    analyze->add_option("--hill-k", hill_k, "order statistics used by the Hill estimator");
    analyze->add_flag("--convergence", aopts.convergence, "require convergence diagnostics");
    analyze->add_option("--reference", reference, "reference wealth vector for convergence distances");
    analyze->add_option("--threshold", aopts.threshold, "convergence threshold on the normalized L1 distance");
    analyze->add_flag("--quiet", analyze_common.quiet, "suppress progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cfm::cli::kConfigError;
    }

    cfm::cli::Console console{std::cout, std::cerr, false};
    if (*analyze) {
        aopts.trace = trace;
        if (!analyze_common.out.empty()) aopts.out_dir = analyze_common.out;
        if (!reference.empty()) aopts.reference = reference;
        aopts.hill_k = hill_k;
        console.quiet = analyze_common.quiet;
        return cfm::cli::cmd_analyze(aopts, console);
    }
    const Common& common = *gen ? gen_opts : *run ? run_opts : verify_opts;
    const auto cfg = load(common, console);
    if (!cfg) return cfm::cli::kConfigError;
    if (*gen) return cfm::cli::cmd_gen(*cfg, console);
    if (*run) return cfm::cli::cmd_run(*cfg, console);
    return cfm::cli::cmd_verify(*cfg, vopts, console);
}
