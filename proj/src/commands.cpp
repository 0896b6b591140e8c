#include "cfm/commands.hpp"

#include <fstream>
#include <iostream>
#include <map>

#include "cfm/analytics.hpp"
#include "cfm/dynamics.hpp"
#include "cfm/error.hpp"
#include "cfm/io.hpp"
#include "cfm/oracle.hpp"

namespace cfm::cli {

namespace fs = std::filesystem;

namespace {

template <class F>
int guarded(Console& console, const char* command, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        console.err << command << ": " << e.what() << '\n';
        return kConfigError;
    } catch (const ValidationError& e) {
        console.err << command << ": " << e.what() << '\n';
        return kConfigError;
    } catch (const ParseError& e) {
        console.err << command << ": " << e.what() << '\n';
        return kConfigError;
    } catch (const DimensionError& e) {
        console.err << command << ": " << e.what() << '\n';
        return kConfigError;
    } catch (const GuardrailError& e) {
        console.err << command << ": " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        console.err << command << ": " << e.what() << '\n';
        return kRuntimeError;
    }
}

std::ofstream create(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

void note(Console& c, const std::string& msg) {
    if (!c.quiet) c.out << msg << '\n';
}

void report_isolated(Console& c, const gen::GenerationLog& log) {
    if (!log.isolated_buyers.empty())
        c.err << "notice: " << log.isolated_buyers.size()
              << " agent(s) have no trading partners; their spending share was set to 0 (first: agent "
              << log.isolated_buyers.front() + 1 << ")\n";
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

std::string opt_str(const std::optional<double>& v) { return v ? io::format_shortest(*v) : std::string("undefined"); }

}  // namespace

int cmd_gen(const config::RunConfig& cfg, Console& console) {
    return guarded(console, "gen", [&] {
        if (!cfg.topology) throw ConfigError("topology", "gen needs a topology (the config loads matrices from files)");
        gen::GenerationLog log;
        const auto matrices = config::build_matrices(cfg, &log);
        report_isolated(console, log);
        ensure_dir(cfg.output_dir);
        const std::string fp = cfg.fingerprint();
        for (std::size_t r = 0; r < matrices.size(); ++r) {
            const fs::path path = cfg.output_dir / (matrices.size() == 1 ? std::string("matrix.cfm")
                                                                          : "matrix_" + std::to_string(r + 1) + ".cfm");
            auto out = create(path);
            io::write_matrix(out, *matrices[r], fp + " matrix=" + std::to_string(r + 1) + " matrix_seed=" +
                                                     std::to_string(config::matrix_seed(cfg.seed, r)));
            if (!out) throw std::runtime_error("write failed for " + path.string());
            note(console, "wrote " + path.string() + " (" + std::to_string(matrices[r]->nnz()) + " entries)");
        }
        return kSuccess;
    });
}

int cmd_run(const config::RunConfig& cfg, Console& console) {
    return guarded(console, "run", [&] {
        gen::GenerationLog log;
        const auto matrices = config::build_matrices(cfg, &log);
        report_isolated(console, log);
        const Schedule schedule = config::build_schedule(cfg, matrices);
        const auto x0 = config::initial_wealth(cfg);
        const std::string fp = cfg.fingerprint();
        const RunStamp stamp{cfg.seed, fp};

        SimulationTrace trace =
            cfg.mode == NumericMode::Integer
                ? run_simulation(schedule, IntegerWealth(std::vector<std::int64_t>(x0.begin(), x0.end())),
                                 cfg.snapshots, cfg.steps, stamp)
                : run_simulation(schedule, WealthVector(x0), cfg.snapshots, cfg.steps, stamp);

        ensure_dir(cfg.output_dir);
        {
            auto out = create(cfg.output_dir / "resolved_config.json");
            nlohmann::ordered_json j;
            j["fingerprint"] = fp;
            const auto resolved = cfg.to_json();
            for (const auto& [k, v] : resolved.items()) j[k] = v;
            out << j.dump(2) << '\n';
        }
        const bool summary = cfg.snapshots.content == SnapshotPolicy::Content::Summary;
        {
            auto out = create(cfg.output_dir / "snapshots.csv");
            io::write_snapshots(out, trace, summary, fp);
        }
        if (summary) {
            auto out = create(cfg.output_dir / "final.csv");
            io::write_full_snapshots(out, trace, fp, true);
        }
        {
            auto out = create(cfg.output_dir / "drift.csv");
            io::write_drift(out, trace, fp);
        }
        const auto audit = analytics::conservation_audit(trace);
        {
            auto out = create(cfg.output_dir / "audit.txt");
            io::write_key_values(out,
                                 {{"mode", to_string(audit.mode)},
                                  {"steps", std::to_string(trace.steps)},
                                  {"monetary_base", io::format_shortest(audit.monetary_base)},
                                  {"final_total", io::format_shortest(trace.final_state.total())},
                                  {"max_abs_drift", io::format_shortest(audit.max_abs_drift)},
                                  {"max_rel_drift", io::format_shortest(audit.max_rel_drift)},
                                  {"max_step_rel_change", io::format_shortest(audit.max_step_rel_change)},
                                  {"step_bound", io::format_shortest(audit.step_bound)},
                                  {"passed", yes_no(audit.passed)},
                                  {"isolated_buyers", std::to_string(log.isolated_buyers.size())}},
                                 fp);
        }
        if (!audit.passed)
            console.err << "warning: conservation audit failed (max relative drift " << audit.max_rel_drift << ")\n";
        note(console, "run: " + std::to_string(trace.steps) + " steps, " + std::to_string(trace.snapshots.size()) +
                          " snapshots, max relative drift " + io::format_shortest(audit.max_rel_drift) + " -> " +
                          cfg.output_dir.string());
        return kSuccess;
    });
}

namespace {

// The run's own fingerprint, so reports stay tied to seed and config hash.
std::string source_fingerprint(const fs::path& snapshots) {
    std::ifstream in(snapshots);
    std::string line;
    if (std::getline(in, line) && line.rfind("# cfm ", 0) == 0) return line.substr(2);
    return std::string("cfm ") + io::kToolVersion + " source=" + snapshots.string();
}

}  // namespace

int cmd_analyze(const AnalyzeOptions& options, Console& console) {
    return guarded(console, "analyze", [&]() -> int {
        fs::path snapshots = options.trace;
        fs::path dir = options.trace;
        if (fs::is_directory(options.trace))
            snapshots = options.trace / "snapshots.csv";
        else
            dir = options.trace.parent_path();
        const fs::path out_dir = options.out_dir.value_or(dir);

        io::SnapshotTable table = io::load_snapshots(snapshots);
        if (table.rows.empty()) throw ParseError(snapshots.string() + ": no snapshot rows");

        // Full vectors: from the table itself, or the separate final vector of a summary run.
        std::vector<Snapshot> full;
        if (table.full) {
            full = table.rows;
        } else if (fs::exists(dir / "final.csv")) {
            auto fin = io::load_snapshots(dir / "final.csv");
            if (!fin.full) throw ParseError("final.csv does not hold a full wealth vector");
            full = fin.rows;
        }
        if (options.convergence && full.size() < 2)
            throw ConfigError("analyze", "convergence diagnostics need full-vector snapshots, but " + snapshots.string() +
                                             " is summary-only; re-run with \"snapshots\": {\"content\": \"full\"}");
        if (full.empty())
            throw ConfigError("analyze", "trace has no full wealth vector; re-run with \"snapshots\": {\"content\": "
                                         "\"full\"} or keep final.csv next to snapshots.csv");

        const Snapshot& last = full.back();
        const std::vector<double>& x = *last.values;
        const std::string fp = source_fingerprint(snapshots) + " analyze";
        ensure_dir(out_dir);

        const auto ineq = analytics::inequality_report(x, last.tau);
        std::vector<std::pair<std::string, std::string>> kv{
            {"tau", std::to_string(last.tau)},
            {"n", std::to_string(x.size())},
            {"total", io::format_shortest(compensated_sum(x))},
            {"gini", opt_str(ineq.gini)},
            {"top1", ineq.top_shares.count(0.01) ? io::format_shortest(ineq.top_shares.at(0.01)) : "undefined"},
            {"top10", ineq.top_shares.count(0.1) ? io::format_shortest(ineq.top_shares.at(0.1)) : "undefined"},
        };

        std::vector<analytics::CcdfPoint> ccdf;
        const std::size_t k = options.hill_k.value_or(analytics::default_hill_k(x.size()));
        try {
            const auto tail = analytics::hill_estimator(x, k);
            kv.emplace_back("hill_alpha", opt_str(tail.hill_alpha));
            kv.emplace_back("hill_k", std::to_string(tail.k_used));
            kv.emplace_back("hill_threshold", io::format_shortest(tail.threshold));
            kv.emplace_back("hill_ks_distance", opt_str(tail.ks_distance));
            kv.emplace_back("hill_diagnostic", tail.diagnostic);
            ccdf = tail.ccdf;
        } catch (const std::invalid_argument& e) {
            kv.emplace_back("hill_alpha", "undefined");
            kv.emplace_back("hill_k", std::to_string(k));
            kv.emplace_back("hill_diagnostic", e.what());
            ccdf = analytics::empirical_ccdf(x);
        }

        std::optional<analytics::ConvergenceReport> conv;
        if (full.size() >= 2) {
            SimulationTrace tr;
            tr.n = x.size();
            tr.monetary_base = full.front().total;
            tr.snapshots = full;
            std::optional<WealthVector> ref;
            if (options.reference) ref = WealthVector(io::load_amounts(*options.reference));
            conv = analytics::convergence_diagnostics(tr, ref, options.threshold);
            if (!conv->step_distances.empty())
                kv.emplace_back("last_step_distance", io::format_shortest(conv->step_distances.back()));
            if (ref)
                kv.emplace_back("first_crossing",
                                conv->first_crossing ? std::to_string(*conv->first_crossing) : std::string("none"));
        }

        {
            auto out = create(out_dir / "inequality.txt");
            out << "# " << fp << '\n';
            out << "# keys: tau snapshot step; gini in [0,1]; top1/top10 wealth share of richest 1%/10%; "
                   "hill_* Pareto tail fit over the top hill_k positive values\n";
            io::write_key_values(out, kv);
        }
        {
            auto out = create(out_dir / "lorenz.csv");
            io::write_lorenz(out, ineq.lorenz, fp);
        }
        {
            auto out = create(out_dir / "tail_ccdf.csv");
            io::write_ccdf(out, ccdf, fp);
        }
        if (conv) {
            auto out = create(out_dir / "convergence.csv");
            io::write_convergence(out, *conv, fp);
        }
        for (const auto& [key, value] : kv) note(console, key + "=" + value);
        return kSuccess;
    });
}

int cmd_verify(const config::RunConfig& cfg, const VerifyOptions& options, Console& console) {
    return guarded(console, "verify", [&]() -> int {
        if (cfg.n > oracle::kOracleMaxN)
            throw GuardrailError("verify refuses n = " + std::to_string(cfg.n) + ": the dense oracle is capped at " +
                                 std::to_string(oracle::kOracleMaxN) + " agents");
        const auto matrices = config::build_matrices(cfg);
        const Schedule schedule = config::build_schedule(cfg, matrices);
        const WealthVector x0(config::initial_wealth(cfg));

        // Dense copies, one per distinct factor.
        std::map<const CirculationMatrix*, oracle::DenseMatrix> dense;
        std::vector<const oracle::DenseMatrix*> chain;
        chain.reserve(schedule.size());
        for (std::size_t t = 0; t < schedule.size(); ++t) {
            const CirculationMatrix* m = &schedule.at(t);
            auto it = dense.find(m);
            if (it == dense.end()) it = dense.emplace(m, oracle::DenseMatrix::from_sparse(*m)).first;
            chain.push_back(&it->second);
        }

        std::vector<std::pair<std::string, std::string>> kv;
        bool ok = true;
        double worst_step = 0.0;
        for (const auto& [m, d] : dense) {
            const auto r = oracle::equivalence_check(apply_step(*m, x0).values(), oracle::dense_step(d, x0.values()),
                                                     options.step_tolerance);
            worst_step = std::max(worst_step, r.max_abs);
            ok = ok && r.passed;
        }
        kv.emplace_back("single_step_max_abs", io::format_shortest(worst_step));
        kv.emplace_back("single_step_tolerance", io::format_shortest(options.step_tolerance));

        const auto trace = run_simulation(schedule, x0, SnapshotPolicy::final_only(), cfg.steps);
        std::vector<double> dense_x(x0.values().begin(), x0.values().end());
        for (const auto* d : chain) dense_x = oracle::dense_step(*d, dense_x);
        const auto chained = oracle::equivalence_check(trace.final_state.values(), dense_x, options.chain_tolerance);
        ok = ok && chained.passed;
        kv.emplace_back("chained_max_abs", io::format_shortest(chained.max_abs));
        kv.emplace_back("chained_l1", io::format_shortest(chained.l1));
        kv.emplace_back("chained_tolerance", io::format_shortest(options.chain_tolerance));
        if (chained.worst_index) kv.emplace_back("chained_worst_agent", std::to_string(*chained.worst_index + 1));

        std::size_t nnz = 0;
        for (const auto& m : matrices) nnz = std::max(nnz, m->nnz());
        const double product_cost = static_cast<double>(cfg.steps) * static_cast<double>(nnz) * static_cast<double>(cfg.n);
        if (cfg.n <= kProductMaxN && product_cost <= 2e9) {
            const auto factors = schedule.factors();
            const auto product = matrix_product(std::span<const CirculationMatrix* const>(factors), cfg.n);
            const auto r = oracle::equivalence_check(apply_step(product, x0).values(), trace.final_state.values(),
                                                     options.product_tolerance);
            ok = ok && r.passed;
            kv.emplace_back("product_max_abs", io::format_shortest(r.max_abs));
            kv.emplace_back("product_tolerance", io::format_shortest(options.product_tolerance));
        } else {
            kv.emplace_back("product_max_abs", "skipped");
        }
        kv.emplace_back("passed", yes_no(ok));

        ensure_dir(cfg.output_dir);
        {
            auto out = create(cfg.output_dir / "verify.txt");
            io::write_key_values(out, kv, cfg.fingerprint());
        }
        for (const auto& [key, value] : kv) note(console, key + "=" + value);
        if (!ok) console.err << "verify: sparse engine and dense oracle disagree beyond tolerance\n";
        return ok ? kSuccess : kVerificationFailed;
    });
}

}  // namespace cfm::cli
