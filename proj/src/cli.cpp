#include "ensim/cli/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"

#include "ensim/resources/resources.hpp"
#include "ensim/verify/claims.hpp"
#include "ensim/verify/verify.hpp"

namespace ensim::cli {

namespace {

using nlohmann::json;

struct RunConfig {
    double p = 0.01;
    double eta_e = 1.0;
    double eta_d = 1.0;
    int cutoff = kDefaultCutoff;
    std::string mode = "analytic";
    std::optional<std::uint64_t> seed;
    std::uint64_t trials = 100000;
    int n = 50;
    std::string out;
    std::string format = "json";
    bool from_pulses = false;
    std::string eta_grid = "0:1:0.05";
};

struct Flags {
    std::optional<double> p, eta, eta_e, eta_d;
    std::optional<int> cutoff, n;
    std::optional<std::string> mode, out, format, eta_grid, config_path;
    std::optional<std::uint64_t> seed, trials;
    bool from_pulses = false;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--p", f.p, "excitation probability per pulse");
    cmd->add_option("--eta", f.eta, "effective efficiency (sets eta_e, leaves eta_d = 1)");
    cmd->add_option("--eta-e", f.eta_e, "ensemble-photon coupling efficiency");
    cmd->add_option("--eta-d", f.eta_d, "detector efficiency");
    cmd->add_option("--cutoff", f.cutoff, "per-mode occupation cutoff");
    cmd->add_option("--mode", f.mode, "analytic|sampled");
    cmd->add_option("--seed", f.seed, "RNG seed (required in sampled mode)");
    cmd->add_option("--trials", f.trials, "Monte Carlo trials");
    cmd->add_option("--N", f.n, "target cluster length");
    cmd->add_option("--out", f.out, "output file path");
    cmd->add_option("--format", f.format, "csv|json");
    cmd->add_option("--config", f.config_path, "JSON config file (flags override it)");
}

/// Precedence: flags override config file, config file overrides defaults.
RunConfig merge_config(const Flags& f) {
    RunConfig c;
    if (f.config_path) {
        std::ifstream in(*f.config_path);
        if (!in) throw CLI::ValidationError("--config", "cannot open " + *f.config_path);
        json j = json::parse(in);
        if (j.contains("p")) c.p = j["p"].get<double>();
        if (j.contains("eta")) c.eta_e = j["eta"].get<double>();
        if (j.contains("eta_e")) c.eta_e = j["eta_e"].get<double>();
        if (j.contains("eta_d")) c.eta_d = j["eta_d"].get<double>();
        if (j.contains("cutoff")) c.cutoff = j["cutoff"].get<int>();
        if (j.contains("mode")) c.mode = j["mode"].get<std::string>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("trials")) c.trials = j["trials"].get<std::uint64_t>();
        if (j.contains("N")) c.n = j["N"].get<int>();
        if (j.contains("out")) c.out = j["out"].get<std::string>();
        if (j.contains("format")) c.format = j["format"].get<std::string>();
        if (j.contains("from_pulses")) c.from_pulses = j["from_pulses"].get<bool>();
        if (j.contains("eta_grid")) c.eta_grid = j["eta_grid"].get<std::string>();
    }
    if (f.p) c.p = *f.p;
    if (f.eta) c.eta_e = *f.eta;
    if (f.eta_e) c.eta_e = *f.eta_e;
    if (f.eta_d) c.eta_d = *f.eta_d;
    if (f.cutoff) c.cutoff = *f.cutoff;
    if (f.mode) c.mode = *f.mode;
    if (f.seed) c.seed = *f.seed;
    if (f.trials) c.trials = *f.trials;
    if (f.n) c.n = *f.n;
    if (f.out) c.out = *f.out;
    if (f.format) c.format = *f.format;
    if (f.from_pulses) c.from_pulses = true;
    if (f.eta_grid) c.eta_grid = *f.eta_grid;
    return c;
}

void validate(const RunConfig& c) {
    if (c.p <= 0.0 || c.p >= 1.0) throw CLI::ValidationError("--p", "p must lie in (0,1)");
    for (double eta : {c.eta_e, c.eta_d})
        if (eta < 0.0 || eta > 1.0) throw CLI::ValidationError("--eta", "eta outside [0,1]");
    if (c.cutoff < 1 || c.cutoff > 8)
        throw CLI::ValidationError("--cutoff", "cutoff outside [1,8]");
    if (c.mode != "analytic" && c.mode != "sampled")
        throw CLI::ValidationError("--mode", "mode must be analytic or sampled");
    if (c.mode == "sampled" && !c.seed)
        throw CLI::ValidationError("--seed", "sampled mode requires --seed");
    if (c.format != "csv" && c.format != "json")
        throw CLI::ValidationError("--format", "format must be csv or json");
    if (c.n < 1) throw CLI::ValidationError("--N", "N must be >= 1");
    if (c.trials < 1) throw CLI::ValidationError("--trials", "trials must be >= 1");
}

std::filesystem::path resolve_out(const std::string& out) {
    std::filesystem::path p(out);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("ENSIM_OUTPUT_DIR")) p = std::filesystem::path(dir) / p;
    }
    return p;
}

void write_file(const std::string& out, const std::string& content) {
    const auto path = resolve_out(out);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << content;
}

detect::ExecMode exec_mode(const RunConfig& c) {
    return c.mode == "sampled" ? detect::ExecMode::Sampled : detect::ExecMode::Analytic;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int cmd_eme(const RunConfig& c) {
    validate(c);
    const optics::LossModel loss{c.eta_e, c.eta_d};
    std::mt19937_64 rng(c.seed.value_or(0));
    auto layout = protocols::make_layout({"q1", "q2"}, loss.lossless() ? 0 : 4);
    const auto& q1 = layout.qubit("q1");
    const auto& q2 = layout.qubit("q2");

    protocols::EmeOptions opts;
    opts.p = c.p;
    opts.loss = loss;
    opts.mode = exec_mode(c);
    opts.cutoff = c.cutoff;

    fock::MixedState vac{fock::PureState::vacuum(layout.registry, c.cutoff)};
    const protocols::ProtocolOutcome out =
        protocols::prepare_eme(vac, q1, q2, opts, layout.loss_pool,
                               opts.mode == detect::ExecMode::Sampled ? &rng : nullptr);

    const fock::PureState ideal = protocols::ideal_eme(layout.registry, c.cutoff, q1, q2);
    double fidelity = 0.0, leakage = 0.0;
    if (out.success) {
        const fock::MixedState adjusted =
            protocols::apply_corrections_atomic(out.state, out.corrections);
        fidelity = fock::fidelity(adjusted, ideal);
        leakage = verify::eme_excess_weight(out.state.normalized(), q1, q2);
    }

    json j;
    j["command"] = "eme";
    j["p"] = c.p;
    j["eta_e"] = c.eta_e;
    j["eta_d"] = c.eta_d;
    j["cutoff"] = c.cutoff;
    j["mode"] = c.mode;
    if (c.seed) j["seed"] = *c.seed;
    j["success"] = out.success;
    j["probability"] = out.probability;
    j["fidelity_to_eme"] = fidelity;
    j["leakage_weight"] = leakage;
    for (const auto& corr : out.corrections) j["corrections"].push_back(corr.label);

    std::printf("success probability %.6f\nfidelity %.6f\nleakage weight %.3e\n",
                out.probability, fidelity, leakage);
    if (!c.out.empty()) write_file(c.out, j.dump(2) + "\n");
    return 0;
}

int cmd_ghz(const RunConfig& c) {
    validate(c);
    const optics::LossModel loss{c.eta_e, c.eta_d};
    std::mt19937_64 rng(c.seed.value_or(0));
    std::mt19937_64* rng_ptr = exec_mode(c) == detect::ExecMode::Sampled ? &rng : nullptr;

    verify::claims::ThreeClusterRun run =
        c.from_pulses
            ? verify::claims::run_three_cluster_from_pulses(c.p, loss, exec_mode(c), c.cutoff,
                                                            rng_ptr)
            : verify::claims::run_three_cluster_ideal(loss.eta(), exec_mode(c),
                                                      std::min(c.cutoff, 2), rng_ptr);

    double fidelity = 0.0;
    if (run.outcome.success) {
        std::array<const protocols::LogicalQubit*, 3> kept{};
        for (int k = 0; k < 3; ++k) kept[k] = &run.layout.qubit(run.kept_labels[k]);
        int h_clicks = 0;
        for (int d = 0; d < 3; ++d) h_clicks += run.outcome.pattern.counts[2 * d];
        const fock::PureState ref = protocols::three_cluster_reference(
            run.layout.registry, run.outcome.state.cutoff(), kept, h_clicks);
        fidelity = fock::fidelity(run.outcome.state.normalized(), ref);
    }

    std::printf("success probability %.6f\nfidelity %.6f\n", run.outcome.probability, fidelity);

    if (!c.out.empty()) {
        json j;
        j["command"] = "ghz";
        j["p"] = c.p;
        j["eta_e"] = c.eta_e;
        j["eta_d"] = c.eta_d;
        j["cutoff"] = c.cutoff;
        j["mode"] = c.mode;
        if (c.seed) j["seed"] = *c.seed;
        j["from_pulses"] = c.from_pulses;
        j["success"] = run.outcome.success;
        j["probability"] = run.outcome.probability;
        j["pattern"] = detect::to_string(run.outcome.pattern);
        j["fidelity"] = fidelity;
        write_file(c.out, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_cz(const RunConfig& c, int left, int right) {
    validate(c);
    if (left < 2 || right < 2 || left > 3 || right > 3)
        throw CLI::ValidationError("--left/--right", "line sizes must be 2 or 3");
    const optics::LossModel loss{c.eta_e, c.eta_d};
    std::mt19937_64 rng(c.seed.value_or(0));

    std::vector<std::string> labels;
    std::vector<std::string> lv, rv;
    for (int i = 0; i < left; ++i) lv.push_back("a" + std::to_string(i));
    for (int i = 0; i < right; ++i) rv.push_back("b" + std::to_string(i));
    labels.insert(labels.end(), lv.begin(), lv.end());
    labels.insert(labels.end(), rv.begin(), rv.end());
    auto layout = protocols::make_layout(labels, loss.lossless() ? 0 : 4);

    // Link qubits are the line ends facing each other.
    const auto& l1 = layout.qubit(lv.back());
    const auto& t3 = layout.qubit(lv[lv.size() - 2]);
    const auto& l2 = layout.qubit(rv.front());
    const auto& t4 = layout.qubit(rv[1]);

    fock::PureState state =
        fock::tensor_product(protocols::encode_cluster(layout, protocols::ClusterGraph::line(lv), c.cutoff),
                             protocols::encode_cluster(layout, protocols::ClusterGraph::line(rv), c.cutoff));

    protocols::CzOptions opts;
    opts.loss = loss;
    opts.mode = exec_mode(c);
    protocols::CzOutcome out =
        protocols::cz_fuse(fock::MixedState(state), l1, l2, t3, t4, opts, layout.loss_pool,
                           opts.mode == detect::ExecMode::Sampled ? &rng : nullptr);

    // Reference: the fused line.
    std::vector<std::string> merged;
    for (int i = 0; i < left - 1; ++i) merged.push_back(lv[i]);
    for (int i = 1; i < right; ++i) merged.push_back(rv[i]);
    double fidelity = 0.0;
    if (out.status == protocols::FusionStatus::Success) {
        const fock::MixedState adjusted =
            protocols::apply_corrections_atomic(out.state, out.corrections);
        fidelity = fock::fidelity(
            adjusted, protocols::encode_cluster(layout, protocols::ClusterGraph::line(merged),
                                                c.cutoff));
    }

    std::printf("success probability %.6f\nfailure probability %.6f\n"
                "indeterminate probability %.6f\nfidelity %.6f\n",
                out.p_success, out.p_failure, out.p_indeterminate, fidelity);

    if (!c.out.empty()) {
        json j;
        j["command"] = "cz";
        j["left"] = left;
        j["right"] = right;
        j["eta_e"] = c.eta_e;
        j["eta_d"] = c.eta_d;
        j["mode"] = c.mode;
        if (c.seed) j["seed"] = *c.seed;
        j["p_success"] = out.p_success;
        j["p_failure"] = out.p_failure;
        j["p_indeterminate"] = out.p_indeterminate;
        j["fidelity"] = fidelity;
        j["consumed"] = out.consumed;
        write_file(c.out, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_grow(const RunConfig& c, bool protocol_rate) {
    validate(c);
    if (!c.seed) throw CLI::ValidationError("--seed", "grow requires --seed");
    resources::GrowthOptions opts;
    opts.protocol_rate = protocol_rate;
    const double eta = c.eta_e * c.eta_d;
    const resources::GrowthStats stats =
        eta < 1.0 ? resources::simulate_growth_lossy(c.n, c.p, eta, c.trials, *c.seed, opts)
                  : resources::simulate_growth(c.n, c.p, c.trials, *c.seed, opts);

    std::printf("mean pulses %.1f (stderr %.1f), attempts/qubit %.4f\n", stats.mean_pulses,
                stats.stderr_pulses, stats.mean_attempts_per_qubit);
    if (!c.out.empty()) {
        if (c.format == "csv")
            write_file(c.out, resources::to_csv_header() + "\n" + resources::to_csv_row(stats) +
                                  "\n");
        else
            write_file(c.out, resources::to_json(stats) + "\n");
    }
    return 0;
}

int cmd_sweep_loss(const RunConfig& c) {
    double lo = 0.0, hi = 1.0, step = 0.05;
    if (std::sscanf(c.eta_grid.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0)
        throw CLI::ValidationError("--eta-grid", "expected start:stop:step");

    std::ostringstream os;
    os << "eta,r,g,margin\n";
    for (double eta = lo; eta <= hi + 1e-12; eta += step) {
        const double e = std::min(eta, 1.0);
        os << fmt(e) << ',' << fmt(verify::loss_rate(e)) << ',' << fmt(verify::gate_factor(e))
           << ',' << fmt(verify::threshold_margin(e)) << '\n';
    }
    if (!c.out.empty())
        write_file(c.out, os.str());
    else
        std::fputs(os.str().c_str(), stdout);
    return 0;
}

int cmd_verify_claims(const RunConfig& c) {
    const auto results = verify::claims::run_paper_claims(c.trials, c.seed.value_or(12345));
    std::fputs(verify::claims::format_table(results).c_str(), stdout);
    const bool ok = verify::claims::all_pass(results);
    std::printf("%s\n", ok ? "all claims PASS" : "claim verification FAILED");
    return ok ? 0 : 1;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Atomic-ensemble cluster-state protocol simulator"};
    app.require_subcommand(1);

    Flags f;
    int cz_left = 2, cz_right = 2;
    bool protocol_rate = false;

    CLI::App* eme = app.add_subcommand("eme", "heralded two-ensemble entanglement");
    add_common_flags(eme, f);
    CLI::App* ghz = app.add_subcommand("ghz", "three-cluster projection from EME pairs");
    add_common_flags(ghz, f);
    ghz->add_flag("--from-pulses", f.from_pulses,
                  "build the EME inputs from excitation pulses instead of ideal states");
    CLI::App* cz = app.add_subcommand("cz", "destructive controlled-phase fusion");
    add_common_flags(cz, f);
    cz->add_option("--left", cz_left, "left line-cluster size (2 or 3)");
    cz->add_option("--right", cz_right, "right line-cluster size (2 or 3)");
    CLI::App* grow = app.add_subcommand("grow", "Monte Carlo cluster growth cost");
    add_common_flags(grow, f);
    grow->add_flag("--protocol-rate", protocol_rate,
                   "use the protocol-derived EME round rate instead of the idealized ledger rate");
    CLI::App* sweep = app.add_subcommand("sweep-loss", "loss-rate and threshold scan");
    add_common_flags(sweep, f);
    sweep->add_option("--eta-grid", f.eta_grid, "grid as start:stop:step");
    CLI::App* claims = app.add_subcommand("verify-claims", "check the quantitative claims");
    add_common_flags(claims, f);

    try {
        app.parse(argc, argv);
        const RunConfig c = merge_config(f);
        if (eme->parsed()) return cmd_eme(c);
        if (ghz->parsed()) return cmd_ghz(c);
        if (cz->parsed()) return cmd_cz(c, cz_left, cz_right);
        if (grow->parsed()) return cmd_grow(c, protocol_rate);
        if (sweep->parsed()) return cmd_sweep_loss(c);
        if (claims->parsed()) return cmd_verify_claims(c);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

}  // namespace ensim::cli
