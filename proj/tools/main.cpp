// Command-line driver for the entanglement-assisted coding toolkit: exact
// protocol values, classical code search, trial simulation, strategy
// optimization and state tomography. Every randomized command records its
// master seed and input fingerprints in a run manifest.

#include "eacc/channel.hpp"
#include "eacc/classical_code.hpp"
#include "eacc/montecarlo.hpp"
#include "eacc/optimizer.hpp"
#include "eacc/protocol.hpp"
#include "eacc/states.hpp"
#include "eacc/tomography.hpp"
#include "eacc/util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 12345;

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write file: " + path.string());
    out << content;
}

std::string hex64(std::uint64_t value) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

// Tracks inputs, outputs and the clock for the manifest of one command.
class RunContext {
public:
    RunContext(std::string command, std::string out_dir)
        : command_(std::move(command)),
          out_dir_(std::move(out_dir)),
          start_(std::chrono::steady_clock::now()) {}

    std::string input_text(const std::string& path) {
        const std::string content = read_file(path);
        input_hashes_[path] = hex64(eacc::fnv1a64(content));
        return content;
    }

    void set_seed(std::uint64_t seed) { seed_ = seed; }

    fs::path out_path(const std::string& name) const { return fs::path(out_dir_) / name; }

    void write_output(const std::string& name, const std::string& content) {
        const fs::path path = out_path(name);
        write_file(path, content);
        outputs_.push_back(path.string());
    }

    void attach(json extra) { extra_ = std::move(extra); }

    void write_manifest() {
        json manifest;
        manifest["command"] = command_;
        manifest["version"] = kVersion;
        if (seed_) manifest["master_seed"] = *seed_;
        manifest["input_hashes"] = input_hashes_;
        manifest["outputs"] = outputs_;
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        manifest["wall_clock_seconds"] =
            std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();
        if (!extra_.is_null()) manifest["run"] = extra_;
        write_file(out_path("manifest.json"), manifest.dump(2) + "\n");
        std::printf("manifest: %s\n", out_path("manifest.json").string().c_str());
    }

private:
    std::string command_;
    std::string out_dir_;
    std::chrono::steady_clock::time_point start_;
    std::optional<std::uint64_t> seed_;
    std::map<std::string, std::string> input_hashes_;
    std::vector<std::string> outputs_;
    json extra_;
};

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("EACC_SEED")) return std::strtoull(env, nullptr, 10);
    return kDefaultSeed;
}

eacc::DensityMatrix parse_state(const std::string& spec, RunContext* ctx) {
    if (spec == "phi-plus") return eacc::phi_plus();
    if (spec == "mixed") return eacc::maximally_mixed();
    if (spec.rfind("werner:", 0) == 0) return eacc::werner(std::stod(spec.substr(7)));
    const std::string text = ctx ? ctx->input_text(spec) : read_file(spec);
    return eacc::density_matrix_from_json(text);
}

eacc::MeasurementStrategy parse_strategy(const std::string& spec, RunContext* ctx) {
    if (spec == "chsh") return eacc::chsh_strategy();
    const std::string text = ctx ? ctx->input_text(spec) : read_file(spec);
    return eacc::strategy_from_json(text);
}

eacc::FiniteChannel parse_channel(const std::string& spec, RunContext* ctx) {
    if (spec == "butterfly") return eacc::butterfly_channel();
    if (spec.rfind("identity:", 0) == 0) return eacc::identity_channel(std::stoi(spec.substr(9)));
    const std::string text = ctx ? ctx->input_text(spec) : read_file(spec);
    return eacc::channel_from_json(text);
}

eacc::NonSignalingBox parse_box(const std::string& spec, RunContext* ctx) {
    if (spec == "pr") return eacc::NonSignalingBox::pr_box();
    if (spec == "uniform") return eacc::NonSignalingBox::uniform();
    const std::string text = ctx ? ctx->input_text(spec) : read_file(spec);
    return eacc::box_from_json(text);
}

void maybe_write_json(const std::string& path, const json& payload) {
    if (path.empty()) return;
    write_file(path, payload.dump(2) + "\n");
}

struct SweepRange {
    double from = 0.0;
    double to = 1.0;
    int steps = 11;
};

SweepRange parse_range(const std::string& spec) {
    SweepRange r;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &r.from, &r.to, &r.steps) != 3 || r.steps < 1)
        throw std::invalid_argument("bad range '" + spec + "', expected from:to:steps");
    return r;
}

int run_exact(const std::string& state_spec, const std::string& strategy_spec,
              const std::string& channel_spec, const std::string& box_spec,
              const std::string& json_path) {
    const eacc::FiniteChannel ch = parse_channel(channel_spec, nullptr);
    double value = 0.0;
    if (!box_spec.empty()) {
        value = eacc::box_success(parse_box(box_spec, nullptr), ch);
        std::printf("box success probability: %.6f\n", value);
    } else {
        const eacc::DensityMatrix rho = parse_state(state_spec, nullptr);
        const eacc::MeasurementStrategy strat = parse_strategy(strategy_spec, nullptr);
        value = eacc::exact_success(rho, strat, ch);
        std::printf("exact success probability: %.6f\n", value);
        const eacc::RelationStats stats = eacc::correlation_omega(rho, strat);
        std::printf("relation holds with probability: %.6f (min over settings %.6f)\n",
                    stats.mean(), stats.min());
    }
    json payload;
    payload["success"] = value;
    maybe_write_json(json_path, payload);
    return 0;
}

int run_classical_opt(const std::string& channel_spec, int messages, const std::string& json_path) {
    const eacc::FiniteChannel ch = parse_channel(channel_spec, nullptr);
    const eacc::BestCode best = eacc::best_deterministic_code(ch, messages);
    if (best.exact)
        std::printf("best deterministic code (M=%d): success = %s = %.6f\n", messages,
                    best.exact->str().c_str(), best.success);
    else
        std::printf("best deterministic code (M=%d): success = %.6f\n", messages, best.success);
    for (int q = 0; q < messages; ++q)
        std::printf("  message %d -> input %s\n", q,
                    ch.input_labels()[static_cast<std::size_t>(
                                          best.code.encoding[static_cast<std::size_t>(q)])]
                        .c_str());
    for (int y = 0; y < ch.num_outputs(); ++y)
        std::printf("  output %s -> message %d\n",
                    ch.output_labels()[static_cast<std::size_t>(y)].c_str(),
                    best.code.decoding[static_cast<std::size_t>(y)]);
    json payload;
    payload["success"] = best.success;
    if (best.exact) payload["exact"] = best.exact->str();
    payload["code"] = json::parse(eacc::code_to_json(best.code));
    maybe_write_json(json_path, payload);
    return 0;
}

int run_simulate(const std::string& state_spec, const std::string& strategy_spec,
                 const std::string& channel_spec, const std::string& box_spec, long long n,
                 std::optional<std::uint64_t> seed_flag, const std::string& backend_name,
                 const std::string& out_dir) {
    RunContext ctx("simulate", out_dir);
    const std::uint64_t seed = resolve_seed(seed_flag);
    ctx.set_seed(seed);
    const eacc::FiniteChannel ch = parse_channel(channel_spec, &ctx);
    const eacc::RunOptions options{
        backend_name == "physical" ? eacc::Backend::Physical : eacc::Backend::Direct, 0};

    eacc::CountsTable counts;
    const eacc::MeasurementStrategy strat = parse_strategy(strategy_spec, &ctx);
    if (!box_spec.empty()) {
        counts = eacc::run_trials(parse_box(box_spec, &ctx), ch, n, seed, options);
    } else {
        counts = eacc::run_trials(parse_state(state_spec, &ctx), strat, ch, n, seed, options);
    }

    const eacc::SuccessEstimate est = eacc::estimate_success(counts);
    std::printf("trials: %lld  successes: %lld\n", counts.total(), counts.successes());
    std::printf("estimated success probability: %.6f +- %.6f\n", est.p_hat, est.sigma);

    ctx.write_output("counts.csv", eacc::counts_to_csv(counts));
    ctx.attach(json::parse(eacc::run_metadata_json(seed, n, options.backend, strat)));
    ctx.write_manifest();
    return 0;
}

int run_sweep(const std::string& range_spec, long long n, std::optional<std::uint64_t> seed_flag,
              const std::string& out_dir) {
    RunContext ctx("sweep", out_dir);
    const std::uint64_t seed = resolve_seed(seed_flag);
    ctx.set_seed(seed);
    const SweepRange range = parse_range(range_spec);
    const eacc::FiniteChannel ch = eacc::butterfly_channel();
    const eacc::MeasurementStrategy strat = eacc::chsh_strategy();

    std::ostringstream csv;
    csv << "p,exact,simulated\n";
    char line[96];
    for (int i = 0; i < range.steps; ++i) {
        const double p = range.steps == 1
                             ? range.from
                             : range.from + (range.to - range.from) * i / (range.steps - 1);
        const eacc::DensityMatrix rho = eacc::werner(p);
        const double exact = eacc::exact_success(rho, strat, ch);
        const eacc::CountsTable counts =
            eacc::run_trials(rho, strat, ch, n, eacc::derive_stream_seed(seed, i));
        const double simulated = eacc::estimate_success(counts).p_hat;
        std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f\n", p, exact, simulated);
        csv << line;
        std::printf("p = %.6f  exact = %.6f  simulated = %.6f\n", p, exact, simulated);
    }
    ctx.write_output("sweep.csv", csv.str());
    json run;
    run["n_per_point"] = n;
    run["range"] = range_spec;
    ctx.attach(run);
    ctx.write_manifest();
    return 0;
}

int run_seesaw(const std::string& state_spec, const std::string& channel_spec, int starts,
               int sweeps, double tolerance, std::optional<std::uint64_t> seed_flag,
               const std::string& out_dir) {
    RunContext ctx("seesaw", out_dir);
    const std::uint64_t seed = resolve_seed(seed_flag);
    ctx.set_seed(seed);
    const eacc::DensityMatrix rho = parse_state(state_spec, &ctx);
    const eacc::FiniteChannel ch = parse_channel(channel_spec, &ctx);

    json runs = json::array();
    std::optional<eacc::SeesawResult> best;
    for (int i = 0; i < starts; ++i) {
        eacc::SeesawConfig cfg;
        cfg.max_sweeps = sweeps;
        cfg.tol = tolerance;
        cfg.seed = eacc::derive_stream_seed(seed, static_cast<std::uint64_t>(i));
        const eacc::SeesawResult res = eacc::seesaw(rho, ch, cfg);
        json entry;
        entry["start"] = i;
        entry["seed"] = cfg.seed;
        entry["final_objective"] = res.final_objective;
        entry["iterations"] = res.sweeps;
        runs.push_back(entry);
        std::printf("start %d: objective %.6f after %d sweeps\n", i, res.final_objective,
                    res.sweeps);
        if (!best || res.final_objective > best->final_objective) best = res;
    }
    std::printf("best objective: %.6f\n", best->final_objective);

    json payload = json::parse(eacc::seesaw_result_to_json(*best));
    payload["starts"] = runs;
    ctx.write_output("seesaw.json", payload.dump(2) + "\n");
    ctx.write_manifest();
    return 0;
}

int run_tomo_simulate(const std::string& state_spec, double scale,
                      std::optional<std::uint64_t> seed_flag, const std::string& out_dir) {
    RunContext ctx("tomo simulate", out_dir);
    const std::uint64_t seed = resolve_seed(seed_flag);
    ctx.set_seed(seed);
    const eacc::DensityMatrix rho = parse_state(state_spec, &ctx);
    const auto settings = eacc::canonical_tomo_settings();
    const eacc::TomoCounts counts = eacc::simulate_counts(rho, settings, scale, seed);
    std::printf("simulated %lld coincidences over %zu settings\n", counts.total(),
                settings.size());
    ctx.write_output("tomo_counts.csv", eacc::tomo_counts_to_csv(counts, settings));
    json run;
    run["n_scale"] = scale;
    run["state"] = state_spec;
    ctx.attach(run);
    ctx.write_manifest();
    return 0;
}

int run_tomo_reconstruct(const std::string& counts_path, const std::string& target_spec,
                         int bootstrap_runs, std::optional<std::uint64_t> seed_flag,
                         const std::string& out_dir) {
    RunContext ctx("tomo reconstruct", out_dir);
    const auto settings = eacc::canonical_tomo_settings();
    const eacc::TomoCounts counts =
        eacc::tomo_counts_from_csv(ctx.input_text(counts_path), settings);
    const eacc::DensityMatrix rho = eacc::mle_reconstruct(counts, settings);
    const eacc::DensityMatrix target = parse_state(target_spec, &ctx);

    const double f = eacc::fidelity(rho, target);
    const double t = eacc::tangle(rho);
    const double p = eacc::purity(rho);
    std::printf("fidelity vs %s: %.6f\n", target_spec.c_str(), f);
    std::printf("tangle: %.6f\n", t);
    std::printf("purity: %.6f\n", p);

    json report;
    report["matrix"] = json::parse(eacc::density_matrix_to_json(rho));
    report["metrics"] = {{"fidelity", f}, {"tangle", t}, {"purity", p}};
    report["target"] = target_spec;
    if (bootstrap_runs > 0) {
        const std::uint64_t seed = resolve_seed(seed_flag);
        ctx.set_seed(seed);
        const eacc::BootstrapResult bs =
            eacc::bootstrap_errors(counts, settings, bootstrap_runs, seed);
        // error bars follow the bootstrap convention: fidelity against phi-plus
        report["errors"] = {{"runs", bs.runs},
                            {"fidelity", {{"mean", bs.fidelity_mean}, {"std", bs.fidelity_std}}},
                            {"tangle", {{"mean", bs.tangle_mean}, {"std", bs.tangle_std}}},
                            {"fidelity_target", "phi-plus"}};
        std::printf("bootstrap (%d runs): fidelity %.6f +- %.6f, tangle %.6f +- %.6f\n", bs.runs,
                    bs.fidelity_mean, bs.fidelity_std, bs.tangle_mean, bs.tangle_std);
    }
    ctx.write_output("reconstruction.json", report.dump(2) + "\n");
    if (bootstrap_runs > 0) ctx.write_manifest();
    return 0;
}

int run_tomo_bootstrap(const std::string& counts_path, int runs,
                       std::optional<std::uint64_t> seed_flag, const std::string& out_dir) {
    RunContext ctx("tomo bootstrap", out_dir);
    const std::uint64_t seed = resolve_seed(seed_flag);
    ctx.set_seed(seed);
    const auto settings = eacc::canonical_tomo_settings();
    const eacc::TomoCounts counts =
        eacc::tomo_counts_from_csv(ctx.input_text(counts_path), settings);
    const eacc::BootstrapResult res = eacc::bootstrap_errors(counts, settings, runs, seed);
    std::printf("fidelity: %.6f +- %.6f\n", res.fidelity_mean, res.fidelity_std);
    std::printf("tangle:   %.6f +- %.6f\n", res.tangle_mean, res.tangle_std);

    json payload;
    payload["runs"] = res.runs;
    payload["fidelity"] = {{"mean", res.fidelity_mean}, {"std", res.fidelity_std}};
    payload["tangle"] = {{"mean", res.tangle_mean}, {"std", res.tangle_std}};
    ctx.write_output("bootstrap.json", payload.dump(2) + "\n");
    ctx.attach(json{{"runs", runs}});
    ctx.write_manifest();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entanglement-assisted classical coding toolkit"};
    app.set_version_flag("--version", std::string("eacc ") + kVersion);
    app.require_subcommand(1);

    std::string state_spec = "phi-plus";
    std::string strategy_spec = "chsh";
    std::string channel_spec = "butterfly";
    std::string box_spec;
    std::string json_path;
    std::string out_dir = "out";
    std::string backend_name = "direct";
    std::string range_spec = "0:1:11";
    std::string counts_path;
    std::string target_spec = "phi-plus";
    long long n = 1000000;
    int messages = 2;
    int starts = 10;
    int sweeps = 200;
    int bootstrap_runs = 200;
    double tolerance = 1e-10;
    double scale = 10000.0;
    std::optional<std::uint64_t> seed_flag;

    auto* exact = app.add_subcommand("exact", "exact protocol success probability");
    exact->add_option("--state", state_spec, "phi-plus | werner:p | mixed | file.json");
    exact->add_option("--strategy", strategy_spec, "chsh | file.json");
    exact->add_option("--channel", channel_spec, "butterfly | identity:n | file.json");
    exact->add_option("--box", box_spec, "pr | uniform | file.json (replaces the state)");
    exact->add_option("--json", json_path, "write the result as JSON");

    auto* copt = app.add_subcommand("classical-opt", "best unassisted deterministic code");
    copt->add_option("--channel", channel_spec, "butterfly | identity:n | file.json");
    copt->add_option("--messages,-M", messages, "number of messages")->check(CLI::PositiveNumber);
    copt->add_option("--json", json_path, "write the result as JSON");

    auto* sim = app.add_subcommand("simulate", "trial-by-trial protocol simulation");
    sim->add_option("--n", n, "number of trials")->check(CLI::PositiveNumber);
    sim->add_option("--seed", seed_flag, "master seed (default: EACC_SEED or 12345)");
    sim->add_option("--backend", backend_name, "direct | physical")
        ->check(CLI::IsMember({"direct", "physical"}));
    sim->add_option("--state", state_spec, "phi-plus | werner:p | mixed | file.json");
    sim->add_option("--strategy", strategy_spec, "chsh | file.json");
    sim->add_option("--channel", channel_spec, "butterfly | file.json");
    sim->add_option("--box", box_spec, "pr | uniform | file.json (replaces the state)");
    sim->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "success vs werner parameter");
    sweep->add_option("--werner", range_spec, "from:to:steps");
    sweep->add_option("--n", n, "trials per grid point")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed_flag, "master seed");
    sweep->add_option("--out", out_dir, "output directory");

    auto* ssw = app.add_subcommand("seesaw", "alternating measurement optimization");
    ssw->add_option("--seeds", starts, "number of random starts")->check(CLI::PositiveNumber);
    ssw->add_option("--sweeps", sweeps, "maximum sweeps per start")->check(CLI::PositiveNumber);
    ssw->add_option("--tol", tolerance, "stopping improvement threshold");
    ssw->add_option("--seed", seed_flag, "master seed");
    ssw->add_option("--state", state_spec, "phi-plus | werner:p | mixed | file.json");
    ssw->add_option("--channel", channel_spec, "butterfly | file.json");
    ssw->add_option("--out", out_dir, "output directory");

    auto* tomo = app.add_subcommand("tomo", "two-qubit state tomography");
    tomo->require_subcommand(1);
    auto* tsim = tomo->add_subcommand("simulate", "simulate coincidence counts");
    tsim->add_option("--state", state_spec, "phi-plus | werner:p | mixed | file.json");
    tsim->add_option("--scale", scale, "expected counts per unit probability")
        ->check(CLI::PositiveNumber);
    tsim->add_option("--seed", seed_flag, "master seed");
    tsim->add_option("--out", out_dir, "output directory");

    auto* trec = tomo->add_subcommand("reconstruct", "maximum-likelihood reconstruction");
    trec->add_option("counts", counts_path, "counts CSV in canonical order")->required();
    trec->add_option("--target", target_spec, "fidelity target: phi-plus | werner:p | file.json");
    int reconstruct_bootstrap = 0;
    trec->add_option("--bootstrap", reconstruct_bootstrap,
                     "also compute error bars from this many resampled runs");
    trec->add_option("--seed", seed_flag, "master seed for --bootstrap");
    trec->add_option("--out", out_dir, "output directory");

    auto* tboot = tomo->add_subcommand("bootstrap", "error bars from resampled counts");
    tboot->add_option("counts", counts_path, "counts CSV in canonical order")->required();
    tboot->add_option("--runs", bootstrap_runs, "resampling runs")->check(CLI::PositiveNumber);
    tboot->add_option("--seed", seed_flag, "master seed");
    tboot->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (exact->parsed())
            return run_exact(state_spec, strategy_spec, channel_spec, box_spec, json_path);
        if (copt->parsed()) return run_classical_opt(channel_spec, messages, json_path);
        if (sim->parsed())
            return run_simulate(state_spec, strategy_spec, channel_spec, box_spec, n, seed_flag,
                                backend_name, out_dir);
        if (sweep->parsed()) return run_sweep(range_spec, n, seed_flag, out_dir);
        if (ssw->parsed())
            return run_seesaw(state_spec, channel_spec, starts, sweeps, tolerance, seed_flag,
                              out_dir);
        if (tsim->parsed()) return run_tomo_simulate(state_spec, scale, seed_flag, out_dir);
        if (trec->parsed())
            return run_tomo_reconstruct(counts_path, target_spec, reconstruct_bootstrap,
                                        seed_flag, out_dir);
        if (tboot->parsed()) return run_tomo_bootstrap(counts_path, bootstrap_runs, seed_flag, out_dir);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::length_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return 0;
}
