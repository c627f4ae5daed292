// wdl: weakly dependent learning toolkit
//
// Subcommands: simulate, train, bounds, depcheck, experiment, recession.
// Every run writes its outputs under --out-dir together with a manifest.txt
// echoing the fully resolved configuration; re-running with
// `--config manifest.txt` reproduces the run byte for byte.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wdl/bounds.hpp"
#include "wdl/csv.hpp"
#include "wdl/erm.hpp"
#include "wdl/experiments.hpp"
#include "wdl/neuralnet.hpp"
#include "wdl/process_sim.hpp"
#include "wdl/recession.hpp"
#include "wdl/rng.hpp"
#include "wdl/weak_dependence.hpp"

namespace {

constexpr const char* kArtifactVersion = "wdl 0.1.0";

namespace fs = std::filesystem;

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

bool is_flag_option(const CLI::Option* opt) { return opt->get_expected_min() == 0; }

// Manifest: one key=value line per option of the subcommand, resolved values.
// The file parses back through --config, so a run is reproducible from its
// manifest alone.
void write_manifest(CLI::App* sub, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::ofstream out(join_path(out_dir, "manifest.txt"), std::ios::binary);
    out << "# manifest v1 (" << kArtifactVersion << ")\n";
    out << "# subcommand: " << sub->get_name() << "\n";
    out << "# rng: " << wdl::Rng::kAlgorithm << "\n";
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames()[0];
        if (name.empty() || name == "help" || name == "config") continue;
        std::string value;
        if (is_flag_option(opt)) {
            value = opt->count() > 0 ? "true" : "false";
        } else if (opt->count() > 0) {
            value = opt->results().back();
        } else {
            value = opt->get_default_str();
        }
        out << name << "=" << value << "\n";
    }
}

// key=value config file merged under the command line (explicit flags win).
// Implemented as argv injection before the CLI11 parse.
std::vector<std::string> merge_config_args(const std::vector<std::string>& args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw CLI::ValidationError("--config", "cannot read " + config_path);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
        };
        trim(key);
        trim(value);
        if (!key.empty()) pairs.emplace_back(key, value);
    }

    std::vector<std::string> merged = args;
    auto given = [&](const std::string& flag) {
        for (const std::string& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    for (const auto& [key, value] : pairs) {
        const std::string flag = "--" + key;
        if (given(flag)) continue;  // command line wins
        if (value == "true") {
            merged.push_back(flag);
        } else if (value == "false") {
            // absent flag
        } else {
            merged.push_back(flag);
            merged.push_back(value);
        }
    }
    return merged;
}

std::vector<std::size_t> parse_size_list(const std::string& csv) {
    std::vector<std::size_t> out;
    for (const std::string& cell : wdl::split_csv_line(csv))
        if (!cell.empty()) out.push_back(std::stoul(cell));
    return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    for (const std::string& cell : wdl::split_csv_line(csv))
        if (!cell.empty()) out.push_back(std::stod(cell));
    return out;
}

wdl::Architecture make_arch(std::size_t input_dim, const std::string& hidden_csv) {
    return wdl::Architecture::mlp(input_dim, parse_size_list(hidden_csv),
                                  wdl::Activation::ReLU, wdl::OutputActivation::Tanh);
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    std::string model = "dgp1";
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    std::size_t burn_in = 500;
    std::string coeffs;
    std::string f_coeffs = "0";  // lag-free mean, valid for both AC-X kinds
    std::string m_coeffs = "1";
    double innovation_std = 1.0;
    std::string out_dir = "out";
};

int run_simulate(const SimulateOpts& o, CLI::App* sub) {
    fs::create_directories(o.out_dir);
    wdl::Trajectory traj;
    if (o.model == "dgp1" || o.model == "dgp2" || o.model == "custom") {
        wdl::BinaryDgpSpec spec =
            o.model == "dgp1"   ? wdl::BinaryDgpSpec::dgp1()
            : o.model == "dgp2" ? wdl::BinaryDgpSpec::dgp2()
                                : wdl::BinaryDgpSpec::custom_affine(parse_double_list(o.coeffs));
        traj = wdl::simulate_binary(spec, o.n, o.seed, o.burn_in);
    } else if (o.model == "arx1" || o.model == "arch1x") {
        wdl::AcxSpec spec;
        spec.model_kind = o.model == "arx1" ? wdl::AcxKind::ARX1 : wdl::AcxKind::ARCH1X;
        spec.f_coefficients = parse_double_list(o.f_coeffs);
        spec.m_coefficients = parse_double_list(o.m_coeffs);
        spec.innovation_std = o.innovation_std;
        traj = wdl::simulate_acx(spec, o.n, o.seed, o.burn_in);
    } else {
        throw CLI::ValidationError("--dgp", "unknown process kind " + o.model);
    }
    traj.export_csv(join_path(o.out_dir, "trajectory.csv"));
    write_manifest(sub, o.out_dir);

    double mean = 0.0;
    for (double y : traj.labels) mean += y;
    mean /= static_cast<double>(traj.size());
    std::cout << "simulated " << traj.size() << " observations (" << o.model << ", seed "
              << o.seed << ")\n"
              << "label mean " << mean << "\n"
              << "wrote " << join_path(o.out_dir, "trajectory.csv") << "\n";
    return 0;
}

// ------------------------------------------------------------------- train

struct TrainOpts {
    std::string dgp = "dgp1";
    std::size_t n = 2000;
    std::uint64_t seed = 0;
    std::size_t burn_in = 500;
    std::string hidden = "16,16";
    double lr = 1e-3;
    std::size_t batch = 32;
    std::size_t patience = 30;
    std::size_t max_epochs = 1000;
    std::string out_dir = "out";
};

int run_train(const TrainOpts& o, CLI::App* sub) {
    fs::create_directories(o.out_dir);
    const wdl::BinaryDgpSpec spec =
        o.dgp == "dgp1" ? wdl::BinaryDgpSpec::dgp1() : wdl::BinaryDgpSpec::dgp2();
    const wdl::Trajectory train_traj = wdl::simulate_binary(
        spec, o.n + spec.lag_order, wdl::derive_seed(o.seed, {1}), o.burn_in);
    const wdl::Dataset train_ds = wdl::make_supervised_for(spec, train_traj);
    const wdl::Trajectory test_traj = wdl::simulate_binary(
        spec, o.n + spec.lag_order, wdl::derive_seed(o.seed, {2}), o.burn_in);
    const wdl::Dataset test_ds = wdl::make_supervised_for(spec, test_traj);

    const wdl::Architecture arch = make_arch(train_ds.dim, o.hidden);
    wdl::TrainConfig cfg;
    cfg.learning_rate = o.lr;
    cfg.batch_size = o.batch;
    cfg.patience_epochs = o.patience;
    cfg.max_epochs = o.max_epochs;
    cfg.seed = o.seed;
    const wdl::TrainResult result = wdl::train_erm(train_ds, arch, cfg);

    wdl::export_training_log_csv(result.log, join_path(o.out_dir, "train_log.csv"));
    wdl::save_params_csv(result.params, join_path(o.out_dir, "params.csv"));
    const wdl::EvalReport train_rep = wdl::empirical_01_risk(arch, result.params, train_ds);
    const wdl::EvalReport test_rep = wdl::empirical_01_risk(arch, result.params, test_ds);
    train_rep.export_csv(join_path(o.out_dir, "eval_train.csv"));
    test_rep.export_csv(join_path(o.out_dir, "eval_test.csv"));
    write_manifest(sub, o.out_dir);

    std::cout << "trained on " << train_ds.size() << " pairs (" << o.dgp << "), best epoch "
              << result.best_epoch << (result.stopped_early ? " (early stop)" : "") << "\n"
              << "train:\n"
              << train_rep.pretty() << "test (independent trajectory):\n"
              << test_rep.pretty();
    return 0;
}

// ------------------------------------------------------------------ bounds

struct BoundsOpts {
    wdl::BoundInputs in;
    std::string psi = "theta";
    double depth = 2, width = 16, B = 1, F = 1, S = 100;
    bool log_n_variant = false;
    std::string estimate_c_dgp;
    std::string out_dir = "out";
};

int run_bounds(BoundsOpts& o, CLI::App* sub) {
    fs::create_directories(o.out_dir);
    o.in.psi_kind = o.psi == "theta"   ? wdl::PsiKind::Theta
                    : o.psi == "eta"   ? wdl::PsiKind::Eta
                    : o.psi == "kappa" ? wdl::PsiKind::Kappa
                                       : wdl::PsiKind::Lambda;
    o.in.complexity.depth_bound = o.depth;
    o.in.complexity.width_bound = o.width;
    o.in.complexity.theta_sup_bound = o.B;
    o.in.complexity.output_sup_bound = o.F;
    o.in.complexity.sparsity_level = o.S;
    if (!o.estimate_c_dgp.empty()) {
        const wdl::BinaryDgpSpec spec = o.estimate_c_dgp == "dgp2"
                                            ? wdl::BinaryDgpSpec::dgp2()
                                            : wdl::BinaryDgpSpec::dgp1();
        o.in.C = wdl::estimate_variance_proxy(spec, 1000, 50, 1);
        std::cout << "estimated variance proxy C = " << o.in.C << " from " << o.estimate_c_dgp
                  << "\n";
    }
    wdl::BoundReport rep = wdl::compute_bound_report(o.in);
    if (o.log_n_variant) rep.regime2 = wdl::second_regime_eps2(o.in, true);
    rep.export_csv(join_path(o.out_dir, "bounds.csv"));
    write_manifest(sub, o.out_dir);
    std::cout << rep.pretty() << "wrote " << join_path(o.out_dir, "bounds.csv") << "\n";
    return 0;
}

// ---------------------------------------------------------------- depcheck

struct DepcheckOpts {
    std::string kind = "geometric";
    double c = 0.3;
    double a = 0.5;
    double gamma = 2.0;
    std::size_t j_max = 200;
    std::size_t k_max = 8;
    double mu = 2.0;
    double L1 = 0.0;  // 0 means "fit"
    double L2 = 0.0;
    std::string out_dir = "out";
};

int run_depcheck(const DepcheckOpts& o, CLI::App* sub) {
    fs::create_directories(o.out_dir);
    const wdl::CoefficientSequence seq =
        o.kind == "geometric" ? wdl::CoefficientSequence::geometric(o.c, o.a)
                              : wdl::CoefficientSequence::riemannian(o.c, o.gamma);
    const auto total = seq.total_sum();
    std::cout << "alpha total " << total.value << " (certificate " << total.certificate
              << "), contracting: " << (seq.contracting() ? "yes" : "no") << "\n";

    {
        wdl::CsvWriter w(join_path(o.out_dir, "tau_table.csv"));
        w.row({"j", "tau_bound", "argmin_iota"});
        if (seq.contracting()) {
            for (std::size_t j = 1; j <= o.j_max; ++j) {
                const wdl::TauBound tb = wdl::tau_bound(seq, j);
                w.row({std::to_string(j), wdl::format_double(tb.value),
                       std::to_string(tb.argmin_iota)});
            }
        }
    }

    std::optional<wdl::EpsSequence> eps;
    double L1 = o.L1, L2 = o.L2;
    if (seq.contracting() && o.kind == "geometric" && o.a > 0.0) {
        const wdl::GeometricRateEnvelope env = wdl::geometric_case_rate(seq, o.j_max);
        eps = env.as_eps_sequence();
        if (L1 <= 0.0 || L2 <= 0.0) {
            const wdl::MomentFit fit =
                wdl::fit_moment_constants(*eps, o.mu, o.k_max, 2 * o.j_max);
            L1 = 1.1 * fit.L1;
            L2 = 1.1 * fit.L2;
            std::cout << "fitted constants (x1.1): L1 = " << L1 << ", L2 = " << L2 << "\n";
        }
    } else if (seq.contracting() && L1 > 0.0 && L2 > 0.0) {
        // no closed tail certificate for this decay; partial sums can still
        // refute, otherwise the verdict stays inconclusive
        eps = wdl::EpsSequence::plain(
            [seq](std::size_t j) { return j == 0 ? 1.0 : wdl::tau_bound(seq, j).value; });
    }
    if (eps) {
        const auto reports =
            wdl::check_factorial_moment(*eps, L1, L2, o.mu, o.k_max, 2 * o.j_max);
        wdl::CsvWriter w(join_path(o.out_dir, "moment_check.csv"));
        w.row({"k", "partial_sum", "tail_certificate", "bound", "verdict"});
        for (const auto& rep : reports) {
            const char* verdict = rep.verdict == wdl::MomentVerdict::Holds   ? "holds"
                                  : rep.verdict == wdl::MomentVerdict::Fails ? "fails"
                                                                             : "inconclusive";
            w.row({std::to_string(rep.k), wdl::format_double(rep.partial_sum),
                   wdl::format_double(rep.tail_certificate), wdl::format_double(rep.bound),
                   verdict});
            std::cout << "k = " << rep.k << ": " << verdict << " (sum " << rep.partial_sum
                      << " + tail " << rep.tail_certificate << " vs bound " << rep.bound
                      << ")\n";
        }
    }
    write_manifest(sub, o.out_dir);
    std::cout << "wrote " << join_path(o.out_dir, "tau_table.csv") << "\n";
    return 0;
}

// -------------------------------------------------------------- experiment

struct ExperimentOpts {
    std::string profile = "desk";
    std::string dgp = "dgp1";
    std::string n_grid;
    std::size_t replications = 0;
    std::size_t target_m = 0;
    std::uint64_t master_seed = 0;
    int jobs = 0;
    std::string out_dir = "out";
};

int run_experiment(const ExperimentOpts& o, CLI::App* sub) {
    fs::create_directories(o.out_dir);
    wdl::ExperimentPlan plan = o.profile == "paper"
                                   ? wdl::ExperimentPlan::paper_profile(o.master_seed)
                                   : wdl::ExperimentPlan::desk_profile(o.master_seed);
    if (o.dgp == "dgp2") {
        plan.dgp = wdl::BinaryDgpSpec::dgp2();
        plan.arch = wdl::Architecture::mlp(3, {16, 16}, wdl::Activation::ReLU,
                                           wdl::OutputActivation::Tanh);
    }
    if (!o.n_grid.empty()) plan.n_grid = parse_size_list(o.n_grid);
    if (o.replications > 0) plan.replications = o.replications;
    if (o.target_m > 0) plan.target_m = o.target_m;

    const wdl::GapCurve curve = wdl::run_gap_curve(plan, o.jobs);
    curve.export_csv(join_path(o.out_dir, "gap_curve.csv"));
    write_manifest(sub, o.out_dir);

    std::cout << "target risk " << curve.target_risk << ", bayes risk " << curve.bayes_risk
              << "\n";
    for (const auto& row : curve.rows)
        std::cout << "n = " << row.n << ": gap to target " << row.gap_target_mean << " (se "
                  << row.gap_target_se << "), gap to bayes " << row.gap_bayes_mean
                  << ", failed " << row.failed << "\n";
    std::cout << "wrote " << join_path(o.out_dir, "gap_curve.csv") << "\n";
    return 0;
}

// --------------------------------------------------------------- recession

struct RecessionOpts {
    std::string data = "data/usrecq_1933_2022.csv";
    std::uint64_t seed = 0;
    std::string hidden = "16,16";
    std::string out_dir = "out";
};

int run_recession(const RecessionOpts& o, CLI::App* sub) {
    fs::create_directories(o.out_dir);
    const wdl::QuarterlySeries series = wdl::load_usrecq(o.data);
    const wdl::Architecture arch = make_arch(1, o.hidden);
    wdl::TrainConfig cfg;
    cfg.seed = o.seed;
    const wdl::RecessionResult result = wdl::run_recession_pipeline(series, arch, cfg);
    wdl::export_recession_report_csv(result, join_path(o.out_dir, "recession_report.csv"));
    wdl::export_training_log_csv(result.training.log, join_path(o.out_dir, "train_log.csv"));
    write_manifest(sub, o.out_dir);

    std::cout << "loaded " << series.size() << " quarters (" << series.dates.front() << " .. "
              << series.dates.back() << ")\n"
              << "MLE fit: alpha0 = " << result.fit.alpha0
              << ", alpha1 = " << result.fit.alpha1
              << (result.fit.converged ? "" : "  [" + result.fit.boundary_note + "]") << "\n"
              << "train pairs " << result.train_pairs << ", test pairs " << result.test_pairs
              << "\n"
              << "test report:\n"
              << result.test_report.pretty()
              << "wrote " << join_path(o.out_dir, "recession_report.csv") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weakly dependent learning toolkit"};
    app.require_subcommand(1);

    SimulateOpts sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "generate a stationary trajectory");
    std::string sim_config;
    sim_cmd->add_option("--config", sim_config, "key=value config file (flags win)");
    sim_cmd->add_option("--dgp", sim.model, "dgp1|dgp2|custom|arx1|arch1x")
        ->capture_default_str();
    sim_cmd->add_option("--n", sim.n, "observations after burn-in")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "rng seed")->capture_default_str();
    sim_cmd->add_option("--burn-in", sim.burn_in, "discarded warmup steps")
        ->capture_default_str();
    sim_cmd->add_option("--coeffs", sim.coeffs, "custom link coefficients c0,c1,...");
    sim_cmd->add_option("--f-coeffs", sim.f_coeffs, "AC-X mean lag polynomial")
        ->capture_default_str();
    sim_cmd->add_option("--m-coeffs", sim.m_coeffs, "AC-X volatility lag polynomial")
        ->capture_default_str();
    sim_cmd->add_option("--innovation-std", sim.innovation_std, "AC-X innovation scale")
        ->capture_default_str();
    sim_cmd->add_option("--out-dir", sim.out_dir, "output directory")->capture_default_str();

    TrainOpts tr;
    CLI::App* tr_cmd = app.add_subcommand("train", "train the network on a simulated sample");
    std::string tr_config;
    tr_cmd->add_option("--config", tr_config, "key=value config file (flags win)");
    tr_cmd->add_option("--dgp", tr.dgp, "dgp1|dgp2")->capture_default_str();
    tr_cmd->add_option("--n", tr.n, "training pairs")->capture_default_str();
    tr_cmd->add_option("--seed", tr.seed, "rng seed")->capture_default_str();
    tr_cmd->add_option("--burn-in", tr.burn_in, "simulator warmup")->capture_default_str();
    tr_cmd->add_option("--hidden", tr.hidden, "hidden widths, e.g. 16,16")
        ->capture_default_str();
    tr_cmd->add_option("--lr", tr.lr, "Adam learning rate")->capture_default_str();
    tr_cmd->add_option("--batch", tr.batch, "minibatch size")->capture_default_str();
    tr_cmd->add_option("--patience", tr.patience, "early-stop patience epochs")
        ->capture_default_str();
    tr_cmd->add_option("--max-epochs", tr.max_epochs, "epoch cap")->capture_default_str();
    tr_cmd->add_option("--out-dir", tr.out_dir, "output directory")->capture_default_str();

    BoundsOpts bo;
    bo.in.n = 100000;
    CLI::App* bo_cmd = app.add_subcommand("bounds", "evaluate generalization-bound constants");
    std::string bo_config;
    bo_cmd->add_option("--config", bo_config, "key=value config file (flags win)");
    bo_cmd->add_option("--M", bo.in.M, "loss sup bound")->capture_default_str();
    bo_cmd->add_option("--G", bo.in.G, "loss Lipschitz factor")->capture_default_str();
    bo_cmd->add_option("--C-sigma", bo.in.C_sigma, "activation Lipschitz constant")
        ->capture_default_str();
    bo_cmd->add_option("--L1", bo.in.L1, "dependence constant L1")->capture_default_str();
    bo_cmd->add_option("--L2", bo.in.L2, "dependence constant L2")->capture_default_str();
    bo_cmd->add_option("--mu", bo.in.mu, "dependence growth mu")->capture_default_str();
    bo_cmd->add_option("--psi", bo.psi, "theta|eta|kappa|lambda")->capture_default_str();
    bo_cmd->add_option("--C", bo.in.C, "variance proxy")->capture_default_str();
    bo_cmd->add_option("--C3", bo.in.C3, "second-regime prefactor")->capture_default_str();
    bo_cmd->add_option("--nu", bo.in.nu, "second-regime exponent in (0,1)")
        ->capture_default_str();
    bo_cmd->add_option("--eta", bo.in.eta, "confidence level in (0,1)")->capture_default_str();
    bo_cmd->add_option("--alpha", bo.in.alpha, "rate parameter > 2")->capture_default_str();
    bo_cmd->add_option("--n", bo.in.n, "sample size")->capture_default_str();
    bo_cmd->add_option("--depth", bo.depth, "class depth bound L")->capture_default_str();
    bo_cmd->add_option("--width", bo.width, "class width bound N")->capture_default_str();
    bo_cmd->add_option("--B", bo.B, "parameter sup bound")->capture_default_str();
    bo_cmd->add_option("--F", bo.F, "output sup bound")->capture_default_str();
    bo_cmd->add_option("--S", bo.S, "sparsity level")->capture_default_str();
    bo_cmd->add_flag("--log-n-variant", bo.log_n_variant,
                     "use log n instead of log log n in the second-regime root equation");
    bo_cmd->add_option("--estimate-C", bo.estimate_c_dgp,
                       "estimate the variance proxy from dgp1|dgp2 simulation");
    bo_cmd->add_option("--out-dir", bo.out_dir, "output directory")->capture_default_str();

    DepcheckOpts dep;
    CLI::App* dep_cmd =
        app.add_subcommand("depcheck", "weak-dependence coefficient checks and tau bounds");
    std::string dep_config;
    dep_cmd->add_option("--config", dep_config, "key=value config file (flags win)");
    dep_cmd->add_option("--kind", dep.kind, "geometric|riemannian")->capture_default_str();
    dep_cmd->add_option("--c", dep.c, "coefficient scale")->capture_default_str();
    dep_cmd->add_option("--a", dep.a, "geometric ratio in [0,1)")->capture_default_str();
    dep_cmd->add_option("--gamma", dep.gamma, "riemannian exponent > 1")
        ->capture_default_str();
    dep_cmd->add_option("--j-max", dep.j_max, "tau table length")->capture_default_str();
    dep_cmd->add_option("--k-max", dep.k_max, "largest moment order checked")
        ->capture_default_str();
    dep_cmd->add_option("--mu", dep.mu, "factorial growth exponent")->capture_default_str();
    dep_cmd->add_option("--L1", dep.L1, "moment-condition constant L1 (0 = fit)")->capture_default_str();
    dep_cmd->add_option("--L2", dep.L2, "moment-condition constant L2 (0 = fit)")->capture_default_str();
    dep_cmd->add_option("--out-dir", dep.out_dir, "output directory")->capture_default_str();

    ExperimentOpts ex;
    CLI::App* ex_cmd =
        app.add_subcommand("experiment", "Monte-Carlo risk-gap curves over the n grid");
    std::string ex_config;
    ex_cmd->add_option("--config", ex_config, "key=value config file (flags win)");
    ex_cmd->add_option("--profile", ex.profile, "desk|paper")->capture_default_str();
    ex_cmd->add_option("--dgp", ex.dgp, "dgp1|dgp2")->capture_default_str();
    ex_cmd->add_option("--n-grid", ex.n_grid, "override grid, e.g. 200,600,1000");
    ex_cmd->add_option("--replications", ex.replications, "override replication count");
    ex_cmd->add_option("--target-m", ex.target_m, "override target sample size");
    ex_cmd->add_option("--master-seed", ex.master_seed, "master seed")->capture_default_str();
    ex_cmd->add_option("--jobs", ex.jobs, "worker threads (0 = all cores)")
        ->capture_default_str();
    ex_cmd->add_option("--out-dir", ex.out_dir, "output directory")->capture_default_str();

    RecessionOpts re;
    CLI::App* re_cmd =
        app.add_subcommand("recession", "US recession classification pipeline");
    std::string re_config;
    re_cmd->add_option("--config", re_config, "key=value config file (flags win)");
    re_cmd->add_option("--data", re.data, "USRECQ-style csv path")->capture_default_str();
    re_cmd->add_option("--seed", re.seed, "training seed")->capture_default_str();
    re_cmd->add_option("--hidden", re.hidden, "hidden widths")->capture_default_str();
    re_cmd->add_option("--out-dir", re.out_dir, "output directory")->capture_default_str();

    try {
        std::vector<std::string> raw(argv + 1, argv + argc);
        const std::vector<std::string> merged = merge_config_args(raw);
        std::vector<const char*> ptrs;
        ptrs.push_back(argv[0]);
        for (const std::string& a : merged) ptrs.push_back(a.c_str());
        app.parse(static_cast<int>(ptrs.size()), ptrs.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim_cmd->parsed()) return run_simulate(sim, sim_cmd);
        if (tr_cmd->parsed()) return run_train(tr, tr_cmd);
        if (bo_cmd->parsed()) return run_bounds(bo, bo_cmd);
        if (dep_cmd->parsed()) return run_depcheck(dep, dep_cmd);
        if (ex_cmd->parsed()) return run_experiment(ex, ex_cmd);
        if (re_cmd->parsed()) return run_recession(re, re_cmd);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
