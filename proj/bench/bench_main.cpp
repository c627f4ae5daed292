// Serial vs OpenMP comparison for the two parallel surfaces: the blocked
// risk-evaluation kernel and the experiment replication fan-out. Results are
// checked for bitwise agreement while timing.

#include <chrono>
#include <cstdio>

#include "wdl/erm.hpp"
#include "wdl/experiments.hpp"
#include "wdl/parallel.hpp"
#include "wdl/process_sim.hpp"

using namespace wdl;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

}  // namespace

int main() {
    const int jobs = resolve_jobs(0);
    std::printf("hardware threads: %d\n\n", jobs);

    // risk evaluation kernel
    const BinaryDgpSpec spec = BinaryDgpSpec::dgp1();
    const Trajectory traj = simulate_binary(spec, 2000000, 1, 500);
    const Dataset ds = make_supervised(traj, 1);
    const Architecture arch =
        Architecture::mlp(1, {16, 16}, Activation::ReLU, OutputActivation::Tanh);
    const NetworkParams params = init_params(arch, 2);

    auto t0 = clock_type::now();
    const double serial = empirical_surrogate_risk_serial(arch, params, ds);
    const double t_serial = seconds_since(t0);

    t0 = clock_type::now();
    const double parallel = empirical_surrogate_risk(arch, params, ds, 0);
    const double t_parallel = seconds_since(t0);

    std::printf("risk kernel over %zu points\n", ds.size());
    std::printf("  serial   %8.3f s   (risk %.12f)\n", t_serial, serial);
    std::printf("  parallel %8.3f s   (risk %.12f)  speedup %.2fx  bitwise %s\n\n",
                t_parallel, parallel, t_serial / t_parallel,
                serial == parallel ? "equal" : "DIFFERENT");

    // replication fan-out
    ExperimentPlan plan;
    plan.n_grid = {200, 400};
    plan.replications = 8;
    plan.target_m = 2000;
    plan.master_seed = 3;

    t0 = clock_type::now();
    const GapCurve a = run_gap_curve(plan, 1);
    const double t_fan_serial = seconds_since(t0);

    t0 = clock_type::now();
    const GapCurve b = run_gap_curve(plan, 0);
    const double t_fan_parallel = seconds_since(t0);

    bool equal = true;
    for (std::size_t i = 0; i < a.rows.size(); ++i)
        equal = equal && a.rows[i].per_rep_risk == b.rows[i].per_rep_risk;

    std::printf("replication fan-out (%zu n-values x %zu reps)\n", plan.n_grid.size(),
                plan.replications);
    std::printf("  serial   %8.3f s\n", t_fan_serial);
    std::printf("  parallel %8.3f s   speedup %.2fx  bitwise %s\n", t_fan_parallel,
                t_fan_serial / t_fan_parallel, equal ? "equal" : "DIFFERENT");
    return equal && serial == parallel ? 0 : 1;
}
