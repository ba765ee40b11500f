// Timing harness comparing the serial reference kernels with the OpenMP
// production kernels on representative workloads.
#include <chrono>
#include <cstdio>
#include <string>

#include "seqtest/lattice.hpp"
#include "seqtest/montecarlo.hpp"
#include "seqtest/reference.hpp"

using namespace seqtest;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_ms(F&& f) {
    const double t0 = now_ms();
    f();
    return now_ms() - t0;
}

Matrix row_lambdas(std::initializer_list<double> rows) {
    const int k = static_cast<int>(rows.size());
    Matrix m(k, k, 0.0);
    int i = 0;
    for (double v : rows) {
        for (int j = 0; j < k; ++j)
            if (i != j) m(i, j) = v;
        ++i;
    }
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    int N = 1500;
    long reps = 200000;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--quick") {
            N = 300;
            reps = 20000;
        } else if (arg == "--horizon" && i + 1 < argc) {
            N = std::stoi(argv[++i]);
        } else if (arg == "--reps" && i + 1 < argc) {
            reps = std::stol(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: bench [--quick] [--horizon N] [--reps R]\n");
            return 2;
        }
    }

    const Par serial{1};
    const Par parallel = Par::max();
    std::printf("horizon N=%d, reps=%ld, threads=%d\n", N, reps, parallel.threads);

    TestSpec spec(Model::bernoulli(), {0.3, 0.4, 0.5}, {0.3, 0.4, 0.5},
                  {1.0 / 3, 1.0 / 3, 1.0 / 3}, row_lambdas({10.0, 10.0, 10.0}),
                  Horizon::finite(N));

    LatticePolicy pol_ref, pol_omp;
    const double t_build_ref = time_ms([&] { pol_ref = ref::dbc_lattice(spec); });
    const double t_build_ser = time_ms([&] { pol_omp = dbc_lattice(spec, serial); });
    const double t_build_par = time_ms([&] { pol_omp = dbc_lattice(spec, parallel); });
    std::printf("rule tabulation    reference %8.1f ms | kernel 1T %8.1f ms | kernel %dT %8.1f ms%s\n",
                t_build_ref, t_build_ser, parallel.threads, t_build_par,
                pol_ref == pol_omp ? "" : "  [MISMATCH]");

    TestReport rep_ref, rep_omp;
    const double t_eval_ref = time_ms([&] { rep_ref = ref::evaluate(pol_omp, spec); });
    const double t_eval_ser = time_ms([&] { rep_omp = evaluate(pol_omp, spec, {}, serial); });
    const double t_eval_par = time_ms([&] { rep_omp = evaluate(pol_omp, spec, {}, parallel); });
    std::printf("forward evaluation reference %8.1f ms | kernel 1T %8.1f ms | kernel %dT %8.1f ms (wESS %.6f)\n",
                t_eval_ref, t_eval_ser, parallel.threads, t_eval_par, rep_omp.weighted_ess);

    BackwardResult back_ref, back_omp;
    const double t_back_ref = time_ms([&] { back_ref = ref::backward_optimal(spec, N); });
    const double t_back_ser = time_ms([&] { back_omp = backward_optimal(spec, N, serial); });
    const double t_back_par = time_ms([&] { back_omp = backward_optimal(spec, N, parallel); });
    std::printf("backward induction reference %8.1f ms | kernel 1T %8.1f ms | kernel %dT %8.1f ms (L* %.6f)%s\n",
                t_back_ref, t_back_ser, parallel.threads, t_back_par,
                back_omp.minimal_lagrangian,
                back_ref.policy == back_omp.policy ? "" : "  [MISMATCH]");

    DbcPolicy rule(spec);
    SimConfig config{reps, 7, N, 0.4, &rule, false};
    TestReport sim;
    const double t_sim_ser = time_ms([&] { sim = simulate(spec, config, serial); });
    const double t_sim_par = time_ms([&] { sim = simulate(spec, config, parallel); });
    std::printf("monte carlo                           | kernel 1T %8.1f ms | kernel %dT %8.1f ms (ESS %.4f)\n",
                t_sim_ser, parallel.threads, t_sim_par, sim.results.front().ess);
    return 0;
}
