#pragma once

#include "eacc/rng.hpp"
#include "eacc/states.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace eacc {

// One coincidence setting: a product of single-qubit eigenstates of X, Y or Z.
struct TomoSetting {
    std::string alice_label;
    std::string bob_label;
    Ket2 alice;
    Ket2 bob;
};

// All 36 combinations in canonical order: Alice-major over
// X+, X-, Y+, Y-, Z+, Z-. This order is normative for the counts CSV.
std::vector<TomoSetting> canonical_tomo_settings();

struct TomoCounts {
    std::vector<long long> counts;  // one per setting, nonnegative
    std::string duration_tag;       // optional integration metadata

    long long total() const;
};

// Poisson counts with mean n_scale * Tr[(pi_a x pi_b) rho] per setting; each
// setting draws from its own derived stream.
TomoCounts simulate_counts(const DensityMatrix& rho, const std::vector<TomoSetting>& settings,
                           double n_scale, std::uint64_t seed);

// Least-squares reconstruction from normalized frequencies (counts divided
// by the fitted flux total/9). Hermitian and unit-trace by construction; not
// necessarily PSD.
ComplexMatrix linear_inversion(const TomoCounts& counts, const std::vector<TomoSetting>& settings);
ComplexMatrix linear_inversion_frequencies(const std::vector<double>& probs,
                                           const std::vector<TomoSetting>& settings);

// Clamp negative eigenvalues to zero and renormalize the trace.
ComplexMatrix psd_project_unit_trace(const ComplexMatrix& hermitian);

struct MleConfig {
    long long max_evaluations = 100000;
    // Convergence test: 2-norm of the gradient of the per-count average
    // log-likelihood below this value.
    double gradient_tol = 1e-6;
    bool zero_counts_to_mixed = false;  // all-zero counts: mixed state instead of error
};

class MleConvergenceError : public std::runtime_error {
public:
    MleConvergenceError(const std::string& what, DensityMatrix best)
        : std::runtime_error(what), best_(std::move(best)) {}

    const DensityMatrix& best() const { return best_; }

private:
    DensityMatrix best_;
};

// Maximum-likelihood state reconstruction. Independent Poisson counts per
// setting with a free overall flux fitted jointly; since the 36 projectors
// sum to 9*I the flux profile is exactly total/9 and the fit reduces to
// maximizing sum_k c_k ln p_k over rho = T^dag T / Tr[T^dag T] with T lower
// triangular (16 real parameters). Gradient ascent from the PSD-projected
// linear inversion; the returned state always satisfies the density-matrix
// invariants and never has lower likelihood than the start.
DensityMatrix mle_reconstruct(const TomoCounts& counts, const std::vector<TomoSetting>& settings,
                              const MleConfig& cfg = {});

// Poisson log-likelihood of a state given the counts, with the flux profiled
// out (constant terms from k! omitted).
double poisson_log_likelihood(const TomoCounts& counts, const std::vector<TomoSetting>& settings,
                              const ComplexMatrix& rho);

struct BootstrapResult {
    double fidelity_mean = 0.0;
    double fidelity_std = 0.0;
    double tangle_mean = 0.0;
    double tangle_std = 0.0;
    int runs = 0;
};

// Resample each count Poisson(observed), reconstruct by MLE, report the
// sample mean and standard deviation of fidelity (against |phi+>) and
// tangle. Run r uses the derived stream derive_stream_seed(seed, r).
BootstrapResult bootstrap_errors(const TomoCounts& counts, const std::vector<TomoSetting>& settings,
                                 int runs, std::uint64_t seed, const MleConfig& cfg = {});

// Same with explicit per-run stream seeds (identical seeds give identical
// runs and zero spread).
BootstrapResult bootstrap_errors_with_seeds(const TomoCounts& counts,
                                            const std::vector<TomoSetting>& settings,
                                            std::span<const std::uint64_t> run_seeds,
                                            const MleConfig& cfg = {});

// Counts CSV: header "setting_alice,setting_bob,count", 36 rows in canonical
// order. The order is validated on read.
std::string tomo_counts_to_csv(const TomoCounts& counts, const std::vector<TomoSetting>& settings);
TomoCounts tomo_counts_from_csv(const std::string& text, const std::vector<TomoSetting>& settings);

}  // namespace eacc
