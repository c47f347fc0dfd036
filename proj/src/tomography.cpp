#include "eacc/tomography.hpp"

#include "eacc/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace eacc {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

struct Eigenstate {
    const char* label;
    Ket2 ket;
};

std::vector<Eigenstate> pauli_eigenstates() {
    return {
        {"X+", Ket2{Complex(kInvSqrt2, 0), Complex(kInvSqrt2, 0)}},
        {"X-", Ket2{Complex(kInvSqrt2, 0), Complex(-kInvSqrt2, 0)}},
        {"Y+", Ket2{Complex(kInvSqrt2, 0), Complex(0, kInvSqrt2)}},
        {"Y-", Ket2{Complex(kInvSqrt2, 0), Complex(0, -kInvSqrt2)}},
        {"Z+", Ket2{Complex(1, 0), Complex(0, 0)}},
        {"Z-", Ket2{Complex(0, 0), Complex(1, 0)}},
    };
}

std::vector<ComplexMatrix> setting_projectors(const std::vector<TomoSetting>& settings) {
    std::vector<ComplexMatrix> projectors;
    projectors.reserve(settings.size());
    for (const auto& s : settings) projectors.push_back(projector(kron(s.alice, s.bob)));
    return projectors;
}

double born(const ComplexMatrix& proj, const ComplexMatrix& rho) {
    Complex tr(0.0, 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) tr += proj(i, j) * rho(j, i);
    return tr.real();
}

// Orthonormal Hermitian basis (P_i x P_j)/2 over the Pauli set, index 4i + j.
std::vector<ComplexMatrix> pauli_basis() {
    const std::vector<ComplexMatrix> singles = {ComplexMatrix::identity(2), sigma_x(), sigma_y(),
                                                sigma_z()};
    std::vector<ComplexMatrix> basis;
    basis.reserve(16);
    for (const auto& a : singles)
        for (const auto& b : singles) basis.push_back(0.5 * kron(a, b));
    return basis;
}

// Dense symmetric solve by Gaussian elimination with partial pivoting.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-10)
            throw std::invalid_argument("linear_inversion: rank-deficient measurement design");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

// Lower-triangular T with T^dag T = m, for positive definite m. Flips the
// index order, takes the ordinary Cholesky factor and flips back.
ComplexMatrix reverse_cholesky(const ComplexMatrix& m) {
    const int n = m.dim();
    ComplexMatrix flipped(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) flipped(i, j) = m(n - 1 - i, n - 1 - j);

    ComplexMatrix l(n);  // flipped = l l^dag
    for (int j = 0; j < n; ++j) {
        double d = flipped(j, j).real();
        for (int k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (d <= 0.0) throw std::runtime_error("reverse_cholesky: matrix not positive definite");
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            Complex s = flipped(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / l(j, j).real();
        }
    }

    ComplexMatrix u(n);  // u = J l J is upper triangular with m = u u^dag
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) u(i, j) = l(n - 1 - i, n - 1 - j);
    return u.adjoint();  // lower triangular, T^dag T = u u^dag = m
}

// 16 real parameters of a lower-triangular 4x4: real diagonal first, then
// (re, im) of the strictly-lower entries row by row.
constexpr int kParams = 16;

ComplexMatrix params_to_t(const std::array<double, kParams>& theta) {
    ComplexMatrix t(4);
    for (int i = 0; i < 4; ++i) t(i, i) = theta[static_cast<std::size_t>(i)];
    int idx = 4;
    for (int i = 1; i < 4; ++i)
        for (int j = 0; j < i; ++j) {
            t(i, j) = Complex(theta[static_cast<std::size_t>(idx)],
                              theta[static_cast<std::size_t>(idx + 1)]);
            idx += 2;
        }
    return t;
}

std::array<double, kParams> t_to_params(const ComplexMatrix& t) {
    std::array<double, kParams> theta{};
    for (int i = 0; i < 4; ++i) theta[static_cast<std::size_t>(i)] = t(i, i).real();
    int idx = 4;
    for (int i = 1; i < 4; ++i)
        for (int j = 0; j < i; ++j) {
            theta[static_cast<std::size_t>(idx)] = t(i, j).real();
            theta[static_cast<std::size_t>(idx + 1)] = t(i, j).imag();
            idx += 2;
        }
    return theta;
}

struct MleEvaluation {
    double loglike = -std::numeric_limits<double>::infinity();
    std::array<double, kParams> gradient{};
};

// Log-likelihood sum_k c_k ln p_k and its gradient in the free entries of T.
// Wirtinger derivative: dL/dT*_ab = [(T G) - N T]_ab / Tr[T^dag T] with
// G = sum_k (c_k / p_k) Pi_k.
MleEvaluation evaluate_mle(const std::array<double, kParams>& theta,
                           const std::vector<long long>& counts,
                           const std::vector<ComplexMatrix>& projectors, bool with_gradient) {
    const ComplexMatrix t = params_to_t(theta);
    const ComplexMatrix rho_raw = t.adjoint() * t;
    const double tau = rho_raw.trace().real();
    MleEvaluation ev;
    if (!(tau > 0.0)) return ev;

    double n_total = 0.0;
    double ll = 0.0;
    ComplexMatrix g(4);
    for (std::size_t k = 0; k < projectors.size(); ++k) {
        const double c = static_cast<double>(counts[k]);
        if (c <= 0.0) continue;
        n_total += c;
        const double p = born(projectors[k], rho_raw) / tau;
        if (p <= 0.0) return ev;  // boundary: reject the step
        ll += c * std::log(p);
        if (with_gradient) {
            const double w = c / (p * tau);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) g(i, j) += w * projectors[k](i, j);
        }
    }
    ev.loglike = ll;
    if (!with_gradient) return ev;

    // g is sum (c_k/p_k) Pi_k / tau already; fold the -N T / tau term.
    ComplexMatrix w = t * g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) w(i, j) -= (n_total / tau) * t(i, j);

    std::array<double, kParams> grad{};
    for (int i = 0; i < 4; ++i) grad[static_cast<std::size_t>(i)] = 2.0 * w(i, i).real();
    int idx = 4;
    for (int i = 1; i < 4; ++i)
        for (int j = 0; j < i; ++j) {
            grad[static_cast<std::size_t>(idx)] = 2.0 * w(i, j).real();
            grad[static_cast<std::size_t>(idx + 1)] = 2.0 * w(i, j).imag();
            idx += 2;
        }
    ev.gradient = grad;
    return ev;
}

double dot(const std::array<double, kParams>& a, const std::array<double, kParams>& b) {
    double s = 0.0;
    for (int i = 0; i < kParams; ++i)
        s += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
    return s;
}

DensityMatrix state_from_params(const std::array<double, kParams>& theta) {
    const ComplexMatrix t = params_to_t(theta);
    ComplexMatrix rho = t.adjoint() * t;
    const double tau = rho.trace().real();
    rho = rho * (1.0 / tau);
    // scrub the rounding residue so the validated constructor sees an exactly
    // Hermitian matrix
    ComplexMatrix sym(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) sym(i, j) = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
    return DensityMatrix(sym);
}

void validate_settings(const std::vector<TomoSetting>& settings) {
    if (settings.size() != 36)
        throw std::invalid_argument("tomography: expected 36 settings");
}

}  // namespace

std::vector<TomoSetting> canonical_tomo_settings() {
    const auto eigenstates = pauli_eigenstates();
    std::vector<TomoSetting> settings;
    settings.reserve(36);
    for (const auto& a : eigenstates)
        for (const auto& b : eigenstates)
            settings.push_back(TomoSetting{a.label, b.label, a.ket, b.ket});
    return settings;
}

long long TomoCounts::total() const {
    long long t = 0;
    for (long long c : counts) t += c;
    return t;
}

TomoCounts simulate_counts(const DensityMatrix& rho, const std::vector<TomoSetting>& settings,
                           double n_scale, std::uint64_t seed) {
    validate_settings(settings);
    if (!(n_scale > 0.0)) throw std::invalid_argument("simulate_counts: n_scale must be positive");
    const auto projectors = setting_projectors(settings);
    TomoCounts out;
    out.counts.resize(settings.size());
    for (std::size_t k = 0; k < settings.size(); ++k) {
        RandomStream rng = RandomStream::child(seed, k);
        const double p = std::max(0.0, born(projectors[k], rho.matrix()));
        out.counts[k] = rng.poisson(n_scale * p);
    }
    return out;
}

ComplexMatrix linear_inversion_frequencies(const std::vector<double>& probs,
                                           const std::vector<TomoSetting>& settings) {
    validate_settings(settings);
    if (probs.size() != settings.size())
        throw std::invalid_argument("linear_inversion: frequency count mismatch");
    const auto projectors = setting_projectors(settings);
    const auto basis = pauli_basis();

    // design[k][m] = Tr[Pi_k G_m]; coefficient 0 is pinned by the unit trace.
    std::vector<std::array<double, 16>> design(projectors.size());
    for (std::size_t k = 0; k < projectors.size(); ++k)
        for (std::size_t m = 0; m < 16; ++m)
            design[k][m] = (projectors[k] * basis[m]).trace().real();

    constexpr double kTraceCoeff = 0.5;  // Tr[rho] = 1 fixes c_0
    std::vector<std::vector<double>> normal(15, std::vector<double>(15, 0.0));
    std::vector<double> rhs(15, 0.0);
    for (std::size_t k = 0; k < projectors.size(); ++k) {
        const double resid = probs[k] - design[k][0] * kTraceCoeff;
        for (std::size_t m = 1; m < 16; ++m) {
            rhs[m - 1] += design[k][m] * resid;
            for (std::size_t l = 1; l < 16; ++l) normal[m - 1][l - 1] += design[k][m] * design[k][l];
        }
    }
    const std::vector<double> coeff = solve_linear(std::move(normal), std::move(rhs));

    ComplexMatrix rho = kTraceCoeff * basis[0];
    for (std::size_t m = 1; m < 16; ++m) rho = rho + coeff[m - 1] * basis[m];
    return rho;
}

ComplexMatrix linear_inversion(const TomoCounts& counts, const std::vector<TomoSetting>& settings) {
    validate_settings(settings);
    if (counts.counts.size() != settings.size())
        throw std::invalid_argument("linear_inversion: counts/settings size mismatch");
    const long long total = counts.total();
    if (total <= 0) throw std::invalid_argument("linear_inversion: empty counts");
    // The 36 projectors sum to 9*I, so the flux estimate is total/9.
    const double flux = static_cast<double>(total) / 9.0;
    std::vector<double> freq(counts.counts.size());
    for (std::size_t k = 0; k < freq.size(); ++k)
        freq[k] = static_cast<double>(counts.counts[k]) / flux;
    return linear_inversion_frequencies(freq, settings);
}

ComplexMatrix psd_project_unit_trace(const ComplexMatrix& hermitian) {
    const EigenSystem es = eig_hermitian(hermitian);
    const int n = hermitian.dim();
    ComplexMatrix out(n);
    double trace = 0.0;
    for (int k = 0; k < n; ++k) trace += std::max(0.0, es.eigenvalues[static_cast<std::size_t>(k)]);
    if (trace <= 0.0) return ComplexMatrix::identity(n) * (1.0 / n);
    for (int k = 0; k < n; ++k) {
        const double lam = std::max(0.0, es.eigenvalues[static_cast<std::size_t>(k)]) / trace;
        if (lam == 0.0) continue;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out(i, j) += lam * es.eigenvectors(i, k) * std::conj(es.eigenvectors(j, k));
    }
    return out;
}

DensityMatrix mle_reconstruct(const TomoCounts& counts, const std::vector<TomoSetting>& settings,
                              const MleConfig& cfg) {
    validate_settings(settings);
    if (counts.counts.size() != settings.size())
        throw std::invalid_argument("mle_reconstruct: counts/settings size mismatch");
    for (long long c : counts.counts)
        if (c < 0) throw std::invalid_argument("mle_reconstruct: negative count");
    const long long total = counts.total();
    if (total == 0) {
        if (cfg.zero_counts_to_mixed) return maximally_mixed();
        throw std::invalid_argument("mle_reconstruct: all counts are zero");
    }

    const auto projectors = setting_projectors(settings);

    // Start from the PSD-projected linear inversion, blended with a little
    // mixedness so the factorization and the log terms are well defined.
    ComplexMatrix start = psd_project_unit_trace(linear_inversion(counts, settings));
    constexpr double kBlend = 1e-6;
    start = (1.0 - kBlend) * start + kBlend * (ComplexMatrix::identity(4) * 0.25);
    std::array<double, kParams> theta = t_to_params(reverse_cholesky(start));

    const double n_total = static_cast<double>(total);
    long long evals = 0;
    auto eval = [&](const std::array<double, kParams>& th, bool grad) {
        ++evals;
        return evaluate_mle(th, counts.counts, projectors, grad);
    };

    MleEvaluation cur = eval(theta, true);
    std::array<double, kParams> prev_theta{};
    std::array<double, kParams> prev_grad{};
    bool have_prev = false;
    double step = 1.0 / n_total;

    while (evals < cfg.max_evaluations) {
        const double gnorm = std::sqrt(dot(cur.gradient, cur.gradient)) / n_total;
        if (gnorm < cfg.gradient_tol) return state_from_params(theta);

        if (have_prev) {
            std::array<double, kParams> s{}, y{};
            for (int i = 0; i < kParams; ++i) {
                s[static_cast<std::size_t>(i)] = theta[static_cast<std::size_t>(i)] -
                                                 prev_theta[static_cast<std::size_t>(i)];
                y[static_cast<std::size_t>(i)] = cur.gradient[static_cast<std::size_t>(i)] -
                                                 prev_grad[static_cast<std::size_t>(i)];
            }
            const double denom = -dot(s, y);  // curvature of the concave direction
            const double numer = dot(s, s);
            if (denom > 0.0 && std::isfinite(denom)) step = numer / denom;
        }
        step = std::clamp(step, 1e-18, 1e6);

        bool accepted = false;
        double trial_step = step;
        for (int tries = 0; tries < 60 && evals < cfg.max_evaluations; ++tries) {
            std::array<double, kParams> cand = theta;
            for (int i = 0; i < kParams; ++i)
                cand[static_cast<std::size_t>(i)] += trial_step * cur.gradient[static_cast<std::size_t>(i)];
            const MleEvaluation next = eval(cand, true);
            if (next.loglike > cur.loglike) {  // monotone ascent only
                prev_theta = theta;
                prev_grad = cur.gradient;
                have_prev = true;
                theta = cand;
                cur = next;
                accepted = true;
                break;
            }
            trial_step *= 0.5;
        }
        if (!accepted) {
            if (evals >= cfg.max_evaluations) break;
            // no ascent left at machine precision: numerically stationary
            return state_from_params(theta);
        }
    }

    throw MleConvergenceError("mle_reconstruct: evaluation budget exhausted before convergence",
                              state_from_params(theta));
}

double poisson_log_likelihood(const TomoCounts& counts, const std::vector<TomoSetting>& settings,
                              const ComplexMatrix& rho) {
    validate_settings(settings);
    const auto projectors = setting_projectors(settings);
    const long long total = counts.total();
    const double flux = static_cast<double>(total) / 9.0;
    double ll = 0.0;
    for (std::size_t k = 0; k < projectors.size(); ++k) {
        const double p = born(projectors[k], rho);
        const double mean = flux * p;
        const double c = static_cast<double>(counts.counts[k]);
        if (c > 0.0) {
            if (mean <= 0.0) return -std::numeric_limits<double>::infinity();
            ll += c * std::log(mean);
        }
        ll -= mean;
    }
    return ll;
}

namespace {

struct MetricSample {
    double fidelity = 0.0;
    double tangle_value = 0.0;
};

BootstrapResult summarize(const std::vector<MetricSample>& samples) {
    BootstrapResult out;
    out.runs = static_cast<int>(samples.size());
    double fm = 0.0, tm = 0.0;
    for (const auto& s : samples) {
        fm += s.fidelity;
        tm += s.tangle_value;
    }
    fm /= out.runs;
    tm /= out.runs;
    double fv = 0.0, tv = 0.0;
    for (const auto& s : samples) {
        fv += (s.fidelity - fm) * (s.fidelity - fm);
        tv += (s.tangle_value - tm) * (s.tangle_value - tm);
    }
    out.fidelity_mean = fm;
    out.tangle_mean = tm;
    out.fidelity_std = std::sqrt(fv / (out.runs - 1));
    out.tangle_std = std::sqrt(tv / (out.runs - 1));
    return out;
}

}  // namespace

BootstrapResult bootstrap_errors_with_seeds(const TomoCounts& counts,
                                            const std::vector<TomoSetting>& settings,
                                            std::span<const std::uint64_t> run_seeds,
                                            const MleConfig& cfg) {
    validate_settings(settings);
    if (run_seeds.size() < 2) throw std::invalid_argument("bootstrap_errors: need at least 2 runs");
    const Ket4 target = phi_plus_ket();
    std::vector<MetricSample> samples(run_seeds.size());
    parallel_for_index(run_seeds.size(), 0, [&](std::size_t r) {
        RandomStream rng(run_seeds[r]);
        TomoCounts resampled = counts;
        for (auto& c : resampled.counts) c = rng.poisson(static_cast<double>(c));
        try {
            const DensityMatrix rho = mle_reconstruct(resampled, settings, cfg);
            samples[r] = MetricSample{fidelity_with_pure(rho, target), tangle(rho)};
        } catch (const std::exception& e) {
            throw std::runtime_error("bootstrap run " + std::to_string(r) + ": " + e.what());
        }
    });
    return summarize(samples);
}

BootstrapResult bootstrap_errors(const TomoCounts& counts, const std::vector<TomoSetting>& settings,
                                 int runs, std::uint64_t seed, const MleConfig& cfg) {
    if (runs < 2) throw std::invalid_argument("bootstrap_errors: need at least 2 runs");
    std::vector<std::uint64_t> run_seeds(static_cast<std::size_t>(runs));
    for (int r = 0; r < runs; ++r)
        run_seeds[static_cast<std::size_t>(r)] = derive_stream_seed(seed, static_cast<std::uint64_t>(r));
    return bootstrap_errors_with_seeds(counts, settings, run_seeds, cfg);
}

std::string tomo_counts_to_csv(const TomoCounts& counts, const std::vector<TomoSetting>& settings) {
    validate_settings(settings);
    if (counts.counts.size() != settings.size())
        throw std::invalid_argument("tomo_counts_to_csv: counts/settings size mismatch");
    std::ostringstream out;
    out << "setting_alice,setting_bob,count\n";
    for (std::size_t k = 0; k < settings.size(); ++k)
        out << settings[k].alice_label << "," << settings[k].bob_label << "," << counts.counts[k]
            << "\n";
    return out.str();
}

TomoCounts tomo_counts_from_csv(const std::string& text, const std::vector<TomoSetting>& settings) {
    validate_settings(settings);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("setting_alice,setting_bob,count", 0) != 0)
        throw std::invalid_argument("tomo counts CSV: bad header");
    TomoCounts out;
    std::size_t k = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (k >= settings.size()) throw std::invalid_argument("tomo counts CSV: too many rows");
        std::istringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c))
            throw std::invalid_argument("tomo counts CSV: bad row '" + line + "'");
        if (a != settings[k].alice_label || b != settings[k].bob_label)
            throw std::invalid_argument("tomo counts CSV: row " + std::to_string(k + 1) +
                                        " is out of canonical order");
        const long long count = std::stoll(c);
        if (count < 0) throw std::invalid_argument("tomo counts CSV: negative count");
        out.counts.push_back(count);
        ++k;
    }
    if (k != settings.size()) throw std::invalid_argument("tomo counts CSV: expected 36 rows");
    return out;
}

}  // namespace eacc
