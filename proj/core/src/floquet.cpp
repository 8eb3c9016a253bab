#include "fpend/floquet.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

namespace fpend {

namespace {

using cd = std::complex<double>;

// The FFTW planner is not thread-safe; plan creation/destruction is serialized.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct InPlacePlans {
    fftw_plan to_angle = nullptr;   // momentum -> angle grid (unnormalized)
    fftw_plan to_momentum = nullptr;

    InPlacePlans(cd* data, int n, int columns) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        auto* d = reinterpret_cast<fftw_complex*>(data);
        to_angle = fftw_plan_many_dft(1, &n, columns, d, nullptr, 1, n, d, nullptr, 1, n,
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
        to_momentum = fftw_plan_many_dft(1, &n, columns, d, nullptr, 1, n, d, nullptr, 1, n,
                                         FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~InPlacePlans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(to_angle);
        fftw_destroy_plan(to_momentum);
    }
    InPlacePlans(const InPlacePlans&) = delete;
    InPlacePlans& operator=(const InPlacePlans&) = delete;
};

}  // namespace

MomentumBasis make_basis(double hbar, double p_bound) {
    if (hbar <= 0.0 || p_bound <= 0.0)
        throw std::invalid_argument("make_basis: hbar and p_bound must be > 0");
    int n_max = static_cast<int>(std::ceil(p_bound / hbar));
    return MomentumBasis(hbar, n_max);
}

Eigen::MatrixXcd build_propagator(const SystemParams& par, const MomentumBasis& basis,
                                  int steps_per_period) {
    if (steps_per_period < 128)
        throw std::invalid_argument("build_propagator: steps_per_period must be >= 128");

    const int n = basis.dim();
    const int n_max = basis.n_max;
    const double hbar = basis.hbar;
    const bool symmetric = par.symmetric_mode();

    // Workspace in FFT row order: row k holds momentum index n = k for
    // k <= n_max and n = k - dim otherwise, so that the angle-grid values are
    // psi_j = sum_n c_n exp(i n q_j) with q_j = 2 pi j / dim.
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(n, n);
    InPlacePlans plans(w.data(), n, n);

    std::vector<double> nsq(n), cosq(n), sinq(n);
    for (int k = 0; k < n; ++k) {
        double nk = (k <= n_max) ? k : k - n;
        nsq[k] = nk * nk;
    }
    for (int j = 0; j < n; ++j) {
        double q = kTau * j / n;
        cosq[j] = std::cos(q);
        sinq[j] = std::sin(q);
    }
    if (symmetric) {
        // enforce exact grid evenness so the parity symmetry of U holds at
        // machine level (the doublet structure depends on it)
        for (int j = 1; 2 * j < n; ++j) {
            cosq[n - j] = cosq[j];
            sinq[n - j] = -sinq[j];
        }
    }

    const cd im(0.0, 1.0);
    std::vector<cd> phase(n);

    auto apply_kinetic = [&](double d) {
        for (int k = 0; k < n; ++k) phase[k] = std::exp(-im * (0.5 * hbar * nsq[k] * d));
        w.array().colwise() *= Eigen::Map<Eigen::ArrayXcd>(phase.data(), n);
    };
    auto apply_potential = [&](double t_mid, double d) {
        // V(q,t) = -a(t) cos q - b(t) sin q; b vanishes for equal couplings
        double a = 0.5 * (par.gamma_plus + par.gamma_minus) * std::cos(t_mid);
        double b = 0.5 * (par.gamma_minus - par.gamma_plus) * std::sin(t_mid);
        const double inv_n = 1.0 / n;  // forward-FFT normalization folded in
        for (int j = 0; j < n; ++j) {
            double v = -a * cosq[j] - b * sinq[j];
            phase[j] = std::exp(-im * (v * d / hbar)) * inv_n;
        }
        fftw_execute(plans.to_angle);
        w.array().colwise() *= Eigen::Map<Eigen::ArrayXcd>(phase.data(), n);
        fftw_execute(plans.to_momentum);
    };

    // 4th-order composition of symmetric kinetic/potential sub-steps; the
    // sub-step sequence is palindromic over the period, which preserves the
    // antiunitary time-reversal relation of the exact propagator.
    constexpr double cbrt2 = 1.2599210498948731647672106072782;
    constexpr double w1 = 1.0 / (2.0 - cbrt2);
    constexpr double w0 = 1.0 - 2.0 * w1;
    const double dt = kTau / steps_per_period;
    const double sub[3] = {w1 * dt, w0 * dt, w1 * dt};

    for (int step = 0; step < steps_per_period; ++step) {
        double t = kTau * step / steps_per_period;
        for (double h : sub) {
            apply_kinetic(0.5 * h);
            apply_potential(t + 0.5 * h, h);
            apply_kinetic(0.5 * h);
            t += h;
        }
    }

    // permute FFT row order back to physical order n = -n_max .. n_max
    std::vector<int> fft_index(n);
    for (int i = 0; i < n; ++i) {
        int nn = i - n_max;
        fft_index[i] = (nn >= 0) ? nn : nn + n;
    }
    Eigen::MatrixXcd u(n, n);
    for (int col = 0; col < n; ++col)
        for (int row = 0; row < n; ++row) u(row, col) = w(fft_index[row], fft_index[col]);
    return u;
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
    Eigen::MatrixXcd g = u.adjoint() * u;
    g.diagonal().array() -= 1.0;
    return g.cwiseAbs().maxCoeff();
}

namespace {

struct SectorStates {
    std::vector<double> quasienergy;
    std::vector<double> modulus;
    Eigen::MatrixXd vectors;  // in sector coordinates
};

// One parity sector of the symmetric propagator is complex symmetric as well
// as unitary, so its real and imaginary parts are commuting real-symmetric
// matrices: diagonalize X, then split any X-clusters (notably the +/- phase
// pairs with equal cosine) with Y. Eigenvectors come out real orthonormal.
SectorStates diagonalize_sector(const Eigen::MatrixXcd& block, double hbar) {
    const int m = static_cast<int>(block.rows());
    Eigen::MatrixXd x = 0.5 * (block.real() + block.real().transpose());
    Eigen::MatrixXd y = 0.5 * (block.imag() + block.imag().transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esx(x);
    Eigen::MatrixXd v = esx.eigenvectors();
    Eigen::VectorXd xval = esx.eigenvalues();

    SectorStates out;
    out.quasienergy.resize(m);
    out.modulus.resize(m);
    out.vectors = Eigen::MatrixXd::Zero(m, m);

    const double cluster_tol = 1e-8;
    int i = 0;
    while (i < m) {
        int j = i + 1;
        while (j < m && xval[j] - xval[j - 1] < cluster_tol) ++j;
        int size = j - i;
        if (size > 1) {
            Eigen::MatrixXd vc = v.middleCols(i, size);
            Eigen::MatrixXd yc = vc.transpose() * y * vc;
            yc = 0.5 * (yc + yc.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esy(yc);
            v.middleCols(i, size) = vc * esy.eigenvectors();
        }
        for (int k = i; k < j; ++k) {
            Eigen::VectorXd vk = v.col(k);
            double xv = vk.dot(x * vk);
            double yv = vk.dot(y * vk);
            out.quasienergy[k] =
                canonical_quasienergy(-hbar * std::atan2(yv, xv) / kTau, hbar);
            out.modulus[k] = std::sqrt(xv * xv + yv * yv);
            out.vectors.col(k) = vk;
        }
        i = j;
    }
    return out;
}

}  // namespace

FloquetSpectrum diagonalize(const Eigen::MatrixXcd& u, const SystemParams& par,
                            const MomentumBasis& basis, int steps_per_period) {
    const int n = basis.dim();
    if (u.rows() != n || u.cols() != n)
        throw std::invalid_argument("diagonalize: dimension mismatch with basis");

    // sampled unitarity check; the full product is exercised by the test suite
    double defect = 0.0;
    for (int j = 0; j < n; j += std::max(1, n / 16)) {
        Eigen::VectorXcd col = u.adjoint() * u.col(j);
        col[j] -= 1.0;
        defect = std::max(defect, col.cwiseAbs().maxCoeff());
    }
    if (defect > 1e-8) throw NonUnitaryInput("diagonalize: propagator is not unitary");

    FloquetSpectrum sp;
    sp.hbar = basis.hbar;
    sp.gamma_plus = par.gamma_plus;
    sp.gamma_minus = par.gamma_minus;
    sp.n_max = basis.n_max;
    sp.steps_per_period = steps_per_period;
    sp.symmetric = par.symmetric_mode();
    sp.quasienergies.resize(n);
    sp.parity.assign(n, 0);
    sp.vectors.resize(n, n);

    if (sp.symmetric) {
        const int ne = basis.n_max + 1, no = basis.n_max;
        Eigen::MatrixXd qe = Eigen::MatrixXd::Zero(n, ne);
        Eigen::MatrixXd qo = Eigen::MatrixXd::Zero(n, no);
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        qe(basis.index_of(0), 0) = 1.0;
        for (int m = 1; m <= basis.n_max; ++m) {
            qe(basis.index_of(m), m) = inv_sqrt2;
            qe(basis.index_of(-m), m) = inv_sqrt2;
            qo(basis.index_of(m), m - 1) = inv_sqrt2;
            qo(basis.index_of(-m), m - 1) = -inv_sqrt2;
        }

        Eigen::MatrixXcd ue = qe.transpose() * (u * qe);
        Eigen::MatrixXcd uo = qo.transpose() * (u * qo);
        SectorStates even = diagonalize_sector(ue, basis.hbar);
        SectorStates odd = diagonalize_sector(uo, basis.hbar);

        struct Entry {
            double eps;
            int parity;
            int col;
        };
        std::vector<Entry> entries;
        entries.reserve(n);
        for (int k = 0; k < ne; ++k) entries.push_back({even.quasienergy[k], +1, k});
        for (int k = 0; k < no; ++k) entries.push_back({odd.quasienergy[k], -1, k});
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            if (a.eps != b.eps) return a.eps < b.eps;
            return a.parity > b.parity;
        });

        double mod_defect = 0.0;
        for (double m : even.modulus) mod_defect = std::max(mod_defect, std::abs(m - 1.0));
        for (double m : odd.modulus) mod_defect = std::max(mod_defect, std::abs(m - 1.0));
        sp.eigenvalue_modulus_defect = mod_defect;

        for (int i = 0; i < n; ++i) {
            sp.quasienergies[i] = entries[i].eps;
            sp.parity[i] = entries[i].parity;
            if (entries[i].parity > 0)
                sp.vectors.col(i) = (qe * even.vectors.col(entries[i].col)).cast<cd>();
            else
                sp.vectors.col(i) = (qo * odd.vectors.col(entries[i].col)).cast<cd>();
        }
        return sp;
    }

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u);
    if (es.info() != Eigen::Success) throw NumericalError("diagonalize: eigensolver failed");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> eps(n);
    double mod_defect = 0.0;
    for (int i = 0; i < n; ++i) {
        cd lam = es.eigenvalues()[i];
        eps[i] = canonical_quasienergy(-basis.hbar * std::arg(lam) / kTau, basis.hbar);
        mod_defect = std::max(mod_defect, std::abs(std::abs(lam) - 1.0));
    }
    sp.eigenvalue_modulus_defect = mod_defect;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return eps[a] < eps[b]; });
    for (int i = 0; i < n; ++i) {
        sp.quasienergies[i] = eps[order[i]];
        Eigen::VectorXcd v = es.eigenvectors().col(order[i]);
        sp.vectors.col(i) = v / v.norm();
    }
    return sp;
}

}  // namespace fpend
