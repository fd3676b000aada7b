#pragma once

// Exact fBm path sampling on a time grid.
//  * cholesky:   dense factor of the Gram matrix, any grid up to a size cap.
//  * circulant:  Davies-Harte embedding of the increments on uniform grids.
//                One complex FFT yields two independent paths.

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <fftw3.h>

#include "fbgraph/errors.hpp"
#include "fbgraph/fbm_core.hpp"
#include "fbgraph/rng.hpp"

namespace fbgraph {

enum class SamplingMethod { automatic, cholesky, circulant };

inline std::string to_string(SamplingMethod m) {
    switch (m) {
    case SamplingMethod::automatic: return "auto";
    case SamplingMethod::cholesky: return "exact-cholesky";
    case SamplingMethod::circulant: return "circulant-embedding";
    }
    return "?";
}

inline SamplingMethod parse_sampling_method(const std::string& s) {
    if (s == "auto") return SamplingMethod::automatic;
    if (s == "exact-cholesky" || s == "cholesky") return SamplingMethod::cholesky;
    if (s == "circulant-embedding" || s == "circulant") return SamplingMethod::circulant;
    throw DomainError("unknown sampling method '" + s + "'");
}

struct SamplerOptions {
    SamplingMethod method = SamplingMethod::automatic;
    std::size_t max_cholesky_points = 4096;
    double jitter_rel = 1e-12;
    int max_embedding_doublings = 4;
};

class FbmSampler {
  public:
    struct Workspace {
        std::vector<std::complex<double>> buf;
        Eigen::VectorXd z;
    };

    FbmSampler(double H, TimeGrid grid, SamplerOptions opt = {})
        : H_(H), grid_(std::make_shared<const TimeGrid>(std::move(grid))), opt_(opt) {
        detail::check_hurst(H);
        const std::size_t npts = grid_->size();
        SamplingMethod m = opt_.method;
        if (m == SamplingMethod::automatic)
            m = (npts <= opt_.max_cholesky_points || !grid_->is_uniform()) ? SamplingMethod::cholesky
                                                                         : SamplingMethod::circulant;
        if (m == SamplingMethod::circulant) {
            detail::require_domain(grid_->is_uniform(), "circulant embedding needs a uniform grid");
            if (!setup_circulant()) {
                warnings_.push_back("circulant embedding is not nonnegative definite; falling back to Cholesky");
                m = SamplingMethod::cholesky;
            }
        }
        if (m == SamplingMethod::cholesky) {
            detail::require_resource(npts <= opt_.max_cholesky_points,
                                     "Cholesky sampling limited to " + std::to_string(opt_.max_cholesky_points) +
                                         " grid points, requested " + std::to_string(npts));
            setup_cholesky();
        }
        method_ = m;
    }

    FbmSampler(const FbmSampler&) = delete;
    FbmSampler& operator=(const FbmSampler&) = delete;

    ~FbmSampler() {
        if (plan_) fftw_destroy_plan(plan_);
    }

    double hurst() const { return H_; }
    const TimeGrid& grid() const { return *grid_; }
    std::shared_ptr<const TimeGrid> grid_ptr() const { return grid_; }
    SamplingMethod method() const { return method_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    std::size_t embedding_size() const { return m_; }

    Workspace make_workspace() const {
        Workspace ws;
        if (method_ == SamplingMethod::circulant) ws.buf.resize(m_);
        else ws.z.resize(static_cast<Eigen::Index>(grid_->steps()));
        return ws;
    }

    // Paths 2k and 2k+1 of the stream (seed, k). Each output has grid().size() entries.
    void sample_pair(std::uint64_t seed, std::uint64_t pair, Workspace& ws, std::vector<double>& p0,
                     std::vector<double>& p1) const {
        if (method_ == SamplingMethod::circulant) {
            circulant_pair(seed, pair, ws, p0, p1);
        } else {
            cholesky_path(seed, 2 * pair, ws, p0);
            cholesky_path(seed, 2 * pair + 1, ws, p1);
        }
    }

    FbmPath sample(std::uint64_t seed, std::uint64_t index) const {
        auto ws = make_workspace();
        std::vector<double> a, b;
        sample_pair(seed, index / 2, ws, a, b);
        return FbmPath{grid_, index % 2 == 0 ? std::move(a) : std::move(b)};
    }

  private:
    // Autocovariance of fGn with step delta at lag k.
    double fgn_acov(std::size_t k, double delta) const {
        const double h2 = 2.0 * H_;
        const double kk = static_cast<double>(k);
        const double v = k == 0 ? 1.0 : 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + std::pow(kk - 1.0, h2));
        return std::pow(delta, h2) * v;
    }

    bool setup_circulant() {
        const std::size_t M = grid_->steps();
        const double delta = grid_->step();
        for (int d = 0; d <= opt_.max_embedding_doublings; ++d) {
            const std::size_t m = (2 * M) << d;
            std::vector<std::complex<double>> c(m);
            for (std::size_t j = 0; j <= m / 2; ++j) {
                c[j] = fgn_acov(j, delta);
                if (j > 0 && j < m / 2) c[m - j] = c[j];
            }
            fftw_plan p = fftw_plan_dft_1d(static_cast<int>(m), reinterpret_cast<fftw_complex*>(c.data()),
                                           reinterpret_cast<fftw_complex*>(c.data()), FFTW_FORWARD,
                                           FFTW_ESTIMATE | FFTW_UNALIGNED);
            fftw_execute(p);
            fftw_destroy_plan(p);
            double lmax = 0.0, lmin = 0.0;
            for (const auto& v : c) {
                lmax = std::max(lmax, v.real());
                lmin = std::min(lmin, v.real());
            }
            if (lmin >= -1e-10 * lmax) {
                m_ = m;
                sqrt_eig_.resize(m);
                const double inv_m = 1.0 / static_cast<double>(m);
                for (std::size_t k = 0; k < m; ++k) sqrt_eig_[k] = std::sqrt(std::max(0.0, c[k].real()) * inv_m);
                if (d > 0) warnings_.push_back("circulant embedding enlarged to size " + std::to_string(m));
                std::vector<std::complex<double>> tmp(m);
                plan_ = fftw_plan_dft_1d(static_cast<int>(m), reinterpret_cast<fftw_complex*>(tmp.data()),
                                         reinterpret_cast<fftw_complex*>(tmp.data()), FFTW_FORWARD,
                                         FFTW_ESTIMATE | FFTW_UNALIGNED);
                return true;
            }
        }
        return false;
    }

    void setup_cholesky() {
        std::vector<double> t(grid_->points().begin() + 1, grid_->points().end());
        Eigen::MatrixXd G = gram_matrix(H_, t);
        Eigen::LLT<Eigen::MatrixXd> llt(G);
        if (llt.info() != Eigen::Success) {
            const double jitter = opt_.jitter_rel * G.trace() / static_cast<double>(G.rows());
            G.diagonal().array() += jitter;
            llt.compute(G);
            detail::require_domain(llt.info() == Eigen::Success, "Gram matrix not positive definite even with jitter");
            warnings_.push_back("Cholesky needed diagonal jitter " + std::to_string(jitter));
        }
        chol_ = llt.matrixL();
    }

    void cholesky_path(std::uint64_t seed, std::uint64_t index, Workspace& ws, std::vector<double>& out) const {
        Philox4x64 eng(seed, index);
        std::normal_distribution<double> nd;
        const auto n = static_cast<Eigen::Index>(grid_->steps());
        for (Eigen::Index i = 0; i < n; ++i) ws.z[i] = nd(eng);
        out.assign(grid_->size(), 0.0);
        Eigen::Map<Eigen::VectorXd> y(out.data() + 1, n);
        y.noalias() = chol_.triangularView<Eigen::Lower>() * ws.z;
    }

    void circulant_pair(std::uint64_t seed, std::uint64_t pair, Workspace& ws, std::vector<double>& p0,
                        std::vector<double>& p1) const {
        // High bit separates circulant streams from Cholesky path streams.
        Philox4x64 eng(seed, pair | (std::uint64_t{1} << 63));
        std::normal_distribution<double> nd;
        for (std::size_t k = 0; k < m_; ++k) {
            const double re = nd(eng);
            const double im = nd(eng);
            ws.buf[k] = {sqrt_eig_[k] * re, sqrt_eig_[k] * im};
        }
        fftw_execute_dft(plan_, reinterpret_cast<fftw_complex*>(ws.buf.data()),
                         reinterpret_cast<fftw_complex*>(ws.buf.data()));
        const std::size_t M = grid_->steps();
        p0.resize(M + 1);
        p1.resize(M + 1);
        p0[0] = p1[0] = 0.0;
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t k = 0; k < M; ++k) {
            s0 += ws.buf[k].real();
            s1 += ws.buf[k].imag();
            p0[k + 1] = s0;
            p1[k + 1] = s1;
        }
    }

    double H_;
    std::shared_ptr<const TimeGrid> grid_;
    SamplerOptions opt_;
    SamplingMethod method_ = SamplingMethod::cholesky;
    std::vector<std::string> warnings_;
    Eigen::MatrixXd chol_;
    std::vector<double> sqrt_eig_;
    std::size_t m_ = 0;
    fftw_plan plan_ = nullptr;
};

} // namespace fbgraph
