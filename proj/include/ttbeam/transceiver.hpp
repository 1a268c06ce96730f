#pragma once

#include <vector>

#include "ttbeam/channel.hpp"
#include "ttbeam/common.hpp"
#include "ttbeam/rng.hpp"

namespace ttbeam {

// IRS phase vector, entries constrained to (-pi, pi].
struct ReflectionConfig {
    VectorXd phases;
};

inline void validate(const ReflectionConfig& r) {
    for (Eigen::Index i = 0; i < r.phases.size(); ++i)
        if (!(r.phases(i) > -pi && r.phases(i) <= pi))
            throw std::invalid_argument("reflection phase outside (-pi, pi]");
}

inline ReflectionConfig random_reflection(int n, GaussianRng& rng) {
    ReflectionConfig r;
    r.phases.resize(n);
    for (int i = 0; i < n; ++i) r.phases(i) = pi - 2.0 * pi * rng.uniform();
    return r;
}

inline VectorXcd unit_phasor(const VectorXd& phases) {
    VectorXcd e(phases.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) e(i) = std::polar(1.0, phases(i));
    return e;
}

// H_check = H_d + G diag(exp(j theta)) H_r, general (dense G) form.
inline MatrixXcd effective_channel(const ReflectionConfig& theta, const MatrixXcd& h_bu,
                                   const MatrixXcd& h_ur, const MatrixXcd& g_mat) {
    if (g_mat.cols() != h_ur.rows() || g_mat.rows() != h_bu.rows() ||
        h_ur.cols() != h_bu.cols() || theta.phases.size() != g_mat.cols())
        throw std::invalid_argument("effective_channel: dimension mismatch");
    return h_bu + g_mat * unit_phasor(theta.phases).asDiagonal() * h_ur;
}

// Rank-one fast path: G Theta H_r = a_bs * (w^T H_r) with
// w = sqrt(gain_br) conj(b_irs_bs) .* exp(j theta), so only w depends on theta.
inline VectorXcd make_theta_weights(const StaticChannelState& st, const ReflectionConfig& theta) {
    if (theta.phases.size() != st.b_irs_bs.size())
        throw std::invalid_argument("make_theta_weights: theta length mismatch");
    VectorXcd w(st.b_irs_bs.size());
    double g = std::sqrt(st.gain_br);
    for (Eigen::Index n = 0; n < w.size(); ++n)
        w(n) = g * std::conj(st.b_irs_bs(n)) * std::polar(1.0, theta.phases(n));
    return w;
}

inline void effective_channel_fast(const StaticChannelState& st, const VectorXcd& w,
                                   const MatrixXcd& h_bu, const MatrixXcd& h_ur,
                                   MatrixXcd& out) {
    out = h_bu;
    Eigen::RowVectorXcd mix = w.transpose() * h_ur;  // 1 x N_r
    out.noalias() += st.a_bs * mix;
}

// Outdated-CSI SVD transceiver state. v_mat holds the transmit-side singular
// vectors (the precoder), rx_mat the receive-side ones, paired column-wise so
// that h ~ sum_k sigma_k v_k rx_k^H. rank counts the numerically nonzero
// singular values among the m requested; trailing degenerate columns are
// orthonormal completions and carry sigma = 0.
struct PrecoderState {
    MatrixXcd v_mat;          // N_t x M
    MatrixXcd rx_mat;         // N_r x M
    VectorXd singular_values; // length M, descending
    int rank = 0;
};

namespace detail {

// Deterministic column phase: rotate so the largest-magnitude entry is
// real-positive; returns the applied factor.
inline cxd fix_phase(Eigen::Ref<VectorXcd> col) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
        double a = std::abs(col(i));
        if (a > best) {
            best = a;
            imax = i;
        }
    }
    if (best <= 0.0) return cxd(1.0, 0.0);
    cxd factor = std::conj(col(imax)) / best;
    col *= factor;
    return factor;
}

// Gram-Schmidt a canonical basis vector against the first `have` columns.
inline void complete_orthonormal(MatrixXcd& basis, int have, int col) {
    int n = static_cast<int>(basis.rows());
    for (int cand = 0; cand < n; ++cand) {
        VectorXcd v = VectorXcd::Zero(n);
        v(cand) = 1.0;
        for (int k = 0; k < have; ++k) v -= basis.col(k).dot(v) * basis.col(k);
        double nv = v.norm();
        if (nv > 0.5) {
            basis.col(col) = v / nv;
            return;
        }
    }
    throw std::runtime_error("orthonormal completion failed");
}

}  // namespace detail

inline PrecoderState truncated_svd_precoder(const MatrixXcd& h, int m) {
    int nt = static_cast<int>(h.rows());
    int nr = static_cast<int>(h.cols());
    if (m < 1 || m > std::min(nt, nr))
        throw std::invalid_argument("truncated_svd_precoder: m out of range");
    // Eigen-decompose the small Gram matrix h^H h and recover the transmit
    // factors as h r / sigma; cheaper than a full SVD for nr << nt.
    MatrixXcd gram = h.adjoint() * h;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("truncated_svd_precoder: eigensolver failed");

    PrecoderState p;
    p.v_mat.resize(nt, m);
    p.rx_mat.resize(nr, m);
    p.singular_values.resize(m);
    double smax = std::sqrt(std::max(es.eigenvalues()(nr - 1), 0.0));
    p.rank = 0;
    for (int k = 0; k < m; ++k) {
        int idx = nr - 1 - k;  // eigenvalues ascend
        double sigma = std::sqrt(std::max(es.eigenvalues()(idx), 0.0));
        VectorXcd r = es.eigenvectors().col(idx);
        p.singular_values(k) = sigma;
        p.rx_mat.col(k) = r;
        // The Gram route floors sigma at ~sqrt(eps) * smax; anything below
        // 1e-7 * smax is an exact zero contaminated by eigensolver noise.
        if (sigma > smax * 1e-7 && sigma > 0.0) {
            VectorXcd u = h * r / sigma;
            u /= u.norm();
            p.v_mat.col(k) = u;
            cxd factor = detail::fix_phase(p.v_mat.col(k));
            p.rx_mat.col(k) *= factor;  // keep the v/rx pairing
            ++p.rank;
        } else {
            p.singular_values(k) = 0.0;
            detail::complete_orthonormal(p.v_mat, k, k);
            detail::fix_phase(p.v_mat.col(k));
            detail::fix_phase(p.rx_mat.col(k));
        }
    }
    return p;
}

// H_underline[t] = V^H[t-1] H_check[t], the channel the UE estimates.
struct EquivalentChannel {
    MatrixXcd h_eq;  // M x N_r
};

inline EquivalentChannel equivalent_channel(const PrecoderState& p, const MatrixXcd& h_eff_current) {
    if (p.v_mat.rows() != h_eff_current.rows())
        throw std::invalid_argument("equivalent_channel: dimension mismatch");
    return {p.v_mat.adjoint() * h_eff_current};
}

// Diagonal of (H_underline H_underline^H)^{-1}: the ZF noise-enhancement
// factors f_m. Throws on a singular or badly conditioned covariance.
inline VectorXd inv_cov_diag(const EquivalentChannel& eq) {
    int m = static_cast<int>(eq.h_eq.rows());
    if (m > eq.h_eq.cols())
        throw std::invalid_argument("inv_cov_diag: more streams than receive antennas");
    MatrixXcd phi = eq.h_eq * eq.h_eq.adjoint();
    Eigen::LLT<MatrixXcd> llt(phi);
    if (llt.info() != Eigen::Success) throw std::runtime_error("inv_cov_diag: singular covariance");
    MatrixXcd inv = llt.solve(MatrixXcd::Identity(m, m));
    VectorXd f = inv.diagonal().real();
    // trace(phi) * sum(f) bounds the condition number from above.
    if (!(phi.trace().real() * f.sum() < 1e12) || !(f.minCoeff() > 0.0))
        throw std::runtime_error("inv_cov_diag: singular covariance");
    return f;
}

// Robust variant for Monte-Carlo loops: streams whose covariance rows make
// the solve singular are dropped (they get zero power downstream) instead of
// aborting the slot. Streams are ordered by descending sigma, so dropping
// from the back removes the weakest first.
struct StreamNoise {
    std::vector<int> active;  // stream indices with finite noise factors
    VectorXd f;               // noise factors, aligned with `active`
};

inline StreamNoise zf_noise_diag_robust(const PrecoderState& p, const EquivalentChannel& eq) {
    int m = static_cast<int>(eq.h_eq.rows());
    int take = std::min(p.rank, m);
    while (take > 0) {
        MatrixXcd sub = eq.h_eq.topRows(take);
        MatrixXcd phi = sub * sub.adjoint();
        Eigen::LLT<MatrixXcd> llt(phi);
        if (llt.info() == Eigen::Success) {
            MatrixXcd inv = llt.solve(MatrixXcd::Identity(take, take));
            VectorXd f = inv.diagonal().real();
            if (phi.trace().real() * f.sum() < 1e12 && f.minCoeff() > 0.0) {
                StreamNoise out;
                out.active.resize(take);
                for (int k = 0; k < take; ++k) out.active[k] = k;
                out.f = std::move(f);
                return out;
            }
        }
        --take;
    }
    return {};
}

// W_r^H H_check^H V: equals I_M when the ZF solve is exact.
inline MatrixXcd zf_detect_identity(const PrecoderState& p, const MatrixXcd& h_eff_current) {
    EquivalentChannel eq = equivalent_channel(p, h_eff_current);
    int m = static_cast<int>(eq.h_eq.rows());
    MatrixXcd phi = eq.h_eq * eq.h_eq.adjoint();
    Eigen::LLT<MatrixXcd> llt(phi);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("zf_detect_identity: singular covariance");
    MatrixXcd rhs = eq.h_eq * (h_eff_current.adjoint() * p.v_mat);
    (void)m;
    return llt.solve(rhs);
}

// Sum-rate sum_m log2(1 + P_m / (sigma^2 f_m)).
inline double per_slot_rate(const VectorXd& p, const VectorXd& f, double noise_var) {
    if (p.size() != f.size()) throw std::invalid_argument("per_slot_rate: size mismatch");
    if (!(noise_var > 0.0)) throw std::invalid_argument("per_slot_rate: noise_var must be > 0");
    double rate = 0.0;
    for (Eigen::Index m = 0; m < p.size(); ++m) {
        if (p(m) < 0.0) throw std::invalid_argument("per_slot_rate: negative power");
        if (!(f(m) > 0.0)) throw std::invalid_argument("per_slot_rate: f must be > 0");
        if (p(m) > 0.0) rate += std::log2(1.0 + p(m) / (noise_var * f(m)));
    }
    return rate;
}

}  // namespace ttbeam
