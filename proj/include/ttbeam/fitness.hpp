#pragma once

#include <cmath>
#include <vector>

#include "ttbeam/channel.hpp"
#include "ttbeam/common.hpp"
#include "ttbeam/config.hpp"
#include "ttbeam/transceiver.hpp"
#include "ttbeam/waterfill.hpp"

namespace ttbeam {

// Reusable buffers for the per-slot pipeline; one instance per sample loop
// keeps the inner loop free of large allocations.
struct SlotWorkspace {
    MatrixXcd h_bu_o, h_ur_o, h_eff_o;
    MatrixXcd h_bu_c, h_ur_c, h_eff_c;
};

// One slot of the two-timescale protocol: precoder from the outdated
// effective channel, ZF detection and water-filled powers on the current one.
// theta_weights == nullptr removes the reflected path entirely (no IRS).
inline double zf_slot_rate(const StaticChannelState& st, const SystemConfig& cfg,
                           const VectorXcd* theta_weights, const ChannelSample& outdated,
                           const ChannelSample& current, SlotWorkspace& ws) {
    assemble_channel_into(st, outdated, cfg.rician_kappa, ws.h_bu_o, ws.h_ur_o);
    if (theta_weights)
        effective_channel_fast(st, *theta_weights, ws.h_bu_o, ws.h_ur_o, ws.h_eff_o);
    else
        ws.h_eff_o = ws.h_bu_o;
    PrecoderState prec = truncated_svd_precoder(ws.h_eff_o, cfg.n_streams);

    assemble_channel_into(st, current, cfg.rician_kappa, ws.h_bu_c, ws.h_ur_c);
    if (theta_weights)
        effective_channel_fast(st, *theta_weights, ws.h_bu_c, ws.h_ur_c, ws.h_eff_c);
    else
        ws.h_eff_c = ws.h_bu_c;

    EquivalentChannel eq{prec.v_mat.adjoint() * ws.h_eff_c};
    StreamNoise cur = zf_noise_diag_robust(prec, eq);
    if (cur.active.empty()) return 0.0;

    const double p_tot = cfg.total_power_w();
    const double nv = cfg.noise_var();
    double rate = 0.0;
    if (cfg.power_csi_mode == PowerCsiMode::Current) {
        PowerAllocation wf = waterfill(nv * cur.f, p_tot);
        for (size_t k = 0; k < cur.active.size(); ++k) {
            double p = wf.powers(static_cast<Eigen::Index>(k));
            if (p > 0.0) rate += std::log2(1.0 + p / (nv * cur.f(static_cast<Eigen::Index>(k))));
        }
    } else {
        // Powers from the outdated equivalent channel, rates on the current one.
        EquivalentChannel eqo{prec.v_mat.adjoint() * ws.h_eff_o};
        StreamNoise out = zf_noise_diag_robust(prec, eqo);
        if (out.active.empty()) return 0.0;
        PowerAllocation wf = waterfill(nv * out.f, p_tot);
        // Robust active sets are prefixes of the sigma-descending stream order,
        // so powers map to current streams by index.
        for (size_t k = 0; k < cur.active.size(); ++k) {
            double p = k < out.active.size() ? wf.powers(static_cast<Eigen::Index>(k)) : 0.0;
            if (p > 0.0) rate += std::log2(1.0 + p / (nv * cur.f(static_cast<Eigen::Index>(k))));
        }
    }
    return rate;
}

// Sample-driven fitness context: the frozen bank plus its mini-batch
// partition. Batch j holds the contiguous linear indices
// [j L_mb, (j+1) L_mb); linear index l maps to series l / T, slot l % T + 1.
struct SampleFitnessContext {
    const ChannelSampleBank& bank;
    const StaticChannelState& st;
    SystemConfig cfg;
    std::vector<std::vector<int>> batches;
};

inline SampleFitnessContext make_sample_context(const ChannelSampleBank& bank,
                                                const StaticChannelState& st,
                                                const SystemConfig& cfg) {
    if (bank.n_samples() != cfg.n_samples)
        throw std::invalid_argument("make_sample_context: bank size does not match config");
    SampleFitnessContext ctx{bank, st, cfg, {}};
    int n_b = cfg.n_batches();
    ctx.batches.resize(static_cast<size_t>(n_b));
    for (int b = 0; b < n_b; ++b) {
        ctx.batches[static_cast<size_t>(b)].resize(static_cast<size_t>(cfg.batch_size));
        for (int j = 0; j < cfg.batch_size; ++j)
            ctx.batches[static_cast<size_t>(b)][static_cast<size_t>(j)] = b * cfg.batch_size + j;
    }
    return ctx;
}

inline std::vector<int> all_sample_indices(const SampleFitnessContext& ctx) {
    std::vector<int> idx(static_cast<size_t>(ctx.cfg.n_samples));
    for (int i = 0; i < ctx.cfg.n_samples; ++i) idx[static_cast<size_t>(i)] = i;
    return idx;
}

// Mean water-filled ZF rate over the indexed (outdated, current) slot pairs.
inline double aar_over_samples(const ReflectionConfig& theta, const SampleFitnessContext& ctx,
                               const std::vector<int>& indices) {
    if (indices.empty()) throw std::invalid_argument("aar_over_samples: empty index set");
    const int t_slots = ctx.cfg.slots_per_frame;
    VectorXcd w = make_theta_weights(ctx.st, theta);
    SlotWorkspace ws;
    KahanSum sum;
    for (int l : indices) {
        if (l < 0 || l >= ctx.bank.n_samples())
            throw std::out_of_range("aar_over_samples: sample index out of range");
        const auto& series = ctx.bank.series[static_cast<size_t>(l / t_slots)];
        int t = l % t_slots + 1;
        sum.add(zf_slot_rate(ctx.st, ctx.cfg, &w, series[static_cast<size_t>(t - 1)],
                             series[static_cast<size_t>(t)], ws));
    }
    return sum.value() / static_cast<double>(indices.size());
}

// Mini-batch surrogate J^{(i)} = (1 - mu_i) J^{(i-1)} + mu_i * batch AAR,
// mu_i = i^{-0.2}, batch b(i) = ((i-1) mod N_B) + 1. At i = 1 the history is
// annihilated (mu = 1).
inline double mbs_surrogate(const ReflectionConfig& theta, const SampleFitnessContext& ctx,
                            int iteration, double prev_value) {
    if (iteration < 1) throw std::invalid_argument("mbs_surrogate: iteration must be >= 1");
    int b = (iteration - 1) % static_cast<int>(ctx.batches.size());
    double batch_aar = aar_over_samples(theta, ctx, ctx.batches[static_cast<size_t>(b)]);
    double mu = std::pow(static_cast<double>(iteration), -0.2);
    return (1.0 - mu) * prev_value + mu * batch_aar;
}

// S-CSI-only fitness context. The composite channel is rank-one through the
// IRS, so everything theta-dependent reduces to the scalar
// s(theta) = sum_n z_n exp(j theta_n) with z = conj(b_irs_bs) .* b_irs_ue.
struct ScsiContext {
    const StaticChannelState* st = nullptr;
    double kappa = 0.0;
    int n_t = 0, n_r = 0, m = 0, n = 0;
    double amp_d = 0.0;  // sqrt(kappa^2 gain_bu)
    double amp_r = 0.0;  // sqrt(kappa^2 gain_ur gain_br)
    VectorXcd z;
    MatrixXcd outer_ad;  // a_bs * ue_from_irs^H, N_t x N_r
    PrecoderState precoder_los;  // reference V at theta = 0
};

inline MatrixXcd los_effective(const ScsiContext& ctx, const ReflectionConfig& theta) {
    if (theta.phases.size() != ctx.z.size())
        throw std::invalid_argument("los_effective: theta length mismatch");
    cxd s(0.0, 0.0);
    for (Eigen::Index i = 0; i < ctx.z.size(); ++i) s += ctx.z(i) * std::polar(1.0, theta.phases(i));
    return ctx.amp_d * ctx.st->los_bu + (ctx.amp_r * s) * ctx.outer_ad;
}

inline ScsiContext make_scsi_context(const StaticChannelState& st, const SystemConfig& cfg) {
    ScsiContext ctx;
    ctx.st = &st;
    ctx.kappa = cfg.rician_kappa;
    ctx.n_t = cfg.n_tx;
    ctx.n_r = cfg.n_rx;
    ctx.m = cfg.n_streams;
    ctx.n = cfg.n_elements();
    ctx.amp_d = cfg.rician_kappa * std::sqrt(st.gain_bu);
    ctx.amp_r = cfg.rician_kappa * std::sqrt(st.gain_ur * st.gain_br);
    ctx.z = st.b_irs_bs.conjugate().cwiseProduct(st.b_irs_ue);
    ctx.outer_ad = st.a_bs * st.ue_from_irs.adjoint();
    ReflectionConfig zero;
    zero.phases = VectorXd::Zero(ctx.n);
    ctx.precoder_los = truncated_svd_precoder(los_effective(ctx, zero), ctx.m);
    return ctx;
}

// First and second moments of the equivalent channel under S-CSI:
// S = V^H E{H_underline-mean part}, M_phi the per-column NLoS covariance.
struct ScsiMoments {
    MatrixXcd s_mat;  // M x N_r
    MatrixXcd m_phi;  // M x M
};

inline ScsiMoments scsi_moments(const ScsiContext& ctx, const ReflectionConfig& theta,
                                const PrecoderState& prec) {
    const StaticChannelState& st = *ctx.st;
    cxd s(0.0, 0.0);
    for (Eigen::Index i = 0; i < ctx.z.size(); ++i) s += ctx.z(i) * std::polar(1.0, theta.phases(i));
    VectorXcd va = prec.v_mat.adjoint() * st.a_bs;  // M
    ScsiMoments mo;
    mo.s_mat = ctx.amp_d * (prec.v_mat.adjoint() * st.los_bu) +
               (ctx.amp_r * s) * (va * st.ue_from_irs.adjoint());
    double kp2 = 1.0 - ctx.kappa * ctx.kappa;
    mo.m_phi = (kp2 * st.gain_bu) * MatrixXcd::Identity(ctx.m, ctx.m);
    // V^H G G^H V = gain_br * N * (V^H a)(V^H a)^H for the rank-one bridge.
    mo.m_phi.noalias() +=
        (kp2 * st.gain_ur * st.gain_br * static_cast<double>(ctx.n)) * (va * va.adjoint());
    return mo;
}

// J_low(theta) = trace[(N_r M_phi + S S^H)^{-1}], minimized by LBO-PSO.
// V is the truncated SVD precoder of the LoS-only effective channel at theta.
inline double lbo_fitness(const ReflectionConfig& theta, const ScsiContext& ctx) {
    PrecoderState prec = truncated_svd_precoder(los_effective(ctx, theta), ctx.m);
    ScsiMoments mo = scsi_moments(ctx, theta, prec);
    MatrixXcd a = static_cast<double>(ctx.n_r) * mo.m_phi + mo.s_mat * mo.s_mat.adjoint();
    Eigen::LLT<MatrixXcd> llt(a);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("lbo_fitness: matrix not positive definite");
    return llt.solve(MatrixXcd::Identity(ctx.m, ctx.m)).trace().real();
}

// Frobenius gain of the composite LoS channel, maximized by the SPGM benchmark.
inline double spgm_fitness(const ReflectionConfig& theta, const ScsiContext& ctx) {
    return los_effective(ctx, theta).squaredNorm();
}

// E(W^{-1}) = Sigma^{-1} / (dof - m) for W ~ complex Wishart(dof, Sigma).
inline MatrixXcd wishart_inverse_mean(const MatrixXcd& sigma, int dof, int m) {
    if (sigma.rows() != m || sigma.cols() != m)
        throw std::invalid_argument("wishart_inverse_mean: sigma must be m x m");
    if (dof <= m)
        throw std::invalid_argument("wishart_inverse_mean: dof must exceed m (inverse mean infinite)");
    Eigen::LLT<MatrixXcd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("wishart_inverse_mean: sigma not positive definite");
    return llt.solve(MatrixXcd::Identity(m, m)) / static_cast<double>(dof - m);
}

// Analytic AAR lower bound for a fixed theta: the equivalent-channel Gram
// matrix is approximated by a central Wishart with matching first moment,
// its inverse mean feeds a water-filled Jensen bound. Returns 0 when the
// water-filler shuts off a stream (the bound degenerates but stays valid).
// Requires M < N_r.
inline double wishart_lower_bound(const ScsiContext& ctx, const ReflectionConfig& theta,
                                  double total_power, double noise_var) {
    PrecoderState prec = truncated_svd_precoder(los_effective(ctx, theta), ctx.m);
    ScsiMoments mo = scsi_moments(ctx, theta, prec);
    MatrixXcd mean_phi = static_cast<double>(ctx.n_r) * mo.m_phi + mo.s_mat * mo.s_mat.adjoint();
    MatrixXcd scale = mean_phi / static_cast<double>(ctx.n_r);
    MatrixXcd inv_mean = wishart_inverse_mean(scale, ctx.n_r, ctx.m);
    VectorXd noise = noise_var * inv_mean.diagonal().real();
    PowerAllocation wf = waterfill(noise, total_power);
    if (wf.powers.minCoeff() <= 0.0) return 0.0;
    double tr = 0.0;
    for (int k = 0; k < ctx.m; ++k) tr += inv_mean(k, k).real() / wf.powers(k);
    double m_tilde = static_cast<double>(ctx.m) / noise_var;
    return static_cast<double>(ctx.m) * std::log2(1.0 + m_tilde / tr);
}

}  // namespace ttbeam
