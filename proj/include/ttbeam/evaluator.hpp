#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "ttbeam/channel.hpp"
#include "ttbeam/common.hpp"
#include "ttbeam/config.hpp"
#include "ttbeam/fitness.hpp"
#include "ttbeam/pso.hpp"
#include "ttbeam/rng.hpp"
#include "ttbeam/transceiver.hpp"
#include "ttbeam/waterfill.hpp"

namespace ttbeam {

enum class SchemeTag { MbsPso, LboPso, FullPso, Spgm, RandomPhase, NoIrs, SvdOnly };

inline const char* scheme_name(SchemeTag tag) {
    switch (tag) {
        case SchemeTag::MbsPso: return "MbsPso";
        case SchemeTag::LboPso: return "LboPso";
        case SchemeTag::FullPso: return "FullPso";
        case SchemeTag::Spgm: return "Spgm";
        case SchemeTag::RandomPhase: return "RandomPhase";
        case SchemeTag::NoIrs: return "NoIrs";
        case SchemeTag::SvdOnly: return "SvdOnly";
    }
    return "?";
}

inline std::optional<SchemeTag> parse_scheme_tag(const std::string& s) {
    for (SchemeTag t : {SchemeTag::MbsPso, SchemeTag::LboPso, SchemeTag::FullPso, SchemeTag::Spgm,
                        SchemeTag::RandomPhase, SchemeTag::NoIrs, SchemeTag::SvdOnly})
        if (s == scheme_name(t)) return t;
    return std::nullopt;
}

struct Scheme {
    SchemeTag tag = SchemeTag::NoIrs;
    std::optional<ReflectionConfig> theta;  // absent exactly for NoIrs
};

inline void validate(const Scheme& s, int n_elements) {
    if (s.tag == SchemeTag::NoIrs) {
        if (s.theta) throw std::invalid_argument("scheme: NoIrs carries no theta");
        return;
    }
    if (!s.theta) throw std::invalid_argument("scheme: theta required");
    if (s.theta->phases.size() != n_elements)
        throw std::invalid_argument("scheme: theta length mismatch");
    validate(*s.theta);
}

struct AarReport {
    double mean_rate = 0.0;
    double stderr_rate = 0.0;
    int n_frames = 0;
    std::vector<double> per_slot_rates;  // filled only on request
    double wall_time_per_iter = 0.0;     // seconds; optimizer schemes only
};

// Per-stream SINR rate of the conventional SVD transceiver under mismatched
// CSI: combiners and precoder from the outdated SVD, effective gains
// C = U^H H_check^H[t] V, interference from every co-scheduled stream.
inline double svd_only_rate(const PrecoderState& prec, const MatrixXcd& h_eff_current,
                            const VectorXd& powers, double noise_var) {
    int m = static_cast<int>(prec.v_mat.cols());
    if (powers.size() != m) throw std::invalid_argument("svd_only_rate: powers length mismatch");
    if (h_eff_current.rows() != prec.v_mat.rows() || h_eff_current.cols() != prec.rx_mat.rows())
        throw std::invalid_argument("svd_only_rate: dimension mismatch");
    MatrixXcd c = prec.rx_mat.adjoint() * (h_eff_current.adjoint() * prec.v_mat);  // M x M
    double rate = 0.0;
    for (int i = 0; i < m; ++i) {
        if (!(powers(i) > 0.0)) continue;
        double sig = powers(i) * std::norm(c(i, i));
        double intf = 0.0;
        for (int k = 0; k < m; ++k)
            if (k != i && powers(k) > 0.0) intf += powers(k) * std::norm(c(i, k));
        rate += std::log2(1.0 + sig / (intf + noise_var));
    }
    return rate;
}

namespace detail {

// SvdOnly per-slot pipeline: powers are allocated exactly as in the ZF
// schemes (water-filling on the ZF noise factors), only the detector differs.
inline double svd_only_slot_rate(const StaticChannelState& st, const SystemConfig& cfg,
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

    const MatrixXcd& h_eff_power =
        cfg.power_csi_mode == PowerCsiMode::Current ? ws.h_eff_c : ws.h_eff_o;
    EquivalentChannel eq{prec.v_mat.adjoint() * h_eff_power};
    StreamNoise sn = zf_noise_diag_robust(prec, eq);
    if (sn.active.empty()) return 0.0;
    PowerAllocation wf = waterfill(cfg.noise_var() * sn.f, cfg.total_power_w());
    VectorXd powers = VectorXd::Zero(cfg.n_streams);
    for (size_t k = 0; k < sn.active.size(); ++k)
        powers(sn.active[k]) = wf.powers(static_cast<Eigen::Index>(k));
    return svd_only_rate(prec, ws.h_eff_c, powers, cfg.noise_var());
}

}  // namespace detail

// Fresh-frame Monte-Carlo AAR of one scheme. Frame f draws its NLoS state
// from the stream (seed, Evaluation, f), disjoint from the optimization bank
// streams, so schemes evaluated with the same seed share channel noise
// (common random numbers) without reusing training samples.
inline AarReport evaluate_scheme(const Scheme& scheme, const StaticChannelState& st,
                                 const SystemConfig& cfg, double rho, int n_frames,
                                 std::uint64_t seed, bool keep_slots = false) {
    validate(scheme, cfg.n_elements());
    if (n_frames < 1) throw std::invalid_argument("evaluate_scheme: n_frames must be >= 1");
    VectorXcd w;
    const VectorXcd* wp = nullptr;
    if (scheme.tag != SchemeTag::NoIrs) {
        w = make_theta_weights(st, *scheme.theta);
        wp = &w;
    }
    SlotWorkspace ws;
    MeanAccumulator acc;
    AarReport rep;
    if (keep_slots) rep.per_slot_rates.reserve(static_cast<size_t>(n_frames) * cfg.slots_per_frame);
    for (int f = 0; f < n_frames; ++f) {
        auto ix = static_cast<std::uint64_t>(f);
        GaussianRng rng_bu(make_stream(seed, StreamPurpose::Evaluation, 2 * ix));
        GaussianRng rng_ur(make_stream(seed, StreamPurpose::Evaluation, 2 * ix + 1));
        ChannelSample prev = initial_sample(cfg.n_tx, cfg.n_rx, cfg.n_elements(), rng_bu, rng_ur);
        for (int t = 1; t <= cfg.slots_per_frame; ++t) {
            ChannelSample cur = evolve_nlos(prev, rho, rng_bu, rng_ur);
            double r = scheme.tag == SchemeTag::SvdOnly
                           ? detail::svd_only_slot_rate(st, cfg, wp, prev, cur, ws)
                           : zf_slot_rate(st, cfg, wp, prev, cur, ws);
            acc.add(r);
            if (keep_slots) rep.per_slot_rates.push_back(r);
            prev = std::move(cur);
        }
    }
    rep.mean_rate = acc.mean();
    rep.stderr_rate = acc.stderr_mean();
    rep.n_frames = n_frames;
    return rep;
}

inline AarReport evaluate_scheme(const Scheme& scheme, const StaticChannelState& st,
                                 const SystemConfig& cfg, int n_frames, std::uint64_t seed) {
    return evaluate_scheme(scheme, st, cfg, jakes_rho(cfg.norm_doppler), n_frames, seed);
}

struct OptimizeResult {
    ReflectionConfig theta;
    std::vector<double> trace;            // global-best fitness per iteration
    std::vector<VectorXd> best_per_iter;  // global-best phases per iteration
    double wall_time_per_iter = 0.0;      // seconds per PSO step
};

// Large-timescale optimization entry point for every scheme that picks theta.
inline OptimizeResult optimize_scheme(SchemeTag tag, const StaticChannelState& st,
                                      const SystemConfig& cfg, double rho, std::uint64_t seed) {
    validate(cfg);
    OptimizeResult res;
    const int n = cfg.n_elements();
    if (tag == SchemeTag::RandomPhase) {
        GaussianRng rng(make_stream(seed, StreamPurpose::RandomPhase, 0));
        res.theta = random_reflection(n, rng);
        return res;
    }
    if (tag != SchemeTag::MbsPso && tag != SchemeTag::FullPso && tag != SchemeTag::LboPso &&
        tag != SchemeTag::Spgm)
        throw std::invalid_argument("optimize_scheme: scheme does not optimize theta");

    OptimizeSense sense =
        tag == SchemeTag::LboPso ? OptimizeSense::Minimize : OptimizeSense::Maximize;
    Swarm swarm = init_swarm(cfg, sense,
                             GaussianRng(make_stream(seed, StreamPurpose::PsoInit,
                                                     static_cast<std::uint64_t>(tag))));

    // Contexts outlive the fitness closures below.
    std::optional<ChannelSampleBank> bank;
    std::optional<SampleFitnessContext> sctx;
    std::optional<ScsiContext> scsi;
    std::vector<int> all_idx;
    FitnessFn fitness;
    if (tag == SchemeTag::MbsPso || tag == SchemeTag::FullPso) {
        bank.emplace(generate_sample_bank(cfg, rho, seed));
        sctx.emplace(make_sample_context(*bank, st, cfg));
        if (tag == SchemeTag::FullPso) {
            all_idx = all_sample_indices(*sctx);
            fitness = [&](const VectorXd& th, int, int, double) {
                return aar_over_samples(ReflectionConfig{th}, *sctx, all_idx);
            };
        } else {
            fitness = [&](const VectorXd& th, int, int iter, double prev) {
                ReflectionConfig rc{th};
                if (iter == 0) return aar_over_samples(rc, *sctx, sctx->batches.front());
                return mbs_surrogate(rc, *sctx, iter, prev);
            };
        }
    } else {
        scsi.emplace(make_scsi_context(st, cfg));
        if (tag == SchemeTag::LboPso)
            fitness = [&](const VectorXd& th, int, int, double) {
                return lbo_fitness(ReflectionConfig{th}, *scsi);
            };
        else
            fitness = [&](const VectorXd& th, int, int, double) {
                return spgm_fitness(ReflectionConfig{th}, *scsi);
            };
    }

    init_bests(swarm, fitness);  // iteration-0 sweep excluded from step timing
    auto t0 = std::chrono::steady_clock::now();
    PsoResult pr = run(swarm, fitness, cfg.n_iters);
    auto t1 = std::chrono::steady_clock::now();
    res.theta = pr.best;
    res.trace = std::move(pr.trace);
    res.best_per_iter = std::move(pr.best_per_iter);
    res.wall_time_per_iter =
        std::chrono::duration<double>(t1 - t0).count() / static_cast<double>(cfg.n_iters);
    return res;
}

inline OptimizeResult optimize_scheme(SchemeTag tag, const StaticChannelState& st,
                                      const SystemConfig& cfg, std::uint64_t seed) {
    return optimize_scheme(tag, st, cfg, jakes_rho(cfg.norm_doppler), seed);
}

}  // namespace ttbeam
