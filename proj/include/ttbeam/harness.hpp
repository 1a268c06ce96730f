#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ttbeam/evaluator.hpp"

namespace ttbeam {

// Closed-form per-unit operation counts of the two large-timescale fitness
// evaluations, plus the per-PSO-iteration totals they imply.
enum class FlopsKind { Mbs, Lbo };

struct FlopsEstimate {
    std::uint64_t per_unit = 0;       // mbs: per sample per particle; lbo: per particle
    std::uint64_t per_iteration = 0;  // mbs: P * L_mb * F1; lbo: P * F2
};

inline FlopsEstimate flops_estimate(FlopsKind kind, int n_t, int n_r, int n, int m, int l_mb,
                                    int p) {
    if (n_t < 1 || n_r < 1 || n < 1 || m < 1 || l_mb < 1 || p < 1)
        throw std::invalid_argument("flops_estimate: dimensions must be positive");
    auto u = [](int x) { return static_cast<std::uint64_t>(x); };
    std::uint64_t common = 4 * (u(n_t) + u(n_r)) * u(n) * u(n);
    FlopsEstimate est;
    if (kind == FlopsKind::Mbs) {
        est.per_unit = common + 4 * u(m) * u(n_t) * u(n_r) + 4 * u(m) * u(m) * u(n_r) +
                       (4 * u(m) * u(m) * u(m) + u(m) * u(m) + u(m));
        est.per_iteration = u(p) * u(l_mb) * est.per_unit;
    } else {
        est.per_unit = common + 4 * u(n_t) * u(n_t) * u(n_r) +
                       (4 * u(n_t) * u(n_t) * u(n_t) + u(n_t) * u(n_t) + u(n_t)) +
                       2 * u(n_t) * u(n_t);
        est.per_iteration = u(p) * est.per_unit;
    }
    return est;
}

struct ExperimentSpec {
    std::string name;
    std::vector<double> sweep_values;
    std::vector<SchemeTag> schemes;
    std::string output_path;
    std::uint64_t seed = 12345;
    int n_frames = 2000;
};

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "convergence",       "aar_vs_power", "aar_vs_elements", "aar_vs_txantennas",
        "aar_vs_rho",        "timing_vs_elements", "aar_ue_drops"};
    return names;
}

inline ExperimentSpec default_experiment(const std::string& name, const SystemConfig& cfg) {
    ExperimentSpec spec;
    spec.name = name;
    spec.seed = cfg.rng_seed;
    spec.output_path = name + ".csv";
    const std::vector<SchemeTag> all = {SchemeTag::FullPso, SchemeTag::MbsPso, SchemeTag::LboPso,
                                        SchemeTag::Spgm,    SchemeTag::RandomPhase,
                                        SchemeTag::NoIrs};
    if (name == "convergence") {
        spec.sweep_values = {0.0};
        spec.schemes = {SchemeTag::MbsPso, SchemeTag::LboPso, SchemeTag::FullPso};
    } else if (name == "aar_vs_power") {
        spec.sweep_values = {10.0, 15.0, 20.0, 25.0};
        spec.schemes = all;
    } else if (name == "aar_vs_elements") {
        spec.sweep_values = {16.0, 36.0, 64.0};
        spec.schemes = all;
    } else if (name == "aar_vs_txantennas") {
        spec.sweep_values = {4.0, 8.0, 12.0, 16.0};
        spec.schemes = all;
    } else if (name == "aar_vs_rho") {
        spec.sweep_values = {0.0, 0.5, 0.9, 1.0};
        spec.schemes = {SchemeTag::MbsPso, SchemeTag::SvdOnly, SchemeTag::NoIrs};
    } else if (name == "timing_vs_elements") {
        spec.sweep_values = {16.0, 36.0, 64.0};
        spec.schemes = {SchemeTag::MbsPso, SchemeTag::FullPso, SchemeTag::LboPso};
    } else if (name == "aar_ue_drops") {
        spec.sweep_values = {1.0, 2.0, 3.0, 4.0, 5.0};
        spec.schemes = {SchemeTag::MbsPso, SchemeTag::RandomPhase, SchemeTag::NoIrs};
    } else {
        throw std::invalid_argument("unknown experiment: " + name);
    }
    return spec;
}

// UE position sampled uniformly on a horizontal disk of the given radius
// around the configured UE location (height kept).
inline std::array<double, 3> sample_ue_position(const SystemConfig& cfg, std::uint64_t seed,
                                                int drop, double radius = 10.0) {
    GaussianRng rng(make_stream(seed, StreamPurpose::UeDisk, static_cast<std::uint64_t>(drop)));
    double r = radius * std::sqrt(rng.uniform());
    double ang = 2.0 * pi * rng.uniform();
    return {cfg.ue_pos[0] + r * std::cos(ang), cfg.ue_pos[1] + r * std::sin(ang), cfg.ue_pos[2]};
}

namespace detail {

inline std::string csv_num(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(12);
    os << v;
    return os.str();
}

// Sweep-specific config adjustment; throws on values the experiment cannot
// realize (e.g. a non-square element count).
inline SystemConfig apply_sweep(const SystemConfig& base, const std::string& name, double value,
                                std::uint64_t seed) {
    SystemConfig cfg = base;
    if (name == "aar_vs_power") {
        cfg.total_power_dbm = value;
    } else if (name == "aar_vs_elements" || name == "timing_vs_elements") {
        int n = static_cast<int>(std::lround(value));
        int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
        if (n < 1 || side * side != n)
            throw std::invalid_argument(name + ": element count must be a perfect square");
        cfg.irs_rows = side;
        cfg.irs_cols = side;
    } else if (name == "aar_vs_txantennas") {
        int nt = static_cast<int>(std::lround(value));
        if (nt < 1 || std::abs(value - nt) > 1e-9)
            throw std::invalid_argument(name + ": antenna count must be a positive integer");
        cfg.n_tx = nt;
    } else if (name == "aar_vs_rho") {
        if (!(value >= 0.0 && value <= 1.0))
            throw std::invalid_argument(name + ": rho must lie in [0, 1]");
    } else if (name == "aar_ue_drops") {
        cfg.ue_pos = sample_ue_position(base, seed, static_cast<int>(std::lround(value)));
    } else if (name != "convergence") {
        throw std::invalid_argument("unknown experiment: " + name);
    }
    validate(cfg);
    return cfg;
}

}  // namespace detail

// Runs the named experiment and streams CSV rows. Sweep experiments emit
//   sweep_value,scheme,mean_rate,stderr,n_frames,iters,wall_time_per_iter_s,seed
// convergence emits
//   iter,scheme,fitness,aar_estimate
// The wall_time_per_iter_s column is measured and therefore the one column
// that varies between identically seeded runs.
inline void run_experiment_to(const ExperimentSpec& spec, const SystemConfig& base,
                              std::ostream& out) {
    validate(base);
    if (spec.sweep_values.empty()) throw std::invalid_argument("experiment: empty sweep");
    if (spec.schemes.empty()) throw std::invalid_argument("experiment: no schemes");
    if (spec.n_frames < 1) throw std::invalid_argument("experiment: n_frames must be >= 1");

    if (spec.name == "convergence") {
        out << "iter,scheme,fitness,aar_estimate\n";
        double rho = jakes_rho(base.norm_doppler);
        StaticChannelState st = build_static_state(base);
        ChannelSampleBank bank = generate_sample_bank(base, rho, spec.seed);
        SampleFitnessContext ctx = make_sample_context(bank, st, base);
        std::vector<int> all = all_sample_indices(ctx);
        for (SchemeTag tag : spec.schemes) {
            if (tag == SchemeTag::NoIrs || tag == SchemeTag::SvdOnly)
                throw std::invalid_argument("convergence: scheme has no optimizer trace");
            OptimizeResult res = optimize_scheme(tag, st, base, rho, spec.seed);
            for (size_t i = 0; i < res.trace.size(); ++i) {
                double aar = aar_over_samples(ReflectionConfig{res.best_per_iter[i]}, ctx, all);
                out << (i + 1) << ',' << scheme_name(tag) << ',' << detail::csv_num(res.trace[i])
                    << ',' << detail::csv_num(aar) << '\n';
            }
        }
        return;
    }

    out << "sweep_value,scheme,mean_rate,stderr,n_frames,iters,wall_time_per_iter_s,seed\n";
    for (double value : spec.sweep_values) {
        SystemConfig cfg = detail::apply_sweep(base, spec.name, value, spec.seed);
        double rho = spec.name == "aar_vs_rho" ? value : jakes_rho(cfg.norm_doppler);
        StaticChannelState st = build_static_state(cfg);
        std::optional<OptimizeResult> mbs_cached;  // SvdOnly reuses the MbsPso phases
        for (SchemeTag tag : spec.schemes) {
            Scheme scheme{tag, std::nullopt};
            int iters = 0;
            double wall = 0.0;
            if (tag == SchemeTag::NoIrs) {
                // no phases
            } else if (tag == SchemeTag::SvdOnly) {
                if (!mbs_cached)
                    mbs_cached = optimize_scheme(SchemeTag::MbsPso, st, cfg, rho, spec.seed);
                scheme.theta = mbs_cached->theta;
            } else {
                OptimizeResult res = optimize_scheme(tag, st, cfg, rho, spec.seed);
                if (tag == SchemeTag::MbsPso) mbs_cached = res;
                scheme.theta = res.theta;
                iters = static_cast<int>(res.trace.size());
                wall = res.wall_time_per_iter;
            }
            AarReport rep = evaluate_scheme(scheme, st, cfg, rho, spec.n_frames, spec.seed);
            out << detail::csv_num(value) << ',' << scheme_name(tag) << ','
                << detail::csv_num(rep.mean_rate) << ',' << detail::csv_num(rep.stderr_rate) << ','
                << rep.n_frames << ',' << iters << ',' << detail::csv_num(wall) << ',' << spec.seed
                << '\n';
        }
    }
}

inline void run_experiment(const ExperimentSpec& spec, const SystemConfig& base) {
    std::ofstream out(spec.output_path);
    if (!out) throw std::runtime_error("cannot open output file: " + spec.output_path);
    run_experiment_to(spec, base, out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + spec.output_path);
}

}  // namespace ttbeam
