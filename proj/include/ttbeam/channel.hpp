#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "ttbeam/common.hpp"
#include "ttbeam/config.hpp"
#include "ttbeam/rng.hpp"

namespace ttbeam {

// Angles and distances of the three links, derived from the configured
// 3-D coordinates. Azimuths via atan2 in the xy-plane, elevations via asin
// of the height ratio; all arrays are uniform linear/planar with the
// configured spacing ratio.
struct LinkGeometry {
    double aod_bs = 0.0;        // departure azimuth at the BS toward the IRS
    double aoa_irs_elev = 0.0;  // arrival elevation at the IRS from the BS
    double aoa_irs_azim = 0.0;  // arrival azimuth at the IRS from the BS
    double aod_bs_ue = 0.0;     // departure azimuth at the BS toward the UE
    double aoa_ue_bs = 0.0;     // arrival azimuth at the UE from the BS
    double aod_irs_elev = 0.0;  // departure elevation at the IRS toward the UE
    double aod_irs_azim = 0.0;  // departure azimuth at the IRS toward the UE
    double aoa_ue_irs = 0.0;    // arrival azimuth at the UE from the IRS
    double dist_bu = 0.0;
    double dist_br = 0.0;
    double dist_ur = 0.0;
};

namespace detail {

inline std::pair<double, double> azim_elev(const std::array<double, 3>& from,
                                           const std::array<double, 3>& to) {
    double dx = to[0] - from[0], dy = to[1] - from[1], dz = to[2] - from[2];
    double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    return {std::atan2(dy, dx), std::asin(dz / d)};
}

inline double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    double dx = b[0] - a[0], dy = b[1] - a[1], dz = b[2] - a[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace detail

inline LinkGeometry geometry_from_positions(const std::array<double, 3>& bs,
                                            const std::array<double, 3>& irs,
                                            const std::array<double, 3>& ue) {
    LinkGeometry g;
    g.dist_br = detail::distance(bs, irs);
    g.dist_bu = detail::distance(bs, ue);
    g.dist_ur = detail::distance(irs, ue);
    if (!(g.dist_br > 0.0 && g.dist_bu > 0.0 && g.dist_ur > 0.0))
        throw std::domain_error("geometry: coincident node positions");
    g.aod_bs = detail::azim_elev(bs, irs).first;
    auto [az_ib, el_ib] = detail::azim_elev(irs, bs);
    g.aoa_irs_azim = az_ib;
    g.aoa_irs_elev = el_ib;
    g.aod_bs_ue = detail::azim_elev(bs, ue).first;
    g.aoa_ue_bs = detail::azim_elev(ue, bs).first;
    auto [az_iu, el_iu] = detail::azim_elev(irs, ue);
    g.aod_irs_azim = az_iu;
    g.aod_irs_elev = el_iu;
    g.aoa_ue_irs = detail::azim_elev(ue, irs).first;
    return g;
}

// ULA response with phase argument `arg`: element k = exp(-j 2 pi k d/lambda arg).
inline VectorXcd steering_ula(int n, double arg, double spacing) {
    if (n < 1) throw std::invalid_argument("steering: n must be >= 1");
    VectorXcd v(n);
    for (int k = 0; k < n; ++k) v(k) = std::polar(1.0, -2.0 * pi * k * spacing * arg);
    return v;
}

inline VectorXcd steering_bs(double phi, int n_tx, double spacing) {
    return steering_ula(n_tx, std::sin(phi), spacing);
}

// UPA response: Kronecker product of the N_y factor (sin elev * sin azim)
// and the N_x factor (cos elev).
inline VectorXcd steering_irs(double phi_e, double phi_a, int n_x, int n_y, double spacing) {
    VectorXcd by = steering_ula(n_y, std::sin(phi_e) * std::sin(phi_a), spacing);
    VectorXcd bx = steering_ula(n_x, std::cos(phi_e), spacing);
    VectorXcd out(n_x * n_y);
    for (int j = 0; j < n_y; ++j)
        for (int i = 0; i < n_x; ++i) out(j * n_x + i) = by(j) * bx(i);
    return out;
}

// L = 10^(ref_db/10) * (d / 1 m)^(-alpha), linear power gain.
inline double path_loss(double dist, double ple, double ref_loss_db) {
    if (!(dist > 0.0)) throw std::domain_error("path_loss: dist must be > 0");
    return db_to_linear(ref_loss_db) * std::pow(dist, -ple);
}

inline double jakes_rho(double norm_doppler) {
    if (!(norm_doppler >= 0.0)) throw std::domain_error("jakes_rho: norm_doppler must be >= 0");
    return std::cyl_bessel_j(0.0, 2.0 * pi * norm_doppler);
}

// Deterministic channel pieces: the rank-one BS-IRS channel, unit-modulus
// LoS matrices of the two Rician links, and the large-scale gains. The
// steering factors are kept alongside the assembled matrices so hot loops
// can exploit the rank-one structure of G and of los_ur.
struct StaticChannelState {
    MatrixXcd g_mat;    // N_t x N, sqrt(gain_br) * a_bs * b_irs_bs^H
    MatrixXcd los_bu;   // N_t x N_r, unit-modulus entries
    MatrixXcd los_ur;   // N x N_r, unit-modulus entries
    double gain_bu = 0.0;
    double gain_br = 0.0;
    double gain_ur = 0.0;
    VectorXcd a_bs;       // N_t, BS steering toward the IRS
    VectorXcd b_irs_bs;   // N, IRS steering toward the BS
    VectorXcd b_irs_ue;   // N, IRS steering toward the UE
    VectorXcd ue_from_irs;  // N_r, UE steering toward the IRS
};

inline StaticChannelState build_static_state(const LinkGeometry& geom, const SystemConfig& cfg) {
    StaticChannelState st;
    double sp = cfg.element_spacing_ratio;
    st.gain_bu = path_loss(geom.dist_bu, cfg.ple_bu, cfg.ref_loss_db);
    st.gain_br = path_loss(geom.dist_br, cfg.ple_br, cfg.ref_loss_db);
    st.gain_ur = path_loss(geom.dist_ur, cfg.ple_ur, cfg.ref_loss_db);

    st.a_bs = steering_bs(geom.aod_bs, cfg.n_tx, sp);
    st.b_irs_bs = steering_irs(geom.aoa_irs_elev, geom.aoa_irs_azim, cfg.irs_rows, cfg.irs_cols, sp);
    st.g_mat = std::sqrt(st.gain_br) * st.a_bs * st.b_irs_bs.adjoint();

    VectorXcd a_bs_ue = steering_bs(geom.aod_bs_ue, cfg.n_tx, sp);
    VectorXcd ue_from_bs = steering_ula(cfg.n_rx, std::sin(geom.aoa_ue_bs), sp);
    st.los_bu = a_bs_ue * ue_from_bs.adjoint();

    st.b_irs_ue = steering_irs(geom.aod_irs_elev, geom.aod_irs_azim, cfg.irs_rows, cfg.irs_cols, sp);
    st.ue_from_irs = steering_ula(cfg.n_rx, std::sin(geom.aoa_ue_irs), sp);
    st.los_ur = st.b_irs_ue * st.ue_from_irs.adjoint();
    return st;
}

inline StaticChannelState build_static_state(const SystemConfig& cfg) {
    return build_static_state(geometry_from_positions(cfg.bs_pos, cfg.irs_pos, cfg.ue_pos), cfg);
}

// NLoS state of both Rician links at one slot, unit-variance entries.
struct ChannelSample {
    MatrixXcd nlos_bu;  // N_t x N_r
    MatrixXcd nlos_ur;  // N x N_r
    int slot_index = 0;
};

// Stationary AR(1) start. Each link gets its own stream so the direct-link
// draws never shift when the reflector size changes.
inline ChannelSample initial_sample(int n_tx, int n_rx, int n_irs, GaussianRng& rng_bu,
                                    GaussianRng& rng_ur) {
    ChannelSample s;
    s.nlos_bu.resize(n_tx, n_rx);
    s.nlos_ur.resize(n_irs, n_rx);
    rng_bu.fill_cnormal(s.nlos_bu);
    rng_ur.fill_cnormal(s.nlos_ur);
    s.slot_index = 0;
    return s;
}

// X[t] = rho X[t-1] + E[t], E ~ CN(0, (1 - rho^2) I), independent per link.
inline ChannelSample evolve_nlos(const ChannelSample& prev, double rho, GaussianRng& rng_bu,
                                 GaussianRng& rng_ur) {
    if (!(std::abs(rho) <= 1.0)) throw std::domain_error("evolve_nlos: |rho| must be <= 1");
    double scale = std::sqrt(1.0 - rho * rho);
    ChannelSample s;
    s.nlos_bu.resize(prev.nlos_bu.rows(), prev.nlos_bu.cols());
    s.nlos_ur.resize(prev.nlos_ur.rows(), prev.nlos_ur.cols());
    MatrixXcd e(prev.nlos_bu.rows(), prev.nlos_bu.cols());
    rng_bu.fill_cnormal(e);
    s.nlos_bu = rho * prev.nlos_bu + scale * e;
    MatrixXcd e2(prev.nlos_ur.rows(), prev.nlos_ur.cols());
    rng_ur.fill_cnormal(e2);
    s.nlos_ur = rho * prev.nlos_ur + scale * e2;
    s.slot_index = prev.slot_index + 1;
    return s;
}

// H = sqrt(L) (kappa Hbar + sqrt(1 - kappa^2) Htilde) for both links.
// Allocation-free variant for sample loops.
inline void assemble_channel_into(const StaticChannelState& st, const ChannelSample& sample,
                                  double kappa, MatrixXcd& h_bu, MatrixXcd& h_ur) {
    if (sample.nlos_bu.rows() != st.los_bu.rows() || sample.nlos_bu.cols() != st.los_bu.cols() ||
        sample.nlos_ur.rows() != st.los_ur.rows() || sample.nlos_ur.cols() != st.los_ur.cols())
        throw std::invalid_argument("assemble_channel: dimension mismatch");
    double kperp = std::sqrt(1.0 - kappa * kappa);
    double sbu = std::sqrt(st.gain_bu);
    double sur = std::sqrt(st.gain_ur);
    h_bu = (sbu * kappa) * st.los_bu + (sbu * kperp) * sample.nlos_bu;
    h_ur = (sur * kappa) * st.los_ur + (sur * kperp) * sample.nlos_ur;
}

inline std::pair<MatrixXcd, MatrixXcd> assemble_channel(const StaticChannelState& st,
                                                        const ChannelSample& sample,
                                                        double kappa) {
    MatrixXcd h_bu, h_ur;
    assemble_channel_into(st, sample, kappa, h_bu, h_ur);
    return {std::move(h_bu), std::move(h_ur)};
}

// L_B/T independent AR(1) series of T+1 slots each (slot 0 plus T steps).
struct ChannelSampleBank {
    std::vector<std::vector<ChannelSample>> series;
    double rho = 1.0;

    int n_series() const { return static_cast<int>(series.size()); }
    int slots_per_series() const {
        return series.empty() ? 0 : static_cast<int>(series.front().size());
    }
    // Total samples usable as (outdated, current) pairs.
    int n_samples() const { return n_series() * (slots_per_series() - 1); }
};

inline ChannelSampleBank generate_sample_bank(const SystemConfig& cfg, double rho,
                                              std::uint64_t seed) {
    if (cfg.n_samples % cfg.slots_per_frame != 0)
        throw std::invalid_argument("generate_sample_bank: T must divide L_B");
    int n_series = cfg.n_samples / cfg.slots_per_frame;
    ChannelSampleBank bank;
    bank.rho = rho;
    bank.series.resize(n_series);
    for (int s = 0; s < n_series; ++s) {
        auto ix = static_cast<std::uint64_t>(s);
        GaussianRng rng_bu(make_stream(seed, StreamPurpose::SampleBank, 2 * ix));
        GaussianRng rng_ur(make_stream(seed, StreamPurpose::SampleBank, 2 * ix + 1));
        auto& ser = bank.series[s];
        ser.reserve(cfg.slots_per_frame + 1);
        ser.push_back(initial_sample(cfg.n_tx, cfg.n_rx, cfg.n_elements(), rng_bu, rng_ur));
        for (int t = 0; t < cfg.slots_per_frame; ++t)
            ser.push_back(evolve_nlos(ser.back(), rho, rng_bu, rng_ur));
    }
    return bank;
}

inline ChannelSampleBank generate_sample_bank(const SystemConfig& cfg, std::uint64_t seed) {
    return generate_sample_bank(cfg, jakes_rho(cfg.norm_doppler), seed);
}

// Flat binary bank format for cross-implementation checks: magic "TTBK",
// u32 version, u64 n_series, u32 slots_per_series, u32 n_tx, u32 n_rx,
// u32 n_irs, f64 rho, then per series/slot the BS-UE and IRS-UE NLoS
// matrices in row-major order with real/imag doubles interleaved.
inline void export_bank(const ChannelSampleBank& bank, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("export_bank: cannot open " + path);
    auto put_u32 = [&](std::uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
    auto put_u64 = [&](std::uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); };
    auto put_f64 = [&](double v) { f.write(reinterpret_cast<const char*>(&v), 8); };
    f.write("TTBK", 4);
    put_u32(1);
    put_u64(static_cast<std::uint64_t>(bank.n_series()));
    std::uint32_t slots = static_cast<std::uint32_t>(bank.slots_per_series());
    std::uint32_t nt = 0, nr = 0, ni = 0;
    if (bank.n_series() > 0 && slots > 0) {
        const auto& m = bank.series[0][0];
        nt = static_cast<std::uint32_t>(m.nlos_bu.rows());
        nr = static_cast<std::uint32_t>(m.nlos_bu.cols());
        ni = static_cast<std::uint32_t>(m.nlos_ur.rows());
    }
    put_u32(slots);
    put_u32(nt);
    put_u32(nr);
    put_u32(ni);
    put_f64(bank.rho);
    auto put_mat = [&](const MatrixXcd& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                put_f64(m(i, j).real());
                put_f64(m(i, j).imag());
            }
    };
    for (const auto& ser : bank.series)
        for (const auto& s : ser) {
            put_mat(s.nlos_bu);
            put_mat(s.nlos_ur);
        }
    if (!f) throw std::runtime_error("export_bank: write failure on " + path);
}

inline ChannelSampleBank import_bank(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("import_bank: cannot open " + path);
    auto get_u32 = [&] {
        std::uint32_t v = 0;
        f.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    auto get_u64 = [&] {
        std::uint64_t v = 0;
        f.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    auto get_f64 = [&] {
        double v = 0;
        f.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "TTBK", 4) != 0)
        throw std::runtime_error("import_bank: bad magic in " + path);
    if (get_u32() != 1) throw std::runtime_error("import_bank: unsupported version");
    std::uint64_t n_series = get_u64();
    std::uint32_t slots = get_u32(), nt = get_u32(), nr = get_u32(), ni = get_u32();
    ChannelSampleBank bank;
    bank.rho = get_f64();
    bank.series.resize(n_series);
    auto get_mat = [&](MatrixXcd& m, int rows, int cols) {
        m.resize(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                double re = get_f64();
                double im = get_f64();
                m(i, j) = cxd(re, im);
            }
    };
    for (auto& ser : bank.series) {
        ser.resize(slots);
        for (std::uint32_t t = 0; t < slots; ++t) {
            get_mat(ser[t].nlos_bu, nt, nr);
            get_mat(ser[t].nlos_ur, ni, nr);
            ser[t].slot_index = static_cast<int>(t);
        }
    }
    if (!f) throw std::runtime_error("import_bank: truncated file " + path);
    return bank;
}

}  // namespace ttbeam
