#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>
#include <string>

#include "ttbeam/common.hpp"

namespace ttbeam {

enum class PowerCsiMode { Current, Delayed };

// System-wide simulation parameters. Defaults reproduce the reference
// operating point; every field can be overridden from a flat config file.
struct SystemConfig {
    int n_tx = 8;                 // N_t
    int n_rx = 4;                 // N_r
    int n_streams = 4;            // M
    int irs_rows = 8;             // N_x
    int irs_cols = 8;             // N_y
    double rician_kappa = std::sqrt(0.75);  // kappa; kappa^2/(1-kappa^2) = 3
    double norm_doppler = 0.01;   // normalized Doppler f_d * tau
    double element_spacing_ratio = 0.5;     // d / lambda
    double ple_bu = 3.6;
    double ple_br = 2.2;
    double ple_ur = 2.2;
    double ref_loss_db = -30.0;   // path loss at 1 m
    std::array<double, 3> bs_pos{0.0, 0.0, 5.0};
    std::array<double, 3> irs_pos{100.0, 0.0, 5.0};
    std::array<double, 3> ue_pos{100.0, 10.0, 1.0};
    double total_power_dbm = 20.0;
    double noise_power_dbm = -80.0;
    int slots_per_frame = 10;     // T
    int n_samples = 5000;         // L_B
    int batch_size = 50;          // L_mb
    int swarm_size = 200;         // P
    int n_iters = 100;            // I_iter
    double inertia = 0.9;         // w
    double cognitive = 1.49445;   // c1
    double social = 1.49445;      // c2
    std::uint64_t rng_seed = 12345;
    PowerCsiMode power_csi_mode = PowerCsiMode::Current;

    bool operator==(const SystemConfig&) const = default;

    int n_elements() const { return irs_rows * irs_cols; }
    int n_batches() const { return n_samples / batch_size; }
    double total_power_w() const { return dbm_to_watt(total_power_dbm); }
    double noise_var() const { return dbm_to_watt(noise_power_dbm); }
};

inline void validate(const SystemConfig& c) {
    auto fail = [](const std::string& rule) {
        throw std::invalid_argument("config invariant violated: " + rule);
    };
    if (c.n_tx < 1 || c.n_rx < 1) fail("n_tx and n_rx must be >= 1");
    if (c.n_streams < 1 || c.n_streams > std::min(c.n_tx, c.n_rx))
        fail("1 <= n_streams <= min(n_tx, n_rx)");
    if (c.irs_rows < 1 || c.irs_cols < 1) fail("irs_rows and irs_cols must be >= 1");
    if (!(c.rician_kappa >= 0.0 && c.rician_kappa <= 1.0))
        fail("rician_kappa must lie in [0, 1]");
    if (!(c.norm_doppler >= 0.0)) fail("norm_doppler must be >= 0");
    if (!(c.element_spacing_ratio > 0.0)) fail("element_spacing_ratio must be > 0");
    if (c.n_samples < 1) fail("n_samples must be >= 1");
    if (c.batch_size < 1 || c.n_samples % c.batch_size != 0)
        fail("batch_size must divide n_samples");
    if (c.slots_per_frame < 1 || c.n_samples % c.slots_per_frame != 0)
        fail("slots_per_frame must divide n_samples");
    if (c.swarm_size < 1) fail("swarm_size must be >= 1");
    if (c.n_iters < 1) fail("n_iters must be >= 1");
    if (!std::isfinite(c.total_power_dbm) || !std::isfinite(c.noise_power_dbm))
        fail("powers must be finite");
    if (!(c.total_power_w() > 0.0)) fail("total power must convert to positive watts");
    if (!std::isfinite(c.inertia) || !std::isfinite(c.cognitive) || !std::isfinite(c.social))
        fail("PSO coefficients must be finite");
    for (double v : {c.bs_pos[0], c.bs_pos[1], c.bs_pos[2], c.irs_pos[0], c.irs_pos[1],
                     c.irs_pos[2], c.ue_pos[0], c.ue_pos[1], c.ue_pos[2]})
        if (!std::isfinite(v)) fail("positions must be finite");
}

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] inline void parse_fail(int line, const std::string& key, const std::string& why) {
    throw std::invalid_argument("config parse error at line " + std::to_string(line) +
                                ", key '" + key + "': " + why);
}

inline double parse_double(const std::string& v, int line, const std::string& key) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        parse_fail(line, key, "not a number: '" + v + "'");
    }
    if (pos != v.size()) parse_fail(line, key, "trailing characters in '" + v + "'");
    return x;
}

inline long long parse_int(const std::string& v, int line, const std::string& key) {
    std::size_t pos = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &pos);
    } catch (const std::exception&) {
        parse_fail(line, key, "not an integer: '" + v + "'");
    }
    if (pos != v.size()) parse_fail(line, key, "trailing characters in '" + v + "'");
    return x;
}

inline std::array<double, 3> parse_pos(const std::string& v, int line, const std::string& key) {
    std::istringstream ss(v);
    std::array<double, 3> p{};
    if (!(ss >> p[0] >> p[1] >> p[2])) parse_fail(line, key, "expected three coordinates");
    std::string rest;
    if (ss >> rest) parse_fail(line, key, "trailing characters after coordinates");
    return p;
}

inline std::string fmt(double x) {
    std::ostringstream ss;
    ss << std::setprecision(17) << x;
    return ss.str();
}

inline std::string fmt(const std::array<double, 3>& p) {
    return fmt(p[0]) + " " + fmt(p[1]) + " " + fmt(p[2]);
}

}  // namespace detail

// Flat `key = value` text; '#' starts a comment; keys absent keep defaults.
inline SystemConfig parse_config(std::istream& in) {
    SystemConfig c;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) detail::parse_fail(lineno, line, "expected 'key = value'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty()) detail::parse_fail(lineno, "", "empty key");
        if (val.empty()) detail::parse_fail(lineno, key, "empty value");

        if (key == "n_tx") c.n_tx = static_cast<int>(detail::parse_int(val, lineno, key));
        else if (key == "n_rx") c.n_rx = static_cast<int>(detail::parse_int(val, lineno, key));
        else if (key == "n_streams") c.n_streams = static_cast<int>(detail::parse_int(val, lineno, key));
        else if (key == "irs_rows") c.irs_rows = static_cast<int>(detail::parse_int(val, lineno, key));
        else if (key == "irs_cols") c.irs_cols = static_cast<int>(detail::parse_int(val, lineno, key));
        else if (key == "rician_kappa") c.rician_kappa = detail::parse_double(val, lineno, key);
        else if (key == "norm_doppler") c.norm_doppler = detail::parse_double(val, lineno, key);
        else if (key == "element_spacing_ratio") c.element_spacing_ratio = detail::parse_double(val, lineno, key);
        else if (key == "ple_bu") c.ple_bu = detail::parse_double(val, lineno, key);
        else if (key == "ple_br") c.ple_br = detail::parse_double(val, lineno, key);
        else if (key == "ple_ur") c.ple_ur = detail::parse_double(val, lineno, key);
        else if (key == "ref_loss_db") c.ref_loss_db = detail::parse_double(val, lineno, key);
        else if (key == "bs_pos") c.bs_pos = detail::parse_pos(val, lineno, key);
        else if (key == "irs_pos") c.irs_pos = detail::parse_pos(val, lineno, key);
        else if (key == "ue_pos") c.ue_pos = detail::parse_pos(val, lineno, key);
        else if (key == "total_power_dbm") c.total_power_dbm = detail::parse_double(val, lineno, key);
        else if (key == "noise_power_dbm") c.noise_power_dbm = detail::parse_double(val, lineno, key);
        else if (key == "slots_per_frame") c.slots_per_frame = static_cast<int>(detail::parse_int(val, lineno, key));
        else if (key == "n_samples") c.n_samples = static_cast<int>(detail::parse_int(val, lineno, key));
        else if (key == "batch_size") c.batch_size = static_cast<int>(detail::parse_int(val, lineno, key));
        else if (key == "swarm_size") c.swarm_size = static_cast<int>(detail::parse_int(val, lineno, key));
        else if (key == "n_iters") c.n_iters = static_cast<int>(detail::parse_int(val, lineno, key));
        else if (key == "inertia") c.inertia = detail::parse_double(val, lineno, key);
        else if (key == "cognitive") c.cognitive = detail::parse_double(val, lineno, key);
        else if (key == "social") c.social = detail::parse_double(val, lineno, key);
        else if (key == "rng_seed") c.rng_seed = static_cast<std::uint64_t>(detail::parse_int(val, lineno, key));
        else if (key == "power_csi_mode") {
            if (val == "current") c.power_csi_mode = PowerCsiMode::Current;
            else if (val == "delayed") c.power_csi_mode = PowerCsiMode::Delayed;
            else detail::parse_fail(lineno, key, "expected 'current' or 'delayed'");
        } else {
            detail::parse_fail(lineno, key, "unknown key");
        }
    }
    validate(c);
    return c;
}

inline SystemConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(f);
}

inline std::string serialize_config(const SystemConfig& c) {
    using detail::fmt;
    std::ostringstream o;
    o << "n_tx = " << c.n_tx << "\n"
      << "n_rx = " << c.n_rx << "\n"
      << "n_streams = " << c.n_streams << "\n"
      << "irs_rows = " << c.irs_rows << "\n"
      << "irs_cols = " << c.irs_cols << "\n"
      << "rician_kappa = " << fmt(c.rician_kappa) << "\n"
      << "norm_doppler = " << fmt(c.norm_doppler) << "\n"
      << "element_spacing_ratio = " << fmt(c.element_spacing_ratio) << "\n"
      << "ple_bu = " << fmt(c.ple_bu) << "\n"
      << "ple_br = " << fmt(c.ple_br) << "\n"
      << "ple_ur = " << fmt(c.ple_ur) << "\n"
      << "ref_loss_db = " << fmt(c.ref_loss_db) << "\n"
      << "bs_pos = " << fmt(c.bs_pos) << "\n"
      << "irs_pos = " << fmt(c.irs_pos) << "\n"
      << "ue_pos = " << fmt(c.ue_pos) << "\n"
      << "total_power_dbm = " << fmt(c.total_power_dbm) << "\n"
      << "noise_power_dbm = " << fmt(c.noise_power_dbm) << "\n"
      << "slots_per_frame = " << c.slots_per_frame << "\n"
      << "n_samples = " << c.n_samples << "\n"
      << "batch_size = " << c.batch_size << "\n"
      << "swarm_size = " << c.swarm_size << "\n"
      << "n_iters = " << c.n_iters << "\n"
      << "inertia = " << fmt(c.inertia) << "\n"
      << "cognitive = " << fmt(c.cognitive) << "\n"
      << "social = " << fmt(c.social) << "\n"
      << "rng_seed = " << c.rng_seed << "\n"
      << "power_csi_mode = " << (c.power_csi_mode == PowerCsiMode::Current ? "current" : "delayed")
      << "\n";
    return o.str();
}

inline void save_config(const SystemConfig& c, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open config file for writing: " + path);
    f << serialize_config(c);
}

}  // namespace ttbeam
