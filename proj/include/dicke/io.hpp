// io.hpp — CSV/JSON emission with embedded parameter headers

#pragma once

#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dicke/dynamics.hpp"
#include "dicke/model.hpp"
#include "dicke/observables.hpp"
#include "dicke/version.hpp"

namespace dicke::io {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Header comment block carrying the tool version and the full parameter set;
// every emitted file starts with one.
inline std::string param_header(const ModelParams& p) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::ostringstream os;
    os << "# dicke-sim v" << kVersion << "\n";
    os << "# nu0_mhz=" << fmt(p.omega0 / two_pi) << " nu_mhz=" << fmt(p.omega / two_pi)
       << " nu_kappa_mhz=" << fmt(p.kappa / two_pi) << " nu_g_mhz=" << fmt(p.g / two_pi)
       << " nu_u_mhz=" << fmt(p.u / two_pi) << "\n";
    os << "# omega0=" << fmt(p.omega0) << " omega=" << fmt(p.omega)
       << " kappa=" << fmt(p.kappa) << " g=" << fmt(p.g) << " u=" << fmt(p.u)
       << " (rad/us)\n";
    os << "# n_atoms=" << p.n_atoms << " n_max=" << p.n_max << "\n";
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

inline std::string timeseries_csv(const ModelParams& p, const TimeSeries& c) {
    std::ostringstream os;
    os << param_header(p) << "t_us,re_c,im_c\n";
    for (std::size_t k = 0; k < c.t.size(); ++k)
        os << fmt(c.t[k]) << ',' << fmt(c.values[k].real()) << ','
           << fmt(c.values[k].imag()) << "\n";
    return os.str();
}

inline std::string spectrum_csv(const ModelParams& p, const Spectrum& s) {
    std::ostringstream os;
    os << param_header(p) << "nu_rad_per_us,s\n";
    for (std::size_t k = 0; k < s.nu.size(); ++k)
        os << fmt(s.nu[k]) << ',' << fmt(s.values[k]) << "\n";
    return os.str();
}

inline std::string wigner_csv(const ModelParams& p, const WignerGrid& w) {
    std::ostringstream os;
    os << param_header(p) << "x,y,w\n";
    for (std::size_t i = 0; i < w.x.size(); ++i)
        for (std::size_t j = 0; j < w.y.size(); ++j)
            os << fmt(w.x[i]) << ',' << fmt(w.y[j]) << ','
               << fmt(w.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
               << "\n";
    return os.str();
}

inline std::string spin_q_csv(const ModelParams& p, const SpinQGrid& q) {
    std::ostringstream os;
    os << param_header(p) << "theta,phi,q\n";
    for (std::size_t i = 0; i < q.theta.size(); ++i)
        for (std::size_t j = 0; j < q.phi.size(); ++j)
            os << fmt(q.theta[i]) << ',' << fmt(q.phi[j]) << ','
               << fmt(q.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
               << "\n";
    return os.str();
}

}  // namespace dicke::io
