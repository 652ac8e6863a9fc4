#include "granuloma/diagnostics.hpp"

#include "granuloma/error.hpp"
#include "granuloma/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace granuloma {

DiagnosticsRow compute_row(const SimState& s, const BoxDomain& d, const DiagnosticsSpec& spec)
{
    const std::size_t n = d.size();
    std::vector<double> scratch(n);

    DiagnosticsRow row;
    row.t = s.t;

    double dev = 0.0;
    for (double x : s.u.values) dev = std::max(dev, std::abs(x - spec.beta));
    row.linf_u_minus_beta = dev;

    row.w1q_v = w1q_norm(s.v.span(), spec.q, d);
    row.w1q_w = w1q_norm(s.w.span(), spec.q, d);
    row.linf_z = linf_norm(s.z.span());

    for (std::size_t i = 0; i < n; ++i) scratch[i] = s.u[i] + s.w[i] + s.z[i];
    row.l1_mass = l1_norm(scratch, d);

    for (std::size_t i = 0; i < n; ++i) scratch[i] = s.v[i] + spec.xi * s.w[i];
    row.linf_vw = linf_norm(scratch);

    row.lq_grad_v = grad_lq_norm(s.v.span(), spec.q, d);
    row.lq_grad_w = grad_lq_norm(s.w.span(), spec.q, d);
    row.lp_z = lq_norm(s.z.span(), spec.tp.p, d);
    if (spec.tp.w_star > 0.0 && linf_norm(s.w.span()) <= spec.tp.w_star) {
        row.zp_phi = zp_functional(s, spec.tp, d);
    }
    return row;
}

void write_diagnostics_csv(std::ostream& os, const Trajectory& traj)
{
    os << kDiagnosticsHeader << '\n';
    for (const auto& r : traj) {
        os << fmt17(r.t) << ',' << fmt17(r.linf_u_minus_beta) << ',' << fmt17(r.w1q_v) << ','
           << fmt17(r.w1q_w) << ',' << fmt17(r.linf_z) << ',' << fmt17(r.l1_mass) << ','
           << fmt17(r.linf_vw) << ',' << fmt17(r.lq_grad_v) << ',' << fmt17(r.lq_grad_w) << ','
           << fmt17(r.lp_z) << ',';
        if (r.zp_phi) os << fmt17(*r.zp_phi);
        os << '\n';
    }
}

void write_diagnostics_csv(const std::string& path, const Trajectory& traj)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_diagnostics_csv(os, traj);
}

Trajectory read_diagnostics_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != kDiagnosticsHeader) {
        throw Error("diagnostics CSV: unexpected header");
    }
    Trajectory traj;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (cells.size() != 11) {
            throw Error("diagnostics CSV line " + std::to_string(lineno) + ": expected 11 cells");
        }
        auto num = [&](int k) { return parse_double(cells[k], "column " + std::to_string(k)); };
        DiagnosticsRow r;
        r.t = num(0);
        r.linf_u_minus_beta = num(1);
        r.w1q_v = num(2);
        r.w1q_w = num(3);
        r.linf_z = num(4);
        r.l1_mass = num(5);
        r.linf_vw = num(6);
        r.lq_grad_v = num(7);
        r.lq_grad_w = num(8);
        r.lp_z = num(9);
        if (!cells[10].empty()) r.zp_phi = num(10);
        traj.push_back(r);
    }
    return traj;
}

Trajectory read_diagnostics_csv(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    return read_diagnostics_csv(is);
}

RateFit fit_rate(const std::vector<SeriesPoint>& series, double tail_fraction)
{
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw InvalidArgument("tail fraction must lie in (0, 1]");
    }
    const auto count = static_cast<std::size_t>(std::ceil(tail_fraction * series.size()));
    if (count < 10) throw NoExponentialRegime("fewer than 10 points in the fit tail");
    const std::size_t first = series.size() - count;

    double st = 0.0;
    double sy = 0.0;
    for (std::size_t i = first; i < series.size(); ++i) {
        if (!(series[i].value > 0.0) || !std::isfinite(series[i].value)) {
            throw NoExponentialRegime("nonpositive or non-finite value in the fit tail");
        }
        st += series[i].t;
        sy += std::log(series[i].value);
    }
    const double nt = static_cast<double>(count);
    const double tbar = st / nt;
    const double ybar = sy / nt;
    double stt = 0.0;
    double sty = 0.0;
    double syy = 0.0;
    for (std::size_t i = first; i < series.size(); ++i) {
        const double dt = series[i].t - tbar;
        const double dy = std::log(series[i].value) - ybar;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if (!(stt > 0.0)) throw NoExponentialRegime("fit tail spans no time");
    const double slope = sty / stt;
    RateFit fit;
    fit.C = std::exp(ybar - slope * tbar);
    fit.rate = -slope;
    // A perfectly flat series is explained exactly by the zero-slope line.
    fit.r2 = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
    return fit;
}

std::string to_json_line(const CheckReport& r)
{
    nlohmann::ordered_json j;
    j["check"] = r.name;
    j["pass"] = r.pass;
    j["indeterminate"] = r.indeterminate;
    j["margin"] = r.margin;
    j["t_worst"] = r.t_worst;
    j["notes"] = r.notes;
    return j.dump();
}

void write_reports(const std::string& path, const std::vector<CheckReport>& reports)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    for (const auto& r : reports) os << to_json_line(r) << '\n';
}

std::vector<SeriesPoint> column(const Trajectory& traj, double DiagnosticsRow::*member)
{
    std::vector<SeriesPoint> out;
    out.reserve(traj.size());
    for (const auto& r : traj) out.push_back({r.t, r.*member});
    return out;
}

std::vector<SeriesPoint> four_norm_series(const Trajectory& traj)
{
    std::vector<SeriesPoint> out;
    out.reserve(traj.size());
    for (const auto& r : traj) out.push_back({r.t, r.four_norm_sum()});
    return out;
}

CheckReport check_mass(const Trajectory& traj, double m_star)
{
    if (traj.empty()) throw InvalidArgument("check_mass needs a nonempty trajectory");
    CheckReport rep;
    rep.name = "mass";
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : traj) {
        if (r.l1_mass > worst) {
            worst = r.l1_mass;
            rep.t_worst = r.t;
        }
    }
    rep.pass = worst <= m_star * (1.0 + 1e-8);
    rep.margin = (m_star - worst) / m_star;
    rep.notes = "m_star=" + fmt17(m_star) + " max_l1_mass=" + fmt17(worst);
    return rep;
}

namespace {

CheckReport check_envelope(const Trajectory& traj, double tolerance, const std::string& name,
                           auto&& envelope, auto&& value)
{
    CheckReport rep;
    rep.name = name;
    rep.pass = true;
    rep.margin = kMarginCap;
    for (const auto& r : traj) {
        const double env = envelope(r.t);
        const double val = value(r);
        if (val > env * (1.0 + tolerance)) rep.pass = false;
        const double m = val > 0.0 ? std::min(env / val - 1.0, kMarginCap) : kMarginCap;
        if (m < rep.margin) {
            rep.margin = m;
            rep.t_worst = r.t;
        }
    }
    rep.notes = "tolerance=" + fmt17(tolerance);
    return rep;
}

}  // namespace

CheckReport check_vw_envelope(const Trajectory& traj, const StabilityWindow& w,
                              const EnvelopeConstants& c, double initial_norm, double tolerance)
{
    auto rep = check_envelope(
        traj, tolerance, "vw_envelope",
        [&](double t) { return vw_envelope(t, initial_norm, w.gamma, c.t_star); },
        [](const DiagnosticsRow& r) { return r.linf_vw; });
    rep.notes += " gamma=" + fmt17(w.gamma) + " t_star=" + fmt17(c.t_star);
    if (!c.rigorous) rep.notes += " non-rigorous constants";
    return rep;
}

CheckReport check_u_envelope(const Trajectory& traj, const EnvelopeConstants& c,
                             const StabilityWindow& w, double grad_v0_q, double tolerance)
{
    auto rep = check_envelope(
        traj, tolerance, "u_envelope",
        [&](double t) { return envelope_g(t, c, w, grad_v0_q); },
        [](const DiagnosticsRow& r) { return r.linf_u_minus_beta; });
    if (!c.rigorous) rep.notes += " non-rigorous constants";
    return rep;
}

CheckReport check_theorem_decay(const Trajectory& traj, double gamma, double tail_fraction)
{
    CheckReport rep;
    rep.name = "theorem_decay";
    if (traj.empty()) {
        rep.notes = "empty trajectory";
        return rep;
    }
    const double t_end = traj.back().t;
    try {
        const auto fit = fit_rate(four_norm_series(traj), tail_fraction);
        rep.pass = fit.rate >= gamma * (1.0 - 0.1) && fit.r2 >= 0.95;
        rep.margin = fit.rate / (0.9 * gamma) - 1.0;
        rep.t_worst = t_end;
        rep.notes = "rate=" + fmt17(fit.rate) + " r2=" + fmt17(fit.r2) + " C=" + fmt17(fit.C) +
                    " gamma=" + fmt17(gamma);
    } catch (const NoExponentialRegime& e) {
        rep.pass = false;
        rep.margin = -1.0;
        rep.t_worst = t_end;
        rep.notes = std::string("no exponential regime: ") + e.what();
    }
    if (t_end < 40.0 / gamma) rep.notes += " (t_end below 40/gamma)";
    return rep;
}

CheckReport check_z_suppression(const Trajectory& traj, const TestFunctionParams& tp,
                                const StabilityWindow& w)
{
    CheckReport rep;
    rep.name = "z_suppression";
    const double zeta = tp.zeta > 0.0 ? tp.zeta : w.xi * tp.w_star;

    std::size_t start = traj.size();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj[i].linf_vw <= zeta) {
            start = i;
            break;
        }
    }
    if (start == traj.size()) {
        rep.indeterminate = true;
        rep.notes = "smallness level zeta=" + fmt17(zeta) + " never reached";
        return rep;
    }
    const double t0 = traj[start].t;
    double window_max = 0.0;
    for (std::size_t i = start; i < traj.size() && traj[i].t <= t0 + 1.0; ++i) {
        window_max = std::max(window_max, traj[i].lp_z);
    }
    const double lp_bound = 1.05 * window_max + 1e-12 * window_max +
                            std::numeric_limits<double>::min();
    const std::optional<double> zp0 = traj[start].zp_phi;
    const double zp_bound = zp0 ? 2.0 * *zp0 + std::numeric_limits<double>::min() : 0.0;

    rep.pass = true;
    rep.margin = kMarginCap;
    rep.t_worst = t0;
    int missing_zp = 0;
    for (std::size_t i = start; i < traj.size(); ++i) {
        const auto& r = traj[i];
        const double m_lp = (lp_bound - r.lp_z) / lp_bound;
        if (r.lp_z > lp_bound) rep.pass = false;
        if (m_lp < rep.margin) {
            rep.margin = m_lp;
            rep.t_worst = r.t;
        }
        if (!zp0) continue;
        if (!r.zp_phi) {
            ++missing_zp;
            continue;
        }
        const double m_zp = (zp_bound - *r.zp_phi) / zp_bound;
        if (*r.zp_phi > zp_bound) rep.pass = false;
        if (m_zp < rep.margin) {
            rep.margin = m_zp;
            rep.t_worst = r.t;
        }
    }
    rep.notes = "t0=" + fmt17(t0) + " zeta=" + fmt17(zeta) + " window_max_lp_z=" + fmt17(window_max);
    if (!zp0) rep.notes += " zp_phi inactive at t0";
    if (missing_zp > 0) rep.notes += " zp_phi inactive on " + std::to_string(missing_zp) + " rows";
    return rep;
}

}  // namespace granuloma
