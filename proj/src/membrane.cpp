#include "membrane.hpp"

#include <algorithm>
#include <cmath>

namespace biovolt {

const char* ion_name(Ion ion) {
  switch (ion) {
    case Ion::Na: return "Na";
    case Ion::K: return "K";
    case Ion::Cl: return "Cl";
    case Ion::Ca: return "Ca";
    case Ion::H: return "H";
  }
  return "?";
}

double ph_from_concentration(double h_conc) {
  // mol/m^3 -> mol/L
  const double molar = h_conc / 1000.0;
  if (molar <= 0.0) return 14.0;
  return -std::log10(molar);
}

double ghk_voltage(const CellState& cell) {
  double num = 0.0;
  double den = 0.0;
  for (Ion ion : kAllIons) {
    if (!ghk_contributes(ion)) continue;
    const double p = ion_at(cell.perms, ion);
    if (valence(ion) > 0) {
      num += p * ion_at(cell.conc_out, ion);
      den += p * ion_at(cell.conc_in, ion);
    } else {
      num += p * ion_at(cell.conc_in, ion);
      den += p * ion_at(cell.conc_out, ion);
    }
  }
  if (num <= 0.0 || den <= 0.0) {
    throw NumericalError("NonPositiveLogArgument: degenerate GHK concentrations/permeabilities");
  }
  return (kGasConstant * cell.temperature / kFaraday) * std::log(num / den);
}

namespace {

// f(u) = u / (1 - exp(-u)), the GHK flux factor. Series below |u| = 1e-4;
// the truncation error there is O(u^6), far under the 1e-8 contract.
double flux_factor(double u) {
  if (std::abs(u) < 1e-4) {
    const double u2 = u * u;
    return 1.0 + u / 2.0 + u2 / 12.0 - u2 * u2 / 720.0;
  }
  return u / (1.0 - std::exp(-u));
}

} // namespace

double ghk_flux(Ion ion, double perm, const CellState& cell) {
  const int z = valence(ion);
  const double u = z * kFaraday * cell.v_mem / (kGasConstant * cell.temperature);
  const double c_in = ion_at(cell.conc_in, ion);
  const double c_out = ion_at(cell.conc_out, ion);
  // I = P z F (c_in f(u) - c_out f(-u)), algebraically equal to the standard
  // GHK current expression but nonsingular at u = 0.
  return perm * z * kFaraday * (c_in * flux_factor(u) - c_out * flux_factor(-u));
}

double gating_alpha(const IonGating& g, double v) {
  return g.alpha.rate0 / (1.0 + std::exp(-(v - g.alpha.v_half) / g.alpha.slope));
}

double gating_beta(const IonGating& g, double v) {
  return g.beta.rate0 / (1.0 + std::exp((v - g.beta.v_half) / g.beta.slope));
}

double step_gating(double perm, const IonGating& g, double v, double dt) {
  const double a = gating_alpha(g, v);
  const double b = gating_beta(g, v);
  if (dt * (a + b) >= 1.0) {
    throw NumericalError("UnstableStep: dt * (alpha + beta) >= 1 in gating kinetics");
  }
  const double next = perm + dt * (a * (g.p_max - perm) - b * perm);
  return std::clamp(next, 0.0, g.p_max);
}

namespace {

CellState advance_concentrations(const CellState& cell, const IonArray& junctional, double dt,
                                 bool include_ca) {
  CellState out = cell;
  for (Ion ion : kAllIons) {
    if (!include_ca && ion == Ion::Ca) continue;
    const double current = ghk_flux(ion, ion_at(cell.perms, ion), cell) + ion_at(junctional, ion);
    const double dc = -current / (valence(ion) * kFaraday * cell.volume);
    ion_at(out.conc_in, ion) = std::max(0.0, ion_at(cell.conc_in, ion) + dc * dt);
  }
  return out;
}

} // namespace

CellState step_ion_concentrations(const CellState& cell, const IonArray& junctional, double dt) {
  return advance_concentrations(cell, junctional, dt, /*include_ca=*/true);
}

CascadeResult step_calcium_cascade(double ca_in, const SignalingState& sig, double i_ca,
                                   double v_cell, double dt) {
  CascadeResult r;
  r.sig = sig;

  const double dca = -i_ca / (2.0 * kFaraday * v_cell) - sig.k_pump * ca_in;
  r.ca_in = std::max(0.0, ca_in + dca * dt);

  const double d_cacam = sig.k_on * ca_in * sig.cam_free - sig.k_off * sig.ca_cam;
  const double d_cn = sig.k_on * sig.ca_cam * sig.calcineurin_free - sig.k_off * sig.calcineurin_active;

  r.sig.ca_cam = std::clamp(sig.ca_cam + d_cacam * dt, 0.0, sig.total_cam);
  r.sig.calcineurin_active =
      std::clamp(sig.calcineurin_active + d_cn * dt, 0.0, sig.total_calcineurin);
  // Free pools from the conserved totals; conservation holds exactly.
  r.sig.cam_free = sig.total_cam - r.sig.ca_cam;
  r.sig.calcineurin_free = sig.total_calcineurin - r.sig.calcineurin_active;
  return r;
}

namespace {

// Packed derivative of the smooth single-cell system, used by the RK4 path.
struct CellDeriv {
  IonArray dconc{};
  IonArray dperm{};
  double d_cacam = 0.0;
  double d_cn = 0.0;
  double d_akt = 0.0;
  double d_serotonin = 0.0;
  double d_butyrate = 0.0;
};

double membrane_voltage(const CellState& cell) {
  return cell.clamp ? *cell.clamp : ghk_voltage(cell);
}

CellDeriv eval_derivative(CellState cell, const CellParams& params, const IonArray& junctional) {
  cell.v_mem = membrane_voltage(cell);
  CellDeriv d;
  for (Ion ion : kAllIons) {
    const int idx = static_cast<int>(ion);
    const IonGating& g = params.gating[idx];
    if (g.gated) {
      const double p = cell.perms[idx];
      d.dperm[idx] = gating_alpha(g, cell.v_mem) * (g.p_max - p) - gating_beta(g, cell.v_mem) * p;
    }
    const double current = ghk_flux(ion, cell.perms[idx], cell) + junctional[idx];
    double dc = -current / (valence(ion) * kFaraday * cell.volume);
    if (ion == Ion::Ca) dc -= cell.sig.k_pump * cell.conc_in[idx];
    d.dconc[idx] = dc;
  }
  const SignalingState& s = cell.sig;
  const double ca = ion_at(cell.conc_in, Ion::Ca);
  d.d_cacam = s.k_on * ca * (s.total_cam - s.ca_cam) - s.k_off * s.ca_cam;
  d.d_cn = s.k_on * s.ca_cam * (s.total_calcineurin - s.calcineurin_active) -
           s.k_off * s.calcineurin_active;
  const RelaxationParams& rx = params.relax;
  d.d_akt = rx.rate * (rx.akt_target + rx.vmem_coupling * cell.v_mem - s.akt_active);
  d.d_serotonin = rx.rate * (rx.serotonin_target + rx.vmem_coupling * cell.v_mem - s.serotonin);
  d.d_butyrate = rx.rate * (rx.butyrate_target + rx.vmem_coupling * cell.v_mem - s.butyrate);
  return d;
}

CellState apply_deriv(const CellState& base, const CellDeriv& d, double h) {
  CellState out = base;
  for (int i = 0; i < kNumIons; ++i) {
    out.conc_in[i] = base.conc_in[i] + h * d.dconc[i];
    out.perms[i] = base.perms[i] + h * d.dperm[i];
  }
  out.sig.ca_cam = base.sig.ca_cam + h * d.d_cacam;
  out.sig.calcineurin_active = base.sig.calcineurin_active + h * d.d_cn;
  out.sig.akt_active = base.sig.akt_active + h * d.d_akt;
  out.sig.serotonin = base.sig.serotonin + h * d.d_serotonin;
  out.sig.butyrate = base.sig.butyrate + h * d.d_butyrate;
  out.sig.cam_free = base.sig.total_cam - out.sig.ca_cam;
  out.sig.calcineurin_free = base.sig.total_calcineurin - out.sig.calcineurin_active;
  return out;
}

void finalize_state(CellState& cell, const CellParams& params) {
  for (Ion ion : kAllIons) {
    const int idx = static_cast<int>(ion);
    cell.conc_in[idx] = std::max(0.0, cell.conc_in[idx]);
    const IonGating& g = params.gating[idx];
    if (g.gated) cell.perms[idx] = std::clamp(cell.perms[idx], 0.0, g.p_max);
  }
  SignalingState& s = cell.sig;
  s.ca_cam = std::clamp(s.ca_cam, 0.0, s.total_cam);
  s.calcineurin_active = std::clamp(s.calcineurin_active, 0.0, s.total_calcineurin);
  s.cam_free = s.total_cam - s.ca_cam;
  s.calcineurin_free = s.total_calcineurin - s.calcineurin_active;
  s.ph_in = ph_from_concentration(ion_at(cell.conc_in, Ion::H));
  cell.v_mem = membrane_voltage(cell);
}

CellState step_cell_euler(const CellState& cell, const CellParams& params,
                          const IonArray& junctional, double dt) {
  CellState cur = cell;
  cur.v_mem = membrane_voltage(cur);

  for (Ion ion : kAllIons) {
    const int idx = static_cast<int>(ion);
    const IonGating& g = params.gating[idx];
    if (g.gated) cur.perms[idx] = step_gating(cur.perms[idx], g, cur.v_mem, dt);
  }

  // Ca is excluded here; its flux term belongs to the cascade step below.
  const double i_ca = ghk_flux(Ion::Ca, ion_at(cur.perms, Ion::Ca), cur) + ion_at(junctional, Ion::Ca);
  cur = advance_concentrations(cur, junctional, dt, /*include_ca=*/false);

  CascadeResult cr = step_calcium_cascade(ion_at(cur.conc_in, Ion::Ca), cur.sig, i_ca, cur.volume, dt);
  ion_at(cur.conc_in, Ion::Ca) = cr.ca_in;
  cur.sig = cr.sig;

  const RelaxationParams& rx = params.relax;
  SignalingState& s = cur.sig;
  s.akt_active += dt * rx.rate * (rx.akt_target + rx.vmem_coupling * cur.v_mem - s.akt_active);
  s.serotonin += dt * rx.rate * (rx.serotonin_target + rx.vmem_coupling * cur.v_mem - s.serotonin);
  s.butyrate += dt * rx.rate * (rx.butyrate_target + rx.vmem_coupling * cur.v_mem - s.butyrate);

  finalize_state(cur, params);
  return cur;
}

CellState step_cell_rk4(const CellState& cell, const CellParams& params, const IonArray& junctional,
                        double dt) {
  const CellDeriv k1 = eval_derivative(cell, params, junctional);
  const CellDeriv k2 = eval_derivative(apply_deriv(cell, k1, dt / 2.0), params, junctional);
  const CellDeriv k3 = eval_derivative(apply_deriv(cell, k2, dt / 2.0), params, junctional);
  const CellDeriv k4 = eval_derivative(apply_deriv(cell, k3, dt), params, junctional);

  CellDeriv sum;
  for (int i = 0; i < kNumIons; ++i) {
    sum.dconc[i] = (k1.dconc[i] + 2.0 * k2.dconc[i] + 2.0 * k3.dconc[i] + k4.dconc[i]) / 6.0;
    sum.dperm[i] = (k1.dperm[i] + 2.0 * k2.dperm[i] + 2.0 * k3.dperm[i] + k4.dperm[i]) / 6.0;
  }
  sum.d_cacam = (k1.d_cacam + 2.0 * k2.d_cacam + 2.0 * k3.d_cacam + k4.d_cacam) / 6.0;
  sum.d_cn = (k1.d_cn + 2.0 * k2.d_cn + 2.0 * k3.d_cn + k4.d_cn) / 6.0;
  sum.d_akt = (k1.d_akt + 2.0 * k2.d_akt + 2.0 * k3.d_akt + k4.d_akt) / 6.0;
  sum.d_serotonin =
      (k1.d_serotonin + 2.0 * k2.d_serotonin + 2.0 * k3.d_serotonin + k4.d_serotonin) / 6.0;
  sum.d_butyrate =
      (k1.d_butyrate + 2.0 * k2.d_butyrate + 2.0 * k3.d_butyrate + k4.d_butyrate) / 6.0;

  CellState out = apply_deriv(cell, sum, dt);
  finalize_state(out, params);
  return out;
}

} // namespace

CellState step_cell(const CellState& cell, const CellParams& params, const IonArray& junctional,
                    double dt, Scheme scheme) {
  if (dt <= 0.0) throw InvalidArgument("step_cell: dt must be positive");
  return scheme == Scheme::Euler ? step_cell_euler(cell, params, junctional, dt)
                                 : step_cell_rk4(cell, params, junctional, dt);
}

std::vector<CellState> integrate_cell(const CellState& cell, const CellParams& params, double dt,
                                      int n_steps, std::optional<double> clamp, Scheme scheme) {
  if (dt <= 0.0) throw InvalidArgument("integrate_cell: dt must be positive");
  if (n_steps < 1) throw InvalidArgument("integrate_cell: n_steps must be >= 1");

  std::vector<CellState> trajectory;
  trajectory.reserve(static_cast<std::size_t>(n_steps) + 1);

  CellState cur = cell;
  cur.clamp = clamp;
  cur.v_mem = clamp ? *clamp : ghk_voltage(cur);
  trajectory.push_back(cur);

  const IonArray no_junctional{};
  for (int step = 0; step < n_steps; ++step) {
    try {
      cur = step_cell(cur, params, no_junctional, dt, scheme);
    } catch (const Error& e) {
      throw NumericalError("integrate_cell: step " + std::to_string(step) + ": " + e.what());
    }
    trajectory.push_back(cur);
  }
  return trajectory;
}

double nernst_potential(Ion ion, double conc_in, double conc_out, double temperature) {
  if (conc_in <= 0.0 || conc_out <= 0.0) {
    throw NumericalError("nernst_potential: concentrations must be positive");
  }
  return kGasConstant * temperature / (valence(ion) * kFaraday) * std::log(conc_out / conc_in);
}

} // namespace biovolt
