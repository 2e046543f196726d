#pragma once

#include <array>
#include <optional>
#include <vector>

#include "errors.hpp"

namespace biovolt {

// Physical constants (SI).
constexpr double kGasConstant = 8.314;  // J/(mol K)
constexpr double kFaraday = 96485.0;    // C/mol

enum class Ion : int { Na = 0, K = 1, Cl = 2, Ca = 3, H = 4 };
constexpr int kNumIons = 5;

constexpr std::array<Ion, kNumIons> kAllIons = {Ion::Na, Ion::K, Ion::Cl, Ion::Ca, Ion::H};

constexpr int valence(Ion ion) {
  switch (ion) {
    case Ion::Na: return +1;
    case Ion::K: return +1;
    case Ion::Cl: return -1;
    case Ion::Ca: return +2;
    case Ion::H: return +1;
  }
  return 0;
}

/// Ions whose permeability terms enter the GHK voltage equation.
constexpr bool ghk_contributes(Ion ion) {
  return ion == Ion::Na || ion == Ion::K || ion == Ion::Cl;
}

const char* ion_name(Ion ion);

using IonArray = std::array<double, kNumIons>;

inline double& ion_at(IonArray& a, Ion ion) { return a[static_cast<int>(ion)]; }
inline double ion_at(const IonArray& a, Ion ion) { return a[static_cast<int>(ion)]; }

/// Boltzmann sigmoid parameters for one voltage-dependent rate constant.
struct GatingRate {
  double rate0 = 0.0;   // 1/s, limiting rate
  double v_half = 0.0;  // V
  double slope = 0.01;  // V, sign selects the direction of the sigmoid
};

struct IonGating {
  bool gated = false;
  GatingRate alpha;  // opening
  GatingRate beta;   // closing
  double p_max = 0.0;  // m/s
};

using GatingParams = std::array<IonGating, kNumIons>;

/// Calcium-calmodulin-calcineurin cascade state plus auxiliary signalling
/// species. Free pools are maintained from the conserved totals.
struct SignalingState {
  double ca_cam = 0.0;              // mol/m^3, Ca(2+)-CaM complex
  double cam_free = 0.0;            // mol/m^3
  double calcineurin_free = 0.0;    // mol/m^3
  double calcineurin_active = 0.0;  // mol/m^3
  double akt_active = 0.0;          // mol/m^3
  double serotonin = 0.0;           // mol/m^3
  double butyrate = 0.0;            // mol/m^3
  double ph_in = 7.4;               // derived from [H+]_in whenever H+ is tracked

  // Rate constants and conserved totals, fixed per episode.
  double k_on = 0.0;    // m^3/(mol s)
  double k_off = 0.0;   // 1/s
  double k_pump = 0.0;  // 1/s
  double total_cam = 0.0;
  double total_calcineurin = 0.0;
};

struct CellState {
  IonArray conc_in{};   // mol/m^3
  IonArray conc_out{};  // mol/m^3
  IonArray perms{};     // m/s
  double v_mem = 0.0;       // V
  double volume = 1e-15;    // m^3
  double temperature = 310.0;  // K
  SignalingState sig;
  std::optional<double> clamp;  // V; overrides the GHK voltage while set
};

/// First-order relaxation targets for the species the reward references but
/// whose dynamics are not otherwise constrained (Akt, serotonin, butyrate).
/// With rate == 0 they are exogenous constants.
struct RelaxationParams {
  double akt_target = 0.0;
  double serotonin_target = 0.0;
  double butyrate_target = 0.0;
  double rate = 0.0;           // 1/s
  double vmem_coupling = 0.0;  // mol/(m^3 V), shifts targets linearly with v_mem
};

struct CellParams {
  GatingParams gating{};
  RelaxationParams relax{};
};

enum class Scheme { Euler, RK4 };

/// GHK voltage from permeabilities and inside/outside concentrations of the
/// contributing ions (Na, K, Cl). Throws NumericalError ("NonPositiveLogArgument")
/// when either side of the log argument is non-positive.
double ghk_voltage(const CellState& cell);

/// GHK flux (current) for one ion at the cell's current v_mem. Total for all
/// valid states: the u -> 0 singularity is replaced by its series limit.
double ghk_flux(Ion ion, double perm, const CellState& cell);

/// One explicit-Euler step of the first-order gating kinetics. Result is
/// clamped to [0, p_max]. Throws NumericalError ("UnstableStep") when
/// dt * (alpha + beta) >= 1.
double step_gating(double perm, const IonGating& gating, double v, double dt);

double gating_alpha(const IonGating& gating, double v);
double gating_beta(const IonGating& gating, double v);

/// Advance intracellular concentrations one Euler step from the GHK fluxes
/// plus the given junctional currents; results floored at zero. Extracellular
/// concentrations are an infinite bath and stay constant.
CellState step_ion_concentrations(const CellState& cell, const IonArray& junctional, double dt);

struct CascadeResult {
  double ca_in = 0.0;
  SignalingState sig;
};

/// One Euler step of the calcium handling and downstream mass-action
/// activation of CaM and calcineurin. i_ca is the total calcium current
/// (membrane flux plus junctional). Conserved totals are preserved exactly:
/// free pools are recomputed from the totals.
CascadeResult step_calcium_cascade(double ca_in, const SignalingState& sig, double i_ca,
                                   double v_cell, double dt);

/// One integrator step of the full single-cell system (gating, fluxes,
/// concentrations, cascade, auxiliary relaxation). junctional currents are
/// held constant across the step.
CellState step_cell(const CellState& cell, const CellParams& params, const IonArray& junctional,
                    double dt, Scheme scheme);

/// Fixed-step trajectory of n_steps, returning n_steps + 1 states including
/// the initial one. A clamp overrides the GHK voltage but fluxes are still
/// evaluated at the clamped potential.
std::vector<CellState> integrate_cell(const CellState& cell, const CellParams& params, double dt,
                                      int n_steps, std::optional<double> clamp,
                                      Scheme scheme = Scheme::RK4);

/// Nernst (reversal) potential of a single ion.
double nernst_potential(Ion ion, double conc_in, double conc_out, double temperature);

/// pH from an H+ concentration in mol/m^3.
double ph_from_concentration(double h_conc);

} // namespace biovolt
