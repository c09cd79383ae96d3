//! Rotary-wing propulsion power and radiated-energy accounting.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("speed must be non-negative, got {0}")]
    NegativeSpeed(f64),
}

/// Rotor and airframe constants of the propulsion power model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    /// Blade profile power in hover (W).
    pub p0: f64,
    /// Induced power in hover (W).
    pub pi: f64,
    /// Rotor blade tip speed (m/s).
    pub u_tip: f64,
    /// Mean rotor induced velocity in hover (m/s).
    pub v0: f64,
    /// Fuselage drag ratio.
    pub d0_drag: f64,
    /// Air density (kg/m³).
    pub rho: f64,
    /// Rotor solidity.
    pub s_solidity: f64,
    /// Rotor disc area (m²).
    pub disc_area: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams {
            p0: 79.86,
            pi: 88.63,
            u_tip: 120.0,
            v0: 4.03,
            d0_drag: 0.6,
            rho: 1.225,
            s_solidity: 0.05,
            disc_area: 0.503,
        }
    }
}

/// Propulsion power (W) at constant forward speed `v`: blade profile,
/// induced and parasite terms.
pub fn propulsion_power(v: f64, p: &EnergyParams) -> Result<f64, EnergyError> {
    if v < 0.0 || v.is_nan() {
        return Err(EnergyError::NegativeSpeed(v));
    }
    let v2 = v * v;
    let blade = p.p0 * (1.0 + 3.0 * v2 / (p.u_tip * p.u_tip));
    let v0_2 = p.v0 * p.v0;
    let induced = p.pi * ((1.0 + v2 * v2 / (4.0 * v0_2 * v0_2)).sqrt() - v2 / (2.0 * v0_2)).sqrt();
    let parasite = 0.5 * p.d0_drag * p.rho * p.s_solidity * p.disc_area * v2 * v;
    Ok(blade + induced + parasite)
}

pub fn propulsion_energy(v: f64, t_move: f64, p: &EnergyParams) -> Result<f64, EnergyError> {
    Ok(propulsion_power(v, p)? * t_move)
}

/// Radiated energy of one transmission: `p_t · t_packet`.
pub fn comm_energy(p_t: f64, t_packet: f64) -> f64 {
    p_t * t_packet
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyCategory {
    Propulsion,
    Comm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub initial: f64,
    pub residual: f64,
    pub spent_propulsion: f64,
    pub spent_comm: f64,
    pub depleted: bool,
}

impl EnergyLedger {
    pub fn new(initial: f64) -> Self {
        EnergyLedger {
            initial,
            residual: initial,
            spent_propulsion: 0.0,
            spent_comm: 0.0,
            depleted: initial <= 0.0,
        }
    }

    /// Charges `amount` joules to `category`; only the energy actually
    /// available is booked, so `initial = residual + spent_*` stays exact.
    /// Returns true if this debit depleted the battery.
    pub fn debit(&mut self, amount: f64, category: EnergyCategory) -> bool {
        if amount <= 0.0 || self.depleted {
            return false;
        }
        let taken = amount.min(self.residual);
        match category {
            EnergyCategory::Propulsion => self.spent_propulsion += taken,
            EnergyCategory::Comm => self.spent_comm += taken,
        }
        if amount >= self.residual {
            self.residual = 0.0;
            self.depleted = true;
            return true;
        }
        self.residual = self.initial - self.spent_propulsion - self.spent_comm;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hover_is_p0_plus_pi() {
        let p = EnergyParams::default();
        assert_eq!(propulsion_power(0.0, &p).unwrap(), p.p0 + p.pi);
        assert!((propulsion_power(0.0, &p).unwrap() - 168.49).abs() < 1e-12);
    }

    #[test]
    fn ten_mps_matches_high_precision_substitution() {
        // 40-digit evaluation of the same formula with the default constants
        let expected = 126.033_686_773_721_15;
        let got = propulsion_power(10.0, &EnergyParams::default()).unwrap();
        assert!((got - expected).abs() / expected < 1e-13, "{got}");
    }

    #[test]
    fn negative_speed_rejected() {
        assert!(propulsion_power(-1.0, &EnergyParams::default()).is_err());
    }

    #[test]
    fn propulsion_energy_cases() {
        let p = EnergyParams::default();
        assert_eq!(propulsion_energy(7.0, 0.0, &p).unwrap(), 0.0);
        assert!((propulsion_energy(0.0, 10.0, &p).unwrap() - 1684.9).abs() < 1e-9);
        let e1 = propulsion_energy(12.0, 3.0, &p).unwrap();
        let e2 = propulsion_energy(12.0, 6.0, &p).unwrap();
        assert!((e2 - 2.0 * e1).abs() < 1e-9);
    }

    #[test]
    fn comm_energy_cases() {
        assert!((comm_energy(0.1, 4328e-6) - 4.328e-4).abs() <= 4.328e-4 * 1e-12);
        assert!((comm_energy(0.1, 120e-6) - 1.2e-5).abs() <= 1.2e-5 * 1e-12);
        assert_eq!(comm_energy(0.1, 0.0), 0.0);
    }

    #[test]
    fn debit_cases() {
        let mut l = EnergyLedger::new(1.0);
        l.debit(0.4, EnergyCategory::Comm);
        assert!((l.residual - 0.6).abs() < 1e-15);
        assert_eq!(l.spent_comm, 0.4);

        let mut l = EnergyLedger::new(0.1);
        assert!(l.debit(0.5, EnergyCategory::Propulsion));
        assert_eq!(l.residual, 0.0);
        assert!(l.depleted);

        let mut l = EnergyLedger::new(1.0);
        let before = l.clone();
        l.debit(0.0, EnergyCategory::Comm);
        assert_eq!(l, before);
    }

    proptest! {
        #[test]
        fn conservation_and_monotonicity(debits in prop::collection::vec((0.0f64..50.0, any::<bool>()), 0..100)) {
            let mut l = EnergyLedger::new(1000.0);
            let mut last = l.residual;
            for (a, comm) in debits {
                l.debit(a, if comm { EnergyCategory::Comm } else { EnergyCategory::Propulsion });
                prop_assert!((l.initial - l.residual - l.spent_comm - l.spent_propulsion).abs() < 1e-9);
                prop_assert!(l.residual <= last);
                prop_assert!(l.residual >= 0.0);
                last = l.residual;
            }
        }

        #[test]
        fn power_is_continuous(v in 0.0f64..40.0) {
            let p = EnergyParams::default();
            let a = propulsion_power(v, &p).unwrap();
            let b = propulsion_power(v + 1e-7, &p).unwrap();
            prop_assert!((a - b).abs() < 1e-3);
        }
    }
}
