use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::quadrature::{integrate_endpoint_singular, QuadControl};

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Law made of Dirac atoms plus an absolutely continuous part supported on
/// a closed interval. The total mass may be below one when the law is a
/// restriction (for example to a fixed number of switches).
#[derive(Clone)]
pub struct MixedDistribution {
    pub atoms: Vec<Atom>,
    pub support: (f64, f64),
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for MixedDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MixedDistribution")
            .field("atoms", &self.atoms)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl MixedDistribution {
    pub fn new(atoms: Vec<Atom>, support: (f64, f64), density: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        MixedDistribution {
            atoms,
            support,
            density: Arc::new(density),
        }
    }

    pub fn atoms_only(atoms: Vec<Atom>) -> Self {
        let loc = atoms.first().map_or(0.0, |a| a.location);
        Self::new(atoms, (loc, loc), |_| 0.0)
    }

    /// Value of the absolutely continuous part; zero off the open support.
    pub fn density(&self, y: f64) -> f64 {
        if self.support.0 < y && y < self.support.1 {
            (self.density)(y)
        } else {
            0.0
        }
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Continuous mass on `[lo, hi]`. Integrable inverse-square-root
    /// singularities at the support ends are handled.
    pub fn continuous_mass_between(&self, lo: f64, hi: f64, ctl: &QuadControl) -> Result<f64> {
        let a = lo.max(self.support.0);
        let b = hi.min(self.support.1);
        if !(a < b) {
            return Ok(0.0);
        }
        integrate_endpoint_singular(|y| self.density(y), a, b, ctl)
    }

    pub fn continuous_mass(&self, ctl: &QuadControl) -> Result<f64> {
        self.continuous_mass_between(self.support.0, self.support.1, ctl)
    }

    pub fn total_mass(&self, ctl: &QuadControl) -> Result<f64> {
        Ok(self.atom_mass() + self.continuous_mass(ctl)?)
    }
}
