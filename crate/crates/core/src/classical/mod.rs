//! Classical torus maps, their periodic orbits and the orbit data entering trace formulas.

mod lattice;
mod model;
mod orbits;
mod symbolic;

pub use lattice::{cat_periodic_points, hermite_lower, LatticePoint};
pub use model::{iterate_map, CatMatrix, KickedParams, MapKind, MapModel, Potential, TorusPoint, TransitionMatrix};
pub use orbits::{
    baker_action, cat_action, describe, enumerate_periodic_orbits, enumerate_periodic_orbits_with_budget,
    orbit_invariants, orbits_with_invariants, rational_to_f64, OrbitInvariants, OrbitLabel, PeriodicOrbit,
    Rational, DEFAULT_ENUMERATION_BUDGET,
};
pub use symbolic::{periodic_orbit_codes, periodic_words, SymbolCode};
