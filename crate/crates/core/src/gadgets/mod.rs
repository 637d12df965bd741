//! Executable hardness reductions, used as test fixtures against
//! brute-force oracles.

pub mod cnf;
pub mod majsat;
pub mod repair;
pub mod sat;

pub use cnf::{has_hamiltonian_path, parse_dimacs, Cnf, Literal};
pub use majsat::{gadget_majsat_subset, gadget_majsat_superset, MajsatGadget};
pub use repair::{gadget_hampath, gadget_isorepair};
pub use sat::{gadget_sat_subset, gadget_sat_superset, gadget_sat_update, SatGadget};
