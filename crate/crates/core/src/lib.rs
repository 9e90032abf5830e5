//! Equation of state of the weakly interacting two-dimensional Bose gas.
//!
//! * [`specfun`]: Γ(0,x) and K₀/K₁ with scaled forms for extreme arguments.
//! * [`eos`]: mean-field and beyond-mean-field equations of state, the
//!   in-medium amplitude expansion and its χ² fit.
//! * [`reference`]: bundled diffusion Monte Carlo energies for dipoles.
//! * [`dmc`]: variational and diffusion Monte Carlo for bosons in a periodic
//!   box.
//! * [`trap`]: local density approximation in a harmonic trap and the
//!   breathing-mode frequency.
//! * [`cli`]: the command implementations behind the `bose2d` binary.

pub mod cli;
pub mod dmc;
pub mod eos;
pub mod quad;
pub mod reference;
pub mod root;
pub mod specfun;
pub mod trap;

pub use eos::{GasParameter, Theory, TheorySpec, UniversalConstants};
pub use reference::ReferenceRow;
