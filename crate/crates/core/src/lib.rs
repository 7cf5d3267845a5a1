//! Composition algebras, pseudo-hyperbolic quadrics and Hopf
//! pseudo-Riemannian submersions, with numerical checks of the structure
//! equations of submersions with totally geodesic fibres.
//!
//! ```
//! # fn main() -> hopf_submersions::Result<()> {
//! use hopf_submersions::{fibrations, verify};
//!
//! let f = fibrations::build::<f64>("pi_H", &[2, 1])?;
//! let mut rng = verify::rng_for(7, &f.label());
//! let p = f.sample_point(&mut rng);
//! let frame = f.horizontal_frame(&p)?;
//! assert_eq!(frame.signature().index, f.base_dims.1);
//! # Ok(())
//! # }
//! ```

pub mod algebra;
pub mod classify;
pub mod error;
pub mod fibrations;
pub mod geometry;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};

pub type Element = algebra::AlgebraElement<f64>;
pub type Space = spaces::PseudoHyperbolicSpace<f64>;
pub type Point = spaces::AmbientPoint<f64>;
pub type Fibration = fibrations::FibrationSpec<f64>;
