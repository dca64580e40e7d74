//! Characteristic impedances of self-similar LC circuits.
//!
//! The crate evaluates the closed-form characteristic impedances of three
//! circuit families (the LC ladder, a modified Sierpinski-gasket circuit and
//! a Hanoi-type circuit), checks them against exact reduction of finite
//! regularized approximations, and locates the pass bands where the
//! impedance has positive real part.
//!
//! * [`circuit`]: elements, evaluation contexts, networks.
//! * [`reduce`]: series/parallel, delta-Y, star-mesh elimination.
//! * [`families`]: level-N builders for the three families.
//! * [`closedform`]: closed-form impedances and filter bands.
//! * [`limits`]: self-similar maps, fixed-point iteration, regularized limits.
//! * [`cli`]: the `fraxim` command-line front end.

pub mod circuit;
pub mod cli;
pub mod closedform;
pub mod error;
pub mod families;
pub mod limits;
pub mod reduce;

pub use circuit::{Edge, Element, EvalContext, Network, NodeId};
pub use error::{Error, Result};
pub use families::{Family, FamilyImpedance, FamilyParams, FamilySpec, Termination};
pub use num_complex::Complex64;
