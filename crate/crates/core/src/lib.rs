//! Partial actions of discrete groups, Fell bundles with finite-dimensional fibers, and
//! numerical certificates for the approximation property.
//!
//! Infinite groups are handled through word-length windows (`ball(R)`); every result
//! computed on a window is only claimed on that window.

pub mod ap;
pub mod cantor;
pub mod error;
pub mod fdalg;
pub mod fellbundle;
pub mod group;
pub mod kernels;
pub mod linalg;
pub mod random;
pub mod report;

pub use error::{Error, Result};
pub use fdalg::{CPartialAction, FdAlgebra, FdElement, Ideal, IdealIso};
pub use fellbundle::{FellBundle, Section};
pub use group::{Elem, GroupCtx};
pub use report::ValidationReport;
