//! Exact desk-scale workbench for Bernoulli shifts over free groups and free
//! products, co-induced actions, measurable cocycles, and the explicit
//! (stable) orbit equivalences and factor isomorphisms built from them.

pub mod actions;
pub mod cocycles;
pub mod constructions;
pub mod error;
pub mod group;
pub mod spaces;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
pub use group::{FiniteGroup, GroupTableDocument, GroupTableError};
pub use spaces::{Configuration, Coordinate, CylinderDistribution, Field};
pub use words::{Coset, GroupSpec, Length, RMode, Word, WordError};
pub use actions::{Action, Bernoulli, Coinduced, InnerAction};
pub use cocycles::{Cocycle, TargetGroup};
pub use verify::{Mode, Stat, Verdict, VerificationReport};
