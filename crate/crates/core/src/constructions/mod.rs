pub mod appendix;
pub mod lemma2;
pub mod lemma3;
pub mod lemma_factor;
pub mod matcher;
pub mod star;
pub mod theorem_b;

pub use appendix::{appendix_section, check_section, FiniteAction, Section};
pub use lemma2::{Lemma2, Lemma2Params};
pub use lemma3::{IdentityOe, Lemma3, Lemma3Params, StableOe};
pub use lemma_factor::{LemmaFactor, LemmaFactorParams};
pub use matcher::{IdentityOracle, Matcher, ReturnOracle, ZOracle};
pub use star::{BasePoint, StarAction, StarParams};
pub use theorem_b::{TheoremB, TheoremBParams};
