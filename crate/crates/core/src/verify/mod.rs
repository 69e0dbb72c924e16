pub mod generation;
pub mod independence;
pub mod lemma_indep;
pub mod report;

pub use generation::{generation_check, Reconstructor};
pub use independence::{independence_exact, independence_mc, Variable, VariableFamily};
pub use lemma_indep::{lemma_indep_check, LemmaIndepInstance};
pub use report::{Mode, Stat, Verdict, VerificationReport, REPORT_SCHEMA_VERSION};
