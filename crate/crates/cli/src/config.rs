//! The suite document: declared groups and the checks to run on them.

use std::collections::BTreeMap;
use std::path::Path;

use oe_core::spaces::DEFAULT_BUDGET;
use oe_core::{FiniteGroup, GroupTableDocument};
use serde::Deserialize;

/// Version of the suite document layout understood by this build.
pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    /// Dotted path of the offending field.
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, message: impl ToString) -> Self {
        ConfigError { field: field.into(), message: message.to_string() }
    }
}

/// A finite group: a built-in (`Z<m>`, `cyclic:<m>`, `klein`, `S3`) or an
/// explicit multiplication table.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum GroupDecl {
    Builtin { builtin: String },
    Table(GroupTableDocument),
}

impl GroupDecl {
    fn build(&self, field: &str) -> Result<FiniteGroup, ConfigError> {
        match self {
            GroupDecl::Builtin { builtin } => FiniteGroup::builtin(builtin)
                .ok_or_else(|| ConfigError::new(format!("{field}.builtin"), format!("unknown built-in group `{builtin}`"))),
            GroupDecl::Table(doc) => FiniteGroup::from_document(doc).map_err(|e| ConfigError::new(format!("{field}.table"), e)),
        }
    }
}

fn two() -> u32 {
    2
}
fn budget() -> u64 {
    DEFAULT_BUDGET
}
fn hundred() -> u64 {
    100
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremBCheck {
    pub group: String,
    #[serde(default = "rank")]
    pub rank: usize,
    #[serde(default = "one")]
    pub radius: u64,
    #[serde(default = "three")]
    pub equivariance_length: u64,
    #[serde(default = "three")]
    pub roundtrip_radius: u64,
    #[serde(default = "hundred")]
    pub samples: u64,
    pub seed: u64,
    #[serde(default = "budget")]
    pub budget: u64,
}
fn rank() -> usize {
    2
}
fn one() -> u64 {
    1
}
fn three() -> u64 {
    3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleDecl {
    FirstReturn,
    Identity,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma2Check {
    #[serde(default = "two")]
    pub kappa: u32,
    #[serde(default = "first_return")]
    pub oracle: OracleDecl,
    #[serde(default)]
    pub return_symbol: u32,
    #[serde(default = "scan_radius")]
    pub matcher_radius: i64,
    #[serde(default = "hundred")]
    pub samples: u64,
    pub seed: u64,
    #[serde(default = "scan_samples")]
    pub scan_samples: u64,
    #[serde(default = "gate")]
    pub gate: f64,
    #[serde(default = "mc_samples")]
    pub mc_samples: u64,
    #[serde(default = "quantile")]
    pub quantile: f64,
}
fn first_return() -> OracleDecl {
    OracleDecl::FirstReturn
}
fn scan_radius() -> i64 {
    64
}
fn scan_samples() -> u64 {
    10_000
}
fn gate() -> f64 {
    0.05
}
fn mc_samples() -> u64 {
    20_000
}
fn quantile() -> f64 {
    0.999
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaIndepCheck {
    pub x_size: usize,
    pub x0_size: u32,
    /// `h_action[h]` is the permutation of `X_0` by `h`.
    pub h_action: Vec<Vec<u32>>,
    pub index_size: usize,
    /// `family[j][x] = [h, i]`.
    pub family: Vec<Vec<(u32, usize)>>,
    #[serde(default = "budget")]
    pub budget: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDecl {
    /// A declared group, or `integers` for ℤ.
    pub group: String,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerDecl {
    LeftRegular,
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceDecl {
    /// `Λ = factors[subgroup]` acting on its `X_0` inside the free product.
    FreeProduct,
    /// `⟨b⟩ < F_2` acting on `ℤ/κ` through `b ↦ +1`.
    TwistedFree,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterizationCheck {
    pub instance: InstanceDecl,
    #[serde(default)]
    pub factors: Vec<FactorDecl>,
    #[serde(default)]
    pub subgroup: usize,
    #[serde(default = "left_regular")]
    pub inner: InnerDecl,
    /// Alphabet of the trivial inner action.
    #[serde(default = "two")]
    pub alphabet: u32,
    #[serde(default = "two")]
    pub kappa: u32,
    #[serde(default = "two_u64")]
    pub radius: u64,
    #[serde(default = "two_u64")]
    pub word_cap: u64,
    #[serde(default = "hundred")]
    pub samples: u64,
    pub seed: u64,
    #[serde(default = "budget")]
    pub budget: u64,
    #[serde(default = "mc_fallback")]
    pub mc_samples: u64,
}
fn left_regular() -> InnerDecl {
    InnerDecl::LeftRegular
}
fn two_u64() -> u64 {
    2
}
fn mc_fallback() -> u64 {
    10_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaFactorCheck {
    pub gamma: String,
    pub lambda: String,
    pub k: String,
    #[serde(default = "one")]
    pub radius: u64,
    #[serde(default = "hundred")]
    pub samples: u64,
    pub seed: u64,
    #[serde(default = "budget")]
    pub budget: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarCheck {
    pub k: String,
    /// Involution `t_b` of `K` for each label `b`, by element name.
    pub twist: Vec<String>,
    #[serde(default = "two_u64")]
    pub radius: u64,
    #[serde(default = "hundred")]
    pub samples: u64,
    pub seed: u64,
    #[serde(default = "budget")]
    pub budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StableOeDecl {
    Lemma2,
    Identity,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma3Check {
    #[serde(default = "lemma2_base")]
    pub base: StableOeDecl,
    #[serde(default = "two")]
    pub kappa: u32,
    #[serde(default = "scan_radius")]
    pub matcher_radius: i64,
    #[serde(default = "two")]
    pub y_alphabet: u32,
    #[serde(default = "five")]
    pub samples: u64,
    pub seed: u64,
    #[serde(default = "four")]
    pub indep_points: u64,
    /// `[λ, i]` pairs, `λ` a word.
    pub members: Vec<(String, u32)>,
    #[serde(default = "budget")]
    pub budget: u64,
}
fn lemma2_base() -> StableOeDecl {
    StableOeDecl::Lemma2
}
fn five() -> u64 {
    5
}
fn four() -> u64 {
    4
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppendixCheck {
    pub group: String,
    /// Free action on `copies` labelled copies of the group.
    pub copies: Option<u32>,
    pub relabel: Option<Vec<u32>>,
    /// Explicit action: `table[k][x] = k·x`.
    pub table: Option<Vec<Vec<u32>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CheckSpec {
    TheoremB(TheoremBCheck),
    #[serde(rename = "lemma-2")]
    Lemma2(Lemma2Check),
    LemmaIndep(LemmaIndepCheck),
    CoinductionCharacterization(CharacterizationCheck),
    LemmaFactor(LemmaFactorCheck),
    StarAction(StarCheck),
    #[serde(rename = "lemma-3")]
    Lemma3(Lemma3Check),
    AppendixSection(AppendixCheck),
}

impl CheckSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            CheckSpec::TheoremB(_) => "theorem-b",
            CheckSpec::Lemma2(_) => "lemma-2",
            CheckSpec::LemmaIndep(_) => "lemma-indep",
            CheckSpec::CoinductionCharacterization(_) => "coinduction-characterization",
            CheckSpec::LemmaFactor(_) => "lemma-factor",
            CheckSpec::StarAction(_) => "star-action",
            CheckSpec::Lemma3(_) => "lemma-3",
            CheckSpec::AppendixSection(_) => "appendix-section",
        }
    }

    /// Group names the check refers to, with the field naming each.
    fn group_refs(&self) -> Vec<(&'static str, &str)> {
        match self {
            CheckSpec::TheoremB(c) => vec![("group", &c.group)],
            CheckSpec::LemmaFactor(c) => vec![("gamma", &c.gamma), ("lambda", &c.lambda), ("k", &c.k)],
            CheckSpec::StarAction(c) => vec![("k", &c.k)],
            CheckSpec::AppendixSection(c) => vec![("group", &c.group)],
            CheckSpec::CoinductionCharacterization(c) => c
                .factors.iter().filter(|f| f.group != "integers").map(|f| ("factors.group", f.group.as_str())).collect(),
            _ => Vec::new(),
        }
    }

    pub fn seed_mut(&mut self) -> Option<&mut u64> {
        match self {
            CheckSpec::TheoremB(c) => Some(&mut c.seed),
            CheckSpec::Lemma2(c) => Some(&mut c.seed),
            CheckSpec::CoinductionCharacterization(c) => Some(&mut c.seed),
            CheckSpec::LemmaFactor(c) => Some(&mut c.seed),
            CheckSpec::StarAction(c) => Some(&mut c.seed),
            CheckSpec::Lemma3(c) => Some(&mut c.seed),
            CheckSpec::LemmaIndep(_) | CheckSpec::AppendixSection(_) => None,
        }
    }

    pub fn budget_mut(&mut self) -> Option<&mut u64> {
        match self {
            CheckSpec::TheoremB(c) => Some(&mut c.budget),
            CheckSpec::LemmaIndep(c) => Some(&mut c.budget),
            CheckSpec::CoinductionCharacterization(c) => Some(&mut c.budget),
            CheckSpec::LemmaFactor(c) => Some(&mut c.budget),
            CheckSpec::StarAction(c) => Some(&mut c.budget),
            CheckSpec::Lemma3(c) => Some(&mut c.budget),
            CheckSpec::Lemma2(_) | CheckSpec::AppendixSection(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub spec: CheckSpec,
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub schema_version: u32,
    pub groups: BTreeMap<String, FiniteGroup>,
    /// In document order.
    pub checks: Vec<Check>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    #[serde(default)]
    groups: BTreeMap<String, toml::Value>,
    checks: Vec<toml::Table>,
}

impl SuiteConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::new(top_field(&e), e.message()))?;
        if raw.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(ConfigError::new(
                "schema_version",
                format!("unsupported version {}, expected {CONFIG_SCHEMA_VERSION}", raw.schema_version),
            ));
        }
        let mut groups = BTreeMap::new();
        for (name, value) in raw.groups {
            let field = format!("groups.{name}");
            let decl: GroupDecl = value.try_into().map_err(|e: toml::de::Error| ConfigError::new(&field, e.message()))?;
            groups.insert(name, decl.build(&field)?);
        }
        let mut checks: Vec<Check> = Vec::new();
        for (i, mut table) in raw.checks.into_iter().enumerate() {
            let field = format!("checks[{i}]");
            let name = match table.remove("name") {
                Some(toml::Value::String(s)) => s,
                Some(_) => return Err(ConfigError::new(format!("{field}.name"), "must be a string")),
                None => return Err(ConfigError::new(format!("{field}.name"), "missing")),
            };
            if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') || name.is_empty() {
                return Err(ConfigError::new(format!("{field}.name"), "use letters, digits, `-` and `_` only"));
            }
            if checks.iter().any(|c| c.name == name) {
                return Err(ConfigError::new(format!("{field}.name"), format!("duplicate check name `{name}`")));
            }
            let field = format!("checks.{name}");
            let spec: CheckSpec =
                toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| ConfigError::new(&field, e.message()))?;
            for (key, group) in spec.group_refs() {
                if !groups.contains_key(group) {
                    return Err(ConfigError::new(format!("{field}.{key}"), format!("undeclared group `{group}`")));
                }
            }
            checks.push(Check { name, spec });
        }
        Ok(SuiteConfig { schema_version: raw.schema_version, groups, checks })
    }

    pub fn group(&self, name: &str) -> &FiniteGroup {
        &self.groups[name]
    }
}

/// Best-effort field name for a top-level parse error.
fn top_field(e: &toml::de::Error) -> String {
    let msg = e.message();
    for key in ["schema_version", "groups", "checks"] {
        if msg.contains(&format!("`{key}`")) {
            return key.to_string();
        }
    }
    "config".to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
schema_version = 1
[groups.K]
builtin = "Z2"
"#;

    fn parse(checks: &str) -> Result<SuiteConfig, ConfigError> {
        SuiteConfig::parse(&format!("{BASE}{checks}"))
    }

    #[test]
    fn defaults_fill_in() {
        let c = parse("[[checks]]\nname = \"tb\"\nkind = \"theorem-b\"\ngroup = \"K\"\nseed = 3\n").unwrap();
        let CheckSpec::TheoremB(t) = &c.checks[0].spec else { panic!() };
        assert_eq!((t.rank, t.radius, t.samples, t.seed), (2, 1, 100, 3));
        assert_eq!(c.group("K").order(), 2);
    }

    #[test]
    fn missing_seed_is_named() {
        let e = parse("[[checks]]\nname = \"tb\"\nkind = \"theorem-b\"\ngroup = \"K\"\n").unwrap_err();
        assert_eq!(e.field, "checks.tb");
        assert!(e.message.contains("seed"), "{e}");
    }

    #[test]
    fn undeclared_group_is_named() {
        let e = parse("[[checks]]\nname = \"tb\"\nkind = \"theorem-b\"\ngroup = \"H\"\nseed = 0\n").unwrap_err();
        assert_eq!(e.field, "checks.tb.group");
    }

    #[test]
    fn unknown_kind_and_fields() {
        let e = parse("[[checks]]\nname = \"x\"\nkind = \"lemma-9\"\n").unwrap_err();
        assert!(e.message.contains("lemma-9"), "{e}");
        let e = parse("[[checks]]\nname = \"x\"\nkind = \"appendix-section\"\ngroup = \"K\"\ncolour = 1\n").unwrap_err();
        assert!(e.message.contains("colour"), "{e}");
    }

    #[test]
    fn bad_group_table() {
        let e = SuiteConfig::parse("schema_version = 1\nchecks = []\n[groups.B]\nname = \"B\"\nelements = [\"e\", \"x\"]\ntable = [[0, 1], [1, 1]]\n")
            .unwrap_err();
        assert_eq!(e.field, "groups.B.table");
    }

    #[test]
    fn version_and_duplicates() {
        assert_eq!(SuiteConfig::parse("schema_version = 2\nchecks = []\n").unwrap_err().field, "schema_version");
        assert_eq!(SuiteConfig::parse("checks = []\n").unwrap_err().field, "schema_version");
        let twice = "[[checks]]\nname = \"a\"\nkind = \"appendix-section\"\ngroup = \"K\"\ncopies = 1\n";
        assert_eq!(parse(&format!("{twice}{twice}")).unwrap_err().field, "checks[1].name");
    }
}
