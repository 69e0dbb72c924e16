//! Self-describing list of the checks a suite document may request.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Param {
    pub name: &'static str,
    #[serde(rename = "type")]
    pub ty: &'static str,
    /// `None` when the field is required.
    pub default: Option<&'static str>,
    pub doc: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub name: &'static str,
    /// The statement the check exercises.
    pub anchor: &'static str,
    pub summary: &'static str,
    pub params: Vec<Param>,
    /// A complete suite document running this check.
    pub example: &'static str,
}

const fn req(name: &'static str, ty: &'static str, doc: &'static str) -> Param {
    Param { name, ty, default: None, doc }
}

const fn opt(name: &'static str, ty: &'static str, default: &'static str, doc: &'static str) -> Param {
    Param { name, ty, default: Some(default), doc }
}

const SEED: Param = req("seed", "u64", "seed of the sampled points");
const BUDGET: Param = opt("budget", "u64", "16777216", "largest number of window states enumerated");

pub fn catalog() -> Vec<Entry> {
    vec![
        Entry {
            name: "theorem-b",
            anchor: "Theorem B: K^{F_n}/K is a Bernoulli shift of F_n with base K^n",
            summary: "joint law, independence, generation, equivariance, K-invariance and tree round trip of θ",
            params: vec![
                req("group", "group", "the finite group K"),
                opt("rank", "usize", "2", "rank n of the free group"),
                opt("radius", "u64", "1", "ball carrying the enumerated variables"),
                opt("equivariance_length", "u64", "3", "largest |h| in the equivariance check"),
                opt("roundtrip_radius", "u64", "3", "radius of the reconstruction round trip"),
                opt("samples", "u64", "100", "sampled points"),
                SEED,
                BUDGET,
            ],
            example: r#"schema_version = 1
[groups.K]
builtin = "Z2"
[[checks]]
name = "theorem-b-z2"
kind = "theorem-b"
group = "K"
seed = 1
"#,
        },
        Entry {
            name: "lemma-2",
            anchor: "Lemma 2: F_2 ↷ (ℤ/κ)^{⟨b⟩\\F_2} is stably orbit equivalent to a Bernoulli action of F_{1+κ}",
            summary: "W_0 measure, both cocycle identities, ω'∘ω, star formula, coset distinctness, matching measure, scan frequency",
            params: vec![
                opt("kappa", "u32", "2", "κ ≥ 2"),
                opt("oracle", "first-return | identity", "first-return", "ℤ orbit equivalence used on V_0"),
                opt("return_symbol", "u32", "0", "symbol of the first-return set"),
                opt("matcher_radius", "i64", "64", "scan radius of the bracket matcher"),
                opt("samples", "u64", "100", "sampled points"),
                SEED,
                opt("scan_samples", "u64", "10000", "points for the undetermined-scan frequency"),
                opt("gate", "f64", "0.05", "largest acceptable undetermined frequency"),
                opt("mc_samples", "u64", "20000", "points for the matching-measure test"),
                opt("quantile", "f64", "0.999", "chi-square acceptance quantile"),
            ],
            example: r#"schema_version = 1
[[checks]]
name = "lemma-2"
kind = "lemma-2"
samples = 2
scan_samples = 200
mc_samples = 2000
gate = 0.2
seed = 1
"#,
        },
        Entry {
            name: "lemma-indep",
            anchor: "independence lemma: (x, y) ↦ ω_1(x)·y_{ω_2(x)} is i.i.d. uniform and independent of x",
            summary: "exact enumeration of X × X_0^I for an explicit finite instance",
            params: vec![
                req("x_size", "usize", "|X|"),
                req("x0_size", "u32", "|X_0|"),
                req("h_action", "[[u32]]", "h_action[h] is the permutation of X_0 by h"),
                req("index_size", "usize", "|I|"),
                req("family", "[[[u32, usize]]]", "family[j][x] = [h, i]"),
                BUDGET,
            ],
            example: r#"schema_version = 1
[[checks]]
name = "sixteen-points"
kind = "lemma-indep"
x_size = 2
x0_size = 2
h_action = [[0, 1], [1, 0]]
index_size = 3
family = [[[0, 0], [1, 2]], [[1, 1], [0, 0]]]
"#,
        },
        Entry {
            name: "coinduction-characterization",
            anchor: "co-induction characterization: equivariant ρ, generation and independence of ρ(t·y)",
            summary: "runs the characterization on a co-induced action with ρ the base projection",
            params: vec![
                req("instance", "free-product | twisted-free", "which co-induced action"),
                opt("factors", "[{group, label}]", "[]", "free factors; group `integers` is ℤ"),
                opt("subgroup", "usize", "0", "index of Λ among the factors"),
                opt("inner", "left-regular | trivial", "left-regular", "Λ-action on X_0"),
                opt("alphabet", "u32", "2", "X_0 for the trivial inner action"),
                opt("kappa", "u32", "2", "κ for twisted-free"),
                opt("radius", "u64", "2", "transversal radius"),
                opt("word_cap", "u64", "2", "word-length cap of the transversal"),
                opt("samples", "u64", "100", "sampled points"),
                SEED,
                BUDGET,
                opt("mc_samples", "u64", "10000", "Monte Carlo fallback sample count"),
            ],
            example: r#"schema_version = 1
[groups.K]
builtin = "Z2"
[[checks]]
name = "z2-in-z2-z2"
kind = "coinduction-characterization"
instance = "free-product"
factors = [{ group = "K", label = "s" }, { group = "K", label = "t" }]
seed = 1
"#,
        },
        Entry {
            name: "lemma-factor",
            anchor: "factor lemma: Γ*Λ ↷ K^{Γ\\Γ*Λ}/K is co-induced from Λ ↷ K^Λ/K",
            summary: "consequence identity, ρ-equivariance, family independence and the characterization",
            params: vec![
                req("gamma", "group", "Γ"),
                req("lambda", "group", "Λ"),
                req("k", "group", "K"),
                opt("radius", "u64", "1", "radius of the independent family"),
                opt("samples", "u64", "100", "sampled points"),
                SEED,
                BUDGET,
            ],
            example: r#"schema_version = 1
[groups.K]
builtin = "Z2"
[[checks]]
name = "factor-z2"
kind = "lemma-factor"
gamma = "K"
lambda = "K"
k = "K"
seed = 1
"#,
        },
        Entry {
            name: "star-action",
            anchor: "co-induced orbit equivalence: the star action g*y = ω(g, y)·y",
            summary: "base space relations, cocycle identities, star formula, orbit equality, I_n → J_n, independence",
            params: vec![
                req("k", "group", "K"),
                req("twist", "[element]", "involution t_b of K for each label b"),
                opt("radius", "u64", "2", "word radius"),
                opt("samples", "u64", "100", "sampled points"),
                SEED,
                BUDGET,
            ],
            example: r#"schema_version = 1
[groups.K]
builtin = "Z2"
[[checks]]
name = "star-z2"
kind = "star-action"
k = "K"
twist = ["0", "1"]
samples = 10
seed = 1
"#,
        },
        Entry {
            name: "lemma-3",
            anchor: "Lemma 3: diagonal extension of a stable orbit equivalence to Bernoulli products",
            summary: "extended action axiom, distinct enumeration, family and ρ independence",
            params: vec![
                opt("base", "lemma-2 | identity", "lemma-2", "stable orbit equivalence being extended"),
                opt("kappa", "u32", "2", "κ of the base"),
                opt("matcher_radius", "i64", "64", "scan radius for the lemma-2 base"),
                opt("y_alphabet", "u32", "2", "alphabet of the extra Bernoulli factor"),
                opt("samples", "u64", "5", "sampled points"),
                SEED,
                opt("indep_points", "u64", "4", "points of the finite X"),
                req("members", "[[word, u32]]", "pairs (λ, i) tested for independence"),
                BUDGET,
            ],
            example: r#"schema_version = 1
[[checks]]
name = "lemma-3-identity"
kind = "lemma-3"
base = "identity"
members = [["a", 0], ["b", 0]]
seed = 1
"#,
        },
        Entry {
            name: "appendix-section",
            anchor: "measurable section of a free action of a finite group",
            summary: "bijectivity, equivariance and pushforward measure of the section map; non-free actions fail",
            params: vec![
                req("group", "group", "the finite group"),
                opt("copies", "u32", "none", "free action on this many copies of the group"),
                opt("relabel", "[u32]", "identity", "relabelling of the copies' points"),
                opt("table", "[[u32]]", "none", "explicit action, table[k][x] = k·x"),
            ],
            example: r#"schema_version = 1
[groups.K]
builtin = "Z3"
[[checks]]
name = "section-z3"
kind = "appendix-section"
group = "K"
copies = 2
"#,
        },
    ]
}

pub fn catalog_text() -> String {
    let mut out = String::new();
    for e in catalog() {
        out.push_str(&format!("{}\n  {}\n  {}\n", e.name, e.anchor, e.summary));
        for p in &e.params {
            let default = p.default.map(|d| format!(" = {d}")).unwrap_or_else(|| " (required)".into());
            out.push_str(&format!("    {}: {}{default}  {}\n", p.name, p.ty, p.doc));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SuiteConfig;

    #[test]
    fn names_are_stable() {
        let names: Vec<_> = catalog().iter().map(|e| e.name).collect();
        assert_eq!(
            names,
            [
                "theorem-b",
                "lemma-2",
                "lemma-indep",
                "coinduction-characterization",
                "lemma-factor",
                "star-action",
                "lemma-3",
                "appendix-section"
            ]
        );
        assert!(catalog().iter().all(|e| !e.anchor.is_empty()));
    }

    #[test]
    fn examples_parse_to_their_kind() {
        for e in catalog() {
            let c = SuiteConfig::parse(e.example).unwrap_or_else(|err| panic!("{}: {err}", e.name));
            assert_eq!(c.checks.len(), 1);
            assert_eq!(c.checks[0].spec.kind(), e.name);
        }
    }
}
