//! Reduced words in free products of ℤ factors and finite factors.
//!
//! Every group handled here is a free product `H_0 * H_1 * ... * H_{k-1}` where
//! each factor is either infinite cyclic (one named generator) or a finite
//! group given by its table. A free group of rank `n` is the free product of
//! `n` infinite cyclic factors. Words are stored in syllable normal form, which
//! is canonical: two words are equal as group elements iff they are equal as
//! values.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::group::FiniteGroup;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("generator names must be unique, {0:?} appears twice")]
    DuplicateName(String),
    #[error("a free group needs rank >= 1")]
    ZeroRank,
    #[error("a free product needs at least two factors, got {0}")]
    TooFewFactors(usize),
    #[error("invalid generator name {0:?}")]
    InvalidName(String),
    #[error("word does not belong to this group: {0}")]
    ForeignWord(String),
    #[error("unknown factor index {0}")]
    UnknownFactor(usize),
    #[error("unknown token {0:?}")]
    UnknownToken(String),
    #[error("malformed exponent in token {0:?}")]
    BadExponent(String),
    #[error("ball with a partial length function needs a word-length cap")]
    UnboundedBall,
    #[error("homomorphism mode needs the subgroup to be a free factor; factor {0} is not")]
    NotAFreeFactor(usize),
}

/// One factor of a free product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorKind {
    /// Infinite cyclic group on a single generator.
    Integers,
    /// Finite group with per-element token names (identity included).
    Finite { group: Arc<FiniteGroup>, names: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    /// Generator name for ℤ factors, label for finite ones.
    pub name: String,
    pub kind: FactorKind,
}

impl Factor {
    pub fn integers(name: &str) -> Self {
        Factor { name: name.to_string(), kind: FactorKind::Integers }
    }

    /// Finite factor whose element tokens are `<label>:<element name>`.
    pub fn finite(label: &str, group: FiniteGroup) -> Self {
        let names = group
            .elements()
            .map(|a| format!("{label}:{}", group.element_name(a)))
            .collect();
        Factor {
            name: label.to_string(),
            kind: FactorKind::Finite { group: Arc::new(group), names },
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, FactorKind::Finite { .. })
    }

    pub fn finite_group(&self) -> Option<&FiniteGroup> {
        match &self.kind {
            FactorKind::Finite { group, .. } => Some(group),
            FactorKind::Integers => None,
        }
    }

    fn tokens(&self) -> Vec<&str> {
        match &self.kind {
            FactorKind::Integers => vec![self.name.as_str()],
            FactorKind::Finite { names, .. } => names.iter().map(String::as_str).collect(),
        }
    }
}

/// A syllable: an exponent for a ℤ factor, an element index for a finite
/// factor. Never the factor identity inside a reduced word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub factor: usize,
    pub value: i64,
}

/// Reduced word: adjacent syllables come from different factors and no
/// syllable is trivial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Syllable>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.0
    }

    pub fn first(&self) -> Option<Syllable> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Syllable> {
        self.0.last().copied()
    }

    /// Canonical byte encoding, used to key pseudo-random coordinate values.
    pub fn key_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.0.len() * 16);
        for s in &self.0 {
            out.extend_from_slice(&(s.factor as u64).to_le_bytes());
            out.extend_from_slice(&s.value.to_le_bytes());
        }
        out
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex on syllables: fewer syllables first, then lexicographic.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

/// How the choice of `r : G → Λ` is made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RMode {
    /// `r(g)` is the leftmost syllable of `g` if it lies in Λ, else `e`.
    Transversal,
    /// `r = π`, the projection killing every other factor.
    Homomorphism,
}

/// Length functions on words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Length {
    /// Total number of letters (|exponent| for ℤ syllables, 1 for finite).
    Word,
    /// Letters belonging to the listed factors.
    Letters(Vec<usize>),
}

/// A free product of ℤ and finite factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    factors: Vec<Factor>,
}

impl GroupSpec {
    pub fn from_factors(factors: Vec<Factor>) -> Result<Self, WordError> {
        let mut seen: Vec<&str> = Vec::new();
        for f in &factors {
            if f.name.is_empty() || f.name == "e" || f.name.contains(|c: char| c.is_whitespace() || c == '^') {
                return Err(WordError::InvalidName(f.name.clone()));
            }
            for t in f.tokens() {
                if seen.contains(&t) {
                    return Err(WordError::DuplicateName(t.to_string()));
                }
                seen.push(t);
            }
        }
        Ok(GroupSpec { factors })
    }

    /// Free group on the given generator names.
    pub fn free(names: &[&str]) -> Result<Self, WordError> {
        if names.is_empty() {
            return Err(WordError::ZeroRank);
        }
        Self::from_factors(names.iter().map(|n| Factor::integers(n)).collect())
    }

    /// Free group `F_n` on `a1..an`.
    pub fn free_rank(n: usize) -> Result<Self, WordError> {
        let names: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Self::free(&refs)
    }

    pub fn integers(name: &str) -> Result<Self, WordError> {
        Self::from_factors(vec![Factor::integers(name)])
    }

    pub fn finite(label: &str, group: FiniteGroup) -> Result<Self, WordError> {
        Self::from_factors(vec![Factor::finite(label, group)])
    }

    /// Free product of at least two groups; factors are concatenated in order.
    pub fn free_product(parts: &[GroupSpec]) -> Result<Self, WordError> {
        let factors: Vec<Factor> = parts.iter().flat_map(|p| p.factors.iter().cloned()).collect();
        if factors.len() < 2 {
            return Err(WordError::TooFewFactors(factors.len()));
        }
        Self::from_factors(factors)
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> Result<&Factor, WordError> {
        self.factors.get(i).ok_or(WordError::UnknownFactor(i))
    }

    pub fn factor_index(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name == name)
    }

    /// The word of a ℤ generator or of a finite element token.
    pub fn generator(&self, token: &str) -> Result<Word, WordError> {
        self.parse(token)
    }

    /// Single-syllable word.
    pub fn syllable_word(&self, factor: usize, value: i64) -> Word {
        self.normalize(vec![Syllable { factor, value }])
    }

    /// The letters generating the group: `t` and `t^-1` for each ℤ factor,
    /// every non-identity element of each finite factor.
    pub fn letters(&self) -> Vec<Word> {
        let mut out = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            match &f.kind {
                FactorKind::Integers => {
                    out.push(Word(vec![Syllable { factor: i, value: 1 }]));
                    out.push(Word(vec![Syllable { factor: i, value: -1 }]));
                }
                FactorKind::Finite { group, .. } => {
                    for a in group.elements().filter(|&a| a != group.identity()) {
                        out.push(Word(vec![Syllable { factor: i, value: a as i64 }]));
                    }
                }
            }
        }
        out
    }

    /// Splits a word into letters, leftmost first.
    pub fn spell(&self, w: &Word) -> Vec<Word> {
        let mut out = Vec::new();
        for s in &w.0 {
            if self.factors[s.factor].is_finite() {
                out.push(Word(vec![*s]));
            } else {
                let unit = Syllable { factor: s.factor, value: s.value.signum() };
                for _ in 0..s.value.unsigned_abs() {
                    out.push(Word(vec![unit]));
                }
            }
        }
        out
    }

    fn is_trivial(&self, s: &Syllable) -> bool {
        match &self.factors[s.factor].kind {
            FactorKind::Integers => s.value == 0,
            FactorKind::Finite { group, .. } => s.value == group.identity() as i64,
        }
    }

    fn combine(&self, a: Syllable, b: Syllable) -> Syllable {
        debug_assert_eq!(a.factor, b.factor);
        let value = match &self.factors[a.factor].kind {
            FactorKind::Integers => a.value + b.value,
            FactorKind::Finite { group, .. } => group.mul(a.value as u32, b.value as u32) as i64,
        };
        Syllable { factor: a.factor, value }
    }

    fn normalize(&self, syllables: Vec<Syllable>) -> Word {
        let mut out: Vec<Syllable> = Vec::with_capacity(syllables.len());
        for s in syllables {
            if self.is_trivial(&s) {
                continue;
            }
            match out.last().copied() {
                Some(top) if top.factor == s.factor => {
                    let merged = self.combine(top, s);
                    out.pop();
                    if !self.is_trivial(&merged) {
                        out.push(merged);
                    }
                }
                _ => out.push(s),
            }
        }
        Word(out)
    }

    /// Checks that a word is a reduced word over this group.
    pub fn validate(&self, w: &Word) -> Result<(), WordError> {
        let mut prev: Option<usize> = None;
        for s in &w.0 {
            let f = self.factors.get(s.factor).ok_or_else(|| WordError::ForeignWord(format!("{w:?}")))?;
            let in_range = match &f.kind {
                FactorKind::Integers => true,
                FactorKind::Finite { group, .. } => s.value >= 0 && (s.value as u32) < group.order(),
            };
            if !in_range || self.is_trivial(s) || prev == Some(s.factor) {
                return Err(WordError::ForeignWord(format!("{w:?}")));
            }
            prev = Some(s.factor);
        }
        Ok(())
    }

    /// Reduced product; inputs are assumed valid for this group.
    pub fn mul(&self, a: &Word, b: &Word) -> Word {
        let mut out = a.0.clone();
        for s in &b.0 {
            match out.last().copied() {
                Some(top) if top.factor == s.factor => {
                    let merged = self.combine(top, *s);
                    out.pop();
                    if !self.is_trivial(&merged) {
                        out.push(merged);
                    }
                }
                _ => out.push(*s),
            }
        }
        Word(out)
    }

    /// Checked product of two words of this group.
    pub fn multiply(&self, a: &Word, b: &Word) -> Result<Word, WordError> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(self.mul(a, b))
    }

    pub fn mul_all<'a>(&self, ws: impl IntoIterator<Item = &'a Word>) -> Word {
        ws.into_iter().fold(Word::identity(), |acc, w| self.mul(&acc, w))
    }

    pub fn inverse(&self, w: &Word) -> Word {
        Word(
            w.0.iter()
                .rev()
                .map(|s| {
                    let value = match &self.factors[s.factor].kind {
                        FactorKind::Integers => -s.value,
                        FactorKind::Finite { group, .. } => group.inv(s.value as u32) as i64,
                    };
                    Syllable { factor: s.factor, value }
                })
                .collect(),
        )
    }

    /// `g h g^-1`
    pub fn conjugate(&self, g: &Word, h: &Word) -> Word {
        self.mul(&self.mul(g, h), &self.inverse(g))
    }

    pub fn length(&self, w: &Word, length: &Length) -> u64 {
        w.0.iter()
            .filter(|s| match length {
                Length::Word => true,
                Length::Letters(fs) => fs.contains(&s.factor),
            })
            .map(|s| if self.factors[s.factor].is_finite() { 1 } else { s.value.unsigned_abs() })
            .sum()
    }

    /// Number of letters of `w` from the given factor.
    pub fn gamma_length(&self, w: &Word, factor: usize) -> Result<u64, WordError> {
        self.factor(factor)?;
        Ok(self.length(w, &Length::Letters(vec![factor])))
    }

    /// Parses the token grammar: space-separated `name^exp` (or bare `name`)
    /// for ℤ generators, element tokens for finite factors, `e` for identity.
    pub fn parse(&self, text: &str) -> Result<Word, WordError> {
        let mut syllables = Vec::new();
        for token in text.split_whitespace() {
            if token == "e" {
                continue;
            }
            let (name, exp) = match token.split_once('^') {
                Some((n, e)) => {
                    let exp: i64 = e.parse().map_err(|_| WordError::BadExponent(token.to_string()))?;
                    (n, exp)
                }
                None => (token, 1),
            };
            let mut found = None;
            for (i, f) in self.factors.iter().enumerate() {
                match &f.kind {
                    FactorKind::Integers if f.name == name => {
                        found = Some(Syllable { factor: i, value: exp });
                    }
                    FactorKind::Finite { group, names } => {
                        if let Some(pos) = names.iter().position(|n| n == name) {
                            let v = group.power(pos as u32, exp);
                            found = Some(Syllable { factor: i, value: v as i64 });
                        }
                    }
                    _ => {}
                }
            }
            syllables.push(found.ok_or_else(|| WordError::UnknownToken(token.to_string()))?);
        }
        Ok(self.normalize(syllables))
    }

    /// Serializes a word in the token grammar (always with explicit
    /// exponents for ℤ syllables).
    pub fn format(&self, w: &Word) -> String {
        if w.is_identity() {
            return "e".to_string();
        }
        w.0.iter()
            .map(|s| match &self.factors[s.factor].kind {
                FactorKind::Integers => format!("{}^{}", self.factors[s.factor].name, s.value),
                FactorKind::Finite { names, .. } => names[s.value as usize].clone(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn display<'a>(&'a self, w: &'a Word) -> WordDisplay<'a> {
        WordDisplay { spec: self, word: w }
    }

    /// All words with word length at most `cap`, in shortlex order.
    pub fn words_up_to(&self, cap: u64) -> Vec<Word> {
        let mut out = vec![Word::identity()];
        let mut stack = vec![(Word::identity(), 0u64)];
        while let Some((w, used)) = stack.pop() {
            let last = w.last().map(|s| s.factor);
            for (i, f) in self.factors.iter().enumerate() {
                if Some(i) == last {
                    continue;
                }
                let mut push = |value: i64, cost: u64| {
                    if used + cost <= cap {
                        let mut s = w.0.clone();
                        s.push(Syllable { factor: i, value });
                        let nw = Word(s);
                        out.push(nw.clone());
                        stack.push((nw, used + cost));
                    }
                };
                match &f.kind {
                    FactorKind::Integers => {
                        for k in 1..=(cap - used) as i64 {
                            push(k, k as u64);
                            push(-k, k as u64);
                        }
                    }
                    FactorKind::Finite { group, .. } => {
                        for a in group.elements().filter(|&a| a != group.identity()) {
                            push(a as i64, 1);
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Words whose `length` is at most `radius`. With a partial length
    /// function the ball is infinite, so `word_cap` bounds the total word
    /// length of the enumerated words.
    pub fn ball(&self, radius: u64, length: &Length, word_cap: Option<u64>) -> Result<Vec<Word>, WordError> {
        let cap = match (length, word_cap) {
            (Length::Word, cap) => cap.map_or(radius, |c| c.min(radius)),
            (Length::Letters(_), Some(c)) => c,
            (Length::Letters(_), None) => return Err(WordError::UnboundedBall),
        };
        Ok(self
            .words_up_to(cap)
            .into_iter()
            .filter(|w| self.length(w, length) <= radius)
            .collect())
    }

    /// `true` if the leftmost syllable of `w` is outside `factor` (false for `e`).
    pub fn starts_outside(&self, w: &Word, factor: usize) -> bool {
        w.first().is_some_and(|s| s.factor != factor)
    }

    /// Transversal level `I_n` for the subgroup `factor`: words of `length`
    /// exactly `n` whose leftmost syllable lies outside the subgroup; `I_0 = {e}`.
    pub fn transversal_level(&self, factor: usize, length: &Length, n: u64, word_cap: u64) -> Result<Vec<Word>, WordError> {
        self.factor(factor)?;
        if n == 0 {
            return Ok(vec![Word::identity()]);
        }
        Ok(self
            .ball(n, length, Some(word_cap))?
            .into_iter()
            .filter(|w| self.length(w, length) == n && self.starts_outside(w, factor))
            .collect())
    }

    /// Canonical transversal of the subgroup `factor` up to `length` radius.
    pub fn transversal(&self, factor: usize, length: &Length, radius: u64, word_cap: u64) -> Result<Vec<Word>, WordError> {
        let mut out = Vec::new();
        for n in 0..=radius {
            out.extend(self.transversal_level(factor, length, n, word_cap)?);
        }
        Ok(out)
    }

    /// `I_k^{letter}`: words `g` with `|g| = k` and `|letter·g| = k + 1`.
    pub fn growth_level(&self, letter: &Word, length: &Length, k: u64, word_cap: u64) -> Result<Vec<Word>, WordError> {
        Ok(self
            .ball(k, length, Some(word_cap))?
            .into_iter()
            .filter(|g| self.length(g, length) == k && self.length(&self.mul(letter, g), length) == k + 1)
            .collect())
    }

    /// Canonical right coset `Λg` of the subgroup generated by a factor.
    pub fn coset(&self, factor: usize, g: &Word) -> Coset {
        let rep = match g.first() {
            Some(s) if s.factor == factor => Word(g.0[1..].to_vec()),
            _ => g.clone(),
        };
        Coset { subgroup: factor, rep }
    }

    /// Right action of `G` on `Λ\G`: `Λk · g = Λkg`.
    pub fn coset_act(&self, c: &Coset, g: &Word) -> Coset {
        self.coset(c.subgroup, &self.mul(&c.rep, g))
    }

    /// `r : G → Λ` with `r(λg) = λ r(g)` and `r(e) = e`.
    pub fn r_map(&self, g: &Word, factor: usize, mode: RMode) -> Result<Word, WordError> {
        self.factor(factor).map_err(|_| WordError::NotAFreeFactor(factor))?;
        Ok(match mode {
            RMode::Transversal => match g.first() {
                Some(s) if s.factor == factor => Word(vec![s]),
                _ => Word::identity(),
            },
            RMode::Homomorphism => {
                self.normalize(g.0.iter().filter(|s| s.factor == factor).copied().collect())
            }
        })
    }

    /// Transfer cocycle `Ω(Λk, g) = r(k)^-1 r(kg)` for the right action on `Λ\G`.
    pub fn omega_transfer(&self, c: &Coset, g: &Word, mode: RMode) -> Result<Word, WordError> {
        self.validate(g)?;
        let rk = self.r_map(&c.rep, c.subgroup, mode)?;
        let rkg = self.r_map(&self.mul(&c.rep, g), c.subgroup, mode)?;
        Ok(self.mul(&self.inverse(&rk), &rkg))
    }

    /// The finite group of a finite factor, as seen from a single-factor word.
    pub fn finite_value(&self, w: &Word, factor: usize) -> Option<u32> {
        let group = self.factors.get(factor)?.finite_group()?;
        match w.0.as_slice() {
            [] => Some(group.identity()),
            [s] if s.factor == factor => Some(s.value as u32),
            _ => None,
        }
    }

    /// Image of a word of a component group whose factors sit at
    /// `offset..` in this free product.
    pub fn embed(&self, w: &Word, offset: usize) -> Result<Word, WordError> {
        let out = Word(w.0.iter().map(|s| Syllable { factor: s.factor + offset, value: s.value }).collect());
        self.validate(&out)?;
        Ok(out)
    }

    /// Exponent sum of the letters of a ℤ factor.
    pub fn exponent_sum(&self, w: &Word, factor: usize) -> i64 {
        w.0.iter().filter(|s| s.factor == factor).map(|s| s.value).sum()
    }
}

pub struct WordDisplay<'a> {
    spec: &'a GroupSpec,
    word: &'a Word,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec.format(self.word))
    }
}

/// A right coset `Λg`, stored by its canonical transversal representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    pub subgroup: usize,
    pub rep: Word,
}

impl Coset {
    pub fn base(subgroup: usize) -> Self {
        Coset { subgroup, rep: Word::identity() }
    }
}
