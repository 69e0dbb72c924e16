//! Actions on configuration spaces, applied lazily: `g·x` is a view that
//! reads `x` at relocated coordinates.

use std::collections::BTreeSet;
use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::spaces::{stream_seed, Configuration, Coordinate, Field, WindowFn};
use crate::verify::{
    generation_check, independence_exact, independence_mc, Mode, Reconstructor, Stat, Variable, VariableFamily,
    VerificationReport,
};
use crate::words::{Coset, GroupSpec, Length, RMode, Word, WordError};

/// A left action on `A^I` given coordinatewise: `read(g, x, c) = (g·x)_c`.
pub trait Action: Send + Sync {
    type Elem: Clone + Debug + PartialEq + Send + Sync;
    type Coord: Coordinate;

    fn alphabet(&self) -> u32;
    fn identity(&self) -> Self::Elem;
    fn compose(&self, g: &Self::Elem, h: &Self::Elem) -> Self::Elem;
    fn read(&self, g: &Self::Elem, x: &dyn Field<Self::Coord>, c: &Self::Coord) -> Result<u32>;

    /// Coordinates of `x` read by `(g·x)_c`, when known in advance.
    fn support(&self, _g: &Self::Elem, _c: &Self::Coord) -> Option<Vec<Self::Coord>> {
        None
    }

    fn apply<'a>(&'a self, g: &Self::Elem, x: &'a dyn Field<Self::Coord>) -> Acted<'a, Self>
    where
        Self: Sized,
    {
        Acted { action: self, g: g.clone(), inner: x }
    }
}

/// The point `g·x`.
pub struct Acted<'a, A: Action> {
    pub action: &'a A,
    pub g: A::Elem,
    pub inner: &'a dyn Field<A::Coord>,
}

impl<A: Action> Field<A::Coord> for Acted<'_, A> {
    fn value(&self, c: &A::Coord) -> Result<u32> {
        self.action.read(&self.g, self.inner, c)
    }
    fn alphabet(&self) -> u32 {
        self.action.alphabet()
    }
}

/// `(g·x)_h = x_{hg}` on `A^G`.
#[derive(Debug, Clone)]
pub struct Bernoulli {
    pub group: GroupSpec,
    pub alphabet: u32,
}

impl Action for Bernoulli {
    type Elem = Word;
    type Coord = Word;

    fn alphabet(&self) -> u32 {
        self.alphabet
    }
    fn identity(&self) -> Word {
        Word::identity()
    }
    fn compose(&self, g: &Word, h: &Word) -> Word {
        self.group.mul(g, h)
    }
    fn read(&self, g: &Word, x: &dyn Field<Word>, c: &Word) -> Result<u32> {
        x.value(&self.group.mul(c, g))
    }
    fn support(&self, g: &Word, c: &Word) -> Option<Vec<Word>> {
        Some(vec![self.group.mul(c, g)])
    }
}

/// The shift `(n·z)_m = z_{m+n}` on `A^ℤ`.
#[derive(Debug, Clone, Copy)]
pub struct Shift {
    pub alphabet: u32,
}

impl Action for Shift {
    type Elem = i64;
    type Coord = i64;

    fn alphabet(&self) -> u32 {
        self.alphabet
    }
    fn identity(&self) -> i64 {
        0
    }
    fn compose(&self, g: &i64, h: &i64) -> i64 {
        g + h
    }
    fn read(&self, n: &i64, z: &dyn Field<i64>, m: &i64) -> Result<u32> {
        z.value(&(m + n))
    }
    fn support(&self, n: &i64, m: &i64) -> Option<Vec<i64>> {
        Some(vec![m + n])
    }
}

/// An action of the subgroup generated by one free factor on a finite
/// alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InnerAction {
    /// ℤ factor acting by `n·v = v + n mod modulus`.
    Cyclic { modulus: u32 },
    /// ℤ factor whose generator acts by a permutation.
    Generator { perm: Vec<u32> },
    /// Finite factor: `perms[λ][v] = λ·v`.
    Table { perms: Vec<Vec<u32>> },
    Trivial { alphabet: u32 },
}

impl InnerAction {
    /// Left multiplication of a finite group on itself.
    pub fn left_regular(group: &FiniteGroup) -> Self {
        InnerAction::Table {
            perms: group.elements().map(|a| group.elements().map(|b| group.mul(a, b)).collect()).collect(),
        }
    }

    /// Bernoulli action `(λ·x)_μ = x_{μλ}` of a finite group on `X_0^Λ`,
    /// with points encoded base `x0` (digit `μ` holds `x_μ`).
    pub fn finite_bernoulli(group: &FiniteGroup, x0: u32) -> Self {
        let n = group.order();
        let size = x0.pow(n);
        let digits = |v: u32| -> Vec<u32> { (0..n).map(|i| v / x0.pow(i) % x0).collect() };
        let encode = |d: &[u32]| -> u32 { d.iter().enumerate().map(|(i, &x)| x * x0.pow(i as u32)).sum() };
        InnerAction::Table {
            perms: group
                .elements()
                .map(|l| {
                    (0..size)
                        .map(|v| {
                            let d = digits(v);
                            let moved: Vec<u32> = group.elements().map(|mu| d[group.mul(mu, l) as usize]).collect();
                            encode(&moved)
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn alphabet(&self) -> u32 {
        match self {
            InnerAction::Cyclic { modulus } => *modulus,
            InnerAction::Generator { perm } => perm.len() as u32,
            InnerAction::Table { perms } => perms.first().map_or(0, |p| p.len() as u32),
            InnerAction::Trivial { alphabet } => *alphabet,
        }
    }

    /// `λ·v` for `λ` a word in the factor `factor` of `group`.
    pub fn apply(&self, group: &GroupSpec, factor: usize, lambda: &Word, v: u32) -> Result<u32> {
        if lambda.syllables().iter().any(|s| s.factor != factor) {
            return Err(WordError::ForeignWord(group.format(lambda)).into());
        }
        Ok(match self {
            InnerAction::Trivial { .. } => v,
            InnerAction::Cyclic { modulus } => {
                let n = group.exponent_sum(lambda, factor);
                ((v as i64 + n).rem_euclid(*modulus as i64)) as u32
            }
            InnerAction::Generator { perm } => {
                let n = group.exponent_sum(lambda, factor);
                let mut v = v;
                if n >= 0 {
                    for _ in 0..n {
                        v = perm[v as usize];
                    }
                } else {
                    for _ in 0..-n {
                        v = perm.iter().position(|&p| p == v).expect("permutation") as u32;
                    }
                }
                v
            }
            InnerAction::Table { perms } => {
                let l = group
                    .finite_value(lambda, factor)
                    .ok_or_else(|| Error::from(WordError::NotAFreeFactor(factor)))?;
                perms[l as usize][v as usize]
            }
        })
    }
}

/// Co-induced action `(g·y)_{Λk} = Ω(Λk, g)·y_{Λkg}` on `X^{Λ\G}`.
#[derive(Debug, Clone)]
pub struct Coinduced {
    pub group: GroupSpec,
    pub subgroup: usize,
    pub mode: RMode,
    pub inner: InnerAction,
}

impl Coinduced {
    pub fn new(group: GroupSpec, subgroup: usize, mode: RMode, inner: InnerAction) -> Result<Self> {
        let f = group.factor(subgroup).map_err(|_| WordError::NotAFreeFactor(subgroup))?;
        let fits = match &inner {
            InnerAction::Cyclic { .. } | InnerAction::Generator { .. } => !f.is_finite(),
            InnerAction::Table { perms } => f.finite_group().is_some_and(|k| k.order() as usize == perms.len()),
            InnerAction::Trivial { .. } => true,
        };
        if !fits {
            return Err(Error::Precondition(format!("inner action does not match factor {}", f.name)));
        }
        Ok(Coinduced { group, subgroup, mode, inner })
    }

    /// The action of Lemma-one type: `F_2 = ⟨a⟩ * ⟨b⟩` co-induced from ℤ
    /// acting on `ℤ/κ` by addition, with `r` the homomorphism onto `⟨b⟩`.
    pub fn twisted_free(kappa: u32) -> Self {
        let group = GroupSpec::free(&["a", "b"]).expect("valid names");
        Coinduced { group, subgroup: 1, mode: RMode::Homomorphism, inner: InnerAction::Cyclic { modulus: kappa } }
    }

    pub fn base(&self) -> Coset {
        Coset::base(self.subgroup)
    }
}

impl Action for Coinduced {
    type Elem = Word;
    type Coord = Coset;

    fn alphabet(&self) -> u32 {
        self.inner.alphabet()
    }
    fn identity(&self) -> Word {
        Word::identity()
    }
    fn compose(&self, g: &Word, h: &Word) -> Word {
        self.group.mul(g, h)
    }
    fn read(&self, g: &Word, y: &dyn Field<Coset>, c: &Coset) -> Result<u32> {
        if c.subgroup != self.subgroup {
            return Err(Error::Precondition("coset of a different subgroup".into()));
        }
        let omega = self.group.omega_transfer(c, g, self.mode)?;
        let v = y.value(&self.group.coset_act(c, g))?;
        self.inner.apply(&self.group, self.subgroup, &omega, v)
    }
    fn support(&self, g: &Word, c: &Coset) -> Option<Vec<Coset>> {
        Some(vec![self.group.coset_act(c, g)])
    }
}

/// `F_2 ↷ (ℤ/κ)^{⟨b⟩\F_2}` by `(g·x)_{⟨b⟩h} = r(g) + x_{⟨b⟩hg}` with
/// `r(a) = 0`, `r(b) = 1`.
#[derive(Debug, Clone)]
pub struct Twisted {
    pub group: GroupSpec,
    pub kappa: u32,
}

impl Twisted {
    pub fn new(kappa: u32) -> Result<Self> {
        if kappa < 2 {
            return Err(Error::Precondition("κ must be at least 2".into()));
        }
        Ok(Twisted { group: GroupSpec::free(&["a", "b"])?, kappa })
    }

    /// `r(g)` in `ℤ/κ`.
    pub fn r(&self, g: &Word) -> u32 {
        self.group.exponent_sum(g, 1).rem_euclid(self.kappa as i64) as u32
    }
}

impl Action for Twisted {
    type Elem = Word;
    type Coord = Coset;

    fn alphabet(&self) -> u32 {
        self.kappa
    }
    fn identity(&self) -> Word {
        Word::identity()
    }
    fn compose(&self, g: &Word, h: &Word) -> Word {
        self.group.mul(g, h)
    }
    fn read(&self, g: &Word, x: &dyn Field<Coset>, c: &Coset) -> Result<u32> {
        let v = x.value(&self.group.coset_act(c, g))?;
        Ok((v + self.r(g)) % self.kappa)
    }
    fn support(&self, g: &Word, c: &Coset) -> Option<Vec<Coset>> {
        Some(vec![self.group.coset_act(c, g)])
    }
}

/// Induced action on `K^I/K`: points are represented with value `e` at
/// `base`, and `g·[x] = [g·x]`. The inner action must commute with the
/// diagonal `K`-translation.
pub struct Quotient<A: Action> {
    pub inner: A,
    pub group: FiniteGroup,
    pub base: A::Coord,
}

impl<A: Action> Action for Quotient<A> {
    type Elem = A::Elem;
    type Coord = A::Coord;

    fn alphabet(&self) -> u32 {
        self.group.order()
    }
    fn identity(&self) -> A::Elem {
        self.inner.identity()
    }
    fn compose(&self, g: &A::Elem, h: &A::Elem) -> A::Elem {
        self.inner.compose(g, h)
    }
    fn read(&self, g: &A::Elem, x: &dyn Field<A::Coord>, c: &A::Coord) -> Result<u32> {
        let b = self.inner.read(g, x, &self.base)?;
        Ok(self.group.mul(self.group.inv(b), self.inner.read(g, x, c)?))
    }
    fn support(&self, g: &A::Elem, c: &A::Coord) -> Option<Vec<A::Coord>> {
        let mut s = self.inner.support(g, &self.base)?;
        s.extend(self.inner.support(g, c)?);
        s.sort();
        s.dedup();
        Some(s)
    }
}

/// Diagonal action of a common group on a product of two spaces.
pub struct Diagonal<A, B> {
    pub left: A,
    pub right: B,
}

impl<A: Action, B: Action<Elem = A::Elem>> Diagonal<A, B> {
    pub fn apply<'a>(
        &'a self,
        g: &A::Elem,
        x: &'a dyn Field<A::Coord>,
        y: &'a dyn Field<B::Coord>,
    ) -> (Acted<'a, A>, Acted<'a, B>) {
        (self.left.apply(g, x), self.right.apply(g, y))
    }
}

/// First-return map of the shift to the cylinder `{z : z_0 = symbol}`,
/// scanning at most `radius` steps per return.
#[derive(Debug, Clone, Copy)]
pub struct FirstReturn {
    pub alphabet: u32,
    pub symbol: u32,
    pub radius: i64,
}

impl FirstReturn {
    pub fn contains(&self, z: &dyn Field<i64>) -> Result<bool> {
        Ok(z.value(&0)? == self.symbol)
    }

    /// Return-time cocycle `η(n, z)`: `n*z = η(n, z)·z`.
    pub fn eta(&self, n: i64, z: &dyn Field<i64>) -> Result<i64> {
        if !self.contains(z)? {
            return Err(Error::Precondition("point outside the return set".into()));
        }
        let step = n.signum();
        let mut pos = 0i64;
        for _ in 0..n.abs() {
            let mut found = false;
            for k in 1..=self.radius {
                if z.value(&(pos + step * k))? == self.symbol {
                    pos += step * k;
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::Undetermined(format!("no return within {} steps of {pos}", self.radius)));
            }
        }
        Ok(pos)
    }
}

impl Action for FirstReturn {
    type Elem = i64;
    type Coord = i64;

    fn alphabet(&self) -> u32 {
        self.alphabet
    }
    fn identity(&self) -> i64 {
        0
    }
    fn compose(&self, g: &i64, h: &i64) -> i64 {
        g + h
    }
    fn read(&self, n: &i64, z: &dyn Field<i64>, m: &i64) -> Result<u32> {
        z.value(&(m + self.eta(*n, z)?))
    }
}

/// A factor map `ρ : Y → X` reading finitely many coordinates.
pub struct FactorMap<'a, C> {
    pub deps: Vec<C>,
    pub eval: WindowFn<'a, C>,
}

impl FactorMap<'_, Coset> {
    /// `ρ(y) = y_{Λe}`.
    pub fn base_projection(subgroup: usize) -> Self {
        let base = Coset::base(subgroup);
        FactorMap { deps: vec![base.clone()], eval: Box::new(move |y: &dyn Field<Coset>| y.value(&base)) }
    }
}

/// Parameters for [`check_coinduced_characterization`].
pub struct CharacterizationParams {
    pub radius: u64,
    /// Word-length cap when enumerating the transversal.
    pub word_cap: u64,
    pub samples: u64,
    pub seed: u64,
    pub budget: u64,
    /// Sample count for the Monte Carlo fallback.
    pub mc_samples: u64,
}

/// An action of `G` with a factor map `ρ` onto a `Λ`-space, `Λ` one of the
/// free factors of `G`.
pub struct Characterization<'a, A: Action<Elem = Word>> {
    pub action: &'a A,
    pub group: &'a GroupSpec,
    pub subgroup: usize,
    /// Length used to enumerate the transversal `⋃ I_n`.
    pub length: Length,
    /// Action of `Λ` on the values of `ρ`.
    pub inner: &'a InnerAction,
    pub rho: &'a FactorMap<'a, A::Coord>,
    /// Functions the family must determine; coordinate projections of the
    /// family window when absent.
    pub targets: Option<Vec<WindowFn<'a, A::Coord>>>,
    pub reconstructor: Option<&'a Reconstructor<'a>>,
}

/// Checks the co-induction characterization: `ρ(λ·y) = λ·ρ(y)`; the maps
/// `y ↦ ρ(t·y)`, `t` in the transversal up to the radius, determine the
/// targets on the window they read; and these maps are independent.
pub fn check_coinduced_characterization<A: Action<Elem = Word>>(
    input: &Characterization<'_, A>,
    params: &CharacterizationParams,
) -> Result<VerificationReport> {
    let g = input.group;
    let lam = input.subgroup;
    let action = input.action;
    let rho = input.rho;
    let alphabet = action.alphabet();
    let mut report = VerificationReport::new("coinduction-characterization", Mode::Exact)
        .param("group", g.factors().iter().map(|f| f.name.clone()).collect::<Vec<_>>().join("*"))
        .param("subgroup", &g.factors()[lam].name)
        .param("radius", params.radius)
        .with_seed(params.seed);

    // 1. Λ-equivariance on sampled points
    let lambdas: Vec<Word> = g
        .ball(2, &Length::Word, None)?
        .into_iter()
        .filter(|w| w.syllables().iter().all(|s| s.factor == lam))
        .collect();
    let mut eq = VerificationReport::new("equivariance", Mode::Exact)
        .param("samples", params.samples)
        .param("subgroup-elements", lambdas.len())
        .with_seed(params.seed);
    'outer: for i in 0..params.samples {
        let y = Configuration::<A::Coord>::sample(alphabet, stream_seed(params.seed, i));
        let r0 = (rho.eval)(&y)?;
        for l in &lambdas {
            let lhs = (rho.eval)(&action.apply(l, &y))?;
            let rhs = input.inner.apply(g, lam, l, r0)?;
            if lhs != rhs {
                eq.fail(format!("sample {i}, λ = {}: ρ(λ·y) = {lhs}, λ·ρ(y) = {rhs}", g.format(l)));
                break 'outer;
            }
        }
    }
    report.push_child(eq);

    // variables y ↦ ρ(t·y)
    let transversal = g.transversal(lam, &input.length, params.radius, params.word_cap)?;
    let mut vars: Vec<Variable<'_, A::Coord>> = Vec::new();
    for t in &transversal {
        let mut deps = BTreeSet::new();
        for d in &rho.deps {
            let s = action
                .support(t, d)
                .ok_or_else(|| Error::Precondition("action does not declare its read support".into()))?;
            deps.extend(s);
        }
        let t2 = t.clone();
        vars.push(Variable::new(format!("ρ({}·y)", g.format(t)), deps.into_iter().collect(), move |y: &dyn Field<A::Coord>| {
            (rho.eval)(&action.apply(&t2, y))
        }));
    }
    let family = VariableFamily::new(vars);
    let window = family.window();
    report.stat("transversal-size", Stat::Count(transversal.len() as u64));
    report.stat("window-size", Stat::Count(window.len() as u64));

    // 2. generation on the window read by the family
    let projections: Vec<WindowFn<'_, A::Coord>>;
    let targets: &[WindowFn<'_, A::Coord>] = match &input.targets {
        Some(t) => t,
        None => {
            projections = window
                .iter()
                .map(|c| {
                    let c = c.clone();
                    Box::new(move |y: &dyn Field<A::Coord>| y.value(&c)) as WindowFn<'_, A::Coord>
                })
                .collect();
            &projections
        }
    };
    match generation_check(&family, targets, &window, alphabet, params.budget, input.reconstructor) {
        Ok(mut r) => {
            r.note("finite-window invertibility stands in for generating the σ-algebra");
            report.push_child(r);
        }
        Err(Error::BudgetExceeded { .. }) => {
            let mut r = VerificationReport::new("generation", Mode::Exact);
            r.undetermined("window exceeds the enumeration budget");
            report.push_child(r);
        }
        Err(e) => return Err(e),
    }

    // 3. independence
    match independence_exact(&family, alphabet, params.budget) {
        Ok(r) => report.push_child(r),
        Err(Error::BudgetExceeded { .. }) => {
            report.mode = Mode::MonteCarlo;
            report.push_child(independence_mc(&family, alphabet, params.mc_samples, params.seed, 0.999)?);
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// Reconstructor for `ρ(y) = y_{Λe}` on a co-induced action:
/// `y_{Λt} = Ω(Λe, t)^{-1}·ρ(t·y)`, in sorted window order.
pub fn base_projection_reconstructor<'a>(
    action: &'a Coinduced,
    radius: u64,
) -> Result<impl Fn(&[u32]) -> Result<Vec<u32>> + Sync + 'a> {
    let g = &action.group;
    let transversal = g.transversal(action.subgroup, &Length::Word, radius, radius)?;
    let base = action.base();
    let cosets: Vec<Coset> = transversal.iter().map(|t| g.coset_act(&base, t)).collect();
    let order: Vec<Coset> = cosets.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let slots: Vec<usize> = order.iter().map(|c| cosets.iter().position(|d| d == c).expect("present")).collect();
    let omegas: Vec<Word> = transversal
        .iter()
        .map(|t| g.omega_transfer(&base, t, action.mode).map(|w| g.inverse(&w)))
        .collect::<std::result::Result<_, _>>()?;
    Ok(move |values: &[u32]| -> Result<Vec<u32>> {
        slots
            .iter()
            .map(|&j| action.inner.apply(&action.group, action.subgroup, &omegas[j], values[j]))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::DEFAULT_BUDGET;

    fn f2() -> GroupSpec {
        GroupSpec::free(&["a", "b"]).unwrap()
    }

    fn z2z2() -> GroupSpec {
        let k = FiniteGroup::cyclic(2);
        GroupSpec::free_product(&[GroupSpec::finite("s", k.clone()).unwrap(), GroupSpec::finite("t", k).unwrap()])
            .unwrap()
    }

    fn action_axiom<A: Action<Elem = Word>>(a: &A, group: &GroupSpec, coords: &[A::Coord], seeds: u64) {
        let ball = group.ball(2, &Length::Word, None).unwrap();
        for s in 0..seeds {
            let x = Configuration::<A::Coord>::sample(a.alphabet(), s);
            for g in &ball {
                for h in &ball {
                    let hx = a.apply(h, &x);
                    let ghx = a.apply(g, &hx);
                    let gh = a.compose(g, h);
                    let direct = a.apply(&gh, &x);
                    for c in coords {
                        assert_eq!(ghx.value(c).unwrap(), direct.value(c).unwrap(), "g={g:?} h={h:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn bernoulli_axiom_and_identity() {
        let g = f2();
        let a = Bernoulli { group: g.clone(), alphabet: 3 };
        let coords = g.ball(1, &Length::Word, None).unwrap();
        action_axiom(&a, &g, &coords, 3);
        let x = Configuration::<Word>::sample(3, 5);
        for c in &coords {
            assert_eq!(a.apply(&Word::identity(), &x).value(c).unwrap(), x.value(c).unwrap());
        }
    }

    #[test]
    fn shift_reads_right_neighbour() {
        let x = Configuration::<i64>::sample(2, 1);
        let s = Shift { alphabet: 2 };
        for h in -5..5 {
            assert_eq!(s.apply(&1, &x).value(&h).unwrap(), x.value(&(h + 1)).unwrap());
        }
    }

    #[test]
    fn coinduced_axiom_both_modes() {
        let g = f2();
        let coords: Vec<Coset> = g.ball(2, &Length::Word, None).unwrap().iter().map(|w| g.coset(1, w)).collect();
        for mode in [RMode::Transversal, RMode::Homomorphism] {
            let a = Coinduced::new(g.clone(), 1, mode, InnerAction::Generator { perm: vec![1, 2, 0] }).unwrap();
            action_axiom(&a, &g, &coords, 2);
        }
        let h = z2z2();
        let inner = InnerAction::finite_bernoulli(&FiniteGroup::cyclic(2), 2);
        let a = Coinduced::new(h.clone(), 0, RMode::Transversal, inner).unwrap();
        let coords: Vec<Coset> = h.ball(3, &Length::Word, None).unwrap().iter().map(|w| h.coset(0, w)).collect();
        action_axiom(&a, &h, &coords, 2);
    }

    #[test]
    fn coinduced_restricts_to_inner_at_base() {
        let g = f2();
        let a = Coinduced::new(g.clone(), 1, RMode::Transversal, InnerAction::Cyclic { modulus: 5 }).unwrap();
        let y = Configuration::<Coset>::sample(5, 9);
        for n in -3..=3 {
            let l = g.syllable_word(1, n);
            let v = a.apply(&l, &y).value(&a.base()).unwrap();
            assert_eq!(v, ((y.value(&a.base()).unwrap() as i64 + n).rem_euclid(5)) as u32);
        }
    }

    #[test]
    fn coinduced_bernoulli_is_bernoulli() {
        // Λ = ⟨s⟩ ≅ ℤ/2 < ℤ/2 * ℤ/2; X = (ℤ/2)^Λ encoded in base 2.
        // y_{Λt} ↔ (x_{λt})_λ; the co-induced action must match the shift.
        let h = z2z2();
        let k = FiniteGroup::cyclic(2);
        let a = Coinduced::new(h.clone(), 0, RMode::Transversal, InnerAction::finite_bernoulli(&k, 2)).unwrap();
        let b = Bernoulli { group: h.clone(), alphabet: 2 };
        let ball = h.ball(2, &Length::Word, None).unwrap();
        let x = Configuration::<Word>::sample(2, 77);
        // y_{Λt} digit μ = x_{μt}
        let y_of = |x: &dyn Field<Word>, c: &Coset| -> u32 {
            (0..2u32).map(|mu| x.value(&h.mul(&h.syllable_word(0, mu as i64), &c.rep)).unwrap() << mu).sum()
        };
        let cosets: Vec<Coset> = ball.iter().map(|w| h.coset(0, w)).collect();
        let mut window = std::collections::BTreeMap::new();
        for w in h.ball(4, &Length::Word, None).unwrap() {
            let c = h.coset(0, &w);
            window.insert(c.clone(), y_of(&x, &c));
        }
        let y = Configuration::from_window(4, window);
        for g in &ball {
            let gx = b.apply(g, &x);
            let gy = a.apply(g, &y);
            for c in &cosets {
                assert_eq!(gy.value(c).unwrap(), y_of(&gx, c), "g = {}", h.format(g));
            }
        }
    }

    #[test]
    fn twisted_matches_coinduction() {
        let t = Twisted::new(3).unwrap();
        let c = Coinduced::twisted_free(3);
        let g = f2();
        let x = Configuration::<Coset>::sample(3, 4);
        let coords: Vec<Coset> = g.ball(2, &Length::Word, None).unwrap().iter().map(|w| g.coset(1, w)).collect();
        for w in g.ball(3, &Length::Word, None).unwrap() {
            for k in &coords {
                assert_eq!(t.apply(&w, &x).value(k).unwrap(), c.apply(&w, &x).value(k).unwrap());
            }
        }
        action_axiom(&t, &g, &coords, 2);
        let a = g.generator("a").unwrap();
        let b = g.generator("b").unwrap();
        let base = Coset::base(1);
        assert_eq!(t.apply(&a, &x).value(&base).unwrap(), x.value(&g.coset(1, &a)).unwrap());
        assert_eq!(t.apply(&b, &x).value(&base).unwrap(), (x.value(&base).unwrap() + 1) % 3);
    }

    #[test]
    fn quotient_is_well_defined() {
        let k = FiniteGroup::cyclic(3);
        let g = f2();
        let q = Quotient { inner: Bernoulli { group: g.clone(), alphabet: 3 }, group: k.clone(), base: Word::identity() };
        let coords = g.ball(2, &Length::Word, None).unwrap();
        let x = Configuration::<Word>::sample(3, 8);
        let norm = crate::spaces::Normalized { group: &k, base: Word::identity(), inner: &x };
        for h in g.ball(2, &Length::Word, None).unwrap() {
            let direct = q.apply(&h, &x);
            let via = q.apply(&h, &norm);
            for c in &coords {
                assert_eq!(direct.value(c).unwrap(), via.value(c).unwrap());
            }
            assert_eq!(direct.value(&Word::identity()).unwrap(), 0);
        }
    }

    #[test]
    fn first_return_basics() {
        let fr = FirstReturn { alphabet: 2, symbol: 0, radius: 64 };
        let mut z = Configuration::<i64>::constant(2, &[0, 1, 2, 3, -1, -2], 1);
        z.set(0, 0);
        z.set(1, 0);
        z.set(-2, 0);
        assert_eq!(fr.eta(1, &z).unwrap(), 1);
        assert_eq!(fr.eta(-1, &z).unwrap(), -2);
        let z = Configuration::<i64>::sample(2, 3);
        let start = (0..).find(|&m| z.value(&m).unwrap() == 0).unwrap();
        let s = Shift { alphabet: 2 };
        let z0 = s.apply(&start, &z);
        let one = fr.eta(1, &z0).unwrap();
        let moved = s.apply(&one, &z0);
        assert_eq!(fr.eta(-1, &moved).unwrap(), -one);
    }

    #[test]
    fn mean_return_time_is_kappa() {
        let fr = FirstReturn { alphabet: 2, symbol: 0, radius: 200 };
        let n = 10_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for i in 0..n {
            let mut z = Configuration::<i64>::sample(2, stream_seed(31, i));
            z.set(0, 0);
            let t = fr.eta(1, &z).unwrap() as f64;
            sum += t;
            sq += t * t;
        }
        let mean = sum / n as f64;
        let sd = (sq / n as f64 - mean * mean).sqrt();
        assert!((mean - 2.0).abs() < 3.0 * sd / (n as f64).sqrt(), "mean {mean}");
    }

    fn params() -> CharacterizationParams {
        CharacterizationParams { radius: 2, word_cap: 2, samples: 20, seed: 1, budget: DEFAULT_BUDGET, mc_samples: 10_000 }
    }

    fn canonical<'a>(
        a: &'a Coinduced,
        rho: &'a FactorMap<'a, Coset>,
        rec: Option<&'a Reconstructor<'a>>,
    ) -> Characterization<'a, Coinduced> {
        Characterization {
            action: a,
            group: &a.group,
            subgroup: a.subgroup,
            length: Length::Word,
            inner: &a.inner,
            rho,
            targets: None,
            reconstructor: rec,
        }
    }

    #[test]
    fn canonical_coinduced_passes() {
        let a = Coinduced::new(z2z2(), 0, RMode::Transversal, InnerAction::left_regular(&FiniteGroup::cyclic(2))).unwrap();
        let rho = FactorMap::base_projection(0);
        let rec = base_projection_reconstructor(&a, 2).unwrap();
        let r = check_coinduced_characterization(&canonical(&a, &rho, Some(&rec)), &params()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn twisted_free_passes() {
        let a = Coinduced::twisted_free(2);
        let rho = FactorMap::base_projection(1);
        let rec = base_projection_reconstructor(&a, 2).unwrap();
        let r = check_coinduced_characterization(&canonical(&a, &rho, Some(&rec)), &params()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.statistics["transversal-size"], Stat::Count(9));
    }

    #[test]
    fn correlated_rho_fails_independence() {
        let a = Coinduced::new(z2z2(), 0, RMode::Transversal, InnerAction::Trivial { alphabet: 2 }).unwrap();
        let h = z2z2();
        let other = h.coset(0, &h.generator("t:1").unwrap());
        let base = Coset::base(0);
        let (b2, o2) = (base.clone(), other.clone());
        let rho = FactorMap {
            deps: vec![base, other],
            eval: Box::new(move |y: &dyn Field<Coset>| Ok(y.value(&b2)? ^ y.value(&o2)?)),
        };
        let r = check_coinduced_characterization(&canonical(&a, &rho, None), &params()).unwrap();
        let indep = r.children.iter().find(|c| c.check == "independence-exact").unwrap();
        assert!(!indep.passed(), "{}", r.to_text());
    }
}
