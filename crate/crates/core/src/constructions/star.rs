//! The star action `G_0 ↷ Y` on the co-induced space of `Λ_1 ↷ X`:
//! `γ * y = γ·y` and `λ_0 * y = η(λ_0, ρ(y))·y`, with the glued cocycles
//! `ω : G_0 × Y → G_1 × K` and `ω′ : G_1 × Y → G_0 × K`.
//!
//! The base space is `X = Λ × K × B` with `Λ = ℤ/2`. `Λ_1` flips the first
//! component, `K` translates the second on the left, and the generator of
//! `Λ_0` acts by `a * (l, κ, b) = (l + 1, κ t_b, b)`, so both actions share
//! the orbits of `Λ × K` and commute with `K`.

use std::sync::Arc;

use crate::actions::{Action, Coinduced, InnerAction};
use crate::cocycles::{verify_identity, Cocycle, SyncField, PointMover, Product, Star};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::spaces::{stream_seed, Configuration, Field};
use crate::verify::{independence_exact, Mode, Stat, Variable, VariableFamily, VerificationReport};
use crate::words::{Coset, GroupSpec, Length, RMode, Word};

const GAMMA: usize = 0;
const LAMBDA: usize = 1;

pub type StarTarget = Product<GroupSpec, FiniteGroup>;
pub type StarCocycle<'a> = Cocycle<'a, Coset, StarTarget>;

#[derive(Debug, Clone)]
pub struct StarAction {
    /// `Γ * Λ_0`.
    pub g0: GroupSpec,
    /// `Γ * Λ_1`.
    pub g1: GroupSpec,
    pub k: FiniteGroup,
    /// `t_b` for each label `b`; each must satisfy `t_b² = e`.
    pub twist: Vec<u32>,
    coinduced: Coinduced,
}

#[derive(Debug, Clone)]
pub struct StarParams {
    pub radius: u64,
    pub samples: u64,
    pub seed: u64,
    pub budget: u64,
}

/// A point of `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasePoint {
    pub l: u32,
    pub kappa: u32,
    pub b: u32,
}

impl StarAction {
    pub fn new(k: FiniteGroup, twist: Vec<u32>) -> Result<Self> {
        if twist.is_empty() {
            return Err(Error::Precondition("at least one label is needed".into()));
        }
        if let Some(b) = twist.iter().position(|&t| t >= k.order() || k.mul(t, t) != k.identity()) {
            return Err(Error::Precondition(format!("t_{b} must be an involution or e in {}", k.name())));
        }
        let z2 = FiniteGroup::cyclic(2);
        let g0 = GroupSpec::free_product(&[GroupSpec::finite("c", z2.clone())?, GroupSpec::finite("m", z2.clone())?])?;
        let g1 = GroupSpec::free_product(&[GroupSpec::finite("c", z2.clone())?, GroupSpec::finite("l", z2)?])?;
        let mut s = StarAction {
            g0,
            g1: g1.clone(),
            k,
            twist,
            coinduced: Coinduced::new(g1.clone(), LAMBDA, RMode::Transversal, InnerAction::Trivial { alphabet: 1 })?,
        };
        let flip = (0..s.points()).map(|x| s.encode(BasePoint { l: 1 - s.decode(x).l, ..s.decode(x) })).collect();
        s.coinduced = Coinduced::new(g1, LAMBDA, RMode::Transversal, InnerAction::Table { perms: vec![(0..s.points()).collect(), flip] })?;
        Ok(s)
    }

    pub fn points(&self) -> u32 {
        2 * self.k.order() * self.twist.len() as u32
    }

    pub fn encode(&self, p: BasePoint) -> u32 {
        p.l + 2 * (p.kappa + self.k.order() * p.b)
    }

    pub fn decode(&self, x: u32) -> BasePoint {
        BasePoint { l: x % 2, kappa: (x / 2) % self.k.order(), b: x / (2 * self.k.order()) }
    }

    /// `G_1 ↷ Y`, the co-induced action of `Λ_1 ↷ X`.
    pub fn coinduced(&self) -> &Coinduced {
        &self.coinduced
    }

    /// `k·x`.
    pub fn translate(&self, k: u32, x: u32) -> u32 {
        let p = self.decode(x);
        self.encode(BasePoint { kappa: self.k.mul(k, p.kappa), ..p })
    }

    /// `(λ_1, k)·x`.
    pub fn act1(&self, lambda: u32, k: u32, x: u32) -> u32 {
        let p = self.decode(x);
        self.encode(BasePoint { l: (p.l + lambda) % 2, kappa: self.k.mul(k, p.kappa), b: p.b })
    }

    /// `(λ_0, k) * x`.
    pub fn act0(&self, lambda: u32, k: u32, x: u32) -> u32 {
        let p = self.decode(x);
        let kappa = if lambda == 1 { self.k.mul(p.kappa, self.twist[p.b as usize]) } else { p.kappa };
        self.encode(BasePoint { l: (p.l + lambda) % 2, kappa: self.k.mul(k, kappa), b: p.b })
    }

    /// `η(λ_0, x) ∈ Λ_1 × K` with `η(λ_0, x)·x = λ_0 * x`.
    pub fn eta(&self, lambda: u32, x: u32) -> (u32, u32) {
        if lambda == 0 {
            return (0, self.k.identity());
        }
        let p = self.decode(x);
        let t = self.twist[p.b as usize];
        (1, self.k.mul(self.k.mul(p.kappa, t), self.k.inv(p.kappa)))
    }

    /// `η′(λ_1, x) ∈ Λ_0 × K` with `η′(λ_1, x) * x = λ_1·x`.
    pub fn eta_inverse(&self, lambda: u32, x: u32) -> (u32, u32) {
        let (l, k) = self.eta(lambda, x);
        (l, self.k.inv(k))
    }

    fn lambda_word(&self, group: &GroupSpec, l: u32) -> Word {
        group.syllable_word(LAMBDA, l as i64)
    }

    fn rho(&self, y: &dyn Field<Coset>) -> Result<u32> {
        y.value(&Coset::base(LAMBDA))
    }

    /// `ω` with `ω(γ, y) = γ` and `ω(λ_0, y) = η(λ_0, ρ(y))`.
    pub fn omega(&self) -> Result<StarCocycle<'_>> {
        let target = Product(self.g1.clone(), self.k.clone());
        let mut c = Cocycle::new(self.g0.clone(), target, Arc::new(Star(WithK { star: self })));
        let gamma = self.g0.syllable_word(GAMMA, 1);
        let e = self.k.identity();
        c.set(&gamma, move |_: &dyn Field<Coset>| Ok((gamma_in(&self.g1), e)))?;
        let lam = self.lambda_word(&self.g0, 1);
        c.set(&lam, move |y: &dyn Field<Coset>| {
            let (l, k) = self.eta(1, self.rho(y)?);
            Ok((self.lambda_word(&self.g1, l), k))
        })?;
        Ok(c)
    }

    /// `ω′` with `ω′(γ, y) = γ` and `ω′(λ_1, y) = η′(λ_1, ρ(y))`, over `G_1`
    /// acting by the co-induced action and `G_0 × K` acting through `*`.
    pub fn omega_inverse<'s>(&'s self) -> Result<StarCocycle<'s>> {
        let target = Product(self.g0.clone(), self.k.clone());
        let mut c = Cocycle::new(self.g1.clone(), target, Arc::new(StarSide { star: self }));
        let gamma = self.g1.syllable_word(GAMMA, 1);
        let e = self.k.identity();
        c.set(&gamma, move |_: &dyn Field<Coset>| Ok((gamma_in(&self.g0), e)))?;
        let lam = self.lambda_word(&self.g1, 1);
        c.set(&lam, move |y: &dyn Field<Coset>| {
            let (l, k) = self.eta_inverse(1, self.rho(y)?);
            Ok((self.lambda_word(&self.g0, l), k))
        })?;
        Ok(c)
    }

    /// `(g * y)_c` straight from the defining formulas, one letter at a time.
    pub fn star_read(&self, g: &Word, y: &dyn Field<Coset>, c: &Coset) -> Result<u32> {
        self.star_letters(&self.g0.spell(g), y, c)
    }

    fn star_letters(&self, letters: &[Word], y: &dyn Field<Coset>, c: &Coset) -> Result<u32> {
        match letters.split_last() {
            None => y.value(c),
            Some((l, rest)) => {
                let step = StarStep { star: self, letter: l.clone(), inner: y };
                self.star_letters(rest, &step, c)
            }
        }
    }

    /// Coordinates `Λ_1 h` for `h` in the word ball of `G_1`.
    pub fn window(&self, radius: u64) -> Result<Vec<Coset>> {
        let mut w: Vec<Coset> =
            self.g1.ball(radius, &Length::Word, None)?.iter().map(|h| self.g1.coset(LAMBDA, h)).collect();
        w.sort();
        w.dedup();
        Ok(w)
    }

    /// Values on `window` after normalizing the `K`-component of `ρ` to `e`.
    fn normalized(&self, y: &dyn Field<Coset>, window: &[Coset]) -> Result<Vec<u32>> {
        let k = self.k.inv(self.decode(self.rho(y)?).kappa);
        window.iter().map(|c| Ok(self.translate(k, y.value(c)?))).collect()
    }

    /// `I_n` in `G_0`, or `J_n` in `G_1`.
    pub fn level(&self, group: &GroupSpec, n: u64) -> Result<Vec<Word>> {
        Ok(group.transversal_level(LAMBDA, &Length::Letters(vec![GAMMA]), n, 2 * n + 1)?)
    }

    pub fn suite(&self, p: &StarParams) -> Result<VerificationReport> {
        let mut report = VerificationReport::new("star-action", Mode::Exact)
            .param("k", self.k.name())
            .param("labels", self.twist.len())
            .param("samples", p.samples)
            .with_seed(p.seed);
        report.push_child(self.check_base()?);
        let omega = self.omega()?;
        let omega_inv = self.omega_inverse()?;
        let ys: Vec<Configuration<Coset>> =
            (0..p.samples).map(|s| Configuration::sample(self.points(), stream_seed(p.seed, s))).collect();
        let refs: Vec<SyncField<'_, Coset>> = ys.iter().map(|y| y as SyncField<'_, Coset>).collect();
        let mut id = verify_identity(&omega, &refs, 4)?;
        id.check = "omega-identity".into();
        report.push_child(id);
        let mut id = verify_identity(&omega_inv, &refs, 4)?;
        id.check = "omega-inverse-identity".into();
        report.push_child(id);
        report.push_child(self.check_star_formula(&omega, &ys)?);
        report.push_child(self.check_orbits(&omega, &omega_inv, &ys)?);
        report.push_child(self.check_levels(&omega, &ys)?);
        report.push_child(self.check_independence(&omega, p)?);
        Ok(report)
    }

    /// Exhaustive checks on `X`: freeness, the defining relations of `η`
    /// and `η′`, and `η(λ_0, k * x) = k η(λ_0, x) k^-1`.
    fn check_base(&self) -> Result<VerificationReport> {
        let mut r = VerificationReport::new("base-space", Mode::Exact).param("points", self.points());
        let k = &self.k;
        for x in 0..self.points() {
            for l in 0..2 {
                for kk in k.elements() {
                    if (l, kk) != (0, k.identity()) && (self.act0(l, kk, x) == x || self.act1(l, kk, x) == x) {
                        r.fail(format!("({l}, {}) fixes x = {x}", k.element_name(kk)));
                        return Ok(r);
                    }
                    if self.act0(l, k.identity(), self.translate(kk, x)) != self.translate(kk, self.act0(l, k.identity(), x)) {
                        r.fail(format!("Λ_0 and K do not commute at x = {x}"));
                        return Ok(r);
                    }
                    let (l1, k1) = self.eta(l, x);
                    let (l2, k2) = self.eta(l, self.translate(kk, x));
                    if (l2, k2) != (l1, k.mul(k.mul(kk, k1), k.inv(kk))) {
                        r.fail(format!("η(λ, k*x) ≠ k η(λ, x) k^-1 at x = {x}, k = {}", k.element_name(kk)));
                        return Ok(r);
                    }
                }
                let (l1, k1) = self.eta(l, x);
                if self.act1(l1, k1, x) != self.act0(l, k.identity(), x) {
                    r.fail(format!("η(λ, x)·x ≠ λ * x at x = {x}"));
                    return Ok(r);
                }
                let (l0, k0) = self.eta_inverse(l, x);
                if self.act0(l0, k0, x) != self.act1(l, k.identity(), x) {
                    r.fail(format!("η′(λ, x) * x ≠ λ·x at x = {x}"));
                    return Ok(r);
                }
            }
        }
        Ok(r)
    }

    /// `g * y = ω(g, y)·y` for `|g| ≤ 3`, and `*` commutes with `K`.
    fn check_star_formula(&self, omega: &StarCocycle<'_>, ys: &[Configuration<Coset>]) -> Result<VerificationReport> {
        let mut r = VerificationReport::new("star-formula", Mode::Exact).param("radius", 3);
        let window = self.window(3)?;
        let ball = self.g0.ball(3, &Length::Word, None)?;
        let mut checked = 0u64;
        for (i, y) in ys.iter().enumerate() {
            for g in &ball {
                let moved = omega.act(g, y)?;
                for k in self.k.elements() {
                    let ky = KTranslated { star: self, k, inner: y };
                    for c in &window {
                        let direct = self.star_read(g, y, c)?;
                        if direct != moved.value(c)? {
                            r.fail(format!("sample {i}: g * y ≠ ω(g,y)·y at g = {}, coordinate {}", self.g0.format(g), self.g1.format(&c.rep)));
                            return Ok(r);
                        }
                        if self.star_read(g, &ky, c)? != self.translate(k, direct) {
                            r.fail(format!("sample {i}: g * (k·y) ≠ k·(g * y) at g = {}", self.g0.format(g)));
                            return Ok(r);
                        }
                        checked += 1;
                    }
                }
            }
        }
        r.stat("comparisons", Stat::Count(checked));
        Ok(r)
    }

    /// `G_0 * ȳ ⊂ G_1·ȳ` and `G_1·ȳ ⊂ G_0 * ȳ` for words of length `≤ 2`.
    fn check_orbits(&self, omega: &StarCocycle<'_>, omega_inv: &StarCocycle<'_>, ys: &[Configuration<Coset>]) -> Result<VerificationReport> {
        let mut r = VerificationReport::new("orbit-equality", Mode::Exact).param("radius", 2);
        let window = self.window(3)?;
        for (i, y) in ys.iter().enumerate() {
            for g in self.g0.ball(2, &Length::Word, None)? {
                let lhs = self.normalized(&Acted0 { star: self, g: g.clone(), inner: y }, &window)?;
                let (h, _) = omega.evaluate(&g, y)?;
                let rhs = self.normalized(&self.coinduced.apply(&h, y), &window)?;
                if lhs != rhs {
                    r.fail(format!("sample {i}: g * ȳ ≠ ω_1(g,y)·ȳ for g = {}", self.g0.format(&g)));
                    return Ok(r);
                }
            }
            for g in self.g1.ball(2, &Length::Word, None)? {
                let lhs = self.normalized(&self.coinduced.apply(&g, y), &window)?;
                let (h, _) = omega_inv.evaluate(&g, y)?;
                let rhs = self.normalized(&Acted0 { star: self, g: h, inner: y }, &window)?;
                if lhs != rhs {
                    r.fail(format!("sample {i}: g·ȳ ≠ ω′_0(g,y) * ȳ for g = {}", self.g1.format(&g)));
                    return Ok(r);
                }
            }
        }
        Ok(r)
    }

    /// `g ↦ ω_1(g, y)` maps `I_n` bijectively onto `J_n` for `n ≤ 2`.
    fn check_levels(&self, omega: &StarCocycle<'_>, ys: &[Configuration<Coset>]) -> Result<VerificationReport> {
        let mut r = VerificationReport::new("level-bijection", Mode::Exact).param("levels", 2);
        for n in 0..=2 {
            let (i_n, j_n) = (self.level(&self.g0, n)?, self.level(&self.g1, n)?);
            for (s, y) in ys.iter().enumerate() {
                let mut images = Vec::new();
                for g in &i_n {
                    let (h, _) = omega.evaluate(g, y)?;
                    if !j_n.contains(&h) {
                        r.fail(format!("sample {s}: ω_1({}) = {} is not in J_{n}", self.g0.format(g), self.g1.format(&h)));
                        return Ok(r);
                    }
                    images.push(h);
                }
                images.sort();
                images.dedup();
                if images.len() != i_n.len() || images.len() != j_n.len() {
                    r.fail(format!("sample {s}: I_{n} → J_{n} is not a bijection"));
                    return Ok(r);
                }
            }
        }
        Ok(r)
    }

    /// `{y ↦ ρ(g * y) : g ∈ I_n, n ≤ radius}` is exactly uniform on
    /// `X^{I}` over the cosets `|j| ≤ radius`.
    fn check_independence(&self, omega: &StarCocycle<'_>, p: &StarParams) -> Result<VerificationReport> {
        let mut window = Vec::new();
        for n in 0..=p.radius {
            window.extend(self.level(&self.g1, n)?.iter().map(|h| self.g1.coset(LAMBDA, h)));
        }
        let mut vars = Vec::new();
        for n in 0..=p.radius {
            for g in self.level(&self.g0, n)? {
                let name = format!("ρ({} * y)", self.g0.format(&g));
                vars.push(Variable::new(name, window.clone(), move |y: &dyn Field<Coset>| {
                    omega.act(&g, y)?.value(&Coset::base(LAMBDA))
                }));
            }
        }
        let mut r = independence_exact(&VariableFamily::new(vars), self.points(), p.budget)?;
        r.check = "transversal-independence".into();
        Ok(r)
    }
}

fn gamma_in(group: &GroupSpec) -> Word {
    group.syllable_word(GAMMA, 1)
}

/// `G_1 × K ↷ Y`, `(g, k)·y = k·(g·y)`.
struct WithK<'a> {
    star: &'a StarAction,
}

impl Action for WithK<'_> {
    type Elem = (Word, u32);
    type Coord = Coset;

    fn alphabet(&self) -> u32 {
        self.star.points()
    }
    fn identity(&self) -> (Word, u32) {
        (Word::identity(), self.star.k.identity())
    }
    fn compose(&self, g: &(Word, u32), h: &(Word, u32)) -> (Word, u32) {
        (self.star.g1.mul(&g.0, &h.0), self.star.k.mul(g.1, h.1))
    }
    fn read(&self, g: &(Word, u32), y: &dyn Field<Coset>, c: &Coset) -> Result<u32> {
        Ok(self.star.translate(g.1, self.star.coinduced.read(&g.0, y, c)?))
    }
    fn support(&self, g: &(Word, u32), c: &Coset) -> Option<Vec<Coset>> {
        self.star.coinduced.support(&g.0, c)
    }
}

/// `G_0 × K ↷ Y` through `*`.
struct StarSide<'a> {
    star: &'a StarAction,
}

impl PointMover<Coset, (Word, u32)> for StarSide<'_> {
    fn read(&self, _: &Word, omega: &(Word, u32), y: &dyn Field<Coset>, c: &Coset) -> Result<u32> {
        Ok(self.star.translate(omega.1, self.star.star_read(&omega.0, y, c)?))
    }
    fn alphabet(&self) -> u32 {
        self.star.points()
    }
}

/// One letter of `G_0` acting through the defining formulas.
struct StarStep<'a> {
    star: &'a StarAction,
    letter: Word,
    inner: &'a dyn Field<Coset>,
}

impl Field<Coset> for StarStep<'_> {
    fn value(&self, c: &Coset) -> Result<u32> {
        let s = self.star;
        let syl = self.letter.syllables()[0];
        if syl.factor == GAMMA {
            return s.coinduced.read(&s.g1.embed(&self.letter, 0)?, self.inner, c);
        }
        let (l, k) = s.eta(syl.value as u32, s.rho(self.inner)?);
        Ok(s.translate(k, s.coinduced.read(&s.lambda_word(&s.g1, l), self.inner, c)?))
    }
    fn alphabet(&self) -> u32 {
        self.star.points()
    }
}

struct Acted0<'a> {
    star: &'a StarAction,
    g: Word,
    inner: &'a dyn Field<Coset>,
}

impl Field<Coset> for Acted0<'_> {
    fn value(&self, c: &Coset) -> Result<u32> {
        self.star.star_read(&self.g, self.inner, c)
    }
    fn alphabet(&self) -> u32 {
        self.star.points()
    }
}

struct KTranslated<'a> {
    star: &'a StarAction,
    k: u32,
    inner: &'a dyn Field<Coset>,
}

impl Field<Coset> for KTranslated<'_> {
    fn value(&self, c: &Coset) -> Result<u32> {
        Ok(self.star.translate(self.k, self.inner.value(c)?))
    }
    fn alphabet(&self) -> u32 {
        self.star.points()
    }
}
