//! `Γ * Λ ↷ K^{Γ\Γ*Λ}/K` as the co-induction of `Λ ↷ K^Λ/K`, through
//! `ρ(x)_λ = x_{Γλ}` and `θ_λ(ȳ) = y_e^-1 y_λ`.

use crate::actions::{
    check_coinduced_characterization, Action, Characterization, CharacterizationParams, Coinduced, FactorMap,
    InnerAction, Quotient,
};
use crate::error::Result;
use crate::group::FiniteGroup;
use crate::spaces::{stream_seed, Configuration, Field, Translated, WindowFn};
use crate::verify::{independence_exact, Mode, Stat, Variable, VariableFamily, VerificationReport};
use crate::words::{Coset, GroupSpec, Length, RMode, Word};

const GAMMA: usize = 0;
const LAMBDA: usize = 1;

#[derive(Debug, Clone)]
pub struct LemmaFactor {
    /// `Γ * Λ` with `Γ` the first factor.
    pub group: GroupSpec,
    pub lambda: FiniteGroup,
    pub k: FiniteGroup,
    shift: Coinduced,
}

#[derive(Debug, Clone)]
pub struct LemmaFactorParams {
    pub radius: u64,
    pub samples: u64,
    pub seed: u64,
    pub budget: u64,
}

impl LemmaFactor {
    pub fn new(gamma: FiniteGroup, lambda: FiniteGroup, k: FiniteGroup) -> Result<Self> {
        let group = GroupSpec::free_product(&[GroupSpec::finite("g", gamma)?, GroupSpec::finite("l", lambda.clone())?])?;
        let shift = Coinduced::new(group.clone(), GAMMA, RMode::Transversal, InnerAction::Trivial { alphabet: k.order() })?;
        Ok(LemmaFactor { group, lambda, k, shift })
    }

    /// `(g·x)_{Γh} = x_{Γhg}`.
    pub fn shift(&self) -> &Coinduced {
        &self.shift
    }

    pub fn coset(&self, g: &Word) -> Coset {
        self.group.coset(GAMMA, g)
    }

    pub fn lambda_word(&self, l: u32) -> Word {
        self.group.syllable_word(LAMBDA, l as i64)
    }

    /// `ρ(x)_λ = x_{Γλ}`.
    pub fn rho(&self, x: &dyn Field<Coset>, l: u32) -> Result<u32> {
        x.value(&self.coset(&self.lambda_word(l)))
    }

    /// `θ_λ(ρ̄(g·x̄))`, evaluated through the shift and `ρ`.
    pub fn theta_rho(&self, x: &dyn Field<Coset>, g: &Word, l: u32) -> Result<u32> {
        let gx = self.shift.apply(g, x);
        let e = self.rho(&gx, self.lambda.identity())?;
        Ok(self.k.mul(self.k.inv(e), self.rho(&gx, l)?))
    }

    /// Right-hand side `x_{Γg}^-1 x_{Γλg}`.
    pub fn consequence(&self, x: &dyn Field<Coset>, g: &Word, l: u32) -> Result<u32> {
        let lg = self.group.mul(&self.lambda_word(l), g);
        Ok(self.k.mul(self.k.inv(x.value(&self.coset(g))?), x.value(&self.coset(&lg))?))
    }

    /// `I_n`: `n` letters from `Γ`, leftmost letter from `Γ`.
    pub fn level(&self, n: u64) -> Result<Vec<Word>> {
        Ok(self.group.transversal_level(LAMBDA, &Length::Letters(vec![GAMMA]), n, 2 * n + 1)?)
    }

    fn nontrivial_lambdas(&self) -> Vec<u32> {
        self.lambda.elements().filter(|&l| l != self.lambda.identity()).collect()
    }

    /// `{x̄ ↦ θ_λ(ρ̄(g·x̄)) : g ∈ I_n, n ≤ radius, λ ≠ e}`.
    pub fn family(&self, radius: u64) -> Result<VariableFamily<'_, Coset>> {
        let mut vars = Vec::new();
        for n in 0..=radius {
            for g in self.level(n)? {
                for l in self.nontrivial_lambdas() {
                    let lg = self.group.mul(&self.lambda_word(l), &g);
                    let deps = vec![self.coset(&g), self.coset(&lg)];
                    let g2 = g.clone();
                    vars.push(Variable::new(
                        format!("θ_{}(ρ({}·x))", self.lambda.element_name(l), self.group.format(&g)),
                        deps,
                        move |x: &dyn Field<Coset>| self.theta_rho(x, &g2, l),
                    ));
                }
            }
        }
        Ok(VariableFamily::new(vars))
    }

    /// Encoding of `K^Λ/K` by the tuple `(θ_λ)_{λ ≠ e}`, base `|K|`.
    fn encode_quotient(&self, y: &dyn Fn(u32) -> Result<u32>) -> Result<u32> {
        let e = y(self.lambda.identity())?;
        let mut code = 0;
        for l in self.nontrivial_lambdas().into_iter().rev() {
            code = code * self.k.order() + self.k.mul(self.k.inv(e), y(l)?);
        }
        Ok(code)
    }

    fn decode_quotient(&self, mut code: u32) -> Vec<u32> {
        // representative with y_e = e, indexed by Λ
        let mut y = vec![self.k.identity(); self.lambda.order() as usize];
        for l in self.nontrivial_lambdas() {
            y[l as usize] = code % self.k.order();
            code /= self.k.order();
        }
        y
    }

    /// `Λ ↷ K^Λ/K`, `(μ·y)_ν = y_{νμ}`, on the encoded quotient.
    pub fn quotient_action(&self) -> Result<InnerAction> {
        let size = self.k.order().pow(self.lambda.order() - 1);
        let mut perms = Vec::new();
        for mu in self.lambda.elements() {
            let mut row = Vec::new();
            for code in 0..size {
                let y = self.decode_quotient(code);
                row.push(self.encode_quotient(&|nu| Ok(y[self.lambda.mul(nu, mu) as usize]))?);
            }
            perms.push(row);
        }
        Ok(InnerAction::Table { perms })
    }

    pub fn suite(&self, p: &LemmaFactorParams) -> Result<VerificationReport> {
        let mut report = VerificationReport::new("lemma-factor", Mode::Exact)
            .param("lambda", self.lambda.name())
            .param("k", self.k.name())
            .param("radius", p.radius)
            .with_seed(p.seed);
        report.push_child(self.check_consequence(p)?);
        report.push_child(self.check_rho_equivariance(p)?);
        let family = self.family(p.radius)?;
        let mut indep = independence_exact(&family, self.k.order(), p.budget)?;
        indep.check = "family-independence".into();
        report.push_child(indep);
        report.push_child(self.check_characterization(p)?);
        Ok(report)
    }

    fn check_consequence(&self, p: &LemmaFactorParams) -> Result<VerificationReport> {
        let mut r = VerificationReport::new("consequence-identity", Mode::Exact).param("samples", p.samples).with_seed(p.seed);
        let mut gs = self.group.ball(4, &Length::Word, None)?;
        for n in 0..=2 {
            gs.extend(self.level(n)?);
        }
        let mut checked = 0u64;
        'outer: for s in 0..p.samples {
            let x = Configuration::<Coset>::sample(self.k.order(), stream_seed(p.seed, s));
            for g in &gs {
                for l in self.nontrivial_lambdas() {
                    checked += 1;
                    let (a, b) = (self.theta_rho(&x, g, l)?, self.consequence(&x, g, l)?);
                    if a != b {
                        r.fail(format!("sample {s}, g = {}: θ_λ(ρ(g·x)) = {a}, x_Γg^-1 x_Γλg = {b}", self.group.format(g)));
                        break 'outer;
                    }
                }
            }
        }
        r.stat("comparisons", Stat::Count(checked));
        Ok(r)
    }

    /// `ρ(μ·x) = μ·ρ(x)` and `ρ(k·x) = k·ρ(x)`.
    fn check_rho_equivariance(&self, p: &LemmaFactorParams) -> Result<VerificationReport> {
        let mut r = VerificationReport::new("rho-equivariance", Mode::Exact).param("samples", p.samples).with_seed(p.seed);
        'outer: for s in 0..p.samples {
            let x = Configuration::<Coset>::sample(self.k.order(), stream_seed(p.seed, s));
            for mu in self.lambda.elements() {
                let mx = self.shift.apply(&self.lambda_word(mu), &x);
                for nu in self.lambda.elements() {
                    if self.rho(&mx, nu)? != self.rho(&x, self.lambda.mul(nu, mu))? {
                        r.fail(format!("sample {s}: ρ(μ·x) ≠ μ·ρ(x) for μ = {}", self.lambda.element_name(mu)));
                        break 'outer;
                    }
                }
            }
            for k in self.k.elements() {
                let kx = Translated { group: &self.k, k, inner: &x };
                for nu in self.lambda.elements() {
                    if self.rho(&kx, nu)? != self.k.mul(k, self.rho(&x, nu)?) {
                        r.fail(format!("sample {s}: ρ(k·x) ≠ k·ρ(x) for k = {}", self.k.element_name(k)));
                        break 'outer;
                    }
                }
            }
        }
        Ok(r)
    }

    /// The characterization checker applied to `Γ*Λ ↷ X/K` with factor map
    /// `ρ̄`, transversal measured by `Γ`-letters.
    pub fn check_characterization(&self, p: &LemmaFactorParams) -> Result<VerificationReport> {
        let quotient = Quotient { inner: self.shift.clone(), group: self.k.clone(), base: Coset::base(GAMMA) };
        let inner = self.quotient_action()?;
        let deps: Vec<Coset> = self.lambda.elements().map(|l| self.coset(&self.lambda_word(l))).collect();
        let rho = FactorMap {
            deps: deps.clone(),
            eval: Box::new(move |x: &dyn Field<Coset>| self.encode_quotient(&|l| self.rho(x, l))),
        };
        let k = &self.k;
        let base = Coset::base(GAMMA);
        let family_window = {
            let mut w = deps.clone();
            for t in self.group.transversal(LAMBDA, &Length::Letters(vec![GAMMA]), p.radius, 2 * p.radius + 1)? {
                for d in &deps {
                    w.push(self.group.coset_act(d, &t));
                }
            }
            w.push(base.clone());
            w.sort();
            w.dedup();
            w
        };
        let targets: Vec<WindowFn<'_, Coset>> = family_window
            .into_iter()
            .map(|c| {
                let b = base.clone();
                Box::new(move |x: &dyn Field<Coset>| Ok(k.mul(k.inv(x.value(&b)?), x.value(&c)?))) as WindowFn<'_, Coset>
            })
            .collect();
        let input = Characterization {
            action: &quotient,
            group: &self.group,
            subgroup: LAMBDA,
            length: Length::Letters(vec![GAMMA]),
            inner: &inner,
            rho: &rho,
            targets: Some(targets),
            reconstructor: None,
        };
        let params = CharacterizationParams {
            radius: p.radius,
            word_cap: 2 * p.radius + 1,
            samples: p.samples,
            seed: p.seed,
            budget: p.budget,
            mc_samples: 10_000,
        };
        let mut r = check_coinduced_characterization(&input, &params)?;
        r.note("generation targets are the coordinates normalized at Γe");
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::DEFAULT_BUDGET;

    fn z2() -> LemmaFactor {
        LemmaFactor::new(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2), FiniteGroup::cyclic(2)).unwrap()
    }

    fn params() -> LemmaFactorParams {
        LemmaFactorParams { radius: 1, samples: 50, seed: 3, budget: DEFAULT_BUDGET }
    }

    #[test]
    fn levels_of_the_infinite_dihedral_group() {
        let f = z2();
        assert_eq!(f.level(0).unwrap(), vec![Word::identity()]);
        assert_eq!(f.level(1).unwrap().len(), 2);
        assert_eq!(f.level(2).unwrap().len(), 2);
    }

    #[test]
    fn family_reads_four_cosets() {
        let f = z2();
        let fam = f.family(1).unwrap();
        assert_eq!(fam.vars.len(), 3);
        assert_eq!(fam.window().len(), 4);
        let r = independence_exact(&fam, 2, DEFAULT_BUDGET).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.statistics["states"], Stat::Count(16));
    }

    #[test]
    fn constant_point_gives_identity() {
        let f = z2();
        let cosets: Vec<Coset> = f.group.ball(4, &Length::Word, None).unwrap().iter().map(|g| f.coset(g)).collect();
        let x = Configuration::constant(2, &cosets, 1);
        for g in f.group.ball(2, &Length::Word, None).unwrap() {
            assert_eq!(f.theta_rho(&x, &g, 1).unwrap(), 0);
        }
    }

    #[test]
    fn lambda_acts_on_quotient_by_inversion() {
        let f = LemmaFactor::new(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2), FiniteGroup::cyclic(3)).unwrap();
        match f.quotient_action().unwrap() {
            InnerAction::Table { perms } => assert_eq!(perms[1], vec![0, 2, 1]),
            _ => unreachable!(),
        }
    }

    #[test]
    fn suite_passes() {
        let r = z2().suite(&params()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn larger_lambda() {
        let f = LemmaFactor::new(FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::cyclic(2)).unwrap();
        let r = f.suite(&params()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }
}
