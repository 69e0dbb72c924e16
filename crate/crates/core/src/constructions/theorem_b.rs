//! The explicit isomorphism `K^{F_n}/K ≅ (K^n)^{F_n}`,
//! `θ(x̄)_g = (x_g^-1 x_{a_1 g}, …, x_g^-1 x_{a_n g})`.

use std::collections::BTreeMap;

use crate::actions::{Action, Bernoulli};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::spaces::{exact_distribution, stream_seed, Configuration, Field, Translated, WindowFn};
use crate::verify::{generation_check, independence_exact, Mode, Stat, Variable, VariableFamily, VerificationReport};
use crate::words::{GroupSpec, Length, Word};

#[derive(Debug, Clone)]
pub struct TheoremB {
    pub group: GroupSpec,
    pub k: FiniteGroup,
}

#[derive(Debug, Clone)]
pub struct TheoremBParams {
    /// Radius of the ball `B_r` carrying the enumerated family.
    pub radius: u64,
    /// `θ(h·x̄)_g = θ(x̄)_{gh}` is checked for `|h|` up to this.
    pub equivariance_length: u64,
    pub roundtrip_radius: u64,
    pub samples: u64,
    pub seed: u64,
    pub budget: u64,
}

impl Default for TheoremBParams {
    fn default() -> Self {
        TheoremBParams { radius: 1, equivariance_length: 3, roundtrip_radius: 3, samples: 100, seed: 0, budget: crate::spaces::DEFAULT_BUDGET }
    }
}

impl TheoremB {
    pub fn new(k: FiniteGroup, rank: usize) -> Result<Self> {
        Ok(TheoremB { group: GroupSpec::free_rank(rank)?, k })
    }

    pub fn rank(&self) -> usize {
        self.group.factors().len()
    }

    pub fn generator(&self, i: usize) -> Word {
        self.group.syllable_word(i, 1)
    }

    /// Alphabet of the target space, `|K|^n`.
    pub fn target_alphabet(&self) -> u32 {
        self.k.order().pow(self.rank() as u32)
    }

    pub fn encode(&self, v: &[u32]) -> u32 {
        v.iter().rev().fold(0, |acc, &d| acc * self.k.order() + d)
    }

    pub fn decode(&self, mut code: u32) -> Vec<u32> {
        (0..self.rank())
            .map(|_| {
                let d = code % self.k.order();
                code /= self.k.order();
                d
            })
            .collect()
    }

    /// `x_g^-1 x_{a_i g}`.
    pub fn component(&self, x: &dyn Field<Word>, g: &Word, i: usize) -> Result<u32> {
        let ag = self.group.mul(&self.generator(i), g);
        Ok(self.k.mul(self.k.inv(x.value(g)?), x.value(&ag)?))
    }

    pub fn theta_at(&self, x: &dyn Field<Word>, g: &Word) -> Result<Vec<u32>> {
        (0..self.rank()).map(|i| self.component(x, g, i)).collect()
    }

    /// `θ(x̄)` on the ball of the given radius, values encoded in `|K|^n`.
    pub fn theta(&self, x: &dyn Field<Word>, radius: u64) -> Result<Configuration<Word>> {
        let mut window = BTreeMap::new();
        for g in self.group.ball(radius, &Length::Word, None)? {
            let v = self.theta_at(x, &g)?;
            window.insert(g, self.encode(&v));
        }
        Ok(Configuration::from_window(self.target_alphabet(), window))
    }

    /// `x_w` for the representative with `x_e = e`, propagated along the
    /// spelling of `w` from the right: `x_{a_i s} = x_s v(s)_i` and
    /// `x_{a_i^-1 s} = x_s v(a_i^-1 s)_i^-1`.
    pub fn propagate(&self, v: &dyn Fn(&Word, usize) -> Result<u32>, w: &Word) -> Result<u32> {
        let letters = self.group.spell(w);
        let mut x = self.k.identity();
        let mut suffix = Word::identity();
        for l in letters.iter().rev() {
            let s = l.syllables()[0];
            let next = self.group.mul(l, &suffix);
            x = if s.value > 0 {
                self.k.mul(x, v(&suffix, s.factor)?)
            } else {
                self.k.mul(x, self.k.inv(v(&next, s.factor)?))
            };
            suffix = next;
        }
        Ok(x)
    }

    /// `D_r = B_r ∪ {a_i g : g ∈ B_r}`, the coordinates determined by
    /// `θ` on `B_r`.
    pub fn reconstruction_domain(&self, radius: u64) -> Result<Vec<Word>> {
        let ball = self.group.ball(radius, &Length::Word, None)?;
        let mut out: Vec<Word> = ball.clone();
        for g in &ball {
            for i in 0..self.rank() {
                out.push(self.group.mul(&self.generator(i), g));
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Normalized preimage of `v` on `D_r`.
    pub fn theta_inverse(&self, v: &dyn Field<Word>, radius: u64) -> Result<Configuration<Word>> {
        let get = |g: &Word, i: usize| -> Result<u32> {
            if self.group.length(g, &Length::Word) > radius {
                return Err(Error::WindowTooSmall(format!("θ needed at {}", self.group.format(g))));
            }
            Ok(self.decode(v.value(g)?)[i])
        };
        let mut window = BTreeMap::new();
        for w in self.reconstruction_domain(radius)? {
            let x = self.propagate(&get, &w)?;
            window.insert(w, x);
        }
        Ok(Configuration::from_window(self.k.order(), window))
    }

    fn edge_variable(&self, g: &Word, i: usize) -> Variable<'_, Word> {
        let ag = self.group.mul(&self.generator(i), g);
        let g2 = g.clone();
        Variable::new(
            format!("x[{}]^-1 x[{}]", self.group.format(g), self.group.format(&ag)),
            vec![g.clone(), ag],
            move |x: &dyn Field<Word>| self.component(x, &g2, i),
        )
    }

    /// `{x̄ ↦ x_g^-1 x_{a_i g} : g ∈ B_r}`, reading `B_{r+1}`.
    pub fn family(&self, radius: u64) -> Result<VariableFamily<'_, Word>> {
        let mut vars = Vec::new();
        for g in self.group.ball(radius, &Length::Word, None)? {
            for i in 0..self.rank() {
                vars.push(self.edge_variable(&g, i));
            }
        }
        Ok(VariableFamily::new(vars))
    }

    /// The members of the family whose two coordinates both lie in `B_r`:
    /// one per edge of the Cayley tree inside the ball.
    pub fn edge_family(&self, radius: u64) -> Result<VariableFamily<'_, Word>> {
        let mut vars = Vec::new();
        for g in self.group.ball(radius, &Length::Word, None)? {
            for i in 0..self.rank() {
                let ag = self.group.mul(&self.generator(i), &g);
                if self.group.length(&ag, &Length::Word) <= radius {
                    vars.push(self.edge_variable(&g, i));
                }
            }
        }
        Ok(VariableFamily::new(vars))
    }

    /// Exact joint law, equivariance, `K`-invariance, generation and the
    /// round trip through the tree reconstruction.
    pub fn suite(&self, p: &TheoremBParams) -> Result<VerificationReport> {
        let mut report = VerificationReport::new("theorem-b", Mode::Exact)
            .param("k", self.k.name())
            .param("rank", self.rank())
            .param("radius", p.radius)
            .with_seed(p.seed);
        let full = self.family(p.radius)?;
        let outer = self.group.ball(p.radius + 1, &Length::Word, None)?;
        let states = (self.k.order() as u128).checked_pow(outer.len() as u32).unwrap_or(u128::MAX);
        let (family, window) = if states <= p.budget as u128 {
            report = report.param("family", "full");
            (full, outer)
        } else {
            report.note(format!(
                "full family window needs {states} states; enumerating the edges inside B_{} instead",
                p.radius
            ));
            report = report.param("family", "edges-in-ball");
            let edges = self.edge_family(p.radius)?;
            let w = edges.window();
            (edges, w)
        };
        report.push_child(self.joint_law(&family, &window, p.budget)?);
        report.push_child(independence_exact(&family, self.k.order(), p.budget)?);
        report.push_child(self.generation(&family, p)?);
        report.push_child(self.equivariance(p)?);
        report.push_child(self.k_invariance(p)?);
        report.push_child(self.round_trip(p)?);
        Ok(report)
    }

    /// Every value tuple of the family occurs equally often when `window`
    /// (a superset of the family's window) is enumerated.
    pub fn joint_law(&self, family: &VariableFamily<'_, Word>, window: &[Word], budget: u64) -> Result<VerificationReport> {
        let evals: Vec<WindowFn<'_, Word>> = family
            .vars
            .iter()
            .map(|v| Box::new(move |x: &dyn Field<Word>| (v.eval)(x)) as WindowFn<'_, Word>)
            .collect();
        let dist = exact_distribution(&evals, window, self.k.order(), budget)?;
        let d = family.vars.len();
        let outcomes = (self.k.order() as u64).pow(d as u32);
        let mut r = VerificationReport::new("joint-law", Mode::Exact)
            .param("variables", d)
            .param("window", window.len());
        r.stat("states", Stat::Count(dist.states));
        r.stat("outcomes", Stat::Count(dist.counts.len() as u64));
        let expected = dist.states / outcomes;
        r.stat("count-per-outcome", Stat::Count(expected));
        if dist.counts.len() as u64 != outcomes {
            r.fail(format!("{} of {outcomes} outcomes occur", dist.counts.len()));
        } else if let Some((o, n)) = dist.counts.iter().find(|(_, &n)| n != expected) {
            r.fail(format!("outcome {o:?} has count {n}, expected {expected}"));
        }
        Ok(r)
    }

    fn generation(&self, family: &VariableFamily<'_, Word>, p: &TheoremBParams) -> Result<VerificationReport> {
        let window = family.window();
        let k = &self.k;
        let targets: Vec<WindowFn<'_, Word>> = window
            .iter()
            .map(|c| {
                let c = c.clone();
                Box::new(move |x: &dyn Field<Word>| Ok(k.mul(k.inv(x.value(&Word::identity())?), x.value(&c)?)))
                    as WindowFn<'_, Word>
            })
            .collect();
        let keys: Vec<(Word, usize)> = family
            .vars
            .iter()
            .map(|v| {
                let (g, ag) = (&v.deps[0], &v.deps[1]);
                let i = (0..self.rank()).find(|&i| self.group.mul(&self.generator(i), g) == *ag).expect("edge");
                (g.clone(), i)
            })
            .collect();
        let rebuild = |values: &[u32]| -> Result<Vec<u32>> {
            let lookup = |g: &Word, i: usize| -> Result<u32> {
                keys.iter()
                    .position(|(h, j)| h == g && *j == i)
                    .map(|j| values[j])
                    .ok_or_else(|| Error::EscapesWindow(format!("edge ({}, {i})", self.group.format(g))))
            };
            window.iter().map(|w| self.propagate(&lookup, w)).collect()
        };
        let mut r = generation_check(family, &targets, &window, self.k.order(), p.budget, Some(&rebuild))?;
        r.note("targets are the coordinates normalized to x_e = e");
        Ok(r)
    }

    fn equivariance(&self, p: &TheoremBParams) -> Result<VerificationReport> {
        let shift = Bernoulli { group: self.group.clone(), alphabet: self.k.order() };
        let hs = self.group.ball(p.equivariance_length, &Length::Word, None)?;
        let gs = self.group.ball(2, &Length::Word, None)?;
        let mut r = VerificationReport::new("equivariance", Mode::Exact)
            .param("max-length", p.equivariance_length)
            .param("samples", p.samples)
            .with_seed(p.seed);
        let mut checked = 0u64;
        'outer: for s in 0..p.samples {
            let x = Configuration::<Word>::sample(self.k.order(), stream_seed(p.seed, s));
            for h in &hs {
                let hx = shift.apply(h, &x);
                for g in &gs {
                    let lhs = self.theta_at(&hx, g)?;
                    let rhs = self.theta_at(&x, &self.group.mul(g, h))?;
                    checked += 1;
                    if lhs != rhs {
                        r.fail(format!(
                            "sample {s}: θ(h·x)_g = {lhs:?}, θ(x)_gh = {rhs:?} at g = {}, h = {}",
                            self.group.format(g),
                            self.group.format(h)
                        ));
                        break 'outer;
                    }
                }
            }
        }
        r.stat("comparisons", Stat::Count(checked));
        Ok(r)
    }

    fn k_invariance(&self, p: &TheoremBParams) -> Result<VerificationReport> {
        let gs = self.group.ball(2, &Length::Word, None)?;
        let mut r = VerificationReport::new("k-invariance", Mode::Exact).param("samples", p.samples).with_seed(p.seed);
        'outer: for s in 0..p.samples {
            let x = Configuration::<Word>::sample(self.k.order(), stream_seed(p.seed, s));
            for k in self.k.elements() {
                let kx = Translated { group: &self.k, k, inner: &x };
                for g in &gs {
                    if self.theta_at(&kx, g)? != self.theta_at(&x, g)? {
                        r.fail(format!("sample {s}: θ(k·x) ≠ θ(x) for k = {}", self.k.element_name(k)));
                        break 'outer;
                    }
                }
            }
        }
        Ok(r)
    }

    fn round_trip(&self, p: &TheoremBParams) -> Result<VerificationReport> {
        let radius = p.roundtrip_radius;
        let domain = self.reconstruction_domain(radius)?;
        let ball = self.group.ball(radius, &Length::Word, None)?;
        let mut r = VerificationReport::new("round-trip", Mode::Exact)
            .param("radius", radius)
            .param("samples", p.samples)
            .with_seed(p.seed);
        for s in 0..p.samples {
            let x = Configuration::<Word>::sample(self.k.order(), stream_seed(p.seed, s));
            let v = self.theta(&x, radius)?;
            let back = self.theta_inverse(&v, radius)?;
            let e = x.value(&Word::identity())?;
            if let Some(w) = domain
                .iter()
                .find(|w| back.value(w).ok() != x.value(w).ok().map(|xw| self.k.mul(self.k.inv(e), xw)))
            {
                r.fail(format!("sample {s}: inverse(θ(x)) differs from the normalized x at {}", self.group.format(w)));
                break;
            }
            let v2 = Configuration::<Word>::sample(self.target_alphabet(), stream_seed(p.seed ^ 0xB0B, s));
            let x2 = self.theta_inverse(&v2, radius)?;
            if let Some(g) = ball.iter().find(|g| {
                self.theta_at(&x2, g).ok() != v2.value(g).ok().map(|c| self.decode(c))
            }) {
                r.fail(format!("sample {s}: θ(inverse(v)) differs from v at {}", self.group.format(g)));
                break;
            }
        }
        r.stat("domain-size", Stat::Count(domain.len() as u64));
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::DEFAULT_BUDGET;

    #[test]
    fn constant_configuration_maps_to_identity() {
        let t = TheoremB::new(FiniteGroup::cyclic(3), 2).unwrap();
        let ball = t.group.ball(3, &Length::Word, None).unwrap();
        let x = Configuration::constant(3, &ball, 2);
        let v = t.theta(&x, 2).unwrap();
        assert!(v.window().values().all(|&c| c == 0));
        let back = t.theta_inverse(&Configuration::constant(9, &ball, 0), 2).unwrap();
        assert!(back.window().values().all(|&c| c == 0));
    }

    #[test]
    fn z2_joint_law_is_uniform_with_count_128() {
        let t = TheoremB::new(FiniteGroup::cyclic(2), 2).unwrap();
        let fam = t.family(1).unwrap();
        assert_eq!(fam.vars.len(), 10);
        assert_eq!(fam.window().len(), 11);
        let b2 = t.group.ball(2, &Length::Word, None).unwrap();
        assert_eq!(b2.len(), 17);
        let r = t.joint_law(&fam, &b2, DEFAULT_BUDGET).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.statistics["outcomes"], Stat::Count(1024));
        assert_eq!(r.statistics["count-per-outcome"], Stat::Count(128));
    }

    #[test]
    fn s3_edges_in_ball() {
        let t = TheoremB::new(FiniteGroup::symmetric3(), 2).unwrap();
        let fam = t.edge_family(1).unwrap();
        assert_eq!(fam.vars.len(), 4);
        assert_eq!(fam.window().len(), 5);
        let r = t.suite(&TheoremBParams { samples: 10, ..Default::default() }).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn encode_round_trip() {
        let t = TheoremB::new(FiniteGroup::symmetric3(), 3).unwrap();
        for c in 0..t.target_alphabet() {
            assert_eq!(t.encode(&t.decode(c)), c);
        }
    }

    #[test]
    fn inverse_needs_window() {
        let t = TheoremB::new(FiniteGroup::cyclic(2), 2).unwrap();
        let v = t.theta(&Configuration::<Word>::sample(2, 1), 1).unwrap();
        let seeded_free = Configuration::from_window(4, v.window().clone());
        assert!(t.theta_inverse(&seeded_free, 2).is_err());
    }
}
