//! Independence of finite families of window functions, exactly by
//! enumeration or by a seeded chi-square test.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::spaces::{exact_distribution, stream_seed, Configuration, Coordinate, Field, Guarded, WindowFn};
use crate::verify::report::{Mode, Stat, VerificationReport};

/// A named random variable on a configuration space.
pub struct Variable<'a, C> {
    pub name: String,
    /// Coordinates the variable may read.
    pub deps: Vec<C>,
    pub eval: WindowFn<'a, C>,
}

impl<'a, C: Coordinate + 'a> Variable<'a, C> {
    pub fn new(name: impl Into<String>, deps: Vec<C>, eval: impl Fn(&dyn Field<C>) -> Result<u32> + Send + Sync + 'a) -> Self {
        Variable { name: name.into(), deps, eval: Box::new(eval) }
    }

    /// Single coordinate projection.
    pub fn projection(c: C) -> Self {
        let cc = c.clone();
        Variable::new(format!("x[{c:?}]"), vec![c], move |x| x.value(&cc))
    }
}

pub struct VariableFamily<'a, C> {
    pub vars: Vec<Variable<'a, C>>,
}

impl<'a, C: Coordinate> VariableFamily<'a, C> {
    pub fn new(vars: Vec<Variable<'a, C>>) -> Self {
        VariableFamily { vars }
    }

    /// Union of the declared dependency coordinates, sorted.
    pub fn window(&self) -> Vec<C> {
        let set: BTreeSet<C> = self.vars.iter().flat_map(|v| v.deps.iter().cloned()).collect();
        set.into_iter().collect()
    }

    fn evaluators(&self) -> Vec<WindowFn<'_, C>> {
        self.vars
            .iter()
            .map(|v| Box::new(move |x: &dyn Field<C>| (v.eval)(x)) as WindowFn<'_, C>)
            .collect()
    }

    /// Spot-checks that each variable reads only its declared coordinates on
    /// `samples` pseudo-random points. Returns the first leak.
    pub fn check_declared(&self, alphabet: u32, seed: u64, samples: u64) -> Option<String> {
        for i in 0..samples {
            let x = Configuration::<C>::sample(alphabet, stream_seed(seed, i));
            for v in &self.vars {
                let deps: BTreeSet<&C> = v.deps.iter().collect();
                let guard = Guarded { inner: &x, allowed: |c: &C| deps.contains(c) };
                match (v.eval)(&guard) {
                    Err(Error::EscapesWindow(c)) => return Some(format!("{} reads undeclared {c}", v.name)),
                    _ => continue,
                }
            }
        }
        None
    }
}

fn pow(base: u64, exp: usize) -> BigUint {
    num_traits::pow(BigUint::from(base), exp)
}

/// Exact independence: the joint law must equal the product of the
/// marginals, as rationals, at every cell of the product of supports.
pub fn independence_exact<C: Coordinate>(family: &VariableFamily<'_, C>, alphabet: u32, budget: u64) -> Result<VerificationReport> {
    let window = family.window();
    let mut report = VerificationReport::new("independence-exact", Mode::Exact)
        .param("variables", family.vars.len())
        .param("window", window.len())
        .param("alphabet", alphabet);
    if let Some(leak) = family.check_declared(alphabet, 0x1EA4, 4) {
        report.fail(format!("dependency leak: {leak}"));
        return Ok(report);
    }
    let dist = exact_distribution(&family.evaluators(), &window, alphabet, budget)?;
    let d = family.vars.len();
    report.stat("states", Stat::Count(dist.states));
    report.stat("joint-support", Stat::Count(dist.counts.len() as u64));
    let marginals: Vec<BTreeMap<u32, u64>> = (0..d).map(|i| dist.marginal(i)).collect();
    let cells: u128 = marginals.iter().map(|m| m.len() as u128).product();
    report.stat("product-support", Stat::Count(cells.min(u64::MAX as u128) as u64));
    let uniform = marginals.iter().all(|m| {
        let first = m.values().next().copied();
        m.values().all(|&n| Some(n) == first)
    });
    report.stat("uniform-marginals", Stat::Text(uniform.to_string()));
    if d == 0 {
        return Ok(report);
    }
    let scale = pow(dist.states, d - 1);
    let check_cell = |tuple: &[u32]| -> bool {
        let joint = BigUint::from(dist.counts.get(tuple).copied().unwrap_or(0)) * &scale;
        let product = tuple
            .iter()
            .enumerate()
            .fold(BigUint::from(1u32), |acc, (i, v)| acc * BigUint::from(marginals[i][v]));
        joint == product
    };
    // every observed cell first, then (if supports differ) find a missing one
    for tuple in dist.counts.keys() {
        if !check_cell(tuple) {
            report.fail(format!("joint law differs from product at {tuple:?} ({})", names(family)));
            return Ok(report);
        }
    }
    if (dist.counts.len() as u128) < cells {
        let keys: Vec<Vec<u32>> = marginals.iter().map(|m| m.keys().copied().collect()).collect();
        let mut idx = vec![0usize; d];
        loop {
            let tuple: Vec<u32> = idx.iter().enumerate().map(|(i, &j)| keys[i][j]).collect();
            if !dist.counts.contains_key(&tuple) {
                report.fail(format!("cell {tuple:?} has probability 0 but positive product of marginals ({})", names(family)));
                return Ok(report);
            }
            let mut i = 0;
            loop {
                idx[i] += 1;
                if idx[i] < keys[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
                if i == d {
                    unreachable!("support product larger than joint support");
                }
            }
        }
    }
    Ok(report)
}

fn names<C>(family: &VariableFamily<'_, C>) -> String {
    family.vars.iter().map(|v| v.name.as_str()).collect::<Vec<_>>().join(", ")
}

/// Chi-square test of the joint law against the product of the observed
/// marginals, on `samples` seeded points. Passes when the statistic is below
/// the `quantile` of the chi-square law with the matching degrees of freedom.
pub fn independence_mc<C: Coordinate>(
    family: &VariableFamily<'_, C>,
    alphabet: u32,
    samples: u64,
    seed: u64,
    quantile: f64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("independence-mc", Mode::MonteCarlo)
        .param("variables", family.vars.len())
        .param("samples", samples)
        .param("quantile", quantile)
        .with_seed(seed);
    let d = family.vars.len();
    let mut joint: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    for i in 0..samples {
        let x = Configuration::<C>::sample(alphabet, stream_seed(seed, i));
        let t = family.vars.iter().map(|v| (v.eval)(&x)).collect::<Result<Vec<u32>>>()?;
        *joint.entry(t).or_insert(0) += 1;
    }
    let marginals: Vec<BTreeMap<u32, u64>> = (0..d)
        .map(|i| {
            let mut m = BTreeMap::new();
            for (k, &n) in &joint {
                *m.entry(k[i]).or_insert(0u64) += n;
            }
            m
        })
        .collect();
    let cells: u128 = marginals.iter().map(|m| m.len() as u128).product();
    let df = cells as i128 - 1 - marginals.iter().map(|m| m.len() as i128 - 1).sum::<i128>();
    report.stat("cells", Stat::Count(cells.min(u64::MAX as u128) as u64));
    report.stat("degrees-of-freedom", Stat::Count(df.max(0) as u64));
    if df <= 0 {
        report.note("at most one non-constant variable: independence is automatic");
        return Ok(report);
    }
    if cells > 1_000_000 || (samples as u128) < 5 * cells {
        report.undetermined(format!("{cells} cells is too many for {samples} samples"));
        return Ok(report);
    }
    let n = samples as f64;
    let keys: Vec<Vec<(u32, f64)>> = marginals
        .iter()
        .map(|m| m.iter().map(|(&k, &c)| (k, c as f64 / n)).collect())
        .collect();
    let mut chi2 = 0.0;
    let mut idx = vec![0usize; d];
    'cells: loop {
        let tuple: Vec<u32> = idx.iter().enumerate().map(|(i, &j)| keys[i][j].0).collect();
        let expected = n * idx.iter().enumerate().map(|(i, &j)| keys[i][j].1).product::<f64>();
        let observed = joint.get(&tuple).copied().unwrap_or(0) as f64;
        chi2 += (observed - expected).powi(2) / expected;
        for i in 0..d {
            idx[i] += 1;
            if idx[i] < keys[i].len() {
                continue 'cells;
            }
            idx[i] = 0;
        }
        break;
    }
    let critical = ChiSquared::new(df as f64).expect("df > 0").inverse_cdf(quantile);
    report.stat("chi-square", Stat::Real(chi2));
    report.stat("critical-value", Stat::Real(critical));
    if chi2 > critical {
        report.fail(format!("chi-square {chi2:.3} exceeds {critical:.3} ({})", names(family)));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::spaces::DEFAULT_BUDGET;

    fn proj(c: i64) -> Variable<'static, i64> {
        Variable::projection(c)
    }

    #[test]
    fn distinct_projections_are_independent() {
        let fam = VariableFamily::new(vec![proj(0), proj(1), proj(2)]);
        let r = independence_exact(&fam, 3, DEFAULT_BUDGET).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.is_well_formed());
    }

    #[test]
    fn coordinate_and_sum_are_independent() {
        let k = FiniteGroup::cyclic(2);
        let fam = VariableFamily::new(vec![
            proj(0),
            Variable::new("x0*x1", vec![0, 1], move |x| Ok(k.mul(x.value(&0)?, x.value(&1)?))),
        ]);
        assert!(independence_exact(&fam, 2, DEFAULT_BUDGET).unwrap().passed());
    }

    #[test]
    fn duplicated_variable_fails() {
        let fam = VariableFamily::new(vec![proj(0), proj(0)]);
        let r = independence_exact(&fam, 2, DEFAULT_BUDGET).unwrap();
        assert!(!r.passed());
        assert!(r.counterexample.is_some());
    }

    #[test]
    fn undeclared_read_is_reported() {
        let fam = VariableFamily::new(vec![Variable::new("leaky", vec![0i64], |x| x.value(&1))]);
        let r = independence_exact(&fam, 2, DEFAULT_BUDGET).unwrap();
        assert!(r.counterexample.unwrap().contains("dependency leak"));
    }

    #[test]
    fn mc_passes_on_independent_coordinates() {
        let fam = VariableFamily::new(vec![proj(0), proj(5), proj(-3)]);
        let r = independence_mc(&fam, 3, 10_000, 17, 0.999).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.is_well_formed());
    }

    #[test]
    fn mc_fails_decisively_on_duplicates() {
        let fam = VariableFamily::new(vec![proj(4), proj(4)]);
        let r = independence_mc(&fam, 2, 10_000, 17, 0.999).unwrap();
        assert!(!r.passed());
        match r.statistics["chi-square"] {
            Stat::Real(x) => assert!(x > 5_000.0),
            _ => unreachable!(),
        }
    }

    #[test]
    fn mc_is_reproducible() {
        let fam = VariableFamily::new(vec![proj(0), proj(1)]);
        let a = independence_mc(&fam, 2, 2_000, 5, 0.999).unwrap();
        let b = independence_mc(&fam, 2, 2_000, 5, 0.999).unwrap();
        assert_eq!(a, b);
    }
}
