//! Decision procedure for families `(x, y) ↦ ω_1(x)·y_{ω_2(x)}` on
//! `X × X_0^I` with `X` finite and uniform.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::verify::report::{Mode, Stat, VerificationReport};

/// One instance. `h_action[h]` is the permutation of `X_0` by `h`;
/// `family[j][x] = (h, i)` is the value of the `j`-th map at `x`.
#[derive(Debug, Clone)]
pub struct LemmaIndepInstance {
    pub x_size: usize,
    pub x0_size: u32,
    pub h_action: Vec<Vec<u32>>,
    pub index_size: usize,
    pub family: Vec<Vec<(u32, usize)>>,
}

impl LemmaIndepInstance {
    fn validate(&self) -> Result<()> {
        for (h, p) in self.h_action.iter().enumerate() {
            let mut seen = vec![false; self.x0_size as usize];
            if p.len() != self.x0_size as usize {
                return Err(Error::Precondition(format!("h = {h} does not act on all of X_0")));
            }
            for &v in p {
                if v >= self.x0_size || std::mem::replace(&mut seen[v as usize], true) {
                    return Err(Error::Precondition(format!("h = {h} is not a permutation of X_0")));
                }
            }
        }
        for (j, member) in self.family.iter().enumerate() {
            if member.len() != self.x_size {
                return Err(Error::Precondition(format!("member {j} is not defined on all of X")));
            }
            for &(h, i) in member {
                if h as usize >= self.h_action.len() || i >= self.index_size {
                    return Err(Error::Precondition(format!("member {j} takes a value outside H × I")));
                }
            }
        }
        Ok(())
    }

    /// Points `x` where two members share the same index `ω_2(x)`.
    pub fn injectivity_failures(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.x_size {
            let mut first: HashMap<usize, usize> = HashMap::new();
            for (j, member) in self.family.iter().enumerate() {
                if let Some(&k) = first.get(&member[x].1) {
                    out.push((x, k, j));
                } else {
                    first.insert(member[x].1, j);
                }
            }
        }
        out
    }

    fn values(&self, x: usize, y: &[u32]) -> Vec<u32> {
        self.family
            .iter()
            .map(|m| {
                let (h, i) = m[x];
                self.h_action[h as usize][y[i] as usize]
            })
            .collect()
    }
}

/// Enumerates `X × X_0^I` and checks that the family is i.i.d. uniform on
/// `X_0` and independent of `x`: for every `x`, every value tuple occurs
/// exactly `|X_0|^(|I|-F)` times.
pub fn lemma_indep_check(inst: &LemmaIndepInstance, budget: u64) -> Result<VerificationReport> {
    inst.validate()?;
    let f = inst.family.len();
    let mut report = VerificationReport::new("lemma-indep", Mode::Exact)
        .param("x-size", inst.x_size)
        .param("x0-size", inst.x0_size)
        .param("index-size", inst.index_size)
        .param("members", f);
    let failures = inst.injectivity_failures();
    report.stat("injectivity-failures", Stat::Count(failures.len() as u64));
    if let Some(&(x, j, k)) = failures.first() {
        let mut pre = VerificationReport::new("lemma-indep/precondition", Mode::Exact);
        pre.fail(format!("members {j} and {k} share index {} at x = {x}", inst.family[j][x].1));
        report.push_child(pre);
        return Ok(report);
    }
    let per_x = (inst.x0_size as u128).checked_pow(inst.index_size as u32).unwrap_or(u128::MAX);
    let states = per_x.saturating_mul(inst.x_size as u128);
    if states > budget as u128 {
        return Err(Error::BudgetExceeded { states, budget });
    }
    report.stat("states", Stat::Count(states as u64));
    let expected = (inst.x0_size as u64).pow((inst.index_size - f) as u32);
    let outcomes = (inst.x0_size as u64).pow(f as u32);
    let mut y = vec![0u32; inst.index_size];
    for x in 0..inst.x_size {
        let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
        y.iter_mut().for_each(|v| *v = 0);
        for _ in 0..per_x {
            *counts.entry(inst.values(x, &y)).or_insert(0) += 1;
            for v in y.iter_mut() {
                *v += 1;
                if *v < inst.x0_size {
                    break;
                }
                *v = 0;
            }
        }
        if counts.len() as u64 != outcomes {
            report.fail(format!("at x = {x} only {} of {outcomes} value tuples occur", counts.len()));
            return Ok(report);
        }
        let mut sorted: Vec<_> = counts.into_iter().collect();
        sorted.sort();
        if let Some((v, n)) = sorted.into_iter().find(|&(_, n)| n != expected) {
            report.fail(format!("cylinder x = {x}, values {v:?} has mass {n}/{states}, expected {expected}/{states}"));
            return Ok(report);
        }
    }
    report.stat("count-per-cell", Stat::Count(expected));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flip() -> Vec<Vec<u32>> {
        vec![vec![0, 1], vec![1, 0]]
    }

    #[test]
    fn sixteen_point_instance_passes() {
        let inst = LemmaIndepInstance {
            x_size: 2,
            x0_size: 2,
            h_action: flip(),
            index_size: 3,
            family: vec![vec![(0, 0), (1, 2)], vec![(1, 1), (0, 0)]],
        };
        let r = lemma_indep_check(&inst, 1 << 20).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.statistics["states"], Stat::Count(16));
    }

    #[test]
    fn shared_index_is_a_precondition_failure() {
        let inst = LemmaIndepInstance {
            x_size: 2,
            x0_size: 2,
            h_action: flip(),
            index_size: 3,
            family: vec![vec![(0, 1), (0, 1)], vec![(1, 1), (1, 1)]],
        };
        let r = lemma_indep_check(&inst, 1 << 20).unwrap();
        assert!(!r.passed());
        assert_eq!(inst.injectivity_failures().len(), 2);
        assert_eq!(r.children[0].check, "lemma-indep/precondition");
    }

    #[test]
    fn single_projection_is_uniform() {
        let inst = LemmaIndepInstance {
            x_size: 1,
            x0_size: 3,
            h_action: vec![vec![0, 1, 2]],
            index_size: 1,
            family: vec![vec![(0, 0)]],
        };
        assert!(lemma_indep_check(&inst, 1 << 20).unwrap().passed());
    }

    #[test]
    fn non_permutation_is_rejected() {
        let inst = LemmaIndepInstance {
            x_size: 1,
            x0_size: 2,
            h_action: vec![vec![0, 0]],
            index_size: 1,
            family: vec![vec![(0, 0)]],
        };
        assert!(matches!(lemma_indep_check(&inst, 1 << 20), Err(Error::Precondition(_))));
    }
}
