//! Does a family of variables determine a given set of target functions?

use std::collections::HashMap;

use crate::error::Result;
use crate::spaces::{enumerate_window, Coordinate, WindowFn};
use crate::verify::independence::VariableFamily;
use crate::verify::report::{Mode, Stat, VerificationReport};

/// Rebuilds the target values from the variable values.
pub type Reconstructor<'a> = dyn Fn(&[u32]) -> Result<Vec<u32>> + Sync + 'a;

#[derive(Default)]
struct Acc {
    seen: HashMap<Vec<u32>, Vec<u32>>,
    clash: Option<String>,
    mismatches: u64,
    first_mismatch: Option<String>,
}

fn absorb(acc: &mut Acc, values: Vec<u32>, target: Vec<u32>) {
    if acc.clash.is_some() {
        return;
    }
    match acc.seen.get(&values) {
        Some(t) if *t != target => {
            acc.clash = Some(format!("variables {values:?} occur with targets {t:?} and {target:?}"));
        }
        Some(_) => {}
        None => {
            acc.seen.insert(values, target);
        }
    }
}

/// Enumerates every assignment of `window` and checks that the variable
/// tuple determines the target tuple. Targets are functions so that callers
/// can pass quotient-normalized coordinates. With a reconstructor, also
/// checks that it returns the target on every state.
pub fn generation_check<C: Coordinate>(
    family: &VariableFamily<'_, C>,
    targets: &[WindowFn<'_, C>],
    window: &[C],
    alphabet: u32,
    budget: u64,
    reconstructor: Option<&Reconstructor<'_>>,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("generation", Mode::Exact)
        .param("variables", family.vars.len())
        .param("targets", targets.len())
        .param("window", window.len());
    let acc = enumerate_window(
        window,
        alphabet,
        budget,
        Acc::default,
        |acc, a| {
            let values = family.vars.iter().map(|v| (v.eval)(a)).collect::<Result<Vec<u32>>>()?;
            let target = targets.iter().map(|t| t(a)).collect::<Result<Vec<u32>>>()?;
            if let Some(rebuild) = reconstructor {
                let got = rebuild(&values)?;
                if got != target {
                    acc.mismatches += 1;
                    if acc.first_mismatch.is_none() {
                        acc.first_mismatch = Some(format!("state {:?}: rebuilt {got:?}, expected {target:?}", a.values()));
                    }
                }
            }
            absorb(acc, values, target);
            Ok(())
        },
        |mut x, y| {
            x.mismatches += y.mismatches;
            if x.first_mismatch.is_none() {
                x.first_mismatch = y.first_mismatch;
            }
            if x.clash.is_none() {
                x.clash = y.clash;
            }
            for (k, v) in y.seen {
                absorb(&mut x, k, v);
            }
            x
        },
    )?;
    report.stat("distinct-variable-tuples", Stat::Count(acc.seen.len() as u64));
    if reconstructor.is_some() {
        report.stat("reconstruction-mismatches", Stat::Count(acc.mismatches));
    }
    if let Some(c) = acc.clash {
        report.fail(c);
    }
    if let Some(m) = acc.first_mismatch {
        report.fail(m);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::spaces::{Field, DEFAULT_BUDGET};
    use crate::verify::independence::Variable;

    fn target(c: i64) -> WindowFn<'static, i64> {
        Box::new(move |x: &dyn Field<i64>| x.value(&c))
    }

    #[test]
    fn differences_generate_the_quotient() {
        let k = FiniteGroup::cyclic(3);
        let k2 = k.clone();
        let fam = VariableFamily::new(vec![Variable::new("x0^-1 x1", vec![0, 1], move |x| {
            Ok(k.mul(k.inv(x.value(&0)?), x.value(&1)?))
        })]);
        // normalized coordinate 1
        let t: WindowFn<'_, i64> = Box::new(move |x: &dyn Field<i64>| Ok(k2.mul(k2.inv(x.value(&0)?), x.value(&1)?)));
        let r = generation_check(&fam, &[t], &[0, 1], 3, DEFAULT_BUDGET, Some(&|v: &[u32]| Ok(vec![v[0]]))).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn missing_coordinate_is_a_clash() {
        let fam = VariableFamily::new(vec![Variable::projection(0i64)]);
        let r = generation_check(&fam, &[target(0), target(1)], &[0, 1], 2, DEFAULT_BUDGET, None).unwrap();
        assert!(!r.passed());
        assert!(r.counterexample.unwrap().contains("targets"));
    }
}
