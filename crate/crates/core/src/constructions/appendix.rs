//! Sections for free actions of a finite group on a finite set:
//! `θ : K × Y_0 → X, θ(k, y) = k·y` with `Y_0` a set of orbit
//! representatives.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::spaces::ratio_string;
use crate::verify::{Mode, Stat, VerificationReport};

/// `K` acting on `{0, .., n-1}`: `table[k][x] = k·x`.
#[derive(Debug, Clone)]
pub struct FiniteAction {
    pub group: FiniteGroup,
    pub table: Vec<Vec<u32>>,
}

impl FiniteAction {
    pub fn new(group: FiniteGroup, table: Vec<Vec<u32>>) -> Result<Self> {
        if table.len() != group.order() as usize {
            return Err(Error::Precondition("one row per group element is needed".into()));
        }
        let n = table.first().map_or(0, |r| r.len());
        for (k, row) in table.iter().enumerate() {
            let mut seen = vec![false; n];
            if row.len() != n || row.iter().any(|&x| x as usize >= n || std::mem::replace(&mut seen[x as usize], true)) {
                return Err(Error::Precondition(format!("row {k} is not a permutation of the point set")));
            }
        }
        let a = FiniteAction { group, table };
        for g in a.group.elements() {
            for h in a.group.elements() {
                for x in 0..n as u32 {
                    if a.act(g, a.act(h, x)) != a.act(a.group.mul(g, h), x) {
                        return Err(Error::Precondition(format!("g·(h·x) ≠ (gh)·x at g={g}, h={h}, x={x}")));
                    }
                }
            }
        }
        if (0..n as u32).any(|x| a.act(a.group.identity(), x) != x) {
            return Err(Error::Precondition("identity does not act trivially".into()));
        }
        Ok(a)
    }

    /// `K` acting on `K × {0..copies}` by left multiplication on the first
    /// coordinate, points numbered `(k, j) ↦ j·|K| + k`, then relabelled by
    /// `relabel`.
    pub fn free_copies(group: FiniteGroup, copies: u32, relabel: &[u32]) -> Result<Self> {
        let order = group.order();
        let n = order * copies;
        if relabel.len() != n as usize {
            return Err(Error::Precondition("relabelling must cover every point".into()));
        }
        let table = group
            .elements()
            .map(|g| {
                let mut row = vec![0; n as usize];
                for j in 0..copies {
                    for k in group.elements() {
                        row[relabel[(j * order + k) as usize] as usize] = relabel[(j * order + group.mul(g, k)) as usize];
                    }
                }
                row
            })
            .collect();
        FiniteAction::new(group, table)
    }

    pub fn points(&self) -> u32 {
        self.table.first().map_or(0, |r| r.len() as u32)
    }

    pub fn act(&self, k: u32, x: u32) -> u32 {
        self.table[k as usize][x as usize]
    }

    /// A point with a nontrivial stabilizer, if any.
    pub fn fixed_point(&self) -> Option<(u32, u32)> {
        for x in 0..self.points() {
            for k in self.group.elements().filter(|&k| k != self.group.identity()) {
                if self.act(k, x) == x {
                    return Some((k, x));
                }
            }
        }
        None
    }
}

/// Orbit representatives `Y_0` (least point of each orbit) and the section
/// `θ(k, y) = k·y`.
#[derive(Debug, Clone)]
pub struct Section {
    pub representatives: Vec<u32>,
}

impl Section {
    pub fn theta(&self, a: &FiniteAction, k: u32, y: usize) -> u32 {
        a.act(k, self.representatives[y])
    }
}

pub fn appendix_section(a: &FiniteAction) -> Result<Section> {
    if let Some((k, x)) = a.fixed_point() {
        return Err(Error::NotFree(format!("{} fixes point {x}", a.group.element_name(k))));
    }
    let mut reps = Vec::new();
    for x in 0..a.points() {
        if a.group.elements().all(|k| a.act(k, x) >= x) {
            reps.push(x);
        }
    }
    Ok(Section { representatives: reps })
}

/// Bijectivity, equivariance `θ(gh, y) = g·θ(h, y)`, and
/// `θ_*(uniform × uniform) = uniform`, all exhaustively.
pub fn check_section(a: &FiniteAction) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("appendix-section", Mode::Exact)
        .param("k", a.group.name())
        .param("points", a.points());
    let s = match appendix_section(a) {
        Ok(s) => s,
        Err(Error::NotFree(w)) => {
            r.fail(format!("action is not free: {w}"));
            return Ok(r);
        }
        Err(e) => return Err(e),
    };
    let k = &a.group;
    r.stat("representatives", Stat::Count(s.representatives.len() as u64));
    let mut hits = vec![0u64; a.points() as usize];
    for h in k.elements() {
        for y in 0..s.representatives.len() {
            hits[s.theta(a, h, y) as usize] += 1;
            for g in k.elements() {
                if s.theta(a, k.mul(g, h), y) != a.act(g, s.theta(a, h, y)) {
                    r.fail(format!("θ(gh, y) ≠ g·θ(h, y) at g={}, h={}, y={y}", k.element_name(g), k.element_name(h)));
                    return Ok(r);
                }
            }
        }
    }
    if let Some(x) = hits.iter().position(|&n| n != 1) {
        r.fail(format!("point {x} has {} preimages", hits[x]));
        return Ok(r);
    }
    // each preimage has mass 1/(|K||Y_0|); compare with 1/|X|
    let cell = Ratio::new(1u64, k.order() as u64 * s.representatives.len() as u64);
    let target = Ratio::new(1u64, a.points() as u64);
    r.stat("pushforward-mass", Stat::Exact(ratio_string(cell)));
    r.stat("uniform-mass", Stat::Exact(ratio_string(target)));
    if cell != target {
        r.fail("pushforward is not uniform");
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_on_six_points() {
        let a = FiniteAction::free_copies(FiniteGroup::cyclic(2), 3, &[3, 0, 5, 1, 4, 2]).unwrap();
        let s = appendix_section(&a).unwrap();
        assert_eq!(s.representatives.len(), 3);
        let r = check_section(&a).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn z3_on_six_points() {
        let a = FiniteAction::free_copies(FiniteGroup::cyclic(3), 2, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert!(check_section(&a).unwrap().passed());
    }

    #[test]
    fn fixed_point_is_named() {
        let a = FiniteAction::new(FiniteGroup::cyclic(2), vec![vec![0, 1, 2, 3], vec![1, 0, 2, 3]]).unwrap();
        match appendix_section(&a) {
            Err(Error::NotFree(w)) => assert!(w.contains("point 2")),
            other => panic!("{other:?}"),
        }
        assert!(!check_section(&a).unwrap().passed());
    }

    #[test]
    fn bad_tables_are_rejected() {
        assert!(FiniteAction::new(FiniteGroup::cyclic(2), vec![vec![0, 1], vec![0, 0]]).is_err());
        // rows are permutations but do not form an action
        assert!(FiniteAction::new(FiniteGroup::cyclic(2), vec![vec![1, 0, 2], vec![0, 2, 1]]).is_err());
    }
}
