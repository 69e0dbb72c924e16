//! Configurations on group, coset and integer index sets; exact cylinder
//! laws by enumeration; reproducible pseudo-random points.
//!
//! Every point of a product space `A^I` is read through the [`Field`] trait.
//! Stored [`Configuration`]s hold a finite window and optionally a seed; reads
//! outside the window are then a keyed pseudo-random function of the
//! coordinate, so access order never changes values.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::words::{Coset, Word};

/// Default enumeration budget: 2^24 window states.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// Index-set element with a canonical byte encoding.
pub trait Coordinate: Clone + Ord + Hash + Debug + Send + Sync {
    fn key_bytes(&self) -> Vec<u8>;
}

impl Coordinate for Word {
    fn key_bytes(&self) -> Vec<u8> {
        let mut v = b"G".to_vec();
        v.extend(Word::key_bytes(self));
        v
    }
}

impl Coordinate for Coset {
    fn key_bytes(&self) -> Vec<u8> {
        let mut v = b"C".to_vec();
        v.extend_from_slice(&(self.subgroup as u64).to_le_bytes());
        v.extend(self.rep.key_bytes());
        v
    }
}

impl Coordinate for i64 {
    fn key_bytes(&self) -> Vec<u8> {
        let mut v = b"Z".to_vec();
        v.extend_from_slice(&self.to_le_bytes());
        v
    }
}

/// Read access to a point of `A^I` with `A = {0, .., alphabet-1}`.
pub trait Field<C> {
    fn value(&self, c: &C) -> Result<u32>;
    fn alphabet(&self) -> u32;
}

impl<C, F: Field<C> + ?Sized> Field<C> for &F {
    fn value(&self, c: &C) -> Result<u32> {
        (**self).value(c)
    }
    fn alphabet(&self) -> u32 {
        (**self).alphabet()
    }
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Keyed pseudo-random function of a byte string.
pub fn prf(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = mix64(seed ^ 0x243F_6A88_85A3_08D3);
    for chunk in bytes.chunks(8) {
        let mut buf = [0u8; 8];
        buf[..chunk.len()].copy_from_slice(chunk);
        h = mix64(h ^ u64::from_le_bytes(buf));
    }
    mix64(h ^ bytes.len() as u64)
}

/// Uniform value in `0..m` from 64 random bits (multiply-shift).
#[inline]
pub fn reduce(bits: u64, m: u32) -> u32 {
    ((u128::from(bits) * u128::from(m)) >> 64) as u32
}

/// Seed of the `i`-th sample of a stream, for seed-stream splitting.
pub fn stream_seed(seed: u64, i: u64) -> u64 {
    mix64(mix64(seed) ^ mix64(i.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// A stored point: finite window plus optional pseudo-random extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration<C: Coordinate> {
    alphabet: u32,
    window: BTreeMap<C, u32>,
    seed: Option<u64>,
}

impl<C: Coordinate> Configuration<C> {
    /// A point known only on `window`.
    pub fn from_window(alphabet: u32, window: BTreeMap<C, u32>) -> Self {
        Configuration { alphabet, window, seed: None }
    }

    /// Reproducible "almost every" point: all coordinates pseudo-random.
    pub fn sample(alphabet: u32, seed: u64) -> Self {
        Configuration { alphabet, window: BTreeMap::new(), seed: Some(seed) }
    }

    /// Constant point on a window.
    pub fn constant(alphabet: u32, coords: &[C], value: u32) -> Self {
        Self::from_window(alphabet, coords.iter().map(|c| (c.clone(), value)).collect())
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn window(&self) -> &BTreeMap<C, u32> {
        &self.window
    }

    pub fn set(&mut self, c: C, v: u32) {
        assert!(v < self.alphabet, "value {v} outside alphabet {}", self.alphabet);
        self.window.insert(c, v);
    }

    /// Stores the values of `field` on `coords` (no seed).
    pub fn materialize<F: Field<C> + ?Sized>(field: &F, coords: &[C]) -> Result<Self> {
        let mut window = BTreeMap::new();
        for c in coords {
            window.insert(c.clone(), field.value(c)?);
        }
        Ok(Self::from_window(field.alphabet(), window))
    }
}

impl<C: Coordinate> Field<C> for Configuration<C> {
    fn value(&self, c: &C) -> Result<u32> {
        if let Some(&v) = self.window.get(c) {
            return Ok(v);
        }
        match self.seed {
            Some(seed) => Ok(reduce(prf(seed, &c.key_bytes()), self.alphabet)),
            None => Err(Error::OutsideWindow(format!("{c:?}"))),
        }
    }

    fn alphabet(&self) -> u32 {
        self.alphabet
    }
}

/// Reads through to `inner` but fails on coordinates rejected by `allowed`.
/// Used to enforce declared dependency windows.
pub struct Guarded<'a, C, P> {
    pub inner: &'a dyn Field<C>,
    pub allowed: P,
}

impl<C: Debug, P: Fn(&C) -> bool> Field<C> for Guarded<'_, C, P> {
    fn value(&self, c: &C) -> Result<u32> {
        if (self.allowed)(c) {
            self.inner.value(c)
        } else {
            Err(Error::EscapesWindow(format!("{c:?}")))
        }
    }
    fn alphabet(&self) -> u32 {
        self.inner.alphabet()
    }
}

/// Diagonal left translation `(k·x)_c = k x_c` of a `K`-valued point.
pub struct Translated<'a, C> {
    pub group: &'a FiniteGroup,
    pub k: u32,
    pub inner: &'a dyn Field<C>,
}

impl<C> Field<C> for Translated<'_, C> {
    fn value(&self, c: &C) -> Result<u32> {
        Ok(self.group.mul(self.k, self.inner.value(c)?))
    }
    fn alphabet(&self) -> u32 {
        self.group.order()
    }
}

/// Lazy representative of the diagonal `K`-orbit with `e` at `base`.
pub struct Normalized<'a, C> {
    pub group: &'a FiniteGroup,
    pub base: C,
    pub inner: &'a dyn Field<C>,
}

impl<C: Debug> Field<C> for Normalized<'_, C> {
    fn value(&self, c: &C) -> Result<u32> {
        let b = self.inner.value(&self.base).map_err(|_| Error::MissingBase(format!("{:?}", self.base)))?;
        Ok(self.group.mul(self.group.inv(b), self.inner.value(c)?))
    }
    fn alphabet(&self) -> u32 {
        self.group.order()
    }
}

/// Representative of the diagonal-translation orbit of `x` with value `e` at
/// `base`: every stored coordinate is left-multiplied by `x_base^-1`.
pub fn quotient_normalize<C: Coordinate>(x: &Configuration<C>, group: &FiniteGroup, base: &C) -> Result<Configuration<C>> {
    let b = *x.window.get(base).ok_or_else(|| Error::MissingBase(format!("{base:?}")))?;
    let inv = group.inv(b);
    Ok(Configuration::from_window(
        x.alphabet,
        x.window.iter().map(|(c, &v)| (c.clone(), group.mul(inv, v))).collect(),
    ))
}

/// One full assignment of a finite window during enumeration.
pub struct Assignment<'a, C> {
    index: &'a HashMap<C, usize>,
    values: &'a [u32],
    alphabet: u32,
}

impl<C> Assignment<'_, C> {
    pub fn values(&self) -> &[u32] {
        self.values
    }
}

impl<C: Hash + Eq + Debug> Field<C> for Assignment<'_, C> {
    fn value(&self, c: &C) -> Result<u32> {
        self.index
            .get(c)
            .map(|&i| self.values[i])
            .ok_or_else(|| Error::EscapesWindow(format!("{c:?}")))
    }
    fn alphabet(&self) -> u32 {
        self.alphabet
    }
}

/// Number of states `alphabet^|window|`, checked against the budget.
pub fn state_count(alphabet: u32, window_len: usize, budget: u64) -> Result<u64> {
    let states = (alphabet as u128).checked_pow(window_len as u32).unwrap_or(u128::MAX);
    if states > budget as u128 {
        return Err(Error::BudgetExceeded { states, budget });
    }
    Ok(states as u64)
}

/// Folds `step` over every assignment of `window`, partitioned across
/// workers by state-index ranges; partial accumulators are merged with
/// `merge`, which must be associative and order independent.
pub fn enumerate_window<C, A, S, M>(
    window: &[C],
    alphabet: u32,
    budget: u64,
    init: impl Fn() -> A + Sync,
    step: S,
    merge: M,
) -> Result<A>
where
    C: Coordinate,
    A: Send,
    S: Fn(&mut A, &Assignment<C>) -> Result<()> + Sync,
    M: Fn(A, A) -> A + Sync + Send,
{
    let total = state_count(alphabet, window.len(), budget)?;
    let unique: HashSet<&C> = window.iter().collect();
    if unique.len() != window.len() {
        return Err(Error::Precondition("enumeration window has repeated coordinates".into()));
    }
    let index: HashMap<C, usize> = window.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let chunks = total.min(64);
    let per = total.div_ceil(chunks.max(1));
    let parts: Vec<Result<A>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * per;
            let end = (start + per).min(total);
            let mut acc = init();
            let mut values = vec![0u32; window.len()];
            // little-endian odometer: coordinate 0 varies fastest
            let mut rest = start;
            for v in values.iter_mut() {
                *v = (rest % alphabet as u64) as u32;
                rest /= alphabet as u64;
            }
            for _ in start..end {
                step(&mut acc, &Assignment { index: &index, values: &values, alphabet })?;
                for v in values.iter_mut() {
                    *v += 1;
                    if *v < alphabet {
                        break;
                    }
                    *v = 0;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut out: Option<A> = None;
    for p in parts {
        let p = p?;
        out = Some(match out {
            None => p,
            Some(acc) => merge(acc, p),
        });
    }
    Ok(out.unwrap_or_else(init))
}

/// Exact joint law of finitely many window functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderDistribution {
    /// Outcome tuple -> number of window states producing it.
    pub counts: BTreeMap<Vec<u32>, u64>,
    /// Number of window states, `alphabet^|window|`.
    pub states: u64,
}

impl CylinderDistribution {
    pub fn probability(&self, outcome: &[u32]) -> Ratio<u64> {
        Ratio::new(self.counts.get(outcome).copied().unwrap_or(0), self.states)
    }

    pub fn total(&self) -> Ratio<u64> {
        Ratio::new(self.counts.values().sum(), self.states)
    }

    /// Law of a single coordinate of the outcome tuple.
    pub fn marginal(&self, i: usize) -> BTreeMap<u32, u64> {
        let mut m = BTreeMap::new();
        for (k, &n) in &self.counts {
            *m.entry(k[i]).or_insert(0) += n;
        }
        m
    }
}

/// A function of a point that only reads coordinates inside an enumeration
/// window.
pub type WindowFn<'a, C> = Box<dyn Fn(&dyn Field<C>) -> Result<u32> + Send + Sync + 'a>;

/// Exact joint law of `vars` under the uniform product measure on `window`,
/// by full enumeration with exact integer counts.
pub fn exact_distribution<C: Coordinate>(
    vars: &[WindowFn<'_, C>],
    window: &[C],
    alphabet: u32,
    budget: u64,
) -> Result<CylinderDistribution> {
    let states = state_count(alphabet, window.len(), budget)?;
    let counts = enumerate_window(
        window,
        alphabet,
        budget,
        BTreeMap::<Vec<u32>, u64>::new,
        |acc, a| {
            let outcome = vars.iter().map(|f| f(a)).collect::<Result<Vec<u32>>>()?;
            *acc.entry(outcome).or_insert(0) += 1;
            Ok(())
        },
        |mut x, y| {
            for (k, v) in y {
                *x.entry(k).or_insert(0) += v;
            }
            x
        },
    )?;
    Ok(CylinderDistribution { counts, states })
}

/// Formats an exact ratio as `p/q`.
pub fn ratio_string(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords(n: i64) -> Vec<i64> {
        (0..n).collect()
    }

    #[test]
    fn sample_is_deterministic() {
        let x = Configuration::<i64>::sample(5, 42);
        let y = Configuration::<i64>::sample(5, 42);
        for c in -50..50 {
            assert_eq!(x.value(&c).unwrap(), y.value(&c).unwrap());
        }
        // access order is irrelevant
        let a: Vec<u32> = (0..20).rev().map(|c| x.value(&c).unwrap()).collect();
        let b: Vec<u32> = (0..20).map(|c| y.value(&c).unwrap()).rev().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn unseeded_reads_outside_window_fail() {
        let x = Configuration::constant(2, &coords(3), 1);
        assert_eq!(x.value(&2).unwrap(), 1);
        assert!(matches!(x.value(&3), Err(Error::OutsideWindow(_))));
    }

    #[test]
    fn frequency_of_zero_within_three_sigma() {
        let x = Configuration::<i64>::sample(2, 7);
        let n = 10_000;
        let zeros = (0..n).filter(|c| x.value(c).unwrap() == 0).count() as f64;
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((zeros - n as f64 / 2.0).abs() < 3.0 * sigma, "zeros = {zeros}");
    }

    #[test]
    fn pair_correlation_within_three_sigma() {
        // x_0 and x_1 over 10^4 seeds: ±1-valued product has mean 0, variance 1
        let n = 10_000u64;
        let s: i64 = (0..n)
            .map(|i| {
                let x = Configuration::<i64>::sample(2, stream_seed(99, i));
                let u = 2 * x.value(&0).unwrap() as i64 - 1;
                let v = 2 * x.value(&1).unwrap() as i64 - 1;
                u * v
            })
            .sum();
        assert!((s as f64).abs() < 3.0 * (n as f64).sqrt(), "sum = {s}");
    }

    #[test]
    fn single_coordinate_is_uniform() {
        let k = FiniteGroup::cyclic(3);
        let vars: Vec<WindowFn<i64>> = vec![Box::new(|x| x.value(&1))];
        let d = exact_distribution(&vars, &coords(2), k.order(), DEFAULT_BUDGET).unwrap();
        for v in 0..3 {
            assert_eq!(d.probability(&[v]), Ratio::new(1, 3));
        }
        assert_eq!(d.total(), Ratio::from_integer(1));
    }

    #[test]
    fn difference_of_two_coordinates_is_uniform() {
        let k = FiniteGroup::cyclic(2);
        let kk = k.clone();
        let vars: Vec<WindowFn<i64>> =
            vec![Box::new(move |x| Ok(kk.mul(kk.inv(x.value(&0)?), x.value(&1)?)))];
        let d = exact_distribution(&vars, &coords(2), 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(d.probability(&[0]), Ratio::new(1, 2));
        assert_eq!(d.probability(&[1]), Ratio::new(1, 2));
    }

    #[test]
    fn constant_variable_is_point_mass() {
        let vars: Vec<WindowFn<i64>> = vec![Box::new(|_| Ok(1))];
        let d = exact_distribution(&vars, &coords(3), 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(d.probability(&[1]), Ratio::from_integer(1));
    }

    #[test]
    fn escaping_variable_is_an_error() {
        let vars: Vec<WindowFn<i64>> = vec![Box::new(|x| x.value(&10))];
        assert!(matches!(
            exact_distribution(&vars, &coords(2), 2, DEFAULT_BUDGET),
            Err(Error::EscapesWindow(_))
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let vars: Vec<WindowFn<i64>> = vec![Box::new(|x| x.value(&0))];
        assert!(matches!(
            exact_distribution(&vars, &coords(11), 2, 1024),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn projections_form_uniform_product() {
        let k = FiniteGroup::symmetric3();
        let vars: Vec<WindowFn<i64>> = (0..3).map(|i| Box::new(move |x: &dyn Field<i64>| x.value(&i)) as WindowFn<i64>).collect();
        let d = exact_distribution(&vars, &coords(3), k.order(), DEFAULT_BUDGET).unwrap();
        assert_eq!(d.counts.len(), 216);
        assert!(d.counts.values().all(|&n| n == 1));
    }

    #[test]
    fn normalization_counts_orbits() {
        // number of K-orbits on K^B equals |K|^(|B|-1)
        let k = FiniteGroup::symmetric3();
        let window = coords(3);
        let reps = enumerate_window(
            &window,
            k.order(),
            DEFAULT_BUDGET,
            HashSet::<Vec<u32>>::new,
            |acc, a| {
                let x = Configuration::materialize(a, &window)?;
                let n = quotient_normalize(&x, &k, &0)?;
                acc.insert(n.window().values().copied().collect());
                Ok(())
            },
            |mut a, b| {
                a.extend(b);
                a
            },
        )
        .unwrap();
        assert_eq!(reps.len(), 36);
    }

    #[test]
    fn normalization_is_orbit_invariant_and_idempotent() {
        let k = FiniteGroup::symmetric3();
        let window = coords(4);
        let x = Configuration::materialize(&Configuration::<i64>::sample(6, 3), &window).unwrap();
        let n = quotient_normalize(&x, &k, &0).unwrap();
        assert_eq!(quotient_normalize(&n, &k, &0).unwrap(), n);
        for g in k.elements() {
            let t = Translated { group: &k, k: g, inner: &x };
            let tx = Configuration::materialize(&t, &window).unwrap();
            assert_eq!(quotient_normalize(&tx, &k, &0).unwrap(), n);
        }
        let missing = Configuration::constant(6, &[5i64], 0);
        assert!(matches!(quotient_normalize(&missing, &k, &0), Err(Error::MissingBase(_))));
    }
}
