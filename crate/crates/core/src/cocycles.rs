//! 1-cocycles stored on letters and evaluated on words through the cocycle
//! identity `ω(gh, x) = ω(g, h·x) ω(h, x)`.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::Arc;

use rayon::prelude::*;

use crate::actions::Action;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::spaces::{Configuration, Coordinate, Field};
use crate::verify::{Mode, Stat, VerificationReport};
use crate::words::{GroupSpec, Length, Word};

/// Group in which a cocycle takes values.
pub trait TargetGroup: Sync + Send {
    type Elem: Clone + Debug + PartialEq + Send + Sync + 'static;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn format(&self, a: &Self::Elem) -> String;
}

impl TargetGroup for GroupSpec {
    type Elem = Word;
    fn identity(&self) -> Word {
        Word::identity()
    }
    fn mul(&self, a: &Word, b: &Word) -> Word {
        GroupSpec::mul(self, a, b)
    }
    fn inv(&self, a: &Word) -> Word {
        self.inverse(a)
    }
    fn format(&self, a: &Word) -> String {
        GroupSpec::format(self, a)
    }
}

impl TargetGroup for FiniteGroup {
    type Elem = u32;
    fn identity(&self) -> u32 {
        FiniteGroup::identity(self)
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        FiniteGroup::mul(self, *a, *b)
    }
    fn inv(&self, a: &u32) -> u32 {
        FiniteGroup::inv(self, *a)
    }
    fn format(&self, a: &u32) -> String {
        self.element_name(*a).to_string()
    }
}

/// The integers under addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Integers;

impl TargetGroup for Integers {
    type Elem = i64;
    fn identity(&self) -> i64 {
        0
    }
    fn mul(&self, a: &i64, b: &i64) -> i64 {
        a + b
    }
    fn inv(&self, a: &i64) -> i64 {
        -a
    }
    fn format(&self, a: &i64) -> String {
        a.to_string()
    }
}

/// Direct product of two target groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Product<A, B>(pub A, pub B);

impl<A: TargetGroup, B: TargetGroup> TargetGroup for Product<A, B> {
    type Elem = (A::Elem, B::Elem);
    fn identity(&self) -> Self::Elem {
        (self.0.identity(), self.1.identity())
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (self.0.mul(&a.0, &b.0), self.1.mul(&a.1, &b.1))
    }
    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        (self.0.inv(&a.0), self.1.inv(&a.1))
    }
    fn format(&self, a: &Self::Elem) -> String {
        format!("({}, {})", self.0.format(&a.0), self.1.format(&a.1))
    }
}

/// How the source group moves points: `read(g, ω(g,x), x, c) = (g·x)_c`.
pub trait PointMover<C, E>: Send + Sync {
    fn read(&self, g: &Word, omega: &E, x: &dyn Field<C>, c: &C) -> Result<u32>;
    fn alphabet(&self) -> u32;
}

/// The source group acts through an [`Action`] of its own.
pub struct ViaAction<A>(pub A);

impl<A: Action<Elem = Word>, E> PointMover<A::Coord, E> for ViaAction<A> {
    fn read(&self, g: &Word, _: &E, x: &dyn Field<A::Coord>, c: &A::Coord) -> Result<u32> {
        self.0.read(g, x, c)
    }
    fn alphabet(&self) -> u32 {
        self.0.alphabet()
    }
}

/// Cocycle action `g*x = ω(g,x)·x` through an action of the target group.
pub struct Star<A>(pub A);

impl<A: Action> PointMover<A::Coord, A::Elem> for Star<A> {
    fn read(&self, _: &Word, omega: &A::Elem, x: &dyn Field<A::Coord>, c: &A::Coord) -> Result<u32> {
        self.0.read(omega, x, c)
    }
    fn alphabet(&self) -> u32 {
        self.0.alphabet()
    }
}

/// The point `g·x` for the source action of a cocycle.
pub struct Moved<'b, C, E> {
    mover: &'b dyn PointMover<C, E>,
    g: Word,
    omega: E,
    inner: &'b dyn Field<C>,
}

impl<C, E> Field<C> for Moved<'_, C, E> {
    fn value(&self, c: &C) -> Result<u32> {
        self.mover.read(&self.g, &self.omega, self.inner, c)
    }
    fn alphabet(&self) -> u32 {
        self.mover.alphabet()
    }
}

pub type LetterFn<'a, C, E> = Box<dyn Fn(&dyn Field<C>) -> Result<E> + Send + Sync + 'a>;

/// A cocycle `Γ × X → T` given by its values on the letters of `Γ`.
pub struct Cocycle<'a, C, T: TargetGroup> {
    pub source: GroupSpec,
    pub target: T,
    pub mover: Arc<dyn PointMover<C, T::Elem> + 'a>,
    table: BTreeMap<Word, LetterFn<'a, C, T::Elem>>,
}

impl<'a, C: Coordinate, T: TargetGroup> Cocycle<'a, C, T> {
    pub fn new(source: GroupSpec, target: T, mover: Arc<dyn PointMover<C, T::Elem> + 'a>) -> Self {
        Cocycle { source, target, mover, table: BTreeMap::new() }
    }

    /// Registers `ω(letter, ·)`. Both `t` and `t^-1` are needed for ℤ factors.
    pub fn set(&mut self, letter: &Word, f: impl Fn(&dyn Field<C>) -> Result<T::Elem> + Send + Sync + 'a) -> Result<()> {
        if !self.source.letters().contains(letter) {
            return Err(Error::Precondition(format!("{} is not a letter", self.source.format(letter))));
        }
        self.table.insert(letter.clone(), Box::new(f));
        Ok(())
    }

    pub fn letters(&self) -> impl Iterator<Item = &Word> {
        self.table.keys()
    }

    /// `ω(letter, x)`.
    pub fn letter_value(&self, letter: &Word, x: &dyn Field<C>) -> Result<T::Elem> {
        let f = self
            .table
            .get(letter)
            .ok_or_else(|| Error::Precondition(format!("no value registered for {}", self.source.format(letter))))?;
        f(x)
    }

    /// `ω(g, x)` by the cocycle identity along the spelling of `g`.
    pub fn evaluate(&self, g: &Word, x: &dyn Field<C>) -> Result<T::Elem> {
        Ok(self.walk(g, x)?.1)
    }

    fn walk(&self, g: &Word, x: &dyn Field<C>) -> Result<(Word, T::Elem)> {
        let mut suffix = Word::identity();
        let mut acc = self.target.identity();
        for l in self.source.spell(g).iter().rev() {
            let here = Moved { mover: &*self.mover, g: suffix.clone(), omega: acc.clone(), inner: x };
            let w = self.letter_value(l, &here)?;
            acc = self.target.mul(&w, &acc);
            suffix = self.source.mul(l, &suffix);
        }
        Ok((suffix, acc))
    }

    /// The point `g·x` of the source action.
    pub fn act<'b>(&'b self, g: &Word, x: &'b dyn Field<C>) -> Result<Moved<'b, C, T::Elem>> {
        let (g, omega) = self.walk(g, x)?;
        Ok(Moved { mover: &*self.mover, g, omega, inner: x })
    }

    /// Cohomologous cocycle `φ(g·x) ω(g,x) φ(x)^-1` over the same source
    /// action.
    pub fn cohomology_transform<'s>(
        &'s self,
        phi: impl Fn(&dyn Field<C>) -> Result<T::Elem> + Send + Sync + 's,
    ) -> Cocycle<'s, C, T>
    where
        T: Clone,
        'a: 's,
    {
        let phi = Arc::new(phi);
        let mut out = Cocycle::new(self.source.clone(), self.target.clone(), Arc::new(Through(self)));
        for l in self.table.keys() {
            let (l2, phi) = (l.clone(), phi.clone());
            let f = move |x: &dyn Field<C>| -> Result<T::Elem> {
                let gx = self.act(&l2, x)?;
                let w = self.letter_value(&l2, x)?;
                Ok(self.target.mul(&self.target.mul(&phi(&gx)?, &w), &self.target.inv(&phi(x)?)))
            };
            out.table.insert(l.clone(), Box::new(f));
        }
        out
    }
}

/// Source action of an existing cocycle, for derived cocycles.
struct Through<'a, C, T: TargetGroup>(&'a Cocycle<'a, C, T>);

impl<C: Coordinate, T: TargetGroup> PointMover<C, T::Elem> for Through<'_, C, T> {
    fn read(&self, g: &Word, _: &T::Elem, x: &dyn Field<C>, c: &C) -> Result<u32> {
        self.0.act(g, x)?.value(c)
    }
    fn alphabet(&self) -> u32 {
        self.0.mover.alphabet()
    }
}

/// Cocycle `ω(g, x) = π(g)` of a homomorphism given on letters.
pub fn homomorphism_cocycle<'a, C: Coordinate, T: TargetGroup>(
    source: GroupSpec,
    target: T,
    mover: Arc<dyn PointMover<C, T::Elem> + 'a>,
    image: impl Fn(&Word) -> T::Elem,
) -> Result<Cocycle<'a, C, T>> {
    let mut c = Cocycle::new(source.clone(), target, mover);
    for l in source.letters() {
        let v = image(&l);
        c.set(&l, move |_: &dyn Field<C>| Ok(v.clone()))?;
    }
    Ok(c)
}

/// The unique cocycle on `Γ_1 * Γ_2` restricting to `c1` and `c2`. The
/// glued source group is `source`, whose factors are those of `Γ_1`
/// followed by those of `Γ_2`.
pub fn glue_free_product<'a, C: Coordinate, T: TargetGroup + PartialEq>(
    c1: Cocycle<'a, C, T>,
    c2: Cocycle<'a, C, T>,
    source: GroupSpec,
    mover: Arc<dyn PointMover<C, T::Elem> + 'a>,
) -> Result<Cocycle<'a, C, T>> {
    if c1.target != c2.target {
        return Err(Error::Mismatch("cocycles take values in different groups".into()));
    }
    let offset = c1.source.factors().len();
    if source.factors().len() != offset + c2.source.factors().len() {
        return Err(Error::Mismatch("glued group is not the free product of the two sources".into()));
    }
    let mut out = Cocycle::new(source, c1.target, mover);
    for (l, f) in c1.table {
        let l = out.source.embed(&l, 0)?;
        out.table.insert(l, f);
    }
    for (l, f) in c2.table {
        let l = out.source.embed(&l, offset)?;
        out.table.insert(l, f);
    }
    Ok(out)
}

/// The unique `w` among `candidates` with `w·a` equal to `b` on `compare`.
pub fn solve_translation<B: Action>(
    action: &B,
    candidates: &[B::Elem],
    compare: &[B::Coord],
    a: &dyn Field<B::Coord>,
    b: &dyn Field<B::Coord>,
) -> Result<B::Elem> {
    let target: Vec<u32> = compare.iter().map(|c| b.value(c)).collect::<Result<_>>()?;
    let mut found: Option<B::Elem> = None;
    for w in candidates {
        let wa = action.apply(w, a);
        let mut same = true;
        for (c, t) in compare.iter().zip(&target) {
            if wa.value(c)? != *t {
                same = false;
                break;
            }
        }
        if same {
            if let Some(prev) = &found {
                return Err(Error::Ambiguous(format!("{prev:?} and {w:?} both match on the comparison window")));
            }
            found = Some(w.clone());
        }
    }
    found.ok_or_else(|| Error::NoSolution("no candidate matches on the comparison window".into()))
}

/// Zimmer cocycle of `Δ`: `Δ(l·x) = ω(l,x)·Δ(x)` solved letter by letter,
/// where `Δ` materializes the image point (composed with a projection `p`
/// in the stable case). Solutions are searched in `candidates` and must be
/// unique on `compare`.
pub fn zimmer_from_oe<'a, A, B>(
    source: &'a A,
    source_group: GroupSpec,
    target: &'a B,
    target_group: GroupSpec,
    delta: &'a (dyn Fn(&dyn Field<A::Coord>) -> Result<Configuration<B::Coord>> + Sync),
    candidates: Vec<Word>,
    compare: Vec<B::Coord>,
) -> Result<Cocycle<'a, A::Coord, GroupSpec>>
where
    A: Action<Elem = Word> + Clone + 'a,
    B: Action<Elem = Word>,
{
    let mut c = Cocycle::new(source_group.clone(), target_group, Arc::new(ViaAction(source.clone())));
    let candidates = Arc::new(candidates);
    let compare = Arc::new(compare);
    for l in source_group.letters() {
        let (l2, cands, cmp) = (l.clone(), candidates.clone(), compare.clone());
        c.set(&l, move |x: &dyn Field<A::Coord>| {
            let dx = delta(x)?;
            let dgx = delta(&source.apply(&l2, x))?;
            solve_translation(target, &cands, &cmp, &dx, &dgx)
        })?;
    }
    Ok(c)
}

/// Words `(g, h)` with `|g| + |h| ≤ combined`.
pub fn word_pairs(group: &GroupSpec, combined: u64) -> Result<Vec<(Word, Word)>> {
    let ball = group.ball(combined, &Length::Word, None)?;
    let mut out = Vec::new();
    for g in &ball {
        for h in &ball {
            if group.length(g, &Length::Word) + group.length(h, &Length::Word) <= combined {
                out.push((g.clone(), h.clone()));
            }
        }
    }
    Ok(out)
}

/// A point handed to the verifiers, which evaluate points in parallel.
pub type SyncField<'a, C> = &'a (dyn Field<C> + Sync);

/// Outcome of one comparison: `None` if it matched, a message otherwise.
type Probe = Result<Option<String>>;

/// Runs `probe` over every point and item in parallel and folds the results
/// in point order: the first mismatch becomes the counterexample, and
/// undetermined evaluations are counted.
fn fold_probes<C, I: Sync>(
    report: &mut VerificationReport,
    points: &[SyncField<'_, C>],
    items: &[I],
    probe: impl Fn(&dyn Field<C>, &I) -> Probe + Sync,
) -> Result<(u64, u64)> {
    let per_point: Vec<Vec<Probe>> =
        points.par_iter().map(|x| items.iter().map(|it| probe(*x as &dyn Field<C>, it)).collect()).collect();
    let (mut checked, mut skipped) = (0u64, 0u64);
    for (i, results) in per_point.into_iter().enumerate() {
        for r in results {
            match r {
                Ok(None) => checked += 1,
                Ok(Some(msg)) => {
                    report.fail(format!("point {i}: {msg}"));
                    return Ok((checked, skipped));
                }
                Err(e) if e.is_undetermined() => skipped += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok((checked, skipped))
}

/// Checks `ω(gh, x) = ω(g, h·x) ω(h, x)` at every pair of words with
/// combined length `≤ combined` and every point. Triples whose evaluation
/// is undetermined are skipped and counted.
pub fn verify_identity<C: Coordinate, T: TargetGroup>(
    c: &Cocycle<'_, C, T>,
    points: &[SyncField<'_, C>],
    combined: u64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("cocycle-identity", Mode::Exact)
        .param("combined-length", combined)
        .param("points", points.len());
    let pairs = word_pairs(&c.source, combined)?;
    let (checked, skipped) = fold_probes(&mut report, points, &pairs, |x, (g, h)| {
        let l = c.evaluate(&c.source.mul(g, h), x)?;
        let hx = c.act(h, x)?;
        let r = c.target.mul(&c.evaluate(g, &hx)?, &c.evaluate(h, x)?);
        Ok((l != r).then(|| {
            format!(
                "g = {}, h = {}: ω(gh,x) = {}, ω(g,h·x)ω(h,x) = {}",
                c.source.format(g),
                c.source.format(h),
                c.target.format(&l),
                c.target.format(&r)
            )
        }))
    })?;
    report.stat("triples-checked", Stat::Count(checked));
    report.stat("triples-undetermined", Stat::Count(skipped));
    if checked == 0 && report.passed() {
        report.undetermined("every triple was undetermined");
    }
    Ok(report)
}

/// Checks `ω′(ω(g,x), x) = g` for `|g| ≤ radius` and, when lengths are
/// supplied, `|ω(g,x)| = |g|`.
pub fn verify_inverse_pair<C: Coordinate>(
    c: &Cocycle<'_, C, GroupSpec>,
    c_inv: &Cocycle<'_, C, GroupSpec>,
    points: &[SyncField<'_, C>],
    radius: u64,
    lengths: Option<(&Length, &Length)>,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("inverse-pair", Mode::Exact)
        .param("radius", radius)
        .param("points", points.len());
    let ball = c.source.ball(radius, &Length::Word, None)?;
    let (checked, skipped) = fold_probes(&mut report, points, &ball, |x, g| {
        let w = c.evaluate(g, x)?;
        let back = c_inv.evaluate(&w, x)?;
        if back != *g {
            return Ok(Some(format!(
                "ω({}) = {}, ω′ of that = {}",
                c.source.format(g),
                c.target.format(&w),
                c.source.format(&back)
            )));
        }
        if let Some((ls, lt)) = lengths {
            let (a, b) = (c.source.length(g, ls), c.target.length(&w, lt));
            if a != b {
                return Ok(Some(format!("|{}| = {a} but |ω| = |{}| = {b}", c.source.format(g), c.target.format(&w))));
            }
        }
        Ok(None)
    })?;
    report.stat("elements-checked", Stat::Count(checked));
    report.stat("elements-undetermined", Stat::Count(skipped));
    if checked == 0 && report.passed() {
        report.undetermined("every evaluation was undetermined");
    }
    Ok(report)
}
