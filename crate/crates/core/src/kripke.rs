//! Finite frames and models, satisfaction, and model surgery.
//!
//! Worlds are small integers below [`MAX_WORLDS`]; sets of worlds are
//! bitmasks and a relation is one successor bitmask per world. A frame or
//! model carries its own world set, so surgery (generated submodels,
//! relativization) keeps world ids stable instead of renumbering.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::Formula;

/// Upper bound on world ids; relations fit a 64-bit mask.
pub const MAX_WORLDS: usize = 8;

pub type World = usize;

/// A set of worlds as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WorldSet(u32);

impl WorldSet {
    pub const EMPTY: WorldSet = WorldSet(0);

    pub const fn from_bits(bits: u32) -> WorldSet {
        WorldSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// `{0, .., n-1}`.
    pub fn first(n: usize) -> WorldSet {
        debug_assert!(n <= MAX_WORLDS);
        WorldSet(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(w: World) -> WorldSet {
        WorldSet(1 << w)
    }

    pub fn contains(self, w: World) -> bool {
        w < 32 && self.0 & (1 << w) != 0
    }

    pub fn insert(&mut self, w: World) {
        self.0 |= 1 << w;
    }

    pub fn remove(&mut self, w: World) {
        self.0 &= !(1 << w);
    }

    pub fn with(self, w: World) -> WorldSet {
        WorldSet(self.0 | (1 << w))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: WorldSet) -> WorldSet {
        WorldSet(self.0 | other.0)
    }

    pub fn intersect(self, other: WorldSet) -> WorldSet {
        WorldSet(self.0 & other.0)
    }

    pub fn minus(self, other: WorldSet) -> WorldSet {
        WorldSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: WorldSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest member.
    pub fn min(self) -> Option<World> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as World)
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = World> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let w = bits.trailing_zeros() as World;
                bits &= bits - 1;
                Some(w)
            }
        })
    }

    /// Every subset, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = WorldSet> {
        let members: Vec<World> = self.iter().collect();
        (0u32..1 << members.len()).map(move |code| {
            let mut s = WorldSet::EMPTY;
            for (k, &w) in members.iter().enumerate() {
                if code & (1 << k) != 0 {
                    s.insert(w);
                }
            }
            s
        })
    }

    /// Position of `w` among the members, if present.
    pub fn rank(self, w: World) -> Option<usize> {
        self.contains(w)
            .then(|| (self.0 & ((1u32 << w) - 1)).count_ones() as usize)
    }
}

impl FromIterator<World> for WorldSet {
    fn from_iter<I: IntoIterator<Item = World>>(iter: I) -> Self {
        let mut s = WorldSet::EMPTY;
        for w in iter {
            s.insert(w);
        }
        s
    }
}

impl fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A binary relation on worlds, stored as successor rows.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Relation {
    rows: [WorldSet; MAX_WORLDS],
}

impl Relation {
    pub fn empty() -> Relation {
        Relation::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (World, World)>) -> Relation {
        let mut r = Relation::empty();
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    pub fn identity(ws: WorldSet) -> Relation {
        Relation::from_pairs(ws.iter().map(|w| (w, w)))
    }

    /// `ws × ws`.
    pub fn total(ws: WorldSet) -> Relation {
        let mut r = Relation::empty();
        for w in ws.iter() {
            r.rows[w] = ws;
        }
        r
    }

    pub fn contains(&self, a: World, b: World) -> bool {
        a < MAX_WORLDS && self.rows[a].contains(b)
    }

    pub fn insert(&mut self, a: World, b: World) {
        self.rows[a].insert(b);
    }

    /// Successors of `w`.
    pub fn successors(&self, w: World) -> WorldSet {
        self.rows[w]
    }

    /// Predecessors of `w`.
    pub fn predecessors(&self, w: World) -> WorldSet {
        (0..MAX_WORLDS).filter(|&v| self.rows[v].contains(w)).collect()
    }

    /// Worlds mentioned by some pair.
    pub fn field(&self) -> WorldSet {
        let mut s = WorldSet::EMPTY;
        for (w, row) in self.rows.iter().enumerate() {
            if !row.is_empty() {
                s = s.with(w).union(*row);
            }
        }
        s
    }

    pub fn restrict(&self, ws: WorldSet) -> Relation {
        let mut r = Relation::empty();
        for w in ws.iter() {
            r.rows[w] = self.rows[w].intersect(ws);
        }
        r
    }

    pub fn union(&self, other: &Relation) -> Relation {
        let mut r = *self;
        for w in 0..MAX_WORLDS {
            r.rows[w] = r.rows[w].union(other.rows[w]);
        }
        r
    }

    /// `self ∘ other`: pairs `(a, c)` with `a self b` and `b other c`.
    pub fn compose(&self, other: &Relation) -> Relation {
        let mut r = Relation::empty();
        for a in 0..MAX_WORLDS {
            let mut row = WorldSet::EMPTY;
            for b in self.rows[a].iter() {
                row = row.union(other.rows[b]);
            }
            r.rows[a] = row;
        }
        r
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows
            .iter()
            .zip(other.rows.iter())
            .all(|(a, b)| a.is_subset(*b))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (World, World)> + '_ {
        (0..MAX_WORLDS).flat_map(move |a| self.rows[a].iter().map(move |b| (a, b)))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// The least reflexive and transitive relation on `ws` containing `r`.
///
/// Iterates `C := C ∪ C∘C` from `id ∪ r` until nothing changes.
pub fn reflexive_transitive_closure(r: &Relation, ws: WorldSet) -> Relation {
    let mut closure = Relation::identity(ws).union(&r.restrict(ws));
    loop {
        let next = closure.union(&closure.compose(&closure));
        if next == closure {
            return closure;
        }
        closure = next;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("world {0} is not in the model")]
    WorldOutOfRange(World),
    #[error("at most {MAX_WORLDS} worlds are supported, got {0}")]
    TooManyWorlds(usize),
    #[error("a frame needs at least one world")]
    NoWorlds,
    #[error("relation pair ({0}, {1}) leaves the world set")]
    PairOutOfRange(World, World),
    #[error("valuation of `{0}` leaves the world set")]
    ValuationOutOfRange(String),
    #[error("world {0} is reflexive; point extension needs an irreflexive point")]
    ReflexivePoint(World),
    #[error("fresh world {0} already belongs to the frame")]
    FreshCollides(World),
}

/// A frame `(W, R)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frame {
    worlds: WorldSet,
    relation: Relation,
}

impl Frame {
    /// A frame on `{0, .., n-1}`.
    pub fn new(
        n: usize,
        pairs: impl IntoIterator<Item = (World, World)>,
    ) -> Result<Frame, ModelError> {
        if n > MAX_WORLDS {
            return Err(ModelError::TooManyWorlds(n));
        }
        Frame::on(WorldSet::first(n), Relation::from_checked(pairs)?)
    }

    /// A frame on an arbitrary nonempty world set.
    pub fn on(worlds: WorldSet, relation: Relation) -> Result<Frame, ModelError> {
        if worlds.is_empty() {
            return Err(ModelError::NoWorlds);
        }
        if let Some((a, b)) = relation
            .pairs()
            .find(|&(a, b)| !worlds.contains(a) || !worlds.contains(b))
        {
            return Err(ModelError::PairOutOfRange(a, b));
        }
        Ok(Frame { worlds, relation })
    }

    /// Frame on `{0, .., n-1}` whose pair `(i, j)` is bit `i*n + j` of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Frame {
        let mut relation = Relation::empty();
        for i in 0..n {
            for j in 0..n {
                if mask & (1 << (i * n + j)) != 0 {
                    relation.insert(i, j);
                }
            }
        }
        Frame {
            worlds: WorldSet::first(n),
            relation,
        }
    }

    // Only used where the world set may legitimately be empty.
    pub(crate) fn unchecked(worlds: WorldSet, relation: Relation) -> Frame {
        Frame { worlds, relation }
    }

    pub fn worlds(&self) -> WorldSet {
        self.worlds
    }

    pub fn size(&self) -> usize {
        self.worlds.len()
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn related(&self, a: World, b: World) -> bool {
        self.relation.contains(a, b)
    }

    pub fn successors(&self, w: World) -> WorldSet {
        self.relation.successors(w)
    }

    /// Relation mask over dense world ranks; pair `(i, j)` of ranks is bit `i*n + j`.
    pub fn relation_mask(&self) -> u64 {
        let n = self.size();
        let mut mask = 0u64;
        for (a, b) in self.relation.pairs() {
            let (i, j) = (
                self.worlds.rank(a).unwrap_or(0),
                self.worlds.rank(b).unwrap_or(0),
            );
            mask |= 1 << (i * n + j);
        }
        mask
    }

    /// Canonical sort key: size first, then relation mask.
    pub fn canonical_key(&self) -> (usize, u64) {
        (self.size(), self.relation_mask())
    }

    /// Renumbers the worlds densely as `0..n` preserving their order.
    pub fn normalized(&self) -> Frame {
        Frame::from_mask(self.size(), self.relation_mask())
    }

    /// Subframe generated by `w`: everything reachable from it in zero or more steps.
    pub fn generated_by(&self, w: World) -> Result<Frame, ModelError> {
        if !self.worlds.contains(w) {
            return Err(ModelError::WorldOutOfRange(w));
        }
        let reach = reachable_from(&self.relation, self.worlds, w);
        Ok(Frame {
            worlds: reach,
            relation: self.relation.restrict(reach),
        })
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame({:?}, {:?})", self.worlds, self.relation)
    }
}

impl PartialOrd for Frame {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frame {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical_key()
            .cmp(&other.canonical_key())
            .then(self.worlds.cmp(&other.worlds))
    }
}

impl Relation {
    fn from_checked(pairs: impl IntoIterator<Item = (World, World)>) -> Result<Relation, ModelError> {
        let mut r = Relation::empty();
        for (a, b) in pairs {
            if a >= MAX_WORLDS || b >= MAX_WORLDS {
                return Err(ModelError::PairOutOfRange(a, b));
            }
            r.insert(a, b);
        }
        Ok(r)
    }
}

/// Worlds reachable from `w` inside `dom` in zero or more steps.
fn reachable_from(r: &Relation, dom: WorldSet, w: World) -> WorldSet {
    let mut seen = WorldSet::singleton(w).intersect(dom);
    let mut frontier = seen;
    while !frontier.is_empty() {
        let mut next = WorldSet::EMPTY;
        for v in frontier.iter() {
            next = next.union(r.successors(v));
        }
        let fresh = next.intersect(dom).minus(seen);
        seen = seen.union(fresh);
        frontier = fresh;
    }
    seen
}

/// Adds `fresh`, seeing `w` and every successor of `w`.
///
/// Defined only when `w` is irreflexive and `fresh` is new.
pub fn irreflexive_point_extension(
    fr: &Frame,
    w: World,
    fresh: World,
) -> Result<Frame, ModelError> {
    if !fr.worlds.contains(w) {
        return Err(ModelError::WorldOutOfRange(w));
    }
    if fr.related(w, w) {
        return Err(ModelError::ReflexivePoint(w));
    }
    if fresh >= MAX_WORLDS {
        return Err(ModelError::TooManyWorlds(fresh + 1));
    }
    if fr.worlds.contains(fresh) {
        return Err(ModelError::FreshCollides(fresh));
    }
    let mut relation = fr.relation;
    relation.insert(fresh, w);
    for v in fr.successors(w).iter() {
        relation.insert(fresh, v);
    }
    Ok(Frame {
        worlds: fr.worlds.with(fresh),
        relation,
    })
}

/// Atom name to the set of worlds where it holds; absent atoms hold nowhere.
pub type Valuation = BTreeMap<String, WorldSet>;

/// A model `(W, R, V)`. The world set is empty only for relativizations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Model {
    frame: Frame,
    valuation: Valuation,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Model({:?}, {:?}, {:?})",
            self.frame.worlds, self.frame.relation, self.valuation
        )
    }
}

impl Model {
    pub fn new(frame: Frame, valuation: Valuation) -> Result<Model, ModelError> {
        if let Some((p, _)) = valuation
            .iter()
            .find(|(_, s)| !s.is_subset(frame.worlds))
        {
            return Err(ModelError::ValuationOutOfRange(p.clone()));
        }
        Ok(Model { frame, valuation })
    }

    /// Model with an empty valuation.
    pub fn bare(frame: Frame) -> Model {
        Model {
            frame,
            valuation: Valuation::new(),
        }
    }

    pub(crate) fn from_parts_unchecked(frame: Frame, valuation: Valuation) -> Model {
        Model { frame, valuation }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn worlds(&self) -> WorldSet {
        self.frame.worlds
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    /// Where `p` holds.
    pub fn value(&self, p: &str) -> WorldSet {
        self.valuation.get(p).copied().unwrap_or_default()
    }

    /// Satisfaction at a world.
    pub fn satisfies(&self, w: World, f: &Formula) -> Result<bool, ModelError> {
        if !self.worlds().contains(w) {
            return Err(ModelError::WorldOutOfRange(w));
        }
        Ok(self.truth_set(f).contains(w))
    }

    /// Every world where `f` holds.
    pub fn truth_set(&self, f: &Formula) -> WorldSet {
        eval(self, self.worlds(), f)
    }

    /// Truth at every world.
    pub fn globally_true(&self, f: &Formula) -> bool {
        self.truth_set(f) == self.worlds()
    }

    /// Restriction to the worlds reachable from `w`.
    pub fn generated_submodel(&self, w: World) -> Result<Model, ModelError> {
        let frame = self.frame.generated_by(w)?;
        Ok(self.restricted(frame))
    }

    /// `M^f`: the submodel on the truth set of `f`. May have no worlds.
    pub fn relativize(&self, f: &Formula) -> Model {
        let keep = self.truth_set(f);
        let frame = Frame::unchecked(keep, self.frame.relation.restrict(keep));
        self.restricted(frame)
    }

    fn restricted(&self, frame: Frame) -> Model {
        let valuation = self
            .valuation
            .iter()
            .map(|(p, s)| (p.clone(), s.intersect(frame.worlds)))
            .collect();
        Model { frame, valuation }
    }

    /// Same valuation over a different frame; worlds outside the frame are dropped.
    pub fn with_frame(&self, frame: Frame) -> Model {
        self.restricted(frame)
    }
}

/// Truth set of `f` in the submodel of `m` carried by `dom`.
///
/// Evaluating relative to a carrier lets `;` and announcements relativize
/// by shrinking `dom` rather than building a new model.
pub(crate) fn eval(m: &Model, dom: WorldSet, f: &Formula) -> WorldSet {
    let rel = m.frame.relation();
    match f {
        Formula::Atom(p) => m.value(p).intersect(dom),
        Formula::Bottom => WorldSet::EMPTY,
        Formula::Not(a) => dom.minus(eval(m, dom, a)),
        Formula::And(a, b) => {
            let left = eval(m, dom, a);
            if left.is_empty() {
                left
            } else {
                left.intersect(eval(m, dom, b))
            }
        }
        Formula::Box(a) => {
            let inner = eval(m, dom, a);
            dom.iter()
                .filter(|&w| rel.successors(w).intersect(dom).is_subset(inner))
                .collect()
        }
        Formula::BoxPlus(a) => {
            let inner = eval(m, dom, a);
            dom.iter()
                .filter(|&w| reachable_from(rel, dom, w).is_subset(inner))
                .collect()
        }
        Formula::Univ(a) => {
            if eval(m, dom, a) == dom {
                dom
            } else {
                WorldSet::EMPTY
            }
        }
        Formula::Exist(a) => {
            if eval(m, dom, a).is_empty() {
                WorldSet::EMPTY
            } else {
                dom
            }
        }
        Formula::Only(a) => {
            let inner = eval(m, dom, a);
            if inner.len() == 1 {
                inner
            } else {
                WorldSet::EMPTY
            }
        }
        Formula::Seq(a, b) | Formula::Announce(a, b) => {
            let kept = eval(m, dom, a);
            eval(m, kept, b)
        }
        // Relational reading of `a => b` is `[]~(a;~b)`.
        Formula::Arrow(a, b) => {
            let kept = eval(m, dom, a);
            let counter = kept.minus(eval(m, kept, b));
            dom.iter()
                .filter(|&w| rel.successors(w).intersect(counter).is_empty())
                .collect()
        }
    }
}
