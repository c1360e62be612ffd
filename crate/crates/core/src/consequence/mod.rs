//! Bounded decision procedures for local and global consequence.
//!
//! Every search walks frames in canonical order (size, relation mask), then
//! valuations in bitmask order over the sorted atom list, then worlds by id.
//! Frames are scored in parallel chunks and the chunk results are scanned in
//! order, so the first refutation found is the canonical one whatever the
//! number of worker threads.

mod enumerate;
mod table;

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::domain::DomainModel;
use crate::frameprops::FrameClass;
use crate::kripke::{eval, Frame, Model, World, WorldSet, MAX_WORLDS};
use crate::syntax::Formula;
use crate::update::UpdateModel;

pub use enumerate::{
    enumerate_frames, enumerate_valuations, enumerate_valuations_on, enumerate_world_sets,
    iso_canonical_mask, valuation_count, valuation_from_code,
};
pub use table::{Entry, Profile, ProfileTable, MAX_TABLE_FORMULAS};
pub(crate) use table::Unit;

/// Largest number of valuation bits (atoms times worlds) a sweep accepts.
pub const MAX_VALUATION_BITS: usize = 32;

const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBound {
    pub max_worlds: usize,
    /// Extra atoms added to every valuation sweep.
    pub atoms: Vec<String>,
    pub dedup_isomorphic: bool,
}

impl SearchBound {
    pub fn new(max_worlds: usize) -> SearchBound {
        SearchBound {
            max_worlds,
            atoms: Vec::new(),
            dedup_isomorphic: false,
        }
    }

    pub fn with_atoms<S: Into<String>>(mut self, atoms: impl IntoIterator<Item = S>) -> SearchBound {
        self.atoms.extend(atoms.into_iter().map(Into::into));
        self
    }

    pub fn dedup(mut self, on: bool) -> SearchBound {
        self.dedup_isomorphic = on;
        self
    }

    pub(crate) fn validate(&self) -> Result<(), SearchError> {
        if self.max_worlds == 0 {
            return Err(SearchError::ZeroBound);
        }
        if self.max_worlds > MAX_WORLDS {
            return Err(SearchError::BoundTooLarge(self.max_worlds));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("max_worlds must be at least 1")]
    ZeroBound,
    #[error("max_worlds {0} exceeds the supported maximum of {MAX_WORLDS}")]
    BoundTooLarge(usize),
    #[error("{atoms} atoms over {worlds} worlds is too many valuation bits (limit {MAX_VALUATION_BITS})")]
    TooManyValuations { atoms: usize, worlds: usize },
    #[error("profile table holds at most {MAX_TABLE_FORMULAS} formulas, got {0}")]
    TableTooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Holds,
    Refuted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A Kripke model; local refutations name a world, global ones do not.
    Relational { model: Model, world: Option<World> },
    Informational { model: DomainModel, state: WorldSet },
    Update { model: UpdateModel, state: WorldSet },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// Frames (or world sets) visited, up to and including the witness.
    pub frames: u64,
    /// Models visited, up to and including the witness.
    pub models: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    pub stats: Stats,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }

    /// Same outcome and witness; statistics are ignored.
    pub fn same_answer(&self, other: &Verdict) -> bool {
        self.outcome == other.outcome && self.witness == other.witness
    }

    pub(crate) fn from_search(found: Search<Witness>, started: Instant) -> Verdict {
        let stats = Stats {
            frames: found.frames,
            models: found.models,
            elapsed_ms: started.elapsed().as_millis() as u64,
        };
        match found.hit {
            Some(w) => Verdict {
                outcome: Outcome::Refuted,
                witness: Some(w),
                stats,
            },
            None => Verdict {
                outcome: Outcome::Holds,
                witness: None,
                stats,
            },
        }
    }
}

/// Result of scanning one frame or world set.
pub(crate) struct Scan<T> {
    /// Models examined, up to and including the hit.
    pub models: u64,
    pub hit: Option<T>,
}

pub(crate) struct Search<T> {
    pub frames: u64,
    pub models: u64,
    pub hit: Option<T>,
}

/// First hit of `scan` over `items` in iteration order, scanning chunks in parallel.
pub(crate) fn first_hit<I, T, F>(items: I, scan: F) -> Search<T>
where
    I: Iterator,
    I::Item: Send + Sync,
    T: Send,
    F: Fn(&I::Item) -> Scan<T> + Sync,
{
    let mut items = items.peekable();
    let mut out = Search {
        frames: 0,
        models: 0,
        hit: None,
    };
    while items.peek().is_some() {
        let chunk: Vec<I::Item> = items.by_ref().take(CHUNK).collect();
        let scans: Vec<Scan<T>> = chunk.par_iter().map(&scan).collect();
        for s in scans {
            out.frames += 1;
            out.models += s.models;
            if s.hit.is_some() {
                out.hit = s.hit;
                return out;
            }
        }
    }
    out
}

/// Sorted union of the query's atoms and the bound's extra atoms.
pub fn query_atoms<'a>(
    formulas: impl IntoIterator<Item = &'a Formula>,
    bound: &SearchBound,
) -> Vec<String> {
    let mut set: BTreeSet<String> = bound.atoms.iter().cloned().collect();
    for f in formulas {
        f.collect_atoms(&mut set);
    }
    set.into_iter().collect()
}

pub(crate) fn check_valuation_bits(atoms: &[String], worlds: usize) -> Result<(), SearchError> {
    if atoms.len() * worlds > MAX_VALUATION_BITS {
        return Err(SearchError::TooManyValuations {
            atoms: atoms.len(),
            worlds,
        });
    }
    Ok(())
}

fn premise_truth(m: &Model, dom: WorldSet, premises: &[Formula]) -> WorldSet {
    let mut ok = dom;
    for p in premises {
        if ok.is_empty() {
            break;
        }
        ok = ok.intersect(eval(m, dom, p));
    }
    ok
}

fn sweep<F>(
    premises: &[Formula],
    conclusion: &Formula,
    c: &FrameClass,
    b: &SearchBound,
    refute: F,
) -> Result<Verdict, SearchError>
where
    F: Fn(&Model) -> Option<Option<World>> + Sync,
{
    b.validate()?;
    let started = Instant::now();
    let atoms = query_atoms(premises.iter().chain([conclusion]), b);
    check_valuation_bits(&atoms, b.max_worlds)?;
    let found = first_hit(enumerate_frames(b.max_worlds, c, b.dedup_isomorphic), |fr: &Frame| {
        let count = valuation_count(fr.worlds(), &atoms);
        for code in 0..count {
            let m = Model::from_parts_unchecked(*fr, valuation_from_code(fr.worlds(), &atoms, code));
            if let Some(world) = refute(&m) {
                return Scan {
                    models: code + 1,
                    hit: Some(Witness::Relational { model: m, world }),
                };
            }
        }
        Scan {
            models: count,
            hit: None,
        }
    });
    Ok(Verdict::from_search(found, started))
}

/// `premises ⊨ conclusion` over the frames of `c` within `b`.
pub fn local_consequence(
    premises: &[Formula],
    conclusion: &Formula,
    c: &FrameClass,
    b: &SearchBound,
) -> Result<Verdict, SearchError> {
    sweep(premises, conclusion, c, b, |m| {
        let dom = m.worlds();
        let bad = premise_truth(m, dom, premises).minus(eval(m, dom, conclusion));
        bad.min().map(Some)
    })
}

/// `premises ⊨^g conclusion` over the frames of `c` within `b`.
pub fn global_consequence(
    premises: &[Formula],
    conclusion: &Formula,
    c: &FrameClass,
    b: &SearchBound,
) -> Result<Verdict, SearchError> {
    sweep(premises, conclusion, c, b, |m| {
        let dom = m.worlds();
        let refuted = premises.iter().all(|p| eval(m, dom, p) == dom) && eval(m, dom, conclusion) != dom;
        refuted.then_some(None)
    })
}

pub fn box_set(g: &[Formula]) -> Vec<Formula> {
    g.iter().cloned().map(Formula::nec).collect()
}

/// `φ ∧ □φ` for each member.
pub fn box_r_set(g: &[Formula]) -> Vec<Formula> {
    g.iter()
        .map(|f| Formula::and(f.clone(), Formula::nec(f.clone())))
        .collect()
}

/// `⊞φ` for each member: the finite stand-in for all `□ⁿφ`.
pub fn box_omega_set(g: &[Formula]) -> Vec<Formula> {
    g.iter().cloned().map(Formula::box_plus).collect()
}

/// First of `p`, `p0`, `p1`, .. not in `taken`.
pub fn fresh_atom(taken: &BTreeSet<String>) -> String {
    std::iter::once("p".to_string())
        .chain((0..).map(|i| format!("p{i}")))
        .find(|a| !taken.contains(a))
        .expect("an unused name always exists")
}

/// Turns a local query into a global one: `({E O p} ∪ {p → γ}, p → φ)` with `p` fresh.
pub fn venema_localization(premises: &[Formula], conclusion: &Formula) -> (Vec<Formula>, Formula) {
    let mut taken = BTreeSet::new();
    for f in premises.iter().chain([conclusion]) {
        f.collect_atoms(&mut taken);
    }
    let p = Formula::atom(fresh_atom(&taken));
    let mut out = vec![Formula::exist(Formula::only(p.clone()))];
    out.extend(premises.iter().map(|g| Formula::implies(p.clone(), g.clone())));
    (out, Formula::implies(p, conclusion.clone()))
}
