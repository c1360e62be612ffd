//! Profile tables: one sweep answering many queries over a fixed formula list.
//!
//! A point (a model for global consequence, a model and world for local
//! consequence, a model and state for the informational and update
//! semantics) is summarized by the set of table formulas it makes true.
//! Points with the same profile are interchangeable for every query over the
//! table, so only the first occurrence of each profile is kept. Since points
//! are visited in canonical order, the first stored profile that refutes a
//! query belongs to the canonical-first witness a direct search would find.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::Instant;

use rayon::prelude::*;

use super::{
    check_valuation_bits, enumerate_frames, query_atoms, valuation_count, valuation_from_code,
    Outcome, SearchBound, SearchError, Stats, Verdict, Witness,
};
use crate::frameprops::FrameClass;
use crate::kripke::{eval, Frame, Model};
use crate::syntax::Formula;

pub const MAX_TABLE_FORMULAS: usize = 256;

const CHUNK: usize = 256;

/// Bitset over table formula indices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Profile([u64; 4]);

impl Profile {
    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn covers(&self, other: &Profile) -> bool {
        self.0.iter().zip(other.0).all(|(a, b)| a & b == b)
    }

    pub fn of(ids: impl IntoIterator<Item = usize>) -> Profile {
        let mut p = Profile::default();
        for i in ids {
            p.insert(i);
        }
        p
    }
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub profile: Profile,
    pub witness: Witness,
    /// Position of the witness in the sweep, as reported in verdict stats.
    pub frames: u64,
    pub models: u64,
}

#[derive(Debug, Clone)]
pub struct ProfileTable {
    formulas: Vec<Formula>,
    index: HashMap<Formula, usize>,
    entries: Vec<Entry>,
    frames: u64,
    models: u64,
}

/// Points of one frame or world set, already deduplicated within it.
pub(crate) struct Unit {
    pub points: Vec<(Profile, Witness, u64)>,
    pub models: u64,
}

impl ProfileTable {
    /// Table for `⊨^g` over the frames of `c` within `b`.
    pub fn global(
        c: &FrameClass,
        b: &SearchBound,
        formulas: impl IntoIterator<Item = Formula>,
    ) -> Result<ProfileTable, SearchError> {
        relational(c, b, formulas, false)
    }

    /// Table for `⊨` over the frames of `c` within `b`.
    pub fn local(
        c: &FrameClass,
        b: &SearchBound,
        formulas: impl IntoIterator<Item = Formula>,
    ) -> Result<ProfileTable, SearchError> {
        relational(c, b, formulas, true)
    }

    pub(crate) fn dedup_formulas(
        formulas: impl IntoIterator<Item = Formula>,
    ) -> Result<(Vec<Formula>, HashMap<Formula, usize>), SearchError> {
        let mut list = Vec::new();
        let mut index = HashMap::new();
        for f in formulas {
            if !index.contains_key(&f) {
                index.insert(f.clone(), list.len());
                list.push(f);
            }
        }
        if list.len() > MAX_TABLE_FORMULAS {
            return Err(SearchError::TableTooLarge(list.len()));
        }
        Ok((list, index))
    }

    /// Merges per-unit points in order, keeping first occurrences.
    pub(crate) fn assemble<I, F>(
        formulas: Vec<Formula>,
        index: HashMap<Formula, usize>,
        units: I,
        scan: F,
    ) -> ProfileTable
    where
        I: Iterator,
        I::Item: Send + Sync,
        F: Fn(&I::Item) -> Unit + Sync,
    {
        let mut units = units.peekable();
        let mut seen: HashSet<Profile> = HashSet::new();
        let mut table = ProfileTable {
            formulas,
            index,
            entries: Vec::new(),
            frames: 0,
            models: 0,
        };
        while units.peek().is_some() {
            let chunk: Vec<I::Item> = units.by_ref().take(CHUNK).collect();
            let scanned: Vec<Unit> = chunk.par_iter().map(&scan).collect();
            for unit in scanned {
                table.frames += 1;
                for (profile, witness, model) in unit.points {
                    if seen.insert(profile) {
                        table.entries.push(Entry {
                            profile,
                            witness,
                            frames: table.frames,
                            models: table.models + model,
                        });
                    }
                }
                table.models += unit.models;
            }
        }
        table
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn id(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn ids(&self, fs: &[Formula]) -> Option<Vec<usize>> {
        fs.iter().map(|f| self.id(f)).collect()
    }

    /// First entry making every premise true and the conclusion false.
    pub fn refute(&self, premises: &Profile, conclusion: usize) -> Option<&Entry> {
        self.entries
            .iter()
            .find(|e| e.profile.covers(premises) && !e.profile.contains(conclusion))
    }

    pub fn holds(&self, premises: &[usize], conclusion: usize) -> bool {
        self.refute(&Profile::of(premises.iter().copied()), conclusion)
            .is_none()
    }

    /// Full verdict; `None` when a formula is missing from the table.
    pub fn verdict(&self, premises: &[Formula], conclusion: &Formula) -> Option<Verdict> {
        let started = Instant::now();
        let prem = Profile::of(self.ids(premises)?);
        let c = self.id(conclusion)?;
        let v = match self.refute(&prem, c) {
            Some(e) => Verdict {
                outcome: Outcome::Refuted,
                witness: Some(e.witness.clone()),
                stats: Stats {
                    frames: e.frames,
                    models: e.models,
                    elapsed_ms: 0,
                },
            },
            None => Verdict {
                outcome: Outcome::Holds,
                witness: None,
                stats: Stats {
                    frames: self.frames,
                    models: self.models,
                    elapsed_ms: 0,
                },
            },
        };
        Some(Verdict {
            stats: Stats {
                elapsed_ms: started.elapsed().as_millis() as u64,
                ..v.stats
            },
            ..v
        })
    }
}

fn relational(
    c: &FrameClass,
    b: &SearchBound,
    formulas: impl IntoIterator<Item = Formula>,
    local: bool,
) -> Result<ProfileTable, SearchError> {
    b.validate()?;
    let (formulas, index) = ProfileTable::dedup_formulas(formulas)?;
    let atoms = query_atoms(&formulas, b);
    check_valuation_bits(&atoms, b.max_worlds)?;
    let frames = enumerate_frames(b.max_worlds, c, b.dedup_isomorphic);
    let scan = |fr: &Frame| {
        let count = valuation_count(fr.worlds(), &atoms);
        let mut local_seen = BTreeSet::new();
        let mut points = Vec::new();
        for code in 0..count {
            let m = Model::from_parts_unchecked(*fr, valuation_from_code(fr.worlds(), &atoms, code));
            let dom = m.worlds();
            let truth: Vec<_> = formulas.iter().map(|f| eval(&m, dom, f)).collect();
            if local {
                for w in dom.iter() {
                    let p = Profile::of((0..truth.len()).filter(|&i| truth[i].contains(w)));
                    if local_seen.insert(p.0) {
                        let witness = Witness::Relational {
                            model: m.clone(),
                            world: Some(w),
                        };
                        points.push((p, witness, code + 1));
                    }
                }
            } else {
                let p = Profile::of((0..truth.len()).filter(|&i| truth[i] == dom));
                if local_seen.insert(p.0) {
                    points.push((p, Witness::Relational { model: m, world: None }, code + 1));
                }
            }
        }
        Unit {
            points,
            models: count,
        }
    };
    let (formulas_out, index_out) = (formulas.clone(), index);
    Ok(ProfileTable::assemble(formulas_out, index_out, frames, scan))
}
