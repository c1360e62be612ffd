//! Update semantics: formulas as functions on information states.
//!
//! `s[φ]` is always a subset of `s`, and `s` supports `φ` when `s[φ] = s`.
//! The empty state is a fixpoint of every update, so it supports every
//! formula, `false` included. The conditional `=>` has its own clause here;
//! its agreement with `[]~(φ;~ψ)` is checked rather than assumed.

use std::time::Instant;

use thiserror::Error;

use crate::consequence::{
    check_valuation_bits, enumerate_world_sets, first_hit, query_atoms, valuation_count,
    valuation_from_code, Profile, ProfileTable, Scan, SearchBound, SearchError, Unit, Verdict,
    Witness,
};
use crate::domain::DomainModel;
use crate::kripke::{Frame, Model, ModelError, Relation, Valuation, WorldSet};
use crate::syntax::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UpdateError {
    #[error("update semantics does not support {0}")]
    Unsupported(&'static str),
    #[error("pal_reduce does not support {0}")]
    NotReducible(&'static str),
    #[error("state {0:?} is not contained in the model")]
    StateOutside(WorldSet),
    #[error("the state is empty")]
    EmptyState,
    #[error("expected a conditional φ => ψ")]
    NotArrow,
    #[error("the relation is not total on the model's worlds")]
    NotTotal,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateModel {
    worlds: WorldSet,
    valuation: Valuation,
}

impl UpdateModel {
    pub fn new(worlds: WorldSet, valuation: Valuation) -> Result<UpdateModel, UpdateError> {
        let checked = DomainModel::new(worlds, valuation).map_err(|e| match e {
            crate::domain::DomainError::Model(m) => UpdateError::Model(m),
            _ => UpdateError::Model(ModelError::NoWorlds),
        })?;
        Ok(UpdateModel {
            worlds: checked.worlds(),
            valuation: checked.valuation().clone(),
        })
    }

    pub(crate) fn unchecked(worlds: WorldSet, valuation: Valuation) -> UpdateModel {
        UpdateModel { worlds, valuation }
    }

    pub fn worlds(&self) -> WorldSet {
        self.worlds
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    pub fn value(&self, p: &str) -> WorldSet {
        self.valuation.get(p).copied().unwrap_or_default()
    }
}

fn dynamic_only(f: &Formula) -> Result<(), UpdateError> {
    let allowed = |g: &Formula| {
        !matches!(
            g,
            Formula::BoxPlus(_) | Formula::Univ(_) | Formula::Exist(_) | Formula::Only(_) | Formula::Announce(_, _)
        )
    };
    match f.first_unsupported(&allowed) {
        Some(op) => Err(UpdateError::Unsupported(op)),
        None => Ok(()),
    }
}

fn upd(u: &UpdateModel, s: WorldSet, f: &Formula) -> WorldSet {
    match f {
        Formula::Atom(p) => s.intersect(u.value(p)),
        Formula::Bottom => WorldSet::EMPTY,
        Formula::Not(a) => s.minus(upd(u, s, a)),
        Formula::And(a, b) => upd(u, s, a).intersect(upd(u, s, b)),
        Formula::Seq(a, b) => upd(u, upd(u, s, a), b),
        Formula::Box(a) => {
            if upd(u, s, a) == s {
                s
            } else {
                WorldSet::EMPTY
            }
        }
        Formula::Arrow(a, b) => {
            let t = upd(u, s, a);
            if upd(u, t, b) == t {
                s
            } else {
                WorldSet::EMPTY
            }
        }
        _ => unreachable!("fragment checked by the caller"),
    }
}

fn check_state(u: &UpdateModel, s: WorldSet) -> Result<(), UpdateError> {
    if s.is_subset(u.worlds) {
        Ok(())
    } else {
        Err(UpdateError::StateOutside(s))
    }
}

/// `s[f]`.
pub fn update(u: &UpdateModel, s: WorldSet, f: &Formula) -> Result<WorldSet, UpdateError> {
    dynamic_only(f)?;
    check_state(u, s)?;
    Ok(upd(u, s, f))
}

pub fn supports(u: &UpdateModel, s: WorldSet, f: &Formula) -> Result<bool, UpdateError> {
    Ok(update(u, s, f)? == s)
}

/// Whether `s[φ => ψ]` equals `s[[]~(φ;~ψ)]`.
pub fn arrow_definability_check(u: &UpdateModel, s: WorldSet, f: &Formula) -> Result<bool, UpdateError> {
    let Formula::Arrow(a, b) = f else {
        return Err(UpdateError::NotArrow);
    };
    let expanded = arrow_expansion(a, b);
    Ok(update(u, s, f)? == update(u, s, &expanded)?)
}

/// `[]~(φ;~ψ)`.
pub fn arrow_expansion(a: &Formula, b: &Formula) -> Formula {
    Formula::nec(Formula::not(Formula::seq(a.clone(), Formula::not(b.clone()))))
}

/// `M^s`: the universal model on `s` with the valuation cut down to `s`.
pub fn model_from_state(u: &UpdateModel, s: WorldSet) -> Result<Model, UpdateError> {
    if s.is_empty() {
        return Err(UpdateError::EmptyState);
    }
    check_state(u, s)?;
    let frame = Frame::on(s, Relation::total(s))?;
    let valuation = u
        .valuation
        .iter()
        .map(|(p, v)| (p.clone(), v.intersect(s)))
        .collect();
    Ok(Model::new(frame, valuation)?)
}

/// Forgets the relation of a model whose relation is total.
pub fn update_model_of(m: &Model) -> Result<(UpdateModel, WorldSet), UpdateError> {
    let w = m.worlds();
    if *m.frame().relation() != Relation::total(w) {
        return Err(UpdateError::NotTotal);
    }
    Ok((UpdateModel::unchecked(w, m.valuation().clone()), w))
}

/// Translation into announcements: `φ;ψ` becomes `<φ>ψ`, and `φ => ψ` goes through `[]~(φ;~ψ)`.
pub fn translate_pal(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::Bottom => f.clone(),
        Formula::Not(a) => Formula::not(translate_pal(a)),
        Formula::And(a, b) => Formula::and(translate_pal(a), translate_pal(b)),
        Formula::Box(a) => Formula::nec(translate_pal(a)),
        Formula::BoxPlus(a) => Formula::box_plus(translate_pal(a)),
        Formula::Univ(a) => Formula::univ(translate_pal(a)),
        Formula::Exist(a) => Formula::exist(translate_pal(a)),
        Formula::Only(a) => Formula::only(translate_pal(a)),
        Formula::Seq(a, b) | Formula::Announce(a, b) => Formula::announce(translate_pal(a), translate_pal(b)),
        Formula::Arrow(a, b) => translate_pal(&arrow_expansion(a, b)),
    }
}

/// Removes announcements with the reduction axioms, innermost first.
///
/// Both arguments of an announcement are reduced before the announcement
/// itself is pushed inward, so `announce` only ever recurses on the
/// announcement-free conclusion, whose size strictly drops at each step.
pub fn pal_reduce(f: &Formula) -> Result<Formula, UpdateError> {
    let allowed = |g: &Formula| {
        matches!(
            g,
            Formula::Atom(_)
                | Formula::Bottom
                | Formula::Not(_)
                | Formula::And(_, _)
                | Formula::Box(_)
                | Formula::Announce(_, _)
        )
    };
    if let Some(op) = f.first_unsupported(&allowed) {
        return Err(UpdateError::NotReducible(op));
    }
    Ok(reduce(f))
}

fn reduce(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::Bottom => f.clone(),
        Formula::Not(a) => Formula::not(reduce(a)),
        Formula::And(a, b) => Formula::and(reduce(a), reduce(b)),
        Formula::Box(a) => Formula::nec(reduce(a)),
        Formula::Announce(a, b) => announce(&reduce(a), &reduce(b)),
        _ => unreachable!("checked by pal_reduce"),
    }
}

/// `<a>b` for announcement-free `a` and `b`.
fn announce(a: &Formula, b: &Formula) -> Formula {
    match b {
        Formula::Atom(_) => Formula::and(a.clone(), b.clone()),
        Formula::Bottom => Formula::bottom(),
        Formula::Not(c) => Formula::and(a.clone(), Formula::not(announce(a, c))),
        Formula::And(c, d) => Formula::and(announce(a, c), announce(a, d)),
        Formula::Box(c) => Formula::and(
            a.clone(),
            Formula::nec(Formula::implies(a.clone(), announce(a, c))),
        ),
        _ => unreachable!("announcement-free by construction"),
    }
}

fn models_within(b: &SearchBound, formulas: &[&Formula]) -> Result<Vec<String>, UpdateError> {
    b.validate()?;
    for f in formulas {
        dynamic_only(f)?;
    }
    let atoms = query_atoms(formulas.iter().copied(), b);
    check_valuation_bits(&atoms, b.max_worlds)?;
    Ok(atoms)
}

/// Sweeps (model, state) pairs within `b`; `refutes(u, s)` selects witnesses.
fn sweep_states<F>(atoms: &[String], b: &SearchBound, refutes: F) -> Verdict
where
    F: Fn(&UpdateModel, WorldSet) -> bool + Sync,
{
    let started = Instant::now();
    let found = first_hit(enumerate_world_sets(b.max_worlds), |&ws: &WorldSet| {
        let count = valuation_count(ws, atoms);
        for code in 0..count {
            let u = UpdateModel::unchecked(ws, valuation_from_code(ws, atoms, code));
            if let Some(s) = ws.subsets().find(|&s| refutes(&u, s)) {
                return Scan {
                    models: code + 1,
                    hit: Some(Witness::Update { model: u, state: s }),
                };
            }
        }
        Scan { models: count, hit: None }
    });
    Verdict::from_search(found, started)
}

/// `premises ⊨_U conclusion` over update models within `b`.
pub fn update_consequence(
    premises: &[Formula],
    conclusion: &Formula,
    b: &SearchBound,
) -> Result<Verdict, UpdateError> {
    let all: Vec<&Formula> = premises.iter().chain([conclusion]).collect();
    let atoms = models_within(b, &all)?;
    Ok(sweep_states(&atoms, b, |u, s| {
        premises.iter().all(|p| upd(u, s, p) == s) && upd(u, s, conclusion) != s
    }))
}

/// `s[γ1]..[γn]` supports the conclusion for every model and state within `b`.
pub fn sequential_update_consequence(
    gammas: &[Formula],
    conclusion: &Formula,
    b: &SearchBound,
) -> Result<Verdict, UpdateError> {
    let all: Vec<&Formula> = gammas.iter().chain([conclusion]).collect();
    let atoms = models_within(b, &all)?;
    Ok(sweep_states(&atoms, b, |u, s| {
        let t = gammas.iter().fold(s, |t, g| upd(u, t, g));
        upd(u, t, conclusion) != t
    }))
}

/// Profile table for `⊨_U`: one point per (update model, state).
pub fn update_table(
    b: &SearchBound,
    formulas: impl IntoIterator<Item = Formula>,
) -> Result<ProfileTable, UpdateError> {
    let (list, index) = ProfileTable::dedup_formulas(formulas)?;
    let atoms = models_within(b, &list.iter().collect::<Vec<_>>())?;
    let scan = |&ws: &WorldSet| {
        let count = valuation_count(ws, &atoms);
        let mut seen = std::collections::HashSet::new();
        let mut points = Vec::new();
        for code in 0..count {
            let u = UpdateModel::unchecked(ws, valuation_from_code(ws, &atoms, code));
            for s in ws.subsets() {
                let p = Profile::of((0..list.len()).filter(|&k| upd(&u, s, &list[k]) == s));
                if seen.insert(p) {
                    points.push((p, Witness::Update { model: u.clone(), state: s }, code + 1));
                }
            }
        }
        Unit { points, models: count }
    };
    Ok(ProfileTable::assemble(list.clone(), index, enumerate_world_sets(b.max_worlds), scan))
}
