//! Domain semantics: formulas evaluated at a world together with an information state.
//!
//! Atoms and Booleans look only at the world; `□φ` holds at `(w, i)` when
//! every world of `i` satisfies `φ` relative to the same `i`. A state
//! supports a formula when each of its worlds satisfies it, so the empty
//! state supports everything.

use std::time::Instant;

use thiserror::Error;

use crate::consequence::{
    check_valuation_bits, enumerate_world_sets, first_hit, query_atoms, valuation_count,
    valuation_from_code, Profile, ProfileTable, Scan, SearchBound, SearchError, Unit, Verdict,
    Witness,
};
use crate::kripke::{Frame, Model, ModelError, Relation, Valuation, World, WorldSet};
use crate::syntax::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("informational semantics does not support {0}")]
    Unsupported(&'static str),
    #[error("world {0} is not in the model")]
    WorldOutside(World),
    #[error("information state {0:?} is not contained in the model")]
    StateOutside(WorldSet),
    #[error("the information state is empty")]
    EmptyState,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainModel {
    worlds: WorldSet,
    valuation: Valuation,
}

impl DomainModel {
    pub fn new(worlds: WorldSet, valuation: Valuation) -> Result<DomainModel, DomainError> {
        if worlds.is_empty() {
            return Err(ModelError::NoWorlds.into());
        }
        // Reuse the relational validity checks on a frame with no arrows.
        let fr = Frame::on(worlds, Relation::empty())?;
        Model::new(fr, valuation.clone())?;
        Ok(DomainModel { worlds, valuation })
    }

    pub(crate) fn unchecked(worlds: WorldSet, valuation: Valuation) -> DomainModel {
        DomainModel { worlds, valuation }
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

fn basic_only(f: &Formula) -> Result<(), DomainError> {
    let allowed = |g: &Formula| {
        matches!(
            g,
            Formula::Atom(_) | Formula::Bottom | Formula::Not(_) | Formula::And(_, _) | Formula::Box(_)
        )
    };
    match f.first_unsupported(&allowed) {
        Some(op) => Err(DomainError::Unsupported(op)),
        None => Ok(()),
    }
}

/// Worlds `w` with `d, w, i ⊩ f`.
fn eval(d: &DomainModel, i: WorldSet, f: &Formula) -> WorldSet {
    match f {
        Formula::Atom(p) => d.value(p),
        Formula::Bottom => WorldSet::EMPTY,
        Formula::Not(a) => d.worlds.minus(eval(d, i, a)),
        Formula::And(a, b) => eval(d, i, a).intersect(eval(d, i, b)),
        Formula::Box(a) => {
            if i.is_subset(eval(d, i, a)) {
                d.worlds
            } else {
                WorldSet::EMPTY
            }
        }
        _ => unreachable!("fragment checked by the caller"),
    }
}

fn check_state(d: &DomainModel, i: WorldSet) -> Result<(), DomainError> {
    if i.is_subset(d.worlds) {
        Ok(())
    } else {
        Err(DomainError::StateOutside(i))
    }
}

pub fn domain_satisfies(d: &DomainModel, w: World, i: WorldSet, f: &Formula) -> Result<bool, DomainError> {
    basic_only(f)?;
    check_state(d, i)?;
    if !d.worlds.contains(w) {
        return Err(DomainError::WorldOutside(w));
    }
    Ok(eval(d, i, f).contains(w))
}

pub fn info_supports(d: &DomainModel, i: WorldSet, f: &Formula) -> Result<bool, DomainError> {
    basic_only(f)?;
    check_state(d, i)?;
    Ok(i.is_subset(eval(d, i, f)))
}

/// The relational model on `i` with the total relation.
pub fn universal_model_of(d: &DomainModel, i: WorldSet) -> Result<Model, DomainError> {
    if i.is_empty() {
        return Err(DomainError::EmptyState);
    }
    check_state(d, i)?;
    let frame = Frame::on(i, Relation::total(i))?;
    let valuation = d
        .valuation
        .iter()
        .map(|(p, v)| (p.clone(), v.intersect(i)))
        .collect();
    Ok(Model::new(frame, valuation)?)
}

fn models_within(b: &SearchBound, formulas: &[&Formula]) -> Result<Vec<String>, DomainError> {
    b.validate()?;
    for f in formulas {
        basic_only(f)?;
    }
    let atoms = query_atoms(formulas.iter().copied(), b);
    check_valuation_bits(&atoms, b.max_worlds)?;
    Ok(atoms)
}

/// `premises ⊨_I conclusion` over domain models within `b`.
pub fn informational_consequence(
    premises: &[Formula],
    conclusion: &Formula,
    b: &SearchBound,
) -> Result<Verdict, DomainError> {
    let started = Instant::now();
    let all: Vec<&Formula> = premises.iter().chain([conclusion]).collect();
    let atoms = models_within(b, &all)?;
    let found = first_hit(enumerate_world_sets(b.max_worlds), |&ws: &WorldSet| {
        let count = valuation_count(ws, &atoms);
        for code in 0..count {
            let d = DomainModel::unchecked(ws, valuation_from_code(ws, &atoms, code));
            for i in ws.subsets() {
                let supported = |f: &Formula| i.is_subset(eval(&d, i, f));
                if premises.iter().all(supported) && !supported(conclusion) {
                    return Scan {
                        models: code + 1,
                        hit: Some(Witness::Informational { model: d, state: i }),
                    };
                }
            }
        }
        Scan { models: count, hit: None }
    });
    Ok(Verdict::from_search(found, started))
}

/// Profile table for `⊨_I`: one point per (domain model, state).
pub fn informational_table(
    b: &SearchBound,
    formulas: impl IntoIterator<Item = Formula>,
) -> Result<ProfileTable, DomainError> {
    let (list, index) = ProfileTable::dedup_formulas(formulas)?;
    let atoms = models_within(b, &list.iter().collect::<Vec<_>>())?;
    let scan = |&ws: &WorldSet| {
        let count = valuation_count(ws, &atoms);
        let mut seen = std::collections::HashSet::new();
        let mut points = Vec::new();
        for code in 0..count {
            let d = DomainModel::unchecked(ws, valuation_from_code(ws, &atoms, code));
            for i in ws.subsets() {
                let p = Profile::of((0..list.len()).filter(|&k| i.is_subset(eval(&d, i, &list[k]))));
                if seen.insert(p) {
                    points.push((p, Witness::Informational { model: d.clone(), state: i }, code + 1));
                }
            }
        }
        Unit { points, models: count }
    };
    Ok(ProfileTable::assemble(list.clone(), index, enumerate_world_sets(b.max_worlds), scan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consequence::Outcome;
    use crate::syntax::parse;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    // a = 0, b = 1, V(p) = {a}
    fn d() -> DomainModel {
        DomainModel::new(WorldSet::first(2), [("p".to_string(), WorldSet::singleton(0))].into()).unwrap()
    }

    #[test]
    fn satisfaction_examples() {
        let ab = WorldSet::first(2);
        assert!(!domain_satisfies(&d(), 0, ab, &f("[]p")).unwrap());
        for w in 0..2 {
            assert!(domain_satisfies(&d(), w, ab, &f("<>p")).unwrap());
        }
        assert!(!domain_satisfies(&d(), 1, ab, &f("p")).unwrap());
    }

    #[test]
    fn support_examples() {
        let a = WorldSet::singleton(0);
        assert!(!info_supports(&d(), a, &f("p & <>~p")).unwrap());
        assert!(info_supports(&d(), WorldSet::EMPTY, &f("false")).unwrap());
        let ab = WorldSet::first(2);
        assert!(info_supports(&d(), ab, &f("<>p")).unwrap());
        assert!(info_supports(&d(), ab, &f("<>~p")).unwrap());
    }

    #[test]
    fn fragment_is_enforced() {
        let ab = WorldSet::first(2);
        for s in ["p;q", "p => q", "[*]p", "A p", "E p", "O p", "<p>q"] {
            assert!(matches!(info_supports(&d(), ab, &f(s)), Err(DomainError::Unsupported(_))), "{s}");
        }
        assert!(matches!(info_supports(&d(), WorldSet::first(3), &f("p")), Err(DomainError::StateOutside(_))));
    }

    #[test]
    fn consequence_examples() {
        let b = SearchBound::new(3);
        assert!(informational_consequence(&[f("p"), f("<>~p")], &f("false"), &b).unwrap().holds());
        let v = informational_consequence(&[f("<>p"), f("<>~p")], &f("false"), &b).unwrap();
        assert_eq!(v.outcome, Outcome::Refuted);
        assert_eq!(
            v.witness,
            Some(Witness::Informational {
                model: d(),
                state: WorldSet::first(2)
            })
        );
        assert!(informational_consequence(&[f("p")], &f("[]p"), &b).unwrap().holds());
    }

    #[test]
    fn universal_model() {
        let ab = WorldSet::first(2);
        let m = universal_model_of(&d(), ab).unwrap();
        assert_eq!(m.frame().relation().len(), 4);
        assert_eq!(m.value("p"), WorldSet::singleton(0));
        let one = universal_model_of(&d(), WorldSet::singleton(0)).unwrap();
        assert!(one.frame().related(0, 0));
        for s in [ab, WorldSet::singleton(0)] {
            let m = universal_model_of(&d(), s).unwrap();
            assert_eq!(info_supports(&d(), s, &f("[]p")).unwrap(), m.globally_true(&f("[]p")));
        }
        assert_eq!(universal_model_of(&d(), WorldSet::EMPTY), Err(DomainError::EmptyState));
    }

    #[test]
    fn table_matches_direct() {
        let pool: Vec<Formula> = ["p", "~p", "[]p", "<>p", "<>~p", "false", "p & <>~p"].iter().map(|s| f(s)).collect();
        let b = SearchBound::new(2);
        let t = informational_table(&b, pool.clone()).unwrap();
        for a in &pool {
            for c in &pool {
                let direct = informational_consequence(std::slice::from_ref(a), c, &b).unwrap();
                assert!(direct.same_answer(&t.verdict(std::slice::from_ref(a), c).unwrap()));
            }
        }
    }
}
