//! The registered checks.

use std::collections::BTreeSet;

use serde_json::json;

use super::plan::{same, Plan, Query, Sem};
use super::pool::{
    dynamic_pool, formula_pool, one_atom_pool, pal_pool, premise_sets, sequences,
    small_pool, step_pool,
};
use super::{
    class_label, random_classes, relational_work, state_work, within_budget, CheckSpec,
    Findings, LimitExceeded, Mutation, Observation, RANDOM_CLASSES, RANDOM_FRAME_WORLDS,
};
use crate::consequence::{
    box_omega_set, box_r_set, box_set, enumerate_frames, enumerate_world_sets, global_consequence,
    iso_canonical_mask, local_consequence, valuation_count, valuation_from_code, venema_localization,
    SearchBound, Verdict, Witness,
};
use crate::frameprops::{
    general_condition, has_global_property, in_class, is_transitive, FrameClass, GlobalProperty,
};
use crate::io::frame_to_json;
use crate::io::WorldNames;
use crate::kripke::{irreflexive_point_extension, Frame, Model, Valuation, WorldSet};
use crate::syntax::{Formula, Fragment};
use crate::update::{
    arrow_definability_check, arrow_expansion, model_from_state, pal_reduce, sequential_update_consequence,
    translate_pal, update, update_consequence, update_model_of, UpdateModel,
};

pub(crate) type Runner = fn(&CheckSpec, &mut Findings) -> Result<(), LimitExceeded>;

pub(crate) struct Registered {
    pub id: &'static str,
    pub title: &'static str,
    pub default_worlds: usize,
    pub expected_failure: Option<&'static str>,
}

const fn reg(id: &'static str, title: &'static str, default_worlds: usize) -> Registered {
    Registered {
        id,
        title,
        default_worlds,
        expected_failure: None,
    }
}

const BOXPLUS_NOTE: &str = "the closure-box bridge needs classes closed under point-generated \
subframes; on the two-world frame with one arrow, {[]false} |=g false holds while \
[*][]false |= [*]false is refuted at the dead end";

const CD_NOTE: &str = "on the two-cycle frame every world has exactly one successor, so \
p | ~p |=g []p | []~p holds there; the non-implication is confirmed on the total two-world frame";

pub(crate) const REGISTRY: [Registered; 22] = [
    reg("fact-basic", "local consequence implies global; validities coincide", 3),
    reg("fact-modal-free", "local and global agree on modal-free queries", 3),
    Registered {
        expected_failure: Some(BOXPLUS_NOTE),
        ..reg("prop-boxplus", "global consequence as closure-box local consequence", 3)
    },
    reg("prop-universal", "global consequence via the universal modality", 3),
    reg("thm-global-by-local", "global by local with closure-boxed premises", 3),
    reg("fact-cex-1", "closure-boxed premises fail without generated-subframe closure", 2),
    reg("fact-cex-2", "agreement on a class that is not closed under generated subframes", 2),
    reg("cor-transitive", "transitive classes: premises as p & []p", 3),
    reg("thm-point-extension", "transitive classes: boxed premises and boxed conclusion", 3),
    reg("cor-reflexive-transitive", "reflexive transitive classes: three-way agreement", 3),
    reg("prop-s5-global", "S5 global consequence via K45 and KD45", 3),
    reg("prop-premise-modal-free", "modal-free premises need no closure box on the conclusion", 3),
    reg("prop-venema", "local consequence as global consequence with a fresh atom", 3),
    reg("fact-phi2box", "phi |=g []phi and its local failures", 3),
    reg("corr-named-8", "eight named global properties against their inferences", 4),
    reg("thm-general-corr", "the general correspondence condition on all small frames", 3),
    reg("fact-epistemic", "epistemic contradictions are globally inconsistent", 3),
    reg("fact-raa", "reductio ad absurdum, weak and strong forms", 3),
    Registered {
        expected_failure: Some(CD_NOTE),
        ..reg("fact-cd", "constructive dilemma, boxed form", 3)
    },
    reg("thm-schulz", "informational, global S5 and boxed local S5 agree", 4),
    reg("update-suite", "update semantics against relativized S5 models", 3),
    reg("pal-reduction", "announcement reduction preserves truth sets", 3),
];

pub(crate) fn runner(id: &str) -> Option<Runner> {
    let run: Runner = match id {
        "fact-basic" => fact_basic,
        "fact-modal-free" => fact_modal_free,
        "prop-boxplus" => prop_boxplus,
        "prop-universal" => prop_universal,
        "thm-global-by-local" => thm_global_by_local,
        "fact-cex-1" => fact_cex_1,
        "fact-cex-2" => fact_cex_2,
        "cor-transitive" => cor_transitive,
        "thm-point-extension" => thm_point_extension,
        "cor-reflexive-transitive" => cor_reflexive_transitive,
        "prop-s5-global" => prop_s5_global,
        "prop-premise-modal-free" => prop_premise_modal_free,
        "prop-venema" => prop_venema,
        "fact-phi2box" => fact_phi2box,
        "corr-named-8" => corr_named_8,
        "thm-general-corr" => thm_general_corr,
        "fact-epistemic" => fact_epistemic,
        "fact-raa" => fact_raa,
        "fact-cd" => fact_cd,
        "thm-schulz" => thm_schulz,
        "update-suite" => update_suite,
        "pal-reduction" => pal_reduction,
        _ => return None,
    };
    Some(run)
}

fn p() -> Formula {
    Formula::atom("p")
}

fn all_equal(_: &Query, o: &[bool]) -> bool {
    o.iter().all(|&x| x == o[0])
}

fn pool_queries(spec: &CheckSpec, premises: &[Formula], conclusions: &[Formula]) -> Vec<Query> {
    let mut out = Vec::new();
    for set in premise_sets(premises, spec.pool.max_premises) {
        for c in conclusions {
            out.push(Query::new(set.clone(), c.clone()));
        }
    }
    out
}

fn full_queries(spec: &CheckSpec) -> Vec<Query> {
    let pool = formula_pool(&spec.pool);
    pool_queries(spec, &pool, &pool)
}

fn modal_free(spec: &CheckSpec) -> Vec<Formula> {
    formula_pool(&spec.pool)
        .into_iter()
        .filter(|f| f.fragment() == Fragment::ModalFree)
        .collect()
}

fn randoms(spec: &CheckSpec) -> Vec<FrameClass> {
    random_classes(
        spec.seed,
        RANDOM_CLASSES,
        RANDOM_FRAME_WORLDS.min(spec.bound.max_worlds),
    )
}

fn run_classes(
    plan: &Plan,
    classes: &[FrameClass],
    n: usize,
    f: &mut Findings,
    expected: impl Fn(&FrameClass) -> bool,
    ok: impl Fn(&Query, &[bool]) -> bool + Sync + Copy,
) -> Result<(), LimitExceeded> {
    for c in classes {
        plan.run(Some(c), n, f, &class_label(c), expected(c), ok)?;
    }
    Ok(())
}

fn never(_: &FrameClass) -> bool {
    false
}

fn explicit(frames: impl IntoIterator<Item = Frame>) -> FrameClass {
    FrameClass::explicit(frames).expect("nonempty class")
}

fn frame(n: usize, pairs: &[(usize, usize)]) -> Frame {
    Frame::new(n, pairs.iter().copied()).expect("valid frame")
}

/// Every point-generated subframe of a member is isomorphic to a member.
pub(crate) fn closed_under_generated(c: &FrameClass) -> bool {
    let FrameClass::Explicit(frames) = c else {
        return true;
    };
    let keys: BTreeSet<(usize, u64)> = frames
        .iter()
        .map(|f| (f.size(), iso_canonical_mask(f)))
        .collect();
    frames.iter().all(|f| {
        f.worlds().iter().all(|w| {
            let g = f.generated_by(w).expect("world of the frame");
            keys.contains(&(g.size(), iso_canonical_mask(&g)))
        })
    })
}

fn fact_basic(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let plan = Plan::new(full_queries(spec))
        .side("global", Sem::Global(None), same)
        .side("local", Sem::Local(None), same);
    let ok = |q: &Query, o: &[bool]| (!o[1] || o[0]) && (!q.premises.is_empty() || o[0] == o[1]);
    run_classes(&plan, &FrameClass::NAMED, spec.bound.max_worlds, f, never, ok)?;
    run_classes(&plan, &randoms(spec), spec.bound.max_worlds, f, never, ok)
}

fn fact_modal_free(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let mf = modal_free(spec);
    let plan = Plan::new(pool_queries(spec, &mf, &mf))
        .side("global", Sem::Global(None), same)
        .side("local", Sem::Local(None), same);
    run_classes(&plan, &FrameClass::NAMED, spec.bound.max_worlds, f, never, all_equal)?;
    run_classes(&plan, &randoms(spec), spec.bound.max_worlds, f, never, all_equal)
}

fn boxplus_both(q: &Query) -> (Vec<Formula>, Formula) {
    (box_omega_set(&q.premises), Formula::box_plus(q.conclusion.clone()))
}

fn boxplus_premises(q: &Query) -> (Vec<Formula>, Formula) {
    (box_omega_set(&q.premises), q.conclusion.clone())
}

fn prop_boxplus(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let plan = Plan::new(full_queries(spec))
        .side("global", Sem::Global(None), same)
        .side("local [*]G / [*]phi", Sem::Local(None), boxplus_both);
    run_classes(&plan, &FrameClass::NAMED, spec.bound.max_worlds, f, never, all_equal)?;
    let not_closed = |c: &FrameClass| !closed_under_generated(c);
    run_classes(&plan, &randoms(spec), spec.bound.max_worlds, f, not_closed, all_equal)
}

fn prop_universal(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let univ = |g: &[Formula]| g.iter().cloned().map(Formula::univ).collect::<Vec<_>>();
    let plan = Plan::new(full_queries(spec))
        .side("global", Sem::Global(None), same)
        .side("local AG / phi", Sem::Local(None), move |q| (univ(&q.premises), q.conclusion.clone()))
        .side("local AG / A phi", Sem::Local(None), move |q| {
            (univ(&q.premises), Formula::univ(q.conclusion.clone()))
        });
    run_classes(&plan, &randoms(spec), spec.bound.max_worlds, f, never, all_equal)?;
    run_classes(&plan, &[FrameClass::K, FrameClass::S4], spec.bound.max_worlds, f, never, all_equal)
}

fn thm_global_by_local(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let plan = Plan::new(full_queries(spec))
        .side("global", Sem::Global(None), same)
        .side("local [*]G / phi", Sem::Local(None), boxplus_premises);
    let classes = [FrameClass::K, FrameClass::K4, FrameClass::S4, FrameClass::S5];
    run_classes(&plan, &classes, spec.bound.max_worlds, f, never, all_equal)
}

fn expect_verdict(
    f: &mut Findings,
    class: &FrameClass,
    label: &str,
    query: &Query,
    v: &Verdict,
    holds: bool,
) {
    f.expect(v.holds() == holds, &class_label(class), || query.render(), || {
        vec![Observation::of(label, v), Observation::fact("expected to hold", holds)]
    });
}

fn fact_cex_1(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let n = spec.bound.max_worlds.max(2);
    let b = SearchBound::new(n);
    let class = explicit([frame(2, &[(0, 1)])]);
    let dead = Formula::nec(Formula::bottom());
    let g = Query::new(vec![dead.clone()], Formula::bottom());
    let v = global_consequence(&g.premises, &g.conclusion, &class, &b).expect("small search");
    expect_verdict(f, &class, "global", &g, &v, true);
    let l = Query::new(vec![Formula::box_plus(dead.clone())], Formula::bottom());
    let v = local_consequence(&l.premises, &l.conclusion, &class, &b).expect("small search");
    expect_verdict(f, &class, "local", &l, &v, false);
    let world = match &v.witness {
        Some(Witness::Relational { world, .. }) => *world,
        _ => None,
    };
    f.expect(world == Some(1), &class_label(&class), || "witness world".into(), || {
        vec![Observation::of("local", &v)]
    });
    // the dead end satisfies every finite stack of boxes over []false
    if let Some(Witness::Relational { model, .. }) = &v.witness {
        for k in 0..=4 {
            let stacked = Formula::nec_n(k, dead.clone());
            f.expect(model.satisfies(1, &stacked).unwrap_or(false), &class_label(&class), || {
                format!("world 1 satisfies {stacked}")
            }, || vec![Observation::fact("satisfied", false)]);
        }
    }
    Ok(())
}

fn fact_cex_2(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let class = explicit([frame(2, &[])]);
    f.expect(!closed_under_generated(&class), &class_label(&class), || {
        "class is not closed under generated subframes".into()
    }, || vec![Observation::fact("closed", true)]);
    let plan = Plan::new(full_queries(spec))
        .side("global", Sem::Global(None), same)
        .side("local [*]G / phi", Sem::Local(None), boxplus_premises);
    plan.run(Some(&class), spec.bound.max_worlds.max(2), f, &class_label(&class), false, all_equal)
}

fn cor_transitive(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let plan = Plan::new(full_queries(spec))
        .side("global", Sem::Global(None), same)
        .side("local G & []G / phi", Sem::Local(None), |q| {
            (box_r_set(&q.premises), q.conclusion.clone())
        });
    let classes = [FrameClass::K4, FrameClass::KD4, FrameClass::S4, FrameClass::S5];
    run_classes(&plan, &classes, spec.bound.max_worlds, f, never, all_equal)
}

fn boxed_both(q: &Query) -> (Vec<Formula>, Formula) {
    (box_set(&q.premises), Formula::nec(q.conclusion.clone()))
}

fn boxed_premises(q: &Query) -> (Vec<Formula>, Formula) {
    (box_set(&q.premises), q.conclusion.clone())
}

fn relational_parts(w: &Witness) -> (&Model, Option<usize>) {
    match w {
        Witness::Relational { model, world } => (model, *world),
        _ => unreachable!("relational tables give relational witnesses"),
    }
}

/// A global countermodel gives a local one for the boxed query, adding a point when needed.
fn forward_transfer(m: &Model, q: &Query, class: &FrameClass) -> Result<(), String> {
    let fails = m.worlds().minus(m.truth_set(&q.conclusion));
    let w = fails.min().ok_or("global witness has no failing world")?;
    let (model, at) = if let Some(r) = fails.iter().find(|&v| m.frame().related(v, v)) {
        (m.clone(), r)
    } else {
        let fresh = m.frame().size();
        let ext = irreflexive_point_extension(m.frame(), w, fresh).map_err(|e| e.to_string())?;
        (m.with_frame(ext), fresh)
    };
    if !in_class(model.frame(), class) {
        return Err("extended frame leaves the class".into());
    }
    let boxed = q.premises.iter().all(|g| model.satisfies(at, &Formula::nec(g.clone())).unwrap_or(false));
    let refuted = !model
        .satisfies(at, &Formula::nec(q.conclusion.clone()))
        .unwrap_or(true);
    if boxed && refuted {
        Ok(())
    } else {
        Err(format!("boxed query not refuted at {at}"))
    }
}

/// A local countermodel of the boxed query gives a generated global one.
fn converse_transfer(m: &Model, w: usize, q: &Query, class: &FrameClass) -> Result<(), String> {
    let u = m
        .frame()
        .successors(w)
        .minus(m.truth_set(&q.conclusion))
        .min()
        .ok_or("no successor refutes the conclusion")?;
    let g = m.generated_submodel(u).map_err(|e| e.to_string())?;
    if !in_class(g.frame(), class) {
        return Err("generated submodel leaves the class".into());
    }
    if q.premises.iter().all(|p| g.globally_true(p)) && !g.globally_true(&q.conclusion) {
        Ok(())
    } else {
        Err(format!("submodel generated by {u} does not refute globally"))
    }
}

fn thm_point_extension(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let n = spec.bound.max_worlds;
    let plan = Plan::new(full_queries(spec))
        .side("global", Sem::Global(None), same)
        .side("local []G / []phi", Sem::Local(None), boxed_both);
    for class in [FrameClass::K4, FrameClass::KD4] {
        let built = plan.build(Some(&class), n)?;
        let label = class_label(&class);
        for (qi, q) in plan.queries().iter().enumerate() {
            f.queries(1);
            let problem = match (built.refutation(0, qi), built.refutation(1, qi)) {
                (Some(g), _) => forward_transfer(relational_parts(&g.witness).0, q, &class).err(),
                (None, Some(l)) => {
                    let (m, w) = relational_parts(&l.witness);
                    Some(match converse_transfer(m, w.expect("local witness world"), q, &class) {
                        Err(e) => e,
                        Ok(()) => "local refutation without a global one".into(),
                    })
                }
                (None, None) => None,
            };
            if let Some(why) = problem {
                let mut obs = built.observations(qi);
                obs.push(Observation::fact(why, false));
                f.record(label.clone(), q.render(), obs);
            }
        }
    }
    Ok(())
}

fn cor_reflexive_transitive(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let plan = Plan::new(full_queries(spec))
        .side("global", Sem::Global(None), same)
        .side("local []G / []phi", Sem::Local(None), boxed_both)
        .side("local []G / phi", Sem::Local(None), boxed_premises);
    run_classes(&plan, &[FrameClass::S4, FrameClass::S5], spec.bound.max_worlds, f, never, all_equal)
}

fn prop_s5_global(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let plan = Plan::new(full_queries(spec))
        .side("global S5", Sem::Global(Some(FrameClass::S5)), same)
        .side("local S5 []G / []phi", Sem::Local(Some(FrameClass::S5)), boxed_both)
        .side("local S5 []G / phi", Sem::Local(Some(FrameClass::S5)), boxed_premises)
        .side("local K45 []G / []phi", Sem::Local(Some(FrameClass::K45)), boxed_both)
        .side("local KD45 []G / []phi", Sem::Local(Some(FrameClass::KD45)), boxed_both);
    plan.run(None, spec.bound.max_worlds, f, "S5, K45, KD45", false, all_equal)
}

fn prop_premise_modal_free(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let plan = Plan::new(pool_queries(spec, &modal_free(spec), &formula_pool(&spec.pool)))
        .side("global", Sem::Global(None), same)
        .side("local [*]G / phi", Sem::Local(None), boxplus_premises);
    run_classes(&plan, &randoms(spec), spec.bound.max_worlds, f, never, all_equal)?;
    run_classes(&plan, &FrameClass::NAMED, spec.bound.max_worlds, f, never, all_equal)
}

fn prop_venema(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let plan = Plan::new(full_queries(spec))
        .side("local", Sem::Local(None), same)
        .side("global with fresh atom", Sem::Global(None), |q| {
            venema_localization(&q.premises, &q.conclusion)
        });
    run_classes(&plan, &randoms(spec), spec.bound.max_worlds, f, never, all_equal)?;
    run_classes(&plan, &[FrameClass::K, FrameClass::S4], spec.bound.max_worlds, f, never, all_equal)
}

/// Whether `prem |= concl` holds globally (or locally) on one frame, over valuations of `atoms`.
fn frame_valid(fr: &Frame, atoms: &[String], prem: &Formula, concl: &Formula, local: bool) -> bool {
    (0..valuation_count(fr.worlds(), atoms)).all(|code| {
        let m = Model::new(*fr, valuation_from_code(fr.worlds(), atoms, code)).expect("valuation on the frame");
        let (a, b) = (m.truth_set(prem), m.truth_set(concl));
        if local {
            a.is_subset(b)
        } else {
            a != m.worlds() || b == m.worlds()
        }
    })
}

fn all_frames(n: usize) -> impl Iterator<Item = Frame> {
    enumerate_frames(n, &FrameClass::K, false).collect::<Vec<_>>().into_iter()
}

fn frame_label(fr: &Frame) -> String {
    frame_to_json(fr, &WorldNames::numeric(fr.size())).to_string()
}

fn fact_phi2box(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let n = spec.bound.max_worlds;
    let pool = formula_pool(&spec.pool);
    let plan = Plan::new(
        pool.iter()
            .map(|g| Query::new(vec![g.clone()], Formula::nec(g.clone())))
            .collect(),
    )
    .side("global", Sem::Global(None), same);
    run_classes(&plan, &FrameClass::NAMED, n, f, never, |_, o| o[0])?;
    run_classes(&plan, &randoms(spec), n, f, never, |_, o| o[0])?;

    within_budget(relational_work(&FrameClass::K, n, 1, 8))?;
    let atoms = vec!["p".to_string()];
    let bp = Formula::nec(p());
    let bbp = Formula::nec(bp.clone());
    for fr in all_frames(n) {
        let global = frame_valid(&fr, &atoms, &bp, &bbp, false);
        let local = frame_valid(&fr, &atoms, &bp, &bbp, true);
        f.expect(global && local == is_transitive(&fr), &frame_label(&fr), || {
            "[]p / [][]p".into()
        }, || {
            vec![
                Observation::fact("global", global),
                Observation::fact("local", local),
                Observation::fact("transitive", is_transitive(&fr)),
            ]
        });
    }
    Ok(())
}

fn property_holds(fr: &Frame, prop: GlobalProperty, mutation: Option<Mutation>) -> bool {
    let v = has_global_property(fr, prop);
    match mutation {
        Some(Mutation::NegateGloballySymmetric) if prop == GlobalProperty::GloballySymmetric => !v,
        _ => v,
    }
}

fn correspondence_formulas(i: usize, j: usize, k: usize, l: usize) -> (Formula, Formula) {
    (
        Formula::poss_n(i, Formula::nec_n(j, p())),
        Formula::nec_n(k, Formula::poss_n(l, p())),
    )
}

type Case = (GlobalProperty, (usize, usize, usize, usize), Formula, Formula);

fn corr_named_8(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let n = spec.bound.max_worlds;
    within_budget(relational_work(&FrameClass::K, n, 1, 2 * GlobalProperty::NAMED.len()))?;
    let atoms = vec!["p".to_string()];
    let cases: Vec<Case> = GlobalProperty::NAMED
        .iter()
        .map(|&prop| {
            let e = prop.exponents();
            let (a, b) = correspondence_formulas(e.0, e.1, e.2, e.3);
            (prop, e, a, b)
        })
        .collect();
    for fr in all_frames(n) {
        for (prop, (i, j, k, l), a, b) in &cases {
            let first_order = property_holds(&fr, *prop, spec.mutation);
            let general = general_condition(&fr, *i, *j, *k, *l);
            let valid = frame_valid(&fr, &atoms, a, b, false);
            f.expect(first_order == general && general == valid, &frame_label(&fr), || {
                format!("{}: {a} / {b}", prop.name())
            }, || {
                vec![
                    Observation::fact("first-order property", first_order),
                    Observation::fact("general condition", general),
                    Observation::fact("global validity", valid),
                ]
            });
        }
    }
    Ok(())
}

fn thm_general_corr(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let n = spec.bound.max_worlds;
    let exps: Vec<(usize, usize, usize, usize)> =
        (0..81).map(|c| (c / 27, (c / 9) % 3, (c / 3) % 3, c % 3)).collect();
    within_budget(relational_work(&FrameClass::K, n, 1, 2 * exps.len()))?;
    let atoms = vec!["p".to_string()];
    let cases: Vec<_> = exps
        .iter()
        .map(|&(i, j, k, l)| ((i, j, k, l), correspondence_formulas(i, j, k, l)))
        .collect();
    for fr in all_frames(n) {
        for ((i, j, k, l), (a, b)) in &cases {
            let general = general_condition(&fr, *i, *j, *k, *l);
            let valid = frame_valid(&fr, &atoms, a, b, false);
            f.expect(general == valid, &frame_label(&fr), || format!("({i},{j},{k},{l}): {a} / {b}"), || {
                vec![
                    Observation::fact("general condition", general),
                    Observation::fact("global validity", valid),
                ]
            });
        }
    }
    Ok(())
}

fn epistemic(g: &Formula) -> Formula {
    Formula::and(g.clone(), Formula::poss(Formula::not(g.clone())))
}

fn fact_epistemic(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let n = spec.bound.max_worlds;
    let queries: Vec<Query> = formula_pool(&spec.pool)
        .iter()
        .map(|g| Query::new(vec![epistemic(g)], Formula::bottom()))
        .collect();
    let relational = Plan::new(queries.clone()).side("global", Sem::Global(None), same);
    run_classes(&relational, &FrameClass::NAMED, n, f, never, |_, o| o[0])?;
    run_classes(&relational, &randoms(spec), n, f, never, |_, o| o[0])?;
    let states = Plan::new(queries)
        .side("informational", Sem::Informational, same)
        .side("update", Sem::Update, same);
    states.run(None, n, f, "domain and update models", false, |_, o| o[0] && o[1])?;

    let b = SearchBound::new(n);
    for g in [p(), Formula::poss(p())] {
        let q = Query::new(vec![epistemic(&g)], Formula::bottom());
        let v = local_consequence(&q.premises, &q.conclusion, &FrameClass::K, &b).map_err(|_| LimitExceeded {
            estimate: u64::MAX,
        })?;
        expect_verdict(f, &FrameClass::K, "local", &q, &v, false);
    }
    Ok(())
}

fn fact_raa(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let n = spec.bound.max_worlds;
    let plan = Plan::new(full_queries(spec))
        .side("global G, phi / false", Sem::Global(None), |q| {
            let mut prem = q.premises.clone();
            prem.push(q.conclusion.clone());
            (prem, Formula::bottom())
        })
        .side("global G / <>~phi", Sem::Global(None), |q| {
            (q.premises.clone(), Formula::poss(Formula::not(q.conclusion.clone())))
        });
    let classes = [FrameClass::S4, FrameClass::S5];
    run_classes(&plan, &classes, n, f, never, |_, o| !o[0] || o[1])?;

    let b = SearchBound::new(n.max(2));
    let dn = Formula::poss(Formula::not(p()));
    for class in &classes {
        let inconsistent = Query::new(vec![dn.clone(), p()], Formula::bottom());
        let v = global_consequence(&inconsistent.premises, &inconsistent.conclusion, class, &b)
            .expect("small search");
        expect_verdict(f, class, "global", &inconsistent, &v, true);
        let strong = Query::new(vec![dn.clone()], Formula::not(p()));
        let v = global_consequence(&strong.premises, &strong.conclusion, class, &b).expect("small search");
        expect_verdict(f, class, "global", &strong, &v, false);
    }
    Ok(())
}

fn fact_cd(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let n = spec.bound.max_worlds;
    let small = small_pool();
    let gammas: Vec<Option<Formula>> = std::iter::once(None)
        .chain(one_atom_pool(spec.pool.one_atom_depth).into_iter().map(Some))
        .collect();
    let boxed_or = |a: &Formula, b: &Formula| Formula::or(Formula::nec(a.clone()), Formula::nec(b.clone()));
    let mut formulas: Vec<Formula> = gammas.iter().flatten().cloned().collect();
    formulas.extend(small.iter().cloned());
    for a in &small {
        for b in &small {
            formulas.push(boxed_or(a, b));
        }
    }
    let gsets: Vec<Vec<Formula>> = gammas.iter().map(|g| g.iter().cloned().collect()).collect();
    let s = small.len();
    for class in [FrameClass::S4, FrameClass::S5] {
        within_budget(relational_work(&class, n, 1, formulas.len()))?;
        let table = crate::consequence::ProfileTable::global(&class, &SearchBound::new(n), formulas.clone())
            .map_err(|_| LimitExceeded { estimate: u64::MAX })?;
        let id = |x: &Formula| table.id(x).expect("interned");
        let label = class_label(&class);
        for g in &gsets {
            let gi: Vec<usize> = g.iter().map(id).collect();
            let base = |x: &Formula, y: &Formula| {
                let mut prem = gi.clone();
                prem.push(id(x));
                table.holds(&prem, id(y))
            };
            let single: Vec<Vec<bool>> = small.iter().map(|a| small.iter().map(|c| base(a, c)).collect()).collect();
            for ai in 0..s {
                for bi in 0..s {
                    let prem = boxed_or(&small[ai], &small[bi]);
                    for ci in 0..s {
                        if !single[ai][ci] {
                            f.queries(s as u64);
                            continue;
                        }
                        for di in 0..s {
                            f.queries(1);
                            if single[bi][di] && !base(&prem, &boxed_or(&small[ci], &small[di])) {
                                let mut all = g.clone();
                                all.push(prem.clone());
                                let concl = boxed_or(&small[ci], &small[di]);
                                let v = table.verdict(&all, &concl).expect("interned");
                                f.record(label.clone(), Query::new(all, concl).render(), vec![Observation::of("global", &v)]);
                            }
                        }
                    }
                }
            }
        }
    }

    let b = SearchBound::new(n.max(2));
    let excluded = Query::new(
        vec![Formula::or(p(), Formula::not(p()))],
        boxed_or(&p(), &Formula::not(p())),
    );
    let two_cycle = explicit([frame(2, &[(0, 1), (1, 0)])]);
    for q in [
        Query::new(vec![p()], Formula::nec(p())),
        Query::new(vec![Formula::not(p())], Formula::nec(Formula::not(p()))),
    ] {
        let v = global_consequence(&q.premises, &q.conclusion, &two_cycle, &b).expect("small search");
        expect_verdict(f, &two_cycle, "global", &q, &v, true);
    }
    let v = global_consequence(&excluded.premises, &excluded.conclusion, &two_cycle, &b).expect("small search");
    f.queries(1);
    if v.holds() {
        f.record_expected(class_label(&two_cycle), excluded.render(), vec![
            Observation::of("global", &v),
            Observation::fact("expected to hold", false),
        ]);
    }
    let total = explicit([frame(2, &[(0, 0), (0, 1), (1, 0), (1, 1)])]);
    let v = global_consequence(&excluded.premises, &excluded.conclusion, &total, &b).expect("small search");
    expect_verdict(f, &total, "global", &excluded, &v, false);
    Ok(())
}

fn thm_schulz(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let plan = Plan::new(full_queries(spec))
        .side("informational", Sem::Informational, same)
        .side("global S5", Sem::Global(Some(FrameClass::S5)), same)
        .side("local S5 []G / []phi", Sem::Local(Some(FrameClass::S5)), boxed_both);
    plan.run(None, spec.bound.max_worlds, f, "domain models and S5", false, all_equal)
}

fn update_models(n: usize, atoms: &[String]) -> Vec<UpdateModel> {
    enumerate_world_sets(n)
        .flat_map(|ws| {
            (0..valuation_count(ws, atoms))
                .map(move |code| UpdateModel::new(ws, valuation_from_code(ws, atoms, code)).expect("valid model"))
        })
        .collect()
}

fn pq() -> Vec<String> {
    vec!["p".to_string(), "q".to_string()]
}

fn state_label(u: &UpdateModel, s: WorldSet) -> String {
    let w = Witness::Update { model: u.clone(), state: s };
    crate::io::witness_to_json(&w, &WorldNames::numeric(u.worlds().len())).to_string()
}

fn update_suite(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let n = spec.bound.max_worlds;
    let dynamic = dynamic_pool(&spec.pool);
    let steps = step_pool();
    let seqs = sequences(&steps, 3);
    within_budget(
        state_work(n + 1, 2, dynamic.len() * 6)
            .saturating_add(state_work(n, 2, 4).saturating_mul(seqs.len() as u64 * steps.len() as u64 * 3)),
    )?;
    let atoms = pq();
    let models = update_models(n, &atoms);

    // update coincides with truth in the relativized model, and only shrinks
    for u in &models {
        for s in u.worlds().subsets().filter(|s| !s.is_empty()) {
            let m = model_from_state(u, s).expect("nonempty state");
            for g in &dynamic {
                let t = update(u, s, g).expect("dynamic formula");
                let truth = m.truth_set(g);
                f.expect(t == truth && t.is_subset(s), &state_label(u, s), || format!("s[{g}]"), || {
                    vec![
                        Observation::fact(format!("update {:?}", t.iter().collect::<Vec<_>>()), false),
                        Observation::fact(format!("truth set {:?}", truth.iter().collect::<Vec<_>>()), false),
                    ]
                });
            }
        }
    }

    // total models: W[phi] is the truth set
    for ws in enumerate_world_sets(n) {
        for code in 0..valuation_count(ws, &atoms) {
            let m = Model::new(
                Frame::on(ws, crate::kripke::Relation::total(ws)).expect("total frame"),
                valuation_from_code(ws, &atoms, code),
            )
            .expect("valid model");
            let (u, all) = update_model_of(&m).expect("total relation");
            for g in &dynamic {
                let t = update(&u, all, g).expect("dynamic formula");
                f.expect(t == m.truth_set(g), &state_label(&u, all), || format!("W[{g}]"), Vec::new);
            }
        }
    }

    // the conditional is definable by its expansion
    let mut consequents = steps.clone();
    for a in &steps {
        for b in &steps {
            consequents.push(Formula::seq(a.clone(), b.clone()));
        }
    }
    for u in &models {
        for s in u.worlds().subsets() {
            for a in &steps {
                for b in &consequents {
                    let arrow = Formula::arrow(a.clone(), b.clone());
                    let same_update = arrow_definability_check(u, s, &arrow).expect("an arrow");
                    f.expect(same_update, &state_label(u, s), || {
                        format!("s[{arrow}] = s[{}]", arrow_expansion(a, b))
                    }, Vec::new);
                }
            }
        }
    }

    // update consequence is global S5 consequence
    let mut queries = pool_queries(spec, &formula_pool(&spec.pool), &dynamic);
    for a in &dynamic {
        for c in &dynamic {
            queries.push(Query::new(vec![a.clone()], c.clone()));
        }
    }
    let plan = Plan::new(queries)
        .side("update", Sem::Update, same)
        .side("global S5", Sem::Global(Some(FrameClass::S5)), same);
    plan.run(None, n, f, "update models and S5", false, all_equal)?;

    // sequential consequence, the conditional and the expansion agree with S5 validity
    let b = SearchBound::new(n);
    let s5 = FrameClass::S5;
    for gs in &seqs {
        let chain = Formula::seq_all(gs).expect("nonempty sequence");
        for c in &steps {
            let arrow = Formula::arrow(chain.clone(), c.clone());
            let expansion = arrow_expansion(&chain, c);
            let verdicts = [
                ("sequential update", sequential_update_consequence(gs, c, &b).expect("dynamic")),
                ("update validity of the conditional", update_consequence(&[], &arrow, &b).expect("dynamic")),
                ("update validity of the expansion", update_consequence(&[], &expansion, &b).expect("dynamic")),
                ("global S5 validity", global_consequence(&[], &expansion, &s5, &b).expect("small search")),
                ("local S5 validity", local_consequence(&[], &expansion, &s5, &b).expect("small search")),
            ];
            let agree = verdicts.iter().all(|(_, v)| v.holds() == verdicts[0].1.holds());
            f.expect(agree, "update models and S5", || {
                let prem: Vec<String> = gs.iter().map(|g| g.to_string()).collect();
                format!("[{}] / {c}", prem.join(", "))
            }, || verdicts.iter().map(|(l, v)| Observation::of(*l, v)).collect());
        }
    }

    // support does not depend on worlds outside the state
    for u in &models {
        let m = u.worlds().len();
        if m + 1 > crate::kripke::MAX_WORLDS {
            continue;
        }
        let bigger = WorldSet::first(m + 1);
        for extra in 0..4u64 {
            let mut val: Valuation = u.valuation().clone();
            for (bit, a) in atoms.iter().enumerate() {
                if extra & (1 << bit) != 0 {
                    val.entry(a.clone()).or_default().insert(m);
                }
            }
            let v = UpdateModel::new(bigger, val).expect("valid model");
            for s in u.worlds().subsets() {
                for g in &dynamic {
                    let (a, b) = (update(u, s, g).expect("dynamic"), update(&v, s, g).expect("dynamic"));
                    f.expect(a == b, &state_label(u, s), || format!("s[{g}] with an added world"), || {
                        vec![Observation::fact("same update", false).with_witness(json!({
                            "smaller": a.iter().collect::<Vec<_>>(),
                            "larger": b.iter().collect::<Vec<_>>(),
                        }))]
                    });
                }
            }
        }
    }
    Ok(())
}

fn pal_reduction(spec: &CheckSpec, f: &mut Findings) -> Result<(), LimitExceeded> {
    let n = spec.bound.max_worlds;
    let dynamic = dynamic_pool(&spec.pool);
    let pal = pal_pool(&spec.pool);
    let reduced: Vec<Formula> = pal
        .iter()
        .map(|g| pal_reduce(g).expect("announcement formula"))
        .collect();
    let translated: Vec<Formula> = dynamic.iter().map(translate_pal).collect();
    within_budget(relational_work(&FrameClass::K, n, 2, 2 * (pal.len() + dynamic.len())))?;
    let atoms = pq();
    let frames: Vec<Frame> = all_frames(n).collect();
    use rayon::prelude::*;
    let bad: Vec<(Frame, u64, String, WorldSet, WorldSet)> = frames
        .par_iter()
        .flat_map_iter(|fr| {
            let mut out = Vec::new();
            for code in 0..valuation_count(fr.worlds(), &atoms) {
                let m = Model::new(*fr, valuation_from_code(fr.worlds(), &atoms, code)).expect("valid");
                let pairs = pal.iter().zip(&reduced).chain(dynamic.iter().zip(&translated));
                for (a, b) in pairs {
                    let (x, y) = (m.truth_set(a), m.truth_set(b));
                    if x != y {
                        out.push((*fr, code, format!("{a} ~ {b}"), x, y));
                    }
                }
            }
            out
        })
        .collect();
    let per_model = (pal.len() + dynamic.len()) as u64;
    f.queries(frames.iter().map(|fr| valuation_count(fr.worlds(), &atoms)).sum::<u64>() * per_model);
    for (fr, code, query, x, y) in bad {
        let m = Model::new(fr, valuation_from_code(fr.worlds(), &atoms, code)).expect("valid");
        f.record(frame_label(&fr), query, vec![
            Observation::fact("same truth set", false).with_witness(json!({
                "model": crate::io::model_to_json(&m, &WorldNames::numeric(fr.size())),
                "left": x.iter().collect::<Vec<_>>(),
                "right": y.iter().collect::<Vec<_>>(),
            })),
        ]);
    }

    // update consequence through translation and reduction
    let mut queries = Vec::new();
    for c in &dynamic {
        queries.push(Query::new(Vec::new(), c.clone()));
    }
    for a in &dynamic {
        for c in &dynamic {
            queries.push(Query::new(vec![a.clone()], c.clone()));
        }
    }
    let reduce = |g: &Formula| pal_reduce(&translate_pal(g)).expect("dynamic formula");
    let plan = Plan::new(queries)
        .side("update", Sem::Update, same)
        .side("global S5 after reduction", Sem::Global(Some(FrameClass::S5)), move |q| {
            (q.premises.iter().map(reduce).collect(), reduce(&q.conclusion))
        });
    plan.run(None, n, f, "update models and S5", false, all_equal)
}
