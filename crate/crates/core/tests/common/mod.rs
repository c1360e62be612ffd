//! Shared proptest strategies.
#![allow(dead_code)]

use proptest::prelude::*;

use modal_workbench::consequence::valuation_from_code;
use modal_workbench::kripke::{Frame, Model, WorldSet};
use modal_workbench::syntax::Formula;

pub const ATOMS: [&str; 2] = ["p", "q"];

fn leaf() -> impl Strategy<Value = Formula> {
    prop_oneof![
        4 => prop::sample::select(&ATOMS[..]).prop_map(Formula::atom),
        1 => Just(Formula::bottom()),
        1 => Just(Formula::top()),
    ]
}

/// Formulas over `~`, `&`, `|`, `->`, `[]`, `<>`.
pub fn basic() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::nec),
            inner.clone().prop_map(Formula::poss),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
        ]
    })
}

/// Basic formulas plus `;` and `=>`.
pub fn dynamic() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::nec),
            inner.clone().prop_map(Formula::poss),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::seq(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::arrow(a, b)),
        ]
    })
}

/// Every constructor.
pub fn full() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::nec),
            inner.clone().prop_map(Formula::poss),
            inner.clone().prop_map(Formula::box_plus),
            inner.clone().prop_map(Formula::univ),
            inner.clone().prop_map(Formula::exist),
            inner.clone().prop_map(Formula::only),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::seq(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::arrow(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::announce(a, b)),
        ]
    })
}

pub fn frame(max_worlds: usize) -> impl Strategy<Value = Frame> {
    (1..=max_worlds).prop_flat_map(|n| (0..1u64 << (n * n)).prop_map(move |mask| Frame::from_mask(n, mask)))
}

pub fn atoms() -> Vec<String> {
    ATOMS.iter().map(|a| a.to_string()).collect()
}

/// A model over `p`, `q` with at most `max_worlds` worlds.
pub fn model(max_worlds: usize) -> impl Strategy<Value = Model> {
    frame(max_worlds).prop_flat_map(|fr| {
        let bits = 2 * fr.size();
        (0..1u64 << bits).prop_map(move |code| {
            Model::new(fr, valuation_from_code(fr.worlds(), &atoms(), code)).expect("valuation on the frame")
        })
    })
}

/// A world set `{0..n}` with a subset of it.
pub fn state(max_worlds: usize) -> impl Strategy<Value = (WorldSet, u64, WorldSet)> {
    (1..=max_worlds).prop_flat_map(|n| {
        let ws = WorldSet::first(n);
        (Just(ws), 0..1u64 << (2 * n), 0..1u32 << n).prop_map(|(ws, code, bits)| {
            let s = ws.iter().filter(|w| bits & (1 << w) != 0).collect();
            (ws, code, s)
        })
    })
}
