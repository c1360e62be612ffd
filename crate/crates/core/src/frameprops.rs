//! Frame classes and the first-order conditions that govern global consequence.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::kripke::{Frame, Relation, World, WorldSet};

/// Largest exponent accepted by [`GlobalProperty::General`].
pub const MAX_EXPONENT: usize = 3;

/// Named frame classes, or an explicit finite list of frames.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FrameClass {
    K,
    T,
    D,
    /// Symmetric frames.
    B,
    K4,
    KD4,
    S4,
    S5,
    K45,
    KD45,
    Explicit(Vec<Frame>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("unknown frame class `{0}`")]
    UnknownClass(String),
    #[error("an explicit frame class needs at least one frame")]
    EmptyExplicit,
    #[error("exponent {0} exceeds the maximum of {MAX_EXPONENT}")]
    ExponentTooLarge(usize),
}

impl FrameClass {
    pub const NAMED: [FrameClass; 10] = [
        FrameClass::K,
        FrameClass::T,
        FrameClass::D,
        FrameClass::B,
        FrameClass::K4,
        FrameClass::KD4,
        FrameClass::S4,
        FrameClass::S5,
        FrameClass::K45,
        FrameClass::KD45,
    ];

    /// Sorted, duplicate-free explicit class.
    pub fn explicit(frames: impl IntoIterator<Item = Frame>) -> Result<FrameClass, ClassError> {
        let mut frames: Vec<Frame> = frames.into_iter().collect();
        frames.sort();
        frames.dedup();
        if frames.is_empty() {
            return Err(ClassError::EmptyExplicit);
        }
        Ok(FrameClass::Explicit(frames))
    }

    pub fn name(&self) -> &'static str {
        match self {
            FrameClass::K => "K",
            FrameClass::T => "T",
            FrameClass::D => "D",
            FrameClass::B => "B",
            FrameClass::K4 => "K4",
            FrameClass::KD4 => "KD4",
            FrameClass::S4 => "S4",
            FrameClass::S5 => "S5",
            FrameClass::K45 => "K45",
            FrameClass::KD45 => "KD45",
            FrameClass::Explicit(_) => "explicit",
        }
    }
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameClass::Explicit(frames) => write!(f, "explicit[{}]", frames.len()),
            named => f.write_str(named.name()),
        }
    }
}

impl FromStr for FrameClass {
    type Err = ClassError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FrameClass::NAMED
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ClassError::UnknownClass(s.to_string()))
    }
}

pub fn is_reflexive(fr: &Frame) -> bool {
    fr.worlds().iter().all(|w| fr.related(w, w))
}

pub fn is_serial(fr: &Frame) -> bool {
    fr.worlds().iter().all(|w| !fr.successors(w).is_empty())
}

pub fn is_symmetric(fr: &Frame) -> bool {
    fr.relation().pairs().all(|(a, b)| fr.related(b, a))
}

pub fn is_transitive(fr: &Frame) -> bool {
    fr.worlds().iter().all(|a| {
        fr.successors(a)
            .iter()
            .all(|b| fr.successors(b).is_subset(fr.successors(a)))
    })
}

pub fn is_euclidean(fr: &Frame) -> bool {
    fr.worlds().iter().all(|a| {
        let succ = fr.successors(a);
        succ.iter().all(|b| succ.is_subset(fr.successors(b)))
    })
}

/// Membership in a frame class.
pub fn in_class(fr: &Frame, c: &FrameClass) -> bool {
    match c {
        FrameClass::K => true,
        FrameClass::T => is_reflexive(fr),
        FrameClass::D => is_serial(fr),
        FrameClass::B => is_symmetric(fr),
        FrameClass::K4 => is_transitive(fr),
        FrameClass::KD4 => is_serial(fr) && is_transitive(fr),
        FrameClass::S4 => is_reflexive(fr) && is_transitive(fr),
        FrameClass::S5 => is_reflexive(fr) && is_symmetric(fr) && is_transitive(fr),
        FrameClass::K45 => is_transitive(fr) && is_euclidean(fr),
        FrameClass::KD45 => is_serial(fr) && is_transitive(fr) && is_euclidean(fr),
        FrameClass::Explicit(frames) => frames.contains(fr),
    }
}

/// `R^m` on `ws`, with `R^0` the identity.
pub fn relation_power(r: &Relation, ws: WorldSet, m: usize) -> Relation {
    let r = r.restrict(ws);
    (0..m).fold(Relation::identity(ws), |acc, _| acc.compose(&r))
}

/// `∀w∀x∃y∀z∃u (R^k wx ∧ R^i yz → R^l xu ∧ R^j zu)`, evaluated literally.
pub fn general_condition(fr: &Frame, i: usize, j: usize, k: usize, l: usize) -> bool {
    let ws = fr.worlds();
    let rel = fr.relation();
    let (ri, rj, rk, rl) = (
        relation_power(rel, ws, i),
        relation_power(rel, ws, j),
        relation_power(rel, ws, k),
        relation_power(rel, ws, l),
    );
    ws.iter().all(|w| {
        ws.iter().all(|x| {
            ws.iter().any(|y| {
                ws.iter().all(|z| {
                    ws.iter().any(|u| {
                        !(rk.contains(w, x) && ri.contains(y, z))
                            || (rl.contains(x, u) && rj.contains(z, u))
                    })
                })
            })
        })
    })
}

/// Frame conditions that correspond to globally valid inferences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GlobalProperty {
    GloballyIsolated,
    GloballyTransitive,
    GloballyEuclidean,
    GloballyReflexive,
    GloballyInverseReflexive,
    GloballySerial,
    GloballySymmetric,
    GloballyInverseSymmetric,
    /// The condition for `<>^i []^j p ⊨g []^k <>^l p`.
    General {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
    },
}

impl GlobalProperty {
    pub const NAMED: [GlobalProperty; 8] = [
        GlobalProperty::GloballyIsolated,
        GlobalProperty::GloballyTransitive,
        GlobalProperty::GloballyEuclidean,
        GlobalProperty::GloballyReflexive,
        GlobalProperty::GloballyInverseReflexive,
        GlobalProperty::GloballySerial,
        GlobalProperty::GloballySymmetric,
        GlobalProperty::GloballyInverseSymmetric,
    ];

    pub fn general(i: usize, j: usize, k: usize, l: usize) -> Result<GlobalProperty, ClassError> {
        if let Some(&e) = [i, j, k, l].iter().find(|&&e| e > MAX_EXPONENT) {
            return Err(ClassError::ExponentTooLarge(e));
        }
        Ok(GlobalProperty::General { i, j, k, l })
    }

    /// The `(i, j, k, l)` instance of the general condition this property matches.
    pub fn exponents(self) -> (usize, usize, usize, usize) {
        match self {
            GlobalProperty::GloballyIsolated => (1, 0, 0, 0),
            GlobalProperty::GloballyTransitive => (2, 0, 0, 1),
            GlobalProperty::GloballyEuclidean => (1, 1, 1, 0),
            GlobalProperty::GloballyReflexive => (0, 1, 0, 0),
            GlobalProperty::GloballyInverseReflexive => (0, 0, 0, 1),
            GlobalProperty::GloballySerial => (0, 1, 0, 1),
            GlobalProperty::GloballySymmetric => (0, 0, 1, 1),
            GlobalProperty::GloballyInverseSymmetric => (1, 1, 0, 0),
            GlobalProperty::General { i, j, k, l } => (i, j, k, l),
        }
    }

    pub fn name(self) -> String {
        match self {
            GlobalProperty::GloballyIsolated => "globally_isolated".into(),
            GlobalProperty::GloballyTransitive => "globally_transitive".into(),
            GlobalProperty::GloballyEuclidean => "globally_euclidean".into(),
            GlobalProperty::GloballyReflexive => "globally_reflexive".into(),
            GlobalProperty::GloballyInverseReflexive => "globally_inverse_reflexive".into(),
            GlobalProperty::GloballySerial => "globally_serial".into(),
            GlobalProperty::GloballySymmetric => "globally_symmetric".into(),
            GlobalProperty::GloballyInverseSymmetric => "globally_inverse_symmetric".into(),
            GlobalProperty::General { i, j, k, l } => format!("general({i},{j},{k},{l})"),
        }
    }
}

/// Evaluates a global property from its own first-order formula.
pub fn has_global_property(fr: &Frame, p: GlobalProperty) -> bool {
    let ws = fr.worlds();
    let r = |a: World, b: World| fr.related(a, b);
    let succ = |a: World| fr.successors(a);
    match p {
        // ∀x∃y∀z(Ryz → z = x)
        GlobalProperty::GloballyIsolated => ws
            .iter()
            .all(|x| ws.iter().any(|y| succ(y).is_subset(WorldSet::singleton(x)))),
        // ∀w∃x∀y∀z(Rxy ∧ Ryz → Rwz)
        GlobalProperty::GloballyTransitive => ws.iter().all(|w| {
            ws.iter().any(|x| {
                succ(x)
                    .iter()
                    .all(|y| succ(y).iter().all(|z| r(w, z)))
            })
        }),
        // ∀w∀x∃y∀z(Rwx ∧ Ryz → Rzx)
        GlobalProperty::GloballyEuclidean => ws.iter().all(|w| {
            ws.iter().all(|x| {
                ws.iter()
                    .any(|y| ws.iter().all(|z| !(r(w, x) && r(y, z)) || r(z, x)))
            })
        }),
        // ∀x∃y Ryx
        GlobalProperty::GloballyReflexive => ws.iter().all(|x| ws.iter().any(|y| r(y, x))),
        // ∀x∃y Rxy
        GlobalProperty::GloballyInverseReflexive => {
            ws.iter().all(|x| ws.iter().any(|y| r(x, y)))
        }
        // ∀x∃y∃z(Ryz ∧ Rxz)
        GlobalProperty::GloballySerial => ws
            .iter()
            .all(|x| ws.iter().any(|y| ws.iter().any(|z| r(y, z) && r(x, z)))),
        // ∀x∀y(Rxy → ∃z Ryz)
        GlobalProperty::GloballySymmetric => ws
            .iter()
            .all(|x| ws.iter().all(|y| !r(x, y) || ws.iter().any(|z| r(y, z)))),
        // ∀x∃y∀z(Ryz → Rzx)
        GlobalProperty::GloballyInverseSymmetric => ws
            .iter()
            .all(|x| ws.iter().any(|y| ws.iter().all(|z| !r(y, z) || r(z, x)))),
        GlobalProperty::General { i, j, k, l } => general_condition(fr, i, j, k, l),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(n: usize, pairs: &[(World, World)]) -> Frame {
        Frame::new(n, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn named_classes() {
        assert!(in_class(&frame(2, &[(0, 0), (1, 1)]), &FrameClass::S5));
        assert!(in_class(&frame(2, &[(0, 1)]), &FrameClass::K4));
        assert!(!in_class(&frame(2, &[(0, 1), (1, 0)]), &FrameClass::K4));
        assert!(in_class(&frame(2, &[(0, 1), (1, 1)]), &FrameClass::KD45));
        assert!(!in_class(&frame(2, &[(0, 1), (1, 1)]), &FrameClass::S4));
        assert!(in_class(&frame(2, &[(0, 1), (1, 0)]), &FrameClass::B));
        assert!(in_class(&frame(1, &[]), &FrameClass::K45));
        assert!(!in_class(&frame(1, &[]), &FrameClass::D));
    }

    #[test]
    fn explicit_classes() {
        let a = frame(2, &[(0, 1)]);
        let b = frame(1, &[]);
        let c = FrameClass::explicit([a, b, a]).unwrap();
        assert_eq!(c, FrameClass::Explicit(vec![b, a]));
        assert!(in_class(&a, &c));
        assert!(!in_class(&frame(1, &[(0, 0)]), &c));
        assert_eq!(FrameClass::explicit([]), Err(ClassError::EmptyExplicit));
    }

    #[test]
    fn class_names_parse() {
        assert_eq!("s4".parse::<FrameClass>().unwrap(), FrameClass::S4);
        assert_eq!("KD45".parse::<FrameClass>().unwrap(), FrameClass::KD45);
        assert!("S6".parse::<FrameClass>().is_err());
    }

    #[test]
    fn powers() {
        let ws = WorldSet::first(2);
        let r = Relation::from_pairs([(0, 1)]);
        assert_eq!(relation_power(&r, ws, 0), Relation::identity(ws));
        assert!(relation_power(&r, ws, 2).is_empty());
        let swap = Relation::from_pairs([(0, 1), (1, 0)]);
        assert_eq!(relation_power(&swap, ws, 2), Relation::identity(ws));
    }

    #[test]
    fn general_condition_examples() {
        assert!(general_condition(&frame(1, &[(0, 0)]), 1, 1, 1, 1));
        assert!(general_condition(&frame(2, &[(0, 1)]), 1, 0, 0, 0));
        assert!(!general_condition(&frame(2, &[(0, 1)]), 0, 1, 0, 0));
    }

    #[test]
    fn named_global_properties() {
        use GlobalProperty::*;
        assert!(has_global_property(&frame(2, &[(0, 1), (1, 0)]), GloballyIsolated));
        assert!(!has_global_property(&frame(2, &[(0, 1)]), GloballyReflexive));
        assert!(!has_global_property(&frame(1, &[]), GloballyInverseReflexive));
        assert!(!has_global_property(&frame(2, &[(0, 1)]), GloballySymmetric));
        assert!(has_global_property(&frame(2, &[(0, 1), (1, 1)]), GloballySymmetric));
    }

    #[test]
    fn general_exponent_bound() {
        assert!(GlobalProperty::general(3, 0, 0, 0).is_ok());
        assert_eq!(
            GlobalProperty::general(0, 4, 0, 0),
            Err(ClassError::ExponentTooLarge(4))
        );
    }

    #[test]
    fn named_properties_match_general_instances_up_to_three_worlds() {
        for n in 1..=3 {
            for mask in 0..1u64 << (n * n) {
                let fr = Frame::from_mask(n, mask);
                for p in GlobalProperty::NAMED {
                    let (i, j, k, l) = p.exponents();
                    assert_eq!(
                        has_global_property(&fr, p),
                        general_condition(&fr, i, j, k, l),
                        "{p:?} on {fr:?}"
                    );
                }
                // The condition behind `φ ⊨g []φ` holds everywhere.
                assert!(general_condition(&fr, 0, 0, 1, 0));
                if in_class(&fr, &FrameClass::S5) {
                    assert!(in_class(&fr, &FrameClass::S4));
                }
                if in_class(&fr, &FrameClass::S4) {
                    assert!(in_class(&fr, &FrameClass::K4));
                }
                if in_class(&fr, &FrameClass::KD45) {
                    assert!(in_class(&fr, &FrameClass::K45));
                }
            }
        }
    }
}
