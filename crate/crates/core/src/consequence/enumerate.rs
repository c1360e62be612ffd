//! Canonical enumeration of frames, world sets and valuations.

use crate::frameprops::{in_class, FrameClass};
use crate::kripke::{Frame, Valuation, World, WorldSet, MAX_WORLDS};

/// Frames of `c` on `{0..m-1}` for `1 <= m <= n`, ordered by (size, relation mask).
///
/// With `dedup_isomorphic` only the frame with the least mask in each
/// isomorphism class is kept. Explicit classes keep their first member of
/// each isomorphism class instead.
pub fn enumerate_frames(
    n: usize,
    c: &FrameClass,
    dedup_isomorphic: bool,
) -> Box<dyn Iterator<Item = Frame> + Send + '_> {
    let n = n.min(MAX_WORLDS);
    match c {
        FrameClass::Explicit(frames) => {
            let mut seen: Vec<(usize, u64)> = Vec::new();
            Box::new(
                frames
                    .iter()
                    .copied()
                    .filter(move |fr| fr.size() <= n)
                    .filter(move |fr| {
                        if !dedup_isomorphic {
                            return true;
                        }
                        let key = (fr.size(), iso_canonical_mask(fr));
                        if seen.contains(&key) {
                            false
                        } else {
                            seen.push(key);
                            true
                        }
                    }),
            )
        }
        named => Box::new((1..=n).flat_map(move |m| {
            let perms = if dedup_isomorphic {
                permutations(m)
            } else {
                Vec::new()
            };
            (0..1u64 << (m * m))
                .filter(move |&mask| {
                    !dedup_isomorphic || perms.iter().all(|p| permute_mask(m, mask, p) >= mask)
                })
                .map(move |mask| Frame::from_mask(m, mask))
                .filter(move |fr| in_class(fr, named))
        })),
    }
}

/// `{0}`, `{0,1}`, .. up to `n` worlds.
pub fn enumerate_world_sets(n: usize) -> impl Iterator<Item = WorldSet> {
    (1..=n.min(MAX_WORLDS)).map(WorldSet::first)
}

/// Number of valuations of `atoms` over `worlds`.
pub fn valuation_count(worlds: WorldSet, atoms: &[String]) -> u64 {
    1u64 << (worlds.len() * atoms.len())
}

/// Valuation number `code`: atom `a` holds at the world of rank `r` iff bit `a*m + r` is set.
pub fn valuation_from_code(worlds: WorldSet, atoms: &[String], code: u64) -> Valuation {
    let members: Vec<World> = worlds.iter().collect();
    let m = members.len();
    atoms
        .iter()
        .enumerate()
        .map(|(a, name)| {
            let set = members
                .iter()
                .enumerate()
                .filter(|(r, _)| code & (1 << (a * m + r)) != 0)
                .map(|(_, &w)| w)
                .collect();
            (name.clone(), set)
        })
        .collect()
}

/// All valuations of `atoms` over the worlds of `fr`, in bitmask order.
pub fn enumerate_valuations<'a>(
    fr: &Frame,
    atoms: &'a [String],
) -> impl Iterator<Item = Valuation> + 'a {
    enumerate_valuations_on(fr.worlds(), atoms)
}

pub fn enumerate_valuations_on(
    worlds: WorldSet,
    atoms: &[String],
) -> impl Iterator<Item = Valuation> + '_ {
    (0..valuation_count(worlds, atoms)).map(move |code| valuation_from_code(worlds, atoms, code))
}

/// Least relation mask over all relabellings of the frame's worlds.
pub fn iso_canonical_mask(fr: &Frame) -> u64 {
    let norm = fr.normalized();
    let m = norm.size();
    let mask = norm.relation_mask();
    permutations(m)
        .iter()
        .map(|p| permute_mask(m, mask, p))
        .min()
        .unwrap_or(mask)
}

fn permute_mask(m: usize, mask: u64, perm: &[usize]) -> u64 {
    let mut out = 0u64;
    for i in 0..m {
        for j in 0..m {
            if mask & (1 << (i * m + j)) != 0 {
                out |= 1 << (perm[i] * m + perm[j]);
            }
        }
    }
    out
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}
