//! Shared generators and independent definitional oracles for the
//! integration suites. The oracles deliberately re-derive everything from
//! first principles (raw enumeration, explicit constructions) rather than
//! calling the decision procedures they are used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stonecalc::measure::{Region, TreeMeasure};
use stonecalc::ordinal::Ordinal;
use stonecalc::posys::PoSystem;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ord(s: &str) -> Ordinal {
    s.parse().unwrap()
}

/// Pieces of a region refined to cylinders of length `total` where possible
/// (pieces already deeper are kept whole). Each piece carries one label.
pub fn refined_pieces(m: &TreeMeasure, region: &Region, total: usize) -> Vec<(String, Ordinal)> {
    let mut out = Vec::new();
    for (path, label) in m.region_leaves(region).unwrap() {
        if path.len() >= total {
            out.push((path, label.clone()));
        } else {
            let extra = total - path.len();
            for bits in 0u32..1 << extra {
                let suffix: String = (0..extra)
                    .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
                    .collect();
                out.push((format!("{path}{suffix}"), label.clone()));
            }
        }
    }
    out
}

fn label_groups(m: &TreeMeasure, region: &Region) -> BTreeMap<Ordinal, Vec<String>> {
    let mut groups: BTreeMap<Ordinal, Vec<String>> = BTreeMap::new();
    for (path, label) in m.region_leaves(region).unwrap() {
        groups.entry(label.clone()).or_default().push(path);
    }
    groups
}

/// Splits the last piece in place until the list reaches `target` entries.
fn split_until(pieces: &mut Vec<String>, target: usize) {
    while pieces.len() < target {
        let p = pieces.pop().unwrap();
        pieces.push(format!("{p}0"));
        pieces.push(format!("{p}1"));
    }
}

/// Decides measure isomorphism by explicit construction: match the pieces of
/// each label, splitting constant-label pieces (which are measure-homogeneous)
/// to equalize counts, and verify the measure on every matched pair. If some
/// label occurs on one side only, no isomorphism can exist: the join of the
/// pieces carrying values up to that label would get different measures.
pub fn oracle_sigma_iso(a: &TreeMeasure, ra: &Region, b: &TreeMeasure, rb: &Region) -> bool {
    let ga = label_groups(a, ra);
    let gb = label_groups(b, rb);
    if ga.keys().ne(gb.keys()) {
        return false;
    }
    for (label, pa) in &ga {
        let mut xs = pa.clone();
        let mut ys = gb[label].clone();
        if xs.len() < ys.len() {
            split_until(&mut xs, ys.len());
        } else {
            split_until(&mut ys, xs.len());
        }
        for (p, q) in xs.iter().zip(&ys) {
            let va = a.sigma_eval(&[p.clone()].into_iter().collect()).unwrap();
            let vb = b.sigma_eval(&[q.clone()].into_iter().collect()).unwrap();
            assert_eq!(va, vb, "matched pieces must carry equal measure");
        }
    }
    true
}

/// Decides pseudo-indecomposability by brute force over every two-part split
/// of the depth-4 refinement of the region: the region is PI iff each split
/// leaves at least one part measure-isomorphic to the whole. Splitting at
/// depth 4 is complete for these step measures: any part omitting a label can
/// be rebuilt from whole refinement pieces.
pub fn oracle_sigma_pi(m: &TreeMeasure, region: &Region) -> bool {
    let pieces = refined_pieces(m, region, 4);
    let k = pieces.len();
    assert!(k >= 1, "the region must be nonempty");
    assert!(k <= 20, "refinement too large to enumerate");
    if k == 1 {
        return true;
    }
    // fix the last piece in the second part to visit each split once
    for mask in 1u32..1 << (k - 1) {
        let mut part1 = Region::new();
        let mut part2 = Region::new();
        for (i, (path, _)) in pieces.iter().enumerate() {
            if i + 1 < k && mask >> i & 1 == 1 {
                part1.insert(path.clone());
            } else {
                part2.insert(path.clone());
            }
        }
        if !oracle_sigma_iso(m, &part1, m, region) && !oracle_sigma_iso(m, &part2, m, region) {
            return false;
        }
    }
    true
}

fn is_lower(p: &PoSystem, s: &BTreeSet<String>) -> bool {
    s.iter()
        .all(|x| p.elements().all(|y| !p.lt(y, x) || s.contains(y)))
}

fn is_upper(p: &PoSystem, s: &BTreeSet<String>) -> bool {
    s.iter()
        .all(|x| p.elements().all(|y| !p.lt(x, y) || s.contains(y)))
}

fn down_closure(p: &PoSystem, s: &BTreeSet<String>) -> BTreeSet<String> {
    p.elements()
        .filter(|y| s.contains(*y) || s.iter().any(|x| p.lt(y, x)))
        .cloned()
        .collect()
}

/// The derivative stages of a system as element sets, ending at the kernel.
pub fn derivative_stages(p: &PoSystem) -> Vec<BTreeSet<String>> {
    let mut stages = Vec::new();
    let mut cur = p.clone();
    loop {
        let elems: BTreeSet<String> = cur.elements().cloned().collect();
        let next = cur.derivative();
        let next_elems: BTreeSet<String> = next.elements().cloned().collect();
        stages.push(elems);
        if next_elems == *stages.last().unwrap() {
            return stages;
        }
        cur = next;
    }
}

/// Checks the six structural clauses tying the derivative sequence, kernel,
/// layers, rank and closure together, by raw set computations.
pub fn check_cb_clauses(p: &PoSystem) -> Result<(), String> {
    let stages = derivative_stages(p);
    let kernel = stages.last().unwrap().clone();
    let nu = stages.len() - 1;
    let inv = p.invariants();
    let d = p.d_part();
    let all: BTreeSet<String> = p.elements().cloned().collect();
    let fail = |msg: String| -> Result<(), String> { Err(msg) };

    // (1) every stage contains the self-looped part; the shed part is loop-free
    let looped: BTreeSet<String> = all.difference(&d).cloned().collect();
    for (xi, stage) in stages.iter().enumerate() {
        if !looped.is_subset(stage) {
            return fail(format!("stage {xi} lost a self-looped element"));
        }
    }
    if !all.difference(&kernel).all(|x| d.contains(x)) {
        return fail("an element outside the kernel has a self-loop".to_owned());
    }

    // (2) nu >= lambda
    if inv.nu != nu {
        return fail(format!("nu: invariants say {}, stages say {nu}", inv.nu));
    }
    if inv.nu < inv.lambda {
        return fail(format!("nu {} < lambda {}", inv.nu, inv.lambda));
    }

    // (3) stages and kernel lower, complement of the kernel upper
    for (xi, stage) in stages.iter().enumerate() {
        if !is_lower(p, stage) {
            return fail(format!("stage {xi} is not lower"));
        }
    }
    if !is_lower(p, &kernel) {
        return fail("kernel is not lower".to_owned());
    }
    let off_kernel: BTreeSet<String> = all.difference(&kernel).cloned().collect();
    if !is_upper(p, &off_kernel) {
        return fail("complement of the kernel is not upper".to_owned());
    }

    // (4) ascending chain condition off the kernel: every element sits below
    // a maximal element of its stage remainder
    for (xi, stage) in stages.iter().enumerate() {
        let rem: BTreeSet<String> = stage.difference(&kernel).cloned().collect();
        for x in &rem {
            let reaches_max = rem
                .iter()
                .any(|q| p.le(x, q) && rem.iter().all(|r| r == q || !p.lt(q, r)));
            if !reaches_max {
                return fail(format!("{x} reaches no maximal element at stage {xi}"));
            }
        }
    }

    // (5) lambda is the largest rank
    let max_rank = inv.rank.values().copied().max().unwrap_or(0);
    if inv.lambda != max_rank {
        return fail(format!("lambda {} != max rank {max_rank}", inv.lambda));
    }

    // (6) down closures: layer and stage remainder agree, and split into the
    // remainder plus the high-rank kernel slice
    for xi in 0..=nu {
        let stage = &stages[xi];
        let layer: BTreeSet<String> = match stages.get(xi + 1) {
            Some(next) => stage.difference(next).cloned().collect(),
            None => BTreeSet::new(),
        };
        let rem: BTreeSet<String> = stage.difference(&kernel).cloned().collect();
        let down_layer = down_closure(p, &layer);
        let down_rem = down_closure(p, &rem);
        if down_layer != down_rem {
            return fail(format!("down closures of layer and remainder differ at {xi}"));
        }
        let expected: BTreeSet<String> = rem.union(&inv.k_xi(xi)).cloned().collect();
        if down_rem != expected {
            return fail(format!("down closure at {xi} is not remainder + kernel slice"));
        }
    }
    Ok(())
}
