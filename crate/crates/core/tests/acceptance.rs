//! End-to-end acceptance suite: one test per shipping criterion, each
//! printing a pass line (visible with `--nocapture`) and enforcing its time
//! budget. Expected values come from the independent oracles in `common`
//! or from parameterised constructions frozen inside each test.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::{check_cb_clauses, derivative_stages, ord, oracle_sigma_iso, oracle_sigma_pi, rng};
use rand::Rng;

use stonecalc::closurealg::{
    incompatibility_witness, p_nk, qk_algebra, qk_closed_set, CompletionSpec, QkVariant,
};
use stonecalc::measure::{random_tree, sigma_iso_decide, MeasureValue, Region, TreeMeasure};
use stonecalc::ordinal::{random_ordinal, Ordinal};
use stonecalc::ordspace::{
    canonical_g, classify, ordinal_of_type, scattered_type_to_extended_po, type_of, ScatteredType,
    SpaceClass,
};
use stonecalc::posys::{is_morphism, random_po_system, PoSystem};
use stonecalc::spacecalc::{
    homeo_decide, random_space_expr, realize, InvariantTuple, RankProfile, SpaceExpr,
};

fn finish(num: u32, label: &str, start: Instant, budget_ms: u128) {
    let ms = start.elapsed().as_millis();
    println!("criterion {num} ({label}): pass ({ms} ms)");
    assert!(
        ms <= budget_ms,
        "criterion {num} exceeded its {budget_ms} ms budget: took {ms} ms"
    );
}

/// Nonzero exponents up to w^2, mixed sizes.
fn exponent_pool() -> Vec<Ordinal> {
    ["1", "2", "3", "5", "w", "w+1", "w*2", "w*3+2", "w^2"]
        .iter()
        .map(|s| ord(s))
        .collect()
}

fn pick<'a, R: Rng>(rng: &mut R, pool: &'a [Ordinal]) -> &'a Ordinal {
    &pool[rng.gen_range(0..pool.len())]
}

/// Two distinct nonzero exponents, descending.
fn two_exponents<R: Rng>(rng: &mut R, pool: &[Ordinal]) -> (Ordinal, Ordinal) {
    loop {
        let a = pick(rng, pool).clone();
        let b = pick(rng, pool).clone();
        if a > b {
            return (a, b);
        }
        if b > a {
            return (b, a);
        }
    }
}

#[test]
fn criterion_1_ordinal_space_table() {
    let start = Instant::now();
    let mut rng = rng(101);
    let pool = exponent_pool();

    let check = |a: &Ordinal, class: SpaceClass, g: &Ordinal, ty: ScatteredType| {
        assert_eq!(classify(a), class, "class of {a}");
        assert_eq!(&canonical_g(a), g, "canonical ordinal of {a}");
        assert_eq!(type_of(a), ty, "type of {a}");
    };

    for _ in 0..20 {
        // empty space
        let zero = Ordinal::zero();
        check(
            &zero,
            SpaceClass { compact: None, open: None },
            &zero,
            ScatteredType::Empty,
        );

        // finite discrete space
        let n = rng.gen_range(1..=9);
        let a = Ordinal::from_nat(n);
        check(
            &a,
            SpaceClass { compact: Some((Ordinal::zero(), n)), open: None },
            &a,
            ScatteredType::Full { mu: Ordinal::zero(), rho: Ordinal::zero(), n },
        );

        // single limit power: pure open piece
        let mu = pick(&mut rng, &pool).clone();
        let a = Ordinal::omega_pow(mu.clone());
        check(
            &a,
            SpaceClass { compact: None, open: Some(mu.clone()) },
            &a,
            ScatteredType::Limit(mu.clone()),
        );

        // repeated power: one copy forms the tail, the rest the compact part
        let n = rng.gen_range(1..=8);
        let a = Ordinal::omega_pow_times(mu.clone(), n + 1);
        check(
            &a,
            SpaceClass { compact: Some((mu.clone(), n)), open: Some(mu.clone()) },
            &a,
            ScatteredType::Full { mu: mu.clone(), rho: mu.clone(), n },
        );

        // several terms ending in a finite part: compact space
        let (mu1, mid) = two_exponents(&mut rng, &pool);
        let n1 = rng.gen_range(1..=9);
        let tail = rng.gen_range(1..=9);
        let a = Ordinal::from_terms([
            (mu1.clone(), n1),
            (mid.clone(), rng.gen_range(1..=9)),
            (Ordinal::zero(), tail),
        ]);
        check(
            &a,
            SpaceClass { compact: Some((mu1.clone(), n1)), open: None },
            &Ordinal::omega_pow_times(mu1.clone(), n1).add(&Ordinal::one()),
            ScatteredType::Full { mu: mu1.clone(), rho: Ordinal::zero(), n: n1 },
        );

        // several terms ending in a limit part
        let (mu1, muk) = two_exponents(&mut rng, &pool);
        let n1 = rng.gen_range(1..=9);
        let a = Ordinal::from_terms([(mu1.clone(), n1), (muk.clone(), rng.gen_range(1..=9))]);
        check(
            &a,
            SpaceClass { compact: Some((mu1.clone(), n1)), open: Some(muk.clone()) },
            &Ordinal::omega_pow_times(mu1.clone(), n1).add(&Ordinal::omega_pow(muk.clone())),
            ScatteredType::Full { mu: mu1.clone(), rho: muk.clone(), n: n1 },
        );
    }
    finish(1, "ordinal space table", start, 1000);
}

fn random_type<R: Rng>(rng: &mut R, pool: &[Ordinal]) -> ScatteredType {
    match rng.gen_range(0..10) {
        0 => ScatteredType::Empty,
        1..=3 => ScatteredType::Limit(pick(rng, pool).clone()),
        _ => {
            let mu = pick(rng, pool).clone();
            let rho = if rng.gen_bool(0.3) {
                Ordinal::zero()
            } else {
                loop {
                    let r = pick(rng, pool).clone();
                    if r <= mu {
                        break r;
                    }
                }
            };
            ScatteredType::Full { mu, rho, n: rng.gen_range(1..=9) }
        }
    }
}

/// The addition table, restated rule by rule.
fn oracle_add(a: &ScatteredType, b: &ScatteredType) -> ScatteredType {
    use ScatteredType::*;
    match (a, b) {
        (Empty, t) | (t, Empty) => t.clone(),
        (Limit(x), Limit(y)) => Limit(std::cmp::max(x, y).clone()),
        (Full { mu: m1, rho: r1, n: n1 }, Full { mu: m2, rho: r2, n: n2 }) => {
            let rho = std::cmp::max(r1, r2).clone();
            if m1 == m2 {
                Full { mu: m1.clone(), rho, n: n1 + n2 }
            } else if m1 < m2 {
                Full { mu: m2.clone(), rho, n: *n2 }
            } else {
                Full { mu: m1.clone(), rho, n: *n1 }
            }
        }
        (Full { mu, rho, n }, Limit(l)) | (Limit(l), Full { mu, rho, n }) => {
            if mu >= l {
                Full { mu: mu.clone(), rho: std::cmp::max(rho, l).clone(), n: *n }
            } else {
                Limit(l.clone())
            }
        }
    }
}

#[test]
fn criterion_2_type_monoid_laws() {
    let start = Instant::now();
    let mut rng = rng(202);
    let pool = exponent_pool();

    for _ in 0..500 {
        let a = random_type(&mut rng, &pool);
        let b = random_type(&mut rng, &pool);
        assert_eq!(a.add(&b), oracle_add(&a, &b), "{a} + {b}");
        assert_eq!(a.add(&b), b.add(&a), "commutativity of {a} + {b}");
        assert_eq!(a.add(&ScatteredType::Empty), a, "identity on {a}");
    }
    for _ in 0..500 {
        let a = random_type(&mut rng, &pool);
        let b = random_type(&mut rng, &pool);
        let c = random_type(&mut rng, &pool);
        assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)), "associativity on {a}, {b}, {c}");
    }
    finish(2, "type monoid laws", start, 1000);
}

#[test]
fn criterion_3_po_calculus_against_oracles() {
    let start = Instant::now();
    let mut rng = rng(303);

    for i in 0..300 {
        let p = random_po_system(&mut rng, 10);
        let inv = p.invariants();
        let (nu, lambda, rank) = stonecalc::posys::layer_formula_invariants(&p);
        assert_eq!(inv.nu, nu, "system {i}: nu by layers");
        assert_eq!(inv.lambda, lambda, "system {i}: lambda by layers");
        assert_eq!(inv.rank, rank, "system {i}: rank by layers");

        let stages = derivative_stages(&p);
        assert_eq!(stages.last().unwrap(), &inv.kernel, "system {i}: kernel");
        for (xi, layer) in inv.layers.iter().enumerate() {
            let expected: BTreeSet<String> =
                stages[xi].difference(&stages[xi + 1]).cloned().collect();
            assert_eq!(layer, &expected, "system {i}: layer {xi}");
        }

        if let Err(msg) = check_cb_clauses(&p) {
            panic!("system {i} violates a structural clause: {msg}");
        }
    }
    finish(3, "derivative calculus vs oracles", start, 5000);
}

#[test]
fn criterion_4_reduction_is_a_preserving_morphism() {
    let start = Instant::now();
    let mut rng = rng(404);

    for i in 0..300 {
        let p = random_po_system(&mut rng, 10);
        let (red, map) = p.reduce();
        assert!(red.is_reduced(), "system {i}: reduction is reduced");
        assert!(is_morphism(&map, &p, &red), "system {i}: quotient map is a morphism");

        let image: BTreeSet<String> = map.values().cloned().collect();
        let red_elems: BTreeSet<String> = red.elements().cloned().collect();
        assert_eq!(image, red_elems, "system {i}: map is surjective");

        let inv = p.invariants();
        let rinv = red.invariants();
        assert_eq!(inv.nu, rinv.nu, "system {i}: nu preserved");
        assert_eq!(inv.lambda, rinv.lambda, "system {i}: lambda preserved");

        let img = |s: &BTreeSet<String>| -> BTreeSet<String> {
            s.iter().map(|q| map[q].clone()).collect()
        };
        assert_eq!(img(&inv.kernel), rinv.kernel, "system {i}: kernel maps onto kernel");
        for (xi, layer) in inv.layers.iter().enumerate() {
            assert_eq!(img(layer), rinv.layers[xi], "system {i}: layer {xi} maps onto layer");
        }
        for q in &inv.kernel {
            assert_eq!(inv.rank[q], rinv.rank[&map[q]], "system {i}: rank of {q} preserved");
        }
    }
    finish(4, "reduction preserves the calculus", start, 5000);
}

/// Grid of candidate tuples built from small profiles and heights.
fn tuple_grid() -> Vec<InvariantTuple> {
    let values: Vec<Vec<Ordinal>> = [
        vec![],
        vec!["0"],
        vec!["1"],
        vec!["w"],
        vec!["w*2"],
        vec!["0", "w"],
        vec!["1", "w+1"],
        vec!["0", "1", "w*2"],
    ]
    .iter()
    .map(|names| names.iter().map(|s| ord(s)).collect())
    .collect();

    let rho_pool: Vec<Ordinal> = ["0", "1", "2", "w", "w+1", "w*2"].iter().map(|s| ord(s)).collect();
    let mut grid = Vec::new();
    for fin in &values {
        for inf in &values {
            let profile = RankProfile::new(fin.clone(), inf.clone());
            for rho in &rho_pool {
                if profile.rho_u() > *rho {
                    continue;
                }
                let base = std::cmp::max(rho, &profile.lambda()).clone();
                // height at the kernel bound: no finite top layer
                grid.push(InvariantTuple::from_parts(
                    profile.clone(),
                    base.clone(),
                    rho.clone(),
                    None,
                ));
                // strictly above the bound: successor heights with a count
                for n in [1, 2, 5] {
                    grid.push(InvariantTuple::from_parts(
                        profile.clone(),
                        base.succ(),
                        rho.clone(),
                        Some(n),
                    ));
                }
                grid.push(InvariantTuple::from_parts(
                    profile.clone(),
                    base.succ().succ(),
                    rho.clone(),
                    Some(3),
                ));
            }
        }
    }
    grid
}

#[test]
fn criterion_5_tuple_existence_and_uniqueness_round_trips() {
    let start = Instant::now();

    let grid = tuple_grid();
    assert!(grid.len() >= 200, "grid has only {} tuples", grid.len());
    for t in &grid {
        t.validate().unwrap_or_else(|v| panic!("grid tuple {t:?} rejected: {v}"));
        let e = realize(t).unwrap_or_else(|v| panic!("grid tuple {t:?} unrealizable: {v}"));
        assert_eq!(&e.invariants(), t, "round trip through {e}");
    }

    let mut rng = rng(505);
    for _ in 0..300 {
        let e = random_space_expr(&mut rng, 3);
        let t = e.invariants();
        assert!(t.rho_u <= t.rho, "rho_u <= rho on {e}");
        assert!(t.rho <= t.nu, "rho <= nu on {e}");
        assert!(t.lambda <= t.nu, "lambda <= nu on {e}");
        let boundary = t.lambda == t.nu || t.rho == t.nu;
        assert_eq!(t.n.is_none(), boundary, "top count rule on {e}");
        t.validate().unwrap_or_else(|v| panic!("expression tuple {t:?} rejected: {v}"));

        let (x, y) = e.decompose();
        assert!(homeo_decide(&e, &SpaceExpr::sum(x, y)), "decomposition reassembles {e}");
    }
    finish(5, "tuple round trips", start, 5000);
}

#[test]
fn criterion_6_scattered_spaces_cross_check() {
    let start = Instant::now();
    let mut rng = rng(606);

    for _ in 0..300 {
        let a = random_ordinal(&mut rng, 2);
        let b = random_ordinal(&mut rng, 2);
        let sum = SpaceExpr::sum(SpaceExpr::Ord(a.clone()), SpaceExpr::Ord(b.clone()));
        let monoid = type_of(&a).add(&type_of(&b));
        let canonical = SpaceExpr::Ord(ordinal_of_type(&monoid));
        assert_eq!(
            sum.invariants(),
            canonical.invariants(),
            "sum of ordinal spaces {a} and {b} vs monoid value {monoid}"
        );
        assert!(homeo_decide(&sum, &canonical));
    }

    // every finite-height type maps to a level chain that predicts it back
    for mu in 0u64..=5 {
        let mut types = Vec::new();
        if mu > 0 {
            types.push(ScatteredType::limit(Ordinal::from_nat(mu)).unwrap());
        }
        for rho in 0..=mu {
            for n in 1..=3 {
                types.push(
                    ScatteredType::full(Ordinal::from_nat(mu), Ordinal::from_nat(rho), n).unwrap(),
                );
            }
        }
        for t in types {
            let part = scattered_type_to_extended_po(&t).unwrap();
            let system = part.finite.expect("finite heights materialise");
            let predicted = system.predicted_invariants();
            assert_eq!(Ordinal::from_nat(predicted.nu as u64), t.nu(), "height of {t}");
            assert_eq!(
                Ordinal::from_nat(predicted.rho.expect("level chains are reduced") as u64),
                t.rho(),
                "compact rank of {t}"
            );
            assert_eq!(predicted.n, t.n(), "top count of {t}");
        }
    }
    finish(6, "scattered space cross-check", start, 2000);
}

#[test]
fn criterion_7_measures_and_self_similarity() {
    let start = Instant::now();
    let labels: Vec<Ordinal> = ["0", "1", "2", "w"].iter().map(|s| ord(s)).collect();

    // measure from ranks and ranks from the measure, on deeper trees
    let mut gen = rng(707);
    for _ in 0..200 {
        let m = random_tree(&mut gen, 5, &labels);
        let leaves = m.leaves();
        for node in m.all_nodes() {
            let expected = m
                .leaves_under(&node)
                .unwrap()
                .into_iter()
                .map(|(_, a)| MeasureValue::Rank(a.clone()))
                .fold(MeasureValue::O, |acc, v| acc.join(&v));
            let got = m.sigma_eval(&[node.clone()].into_iter().collect()).unwrap();
            assert_eq!(got, expected, "measure at node {node:?}");
        }
        for (path, label) in &leaves {
            assert_eq!(m.rank_of_point(path).unwrap(), *label, "rank at {path:?}");
            let over_neighbourhoods = (0..=path.len())
                .map(|k| m.sigma_eval(&[path[..k].to_owned()].into_iter().collect()).unwrap())
                .min()
                .unwrap();
            assert_eq!(
                over_neighbourhoods,
                MeasureValue::Rank((*label).clone()),
                "rank at {path:?} as a minimum over neighbourhoods"
            );
        }
    }

    // decision procedures vs brute-force oracles on every node region
    let mut gen = rng(717);
    for _ in 0..100 {
        let m = random_tree(&mut gen, 4, &labels);
        let regions: Vec<Region> = m
            .all_nodes()
            .into_iter()
            .map(|p| [p].into_iter().collect())
            .collect();
        for r in &regions {
            assert_eq!(
                m.sigma_pi_decide(r).unwrap(),
                oracle_sigma_pi(&m, r),
                "pseudo-indecomposability of {r:?} in {m}"
            );
        }
        for r1 in &regions {
            for r2 in &regions {
                assert_eq!(
                    sigma_iso_decide(&m, r1, &m, r2).unwrap(),
                    oracle_sigma_iso(&m, r1, &m, r2),
                    "isomorphism of {r1:?} and {r2:?} in {m}"
                );
            }
        }
    }

    // cross-tree isomorphism decisions
    let mut gen = rng(727);
    let trees: Vec<TreeMeasure> = (0..40).map(|_| random_tree(&mut gen, 4, &labels)).collect();
    let whole: Region = [String::new()].into_iter().collect();
    for pair in trees.windows(2) {
        assert_eq!(
            sigma_iso_decide(&pair[0], &whole, &pair[1], &whole).unwrap(),
            oracle_sigma_iso(&pair[0], &whole, &pair[1], &whole),
            "isomorphism of {} and {}",
            pair[0],
            pair[1]
        );
    }
    finish(7, "measures and self-similarity", start, 30000);
}

#[test]
fn criterion_8_stage_sequence_tables_and_laws() {
    let start = Instant::now();

    for k in 0u64..=8 {
        for variant in [QkVariant::Prop, QkVariant::Literal] {
            let alg = qk_algebra(k, variant);
            let c = qk_closed_set(k);
            let upto = k as usize + 3;
            let h = alg.h_sequence(&c, upto).unwrap();

            for n in 1..=k {
                assert_eq!(h[n as usize - 1], p_nk(n, k), "ladder {k} {variant}: stage {n}");
            }
            let top: BTreeSet<String> = [(k + 2).to_string()].into_iter().collect();
            assert_eq!(h[k as usize], top, "ladder {k} {variant}: stage {}", k + 1);
            match variant {
                QkVariant::Prop => {
                    assert!(h[k as usize + 1].is_empty(), "ladder {k} prop: tail");
                }
                QkVariant::Literal => {
                    assert_eq!(h[k as usize + 1], top, "ladder {k} literal: tail");
                    assert!(h[k as usize + 2].is_empty(), "ladder {k} literal: end");
                }
            }

            // restriction law over every clopen piece
            for a in alg.clopens() {
                let sub = alg.restrict(&a);
                let c_a: BTreeSet<String> = c.intersection(&a).cloned().collect();
                let local = sub.h_sequence(&c_a, upto).unwrap();
                for i in 0..upto {
                    let cut: BTreeSet<String> = h[i].intersection(&a).cloned().collect();
                    assert_eq!(cut, local[i], "ladder {k} {variant}: restriction at stage {}", i + 1);
                }
            }

            // equivariance under a relabeling isomorphism
            let rename = |p: &str| format!("n{p}x");
            let names: Vec<String> = alg.base().elements().map(|p| rename(p)).collect();
            let mut pairs = Vec::new();
            for p in alg.base().elements() {
                for q in alg.base().elements() {
                    if alg.base().lt(p, q) {
                        pairs.push((rename(p), rename(q)));
                    }
                }
            }
            let image = stonecalc::closurealg::ClosureAlgebra::new(
                PoSystem::from_closed_relation(names, pairs).unwrap(),
            );
            let start_image: BTreeSet<String> = c.iter().map(|p| rename(p)).collect();
            let h_image = image.h_sequence(&start_image, upto).unwrap();
            for i in 0..upto {
                let mapped: BTreeSet<String> = h[i].iter().map(|p| rename(p)).collect();
                assert_eq!(mapped, h_image[i], "ladder {k} {variant}: equivariance at {}", i + 1);
            }
        }
    }
    finish(8, "stage sequence tables and laws", start, 2000);
}

#[test]
fn criterion_9_nonprimitivity_certificate() {
    let start = Instant::now();

    for variant in [QkVariant::Prop, QkVariant::Literal] {
        for k in 1u64..=8 {
            for m in 1u64..=8 {
                if k == m {
                    continue;
                }
                let w = incompatibility_witness(k, m, variant)
                    .unwrap()
                    .unwrap_or_else(|| panic!("no separating stage for ({k},{m}) {variant}"));
                assert!(w.stage >= 1);
            }
        }
    }

    let spec = CompletionSpec::new((1..=6).collect(), QkVariant::Prop);
    let report = spec.nonprimitivity_report().unwrap();
    assert_eq!(report.witnesses.len(), 15);
    let pairs: BTreeSet<(usize, usize)> =
        report.witnesses.iter().map(|w| (w.first, w.second)).collect();
    let expected: BTreeSet<(usize, usize)> =
        (1..=6).flat_map(|i| (i + 1..=6).map(move |j| (i, j))).collect();
    assert_eq!(pairs, expected, "every pair of components is separated");
    assert_eq!(report.bad_point, "c");
    assert!(!report.case_away_from_bad_point.is_empty());
    assert!(!report.case_at_bad_point.is_empty());
    assert!(!report.conclusion.is_empty());
    finish(9, "non-primitivity certificate", start, 2000);
}
