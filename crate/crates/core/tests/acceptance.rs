//! Acceptance checks; prints one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use ktrop::hyperdual::{dual_hypersurface, enumerate_types, regular_subdivision, subdivision_of_hypersurface, tropical_from_lift, LatticePolytope, LiftFunction};
use ktrop::kweight::{asymptotic_weights, canonical_coarsening, pullback_weights, total_chi, KWeighting};
use ktrop::lattice::{IntMatrix, IntVector};
use ktrop::polyhedral::{is_subdivision, stellar_subdivision, Fan};
use ktrop::project::{check_cycle_balanced, cycle_pushforward, excess_cycle, pushforward_weights, ProjectError, TropicalCycle};
use ktrop::torick::{product_fan, projective_space, KClass, ToricEngine, ToricError};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

const C1_LIMIT: Duration = Duration::from_secs(10);
const C7_LIMIT: Duration = Duration::from_secs(60);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn c1_golden_chi() -> Verdict {
    let start = Instant::now();
    let mut hits = 0;
    let mut misses = Vec::new();
    let p2 = ToricEngine::new(&projective_space(2)).unwrap();
    for d in -5i64..=5 {
        let got = p2.chi_line_bundle(&[b(d), b(0), b(0)]).unwrap();
        if got == b((d + 1) * (d + 2) / 2) {
            hits += 1;
        } else {
            misses.push(format!("P2 O({d})={got}"));
        }
    }
    let p1 = projective_space(1);
    let q = ToricEngine::new(&product_fan(&p1, &p1)).unwrap();
    for a in -3i64..=3 {
        for c in -3i64..=3 {
            let got = q.chi_line_bundle(&[b(a), b(0), b(c), b(0)]).unwrap();
            if got == b((a + 1) * (c + 1)) {
                hits += 1;
            } else {
                misses.push(format!("P1xP1 O({a},{c})={got}"));
            }
        }
    }
    let fans = catalog();
    let mut ranks = std::collections::BTreeSet::new();
    for (name, f) in &fans {
        ranks.insert(f.rank());
        let e = ToricEngine::new(f).unwrap();
        match e.euler_char(&KClass::one(e.nrays())) {
            Ok(x) if x == b(1) => hits += 1,
            other => misses.push(format!("{name} chi(O)={other:?}")),
        }
    }
    let t = start.elapsed();
    let expected = 11 + 49 + fans.len();
    verdict(
        misses.is_empty() && hits == expected && fans.len() >= 6 && ranks.len() == 3 && t < C1_LIMIT,
        format!("{hits}/{expected} exact, {} fans over ranks {ranks:?}, {:.2?} (limit {C1_LIMIT:?}) {misses:?}", fans.len(), t),
    )
}

fn c2_integrality() -> Verdict {
    let mut r = rng(2);
    let mut violations = 0;
    let mut other = Vec::new();
    let mut total = 0;
    for (name, f) in catalog() {
        let e = ToricEngine::new(&f).unwrap();
        for _ in 0..500 {
            let a: Vec<BigInt> = (0..e.nrays()).map(|_| b(r.gen_range(-6..=6))).collect();
            total += 1;
            match e.chi_line_bundle(&a) {
                Ok(_) => {}
                Err(ToricError::IntegralityViolation(_)) => violations += 1,
                Err(err) => other.push(format!("{name}: {err}")),
            }
        }
    }
    verdict(violations == 0 && other.is_empty(), format!("{total} divisors, {violations} integrality violations, {} other errors", other.len()))
}

fn c3_balancing() -> Verdict {
    let mut r = rng(3);
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, f) in catalog() {
        let e = ToricEngine::new(&f).unwrap();
        for i in 0..100 {
            let alpha = random_class(&mut r, e.nrays());
            let k = e.decoration_of_class(&alpha).unwrap();
            let rep = e.is_balanced_fan(&k).unwrap();
            let Some(w) = rep.witness.as_ref().filter(|_| rep.balanced) else {
                failures.push(format!("{name}#{i}: unbalanced"));
                continue;
            };
            if e.decoration_of_class(&e.class_from_witness(w)).unwrap() != k {
                failures.push(format!("{name}#{i}: witness does not re-expand"));
            }
            let tests = e.character_tests(&k).unwrap();
            if tests.iter().any(|t| t.residual != b(0)) {
                failures.push(format!("{name}#{i}: nonzero character residual"));
            }
            checked += 1;
        }
    }
    // P¹: the structure sheaf decorates everything with 1; bump one ray
    // (bumping the origin gives O + O_pt, which is balanced)
    let p1 = projective_space(1);
    let e = ToricEngine::new(&p1).unwrap();
    let k = e.decoration_of_class(&KClass::one(2)).unwrap();
    let before = e.is_balanced_fan(&k).unwrap().balanced;
    let mut bumped = k.clone();
    let ray = p1.cone_of(&[0]).unwrap();
    bumped.set(ray, k.get(ray) + 1);
    let after = e.is_balanced_fan(&bumped).unwrap().balanced;
    verdict(
        failures.is_empty() && before && !after,
        format!("{checked} classes verified, perturbation {before}->{after}, failures {:?}", failures.iter().take(3).collect::<Vec<_>>()),
    )
}

fn c4_subdivision_invariance() -> Verdict {
    let mut r = rng(4);
    let mut failures = Vec::new();
    let mut refined = 0;
    for i in 0..50 {
        let k = random_weighted(&mut r);
        let g = k.complex_arc();
        let (g2, sub) = random_stellar(&mut r, &g);
        let k2 = pullback_weights(&sub, &k).unwrap();
        if total_chi(&g, &k).unwrap() != total_chi(&g2, &k2).unwrap() {
            failures.push(format!("#{i}: total chi"));
        }
        // a stellar cut of an unbounded cell may refine the recession fan; compare there
        let (f1, a1) = asymptotic_weights(&g, &k).unwrap();
        let (f2, a2) = asymptotic_weights(&g2, &k2).unwrap();
        let same = match is_subdivision(&f2.complex_arc(), &f1.complex_arc()) {
            Some(m) => {
                refined += (f1 != f2) as usize;
                pullback_weights(&m, &a1).unwrap().to_map() == a2.to_map()
            }
            None => false,
        };
        if !same {
            failures.push(format!("#{i}: asymptotic weights"));
        }
    }
    verdict(failures.is_empty(), format!("50 triples ({refined} with refined recession fan), failures {failures:?}"))
}

fn c5_coarsening() -> Verdict {
    let k = coarsening_triangle();
    let g = k.complex();
    let s = canonical_coarsening(g, &k).unwrap();
    let count = |w: i64, d: usize| (0..s.num_strata()).filter(|&i| s.weight(i) == &b(w) && s.dim(i) == d).count();
    let centre = s.stratum_of(g.find("v(2,2)").unwrap());
    let triangle = s.num_strata() == 8
        && count(7, 0) == 4
        && count(5, 1) == 3
        && count(2, 2) == 1
        && s.cells(centre).len() == 1
        && s.cells(s.stratum_of(g.find("v(0,0);v(2,2)").unwrap())).len() == 6;

    let mut r = rng(5);
    let mut failures = Vec::new();
    for i in 0..50 {
        let k = random_weighted(&mut r);
        let g = k.complex_arc();
        let s = canonical_coarsening(&g, &k).unwrap();
        if canonical_coarsening(&g, &s.cell_weights()).unwrap() != s {
            failures.push(format!("#{i}: not idempotent"));
        }
        let (g2, sub) = random_stellar(&mut r, &g);
        let k2 = pullback_weights(&sub, &k).unwrap();
        let s2 = canonical_coarsening(&g2, &k2).unwrap();
        if !s2.same_as(&s, &sub) {
            failures.push(format!("#{i}: changes under refinement"));
        }
    }
    verdict(triangle && failures.is_empty(), format!("triangle strata {} (match {triangle}), 50 random, failures {failures:?}", s.num_strata()))
}

fn random_matrix(r: &mut rand_chacha::ChaCha8Rng, rows: usize, cols: usize) -> IntMatrix {
    if rows == 1 {
        return random_row(r, cols);
    }
    loop {
        let m = IntMatrix::new(rows, cols, (0..rows * cols).map(|_| b(r.gen_range(-1..=1))).collect()).unwrap();
        let snf = ktrop::lattice::smith_normal_form(&m);
        if snf.rank() == rows && snf.diag.iter().all(|d| *d == b(1)) {
            return m;
        }
    }
}

/// Balanced cycles: hypersurfaces of random lifts and excess cycles.
fn random_cycle(r: &mut rand_chacha::ChaCha8Rng, polys: &[LatticePolytope]) -> TropicalCycle {
    let p = polys.choose(r).unwrap();
    let h: Vec<i64> = (0..p.lattice_points().len()).map(|_| r.gen_range(-2..=2)).collect();
    tropical_from_lift(p, &LiftFunction::from_values(p, &h).unwrap()).unwrap().0
}

fn c6_pushforward() -> Verdict {
    let mut r = rng(6);
    let fans: Vec<Fan> = catalog().into_iter().filter(|(_, f)| f.rank() >= 2).map(|(_, f)| f).collect();
    let mut agree = 0;
    let mut attempts = 0;
    let mut failures = Vec::new();
    while agree < 20 && attempts < 400 {
        attempts += 1;
        let f = fans.choose(&mut r).unwrap();
        let e = ToricEngine::new(f).unwrap();
        let alpha = random_class(&mut r, e.nrays());
        let k = e.decoration_of_class(&alpha).unwrap();
        let rows = r.gen_range(1..f.rank());
        let pi = random_matrix(&mut r, rows, f.rank());
        match pushforward_weights(&f.complex_arc(), &k, &pi, Some(&alpha)) {
            Ok(p) => {
                let first = &p.representatives[0].1;
                if p.representatives.iter().all(|(_, v)| v == first) {
                    agree += 1;
                } else {
                    failures.push(format!("{:?}", p.representatives));
                }
            }
            // the flattened fan must be smooth for the exact engine; draw again
            Err(ProjectError::UnsupportedRegime(_)) => {}
            Err(err) => failures.push(err.to_string()),
        }
    }
    let polys = plane_polytopes();
    let solids = vec![
        LatticePolytope::new(vec![iv(&[0, 0, 0]), iv(&[1, 0, 0]), iv(&[0, 1, 0]), iv(&[0, 0, 1])]).unwrap(),
        LatticePolytope::new(vec![iv(&[0, 0, 0]), iv(&[2, 0, 0]), iv(&[0, 1, 0]), iv(&[0, 0, 1])]).unwrap(),
    ];
    let mut balanced = 0;
    for i in 0..50 {
        let (c, pi) = if i % 5 == 4 {
            (random_cycle(&mut r, &solids), random_matrix(&mut r, 2, 3))
        } else {
            (random_cycle(&mut r, &polys), random_row(&mut r, 2))
        };
        match cycle_pushforward(&c, &pi) {
            Ok(pc) if check_cycle_balanced(&pc).balanced => balanced += 1,
            Ok(_) => failures.push(format!("cycle #{i} unbalanced image")),
            Err(err) => failures.push(format!("cycle #{i}: {err}")),
        }
    }
    verdict(
        agree == 20 && balanced == 50 && failures.is_empty(),
        format!("{agree}/20 witness cases agree ({attempts} draws), {balanced}/50 pushed cycles balanced, failures {:?}", failures.iter().take(3).collect::<Vec<_>>()),
    )
}

fn plane_polytopes() -> Vec<LatticePolytope> {
    let poly = |v: &[&[i64]]| LatticePolytope::new(v.iter().map(|x| iv(x)).collect()).unwrap();
    vec![
        poly(&[&[0, 0], &[1, 0], &[0, 1]]),
        poly(&[&[0, 0], &[2, 0], &[0, 2]]),
        poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]),
        poly(&[&[0, 0], &[2, 0], &[0, 1], &[2, 1]]),
        poly(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2]]),
        poly(&[&[0, 0], &[1, 0], &[2, 1], &[2, 2], &[1, 2], &[0, 1]]),
    ]
}

fn c7_finiteness() -> Verdict {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for d in 1..=6i64 {
        let p = LatticePolytope::segment(0, d).unwrap();
        let n = enumerate_types(&p, d as u32).unwrap().len();
        let n2 = enumerate_types(&p, d as u32 + 2).unwrap().len();
        let want = 1usize << (d - 1);
        ok &= n == want && n2 == want;
        notes.push(format!("d={d}:{n}/{n2}"));
    }
    let mut polys: Vec<LatticePolytope> = (1..=3).map(|d| LatticePolytope::segment(0, d).unwrap()).collect();
    polys.extend(plane_polytopes());
    let mut solids = vec![
        LatticePolytope::new(vec![iv(&[0, 0, 0]), iv(&[1, 0, 0]), iv(&[0, 1, 0]), iv(&[0, 0, 1])]).unwrap(),
        LatticePolytope::new((0..8).map(|i| iv(&[i & 1, (i >> 1) & 1, (i >> 2) & 1])).collect()).unwrap(),
    ];
    solids.extend(polys.iter().cloned());
    let mut duals = 0;
    for p in &solids {
        let c = dual_hypersurface(p).unwrap();
        ok &= check_cycle_balanced(&c).balanced;
        duals += 1;
    }
    let mut r = rng(7);
    let mut roundtrips = 0;
    let mut bad = Vec::new();
    for i in 0..100 {
        let p = polys.choose(&mut r).unwrap();
        let h: Vec<i64> = (0..p.lattice_points().len()).map(|_| r.gen_range(-3..=3)).collect();
        let lift = LiftFunction::from_values(p, &h).unwrap();
        let (c, s) = tropical_from_lift(p, &lift).unwrap();
        let balanced = check_cycle_balanced(&c).balanced;
        let back = subdivision_of_hypersurface(&c, p);
        if balanced && back.as_ref() == Ok(&s) && s == regular_subdivision(p, &lift).unwrap() {
            roundtrips += 1;
        } else {
            bad.push(format!("#{i} h={h:?} balanced={balanced} back={:?}", back.err()));
        }
    }
    let t = start.elapsed();
    verdict(
        ok && roundtrips == 100 && t < C7_LIMIT,
        format!("{} ; {duals} duals balanced ; {roundtrips}/100 roundtrips ; {:.2?} (limit {C7_LIMIT:?}) {:?}", notes.join(" "), t, bad.iter().take(2).collect::<Vec<_>>()),
    )
}

fn c8_excess() -> Verdict {
    let mut r = rng(8);
    let fans: Vec<Fan> = catalog().into_iter().filter(|(_, f)| f.rank() >= 2).map(|(_, f)| f).collect();
    let mut ok = 0;
    let mut failures = Vec::new();
    for i in 0..20 {
        let mut f = fans.choose(&mut r).unwrap().clone();
        // blow up along a random cone of dimension ≥ 2 (stays smooth)
        if i % 2 == 1 {
            let cones: Vec<&Vec<usize>> = f.cones().iter().filter(|c| c.len() >= 2).collect();
            let c = cones.choose(&mut r).unwrap();
            let mut v = vec![b(0); f.rank()];
            for &ray in c.iter() {
                for (x, y) in v.iter_mut().zip(&f.rays()[ray].entries) {
                    *x += y;
                }
            }
            let (g2, _) = stellar_subdivision(&f.complex_arc(), &IntVector::new(v).to_rat()).unwrap();
            f = Fan::from_complex(g2).unwrap();
        }
        let e = ToricEngine::new(&f).unwrap();
        let alpha = random_class(&mut r, e.nrays());
        let k: KWeighting = e.decoration_of_class(&alpha).unwrap();
        let delta = if f.rank() == 2 { f.origin() } else { f.cone_of(&[r.gen_range(0..f.rays().len())]).unwrap() };
        match excess_cycle(f.complex(), &k, delta) {
            Ok(c) if check_cycle_balanced(&c).balanced => ok += 1,
            Ok(c) => failures.push(format!("#{i}: {:?}", check_cycle_balanced(&c).defects)),
            Err(err) => failures.push(format!("#{i}: {err}")),
        }
    }
    verdict(ok == 20, format!("{ok}/20 configurations balanced, failures {failures:?}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("chi golden values", c1_golden_chi),
        ("integrality", c2_integrality),
        ("balancing soundness", c3_balancing),
        ("subdivision invariance", c4_subdivision_invariance),
        ("coarsening", c5_coarsening),
        ("pushforward coherence", c6_pushforward),
        ("finiteness demo", c7_finiteness),
        ("excess-chi balancing", c8_excess),
    ];
    // optional criterion numbers on the command line select a subset
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let t = Instant::now();
        let v = f();
        if !v.pass {
            failed += 1;
        }
        println!("criterion {} [{name}]: {} ({:.2?}) {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, t.elapsed(), v.detail);
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
