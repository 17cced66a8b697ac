//! Acceptance gate: one test per shipped guarantee, each printing a
//! `PASS criterion-NN ...` / `FAIL criterion-NN ...` line (visible with
//! `--nocapture`) and asserting the same verdict.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hicomm::algebra::con;
use hicomm::checks::{
    all_pass, run_basic_props, run_h_eq_tc, run_hhc8, run_hyper_symmetry, run_sdmeet,
    run_structural_laws, run_supernil_nil, run_theorem, run_witness_lemmas, CheckLine, TheoremId,
};
use hicomm::commutator::{build_delta, build_m, build_rect, hyper_commutator, tc_commutator};
use hicomm::corpus;
use hicomm::cube::{
    cut_relation_at, is_reflexive, is_symmetric, is_transitive, Cube, CubeRelation,
};
use hicomm::error::Error;
use hicomm::limits::Limits;
use hicomm::partition::Partition;
use hicomm::relation::theta_gen;
use hicomm::taylor::VerifiedTaylor;
use hicomm::FiniteAlgebra;

const TAYLOR_CORPUS: [&str; 7] =
    ["z2", "z3", "z4", "z2xz2", "semilattice2", "lattice2", "majority3"];

fn conclude(criterion: u32, ok: bool, summary: String) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("{verdict} criterion-{criterion:02} {summary}");
    assert!(ok, "criterion-{criterion:02}: {summary}");
}

fn alg(name: &str) -> FiniteAlgebra {
    corpus::algebra(name).unwrap()
}

fn witness(a: &FiniteAlgebra) -> VerifiedTaylor<'_> {
    let pkg = corpus::package(&a.name).unwrap().unwrap();
    VerifiedTaylor::new(a, pkg).unwrap()
}

fn tuples(items: &[Partition], n: usize) -> Vec<Vec<Partition>> {
    let mut out: Vec<Vec<Partition>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                items.iter().map(move |p| {
                    let mut t2 = t.clone();
                    t2.push(p.clone());
                    t2
                })
            })
            .collect();
    }
    out
}

fn parsed_instances(line: &CheckLine) -> Option<usize> {
    line.context.split("instances=").nth(1)?.trim().parse().ok()
}

/// Vertexwise application of every operation to member tuples stays inside.
fn op_closed(a: &FiniteAlgebra, r: &CubeRelation) -> bool {
    let members: Vec<&Cube> = r.iter().collect();
    if members.is_empty() {
        return true;
    }
    let verts = 1usize << r.dim();
    for op in &a.ops {
        let mut idx = vec![0usize; op.arity];
        'tuples: loop {
            let labels: Vec<u16> = (0..verts)
                .map(|v| {
                    let args: Vec<u16> = idx.iter().map(|&i| members[i].label(v)).collect();
                    op.apply(&args)
                })
                .collect();
            if !r.contains(&Cube::new(r.dim(), labels)) {
                return false;
            }
            let mut p = 0;
            while p < idx.len() {
                idx[p] += 1;
                if idx[p] < members.len() {
                    continue 'tuples;
                }
                idx[p] = 0;
                p += 1;
            }
            break;
        }
    }
    true
}

#[test]
fn criterion_01_structural_laws() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut ok = true;
    // exhaustive over the 2-element universe (the laws are op-independent)
    let lines = run_structural_laws(&alg("z2"), 1, &limits).unwrap();
    ok &= all_pass(&lines);
    // seeded over 3- and 4-element universes
    let mut seeded = 0usize;
    for name in ["z3", "z2xz2"] {
        let lines = run_structural_laws(&alg(name), 1, &limits).unwrap();
        ok &= all_pass(&lines);
        seeded += lines.iter().filter_map(parsed_instances).sum::<usize>();
    }
    ok &= seeded >= 1000;
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 10.0;
    conclude(
        1,
        ok,
        format!("structural laws: exhaustive |A|=2, {seeded} seeded instances |A|<=4, {secs:.1}s"),
    );
}

#[test]
fn criterion_02_generation_oracle() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut ok = true;
    let mut cases = 0usize;
    for name in ["z2", "bare2"] {
        let a = alg(name);
        let all: Vec<Cube> = CubeRelation::all_cubes(2, 2).iter().cloned().collect();
        // brute force: filter every subset of the sixteen dim-2 cubes
        let mut congruences: Vec<CubeRelation> = Vec::new();
        for mask in 0..(1u32 << 16) {
            let r = CubeRelation::from_cubes(
                2,
                2,
                (0..16).filter(|&i| mask & (1 << i) != 0).map(|i| all[i].clone()),
            )
            .unwrap();
            if is_reflexive(&r) && is_symmetric(&r) && is_transitive(&r) && op_closed(&a, &r) {
                congruences.push(r);
            }
        }
        // seeds: every singleton, every pair, and 100 random subsets
        let mut seeds: Vec<Vec<Cube>> = all.iter().map(|c| vec![c.clone()]).collect();
        for i in 0..16 {
            for j in i..16 {
                seeds.push(vec![all[i].clone(), all[j].clone()]);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let k = 3 + rng.gen_range(0..3);
            seeds.push((0..k).map(|_| all[rng.gen_range(0..16)].clone()).collect());
        }
        for seed in &seeds {
            let x = CubeRelation::from_cubes(2, 2, seed.iter().cloned()).unwrap();
            let generated = theta_gen(&a, &x, &limits).unwrap();
            let mut oracle: Option<CubeRelation> = None;
            for c in &congruences {
                if !x.is_subset(c) {
                    continue;
                }
                oracle = Some(match oracle {
                    None => c.clone(),
                    Some(prev) => CubeRelation::from_cubes(
                        2,
                        2,
                        prev.iter().filter(|m| c.contains(m)).cloned(),
                    )
                    .unwrap(),
                });
            }
            ok &= generated == oracle.expect("the full relation contains every seed");
            cases += 1;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    conclude(
        2,
        ok,
        format!("generated congruence equals brute-force intersection on {cases} seeds, {secs:.1}s"),
    );
}

#[test]
fn criterion_03_containment_chain_and_projection() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut ok = true;
    let mut chain_cases = 0usize;
    let mut proj_cases = 0usize;
    for name in corpus::names() {
        let a = alg(name);
        let cons = con(&a).unwrap();
        for n in [2usize, 3] {
            if n == 3 && a.size > 3 {
                continue;
            }
            for tu in tuples(&cons, n) {
                let m = build_m(&a, &tu, &limits).unwrap();
                let d = build_delta(&a, &tu, &limits).unwrap();
                let r = build_rect(&a, &tu, &limits).unwrap();
                ok &= m.is_subset(&d) && d.is_subset(&r);
                chain_cases += 1;
                if n == 3 {
                    // cutting one direction lands on the lower-arity relations
                    for q in 0..3usize {
                        let sub: Vec<Partition> = tu
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| *i != q)
                            .map(|(_, p)| p.clone())
                            .collect();
                        let m2 = build_m(&a, &sub, &limits).unwrap();
                        let d2 = build_delta(&a, &sub, &limits).unwrap();
                        for f in 0..2usize {
                            ok &= cut_relation_at(&m, &[q], f) == m2;
                            ok &= cut_relation_at(&d, &[q], f) == d2;
                            proj_cases += 2;
                        }
                    }
                }
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    conclude(
        3,
        ok,
        format!(
            "M in delta in rect on {chain_cases} tuples; {proj_cases} projection identities; {secs:.1}s"
        ),
    );
}

#[test]
fn criterion_04_commutator_basics() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut ok = true;
    for name in ["z2", "z3", "semilattice2", "lattice2", "majority3", "bare2"] {
        let lines = run_basic_props(&alg(name), 3, &limits).unwrap();
        ok &= all_pass(&lines);
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    conclude(4, ok, format!("order/monotonicity/drop-first laws on |A|<=3 corpus, {secs:.1}s"));
}

#[test]
fn criterion_05_equality_on_the_diagonal() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut ok = true;
    for name in TAYLOR_CORPUS {
        let a = alg(name);
        let w = witness(&a);
        let max_arity = if a.size == 2 { 4 } else { 3 };
        let lines = run_h_eq_tc(&w, max_arity, &limits).unwrap();
        ok &= all_pass(&lines);
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 600.0;
    conclude(
        5,
        ok,
        format!("both commutators agree on constant tuples across the witness corpus, {secs:.1}s"),
    );
}

#[test]
fn criterion_06_characterization_and_symmetry() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut ok = true;
    for name in ["z2", "z3", "semilattice2", "lattice2", "majority3", "bare2"] {
        let lines = run_hyper_symmetry(&alg(name), 3, &limits).unwrap();
        ok &= all_pass(&lines);
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    conclude(
        6,
        ok,
        format!("dual-path agreement, permutation and direction invariance on |A|<=3 corpus, {secs:.1}s"),
    );
}

#[test]
fn criterion_07_nested_commutator_collapse() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut ok = true;
    for name in ["z2", "z3", "semilattice2", "lattice2", "majority3", "bare2"] {
        let lines = run_hhc8(&alg(name), 3, &limits).unwrap();
        ok &= all_pass(&lines);
    }
    // spot checks one dimension up on 2-element algebras, both split points
    for name in ["z2", "lattice2"] {
        let lines = run_hhc8(&alg(name), 4, &limits).unwrap();
        ok &= all_pass(&lines);
        ok &= lines.len() == 2; // m = 1 and m = 2
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 600.0;
    conclude(7, ok, format!("nested-below-flat inequality at n=3 exhaustive, n=4 spot, {secs:.1}s"));
}

#[test]
fn criterion_08_supernilpotence_bounds_nilpotence() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut ok = true;
    for name in TAYLOR_CORPUS {
        let a = alg(name);
        let w = witness(&a);
        let lines = run_supernil_nil(&w, 2, &limits).unwrap();
        ok &= all_pass(&lines);
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    conclude(
        8,
        ok,
        format!("series terms bounded by diagonal commutators across the witness corpus, {secs:.1}s"),
    );
}

#[test]
fn criterion_09_meet_semidistributive_conditions() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut ok = true;
    for name in ["semilattice2", "lattice2"] {
        let lines = run_sdmeet(&alg(name), &limits).unwrap();
        ok &= all_pass(&lines);
    }
    // abelian control: the group must fail saturation at the full congruence
    // and fail neutrality of both commutators
    let lines = run_sdmeet(&alg("z2"), &limits).unwrap();
    ok &= !all_pass(&lines);
    ok &= lines
        .iter()
        .any(|l| l.id == "sdmeet-saturation" && !l.pass && l.context.contains("alpha=0 1"));
    ok &= lines.iter().any(|l| l.id == "sdmeet-neutral-tc" && !l.pass);
    ok &= lines.iter().any(|l| l.id == "sdmeet-neutral-hyper" && !l.pass);
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 120.0;
    conclude(
        9,
        ok,
        format!("semilattice/lattice saturate and are neutral; the group fails both, {secs:.1}s"),
    );
}

#[test]
fn criterion_10_rotation_companion_branch_laws() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let mut ok = true;
    // exhaustive on the 2-element package algebras
    for name in ["z2", "semilattice2", "lattice2"] {
        let a = alg(name);
        let w = witness(&a);
        let lines = run_witness_lemmas(&w, 1, &limits).unwrap();
        ok &= all_pass(&lines);
        ok &= lines.iter().all(|l| l.context.contains("exhaustive"));
    }
    // seeded on the 4-element algebra; at least 10^3 instances per law
    let a = alg("z2xz2");
    let w = witness(&a);
    let lines = run_witness_lemmas(&w, 1, &limits).unwrap();
    ok &= all_pass(&lines);
    let mut per_law: std::collections::BTreeMap<&str, usize> = std::collections::BTreeMap::new();
    for l in &lines {
        *per_law.entry(l.id.as_str()).or_default() += parsed_instances(l).unwrap_or(0);
    }
    for (law, count) in &per_law {
        if *count < 1000 {
            println!("law {law} only reached {count} instances");
            ok = false;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    conclude(
        10,
        ok,
        format!(
            "rotation/companion/branch laws exhaustive |A|=2 and seeded |A|=4 ({} laws), {secs:.1}s",
            per_law.len()
        ),
    );
}

#[test]
fn criterion_11_non_taylor_control() {
    let t0 = Instant::now();
    let limits = Limits::default();
    let a = alg("bare2");
    let cons = con(&a).unwrap();
    let mut ok = true;
    let mut observed = String::new();
    for n in [2usize, 3] {
        for tu in tuples(&cons, n) {
            let t = tc_commutator(&a, &tu, n - 1, &limits).unwrap();
            let h = hyper_commutator(&a, &tu, n - 1, &limits).unwrap();
            ok &= t.leq(&h);
            if n == 2 && tu.iter().all(|p| p.is_full()) {
                observed = format!("[full,full]: tc={t} hyper={h}");
            }
        }
    }
    // without a verified term package the equality suite refuses to run
    let err = run_theorem(TheoremId::HEqTc, &a, None, 2, 0, &limits).unwrap_err();
    ok &= matches!(err, Error::Invalid(_));
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    conclude(
        11,
        ok,
        format!("empty clone: tc below hyper everywhere, equality suite refused; {observed}; {secs:.1}s"),
    );
}
