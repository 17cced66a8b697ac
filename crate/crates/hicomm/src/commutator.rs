//! The matrix tolerance M, its closure Δ, the rectangular ceiling, centrality
//! scans, and the two commutator fixpoints (term-condition over M, relational
//! over Δ), plus the low-arity membership characterizations and the nest
//! filter used by the nesting-inequality harness.

use std::collections::BTreeSet;

use crate::algebra::{cg, is_congruence, FiniteAlgebra};
use crate::cube::{
    commutator_cube, gen_cube, is_symmetric, scatter_vertex, Cube, CubeRelation, Label,
};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::partition::Partition;
use crate::relation::{generate, tc_ceiling};

fn validate(alg: &FiniteAlgebra, thetas: &[Partition], congruences: bool) -> Result<()> {
    if thetas.is_empty() {
        return Err(Error::Invalid("at least one congruence argument required".into()));
    }
    if thetas.len() > crate::cube::MAX_DIM {
        return Err(Error::Invalid(format!(
            "dimension {} exceeds the supported maximum {}",
            thetas.len(),
            crate::cube::MAX_DIM
        )));
    }
    for (i, t) in thetas.iter().enumerate() {
        if t.size() != alg.size {
            return Err(Error::Invalid(format!(
                "argument {} partitions {} elements but the algebra has {}",
                i,
                t.size(),
                alg.size
            )));
        }
        if congruences && !is_congruence(alg, t) {
            return Err(Error::Invalid(format!(
                "argument {} ({}) is not a congruence of {}",
                i, t, alg.name
            )));
        }
    }
    Ok(())
}

/// Depth-first walk over all cubes whose direction-i lines all lie in
/// thetas[i], assigning vertex labels in increasing vertex order. Every line
/// constraint involves a vertex below the one being assigned, so dead
/// branches are cut as early as possible. The sink returns false to abort.
fn rect_walk(thetas: &[Partition], sink: &mut dyn FnMut(&[Label]) -> bool) -> bool {
    let n = thetas.len();
    let k = thetas[0].size();
    let nv = 1usize << n;
    // class -> members, per direction, so the first constraint enumerates
    // only viable candidates instead of the whole universe
    let members: Vec<Vec<Vec<Label>>> = thetas
        .iter()
        .map(|t| {
            let mut m = vec![Vec::new(); t.num_classes()];
            for x in 0..k {
                m[t.class_of(x)].push(x as Label);
            }
            m
        })
        .collect();
    let mut labels = vec![0 as Label; nv];

    fn rec(
        v: usize,
        nv: usize,
        k: usize,
        thetas: &[Partition],
        members: &[Vec<Vec<Label>>],
        labels: &mut [Label],
        sink: &mut dyn FnMut(&[Label]) -> bool,
    ) -> bool {
        if v == nv {
            return sink(labels);
        }
        let fits = |cand: Label, labels: &[Label]| {
            let mut bits = v;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if !thetas[i].same(labels[v ^ (1 << i)] as usize, cand as usize) {
                    return false;
                }
            }
            true
        };
        if v == 0 {
            for cand in 0..k as Label {
                labels[0] = cand;
                if !rec(1, nv, k, thetas, members, labels, sink) {
                    return false;
                }
            }
        } else {
            let i0 = v.trailing_zeros() as usize;
            let class = thetas[i0].class_of(labels[v ^ (1 << i0)] as usize);
            // clone keeps the borrow checker happy; classes are small
            let cands = members[i0][class].clone();
            for cand in cands {
                if fits(cand, labels) {
                    labels[v] = cand;
                    if !rec(v + 1, nv, k, thetas, members, labels, sink) {
                        return false;
                    }
                }
            }
        }
        true
    }

    rec(0, nv, k, thetas, &members, &mut labels, sink)
}

/// Number of cubes in the rectangular relation, or None once the count
/// exceeds `cap` (the walk aborts rather than finishing).
pub fn rect_count(thetas: &[Partition], cap: usize) -> Option<usize> {
    let mut count = 0usize;
    let completed = rect_walk(thetas, &mut |_| {
        count += 1;
        count <= cap
    });
    if completed {
        Some(count)
    } else {
        None
    }
}

/// All cubes whose direction-i lines are thetas[i]-pairs, for every i.
pub fn build_rect(
    alg: &FiniteAlgebra,
    thetas: &[Partition],
    limits: &Limits,
) -> Result<CubeRelation> {
    validate(alg, thetas, false)?;
    let n = thetas.len();
    let mut cubes = Vec::new();
    let mut over = false;
    rect_walk(thetas, &mut |labels| {
        if cubes.len() >= limits.max_cubes {
            over = true;
            return false;
        }
        cubes.push(Cube::new(n, labels.to_vec()));
        true
    });
    if over {
        return Err(Error::Budget { stored: limits.max_cubes, limit: limits.max_cubes });
    }
    CubeRelation::from_cubes(alg.size, n, cubes)
}

/// The ceiling passed to the closure engines: generation from the matrix
/// generators stays inside the rectangular relation (each theta is a
/// congruence, so vertexwise operations, refl/sym images, and directional
/// compositions of in-rectangle cubes keep every line inside its theta).
/// Saturating the rectangle count therefore proves the closure is finished.
fn rect_ceiling(thetas: &[Partition], limits: &Limits) -> Option<usize> {
    rect_count(thetas, limits.max_cubes)
}

fn matrix_generators(thetas: &[Partition]) -> Vec<Cube> {
    let n = thetas.len();
    let mut gens = Vec::new();
    for (i, theta) in thetas.iter().enumerate() {
        for (x, y) in theta.related_pairs() {
            gens.push(gen_cube(i, x as Label, y as Label, n));
        }
    }
    gens
}

/// The tolerance generated by the one-direction generator cubes of the
/// arguments: gen_cube(i,x,y) for every (x,y) in thetas[i]. The generator
/// set is already closed under refl and sym, so closing under the operations
/// alone gives the same relation; the engine runs with the structural pass
/// enabled, which only shortens the fixpoint.
pub fn build_m(
    alg: &FiniteAlgebra,
    thetas: &[Partition],
    limits: &Limits,
) -> Result<CubeRelation> {
    validate(alg, thetas, true)?;
    let ceiling = rect_ceiling(thetas, limits);
    generate(alg, thetas.len(), matrix_generators(thetas), true, ceiling, limits)
}

/// Directional-transitive closure of the matrix tolerance; a
/// higher-dimensional congruence.
pub fn build_delta(
    alg: &FiniteAlgebra,
    thetas: &[Partition],
    limits: &Limits,
) -> Result<CubeRelation> {
    validate(alg, thetas, true)?;
    let ceiling = rect_ceiling(thetas, limits);
    let m = generate(alg, thetas.len(), matrix_generators(thetas), true, ceiling, limits)?;
    tc_ceiling(&m, limits, ceiling)
}

/// Scan R for a centrality violation against delta in the given direction.
/// Returns a witness cube, or None when centrality holds.
///
/// For a symmetric R the pivot form is used: a violation is a cube whose
/// supporting lines all lie in delta while the pivot line does not (the sym
/// images of a raw violation move its one off-delta line to the pivot, so
/// the two scans find violations together). Otherwise the raw count applies:
/// exactly all-but-one of the direction lines lie in delta.
pub fn has_centrality(
    r: &CubeRelation,
    delta: &Partition,
    direction: usize,
) -> Result<Option<Cube>> {
    if r.dim() < 2 {
        return Err(Error::Invalid("centrality needs dimension at least 2".into()));
    }
    if direction >= r.dim() {
        return Err(Error::Invalid(format!(
            "direction {} out of range for dimension {}",
            direction,
            r.dim()
        )));
    }
    if delta.size() != r.universe() {
        return Err(Error::Invalid(format!(
            "partition of {} elements against a relation over {}",
            delta.size(),
            r.universe()
        )));
    }
    if is_symmetric(r) {
        Ok(pivot_violation(r, delta, direction))
    } else {
        Ok(raw_violation(r, delta, direction))
    }
}

fn line_endpoints(dim: usize, direction: usize, f: usize) -> (usize, usize) {
    let rest = !(1u32 << direction) & ((1u32 << dim) - 1);
    let lo = scatter_vertex(f, rest);
    (lo, lo | (1 << direction))
}

fn pivot_violation(r: &CubeRelation, delta: &Partition, direction: usize) -> Option<Cube> {
    let half = 1usize << (r.dim() - 1);
    for gamma in r.iter() {
        let mut supported = true;
        for f in 0..half - 1 {
            let (lo, hi) = line_endpoints(r.dim(), direction, f);
            if !delta.same(gamma.label(lo) as usize, gamma.label(hi) as usize) {
                supported = false;
                break;
            }
        }
        if supported {
            let (lo, hi) = line_endpoints(r.dim(), direction, half - 1);
            if !delta.same(gamma.label(lo) as usize, gamma.label(hi) as usize) {
                return Some(gamma.clone());
            }
        }
    }
    None
}

fn raw_violation(r: &CubeRelation, delta: &Partition, direction: usize) -> Option<Cube> {
    let half = 1usize << (r.dim() - 1);
    for gamma in r.iter() {
        let mut in_delta = 0usize;
        for f in 0..half {
            let (lo, hi) = line_endpoints(r.dim(), direction, f);
            if delta.same(gamma.label(lo) as usize, gamma.label(hi) as usize) {
                in_delta += 1;
            }
        }
        if in_delta == half - 1 {
            return Some(gamma.clone());
        }
    }
    None
}

/// Least congruence delta such that the symmetric relation r has
/// delta-centrality in the given direction. Each round collects the pivot
/// pairs of every current violation (those pairs are forced into any
/// centrality-satisfying congruence above the current delta) and closes the
/// enlarged pair set back up to a congruence.
fn centrality_fixpoint(
    alg: &FiniteAlgebra,
    r: &CubeRelation,
    direction: usize,
    limits: &Limits,
) -> Result<Partition> {
    debug_assert!(is_symmetric(r));
    let half = 1usize << (r.dim() - 1);
    let mut seed: Vec<(usize, usize)> = Vec::new();
    let mut delta = Partition::diag(alg.size);
    loop {
        limits.check_time("centrality fixpoint")?;
        let mut fresh: BTreeSet<(usize, usize)> = BTreeSet::new();
        for gamma in r.iter() {
            let mut supported = true;
            for f in 0..half - 1 {
                let (lo, hi) = line_endpoints(r.dim(), direction, f);
                if !delta.same(gamma.label(lo) as usize, gamma.label(hi) as usize) {
                    supported = false;
                    break;
                }
            }
            if supported {
                let (lo, hi) = line_endpoints(r.dim(), direction, half - 1);
                let (a, b) = (gamma.label(lo) as usize, gamma.label(hi) as usize);
                if !delta.same(a, b) {
                    fresh.insert((a.min(b), a.max(b)));
                }
            }
        }
        if fresh.is_empty() {
            return Ok(delta);
        }
        seed.extend(fresh);
        delta = cg(alg, &seed);
    }
}

/// Term-condition commutator of the argument tuple: the least congruence
/// delta such that the matrix tolerance has delta-centrality in the chosen
/// direction (default use: the last direction).
pub fn tc_commutator(
    alg: &FiniteAlgebra,
    thetas: &[Partition],
    direction: usize,
    limits: &Limits,
) -> Result<Partition> {
    validate(alg, thetas, true)?;
    if thetas.len() < 2 {
        return Err(Error::Invalid("commutators need at least two arguments".into()));
    }
    if direction >= thetas.len() {
        return Err(Error::Invalid(format!(
            "direction {} out of range for {} arguments",
            direction,
            thetas.len()
        )));
    }
    let m = build_m(alg, thetas, limits)?;
    centrality_fixpoint(alg, &m, direction, limits)
}

/// The commutator computed over the closed relation: pairs whose commutator
/// cube lies in Δ. Verified on every run against the centrality fixpoint
/// over Δ; a mismatch (or a pair set that is not a congruence) is an
/// internal error, never a silently returned value.
pub(crate) fn hyper_from_delta(
    alg: &FiniteAlgebra,
    delta: &CubeRelation,
    direction: usize,
    limits: &Limits,
) -> Result<Partition> {
    let n = delta.dim();
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for x in 0..alg.size {
        for y in 0..alg.size {
            if delta.contains(&commutator_cube(x as Label, y as Label, n)) {
                pairs.insert((x, y));
            }
        }
    }
    let as_vec: Vec<(usize, usize)> = pairs.iter().cloned().collect();
    let part = Partition::from_pairs(alg.size, &as_vec);
    let closed: BTreeSet<(usize, usize)> = part.related_pairs().into_iter().collect();
    if closed != pairs {
        return Err(Error::Internal(
            "commutator-cube membership did not define an equivalence relation".into(),
        ));
    }
    if !is_congruence(alg, &part) {
        return Err(Error::Internal(
            "commutator-cube membership defined a non-congruence partition".into(),
        ));
    }
    let fixpoint = centrality_fixpoint(alg, delta, direction, limits)?;
    if fixpoint != part {
        return Err(Error::Internal(format!(
            "membership partition {} disagrees with the centrality fixpoint {}",
            part, fixpoint
        )));
    }
    Ok(part)
}

/// Relational commutator of the argument tuple, computed from Δ membership
/// of the commutator cubes and cross-checked against the centrality
/// fixpoint over Δ.
pub fn hyper_commutator(
    alg: &FiniteAlgebra,
    thetas: &[Partition],
    direction: usize,
    limits: &Limits,
) -> Result<Partition> {
    validate(alg, thetas, true)?;
    if thetas.len() < 2 {
        return Err(Error::Invalid("commutators need at least two arguments".into()));
    }
    if direction >= thetas.len() {
        return Err(Error::Invalid(format!(
            "direction {} out of range for {} arguments",
            direction,
            thetas.len()
        )));
    }
    let delta = build_delta(alg, thetas, limits)?;
    hyper_from_delta(alg, &delta, direction, limits)
}

/// One pair's worth of low-arity membership evidence: the named conditions,
/// in report order.
#[derive(Debug, Clone)]
pub struct LowArityReport {
    pub item_names: Vec<String>,
    /// ((x, y), item truth values) for every ordered pair
    pub per_pair: Vec<((Label, Label), Vec<bool>)>,
    pub all_agree: bool,
}

/// Evaluate the dimension-2/3 membership characterizations independently:
/// commutator membership, commutator-cube membership in Δ, and (for each
/// direction) existence of a cube in Δ whose supporting lines in that
/// direction are constant while the pivot line is the candidate pair. All
/// conditions are provably equivalent; the report shows whether the
/// implementation reproduces that.
pub fn low_arity_characterizations(
    alg: &FiniteAlgebra,
    thetas: &[Partition],
    limits: &Limits,
) -> Result<LowArityReport> {
    validate(alg, thetas, true)?;
    let n = thetas.len();
    if n != 2 && n != 3 {
        return Err(Error::Invalid("characterizations are for 2 or 3 arguments".into()));
    }
    let delta = build_delta(alg, thetas, limits)?;
    let hyper = hyper_from_delta(alg, &delta, n - 1, limits)?;

    let mut item_names = vec!["commutator-membership".to_string(), "pivot-cube-in-delta".to_string()];
    for i in 0..n {
        item_names.push(format!("constant-supports-direction-{i}"));
    }

    let k = alg.size;
    let mut per_pair = Vec::new();
    let mut all_agree = true;
    for x in 0..k {
        for y in 0..k {
            let mut items = Vec::with_capacity(2 + n);
            items.push(hyper.same(x, y));
            items.push(delta.contains(&commutator_cube(x as Label, y as Label, n)));
            for i in 0..n {
                items.push(constant_support_witness(&delta, i, x as Label, y as Label, k));
            }
            if items.iter().any(|&b| b != items[0]) {
                all_agree = false;
            }
            per_pair.push(((x as Label, y as Label), items));
        }
    }
    Ok(LowArityReport { item_names, per_pair, all_agree })
}

/// Does Δ contain a cube whose direction-i supporting lines are constant
/// (any constants) and whose direction-i pivot line is (x, y)? Searches all
/// assignments of constants to the supporting reduced vertices.
fn constant_support_witness(
    delta: &CubeRelation,
    direction: usize,
    x: Label,
    y: Label,
    k: usize,
) -> bool {
    let n = delta.dim();
    let half = 1usize << (n - 1);
    let supports = half - 1;
    let mut assignment = vec![0 as Label; supports];
    loop {
        let mut labels = vec![0 as Label; 1 << n];
        for f in 0..half {
            let (lo, hi) = line_endpoints(n, direction, f);
            if f < supports {
                labels[lo] = assignment[f];
                labels[hi] = assignment[f];
            } else {
                labels[lo] = x;
                labels[hi] = y;
            }
        }
        if delta.contains(&Cube::new(n, labels)) {
            return true;
        }
        // odometer over the constant assignment
        let mut pos = 0;
        loop {
            if pos == supports {
                return false;
            }
            assignment[pos] += 1;
            if (assignment[pos] as usize) < k {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

/// Cubes of Δ whose lower-m-coordinate cuts are all commutator cubes: for
/// every assignment g of the first m coordinates, the sub-cube over the
/// remaining directions is constant except possibly at its own pivot.
pub fn build_nest(
    alg: &FiniteAlgebra,
    thetas: &[Partition],
    m: usize,
    limits: &Limits,
) -> Result<CubeRelation> {
    validate(alg, thetas, true)?;
    let n = thetas.len();
    if n < 3 {
        return Err(Error::Invalid("the nest needs at least three arguments".into()));
    }
    if m == 0 || m > n - 2 {
        return Err(Error::Invalid(format!(
            "nest split {} out of range 1..={} for {} arguments",
            m,
            n - 2,
            n
        )));
    }
    let delta = build_delta(alg, thetas, limits)?;
    let lower = 1usize << m;
    let upper = 1usize << (n - m);
    let mut kept = Vec::new();
    for gamma in delta.iter() {
        let mut ok = true;
        'outer: for g in 0..lower {
            let a = gamma.label(g);
            for h in 1..upper - 1 {
                if gamma.label(g | (h << m)) != a {
                    ok = false;
                    break 'outer;
                }
            }
        }
        if ok {
            kept.push(gamma.clone());
        }
    }
    CubeRelation::from_cubes(alg.size, n, kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::con;
    use crate::corpus;
    use crate::cube::cut_relation_at;
    use crate::relation::subalgebra_gen;

    fn cube(dim: usize, labels: &[Label]) -> Cube {
        Cube::new(dim, labels.to_vec())
    }

    fn rel(universe: usize, dim: usize, cubes: &[Cube]) -> CubeRelation {
        CubeRelation::from_cubes(universe, dim, cubes.iter().cloned()).unwrap()
    }

    fn full(k: usize) -> Partition {
        Partition::full(k)
    }

    fn diag(k: usize) -> Partition {
        Partition::diag(k)
    }

    #[test]
    fn matrix_in_dimension_one_is_the_congruence_itself() {
        let limits = Limits::default();
        let z4 = corpus::algebra("z4").unwrap();
        let theta = Partition::parse("0 2|1 3", 4).unwrap();
        let m = build_m(&z4, &[theta.clone()], &limits).unwrap();
        let expect: Vec<Cube> = theta
            .related_pairs()
            .into_iter()
            .map(|(a, b)| cube(1, &[a as Label, b as Label]))
            .collect();
        assert_eq!(m, rel(4, 1, &expect));
        // and so is its closure
        let d = build_delta(&z4, &[theta], &limits).unwrap();
        assert_eq!(m, d);
    }

    #[test]
    fn matrix_for_empty_clone_matches_hand_enumeration() {
        let limits = Limits::default();
        let bare = corpus::algebra("bare2").unwrap();
        let m = build_m(&bare, &[full(2), full(2)], &limits).unwrap();
        let mut expect = Vec::new();
        for i in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    expect.push(gen_cube(i, x, y, 2));
                }
            }
        }
        assert_eq!(m, rel(2, 2, &expect));
        assert_eq!(m.len(), 6);
    }

    #[test]
    fn matrix_equals_plain_operation_closure() {
        // the generator set is refl/sym closed, so closing under the
        // operations alone must give the same tolerance
        let limits = Limits::default();
        for name in ["z2", "z4", "semilattice2", "lattice2", "majority3"] {
            let alg = corpus::algebra(name).unwrap();
            let thetas = [full(alg.size), full(alg.size)];
            let m = build_m(&alg, &thetas, &limits).unwrap();
            let gens = rel(alg.size, 2, &matrix_generators(&thetas));
            let sg = subalgebra_gen(&alg, &gens, &limits).unwrap();
            assert_eq!(m, sg, "{name}");
        }
    }

    #[test]
    fn containment_chain_matrix_delta_rect() {
        let limits = Limits::default();
        let cases: Vec<(&str, Vec<Partition>)> = vec![
            ("z2", vec![full(2), full(2)]),
            ("z4", vec![Partition::parse("0 2|1 3", 4).unwrap(), full(4)]),
            ("semilattice2", vec![full(2), full(2)]),
            ("lattice2", vec![full(2), full(2)]),
            ("majority3", vec![full(3), full(3)]),
            ("bare2", vec![full(2), full(2)]),
            ("z2", vec![full(2), full(2), full(2)]),
        ];
        for (name, thetas) in cases {
            let alg = corpus::algebra(name).unwrap();
            let m = build_m(&alg, &thetas, &limits).unwrap();
            let d = build_delta(&alg, &thetas, &limits).unwrap();
            let r = build_rect(&alg, &thetas, &limits).unwrap();
            assert!(m.is_subset(&d), "{name}: M ⊆ Δ");
            assert!(d.is_subset(&r), "{name}: Δ ⊆ rect");
        }
    }

    #[test]
    fn rect_matches_brute_force_filter() {
        let limits = Limits::default();
        let z4 = corpus::algebra("z4").unwrap();
        let theta = Partition::parse("0 2|1 3", 4).unwrap();
        let thetas = [theta.clone(), full(4)];
        let fast = build_rect(&z4, &thetas, &limits).unwrap();
        let mut slow = Vec::new();
        for c in CubeRelation::all_cubes(4, 2).iter() {
            let ok = (0..2).all(|i| {
                crate::cube::lines(c, i).iter().all(|l| l.in_partition(&thetas[i]))
            });
            if ok {
                slow.push(c.clone());
            }
        }
        assert_eq!(fast, rel(4, 2, &slow));
        assert_eq!(rect_count(&thetas, usize::MAX), Some(fast.len()));
        // direction-0 lines live inside a 2-element class (4·2 choices for
        // the bottom line, then 2·2 for the top), direction 1 unconstrained
        assert_eq!(fast.len(), 8 * 8);

        // degenerate corners
        let consts = build_rect(&z4, &[diag(4), diag(4)], &limits).unwrap();
        assert_eq!(
            consts,
            rel(4, 2, &(0..4).map(|x| Cube::constant(2, x as Label)).collect::<Vec<_>>())
        );
        let everything = build_rect(&z4, &[full(4), full(4)], &limits).unwrap();
        assert_eq!(everything, CubeRelation::all_cubes(4, 2));
    }

    #[test]
    fn rect_budget_is_enforced() {
        let tiny = Limits::with_max_cubes(5);
        let z4 = corpus::algebra("z4").unwrap();
        assert!(matches!(
            build_rect(&z4, &[full(4), full(4)], &tiny),
            Err(Error::Budget { .. })
        ));
        assert_eq!(rect_count(&[full(4), full(4)], 5), None);
    }

    #[test]
    fn delta_cut_law() {
        // cutting away a direction leaves the closure of the remaining
        // arguments, at every assignment of the cut coordinate
        let limits = Limits::default();
        let z4 = corpus::algebra("z4").unwrap();
        let theta = Partition::parse("0 2|1 3", 4).unwrap();
        let d2 = build_delta(&z4, &[theta.clone(), full(4)], &limits).unwrap();
        let d_theta = build_delta(&z4, &[theta.clone()], &limits).unwrap();
        let d_full = build_delta(&z4, &[full(4)], &limits).unwrap();
        for f in 0..2 {
            // cutting direction 0 (the theta coordinate) leaves the full closure
            assert_eq!(cut_relation_at(&d2, &[0], f), d_full);
            // cutting direction 1 leaves the theta closure
            assert_eq!(cut_relation_at(&d2, &[1], f), d_theta);
        }
    }

    #[test]
    fn delta_on_semilattice_saturates_the_rectangle() {
        let limits = Limits::default();
        let s2 = corpus::algebra("semilattice2").unwrap();
        let d = build_delta(&s2, &[full(2), full(2)], &limits).unwrap();
        assert_eq!(d, CubeRelation::all_cubes(2, 2));
    }

    #[test]
    fn group_delta_is_the_even_parity_relation() {
        let limits = Limits::default();
        let z2 = corpus::algebra("z2").unwrap();
        let m = build_m(&z2, &[full(2), full(2)], &limits).unwrap();
        let d = build_delta(&z2, &[full(2), full(2)], &limits).unwrap();
        assert_eq!(m, d);
        assert_eq!(d.len(), 8);
        for g in d.iter() {
            assert_eq!((0..4).fold(0, |acc, v| acc ^ g.label(v)), 0);
        }
    }

    #[test]
    fn empty_clone_closure_is_abelian() {
        // with no operations the closure adds nothing to the six generator
        // cubes, no centrality violation exists at the diagonal, and both
        // commutators of (full, full) collapse to the diagonal
        let limits = Limits::default();
        let bare = corpus::algebra("bare2").unwrap();
        let thetas = [full(2), full(2)];
        let m = build_m(&bare, &thetas, &limits).unwrap();
        let d = build_delta(&bare, &thetas, &limits).unwrap();
        assert_eq!(m, d);
        assert_eq!(d.len(), 6);
        for i in 0..2 {
            assert_eq!(has_centrality(&d, &diag(2), i).unwrap(), None);
        }
        assert!(tc_commutator(&bare, &thetas, 1, &limits).unwrap().is_diag());
        assert!(hyper_commutator(&bare, &thetas, 1, &limits).unwrap().is_diag());
    }

    #[test]
    fn centrality_trivial_cases() {
        let limits = Limits::default();
        let z2 = corpus::algebra("z2").unwrap();
        let d = build_delta(&z2, &[full(2), full(2)], &limits).unwrap();
        // the full partition can never be violated
        assert_eq!(has_centrality(&d, &full(2), 0).unwrap(), None);
        assert_eq!(has_centrality(&d, &full(2), 1).unwrap(), None);
        // constants only: every line is constant, so any partition works
        let consts = rel(2, 2, &[cube(2, &[0, 0, 0, 0]), cube(2, &[1, 1, 1, 1])]);
        assert_eq!(has_centrality(&consts, &diag(2), 0).unwrap(), None);
        // dimension guard
        assert!(matches!(
            has_centrality(&rel(2, 1, &[cube(1, &[0, 1])]), &diag(2), 0),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn raw_count_scan_flags_an_off_pivot_violation() {
        // asymmetric single-cube relation whose only off-delta line is a
        // supporting line: the raw count finds it, the pivot form would not
        let gamma = cube(3, &[0, 0, 0, 1, 1, 0, 0, 1]);
        let r = rel(2, 3, &[gamma.clone()]);
        assert!(!is_symmetric(&r));
        assert_eq!(has_centrality(&r, &diag(2), 2).unwrap(), Some(gamma));
    }

    #[test]
    fn pivot_scan_agrees_with_a_raw_oracle_on_symmetric_relations() {
        let limits = Limits::default();
        let z4 = corpus::algebra("z4").unwrap();
        let theta = Partition::parse("0 2|1 3", 4).unwrap();
        let m = build_m(&z4, &[theta, full(4)], &limits).unwrap();
        assert!(is_symmetric(&m));
        for delta in con(&z4).unwrap() {
            for dir in 0..2 {
                let pivot_clear = pivot_violation(&m, &delta, dir).is_none();
                let raw_clear = raw_violation(&m, &delta, dir).is_none();
                assert_eq!(pivot_clear, raw_clear, "delta {delta} dir {dir}");
            }
        }
    }

    #[test]
    fn term_condition_commutator_on_abelian_groups_is_trivial() {
        let limits = Limits::default();
        for name in ["z2", "z3", "z4", "z2xz2"] {
            let alg = corpus::algebra(name).unwrap();
            let thetas = [full(alg.size), full(alg.size)];
            let c = tc_commutator(&alg, &thetas, 1, &limits).unwrap();
            assert!(c.is_diag(), "{name}");
        }
    }

    #[test]
    fn fixpoint_result_is_least_among_centrality_congruences() {
        let limits = Limits::default();
        let z4 = corpus::algebra("z4").unwrap();
        let theta = Partition::parse("0 2|1 3", 4).unwrap();
        for thetas in [[full(4), full(4)], [theta.clone(), full(4)], [full(4), theta]] {
            let m = build_m(&z4, &thetas, &limits).unwrap();
            let c = tc_commutator(&z4, &thetas, 1, &limits).unwrap();
            assert_eq!(has_centrality(&m, &c, 1).unwrap(), None);
            for delta in con(&z4).unwrap() {
                if has_centrality(&m, &delta, 1).unwrap().is_none() {
                    assert!(c.leq(&delta), "result {c} not below {delta}");
                }
            }
        }
    }

    #[test]
    fn semilattice_commutators_are_neutral() {
        let limits = Limits::default();
        let s2 = corpus::algebra("semilattice2").unwrap();
        let thetas = [full(2), full(2)];
        assert!(tc_commutator(&s2, &thetas, 1, &limits).unwrap().is_full());
        assert!(hyper_commutator(&s2, &thetas, 1, &limits).unwrap().is_full());
    }

    #[test]
    fn diagonal_argument_collapses_the_commutator() {
        let limits = Limits::default();
        let z4 = corpus::algebra("z4").unwrap();
        for thetas in [[diag(4), full(4)], [full(4), diag(4)]] {
            assert!(tc_commutator(&z4, &thetas, 1, &limits).unwrap().is_diag());
            assert!(hyper_commutator(&z4, &thetas, 1, &limits).unwrap().is_diag());
        }
    }

    #[test]
    fn commutators_are_bounded_by_the_meet() {
        let limits = Limits::default();
        let z4 = corpus::algebra("z4").unwrap();
        let cons = con(&z4).unwrap();
        for t0 in &cons {
            for t1 in &cons {
                let thetas = [t0.clone(), t1.clone()];
                let tc = tc_commutator(&z4, &thetas, 1, &limits).unwrap();
                let h = hyper_commutator(&z4, &thetas, 1, &limits).unwrap();
                let meet = t0.meet(t1);
                assert!(tc.leq(&meet));
                assert!(h.leq(&meet));
                // and the term-condition commutator is below the relational one
                assert!(tc.leq(&h));
            }
        }
    }

    #[test]
    fn hyper_commutator_is_symmetric_in_its_arguments() {
        let limits = Limits::default();
        let z4 = corpus::algebra("z4").unwrap();
        let theta = Partition::parse("0 2|1 3", 4).unwrap();
        let a = hyper_commutator(&z4, &[theta.clone(), full(4)], 1, &limits).unwrap();
        let b = hyper_commutator(&z4, &[full(4), theta.clone()], 1, &limits).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn low_arity_characterizations_agree_on_the_corpus() {
        let limits = Limits::default();
        let z4 = corpus::algebra("z4").unwrap();
        let theta = Partition::parse("0 2|1 3", 4).unwrap();
        let r = low_arity_characterizations(&z4, &[theta, full(4)], &limits).unwrap();
        assert!(r.all_agree);
        assert_eq!(r.item_names.len(), 4);

        let z2 = corpus::algebra("z2").unwrap();
        let r = low_arity_characterizations(&z2, &[full(2), full(2), full(2)], &limits).unwrap();
        assert!(r.all_agree);
        assert_eq!(r.item_names.len(), 5);
        // the group is abelian at every arity: only reflexive pairs belong
        for ((x, y), items) in &r.per_pair {
            assert_eq!(items[0], x == y);
        }

        let s2 = corpus::algebra("semilattice2").unwrap();
        let r = low_arity_characterizations(&s2, &[full(2), full(2), full(2)], &limits).unwrap();
        assert!(r.all_agree);
        // neutral: every pair belongs
        for ((_, _), items) in &r.per_pair {
            assert!(items[0]);
        }
    }

    #[test]
    fn nest_contains_commutator_and_constant_cubes() {
        let limits = Limits::default();
        let z2 = corpus::algebra("z2").unwrap();
        let thetas = [full(2), full(2), full(2)];
        let d = build_delta(&z2, &thetas, &limits).unwrap();
        let n = build_nest(&z2, &thetas, 1, &limits).unwrap();
        assert!(n.is_subset(&d));
        for x in 0..2 {
            for y in 0..2 {
                let c = commutator_cube(x as Label, y as Label, 3);
                if d.contains(&c) {
                    assert!(n.contains(&c));
                }
            }
            assert!(n.contains(&Cube::constant(3, x as Label)));
        }
    }

    #[test]
    fn nest_projection_bounds_the_nested_closure() {
        // Δ(θ0, [θ1,θ2]) is contained in the all-ones cut of the nest
        let limits = Limits::default();
        for name in ["z2", "semilattice2"] {
            let alg = corpus::algebra(name).unwrap();
            let k = alg.size;
            let thetas = [full(k), full(k), full(k)];
            let nest = build_nest(&alg, &thetas, 1, &limits).unwrap();
            let inner = hyper_commutator(&alg, &thetas[1..], 1, &limits).unwrap();
            let lhs = build_delta(&alg, &[thetas[0].clone(), inner], &limits).unwrap();
            let rhs = cut_relation_at(&nest, &[2], 1);
            assert!(lhs.is_subset(&rhs), "{name}");
        }
    }

    #[test]
    fn input_validation_errors() {
        let limits = Limits::default();
        let z4 = corpus::algebra("z4").unwrap();
        let not_cong = Partition::parse("0 1|2 3", 4).unwrap();
        assert!(matches!(
            build_m(&z4, &[not_cong], &limits),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(build_m(&z4, &[], &limits), Err(Error::Invalid(_))));
        assert!(matches!(
            tc_commutator(&z4, &[full(4)], 0, &limits),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            tc_commutator(&z4, &[full(4), full(4)], 2, &limits),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            build_m(&z4, &[full(3), full(4)], &limits),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            low_arity_characterizations(&z4, &[full(4)], &limits),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            build_nest(&z4, &[full(4), full(4), full(4)], 2, &limits),
            Err(Error::Invalid(_))
        ));
        let tiny = Limits::with_max_cubes(3);
        assert!(matches!(
            build_delta(&z4, &[full(4), full(4)], &tiny),
            Err(Error::Budget { .. })
        ));
    }
}
