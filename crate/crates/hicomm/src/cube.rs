use crate::error::{Error, Result};
use crate::partition::Partition;
use std::collections::BTreeSet;
use std::fmt;

/// Universe element. u16 rather than u8 because tests re-encode sub-cubes of
/// a relation as labels of a synthetic universe, which can exceed 255 values.
pub type Label = u16;

/// Hard ceiling on cube dimension (vertex counts are 2^dim).
pub const MAX_DIM: usize = 16;

/// Bit mask with one bit per direction in `dirs`.
pub fn mask_of(dirs: &[usize]) -> u32 {
    let mut m = 0u32;
    for &d in dirs {
        debug_assert!(d < 32);
        m |= 1 << d;
    }
    m
}

/// Gather the bits of `v` at the set positions of `mask` (ascending) into a
/// packed integer: the t-th set position of `mask` becomes bit t.
pub fn compress_vertex(v: usize, mask: u32) -> usize {
    let mut out = 0usize;
    let mut t = 0;
    let mut m = mask;
    while m != 0 {
        let pos = m.trailing_zeros() as usize;
        out |= ((v >> pos) & 1) << t;
        t += 1;
        m &= m - 1;
    }
    out
}

/// Inverse of `compress_vertex`: place bit t of `bits` at the t-th set
/// position of `mask`.
pub fn scatter_vertex(bits: usize, mask: u32) -> usize {
    let mut out = 0usize;
    let mut t = 0;
    let mut m = mask;
    while m != 0 {
        let pos = m.trailing_zeros() as usize;
        out |= ((bits >> t) & 1) << pos;
        t += 1;
        m &= m - 1;
    }
    out
}

/// An n-dimensional labeled cube: `labels[v]` is the label at the vertex
/// whose characteristic function is the bit pattern of `v` (bit i = f(i)).
/// Vertex 2^n−1 is the all-ones vertex (pivot position), vertex 0 the
/// all-zeros vertex (antipivot position).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube {
    dim: usize,
    labels: Vec<Label>,
}

impl Cube {
    pub fn new(dim: usize, labels: Vec<Label>) -> Cube {
        assert!(dim <= MAX_DIM, "cube dimension {dim} exceeds {MAX_DIM}");
        assert_eq!(labels.len(), 1usize << dim, "label array length must be 2^dim");
        Cube { dim, labels }
    }

    pub fn constant(dim: usize, x: Label) -> Cube {
        Cube::new(dim, vec![x; 1 << dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        1 << self.dim
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, vertex: usize) -> Label {
        self.labels[vertex]
    }

    /// Label at the all-ones vertex.
    pub fn pivot(&self) -> Label {
        self.labels[(1 << self.dim) - 1]
    }

    /// Label at the all-zeros vertex.
    pub fn antipivot(&self) -> Label {
        self.labels[0]
    }

    pub fn is_constant(&self) -> bool {
        self.labels.iter().all(|&l| l == self.labels[0])
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cube{}[{}]", self.dim, self)
    }
}

/// A cross-section line: the pair of labels along one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinePair {
    pub lo: Label,
    pub hi: Label,
}

impl LinePair {
    pub fn is_constant(&self) -> bool {
        self.lo == self.hi
    }

    /// Is this line a pair of the given partition?
    pub fn in_partition(&self, p: &Partition) -> bool {
        p.same(self.lo as usize, self.hi as usize)
    }

    pub fn as_cube(&self) -> Cube {
        Cube::new(1, vec![self.lo, self.hi])
    }
}

/// Decompose `γ` along the directions `q`: for each assignment `f` to the
/// `q`-coordinates (packed ascending), the sub-cube over the remaining
/// coordinates (re-indexed ascending). Returned in `f` order 0,…,2^|q|−1.
pub fn cut(gamma: &Cube, q: &[usize]) -> Vec<Cube> {
    let qmask = mask_of(q);
    assert!(qmask < (1u32 << gamma.dim()), "cut directions out of range");
    let qn = qmask.count_ones() as usize;
    let rest = !qmask & ((1u32 << gamma.dim()) - 1);
    let rn = gamma.dim() - qn;
    let mut out = Vec::with_capacity(1 << qn);
    for f in 0..1usize << qn {
        let base = scatter_vertex(f, qmask);
        let mut labels = Vec::with_capacity(1 << rn);
        for h in 0..1usize << rn {
            labels.push(gamma.label(base | scatter_vertex(h, rest)));
        }
        out.push(Cube::new(rn, labels));
    }
    out
}

/// Inverse of `cut`: reassemble a (|q| + piece-dim)-cube from its pieces.
/// `pieces[f]` is the sub-cube at `q`-assignment `f`; all pieces must share
/// a dimension and `pieces.len()` must be 2^|q|.
pub fn glue(q: &[usize], pieces: &[Cube]) -> Cube {
    let qmask = mask_of(q);
    let qn = qmask.count_ones() as usize;
    assert_eq!(pieces.len(), 1 << qn, "glue needs 2^|q| pieces");
    let rn = pieces[0].dim();
    assert!(pieces.iter().all(|p| p.dim() == rn), "glue pieces of mixed dimension");
    let dim = qn + rn;
    assert!(dim <= MAX_DIM);
    assert!(qmask < (1u32 << dim), "glue directions out of range for target dimension");
    let rest = !qmask & ((1u32 << dim) - 1);
    let mut labels = vec![0; 1 << dim];
    for (f, piece) in pieces.iter().enumerate() {
        let base = scatter_vertex(f, qmask);
        for h in 0..1usize << rn {
            labels[base | scatter_vertex(h, rest)] = piece.label(h);
        }
    }
    Cube::new(dim, labels)
}

/// The two faces of `γ` in direction `i`: (face at bit i = 0, face at bit i = 1).
pub fn faces(gamma: &Cube, i: usize) -> (Cube, Cube) {
    let mut pieces = cut(gamma, &[i]);
    let hi = pieces.pop().unwrap();
    let lo = pieces.pop().unwrap();
    (lo, hi)
}

/// All (i)-cross-section lines, keyed by the reduced vertex over the
/// remaining coordinates (ascending re-index).
pub fn lines(gamma: &Cube, i: usize) -> Vec<LinePair> {
    let n = gamma.dim();
    assert!(i < n);
    let rest = !(1u32 << i) & ((1u32 << n) - 1);
    let mut out = Vec::with_capacity(1 << (n - 1));
    for g in 0..1usize << (n - 1) {
        let base = scatter_vertex(g, rest);
        out.push(LinePair { lo: gamma.label(base), hi: gamma.label(base | (1 << i)) });
    }
    out
}

/// The (i)-pivot line: the cross-section line at the reduced all-ones vertex.
pub fn pivot_line(gamma: &Cube, i: usize) -> LinePair {
    let n = gamma.dim();
    let v1 = (1usize << n) - 1;
    LinePair { lo: gamma.label(v1 & !(1 << i)), hi: gamma.label(v1) }
}

/// All (i,j)-cross-section squares, keyed by the reduced vertex over the
/// remaining coordinates. The square is a 2-cube oriented with direction `i`
/// on bit 0 and direction `j` on bit 1, so `squares(γ,j,i)` is the
/// vertex-wise transpose of `squares(γ,i,j)`.
pub fn squares(gamma: &Cube, i: usize, j: usize) -> Vec<Cube> {
    let n = gamma.dim();
    assert!(i != j && i < n && j < n);
    let rest = !((1u32 << i) | (1u32 << j)) & ((1u32 << n) - 1);
    let mut out = Vec::with_capacity(1 << (n - 2));
    for g in 0..1usize << (n - 2) {
        let base = scatter_vertex(g, rest);
        out.push(Cube::new(
            2,
            vec![
                gamma.label(base),
                gamma.label(base | (1 << i)),
                gamma.label(base | (1 << j)),
                gamma.label(base | (1 << i) | (1 << j)),
            ],
        ));
    }
    out
}

/// The (i,j)-pivot square: the cross-section square at the reduced all-ones
/// vertex, oriented i ↦ bit 0, j ↦ bit 1.
pub fn pivot_square(gamma: &Cube, i: usize, j: usize) -> Cube {
    let n = gamma.dim();
    let v1 = (1usize << n) - 1;
    let base = v1 & !(1 << i) & !(1 << j);
    Cube::new(
        2,
        vec![
            gamma.label(base),
            gamma.label(base | (1 << i)),
            gamma.label(base | (1 << j)),
            gamma.label(v1),
        ],
    )
}

/// Reflection: copy face `j` of direction `i` onto both faces
/// (labels[v] = γ[v with bit i := j]).
pub fn refl(gamma: &Cube, i: usize, j: usize) -> Cube {
    let n = gamma.dim();
    assert!(i < n && j <= 1);
    let labels = (0..1usize << n)
        .map(|v| gamma.label(if j == 0 { v & !(1 << i) } else { v | (1 << i) }))
        .collect();
    Cube::new(n, labels)
}

/// Symmetry: swap the two faces of direction `i` (labels[v] = γ[v XOR 2^i]).
pub fn sym(gamma: &Cube, i: usize) -> Cube {
    let n = gamma.dim();
    assert!(i < n);
    let labels = (0..1usize << n).map(|v| gamma.label(v ^ (1 << i))).collect();
    Cube::new(n, labels)
}

/// Generator cube: `x` where bit `i` of the vertex is 0, else `y`.
pub fn gen_cube(i: usize, x: Label, y: Label, dim: usize) -> Cube {
    assert!(i < dim);
    let labels = (0..1usize << dim)
        .map(|v| if v & (1 << i) == 0 { x } else { y })
        .collect();
    Cube::new(dim, labels)
}

/// Commutator cube: `x` at every vertex except `y` at the all-ones vertex.
pub fn commutator_cube(x: Label, y: Label, dim: usize) -> Cube {
    assert!(dim >= 1);
    let mut labels = vec![x; 1 << dim];
    labels[(1 << dim) - 1] = y;
    Cube::new(dim, labels)
}

/// A finite set of n-dimensional cubes over the universe {0,…,k−1}.
/// Stored sorted; iteration and dumps are deterministic.
#[derive(Clone, PartialEq, Eq)]
pub struct CubeRelation {
    universe: usize,
    dim: usize,
    cubes: BTreeSet<Cube>,
}

impl CubeRelation {
    pub fn new(universe: usize, dim: usize) -> CubeRelation {
        assert!(dim <= MAX_DIM);
        CubeRelation { universe, dim, cubes: BTreeSet::new() }
    }

    pub fn from_cubes<I: IntoIterator<Item = Cube>>(
        universe: usize,
        dim: usize,
        cubes: I,
    ) -> Result<CubeRelation> {
        let mut r = CubeRelation::new(universe, dim);
        for c in cubes {
            r.insert(c)?;
        }
        Ok(r)
    }

    /// Every cube of A^{2^n}: the full relation. Desk scale only.
    pub fn all_cubes(universe: usize, dim: usize) -> CubeRelation {
        let total = (universe as u128).pow(1u32 << dim);
        assert!(total <= (1 << 24) as u128, "full relation too large to materialize");
        let mut r = CubeRelation::new(universe, dim);
        let mut labels = vec![0 as Label; 1 << dim];
        loop {
            r.cubes.insert(Cube::new(dim, labels.clone()));
            // odometer over label vectors
            let mut pos = 0;
            loop {
                if pos == labels.len() {
                    return r;
                }
                labels[pos] += 1;
                if (labels[pos] as usize) < universe {
                    break;
                }
                labels[pos] = 0;
                pos += 1;
            }
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn insert(&mut self, c: Cube) -> Result<bool> {
        if c.dim() != self.dim {
            return Err(Error::Invalid(format!(
                "cube of dimension {} inserted into relation of dimension {}",
                c.dim(),
                self.dim
            )));
        }
        if let Some(&bad) = c.labels().iter().find(|&&l| l as usize >= self.universe) {
            return Err(Error::Invalid(format!(
                "cube label {bad} out of universe 0..{}",
                self.universe
            )));
        }
        Ok(self.cubes.insert(c))
    }

    pub fn contains(&self, c: &Cube) -> bool {
        self.cubes.contains(c)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Cube> {
        self.cubes.iter()
    }

    pub fn is_subset(&self, other: &CubeRelation) -> bool {
        self.cubes.is_subset(&other.cubes)
    }

    /// Dump: header `cubes <n> <count>`, then one cube per line, labels
    /// space-separated in vertex order.
    pub fn to_dump_string(&self) -> String {
        let mut s = format!("cubes {} {}\n", self.dim, self.cubes.len());
        for c in &self.cubes {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for CubeRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CubeRelation(dim {}, {} cubes)", self.dim, self.cubes.len())
    }
}

/// The relation { cut(γ, q)[f] : γ ∈ R } of sub-cubes at a fixed
/// q-assignment f, over the remaining directions re-indexed ascending.
pub fn cut_relation_at(r: &CubeRelation, q: &[usize], f: usize) -> CubeRelation {
    let mut out = CubeRelation::new(r.universe(), r.dim() - q.len());
    for c in r.iter() {
        let piece = cut(c, q).swap_remove(f);
        out.insert(piece).expect("piece labels verified by source relation");
    }
    out
}

/// Closed under refl(·,i,j) for every direction i and side j?
pub fn is_reflexive(r: &CubeRelation) -> bool {
    r.iter().all(|c| {
        (0..r.dim()).all(|i| r.contains(&refl(c, i, 0)) && r.contains(&refl(c, i, 1)))
    })
}

/// Closed under sym(·,i) for every direction i?
pub fn is_symmetric(r: &CubeRelation) -> bool {
    r.iter().all(|c| (0..r.dim()).all(|i| r.contains(&sym(c, i))))
}

/// Is faces_i(R), as a binary relation on (n−1)-cubes, transitive for every i?
pub fn is_transitive(r: &CubeRelation) -> bool {
    (0..r.dim()).all(|i| {
        let pairs: BTreeSet<(Cube, Cube)> = r
            .iter()
            .map(|c| {
                let (lo, hi) = faces(c, i);
                (lo, hi)
            })
            .collect();
        pairs.iter().all(|(a, b)| {
            pairs
                .iter()
                .filter(|(b2, _)| b2 == b)
                .all(|(_, c)| pairs.contains(&(a.clone(), c.clone())))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(dim: usize, labels: &[Label]) -> Cube {
        Cube::new(dim, labels.to_vec())
    }

    #[test]
    fn compress_scatter_are_inverse() {
        for mask in [0b101u32, 0b0110, 0b1111, 0b0001, 0b1000] {
            let width = mask.count_ones() as usize;
            for bits in 0..1usize << width {
                let v = scatter_vertex(bits, mask);
                assert_eq!(v & !(mask as usize), 0);
                assert_eq!(compress_vertex(v, mask), bits);
            }
        }
        assert_eq!(scatter_vertex(0b11, 0b101), 0b101);
        assert_eq!(compress_vertex(0b100, 0b110), 0b10);
    }

    #[test]
    fn cut_examples() {
        // vertex order 00, 10, 01, 11
        let g = cube(2, &[10, 11, 12, 13]);
        let pieces = cut(&g, &[1]);
        assert_eq!(pieces, vec![cube(1, &[10, 11]), cube(1, &[12, 13])]);
        let pieces0 = cut(&g, &[0]);
        assert_eq!(pieces0, vec![cube(1, &[10, 12]), cube(1, &[11, 13])]);
        assert_eq!(cut(&g, &[]), vec![g.clone()]);
        assert_eq!(
            cut(&g, &[0, 1]),
            vec![cube(0, &[10]), cube(0, &[11]), cube(0, &[12]), cube(0, &[13])]
        );
    }

    #[test]
    fn glue_inverts_cut_all_subsets() {
        let g = cube(3, &[0, 1, 2, 3, 4, 5, 6, 7]);
        for qbits in 0..8u32 {
            let q: Vec<usize> = (0..3).filter(|&d| qbits & (1 << d) != 0).collect();
            let pieces = cut(&g, &q);
            assert_eq!(glue(&q, &pieces), g, "glue∘cut ≠ id for q={q:?}");
            // cut∘glue = id on piece families
            let back = cut(&glue(&q, &pieces), &q);
            assert_eq!(back, pieces);
        }
        assert_eq!(glue(&[0], &[cube(0, &[7]), cube(0, &[9])]), cube(1, &[7, 9]));
    }

    #[test]
    fn faces_lines_squares_examples() {
        let g = cube(2, &[10, 11, 12, 13]); // [a,b,c,d]
        assert_eq!(faces(&g, 0), (cube(1, &[10, 12]), cube(1, &[11, 13])));
        assert_eq!(faces(&g, 1), (cube(1, &[10, 11]), cube(1, &[12, 13])));
        assert_eq!(
            lines(&g, 1),
            vec![LinePair { lo: 10, hi: 12 }, LinePair { lo: 11, hi: 13 }]
        );
        assert_eq!(pivot_line(&g, 1), LinePair { lo: 11, hi: 13 });
        assert_eq!(pivot_line(&g, 0), LinePair { lo: 12, hi: 13 });

        let h = cube(3, &[0, 1, 2, 3, 4, 5, 6, 7]);
        let sq = squares(&h, 0, 1);
        assert_eq!(sq.len(), 2);
        assert_eq!(sq[1], cube(2, &[4, 5, 6, 7])); // pivot square
        assert_eq!(pivot_square(&h, 0, 1), cube(2, &[4, 5, 6, 7]));
        // transpose convention: swapping i and j transposes each square
        let sq_t = squares(&h, 1, 0);
        assert_eq!(sq_t[1], cube(2, &[4, 6, 5, 7]));
    }

    #[test]
    fn pivot_square_orientation() {
        // explicit re-derivation: pivot square of (i,j) = (2,0) on dim 3
        // base = 111 & !100 & !001 = 010 = 2; bit0 of square = dir 2, bit1 = dir 0
        let h = cube(3, &[0, 1, 2, 3, 4, 5, 6, 7]);
        let ps = pivot_square(&h, 2, 0);
        assert_eq!(ps, cube(2, &[2, 6, 3, 7]));
    }

    #[test]
    fn refl_sym_gen_examples() {
        let e = cube(1, &[20, 21]);
        assert_eq!(refl(&e, 0, 1), cube(1, &[21, 21]));
        assert_eq!(refl(&e, 0, 0), cube(1, &[20, 20]));
        assert_eq!(sym(&e, 0), cube(1, &[21, 20]));

        let g = cube(3, &[0, 1, 2, 3, 4, 5, 6, 7]);
        for i in 0..3 {
            assert_eq!(sym(&sym(&g, i), i), g);
            for j in 0..2 {
                let r = refl(&g, i, j);
                assert_eq!(refl(&r, i, j), r);
                assert_eq!(refl(&r, i, 1 - j), r);
                assert_eq!(sym(&r, i), r);
            }
        }

        assert_eq!(gen_cube(0, 5, 6, 2), cube(2, &[5, 6, 5, 6]));
        assert_eq!(gen_cube(1, 5, 6, 2), cube(2, &[5, 5, 6, 6]));
        assert_eq!(gen_cube(1, 5, 5, 2), Cube::constant(2, 5));
        let (f0, f1) = faces(&gen_cube(2, 5, 6, 3), 2);
        assert_eq!(f0, Cube::constant(2, 5));
        assert_eq!(f1, Cube::constant(2, 6));
    }

    #[test]
    fn commutator_cube_examples() {
        assert_eq!(commutator_cube(3, 9, 2), cube(2, &[3, 3, 3, 9]));
        let c3 = commutator_cube(0, 1, 3);
        assert_eq!(c3.labels().iter().filter(|&&l| l == 0).count(), 7);
        assert_eq!(c3.label(7), 1);
        assert_eq!(commutator_cube(4, 4, 3), Cube::constant(3, 4));
        assert_eq!(c3.pivot(), 1);
        assert_eq!(c3.antipivot(), 0);
    }

    #[test]
    fn relation_properties_on_small_sets() {
        // all constant cubes: reflexive, symmetric, transitive
        let consts =
            CubeRelation::from_cubes(3, 2, (0..3).map(|x| Cube::constant(2, x))).unwrap();
        assert!(is_reflexive(&consts) && is_symmetric(&consts) && is_transitive(&consts));

        // a lone generator cube is not reflexive (its refl images are missing)
        let lone = CubeRelation::from_cubes(2, 2, [gen_cube(0, 0, 1, 2)]).unwrap();
        assert!(!is_reflexive(&lone));

        // the full relation has every property
        let full = CubeRelation::all_cubes(2, 2);
        assert_eq!(full.len(), 16);
        assert!(is_reflexive(&full) && is_symmetric(&full) && is_transitive(&full));

        // a directional-composition gap breaks transitivity
        let chain = CubeRelation::from_cubes(
            3,
            1,
            [cube(1, &[0, 1]), cube(1, &[1, 2])],
        )
        .unwrap();
        assert!(!is_transitive(&chain));
        let closed = CubeRelation::from_cubes(
            3,
            1,
            [cube(1, &[0, 1]), cube(1, &[1, 2]), cube(1, &[0, 2])],
        )
        .unwrap();
        assert!(is_transitive(&closed));
    }

    #[test]
    fn relation_guards_and_dump() {
        let mut r = CubeRelation::new(2, 1);
        assert!(r.insert(cube(1, &[0, 5])).is_err()); // label out of universe
        assert!(r.insert(cube(2, &[0, 0, 0, 0])).is_err()); // wrong dimension
        r.insert(cube(1, &[1, 0])).unwrap();
        r.insert(cube(1, &[0, 1])).unwrap();
        assert!(!r.insert(cube(1, &[0, 1])).unwrap()); // duplicate
        assert_eq!(r.to_dump_string(), "cubes 1 2\n0 1\n1 0\n");
    }
}
