use crate::algebra::FiniteAlgebra;
use crate::cube::{faces, glue, refl, sym, Cube, CubeRelation, Label};
use crate::error::{Error, Result};
use crate::limits::Limits;
use std::collections::{BTreeMap, HashMap, HashSet};

/// Directional faces of a relation can form at most this many distinct
/// (n−1)-cubes before dir_closure refuses to build its reachability graph.
const MAX_FACE_NODES: usize = 1 << 13;

/// Dense-bitset membership is used while the label-vector space k^(2^n)
/// stays at or below this many codes.
const DENSE_CODE_LIMIT: u128 = 1 << 26;

/// Membership index over cubes of one relation-in-progress. The dense and
/// sparse variants key on the integer code of the label vector; the exact
/// variant stores the cubes themselves (only reached when codes overflow
/// u128, i.e. far beyond desk scale).
enum Membership {
    Dense(Vec<u64>),
    Sparse(HashSet<u128>),
    Exact(std::collections::BTreeSet<Cube>),
}

fn cube_code(c: &Cube, k: usize) -> u128 {
    let mut acc: u128 = 0;
    for &l in c.labels() {
        acc = acc * k as u128 + l as u128;
    }
    acc
}

impl Membership {
    fn new(k: usize, dim: usize) -> Membership {
        match (k as u128).checked_pow(1u32 << dim) {
            Some(total) if total <= DENSE_CODE_LIMIT => {
                Membership::Dense(vec![0u64; ((total as usize) + 63) / 64])
            }
            Some(_) => Membership::Sparse(HashSet::new()),
            None => Membership::Exact(std::collections::BTreeSet::new()),
        }
    }

    /// Insert; true if newly added.
    fn insert(&mut self, c: &Cube, k: usize) -> bool {
        match self {
            Membership::Exact(set) => set.insert(c.clone()),
            indexed => indexed.insert_code(cube_code(c, k)),
        }
    }

    /// Insert by precomputed label-vector code; true if newly added. Only
    /// valid for the code-indexed variants (codes fit u128 whenever these
    /// variants were chosen).
    fn insert_code(&mut self, code: u128) -> bool {
        match self {
            Membership::Dense(bits) => {
                let code = code as usize;
                let (w, b) = (code / 64, code % 64);
                let newly = bits[w] & (1 << b) == 0;
                bits[w] |= 1 << b;
                newly
            }
            Membership::Sparse(set) => set.insert(code),
            Membership::Exact(_) => unreachable!("code insert on exact membership"),
        }
    }
}

/// Generation closure engine: least superset of the seeds closed under the
/// algebra's operations applied vertexwise, optionally also under refl/sym.
///
/// `ceiling`, when given, must be the size of a known completion — a set C
/// with seeds ⊆ C, C closed under everything the engine applies, and every
/// engine step staying inside C. Reaching `ceiling` stored cubes then proves
/// the stored set equals C, and the engine stops early.
struct Generator<'a> {
    alg: &'a FiniteAlgebra,
    dim: usize,
    limits: &'a Limits,
    ceiling: Option<usize>,
    use_refl_sym: bool,
    members: Vec<Cube>,
    index: Membership,
    done: bool,
    /// Two-element universes with at most 64 vertices keep every member's
    /// label-vector code alongside it: a cube is its bit pattern, so binary
    /// operations act on whole codes at once (see scan_binary_masked).
    codes: Option<Vec<u64>>,
    /// per high-arity operation: cached vertexwise unary maps and watermarks
    hcaches: Vec<HCache>,
}

/// Cache for one operation of arity ≥ 3: every (arity−1)-prefix of members
/// induces the vertexwise unary map v ↦ f(prefix(v), ·); distinct maps are
/// deduplicated and each is applied to members past its watermark only.
struct HCache {
    op_index: usize,
    /// map key = per-vertex row base offsets into the operation table
    seen: HashMap<Vec<u32>, usize>,
    /// (row bases, watermark: members below this index already processed)
    keys: Vec<(Vec<u32>, usize)>,
    /// prefix tuples over member indices [0, prefix_hi)^often already enumerated
    prefix_hi: usize,
}

impl<'a> Generator<'a> {
    fn new(
        alg: &'a FiniteAlgebra,
        dim: usize,
        use_refl_sym: bool,
        ceiling: Option<usize>,
        limits: &'a Limits,
    ) -> Generator<'a> {
        let hcaches = alg
            .ops
            .iter()
            .enumerate()
            .filter(|(_, op)| op.arity >= 3)
            .map(|(i, _)| HCache {
                op_index: i,
                seen: HashMap::new(),
                keys: Vec::new(),
                prefix_hi: 0,
            })
            .collect();
        Generator {
            alg,
            dim,
            limits,
            ceiling,
            use_refl_sym,
            members: Vec::new(),
            index: Membership::new(alg.size, dim),
            done: false,
            codes: if alg.size == 2 && (1usize << dim) <= 64 { Some(Vec::new()) } else { None },
            hcaches,
        }
    }

    fn add(&mut self, c: Cube) -> Result<()> {
        if self.done {
            return Ok(());
        }
        debug_assert_eq!(c.dim(), self.dim);
        if self.index.insert(&c, self.alg.size) {
            if self.members.len() + 1 > self.limits.max_cubes {
                return Err(Error::Budget {
                    stored: self.members.len() + 1,
                    limit: self.limits.max_cubes,
                });
            }
            if let Some(codes) = &mut self.codes {
                codes.push(cube_code(&c, 2) as u64);
            }
            self.members.push(c);
            if Some(self.members.len()) == self.ceiling {
                self.done = true;
            }
        }
        Ok(())
    }

    /// add() for a candidate already in code form (two-element fast path):
    /// membership, budget, and ceiling behave exactly as in add, and the
    /// cube is only materialized for genuinely new members.
    fn add_code(&mut self, code: u64) -> Result<()> {
        if self.done {
            return Ok(());
        }
        if self.index.insert_code(code as u128) {
            if self.members.len() + 1 > self.limits.max_cubes {
                return Err(Error::Budget {
                    stored: self.members.len() + 1,
                    limit: self.limits.max_cubes,
                });
            }
            let nv = 1usize << self.dim;
            let labels = (0..nv).map(|v| ((code >> (nv - 1 - v)) & 1) as Label).collect();
            self.codes.as_mut().expect("code path active").push(code);
            self.members.push(Cube::new(self.dim, labels));
            if Some(self.members.len()) == self.ceiling {
                self.done = true;
            }
        }
        Ok(())
    }

    fn apply1(&self, op_index: usize, a: usize) -> Cube {
        let op = &self.alg.ops[op_index];
        let labels = self.members[a].labels().iter().map(|&x| op.apply(&[x])).collect();
        Cube::new(self.dim, labels)
    }

    fn apply2(&self, op_index: usize, a: usize, b: usize) -> Cube {
        let op = &self.alg.ops[op_index];
        let (ca, cb) = (&self.members[a], &self.members[b]);
        let labels = ca
            .labels()
            .iter()
            .zip(cb.labels())
            .map(|(&x, &y)| op.apply(&[x, y]))
            .collect();
        Cube::new(self.dim, labels)
    }

    fn run(&mut self) -> Result<()> {
        // nullary operations contribute their constant cube unconditionally
        for op in &self.alg.ops {
            if op.arity == 0 {
                let c = Cube::constant(self.dim, op.apply(&[]));
                self.add(c)?;
            }
        }
        let mut lo = 0usize;
        while !self.done {
            let hi = self.members.len();
            if lo == hi {
                break;
            }
            self.limits.check_time("generation closure")?;
            if self.use_refl_sym {
                for idx in lo..hi {
                    for i in 0..self.dim {
                        for j in 0..2 {
                            let r = refl(&self.members[idx], i, j);
                            self.add(r)?;
                        }
                        let s = sym(&self.members[idx], i);
                        self.add(s)?;
                        if self.done {
                            return Ok(());
                        }
                    }
                }
            }
            for op_index in 0..self.alg.ops.len() {
                match self.alg.ops[op_index].arity {
                    0 => {}
                    1 => {
                        for a in lo..hi {
                            let c = self.apply1(op_index, a);
                            self.add(c)?;
                            if self.done {
                                return Ok(());
                            }
                        }
                    }
                    2 => self.scan_binary(op_index, lo, hi)?,
                    _ => self.scan_high_arity(op_index, lo, hi)?,
                }
                if self.done {
                    return Ok(());
                }
            }
            lo = hi;
        }
        Ok(())
    }

    /// Semi-naive binary scan: every ordered pair with max index ≥ lo and
    /// both indices < hi. Commutative tables do each unordered pair once.
    fn scan_binary(&mut self, op_index: usize, lo: usize, hi: usize) -> Result<()> {
        if self.codes.is_some() {
            return self.scan_binary_masked(op_index, lo, hi);
        }
        let commutative = self.alg.ops[op_index].is_commutative();
        for a in lo..hi {
            self.limits.check_time("generation closure")?;
            for b in 0..hi {
                if commutative && b >= lo && b < a {
                    continue; // (b,a) already covered as (a,b) with a in frontier
                }
                let c = self.apply2(op_index, a, b);
                self.add(c)?;
                if !commutative && b < lo {
                    let c = self.apply2(op_index, b, a);
                    self.add(c)?;
                }
                if self.done {
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    /// scan_binary over codes: on a two-element universe a vertexwise binary
    /// table is a bitwise boolean function, so each candidate is a handful of
    /// word operations on the pair's codes instead of a per-vertex rebuild.
    fn scan_binary_masked(&mut self, op_index: usize, lo: usize, hi: usize) -> Result<()> {
        let commutative = self.alg.ops[op_index].is_commutative();
        let width = if 1usize << self.dim == 64 { !0u64 } else { (1u64 << (1 << self.dim)) - 1 };
        let table = self.alg.ops[op_index].table();
        // minterm masks: t_xy is all-ones exactly when the table sends (x,y) to 1
        let t = [table[0], table[1], table[2], table[3]]
            .map(|out| if out == 1 { width } else { 0 });
        for a in lo..hi {
            self.limits.check_time("generation closure")?;
            let ca = self.codes.as_ref().expect("code path active")[a];
            for b in 0..hi {
                if commutative && b >= lo && b < a {
                    continue; // (b,a) already covered as (a,b) with a in frontier
                }
                let cb = self.codes.as_ref().expect("code path active")[b];
                let cand =
                    (t[0] & !ca & !cb) | (t[1] & !ca & cb) | (t[2] & ca & !cb) | (t[3] & ca & cb);
                self.add_code(cand)?;
                if !commutative && b < lo {
                    let cand = (t[0] & !cb & !ca)
                        | (t[1] & !cb & ca)
                        | (t[2] & cb & !ca)
                        | (t[3] & cb & ca);
                    self.add_code(cand)?;
                }
                if self.done {
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    /// Arity-r ≥ 3 scan via the prefix cache: enumerate all (r−1)-prefixes
    /// of members with max index in [cache.prefix_hi, hi), dedupe the
    /// vertexwise unary maps they induce, then run every cached map over the
    /// members past its watermark.
    fn scan_high_arity(&mut self, op_index: usize, _lo: usize, hi: usize) -> Result<()> {
        let k = self.alg.size as u32;
        let cache_pos = self
            .hcaches
            .iter()
            .position(|h| h.op_index == op_index)
            .expect("high-arity cache exists");
        let prefix_len = self.alg.ops[op_index].arity - 1;
        let prev_hi = self.hcaches[cache_pos].prefix_hi;

        // enumerate prefixes in [0,hi)^len minus [0,prev_hi)^len
        let mut tuple = vec![0usize; prefix_len];
        let mut new_keys: Vec<Vec<u32>> = Vec::new();
        self.enumerate_prefixes(&mut tuple, 0, false, prev_hi, hi, &mut |members, t| {
            let mut key = vec![0u32; 1usize << self.dim];
            for (v, slot) in key.iter_mut().enumerate() {
                let mut base = 0u32;
                for &m in t.iter() {
                    base = base * k + members[m].label(v) as u32;
                }
                *slot = base * k;
            }
            new_keys.push(key);
        })?;
        {
            let cache = &mut self.hcaches[cache_pos];
            cache.prefix_hi = hi;
            for key in new_keys {
                if !cache.seen.contains_key(&key) {
                    cache.seen.insert(key.clone(), cache.keys.len());
                    cache.keys.push((key, 0));
                }
            }
        }

        // apply every cached unary map to the members it has not seen yet
        let table_len = self.alg.ops[op_index].table().len();
        let mut key_idx = 0;
        loop {
            let watermark = {
                let cache = &self.hcaches[cache_pos];
                if key_idx >= cache.keys.len() {
                    break;
                }
                cache.keys[key_idx].1
            };
            if watermark >= hi {
                key_idx += 1;
                continue;
            }
            let key = self.hcaches[cache_pos].keys[key_idx].0.clone();
            if key_idx % 64 == 0 {
                self.limits.check_time("generation closure")?;
            }
            for m in watermark..hi {
                let labels: Vec<Label> = (0..1usize << self.dim)
                    .map(|v| {
                        let idx = key[v] as usize + self.members[m].label(v) as usize;
                        debug_assert!(idx < table_len);
                        self.alg.ops[op_index].table()[idx]
                    })
                    .collect();
                self.add(Cube::new(self.dim, labels))?;
                if self.done {
                    return Ok(());
                }
            }
            self.hcaches[cache_pos].keys[key_idx].1 = hi;
            key_idx += 1;
        }
        Ok(())
    }

    /// Visit every tuple in [0,hi)^len with at least one entry ≥ prev_hi.
    fn enumerate_prefixes(
        &self,
        tuple: &mut Vec<usize>,
        pos: usize,
        any_new: bool,
        prev_hi: usize,
        hi: usize,
        visit: &mut impl FnMut(&[Cube], &[usize]),
    ) -> Result<()> {
        if pos == tuple.len() {
            if any_new {
                visit(&self.members, tuple);
            }
            return Ok(());
        }
        if pos == 0 {
            self.limits.check_time("generation closure")?;
        }
        let rest_can_be_new = pos + 1 < tuple.len();
        for v in 0..hi {
            if !any_new && v < prev_hi && !rest_can_be_new {
                continue; // tuple would be entirely old
            }
            tuple[pos] = v;
            self.enumerate_prefixes(tuple, pos + 1, any_new || v >= prev_hi, prev_hi, hi, visit)?;
        }
        Ok(())
    }

    fn into_relation(self) -> Result<CubeRelation> {
        CubeRelation::from_cubes(self.alg.size, self.dim, self.members)
    }
}

/// Closure of `x` under the algebra's operations applied vertexwise
/// (subuniverse generation inside A^{2^n}).
pub fn subalgebra_gen(alg: &FiniteAlgebra, x: &CubeRelation, limits: &Limits) -> Result<CubeRelation> {
    generate(alg, x.dim(), x.iter().cloned(), false, None, limits)
}

/// Least relation containing `x` closed under refl, sym, and the operations:
/// the reflexive-symmetric compatible closure.
pub fn tol_gen(alg: &FiniteAlgebra, x: &CubeRelation, limits: &Limits) -> Result<CubeRelation> {
    generate(alg, x.dim(), x.iter().cloned(), true, None, limits)
}

/// Least n-dimensional congruence containing `x`: tc of the tol closure.
pub fn theta_gen(alg: &FiniteAlgebra, x: &CubeRelation, limits: &Limits) -> Result<CubeRelation> {
    tc(&tol_gen(alg, x, limits)?, limits)
}

/// Engine entry shared by the public closures and the axis-generated
/// relation builders (which can pass a sound `ceiling`).
pub(crate) fn generate(
    alg: &FiniteAlgebra,
    dim: usize,
    seeds: impl IntoIterator<Item = Cube>,
    use_refl_sym: bool,
    ceiling: Option<usize>,
    limits: &Limits,
) -> Result<CubeRelation> {
    let mut engine = Generator::new(alg, dim, use_refl_sym, ceiling, limits);
    for c in seeds {
        if c.dim() != dim {
            return Err(Error::Invalid(format!(
                "seed cube of dimension {} in a dimension-{dim} closure",
                c.dim()
            )));
        }
        if let Some(&bad) = c.labels().iter().find(|&&l| l as usize >= alg.size) {
            return Err(Error::Invalid(format!(
                "seed label {bad} outside universe 0..{}",
                alg.size
            )));
        }
        engine.add(c)?;
        if engine.done {
            break;
        }
    }
    engine.run()?;
    engine.into_relation()
}

/// Directional composition closure R^{∘i}: glue back the (≥ 1 step)
/// transitive closure of faces_i(R) viewed as a binary relation on
/// (n−1)-cubes. R ⊆ result because 1-step paths are kept.
pub fn dir_closure(r: &CubeRelation, i: usize, limits: &Limits) -> Result<CubeRelation> {
    dir_closure_ceiling(r, i, limits, None)
}

pub(crate) fn dir_closure_ceiling(
    r: &CubeRelation,
    i: usize,
    limits: &Limits,
    ceiling: Option<usize>,
) -> Result<CubeRelation> {
    assert!(i < r.dim(), "direction out of range");
    if let Some(c) = ceiling {
        if r.len() == c {
            return Ok(r.clone());
        }
    }
    // nodes: distinct faces; edges: the face pairs of member cubes
    let mut ids: BTreeMap<Cube, usize> = BTreeMap::new();
    let mut nodes: Vec<Cube> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for c in r.iter() {
        let (lo, hi) = faces(c, i);
        let mut id_of = |c: Cube, nodes: &mut Vec<Cube>| -> Result<usize> {
            if let Some(&id) = ids.get(&c) {
                return Ok(id);
            }
            if nodes.len() >= MAX_FACE_NODES {
                return Err(Error::Cap { what: "distinct directional faces", limit: MAX_FACE_NODES });
            }
            let id = nodes.len();
            ids.insert(c.clone(), id);
            nodes.push(c);
            Ok(id)
        };
        let a = id_of(lo, &mut nodes)?;
        let b = id_of(hi, &mut nodes)?;
        edges.push((a, b));
    }
    let n = nodes.len();
    let words = (n + 63) / 64;
    let mut reach = vec![0u64; n * words];
    for &(a, b) in &edges {
        reach[a * words + b / 64] |= 1 << (b % 64);
    }
    // ≥1-step reachability: paths allowed through any intermediate node
    for mid in 0..n {
        limits.check_time("directional closure")?;
        for a in 0..n {
            if a == mid || reach[a * words + mid / 64] & (1 << (mid % 64)) == 0 {
                continue; // no path a→mid, or a row OR with itself (no-op)
            }
            let (first, second) = reach.split_at_mut(a.max(mid) * words);
            let (arow, mrow) = if a < mid {
                (&mut first[a * words..a * words + words], &second[..words])
            } else {
                (&mut second[..words], &first[mid * words..mid * words + words])
            };
            for w in 0..words {
                arow[w] |= mrow[w];
            }
        }
    }
    // glue every reachable pair back into an n-cube
    let mut out = CubeRelation::new(r.universe(), r.dim());
    for a in 0..n {
        for w in 0..words {
            let mut bits = reach[a * words + w];
            while bits != 0 {
                let b = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                out.insert(glue(&[i], &[nodes[a].clone(), nodes[b].clone()]))?;
                limits.check_cubes(out.len())?;
                if Some(out.len()) == ceiling {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

/// Full transitive closure: round-robin of directional closures over
/// directions 0,…,n−1, repeated until one complete round adds nothing.
pub fn tc(r: &CubeRelation, limits: &Limits) -> Result<CubeRelation> {
    tc_ceiling(r, limits, None)
}

pub(crate) fn tc_ceiling(
    r: &CubeRelation,
    limits: &Limits,
    ceiling: Option<usize>,
) -> Result<CubeRelation> {
    let mut cur = r.clone();
    if cur.dim() == 0 {
        return Ok(cur);
    }
    loop {
        let before = cur.len();
        for i in 0..cur.dim() {
            limits.check_time("transitive closure")?;
            cur = dir_closure_ceiling(&cur, i, limits, ceiling)?;
            if Some(cur.len()) == ceiling {
                return Ok(cur);
            }
        }
        if cur.len() == before {
            return Ok(cur);
        }
    }
}
