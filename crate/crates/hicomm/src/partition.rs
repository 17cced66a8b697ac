use crate::error::{Error, Result};
use std::fmt;

/// An equivalence relation (partition) on the universe {0, …, k−1}.
///
/// Stored as `class_of[x] = class id`, with ids assigned in order of first
/// appearance while scanning 0, 1, …, k−1. That numbering is canonical: two
/// `Partition` values are equal iff they are the same equivalence relation,
/// and blocks listed by class id come out sorted by their minimum element.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    class_of: Vec<usize>,
    num_classes: usize,
}

impl Partition {
    /// All-singletons partition (the diagonal relation).
    pub fn diag(k: usize) -> Partition {
        Partition { class_of: (0..k).collect(), num_classes: k }
    }

    /// One-block partition (the full relation). `full(0)` has no classes.
    pub fn full(k: usize) -> Partition {
        Partition { class_of: vec![0; k], num_classes: if k == 0 { 0 } else { 1 } }
    }

    /// Build from an arbitrary class-id assignment, renumbering canonically.
    pub fn from_class_of(raw: &[usize]) -> Partition {
        let mut remap: Vec<Option<usize>> = vec![None; raw.len() + 1];
        let mut class_of = Vec::with_capacity(raw.len());
        let mut next = 0;
        for &c in raw {
            let id = match remap.get(c).copied().flatten() {
                Some(id) => id,
                None => {
                    if c >= remap.len() {
                        remap.resize(c + 1, None);
                    }
                    remap[c] = Some(next);
                    next += 1;
                    next - 1
                }
            };
            class_of.push(id);
        }
        Partition { class_of, num_classes: next }
    }

    /// Smallest equivalence relation on {0,…,k−1} relating every given pair.
    pub fn from_pairs(k: usize, pairs: &[(usize, usize)]) -> Partition {
        let mut uf = UnionFind::new(k);
        for &(a, b) in pairs {
            uf.union(a, b);
        }
        uf.into_partition()
    }

    /// Universe size.
    pub fn size(&self) -> usize {
        self.class_of.len()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    /// Are `a` and `b` in the same block?
    pub fn same(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    pub fn is_diag(&self) -> bool {
        self.num_classes == self.class_of.len()
    }

    pub fn is_full(&self) -> bool {
        self.num_classes <= 1
    }

    /// Blocks in canonical order (sorted by minimum element).
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_classes];
        for (x, &c) in self.class_of.iter().enumerate() {
            blocks[c].push(x);
        }
        blocks
    }

    /// Every ordered related pair, diagonal included.
    pub fn related_pairs(&self) -> Vec<(usize, usize)> {
        let k = self.size();
        let mut out = Vec::new();
        for a in 0..k {
            for b in 0..k {
                if self.same(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Refinement order: self ≤ other iff every block of self lies in a block of other.
    pub fn leq(&self, other: &Partition) -> bool {
        debug_assert_eq!(self.size(), other.size());
        // class of self determines class of other ⟺ refinement
        let mut image: Vec<Option<usize>> = vec![None; self.num_classes];
        for x in 0..self.size() {
            let c = self.class_of[x];
            match image[c] {
                None => image[c] = Some(other.class_of[x]),
                Some(d) if d == other.class_of[x] => {}
                Some(_) => return false,
            }
        }
        true
    }

    /// Common refinement (meet in the lattice of equivalence relations —
    /// and of congruences, since an intersection of congruences is one).
    pub fn meet(&self, other: &Partition) -> Partition {
        debug_assert_eq!(self.size(), other.size());
        let n = other.num_classes.max(1);
        let raw: Vec<usize> = (0..self.size())
            .map(|x| self.class_of[x] * n + other.class_of[x])
            .collect();
        Partition::from_class_of(&raw)
    }

    /// Join as equivalence relations: transitive closure of the union.
    /// (For congruences this coincides with the congruence join; the
    /// algebra-aware `join` in the algebra module goes through cg and the
    /// two are cross-checked in tests.)
    pub fn join_eq(&self, other: &Partition) -> Partition {
        debug_assert_eq!(self.size(), other.size());
        let mut uf = UnionFind::new(self.size());
        for x in 0..self.size() {
            for y in (x + 1)..self.size() {
                if self.same(x, y) || other.same(x, y) {
                    uf.union(x, y);
                }
            }
        }
        uf.into_partition()
    }

    /// Parse a block literal like `0 2|1 3` (elements split by spaces or
    /// commas), or the keywords `full` / `diag`, over a universe of size `k`.
    pub fn parse(text: &str, k: usize) -> Result<Partition> {
        let trimmed = text.trim();
        match trimmed {
            "full" => return Ok(Partition::full(k)),
            "diag" => return Ok(Partition::diag(k)),
            "" => return Err(Error::Parse("empty partition literal".into())),
            _ => {}
        }
        let mut class_of: Vec<Option<usize>> = vec![None; k];
        for (id, block) in trimmed.split('|').enumerate() {
            let mut empty = true;
            for tok in block.split(|c: char| c.is_whitespace() || c == ',') {
                if tok.is_empty() {
                    continue;
                }
                empty = false;
                let x: usize = tok.parse().map_err(|_| {
                    Error::Parse(format!("bad element `{tok}` in partition literal"))
                })?;
                if x >= k {
                    return Err(Error::Parse(format!(
                        "element {x} out of range for universe size {k}"
                    )));
                }
                if class_of[x].is_some() {
                    return Err(Error::Parse(format!(
                        "element {x} appears twice in partition literal"
                    )));
                }
                class_of[x] = Some(id);
            }
            if empty {
                return Err(Error::Parse("empty block in partition literal".into()));
            }
        }
        let raw: Vec<usize> = class_of
            .into_iter()
            .enumerate()
            .map(|(x, c)| c.ok_or_else(|| Error::Parse(format!("element {x} missing from partition literal"))))
            .collect::<Result<_>>()?;
        Ok(Partition::from_class_of(&raw))
    }
}

impl fmt::Display for Partition {
    /// Canonical block literal: blocks sorted by minimum element,
    /// elements ascending, e.g. `0 2|1 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks().iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            for (j, x) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({self})")
    }
}

/// Every partition of {0,…,k−1}, enumerated via restricted growth strings.
/// Count is the Bell number B(k) — use only at desk scale.
pub fn all_partitions(k: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; k];
    fn rec(rgs: &mut Vec<usize>, pos: usize, max_used: usize, out: &mut Vec<Partition>) {
        if pos == rgs.len() {
            out.push(Partition::from_class_of(rgs));
            return;
        }
        for c in 0..=max_used + 1 {
            rgs[pos] = c;
            rec(rgs, pos + 1, max_used.max(c), out);
        }
    }
    if k == 0 {
        out.push(Partition::diag(0));
    } else {
        // first element is always class 0
        rec(&mut rgs, 1, 0, &mut out);
    }
    out
}

/// Plain union-find over {0,…,k−1}; small enough that a dependency would
/// outweigh it.
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(k: usize) -> UnionFind {
        UnionFind { parent: (0..k).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Merge the classes of `a` and `b`; true if they were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller root so first-appearance numbering is stable
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn into_partition(mut self) -> Partition {
        let raw: Vec<usize> = (0..self.parent.len()).map(|x| self.find(x)).collect();
        Partition::from_class_of(&raw)
    }
}
