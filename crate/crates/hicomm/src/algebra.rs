use crate::error::{Error, Result};
use crate::partition::{all_partitions, Partition, UnionFind};
use std::collections::BTreeSet;
use std::fmt::Write as _;

pub const MAX_UNIVERSE: usize = 255;
pub const MAX_TABLE_ENTRIES: usize = 1 << 24;
pub const DEFAULT_CON_CAP: usize = 10_000;

/// A finitary operation on {0,…,k−1}, tabulated row-major with the LEFTMOST
/// argument most significant: index = a₀·k^(r−1) + … + a_{r−1}.
#[derive(Debug, Clone)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
    k: usize,
    table: Vec<u16>,
}

impl Operation {
    pub fn new(name: &str, arity: usize, k: usize, table: Vec<u16>) -> Operation {
        assert!(k >= 1 && k <= MAX_UNIVERSE);
        assert_eq!(table.len(), k.pow(arity as u32));
        assert!(table.iter().all(|&v| (v as usize) < k), "table entry out of range");
        Operation { name: name.to_string(), arity, k, table }
    }

    pub fn apply(&self, args: &[u16]) -> u16 {
        debug_assert_eq!(args.len(), self.arity);
        let mut idx = 0usize;
        for &a in args {
            idx = idx * self.k + a as usize;
        }
        self.table[idx]
    }

    pub fn table(&self) -> &[u16] {
        &self.table
    }

    /// Decode a flat table index into its argument tuple.
    pub fn decode_index(&self, mut idx: usize, out: &mut [u16]) {
        debug_assert_eq!(out.len(), self.arity);
        for j in (0..self.arity).rev() {
            out[j] = (idx % self.k) as u16;
            idx /= self.k;
        }
    }

    /// True for binary operations whose table is symmetric.
    pub fn is_commutative(&self) -> bool {
        if self.arity != 2 {
            return false;
        }
        for a in 0..self.k {
            for b in (a + 1)..self.k {
                if self.table[a * self.k + b] != self.table[b * self.k + a] {
                    return false;
                }
            }
        }
        true
    }
}

/// A finite algebra: universe {0,…,k−1} plus a list of tabulated operations.
#[derive(Debug, Clone)]
pub struct FiniteAlgebra {
    pub name: String,
    pub size: usize,
    pub ops: Vec<Operation>,
}

impl FiniteAlgebra {
    pub fn new(name: &str, size: usize, ops: Vec<Operation>) -> FiniteAlgebra {
        assert!(size >= 1 && size <= MAX_UNIVERSE);
        for op in &ops {
            assert_eq!(op.k, size, "operation `{}` over wrong universe", op.name);
        }
        FiniteAlgebra { name: name.to_string(), size, ops }
    }

    pub fn op(&self, name: &str) -> Option<&Operation> {
        self.ops.iter().find(|o| o.name == name)
    }

    /// Parse the plain-text algebra format:
    /// ```text
    /// algebra <name>
    /// size <k>
    /// op <name> <arity>
    /// <k^arity integers, any whitespace layout>
    /// ```
    /// `#` starts a comment running to end of line.
    pub fn parse(text: &str) -> Result<FiniteAlgebra> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(|l| l.split_whitespace())
            .peekable();
        let mut expect = |what: &str| -> Result<String> {
            tokens
                .next()
                .map(str::to_string)
                .ok_or_else(|| Error::Parse(format!("unexpected end of input, expected {what}")))
        };
        let kw = expect("`algebra`")?;
        if kw != "algebra" {
            return Err(Error::Parse(format!("expected `algebra`, found `{kw}`")));
        }
        let name = expect("algebra name")?;
        let kw = expect("`size`")?;
        if kw != "size" {
            return Err(Error::Parse(format!("expected `size`, found `{kw}`")));
        }
        let size_tok = expect("universe size")?;
        let size: usize = size_tok
            .parse()
            .map_err(|_| Error::Parse(format!("bad universe size `{size_tok}`")))?;
        if size < 1 || size > MAX_UNIVERSE {
            return Err(Error::Parse(format!(
                "universe size {size} out of range 1..={MAX_UNIVERSE}"
            )));
        }
        let mut ops: Vec<Operation> = Vec::new();
        loop {
            let Some(tok) = tokens.next() else { break };
            if tok != "op" {
                return Err(Error::Parse(format!("expected `op`, found `{tok}`")));
            }
            let op_name = tokens
                .next()
                .ok_or_else(|| Error::Parse("missing operation name".into()))?
                .to_string();
            if is_variable_token(&op_name) {
                return Err(Error::Parse(format!(
                    "operation name `{op_name}` has the shape of a variable token"
                )));
            }
            if ops.iter().any(|o| o.name == op_name) {
                return Err(Error::Parse(format!("duplicate operation name `{op_name}`")));
            }
            let arity_tok = tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing arity for op `{op_name}`")))?;
            let arity: usize = arity_tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad arity `{arity_tok}` for op `{op_name}`")))?;
            let entries = (size as u64)
                .checked_pow(arity as u32)
                .filter(|&e| e <= MAX_TABLE_ENTRIES as u64)
                .ok_or_else(|| Error::Parse(format!(
                    "table for op `{op_name}` would exceed {MAX_TABLE_ENTRIES} entries"
                )))? as usize;
            let mut table = Vec::with_capacity(entries);
            for i in 0..entries {
                let tok = tokens.next().ok_or_else(|| {
                    Error::Parse(format!(
                        "truncated table for op `{op_name}`: got {i} of {entries} entries"
                    ))
                })?;
                let v: usize = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad table entry `{tok}` for op `{op_name}`")))?;
                if v >= size {
                    return Err(Error::Parse(format!(
                        "table entry {v} out of range for universe size {size}"
                    )));
                }
                table.push(v as u16);
            }
            ops.push(Operation { name: op_name, arity, k: size, table });
        }
        Ok(FiniteAlgebra { name, size, ops })
    }

    /// Emit the algebra in the same plain-text format `parse` reads.
    pub fn to_file_string(&self) -> String {
        let mut s = String::new();
        writeln!(s, "algebra {}", self.name).unwrap();
        writeln!(s, "size {}", self.size).unwrap();
        for op in &self.ops {
            writeln!(s, "op {} {}", op.name, op.arity).unwrap();
            // one row of k entries per line (layout is free-form on input)
            for chunk in op.table.chunks(self.size.max(1)) {
                let row: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
                writeln!(s, "{}", row.join(" ")).unwrap();
            }
        }
        s
    }
}

fn is_variable_token(tok: &str) -> bool {
    tok.len() >= 2 && tok.starts_with('v') && tok[1..].chars().all(|c| c.is_ascii_digit())
}

/// A term over an algebra's signature: variable or operation applied to terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    /// Parse whitespace-separated prefix notation, arities taken from `alg`:
    /// `add v0 add neg v1 v2` ≡ add(v0, add(neg(v1), v2)).
    pub fn parse(text: &str, alg: &FiniteAlgebra) -> Result<Term> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let mut pos = 0usize;
        let term = Self::parse_at(&tokens, &mut pos, alg)?;
        if pos != tokens.len() {
            return Err(Error::Parse(format!(
                "trailing tokens after term: `{}`",
                tokens[pos..].join(" ")
            )));
        }
        Ok(term)
    }

    /// Parse one complete term starting at `tokens[*pos]`, advancing `pos`.
    pub(crate) fn parse_at(tokens: &[&str], pos: &mut usize, alg: &FiniteAlgebra) -> Result<Term> {
        let Some(&tok) = tokens.get(*pos) else {
            return Err(Error::Parse("unexpected end of term".into()));
        };
        *pos += 1;
        if is_variable_token(tok) {
            let idx: usize = tok[1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad variable token `{tok}`")))?;
            return Ok(Term::Var(idx));
        }
        let op = alg
            .op(tok)
            .ok_or_else(|| Error::Parse(format!("unknown operation `{tok}` in term")))?;
        let mut children = Vec::with_capacity(op.arity);
        for _ in 0..op.arity {
            children.push(Self::parse_at(tokens, pos, alg)?);
        }
        Ok(Term::App(tok.to_string(), children))
    }

    /// Largest variable index + 1, i.e. the number of variable slots needed.
    pub fn num_vars(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::App(_, children) => children.iter().map(|c| c.num_vars()).max().unwrap_or(0),
        }
    }
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Term::Var(i) => write!(f, "v{i}"),
            Term::App(name, children) => {
                write!(f, "{name}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                Ok(())
            }
        }
    }
}

/// Evaluate `t` under the given variable assignment.
pub fn eval_term(alg: &FiniteAlgebra, t: &Term, assignment: &[u16]) -> Result<u16> {
    match t {
        Term::Var(i) => assignment
            .get(*i)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("variable v{i} has no assigned value"))),
        Term::App(name, children) => {
            let op = alg
                .op(name)
                .ok_or_else(|| Error::Invalid(format!("unknown operation `{name}`")))?;
            let mut args = Vec::with_capacity(children.len());
            for c in children {
                args.push(eval_term(alg, c, assignment)?);
            }
            Ok(op.apply(&args))
        }
    }
}

/// Is `p` compatible with every operation of `alg`?
///
/// Uses the one-coordinate substitution form: for every operation f, tuple a,
/// position j, and b ≡ a_j (mod p), require f(a) ≡ f(a[j↦b]). For an
/// equivalence relation this is equivalent to the blockwise-tuples definition
/// (substitute one coordinate at a time along a chain).
pub fn is_congruence(alg: &FiniteAlgebra, p: &Partition) -> bool {
    assert_eq!(p.size(), alg.size, "partition over wrong universe");
    let k = alg.size;
    let mut tuple = vec![0u16; 8];
    for op in &alg.ops {
        let tuple = &mut tuple[..op.arity];
        for idx in 0..op.table.len() {
            op.decode_index(idx, tuple);
            let fa = op.table[idx];
            for j in 0..op.arity {
                let orig = tuple[j];
                for b in 0..k as u16 {
                    if b != orig && p.same(orig as usize, b as usize) {
                        tuple[j] = b;
                        if !p.same(fa as usize, op.apply(tuple) as usize) {
                            return false;
                        }
                    }
                }
                tuple[j] = orig;
            }
        }
    }
    true
}

/// Smallest congruence of `alg` containing every given pair.
///
/// Fixpoint: merge the generating pairs in a union-find, then repeatedly
/// apply the one-coordinate closure rule — for every operation f, tuple a,
/// position j, and b currently related to a_j, merge f(a) with f(a[j↦b]) —
/// until a full pass adds nothing.
pub fn cg(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Partition {
    let k = alg.size;
    let mut uf = UnionFind::new(k);
    let mut changed = false;
    for &(a, b) in pairs {
        assert!(a < k && b < k, "cg pair out of universe");
        changed |= uf.union(a, b);
    }
    let mut tuple = vec![0u16; 8];
    while changed {
        changed = false;
        for op in &alg.ops {
            let tuple = &mut tuple[..op.arity];
            for idx in 0..op.table.len() {
                op.decode_index(idx, tuple);
                let fa = op.table[idx];
                for j in 0..op.arity {
                    let orig = tuple[j];
                    for b in 0..k as u16 {
                        if b != orig && uf.same(orig as usize, b as usize) {
                            tuple[j] = b;
                            let fb = op.apply(tuple);
                            changed |= uf.union(fa as usize, fb as usize);
                        }
                    }
                    tuple[j] = orig;
                }
            }
        }
    }
    uf.into_partition()
}

/// Congruence join: the least congruence above both (cg of the union of the
/// pair sets; for congruences this is also their join as equivalences).
pub fn join(alg: &FiniteAlgebra, p: &Partition, q: &Partition) -> Partition {
    let mut pairs = p.related_pairs();
    pairs.extend(q.related_pairs());
    cg(alg, &pairs)
}

/// The full congruence lattice: diagonal plus all principal congruences,
/// closed under binary join. Capped at `cap` congruences (resource error).
pub fn con_capped(alg: &FiniteAlgebra, cap: usize) -> Result<Vec<Partition>> {
    let k = alg.size;
    let mut set: BTreeSet<Partition> = BTreeSet::new();
    set.insert(Partition::diag(k));
    let mut frontier: Vec<Partition> = Vec::new();
    for a in 0..k {
        for b in (a + 1)..k {
            let principal = cg(alg, &[(a, b)]);
            if set.insert(principal.clone()) {
                frontier.push(principal);
            }
        }
    }
    while let Some(p) = frontier.pop() {
        if set.len() > cap {
            return Err(Error::Cap { what: "congruence lattice size", limit: cap });
        }
        let existing: Vec<Partition> = set.iter().cloned().collect();
        for q in existing {
            let j = join(alg, &p, &q);
            if set.insert(j.clone()) {
                frontier.push(j);
            }
        }
    }
    if set.len() > cap {
        return Err(Error::Cap { what: "congruence lattice size", limit: cap });
    }
    Ok(set.into_iter().collect())
}

/// `con_capped` with the default cap.
pub fn con(alg: &FiniteAlgebra) -> Result<Vec<Partition>> {
    con_capped(alg, DEFAULT_CON_CAP)
}

/// Brute-force congruence lattice by filtering every partition of the
/// universe. Exponential; test oracle only.
pub fn con_brute_force(alg: &FiniteAlgebra) -> Vec<Partition> {
    all_partitions(alg.size)
        .into_iter()
        .filter(|p| is_congruence(alg, p))
        .collect()
}
