use crate::algebra::{FiniteAlgebra, Operation};
use crate::error::{Error, Result};
use crate::taylor::TaylorPackage;

/// Names of the built-in algebras, in listing order.
pub const NAMES: [&str; 8] = [
    "z2", "z3", "z4", "z2xz2", "semilattice2", "lattice2", "majority3", "bare2",
];

pub fn names() -> &'static [&'static str] {
    &NAMES
}

/// Construct a built-in algebra by name.
pub fn algebra(name: &str) -> Result<FiniteAlgebra> {
    let alg = match name {
        "z2" => cyclic_group(2),
        "z3" => cyclic_group(3),
        "z4" => cyclic_group(4),
        "z2xz2" => {
            // universe 0..3 read as bit pairs; addition is XOR of indices
            let add: Vec<u16> = (0..16).map(|i| ((i / 4) ^ (i % 4)) as u16).collect();
            let neg: Vec<u16> = (0..4).collect(); // every element is its own inverse
            FiniteAlgebra::new(
                "z2xz2",
                4,
                vec![Operation::new("add", 2, 4, add), Operation::new("neg", 1, 4, neg)],
            )
        }
        "semilattice2" => FiniteAlgebra::new(
            "semilattice2",
            2,
            vec![Operation::new("meet", 2, 2, vec![0, 0, 0, 1])],
        ),
        "lattice2" => FiniteAlgebra::new(
            "lattice2",
            2,
            vec![
                Operation::new("meet", 2, 2, vec![0, 0, 0, 1]),
                Operation::new("join", 2, 2, vec![0, 1, 1, 1]),
            ],
        ),
        "majority3" => {
            // dual discriminator: maj(x,y,z) = x if x == y, else z
            let mut table = Vec::with_capacity(27);
            for x in 0..3u16 {
                for y in 0..3u16 {
                    for z in 0..3u16 {
                        table.push(if x == y { x } else { z });
                    }
                }
            }
            FiniteAlgebra::new("majority3", 3, vec![Operation::new("maj", 3, 3, table)])
        }
        "bare2" => FiniteAlgebra::new("bare2", 2, vec![]),
        _ => return Err(Error::Invalid(format!("unknown corpus algebra `{name}`"))),
    };
    Ok(alg)
}

fn cyclic_group(k: usize) -> FiniteAlgebra {
    let mut add = Vec::with_capacity(k * k);
    for a in 0..k {
        for b in 0..k {
            add.push(((a + b) % k) as u16);
        }
    }
    let neg: Vec<u16> = (0..k).map(|a| ((k - a) % k) as u16).collect();
    FiniteAlgebra::new(
        &format!("z{k}"),
        k,
        vec![Operation::new("add", 2, k, add), Operation::new("neg", 1, k, neg)],
    )
}

/// Built-in identity package for a corpus algebra, if it has one.
/// The groups share the ternary x−y+z package; the semilattice uses its
/// commutative binary term; the lattice and the majority algebra use a
/// ternary majority term. The empty-clone control has none.
pub fn package(name: &str) -> Result<Option<TaylorPackage>> {
    let text = match package_file_text(name) {
        Some(t) => t,
        None => return Ok(None),
    };
    let alg = algebra(name)?;
    let pkg = TaylorPackage::parse(&text, &alg)?;
    Ok(Some(pkg))
}

/// Package file text for `corpus emit`, if the algebra has a package.
pub fn package_file_text(name: &str) -> Option<String> {
    let body = match name {
        "z2" | "z3" | "z4" | "z2xz2" => {
            "term add v0 add neg v1 v2\n\
             left\n X X Y\n X X Y\n Y Y X\n\
             right\n Y Y Y\n Y Y Y\n X Y Y\n"
        }
        "semilattice2" => {
            "term meet v0 v1\n\
             left\n X Y\n Y X\n\
             right\n Y X\n X Y\n"
        }
        "lattice2" => {
            "term join meet v0 v1 join meet v1 v2 meet v2 v0\n\
             left\n X X Y\n X X Y\n Y X X\n\
             right\n Y X X\n X Y X\n X X Y\n"
        }
        "majority3" => {
            "term maj v0 v1 v2\n\
             left\n X X Y\n X X Y\n Y X X\n\
             right\n Y X X\n X Y X\n X X Y\n"
        }
        _ => return None,
    };
    let arity = if name == "semilattice2" { 2 } else { 3 };
    Some(format!("taylor {name} arity {arity}\n{body}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_has_eight_round_tripping_algebras() {
        assert_eq!(names().len(), 8);
        for name in names() {
            let alg = algebra(name).unwrap();
            assert_eq!(&alg.name, name);
            let text = alg.to_file_string();
            let back = FiniteAlgebra::parse(&text).unwrap();
            assert_eq!(back.to_file_string(), text, "emit not stable for {name}");
        }
        assert!(algebra("nope").is_err());
    }

    #[test]
    fn group_tables_satisfy_group_laws() {
        for name in ["z2", "z3", "z4", "z2xz2"] {
            let alg = algebra(name).unwrap();
            let add = alg.op("add").unwrap();
            let neg = alg.op("neg").unwrap();
            let k = alg.size as u16;
            for a in 0..k {
                assert_eq!(add.apply(&[a, 0]), a, "{name}: 0 not right identity");
                assert_eq!(add.apply(&[0, a]), a, "{name}: 0 not left identity");
                assert_eq!(add.apply(&[a, neg.apply(&[a])]), 0, "{name}: bad inverse");
                for b in 0..k {
                    for c in 0..k {
                        let lhs = add.apply(&[add.apply(&[a, b]), c]);
                        let rhs = add.apply(&[a, add.apply(&[b, c])]);
                        assert_eq!(lhs, rhs, "{name}: not associative");
                    }
                }
            }
        }
    }

    #[test]
    fn majority_and_lattice_tables() {
        let m = algebra("majority3").unwrap();
        let maj = m.op("maj").unwrap();
        for x in 0..3u16 {
            for y in 0..3u16 {
                assert_eq!(maj.apply(&[x, x, y]), x);
                assert_eq!(maj.apply(&[x, y, x]), x);
                assert_eq!(maj.apply(&[y, x, x]), x);
            }
        }
        let l = algebra("lattice2").unwrap();
        let meet = l.op("meet").unwrap();
        let join = l.op("join").unwrap();
        for x in 0..2u16 {
            for y in 0..2u16 {
                // absorption ties the two semilattices into a lattice
                assert_eq!(meet.apply(&[x, join.apply(&[x, y])]), x);
                assert_eq!(join.apply(&[x, meet.apply(&[x, y])]), x);
            }
        }
        assert!(meet.is_commutative() && join.is_commutative());
    }

    #[test]
    fn packages_parse_for_all_but_the_bare_control() {
        for name in names() {
            let pkg = package(name).unwrap();
            assert_eq!(pkg.is_some(), *name != "bare2", "package presence for {name}");
            if let Some(p) = pkg {
                assert_eq!(p.arity, if *name == "semilattice2" { 2 } else { 3 });
            }
        }
    }
}
