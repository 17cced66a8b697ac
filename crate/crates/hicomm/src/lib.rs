//! Computation kernel for higher commutator theory on finite algebras:
//! labeled-cube relations, directional closures, the two higher commutators
//! (term-condition and hypercommutator), nilpotence and supernilpotence
//! series, and identity-package witnesses with their rotation/companion
//! constructions.

pub mod algebra;
pub mod checks;
pub mod commutator;
pub mod corpus;
pub mod cube;
pub mod error;
pub mod limits;
pub mod nilpotence;
pub mod partition;
pub mod relation;
pub mod report;
pub mod taylor;

pub use algebra::{con, eval_term, is_congruence, join, FiniteAlgebra, Operation, Term};
pub use checks::{all_pass, run_structural_laws, run_theorem, CheckLine, TheoremId};
pub use commutator::{
    build_delta, build_m, build_nest, build_rect, has_centrality, hyper_commutator,
    low_arity_characterizations, rect_count, tc_commutator, LowArityReport,
};
pub use cube::{
    commutator_cube, cut, cut_relation_at, faces, gen_cube, glue, is_reflexive, is_symmetric,
    is_transitive, lines, pivot_line, pivot_square, refl, squares, sym, Cube, CubeRelation,
    Label, LinePair,
};
pub use error::{Error, Result};
pub use limits::Limits;
pub use nilpotence::{
    check_h_eq_tc, check_sdmeet, check_supernil_implies_nil_bound, diagonal_hyper_commutator,
    diagonal_tc_commutator, lower_central_series, nilpotence_class, supernilpotence_class,
    CentralSeries,
};
pub use partition::{all_partitions, Partition};
pub use relation::{dir_closure, subalgebra_gen, tc, theta_gen, tol_gen};
pub use report::{line_profile, render_check_lines, render_summary};
pub use taylor::{TaylorPackage, VerifiedTaylor};
