//! Term and polynomial clone slices of a finite algebra.
//!
//! The `k`-ary slice of the term clone is the closure of the `k` projections
//! under composition with the fundamental operations; the polynomial slice
//! additionally starts from the constants. Both are generated as subuniverses
//! of the power `A^(A^k)` by the closure engine, with function tables read as
//! vectors of length `size^k`.

use crate::algebra::{self, FiniteAlgebra, FunctionTable};
use crate::closure::{self, ClosureError};

/// Which generators a clone slice starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloneKind {
    /// Projections only: `k`-ary term operations.
    Term,
    /// Projections and constants: `k`-ary polynomial operations.
    Polynomial,
}

impl std::fmt::Display for CloneKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CloneKind::Term => write!(f, "term"),
            CloneKind::Polynomial => write!(f, "polynomial"),
        }
    }
}

/// All operations of one arity in a clone, sorted by value table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CloneSlice {
    size: usize,
    arity: usize,
    kind: CloneKind,
    tables: Vec<FunctionTable>,
}

impl CloneSlice {
    /// Base set size.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Arity of every member.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Term or polynomial.
    pub fn kind(&self) -> CloneKind {
        self.kind
    }

    /// Number of member tables.
    pub fn len(&self) -> usize {
        self.tables.len()
    }

    /// Whether the slice has no members (cannot happen for valid input).
    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    /// Members in canonical (value-table) order.
    pub fn tables(&self) -> &[FunctionTable] {
        &self.tables
    }

    /// Membership by extensional equality.
    pub fn contains(&self, f: &FunctionTable) -> bool {
        self.position(f).is_some()
    }

    /// Index of a table in canonical order, if present.
    pub fn position(&self, f: &FunctionTable) -> Option<usize> {
        self.tables
            .binary_search_by(|t| t.values().cmp(f.values()))
            .ok()
    }
}

/// Generates the `k`-ary slice of the term or polynomial clone.
///
/// The closure runs over value vectors of length `size^k`; `budget` caps the
/// number of distinct tables and generation fails loudly when exceeded.
pub fn clone_upto(
    alg: &FiniteAlgebra,
    k: usize,
    kind: CloneKind,
    budget: usize,
) -> Result<CloneSlice, ClosureError> {
    assert!(k >= 1, "clone slices start at arity 1");
    let s = alg.size();
    let elem_len = algebra::power_len(s, k).ok_or(ClosureError::TooLarge { size: s, exponent: k })?;
    let mut seeds: Vec<Vec<u8>> = (0..k)
        .map(|i| FunctionTable::projection(s, k, i).values().to_vec())
        .collect();
    if kind == CloneKind::Polynomial {
        for v in 0..s as u8 {
            seeds.push(vec![v; elem_len]);
        }
    }
    let members = closure::generate_closure(alg, elem_len, &seeds, budget)?;
    let mut tables: Vec<FunctionTable> = members
        .into_iter()
        .map(|v| FunctionTable::new(s, k, v.into_vec()).expect("closure preserves range"))
        .collect();
    tables.sort_by(|a, b| a.values().cmp(b.values()));
    Ok(CloneSlice {
        size: s,
        arity: k,
        kind,
        tables,
    })
}

/// Whether a ternary table satisfies `m(x,y,y) = x` and `m(y,y,x) = x`.
pub fn is_malcev_table(m: &FunctionTable) -> bool {
    if m.arity() != 3 {
        return false;
    }
    let s = m.size() as u8;
    for x in 0..s {
        for y in 0..s {
            if m.eval(&[x, y, y]) != x || m.eval(&[y, y, x]) != x {
                return false;
            }
        }
    }
    true
}

/// Searches the ternary term clone for a Mal'cev operation. Returns the
/// first hit in canonical table order, or `None` when the algebra has no
/// Mal'cev term.
pub fn find_malcev(alg: &FiniteAlgebra, budget: usize) -> Result<Option<FunctionTable>, ClosureError> {
    let slice = clone_upto(alg, 3, CloneKind::Term, budget)?;
    Ok(slice.tables().iter().find(|t| is_malcev_table(t)).cloned())
}

/// A commutator operation together with a rank witness, if it has one.
///
/// A commutator of arity `k+1` returns its last argument whenever that
/// argument reappears among the first `k`; it is non-trivial when some input
/// escapes this, and `rank_args` then holds such an input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutatorWitness {
    /// The commutator table, arity `k+1`.
    pub table: FunctionTable,
    /// `(a_1..a_k, o)` with `table(a, o) != o`; absent for trivial
    /// commutators.
    pub rank_args: Option<(Vec<u8>, u8)>,
}

/// Checks the commutator absorption identity exhaustively and, when it
/// holds, searches for a non-triviality witness. Returns `None` when `f` is
/// not a commutator at all.
pub fn commutator_classify(f: &FunctionTable) -> Option<CommutatorWitness> {
    assert!(f.arity() >= 2, "commutators have arity k+1 with k >= 1");
    let s = f.size();
    let m = f.arity();
    let n = algebra::power_len(s, m).expect("table too large");
    let mut args = vec![0u8; m];
    let mut rank_args = None;
    for code in 0..n {
        algebra::decode_into(s, code, &mut args);
        let z = args[m - 1];
        let value = f.eval_code(code);
        if args[..m - 1].contains(&z) {
            if value != z {
                return None;
            }
        } else if value != z && rank_args.is_none() {
            rank_args = Some((args[..m - 1].to_vec(), z));
        }
    }
    Some(CommutatorWitness {
        table: f.clone(),
        rank_args,
    })
}

/// Errors from the translation-inverse search.
#[derive(Debug, thiserror::Error)]
pub enum TranslationInverseError {
    /// Clone generation failed first.
    #[error(transparent)]
    Closure(#[from] ClosureError),
    /// No ternary term inverts the translations; the algebra is not
    /// nilpotent (or the table passed is not Mal'cev).
    #[error("no ternary term inverts x -> m(x,b,c); the algebra is not nilpotent")]
    NotFound,
}

/// Finds `f` in the ternary term clone with `m(f(x,b,c),b,c) = x` and
/// `f(m(x,b,c),b,c) = x` for all `x,b,c`; such an `f` exists whenever the
/// algebra is nilpotent with Mal'cev term `m`. Scans in canonical table
/// order and returns the first hit.
pub fn translation_inverse(
    alg: &FiniteAlgebra,
    m: &FunctionTable,
    budget: usize,
) -> Result<FunctionTable, TranslationInverseError> {
    assert_eq!(m.arity(), 3);
    assert_eq!(m.size(), alg.size());
    let slice = clone_upto(alg, 3, CloneKind::Term, budget)?;
    let s = alg.size() as u8;
    'next: for f in slice.tables() {
        for x in 0..s {
            for b in 0..s {
                for c in 0..s {
                    let fx = f.eval(&[x, b, c]);
                    if m.eval(&[fx, b, c]) != x {
                        continue 'next;
                    }
                    let mx = m.eval(&[x, b, c]);
                    if f.eval(&[mx, b, c]) != x {
                        continue 'next;
                    }
                }
            }
        }
        return Ok(f.clone());
    }
    Err(TranslationInverseError::NotFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    /// Direct enumeration of the unary term operations of a cyclic group:
    /// the multiples of x.
    fn cyclic_unary_oracle(n: usize) -> Vec<Vec<u8>> {
        let mut out: Vec<Vec<u8>> = (1..=n)
            .map(|lambda| (0..n).map(|x| ((lambda * x) % n) as u8).collect())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    #[test]
    fn unary_term_clone_of_z4() {
        let z4 = samples::cyclic_group(4);
        let slice = clone_upto(&z4, 1, CloneKind::Term, 1000).unwrap();
        let got: Vec<Vec<u8>> = slice.tables().iter().map(|t| t.values().to_vec()).collect();
        assert_eq!(got, cyclic_unary_oracle(4));
        assert_eq!(slice.len(), 4);
    }

    #[test]
    fn unary_polynomial_clone_contains_constants() {
        let z4 = samples::cyclic_group(4);
        let slice = clone_upto(&z4, 1, CloneKind::Polynomial, 1000).unwrap();
        for v in 0..4u8 {
            assert!(slice.contains(&FunctionTable::constant(4, 1, v)));
        }
        // All maps ax+b: 16 tables.
        assert_eq!(slice.len(), 16);
    }

    #[test]
    fn slices_contain_projections_and_compose_back() {
        let z4 = samples::cyclic_group(4);
        let slice = clone_upto(&z4, 2, CloneKind::Term, 1000).unwrap();
        for i in 0..2 {
            assert!(slice.contains(&FunctionTable::projection(4, 2, i)));
        }
        // Spot-check closure: composing the fundamental op with any two
        // members stays inside.
        let plus = &z4.op("plus").unwrap().table;
        for f in slice.tables().iter().step_by(3) {
            for g in slice.tables().iter().step_by(5) {
                let h = plus.compose(&[f, g]);
                assert!(slice.contains(&h));
            }
        }
    }

    #[test]
    fn malcev_term_of_z4_is_x_minus_y_plus_z() {
        let z4 = samples::cyclic_group(4);
        let m = find_malcev(&z4, 1000).unwrap().unwrap();
        assert!(is_malcev_table(&m));
        for x in 0..4u8 {
            for y in 0..4u8 {
                for z in 0..4u8 {
                    assert_eq!(m.eval(&[x, y, z]), (x + 3 * y + z) % 4);
                }
            }
        }
    }

    #[test]
    fn semilattice_has_no_malcev_term() {
        let meet = FunctionTable::new(2, 2, vec![0, 0, 0, 1]).unwrap();
        let alg = FiniteAlgebra::new(
            2,
            vec![crate::algebra::Operation {
                name: "meet".into(),
                table: meet,
            }],
        )
        .unwrap();
        assert_eq!(find_malcev(&alg, 100_000).unwrap(), None);
    }

    #[test]
    fn budget_failure_is_loud() {
        let z4 = samples::cyclic_group(4);
        assert!(matches!(
            clone_upto(&z4, 3, CloneKind::Term, 3),
            Err(ClosureError::Budget { .. })
        ));
    }

    #[test]
    fn classify_accepts_commutators_and_rejects_others() {
        // 2(x-z)(y-z)+z on Z_4 is a commutator with rank witness.
        let mut tab = vec![0u8; 64];
        for (code, v) in tab.iter_mut().enumerate() {
            let (x, y, z) = (code % 4, code / 4 % 4, code / 16);
            *v = ((2 * (x + 4 - z) * (y + 4 - z) + z) % 4) as u8;
        }
        let c = FunctionTable::new(4, 3, tab).unwrap();
        let w = commutator_classify(&c).expect("is a commutator");
        let (args, o) = w.rank_args.expect("non-trivial");
        let mut point = args.clone();
        point.push(o);
        assert_ne!(c.eval(&point), o);

        // The last projection is a trivial commutator.
        let proj = FunctionTable::projection(4, 3, 2);
        let w = commutator_classify(&proj).unwrap();
        assert!(w.rank_args.is_none());

        // x+y-z violates absorption.
        let mut tab = vec![0u8; 64];
        for (code, v) in tab.iter_mut().enumerate() {
            let (x, y, z) = (code % 4, code / 4 % 4, code / 16);
            *v = ((x + y + 4 - z) % 4) as u8;
        }
        let f = FunctionTable::new(4, 3, tab).unwrap();
        assert!(commutator_classify(&f).is_none());
    }

    #[test]
    fn translation_inverse_on_z4() {
        let z4 = samples::cyclic_group(4);
        let m = find_malcev(&z4, 1000).unwrap().unwrap();
        let f = translation_inverse(&z4, &m, 1000).unwrap();
        for x in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    assert_eq!(m.eval(&[f.eval(&[x, b, c]), b, c]), x);
                    assert_eq!(f.eval(&[m.eval(&[x, b, c]), b, c]), x);
                }
            }
        }
    }
}
