//! Small stock algebras used in tests, documentation, and the data files.

use crate::algebra::{FiniteAlgebra, FunctionTable, Operation};

/// The cyclic group of order `n` as `({0..n}; +)`.
///
/// Addition alone generates the full group clone on a finite cyclic group
/// (inverses are positive powers), so no separate negation is included.
pub fn cyclic_group(n: usize) -> FiniteAlgebra {
    assert!(n >= 1 && n <= 255);
    let table: Vec<u8> = (0..n * n).map(|c| ((c % n + c / n) % n) as u8).collect();
    FiniteAlgebra::new(
        n,
        vec![Operation {
            name: "plus".into(),
            table: FunctionTable::new(n, 2, table).unwrap(),
        }],
    )
    .unwrap()
}

/// The Klein four-group `Z_2 x Z_2` on `{0..4}`, elements read as bit pairs.
pub fn klein_four() -> FiniteAlgebra {
    let table: Vec<u8> = (0..16).map(|c| ((c % 4) ^ (c / 4)) as u8).collect();
    FiniteAlgebra::new(
        4,
        vec![Operation {
            name: "plus".into(),
            table: FunctionTable::new(4, 2, table).unwrap(),
        }],
    )
    .unwrap()
}

/// The symmetric group on three letters as `({0..6}; *)`.
///
/// Numbering: 0 is the identity, 1 and 2 are the three-cycles `(0 1 2)` and
/// `(0 2 1)`, and 3, 4, 5 are the transpositions `(0 1)`, `(0 2)`, `(1 2)`
/// conjugate-shuffled so that element `i + 3j` is `c^i t^j` for `c = (0 1 2)`,
/// `t = (0 1)`. The alternating subgroup is `{0, 1, 2}`.
pub fn symmetric_group_3() -> FiniteAlgebra {
    let perm = |i: usize| -> [u8; 3] {
        let c = [[0u8, 1, 2], [1, 2, 0], [2, 0, 1]][i % 3];
        if i < 3 {
            c
        } else {
            // c^i composed with the swap (0 1): apply the swap first.
            let t = [1u8, 0, 2];
            [c[t[0] as usize], c[t[1] as usize], c[t[2] as usize]]
        }
    };
    let code = |p: [u8; 3]| (0..6).find(|&i| perm(i) == p).unwrap() as u8;
    let mut table = vec![0u8; 36];
    for a in 0..6 {
        for b in 0..6 {
            let (pa, pb) = (perm(a), perm(b));
            // Product means "apply b, then a".
            let prod = [
                pa[pb[0] as usize],
                pa[pb[1] as usize],
                pa[pb[2] as usize],
            ];
            table[a + 6 * b] = code(prod);
        }
    }
    FiniteAlgebra::new(
        6,
        vec![Operation {
            name: "mult".into(),
            table: FunctionTable::new(6, 2, table).unwrap(),
        }],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_group_tables() {
        let z4 = cyclic_group(4);
        let plus = &z4.op("plus").unwrap().table;
        assert_eq!(plus.eval(&[3, 3]), 2);
        assert_eq!(plus.eval(&[1, 2]), 3);
    }

    #[test]
    fn klein_four_is_elementary_abelian() {
        let v = klein_four();
        let plus = &v.op("plus").unwrap().table;
        for a in 0..4u8 {
            assert_eq!(plus.eval(&[a, a]), 0);
            for b in 0..4u8 {
                assert_eq!(plus.eval(&[a, b]), plus.eval(&[b, a]));
            }
        }
    }

    #[test]
    fn s3_is_the_right_group() {
        let s3 = symmetric_group_3();
        let m = &s3.op("mult").unwrap().table;
        // Identity, inverses, associativity.
        for a in 0..6u8 {
            assert_eq!(m.eval(&[0, a]), a);
            assert_eq!(m.eval(&[a, 0]), a);
            assert!((0..6u8).any(|b| m.eval(&[a, b]) == 0 && m.eval(&[b, a]) == 0));
            for b in 0..6u8 {
                for c in 0..6u8 {
                    let ab_c = m.eval(&[m.eval(&[a, b]), c]);
                    let a_bc = m.eval(&[a, m.eval(&[b, c])]);
                    assert_eq!(ab_c, a_bc);
                }
            }
        }
        // Noncommutative, and {0,1,2} is the cyclic subgroup.
        assert_ne!(m.eval(&[3, 1]), m.eval(&[1, 3]));
        assert_eq!(m.eval(&[1, 1]), 2);
        assert_eq!(m.eval(&[1, 2]), 0);
        // Conjugating a three-cycle stays in {0,1,2}.
        for t in 3..6u8 {
            let inv = (0..6u8).find(|&b| m.eval(&[t, b]) == 0).unwrap();
            let conj = m.eval(&[m.eval(&[t, 1]), inv]);
            assert!(conj <= 2 && conj != 0);
        }
    }
}
