//! Generation of subuniverses of powers: the closure engine shared by
//! subpower generation and clone-slice enumeration.
//!
//! Elements are fixed-length vectors over the base set (tuples of `A^n`, or
//! value tables of `k`-ary functions read as tuples of `A^(A^k)`); the
//! closure is taken under all fundamental operations applied coordinatewise.
//!
//! The naive fixpoint (apply every operation to every argument combination
//! until nothing new appears) is quadratic or worse in the closure size, so
//! each operation gets one of three execution plans, chosen from its base
//! table alone and exact in all cases:
//!
//! * unary operations map elements one at a time;
//! * an operation whose base table is a group multiplication generates a
//!   subgroup of the power, grown by coset extension (abelian) or by a
//!   breadth-first rebuild over an accumulated generator list (general);
//!   either way the work is near-linear in the subgroup produced, not
//!   quadratic in it;
//! * any other operation is applied through its argument kernels: arguments
//!   that the table cannot distinguish are identified first, so elements
//!   collapse to quotient vectors and each combination of quotient classes
//!   is evaluated once.
//!
//! All plans insert into one deduplicating index, so the result and its
//! insertion order are deterministic.

use indexmap::IndexSet;

use crate::algebra::{self, FiniteAlgebra, FunctionTable};
use crate::relation::RelationSet;

/// Errors from closure generation.
#[derive(Debug, thiserror::Error)]
pub enum ClosureError {
    /// The closure grew past the element budget before completing.
    #[error("closure exceeded budget of {budget} elements (reached {reached})")]
    Budget {
        /// Element budget in force.
        budget: usize,
        /// Number of elements generated when the run stopped.
        reached: usize,
    },
    /// The ambient power itself is too large to address.
    #[error("power {size}^{exponent} is too large")]
    TooLarge {
        /// Base set size.
        size: usize,
        /// Power exponent requested.
        exponent: usize,
    },
    /// A seed vector has the wrong length or an out-of-range entry.
    #[error("seed {index} is invalid: {reason}")]
    BadSeed {
        /// Position of the seed in the input list.
        index: usize,
        /// What was wrong with it.
        reason: String,
    },
}

enum Plan {
    Unary(UnaryPlan),
    Group(GroupPlan),
    Reduced(ReducedPlan),
}

struct UnaryPlan {
    map: Vec<u8>,
    cursor: usize,
}

struct GroupPlan {
    table: Vec<u8>,
    size: usize,
    identity: u8,
    abelian: bool,
    cursor: usize,
    /// Whether the element at each index of the global set is a known
    /// subgroup member; extended lazily as the set grows.
    in_sub: Vec<bool>,
    /// Subgroup members in discovery order, as indices into the global set.
    sub: Vec<usize>,
    /// Generators folded so far (general case only).
    gens: Vec<usize>,
}

struct ReducedPlan {
    arity: usize,
    /// Per argument: base element to kernel class.
    class_of: Vec<Vec<u8>>,
    /// Per argument: number of kernel classes.
    radix: Vec<usize>,
    /// Table over kernel-class codes, mixed radix, first argument least
    /// significant.
    qtable: Vec<u8>,
    cursor: usize,
    /// Per argument: distinct quotient vectors seen so far.
    qvecs: Vec<IndexSet<Box<[u8]>>>,
    /// Per argument: how many quotient vectors had been combined already.
    old_len: Vec<usize>,
}

/// Tests whether a binary base table is a group multiplication; returns the
/// identity element and whether the group is abelian.
fn group_structure(table: &FunctionTable) -> Option<(u8, bool)> {
    if table.arity() != 2 {
        return None;
    }
    let s = table.size();
    let t = table.values();
    let at = |a: usize, b: usize| t[a + s * b] as usize;
    // Cancellativity: every row and every column is a permutation.
    for a in 0..s {
        let mut row = vec![false; s];
        let mut col = vec![false; s];
        for b in 0..s {
            row[at(a, b)] = true;
            col[at(b, a)] = true;
        }
        if row.iter().any(|&x| !x) || col.iter().any(|&x| !x) {
            return None;
        }
    }
    // Associativity.
    for a in 0..s {
        for b in 0..s {
            let ab = at(a, b);
            for c in 0..s {
                if at(ab, c) != at(a, at(b, c)) {
                    return None;
                }
            }
        }
    }
    // A finite cancellative associative groupoid is a group; find the
    // two-sided identity.
    let e = (0..s).find(|&e| (0..s).all(|x| at(e, x) == x && at(x, e) == x))?;
    let abelian = (0..s).all(|a| (a..s).all(|b| at(a, b) == at(b, a)));
    Some((e as u8, abelian))
}

/// Computes the kernel classes of each argument of an operation: two base
/// elements land in one class when swapping them in that argument never
/// changes the output.
fn argument_kernels(table: &FunctionTable) -> (Vec<Vec<u8>>, Vec<usize>, Vec<u8>) {
    let s = table.size();
    let m = table.arity();
    let rest = algebra::power_len(s, m - 1).expect("table too large");
    let mut class_of = Vec::with_capacity(m);
    let mut radix = Vec::with_capacity(m);
    let mut reps: Vec<Vec<u8>> = Vec::with_capacity(m);
    let mut args = vec![0u8; m];
    for pos in 0..m {
        // Signature of a value in this argument: outputs over all settings
        // of the other arguments.
        let mut sigs: Vec<Vec<u8>> = Vec::with_capacity(s);
        for a in 0..s as u8 {
            let mut sig = Vec::with_capacity(rest);
            for combo in 0..rest {
                let mut c = combo;
                for (i, slot) in args.iter_mut().enumerate() {
                    if i == pos {
                        continue;
                    }
                    *slot = (c % s) as u8;
                    c /= s;
                }
                args[pos] = a;
                sig.push(table.eval(&args));
            }
            sigs.push(sig);
        }
        let mut classes: Vec<u8> = vec![0; s];
        let mut rep: Vec<u8> = Vec::new();
        let mut seen: Vec<&[u8]> = Vec::new();
        for a in 0..s {
            match seen.iter().position(|sig| *sig == sigs[a].as_slice()) {
                Some(c) => classes[a] = c as u8,
                None => {
                    classes[a] = seen.len() as u8;
                    seen.push(&sigs[a]);
                    rep.push(a as u8);
                }
            }
        }
        radix.push(rep.len());
        reps.push(rep);
        class_of.push(classes);
    }
    // Quotient table over class codes, evaluated at class representatives.
    let qlen: usize = radix.iter().product();
    let mut qtable = vec![0u8; qlen];
    let mut point = vec![0u8; m];
    for (code, v) in qtable.iter_mut().enumerate() {
        let mut c = code;
        for i in 0..m {
            point[i] = reps[i][c % radix[i]];
            c /= radix[i];
        }
        *v = table.eval(&point);
    }
    (class_of, radix, qtable)
}

/// The closure engine. See the module docs for the plan strategy.
struct Engine {
    elem_len: usize,
    budget: usize,
    set: IndexSet<Box<[u8]>>,
    plans: Vec<Plan>,
}

impl Engine {
    fn new(alg: &FiniteAlgebra, elem_len: usize, budget: usize) -> Engine {
        let plans = alg
            .ops()
            .iter()
            .map(|op| {
                let t = &op.table;
                if t.arity() == 1 {
                    Plan::Unary(UnaryPlan {
                        map: t.values().to_vec(),
                        cursor: 0,
                    })
                } else if let Some((identity, abelian)) = group_structure(t) {
                    Plan::Group(GroupPlan {
                        table: t.values().to_vec(),
                        size: t.size(),
                        identity,
                        abelian,
                        cursor: 0,
                        in_sub: Vec::new(),
                        sub: Vec::new(),
                        gens: Vec::new(),
                    })
                } else {
                    let (class_of, radix, qtable) = argument_kernels(t);
                    let m = t.arity();
                    Plan::Reduced(ReducedPlan {
                        arity: m,
                        class_of,
                        radix,
                        qtable,
                        cursor: 0,
                        qvecs: (0..m).map(|_| IndexSet::new()).collect(),
                        old_len: vec![0; m],
                    })
                }
            })
            .collect();
        Engine {
            elem_len,
            budget,
            set: IndexSet::new(),
            plans,
        }
    }

    fn insert(&mut self, v: Box<[u8]>) -> Result<usize, ClosureError> {
        let (idx, _) = self.set.insert_full(v);
        if self.set.len() > self.budget {
            return Err(ClosureError::Budget {
                budget: self.budget,
                reached: self.set.len(),
            });
        }
        Ok(idx)
    }

    fn run(&mut self) -> Result<(), ClosureError> {
        loop {
            let before = self.set.len();
            let mut caught_up = true;
            for pi in 0..self.plans.len() {
                // Plans are taken out and put back to sidestep aliasing with
                // the shared set.
                let mut plan = std::mem::replace(&mut self.plans[pi], Plan::Unary(UnaryPlan { map: Vec::new(), cursor: 0 }));
                let res = match &mut plan {
                    Plan::Unary(p) => self.run_unary(p),
                    Plan::Group(p) => self.run_group(p),
                    Plan::Reduced(p) => self.run_reduced(p),
                };
                self.plans[pi] = plan;
                res?;
            }
            for plan in &self.plans {
                let cursor = match plan {
                    Plan::Unary(p) => p.cursor,
                    Plan::Group(p) => p.cursor,
                    Plan::Reduced(p) => p.cursor,
                };
                if cursor < self.set.len() {
                    caught_up = false;
                }
            }
            if self.set.len() == before && caught_up {
                return Ok(());
            }
        }
    }

    fn run_unary(&mut self, p: &mut UnaryPlan) -> Result<(), ClosureError> {
        while p.cursor < self.set.len() {
            let src = self.set[p.cursor].clone();
            p.cursor += 1;
            let out: Box<[u8]> = src.iter().map(|&x| p.map[x as usize]).collect();
            self.insert(out)?;
        }
        Ok(())
    }

    fn run_group(&mut self, p: &mut GroupPlan) -> Result<(), ClosureError> {
        let s = p.size;
        let mult = |a: &[u8], b: &[u8], table: &[u8]| -> Box<[u8]> {
            a.iter()
                .zip(b)
                .map(|(&x, &y)| table[x as usize + s * y as usize])
                .collect()
        };
        while p.cursor < self.set.len() {
            let t_idx = p.cursor;
            p.cursor += 1;
            if p.in_sub.len() < self.set.len() {
                p.in_sub.resize(self.set.len(), false);
            }
            if p.in_sub[t_idx] {
                continue;
            }
            if p.sub.is_empty() {
                let e: Box<[u8]> = vec![p.identity; self.elem_len].into();
                let idx = self.insert(e)?;
                p.in_sub.resize(self.set.len().max(p.in_sub.len()), false);
                if !p.in_sub[idx] {
                    p.in_sub[idx] = true;
                    p.sub.push(idx);
                }
                if idx == t_idx {
                    continue;
                }
            }
            let t_val: Box<[u8]> = self.set[t_idx].clone();
            if p.abelian {
                // Coset extension: the enlarged subgroup is the union of
                // H*t^j until some power of t falls back into H.
                let snapshot: Vec<Box<[u8]>> = p.sub.iter().map(|&i| self.set[i].clone()).collect();
                let mut cur = t_val.clone();
                loop {
                    if let Some(i) = self.set.get_index_of(&cur) {
                        if i < p.in_sub.len() && p.in_sub[i] {
                            break;
                        }
                    }
                    for h in &snapshot {
                        let v = mult(h, &cur, &p.table);
                        let idx = self.insert(v)?;
                        if p.in_sub.len() < self.set.len() {
                            p.in_sub.resize(self.set.len(), false);
                        }
                        if !p.in_sub[idx] {
                            p.in_sub[idx] = true;
                            p.sub.push(idx);
                        }
                    }
                    cur = mult(&cur, &t_val, &p.table);
                }
            } else {
                // General case: remember the generator and rebuild the
                // subgroup breadth-first. Each rebuild at least doubles the
                // subgroup, so there are at most log many of them.
                p.gens.push(t_idx);
                p.sub.clear();
                p.in_sub.clear();
                p.in_sub.resize(self.set.len(), false);
                let e: Box<[u8]> = vec![p.identity; self.elem_len].into();
                let idx = self.insert(e)?;
                p.in_sub.resize(self.set.len().max(p.in_sub.len()), false);
                p.in_sub[idx] = true;
                p.sub.push(idx);
                let mut qi = 0;
                while qi < p.sub.len() {
                    let w: Box<[u8]> = self.set[p.sub[qi]].clone();
                    qi += 1;
                    for gi in 0..p.gens.len() {
                        let g: Box<[u8]> = self.set[p.gens[gi]].clone();
                        let v = mult(&w, &g, &p.table);
                        let idx = self.insert(v)?;
                        if p.in_sub.len() < self.set.len() {
                            p.in_sub.resize(self.set.len(), false);
                        }
                        if !p.in_sub[idx] {
                            p.in_sub[idx] = true;
                            p.sub.push(idx);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn run_reduced(&mut self, p: &mut ReducedPlan) -> Result<(), ClosureError> {
        // Project the elements that appeared since last time.
        while p.cursor < self.set.len() {
            let e = self.set[p.cursor].clone();
            p.cursor += 1;
            for (i, qset) in p.qvecs.iter_mut().enumerate() {
                let qv: Box<[u8]> = e.iter().map(|&x| p.class_of[i][x as usize]).collect();
                qset.insert(qv);
            }
        }
        let cur_len: Vec<usize> = p.qvecs.iter().map(|q| q.len()).collect();
        if cur_len == p.old_len {
            return Ok(());
        }
        // Apply the quotient table to every combination containing at least
        // one fresh quotient vector: partition combinations by the last
        // argument holding a fresh vector.
        let m = p.arity;
        let mut idx = vec![0usize; m];
        for pivot in 0..m {
            if p.old_len[pivot] == cur_len[pivot] {
                continue;
            }
            // Arguments after the pivot use only old vectors; the pivot uses
            // only fresh ones; arguments before it use everything.
            let lo: Vec<usize> = (0..m).map(|i| if i == pivot { p.old_len[i] } else { 0 }).collect();
            let hi: Vec<usize> = (0..m)
                .map(|i| {
                    if i < pivot {
                        cur_len[i]
                    } else if i == pivot {
                        cur_len[i]
                    } else {
                        p.old_len[i]
                    }
                })
                .collect();
            if hi.iter().zip(&lo).any(|(h, l)| h <= l) {
                continue;
            }
            idx.copy_from_slice(&lo);
            loop {
                let mut out = vec![0u8; self.elem_len];
                for (pos, slot) in out.iter_mut().enumerate() {
                    let mut code = 0usize;
                    for i in (0..m).rev() {
                        let qv = &p.qvecs[i][idx[i]];
                        code = code * p.radix[i] + qv[pos] as usize;
                    }
                    *slot = p.qtable[code];
                }
                self.insert(out.into())?;
                let mut i = 0;
                while i < m {
                    idx[i] += 1;
                    if idx[i] < hi[i] {
                        break;
                    }
                    idx[i] = lo[i];
                    i += 1;
                }
                if i == m {
                    break;
                }
            }
        }
        p.old_len = cur_len;
        Ok(())
    }
}

/// Closes a set of length-`elem_len` vectors under all operations of `alg`
/// applied coordinatewise. Returns the closure in deterministic insertion
/// order (seeds first).
pub fn generate_closure(
    alg: &FiniteAlgebra,
    elem_len: usize,
    seeds: &[Vec<u8>],
    budget: usize,
) -> Result<Vec<Box<[u8]>>, ClosureError> {
    let mut engine = Engine::new(alg, elem_len, budget);
    for (i, seed) in seeds.iter().enumerate() {
        if seed.len() != elem_len {
            return Err(ClosureError::BadSeed {
                index: i,
                reason: format!("length {} instead of {elem_len}", seed.len()),
            });
        }
        if let Some(&bad) = seed.iter().find(|&&x| x as usize >= alg.size()) {
            return Err(ClosureError::BadSeed {
                index: i,
                reason: format!("entry {bad} outside 0..{}", alg.size()),
            });
        }
        engine.insert(seed.clone().into())?;
    }
    engine.run()?;
    Ok(engine.set.into_iter().collect())
}

/// Generates the subuniverse of `A^n` spanned by the given tuples.
pub fn subuniverse_generate(
    alg: &FiniteAlgebra,
    n: usize,
    gens: &[Vec<u8>],
) -> Result<RelationSet, ClosureError> {
    assert!(!gens.is_empty(), "subuniverse generation needs at least one tuple");
    let universe = algebra::power_len(alg.size(), n).ok_or(ClosureError::TooLarge {
        size: alg.size(),
        exponent: n,
    })?;
    let members = generate_closure(alg, n, gens, universe)?;
    let mut rel = RelationSet::empty(alg.size(), n);
    for m in &members {
        rel.insert(m);
    }
    Ok(rel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Operation;
    use crate::samples;
    use std::collections::BTreeSet;

    /// Reference closure: apply every operation to every combination until
    /// stable. Exponential in general; used to validate the plans on small
    /// inputs.
    fn naive_closure(alg: &FiniteAlgebra, seeds: &[Vec<u8>]) -> BTreeSet<Vec<u8>> {
        let mut set: BTreeSet<Vec<u8>> = seeds.iter().cloned().collect();
        loop {
            let members: Vec<Vec<u8>> = set.iter().cloned().collect();
            let before = set.len();
            for op in alg.ops() {
                let m = op.table.arity();
                let mut idx = vec![0usize; m];
                loop {
                    let args: Vec<&[u8]> = idx.iter().map(|&i| members[i].as_slice()).collect();
                    set.insert(algebra::apply_pointwise(&op.table, &args));
                    let mut i = 0;
                    while i < m {
                        idx[i] += 1;
                        if idx[i] < members.len() {
                            break;
                        }
                        idx[i] = 0;
                        i += 1;
                    }
                    if i == m {
                        break;
                    }
                }
            }
            if set.len() == before {
                return set;
            }
        }
    }

    fn sorted(closure: Vec<Box<[u8]>>) -> BTreeSet<Vec<u8>> {
        closure.into_iter().map(|b| b.to_vec()).collect()
    }

    #[test]
    fn group_structure_detection() {
        let z4 = samples::cyclic_group(4);
        assert_eq!(group_structure(&z4.op("plus").unwrap().table), Some((0, true)));
        let s3 = samples::symmetric_group_3();
        assert_eq!(group_structure(&s3.op("mult").unwrap().table), Some((0, false)));
        // A semilattice is associative and commutative but not cancellative.
        let meet = FunctionTable::new(2, 2, vec![0, 0, 0, 1]).unwrap();
        assert_eq!(group_structure(&meet), None);
    }

    #[test]
    fn kernels_collapse_doubling() {
        // 2xy mod 4 only depends on the arguments mod 2.
        let tab: Vec<u8> = (0..16).map(|c| (2 * (c % 4) * (c / 4) % 4) as u8).collect();
        let dbl = FunctionTable::new(4, 2, tab).unwrap();
        let (class_of, radix, qtable) = argument_kernels(&dbl);
        assert_eq!(radix, vec![2, 2]);
        assert_eq!(class_of[0], vec![0, 1, 0, 1]);
        assert_eq!(class_of[1], vec![0, 1, 0, 1]);
        assert_eq!(qtable, vec![0, 0, 0, 2]);
    }

    #[test]
    fn subgroup_of_z4_square() {
        let z4 = samples::cyclic_group(4);
        let sub = subuniverse_generate(&z4, 2, &[vec![1, 1]]).unwrap();
        assert_eq!(sub.len(), 4);
        assert!(sub.contains(&[0, 0]) && sub.contains(&[3, 3]));
        let sub2 = subuniverse_generate(&z4, 2, &[vec![1, 3]]).unwrap();
        assert_eq!(sub2.len(), 4);
        assert!(sub2.contains(&[2, 2]) && sub2.contains(&[3, 1]));
    }

    #[test]
    fn engine_matches_naive_closure_on_mixed_ops() {
        // Z_4 with doubling product: group plan for plus, kernel plan for the
        // doubled product. Checked against the naive fixpoint on A^3.
        let plus: Vec<u8> = (0..16).map(|c| ((c % 4) + (c / 4)) as u8 % 4).collect();
        let dbl: Vec<u8> = (0..16).map(|c| (2 * (c % 4) * (c / 4) % 4) as u8).collect();
        let alg = FiniteAlgebra::new(
            4,
            vec![
                Operation {
                    name: "plus".into(),
                    table: FunctionTable::new(4, 2, plus).unwrap(),
                },
                Operation {
                    name: "dbl2".into(),
                    table: FunctionTable::new(4, 2, dbl).unwrap(),
                },
            ],
        )
        .unwrap();
        for seeds in [
            vec![vec![1, 0, 0]],
            vec![vec![1, 2, 3]],
            vec![vec![0, 1, 1], vec![1, 1, 0]],
            vec![vec![2, 0, 2], vec![1, 1, 1]],
        ] {
            let fast = sorted(generate_closure(&alg, 3, &seeds, usize::MAX).unwrap());
            let slow = naive_closure(&alg, &seeds);
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn engine_matches_naive_closure_on_s3() {
        let s3 = samples::symmetric_group_3();
        for seeds in [
            vec![vec![1u8, 3]],
            vec![vec![3, 4]],
            vec![vec![1, 0], vec![0, 3]],
        ] {
            let fast = sorted(generate_closure(&s3, 2, &seeds, usize::MAX).unwrap());
            let slow = naive_closure(&s3, &seeds);
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn engine_matches_naive_closure_on_non_group_ops() {
        // Majority-flavored ternary operation plus a cyclic unary; exercises
        // the kernel plan at arity 3 and the unary plan.
        let s = 3usize;
        let mut maj = vec![0u8; 27];
        for (code, v) in maj.iter_mut().enumerate() {
            let (a, b, c) = (code % 3, code / 3 % 3, code / 9);
            *v = if a == b || a == c { a as u8 } else { b as u8 };
        }
        let alg = FiniteAlgebra::new(
            s,
            vec![
                Operation {
                    name: "maj".into(),
                    table: FunctionTable::new(3, 3, maj).unwrap(),
                },
                Operation {
                    name: "succ".into(),
                    table: FunctionTable::new(3, 1, vec![1, 2, 0]).unwrap(),
                },
            ],
        )
        .unwrap();
        for seeds in [vec![vec![0u8, 1]], vec![vec![0, 1], vec![1, 0]]] {
            let fast = sorted(generate_closure(&alg, 2, &seeds, usize::MAX).unwrap());
            let slow = naive_closure(&alg, &seeds);
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn budget_cuts_generation_short() {
        let z4 = samples::cyclic_group(4);
        let err = generate_closure(&z4, 4, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]], 5).unwrap_err();
        match err {
            ClosureError::Budget { budget: 5, reached } => assert!(reached > 5),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn seeds_are_validated() {
        let z4 = samples::cyclic_group(4);
        assert!(matches!(
            generate_closure(&z4, 2, &[vec![1, 2, 3]], 100),
            Err(ClosureError::BadSeed { index: 0, .. })
        ));
        assert!(matches!(
            generate_closure(&z4, 2, &[vec![1, 4]], 100),
            Err(ClosureError::BadSeed { index: 0, .. })
        ));
    }

    #[test]
    fn closure_is_deterministic() {
        let s3 = samples::symmetric_group_3();
        let a = generate_closure(&s3, 2, &[vec![1, 3], vec![4, 0]], usize::MAX).unwrap();
        let b = generate_closure(&s3, 2, &[vec![1, 3], vec![4, 0]], usize::MAX).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_algebras_match_naive_closure() {
        use proptest::prelude::*;
        use proptest::test_runner::{Config, TestRunner};
        let mut runner = TestRunner::new(Config::with_cases(48));
        runner
            .run(
                &(2usize..=4).prop_flat_map(|s| {
                    (
                        Just(s),
                        proptest::collection::vec(0..s as u8, s * s),
                        proptest::collection::vec(0..s as u8, 1..=2),
                    )
                }),
                |(s, table, seed)| {
                    let op = FunctionTable::new(s, 2, table).unwrap();
                    let alg = FiniteAlgebra::new(
                        s,
                        vec![Operation {
                            name: "f".into(),
                            table: op,
                        }],
                    )
                    .unwrap();
                    let seeds = vec![seed];
                    let fast = sorted(generate_closure(&alg, seeds[0].len(), &seeds, usize::MAX).unwrap());
                    let slow = naive_closure(&alg, &seeds);
                    prop_assert_eq!(fast, slow);
                    Ok(())
                },
            )
            .unwrap();
    }
}
