//! Partitions of the base set and congruence computations.
//!
//! A partition is stored by least-element representatives: `rep(a)` is the
//! smallest element of the block containing `a`. Congruences are partitions
//! compatible with every fundamental operation; they are generated from pairs
//! by closing under unary polynomial translations with a worklist.

use std::fmt;

use crate::algebra::{self, FiniteAlgebra};

/// A partition of `0..size` in least-element-representative form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    reps: Vec<u8>,
}

/// Plain union-find over `0..n`, used to build partitions.
struct UnionFind {
    parent: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n as u8).collect(),
        }
    }

    fn find(&mut self, a: u8) -> u8 {
        let mut a = a;
        while self.parent[a as usize] != a {
            let gp = self.parent[self.parent[a as usize] as usize];
            self.parent[a as usize] = gp;
            a = gp;
        }
        a
    }

    /// Unions two classes, keeping the smaller root; returns whether the
    /// classes were previously distinct.
    fn union(&mut self, a: u8, b: u8) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        true
    }

    fn into_partition(mut self) -> Partition {
        let reps = (0..self.parent.len() as u8).map(|a| self.find(a)).collect();
        Partition { reps }
    }
}

impl Partition {
    /// The discrete partition (all blocks are singletons).
    pub fn zero(size: usize) -> Partition {
        Partition {
            reps: (0..size as u8).collect(),
        }
    }

    /// The one-block partition.
    pub fn one(size: usize) -> Partition {
        Partition {
            reps: vec![0u8; size],
        }
    }

    /// Builds the finest partition identifying all the given pairs.
    pub fn from_pairs(size: usize, pairs: &[(u8, u8)]) -> Partition {
        let mut uf = UnionFind::new(size);
        for &(a, b) in pairs {
            uf.union(a, b);
        }
        uf.into_partition()
    }

    /// Size of the underlying set.
    pub fn size(&self) -> usize {
        self.reps.len()
    }

    /// Least element of the block containing `a`.
    #[inline]
    pub fn rep(&self, a: u8) -> u8 {
        self.reps[a as usize]
    }

    /// Whether `a` and `b` share a block.
    #[inline]
    pub fn same(&self, a: u8, b: u8) -> bool {
        self.reps[a as usize] == self.reps[b as usize]
    }

    /// Number of blocks.
    pub fn block_count(&self) -> usize {
        self.reps
            .iter()
            .enumerate()
            .filter(|&(a, &r)| a as u8 == r)
            .count()
    }

    /// Whether this is the discrete partition.
    pub fn is_zero(&self) -> bool {
        self.reps.iter().enumerate().all(|(a, &r)| a as u8 == r)
    }

    /// Whether this is the one-block partition.
    pub fn is_one(&self) -> bool {
        self.reps.iter().all(|&r| r == 0)
    }

    /// The blocks, each sorted, ordered by their least elements.
    pub fn blocks(&self) -> Vec<Vec<u8>> {
        let mut out: Vec<Vec<u8>> = Vec::new();
        for (a, &r) in self.reps.iter().enumerate() {
            if a as u8 == r {
                out.push(vec![r]);
            } else {
                let pos = out.iter().position(|b| b[0] == r).expect("rep precedes member");
                out[pos].push(a as u8);
            }
        }
        out
    }

    /// Members of the block containing `a`, sorted.
    pub fn class_of(&self, a: u8) -> Vec<u8> {
        let r = self.rep(a);
        (0..self.reps.len() as u8).filter(|&b| self.rep(b) == r).collect()
    }

    /// Whether every block of `self` lies inside a block of `other`
    /// (refinement order; `zero <= theta <= one` for all `theta`).
    pub fn leq(&self, other: &Partition) -> bool {
        assert_eq!(self.size(), other.size());
        self.reps
            .iter()
            .enumerate()
            .all(|(a, &r)| other.same(a as u8, r))
    }

    /// Join in the partition lattice (transitive closure of the union).
    pub fn join(&self, other: &Partition) -> Partition {
        assert_eq!(self.size(), other.size());
        let mut uf = UnionFind::new(self.size());
        for (a, &r) in self.reps.iter().enumerate() {
            uf.union(a as u8, r);
        }
        for (a, &r) in other.reps.iter().enumerate() {
            uf.union(a as u8, r);
        }
        uf.into_partition()
    }

    /// Meet in the partition lattice (blockwise intersection).
    pub fn meet(&self, other: &Partition) -> Partition {
        assert_eq!(self.size(), other.size());
        let n = self.size();
        let mut reps = vec![0u8; n];
        for a in 0..n as u8 {
            let key = (self.rep(a), other.rep(a));
            let least = (0..=a)
                .find(|&b| (self.rep(b), other.rep(b)) == key)
                .expect("a itself matches");
            reps[a as usize] = least;
        }
        Partition { reps }
    }

    /// Exhaustively checks compatibility with every fundamental operation.
    pub fn is_congruence(&self, alg: &FiniteAlgebra) -> bool {
        assert_eq!(self.size(), alg.size());
        let s = alg.size();
        for op in alg.ops() {
            let m = op.table.arity();
            let rest = algebra::power_len(s, m - 1).expect("table too large");
            let mut args = vec![0u8; m];
            for pos in 0..m {
                for a in 0..s as u8 {
                    for b in (a + 1)..s as u8 {
                        if !self.same(a, b) {
                            continue;
                        }
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
                            let va = op.table.eval(&args);
                            args[pos] = b;
                            let vb = op.table.eval(&args);
                            if !self.same(va, vb) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, block) in self.blocks().iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            for (j, a) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{a}")?;
            }
        }
        write!(f, "}}")
    }
}

/// All distinct unary translation maps of the algebra: one operation applied
/// with all arguments but one frozen to constants.
fn translations(alg: &FiniteAlgebra) -> Vec<Vec<u8>> {
    let s = alg.size();
    let mut maps: Vec<Vec<u8>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for op in alg.ops() {
        let m = op.table.arity();
        let rest = algebra::power_len(s, m - 1).expect("table too large");
        let mut args = vec![0u8; m];
        for pos in 0..m {
            for combo in 0..rest {
                let mut c = combo;
                for (i, slot) in args.iter_mut().enumerate() {
                    if i == pos {
                        continue;
                    }
                    *slot = (c % s) as u8;
                    c /= s;
                }
                let map: Vec<u8> = (0..s as u8)
                    .map(|x| {
                        args[pos] = x;
                        op.table.eval(&args)
                    })
                    .collect();
                // Identity translations never merge anything new.
                if map.iter().enumerate().all(|(x, &y)| x as u8 == y) {
                    continue;
                }
                if seen.insert(map.clone()) {
                    maps.push(map);
                }
            }
        }
    }
    maps
}

/// The least congruence of `alg` identifying all the given pairs.
///
/// Pairs are closed under unary polynomial translations with a worklist;
/// transitive closure is maintained by union-find, so the result is exactly
/// the congruence generated.
pub fn congruence_generate(alg: &FiniteAlgebra, pairs: &[(u8, u8)]) -> Partition {
    let s = alg.size();
    let maps = translations(alg);
    let mut uf = UnionFind::new(s);
    let mut work: Vec<(u8, u8)> = Vec::new();
    for &(a, b) in pairs {
        assert!((a as usize) < s && (b as usize) < s);
        if uf.union(a, b) {
            work.push((a, b));
        }
    }
    while let Some((a, b)) = work.pop() {
        for map in &maps {
            let (u, v) = (map[a as usize], map[b as usize]);
            if uf.union(u, v) {
                work.push((u, v));
            }
        }
    }
    uf.into_partition()
}

/// The full congruence lattice: all principal congruences closed under join,
/// plus the discrete partition. Sorted from finest to coarsest (by block
/// count descending, then by representative vector).
pub fn congruence_lattice(alg: &FiniteAlgebra) -> Vec<Partition> {
    let s = alg.size();
    let mut found: Vec<Partition> = vec![Partition::zero(s)];
    for a in 0..s as u8 {
        for b in (a + 1)..s as u8 {
            let cg = congruence_generate(alg, &[(a, b)]);
            if !found.contains(&cg) {
                found.push(cg);
            }
        }
    }
    // Join closure; congruences are closed under join, and every congruence
    // is the join of the principal congruences below it.
    let mut i = 0;
    while i < found.len() {
        for j in 0..i {
            let joined = found[i].join(&found[j]);
            if !found.contains(&joined) {
                found.push(joined);
            }
        }
        i += 1;
    }
    found.sort_by(|p, q| {
        q.block_count()
            .cmp(&p.block_count())
            .then_with(|| p.reps.cmp(&q.reps))
    });
    found
}
