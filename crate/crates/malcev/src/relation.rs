//! Finitary relations over the base set and partial functions on powers.
//!
//! A relation of arity `n` over `0..s` is a set of `n`-tuples, stored as a
//! bitset over tuple codes. Partial functions `A^k -> A` (candidate
//! polymorphisms restricted to a domain) store their domain as sorted tuple
//! codes plus a dense lookup table.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{self, AlgebraError, FiniteAlgebra, FunctionTable, TupleCode};

/// A plain bitset with a fixed universe size.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bitset {
    len: usize,
    words: Vec<u64>,
}

impl Bitset {
    /// An empty set over a universe of `len` points.
    pub fn new(len: usize) -> Bitset {
        Bitset {
            len,
            words: vec![0u64; len.div_ceil(64)],
        }
    }

    /// Universe size.
    pub fn universe(&self) -> usize {
        self.len
    }

    /// Inserts a point; returns whether it was new.
    pub fn insert(&mut self, i: usize) -> bool {
        debug_assert!(i < self.len);
        let (w, b) = (i / 64, i % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    /// Removes a point; returns whether it was present.
    pub fn remove(&mut self, i: usize) -> bool {
        debug_assert!(i < self.len);
        let (w, b) = (i / 64, i % 64);
        let had = self.words[w] & (1 << b) != 0;
        self.words[w] &= !(1 << b);
        had
    }

    /// Membership test.
    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    /// Number of points in the set.
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Whether no point is set.
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Intersects in place with another set over the same universe.
    pub fn intersect_with(&mut self, other: &Bitset) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Unions in place with another set over the same universe.
    pub fn union_with(&mut self, other: &Bitset) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Whether every point of `self` lies in `other`.
    pub fn is_subset(&self, other: &Bitset) -> bool {
        assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Iterates set points in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

/// A finitary relation: a set of `arity`-tuples over `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationSet {
    size: usize,
    arity: usize,
    bits: Bitset,
}

impl RelationSet {
    /// The empty relation of the given signature.
    pub fn empty(size: usize, arity: usize) -> RelationSet {
        let n = algebra::power_len(size, arity).expect("relation universe too large");
        RelationSet {
            size,
            arity,
            bits: Bitset::new(n),
        }
    }

    /// The full relation `A^arity`.
    pub fn full(size: usize, arity: usize) -> RelationSet {
        let mut r = RelationSet::empty(size, arity);
        for code in 0..r.bits.universe() {
            r.bits.insert(code);
        }
        r
    }

    /// Builds a relation from explicit tuples.
    pub fn from_tuples(size: usize, arity: usize, tuples: &[Vec<u8>]) -> Result<RelationSet, AlgebraError> {
        let mut r = RelationSet::empty(size, arity);
        for t in tuples {
            if t.len() != arity {
                return Err(AlgebraError::TableLength {
                    arity,
                    expected: arity,
                    got: t.len(),
                });
            }
            if let Some(pos) = t.iter().position(|&a| a as usize >= size) {
                return Err(AlgebraError::ValueRange {
                    index: pos,
                    value: t[pos],
                    size,
                });
            }
            r.bits.insert(algebra::encode(size, t));
        }
        Ok(r)
    }

    /// Builds a relation directly from a membership bitset over tuple codes.
    pub fn from_bits(size: usize, arity: usize, bits: Bitset) -> RelationSet {
        let n = algebra::power_len(size, arity).expect("relation universe too large");
        assert_eq!(bits.universe(), n);
        RelationSet { size, arity, bits }
    }

    /// Base set size.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Tuple length.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The underlying membership bitset over tuple codes.
    pub fn bits(&self) -> &Bitset {
        &self.bits
    }

    /// Number of tuples.
    pub fn len(&self) -> usize {
        self.bits.count()
    }

    /// Whether the relation is empty.
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Inserts a tuple; returns whether it was new.
    pub fn insert(&mut self, tuple: &[u8]) -> bool {
        assert_eq!(tuple.len(), self.arity);
        self.bits.insert(algebra::encode(self.size, tuple))
    }

    /// Inserts a tuple by code; returns whether it was new.
    pub fn insert_code(&mut self, code: usize) -> bool {
        self.bits.insert(code)
    }

    /// Membership by explicit tuple.
    pub fn contains(&self, tuple: &[u8]) -> bool {
        debug_assert_eq!(tuple.len(), self.arity);
        self.bits.contains(algebra::encode(self.size, tuple))
    }

    /// Membership by tuple code.
    #[inline]
    pub fn contains_code(&self, code: usize) -> bool {
        self.bits.contains(code)
    }

    /// Iterates member tuple codes in increasing order.
    pub fn iter_codes(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter()
    }

    /// Collects members as explicit tuples, in code order.
    pub fn tuples(&self) -> Vec<Vec<u8>> {
        self.bits
            .iter()
            .map(|code| TupleCode { arity: self.arity, code }.decode(self.size))
            .collect()
    }

    /// Checks closure under every fundamental operation of `alg`, i.e.
    /// whether the relation is a subuniverse of the power `A^arity`.
    pub fn is_subuniverse(&self, alg: &FiniteAlgebra) -> bool {
        let members = self.tuples();
        let mut args: Vec<&[u8]> = Vec::new();
        for op in alg.ops() {
            let m = op.table.arity();
            // Walk all m-tuples of members by odometer.
            if members.is_empty() {
                continue;
            }
            let mut idx = vec![0usize; m];
            loop {
                args.clear();
                args.extend(idx.iter().map(|&i| members[i].as_slice()));
                let out = algebra::apply_pointwise(&op.table, &args);
                if !self.contains(&out) {
                    return false;
                }
                let mut pos = 0;
                while pos < m {
                    idx[pos] += 1;
                    if idx[pos] < members.len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == m {
                    break;
                }
            }
        }
        true
    }
}

#[derive(Serialize, Deserialize)]
struct RelationFile {
    size: usize,
    arity: usize,
    tuples: Vec<Vec<u8>>,
}

/// Loads a relation from a JSON file
/// `{"size": 4, "arity": 4, "tuples": [[0,0,0,0], ...]}`.
pub fn load_relation(path: &Path) -> Result<RelationSet, AlgebraError> {
    load_relation_str(&std::fs::read_to_string(path)?)
}

/// Parses a relation from JSON text; see [`load_relation`].
pub fn load_relation_str(text: &str) -> Result<RelationSet, AlgebraError> {
    let file: RelationFile = serde_json::from_str(text)?;
    RelationSet::from_tuples(file.size, file.arity, &file.tuples)
}

/// Serializes a relation into the JSON format of [`load_relation`].
pub fn relation_to_json(r: &RelationSet) -> String {
    let file = RelationFile {
        size: r.size(),
        arity: r.arity(),
        tuples: r.tuples(),
    };
    serde_json::to_string_pretty(&file).expect("relation serialization cannot fail")
}

/// A partial function `A^arity -> A` defined on an explicit set of points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFunction {
    size: usize,
    arity: usize,
    /// Sorted tuple codes of the domain.
    dom: Vec<usize>,
    /// Dense value table over all tuple codes; undefined points hold `NONE`.
    lookup: Vec<u8>,
}

const NONE: u8 = 0xFF;

impl PartialFunction {
    /// Builds a partial function from (point, value) pairs.
    pub fn from_pairs(
        size: usize,
        arity: usize,
        pairs: &[(Vec<u8>, u8)],
    ) -> Result<PartialFunction, AlgebraError> {
        let n = algebra::power_len(size, arity).ok_or(AlgebraError::TooLarge { size, arity })?;
        let mut lookup = vec![NONE; n];
        let mut dom = Vec::with_capacity(pairs.len());
        for (point, value) in pairs {
            if point.len() != arity {
                return Err(AlgebraError::TableLength {
                    arity,
                    expected: arity,
                    got: point.len(),
                });
            }
            if let Some(pos) = point.iter().position(|&a| a as usize >= size) {
                return Err(AlgebraError::ValueRange {
                    index: pos,
                    value: point[pos],
                    size,
                });
            }
            if *value as usize >= size {
                return Err(AlgebraError::ValueRange {
                    index: 0,
                    value: *value,
                    size,
                });
            }
            let code = algebra::encode(size, point);
            if lookup[code] != NONE && lookup[code] != *value {
                return Err(AlgebraError::DuplicateName {
                    name: format!("domain point {point:?}"),
                });
            }
            if lookup[code] == NONE {
                dom.push(code);
            }
            lookup[code] = *value;
        }
        dom.sort_unstable();
        Ok(PartialFunction { size, arity, dom, lookup })
    }

    /// Builds a partial function on the given domain codes from a parallel
    /// value list.
    pub fn from_codes(size: usize, arity: usize, dom: &[usize], values: &[u8]) -> PartialFunction {
        assert_eq!(dom.len(), values.len());
        let n = algebra::power_len(size, arity).expect("domain universe too large");
        let mut lookup = vec![NONE; n];
        let mut sorted: Vec<usize> = dom.to_vec();
        for (&code, &v) in dom.iter().zip(values) {
            assert!((v as usize) < size);
            assert!(lookup[code] == NONE, "duplicate domain code {code}");
            lookup[code] = v;
        }
        sorted.sort_unstable();
        PartialFunction {
            size,
            arity,
            dom: sorted,
            lookup,
        }
    }

    /// Base set size.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of arguments.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Sorted tuple codes of the domain.
    pub fn domain_codes(&self) -> &[usize] {
        &self.dom
    }

    /// Number of points the function is defined on.
    pub fn len(&self) -> usize {
        self.dom.len()
    }

    /// Whether the function is defined nowhere.
    pub fn is_empty(&self) -> bool {
        self.dom.is_empty()
    }

    /// Value at a tuple code, if defined.
    #[inline]
    pub fn get_code(&self, code: usize) -> Option<u8> {
        match self.lookup[code] {
            NONE => None,
            v => Some(v),
        }
    }

    /// Value at an explicit point, if defined.
    pub fn get(&self, point: &[u8]) -> Option<u8> {
        self.get_code(algebra::encode(self.size, point))
    }

    /// Restriction to a subset of the domain (codes not in the domain are
    /// ignored).
    pub fn restrict(&self, keep: &[usize]) -> PartialFunction {
        let mut pairs: Vec<(usize, u8)> = keep
            .iter()
            .filter_map(|&c| self.get_code(c).map(|v| (c, v)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let codes: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let values: Vec<u8> = pairs.iter().map(|p| p.1).collect();
        PartialFunction::from_codes(self.size, self.arity, &codes, &values)
    }

    /// Whether a total table agrees with this function on its whole domain.
    pub fn agrees_with(&self, table: &FunctionTable) -> bool {
        debug_assert_eq!(table.arity(), self.arity);
        debug_assert_eq!(table.size(), self.size);
        self.dom.iter().all(|&c| table.eval_code(c) == self.lookup[c])
    }
}

impl fmt::Display for PartialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "partial {}-ary function on {} points:", self.arity, self.dom.len())?;
        for &code in &self.dom {
            let t = TupleCode { arity: self.arity, code }.decode(self.size);
            writeln!(f, "  {t:?} -> {}", self.lookup[code])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Operation;

    #[test]
    fn bitset_basics() {
        let mut b = Bitset::new(130);
        assert!(b.insert(0));
        assert!(b.insert(129));
        assert!(!b.insert(129));
        assert!(b.contains(0) && b.contains(129) && !b.contains(64));
        assert_eq!(b.count(), 2);
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![0, 129]);
        assert!(b.remove(0));
        assert!(!b.remove(0));
        assert_eq!(b.count(), 1);
    }

    #[test]
    fn bitset_algebra_ops() {
        let mut a = Bitset::new(70);
        let mut b = Bitset::new(70);
        a.insert(1);
        a.insert(65);
        b.insert(65);
        b.insert(2);
        let mut i = a.clone();
        i.intersect_with(&b);
        assert_eq!(i.iter().collect::<Vec<_>>(), vec![65]);
        assert!(i.is_subset(&a) && i.is_subset(&b));
        let mut u = a.clone();
        u.union_with(&b);
        assert_eq!(u.count(), 3);
        assert!(!u.is_subset(&a));
    }

    #[test]
    fn relation_membership_and_roundtrip() {
        let r = RelationSet::from_tuples(4, 2, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert!(r.contains(&[0, 1]));
        assert!(!r.contains(&[1, 0]));
        assert_eq!(r.len(), 2);
        let text = relation_to_json(&r);
        let back = load_relation_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn subuniverse_check_detects_closure() {
        // Z_4 under addition: the even diagonal pairs form a subuniverse of
        // the square, an arbitrary pair set does not.
        let plus = FunctionTable::new(4, 2, (0..16).map(|c| ((c % 4) + (c / 4)) as u8 % 4).collect()).unwrap();
        let alg = FiniteAlgebra::new(4, vec![Operation { name: "plus".into(), table: plus }]).unwrap();
        let evens = RelationSet::from_tuples(4, 2, &[vec![0, 0], vec![2, 2]]).unwrap();
        assert!(evens.is_subuniverse(&alg));
        let bad = RelationSet::from_tuples(4, 2, &[vec![0, 0], vec![1, 2]]).unwrap();
        assert!(!bad.is_subuniverse(&alg));
    }

    #[test]
    fn partial_function_lookup_and_restrict() {
        let f = PartialFunction::from_pairs(4, 1, &[(vec![0], 0), (vec![2], 1)]).unwrap();
        assert_eq!(f.get(&[0]), Some(0));
        assert_eq!(f.get(&[2]), Some(1));
        assert_eq!(f.get(&[1]), None);
        assert_eq!(f.domain_codes(), &[0, 2]);
        let g = f.restrict(&[2]);
        assert_eq!(g.len(), 1);
        assert_eq!(g.get(&[2]), Some(1));
        // Conflicting value for one point is rejected.
        assert!(PartialFunction::from_pairs(4, 1, &[(vec![0], 0), (vec![0], 1)]).is_err());
    }

    #[test]
    fn agrees_with_total_table() {
        let f = PartialFunction::from_pairs(4, 1, &[(vec![0], 1), (vec![3], 0)]).unwrap();
        let table = FunctionTable::new(4, 1, vec![1, 2, 3, 0]).unwrap();
        assert!(f.agrees_with(&table));
        let other = FunctionTable::new(4, 1, vec![1, 2, 3, 3]).unwrap();
        assert!(!f.agrees_with(&other));
    }
}
