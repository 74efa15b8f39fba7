//! The four-element benchmark algebra on Z₄ with doubled products: its
//! truncations, the closed-form description of its term operations, its
//! equationally definable domains, and the exhaustive duality verification
//! over subuniverses of the fourth power.
//!
//! The algebra carries +, the constant 1 (as a unary operation), and the
//! doubled products 2x₁⋯x_j. Every j-ary term operation is
//! `c + Σλᵢxᵢ + Σ c_v(x)` where `c_v` is 2 on the residue class `v + 2Z₄^j`
//! and 0 elsewhere; this normal form is exact at every arity regardless of
//! how far the product family is truncated, which is what lets routines
//! here answer questions about the algebra with the full product family
//! while only ever holding finite tables.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::algebra::{self, FiniteAlgebra, FunctionTable, Operation};
use crate::relation::{PartialFunction, RelationSet};

/// The truncation with +, constant 1, and doubled products of 2..=m
/// factors.
pub fn z4_algebra(max_product_arity: usize) -> FiniteAlgebra {
    assert!(
        (2..=5).contains(&max_product_arity),
        "product arity cap must be between 2 and 5"
    );
    let mut ops = Vec::new();
    let plus = FunctionTable::new(
        4,
        2,
        (0..16).map(|c| ((c % 4 + c / 4) % 4) as u8).collect(),
    )
    .unwrap();
    ops.push(Operation {
        name: "plus".into(),
        table: plus,
    });
    ops.push(Operation {
        name: "one".into(),
        table: FunctionTable::constant(4, 1, 1),
    });
    for j in 2..=max_product_arity {
        let n = algebra::power_len(4, j).unwrap();
        let mut values = vec![0u8; n];
        let mut args = vec![0u8; j];
        for (code, v) in values.iter_mut().enumerate() {
            algebra::decode_into(4, code, &mut args);
            let prod: usize = args.iter().map(|&a| a as usize).product();
            *v = (2 * prod % 4) as u8;
        }
        ops.push(Operation {
            name: format!("dbl{j}"),
            table: FunctionTable::new(4, j, values).unwrap(),
        });
    }
    FiniteAlgebra::new(4, ops).unwrap()
}

/// Canonical description of a term operation of the full (untruncated)
/// algebra: `x ↦ constant + Σ lambdas[i]·x[i] + 2·[x mod 2 ∈ cosets]`.
///
/// Canonical means `constant` and every lambda lie in {0,1} and coset
/// representatives have all coordinates in {0,1}; under those constraints
/// the form is unique per function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Z4NormalForm {
    /// Additive constant, 0 or 1.
    pub constant: u8,
    /// Linear coefficients, each 0 or 1.
    pub lambdas: Vec<u8>,
    /// Mod-2 residue classes on which the correction term is 2.
    pub cosets: BTreeSet<Vec<u8>>,
}

impl Z4NormalForm {
    /// Number of arguments.
    pub fn arity(&self) -> usize {
        self.lambdas.len()
    }

    /// Evaluates the form at one point.
    pub fn eval(&self, args: &[u8]) -> u8 {
        assert_eq!(args.len(), self.arity());
        let mut acc = self.constant as usize;
        for (l, a) in self.lambdas.iter().zip(args) {
            acc += *l as usize * *a as usize;
        }
        let parity: Vec<u8> = args.iter().map(|a| a & 1).collect();
        if self.cosets.contains(&parity) {
            acc += 2;
        }
        (acc % 4) as u8
    }

    /// The full value table of the form.
    pub fn table(&self) -> FunctionTable {
        let k = self.arity();
        let n = algebra::power_len(4, k).expect("arity too large");
        let mut args = vec![0u8; k];
        let mut values = vec![0u8; n];
        for (code, v) in values.iter_mut().enumerate() {
            algebra::decode_into(4, code, &mut args);
            *v = self.eval(&args);
        }
        FunctionTable::new(4, k, values).unwrap()
    }

    /// Degree of the mod-2 correction as a polynomial over GF(2): the
    /// largest monomial support appearing in the indicator of `cosets`.
    /// Zero when the correction is constant, `None` when there is none at
    /// all and the constant is 0 too.
    pub fn correction_degree(&self) -> Option<usize> {
        let k = self.arity();
        let mut deg = None;
        for mask in 0..1usize << k {
            let mut coef = false;
            for sub in 0..1usize << k {
                if sub & mask == sub {
                    let p: Vec<u8> = (0..k).map(|i| (sub >> i & 1) as u8).collect();
                    if self.cosets.contains(&p) {
                        coef = !coef;
                    }
                }
            }
            if coef {
                let d = mask.count_ones() as usize;
                deg = Some(deg.map_or(d, |cur: usize| cur.max(d)));
            }
        }
        deg
    }
}

/// Decides membership of a table in the term clone of the full algebra at
/// its arity, returning the canonical form on success.
pub fn z4_term_normal_form(f: &FunctionTable) -> Option<Z4NormalForm> {
    assert_eq!(f.size(), 4, "normal forms are specific to universe Z4");
    let k = f.arity();
    let c0 = f.eval(&vec![0u8; k]);
    let mut lambdas = Vec::with_capacity(k);
    for i in 0..k {
        let mut args = vec![0u8; k];
        args[i] = 2;
        let d = (f.eval(&args) + 4 - c0) % 4;
        if d % 2 == 1 {
            return None;
        }
        lambdas.push(d / 2);
    }
    // Read the correction off the {0,1}-representatives of the residue
    // classes, then confirm the fit globally.
    let mut cosets = BTreeSet::new();
    for mask in 0..1usize << k {
        let p: Vec<u8> = (0..k).map(|i| (mask >> i & 1) as u8).collect();
        let lin: usize = lambdas.iter().zip(&p).map(|(l, a)| (l * a) as usize).sum();
        let h = (f.eval(&p) as usize + 8 - c0 as usize - lin) % 4;
        match h {
            0 => {}
            2 => {
                cosets.insert(p);
            }
            _ => return None,
        }
    }
    let (constant, cosets) = if c0 >= 2 {
        let flipped: BTreeSet<Vec<u8>> = (0..1usize << k)
            .map(|mask| (0..k).map(|i| (mask >> i & 1) as u8).collect::<Vec<u8>>())
            .filter(|p| !cosets.contains(p))
            .collect();
        (c0 - 2, flipped)
    } else {
        (c0, cosets)
    };
    let form = Z4NormalForm {
        constant,
        lambdas,
        cosets,
    };
    if &form.table() == f {
        Some(form)
    } else {
        None
    }
}

/// All term tables of the full algebra at the given arity, sorted by value
/// vector. There are `2^(1+k+2^k)` of them.
pub fn z4_normal_form_tables(k: usize) -> Vec<FunctionTable> {
    assert!(k >= 1 && k <= 3, "full clone enumeration supports arity 1..=3");
    let classes = 1usize << k;
    let mut tables = Vec::with_capacity(2 << (k + classes));
    for c in 0..2u8 {
        for lam in 0..1usize << k {
            for sel in 0..1usize << classes {
                let cosets: BTreeSet<Vec<u8>> = (0..classes)
                    .filter(|m| sel >> m & 1 == 1)
                    .map(|m| (0..k).map(|i| (m >> i & 1) as u8).collect())
                    .collect();
                let form = Z4NormalForm {
                    constant: c,
                    lambdas: (0..k).map(|i| (lam >> i & 1) as u8).collect(),
                    cosets,
                };
                tables.push(form.table());
            }
        }
    }
    tables.sort_by(|a, b| a.values().cmp(b.values()));
    tables
}

/// Coset decomposition of an equationally definable domain: after shifting
/// by `shift` the set contains zero and equals `⋃ (rep + subgroup)` where
/// `subgroup ⊆ 2Z₄^k`, the reps have pairwise distinct parities, and each
/// doubled rep lies in the subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Z4CadForm {
    /// Translation subtracted from the original set (a member of it).
    pub shift: Vec<u8>,
    /// Member tuples of the subgroup `U ⊆ 2Z₄^k`, sorted by code.
    pub subgroup: Vec<Vec<u8>>,
    /// One representative per occupied parity class, sorted by code; the
    /// zero tuple appears first.
    pub reps: Vec<Vec<u8>>,
}

fn vadd(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(x, y)| (x + y) % 4).collect()
}

fn vsub(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(x, y)| (x + 4 - y) % 4).collect()
}

fn parity_mask(t: &[u8]) -> usize {
    t.iter()
        .enumerate()
        .fold(0, |acc, (i, &x)| acc | (((x & 1) as usize) << i))
}

impl Z4CadForm {
    /// Reconstructs the set the form denotes.
    pub fn members(&self) -> RelationSet {
        let k = self.shift.len();
        let mut out = RelationSet::empty(4, k);
        for rep in &self.reps {
            for u in &self.subgroup {
                out.insert(&vadd(&vadd(rep, u), &self.shift));
            }
        }
        out
    }
}

/// Classifies a non-empty relation as an equationally definable domain or
/// rejects it. Works by translating the set to contain zero, intersecting
/// with the even tuples to find the subgroup, and checking every parity
/// class is a single coset with doubled representative inside the
/// subgroup.
pub fn z4_cad_classify(d: &RelationSet) -> Option<Z4CadForm> {
    assert_eq!(d.size(), 4);
    assert!(!d.is_empty(), "classification needs a non-empty set");
    let shift = d.tuples().into_iter().next().unwrap();
    let shifted: HashSet<Vec<u8>> = d.tuples().iter().map(|t| vsub(t, &shift)).collect();
    let mut subgroup: Vec<Vec<u8>> = shifted
        .iter()
        .filter(|t| t.iter().all(|&x| x % 2 == 0))
        .cloned()
        .collect();
    subgroup.sort();
    for a in &subgroup {
        for b in &subgroup {
            if !shifted.contains(&vadd(a, b)) {
                return None;
            }
        }
    }
    let sub_set: HashSet<&Vec<u8>> = subgroup.iter().collect();
    let mut classes: HashMap<usize, Vec<Vec<u8>>> = HashMap::new();
    for t in &shifted {
        classes.entry(parity_mask(t)).or_default().push(t.clone());
    }
    let mut reps = Vec::new();
    for class in classes.values_mut() {
        class.sort();
        let v = class[0].clone();
        if class.len() != subgroup.len() {
            return None;
        }
        let class_set: HashSet<&Vec<u8>> = class.iter().collect();
        for u in &subgroup {
            if !class_set.contains(&vadd(&v, u)) {
                return None;
            }
        }
        let doubled = vadd(&v, &v);
        if !sub_set.contains(&doubled) {
            return None;
        }
        reps.push(v);
    }
    reps.sort();
    Some(Z4CadForm {
        shift,
        subgroup,
        reps,
    })
}

/// Every non-empty equationally definable domain of the given arity,
/// obtained by enumerating all (subgroup, representative) forms through the
/// origin and then translating. Sorted by size then member codes.
pub fn z4_cad_enumerate(k: usize) -> Vec<RelationSet> {
    assert!(k >= 1 && k <= 3, "domain enumeration supports arity 1..=3");
    let classes = 1usize << k;
    let n = algebra::power_len(4, k).unwrap();
    // Subspaces of the parity space, as masks of their member patterns.
    let mut subspaces: Vec<Vec<usize>> = Vec::new();
    for sel in 0..1u64 << classes {
        if sel & 1 == 0 {
            continue;
        }
        let members: Vec<usize> = (0..classes).filter(|p| sel >> p & 1 == 1).collect();
        if members
            .iter()
            .all(|&a| members.iter().all(|&b| sel >> (a ^ b) & 1 == 1))
        {
            subspaces.push(members);
        }
    }
    let encode = |t: &[u8]| algebra::encode(4, t);
    let mut seen: HashSet<u64> = HashSet::new();
    let mut out: Vec<RelationSet> = Vec::new();
    for w in &subspaces {
        let w_set: HashSet<usize> = w.iter().copied().collect();
        // The subgroup is the doubled subspace.
        let subgroup: Vec<Vec<u8>> = w
            .iter()
            .map(|&p| (0..k).map(|i| 2 * ((p >> i) & 1) as u8).collect())
            .collect();
        // Parity classes that can carry a coset: doubled class inside the
        // subgroup, which for class p means pattern p itself in the
        // subspace... doubling (p + 2q) gives 2p, whose halved pattern is p.
        let admissible: Vec<usize> = (0..classes).filter(|p| w_set.contains(p)).collect();
        // Choices of representative per class, one per quotient coset of
        // the subspace.
        let quotient: Vec<usize> = {
            let mut reps = Vec::new();
            let mut covered: HashSet<usize> = HashSet::new();
            for q in 0..classes {
                if !covered.contains(&q) {
                    reps.push(q);
                    for &m in w {
                        covered.insert(q ^ m);
                    }
                }
            }
            reps
        };
        let others: Vec<usize> = admissible.iter().copied().filter(|&p| p != 0).collect();
        for sel in 0..1usize << others.len() {
            let chosen: Vec<usize> = (0..others.len())
                .filter(|i| sel >> i & 1 == 1)
                .map(|i| others[i])
                .collect();
            // One quotient choice per chosen class, via odometer.
            let mut pick = vec![0usize; chosen.len()];
            loop {
                let mut base = RelationSet::empty(4, k);
                for u in &subgroup {
                    base.insert(u);
                }
                for (ci, &p) in chosen.iter().enumerate() {
                    let q = quotient[pick[ci]];
                    let rep: Vec<u8> = (0..k)
                        .map(|i| (((p >> i) & 1) + 2 * ((q >> i) & 1)) as u8)
                        .collect();
                    for u in &subgroup {
                        base.insert(&vadd(&rep, u));
                    }
                }
                // All translations of the zero-containing set.
                let mut t = vec![0u8; k];
                for tc in 0..n {
                    algebra::decode_into(4, tc, &mut t);
                    let mut mask = 0u64;
                    for tup in base.tuples() {
                        mask |= 1 << encode(&vadd(&tup, &t));
                    }
                    if seen.insert(mask) {
                        let mut set = RelationSet::empty(4, k);
                        for code in 0..n {
                            if mask >> code & 1 == 1 {
                                set.insert_code(code);
                            }
                        }
                        out.push(set);
                    }
                }
                let mut i = 0;
                while i < chosen.len() {
                    pick[i] += 1;
                    if pick[i] < quotient.len() {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
                if i == chosen.len() {
                    break;
                }
            }
        }
    }
    out.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.iter_codes().collect::<Vec<_>>().cmp(&b.iter_codes().collect()))
    });
    out
}

/// Membership in the subuniverse of A⁴ generated by `gens` under the full
/// algebra, by the term normal form: `v ∈ Sg(gens)` iff for some constant
/// and 0/1 coefficients the residual `v - c - Σλᵢ·gensᵢ` is even and
/// constant on coordinates that share a generator-parity pattern.
pub fn z4_sg4_contains(value: &[u8; 4], gens: &[[u8; 4]]) -> bool {
    let k = gens.len();
    assert!(k <= 5, "membership test supports up to 5 generators");
    let mut pattern = [0usize; 4];
    for (j, p) in pattern.iter_mut().enumerate() {
        *p = gens
            .iter()
            .enumerate()
            .fold(0, |acc, (i, g)| acc | (((g[j] & 1) as usize) << i));
    }
    for c in 0..2u8 {
        'lam: for lam in 0..1usize << k {
            let mut seen = [255u8; 32];
            for j in 0..4 {
                let mut d = value[j] as i32 - c as i32;
                for (i, g) in gens.iter().enumerate() {
                    if lam >> i & 1 == 1 {
                        d -= g[j] as i32;
                    }
                }
                let d = d.rem_euclid(4) as u8;
                if d % 2 == 1 {
                    continue 'lam;
                }
                let p = pattern[j];
                if seen[p] == 255 {
                    seen[p] = d;
                } else if seen[p] != d {
                    continue 'lam;
                }
            }
            return true;
        }
    }
    false
}

/// A concrete preservation failure: argument tuples in A⁴ whose rows lie in
/// the function's domain, with the coordinatewise value outside the
/// subuniverse they generate.
#[derive(Debug, Clone)]
pub struct PreservationViolation {
    /// Generator tuples, one per function argument.
    pub generators: Vec<[u8; 4]>,
    /// Rows fed to the function.
    pub rows: Vec<Vec<u8>>,
    /// The escaping value tuple.
    pub value: [u8; 4],
}

/// Tests whether a partial operation preserves every subuniverse of the
/// fourth power of the full algebra, returning the first violation in
/// row-combination order if not.
pub fn z4_preservation_violation(f: &PartialFunction) -> Option<PreservationViolation> {
    assert_eq!(f.size(), 4);
    let k = f.arity();
    let domain: Vec<Vec<u8>> = {
        let mut pts: Vec<usize> = f.domain_codes().to_vec();
        pts.sort_unstable();
        let mut args = vec![0u8; k];
        pts.iter()
            .map(|&c| {
                algebra::decode_into(4, c, &mut args);
                args.clone()
            })
            .collect()
    };
    let m = domain.len();
    // Row combinations up to coordinate permutation of the power, which
    // permutes generators and value together and so cannot change
    // membership: non-decreasing index tuples suffice.
    let mut combo = [0usize; 4];
    loop {
        let rows: Vec<&Vec<u8>> = combo.iter().map(|&i| &domain[i]).collect();
        let mut gens = vec![[0u8; 4]; k];
        for (j, r) in rows.iter().enumerate() {
            for i in 0..k {
                gens[i][j] = r[i];
            }
        }
        let mut value = [0u8; 4];
        for (j, r) in rows.iter().enumerate() {
            value[j] = f.get(r).expect("rows are domain points");
        }
        if !z4_sg4_contains(&value, &gens) {
            return Some(PreservationViolation {
                generators: gens,
                rows: rows.into_iter().cloned().collect(),
                value,
            });
        }
        let mut i = 3;
        loop {
            combo[i] += 1;
            if combo[i] < m {
                for j in i + 1..4 {
                    combo[j] = combo[i];
                }
                break;
            }
            if i == 0 {
                return None;
            }
            i -= 1;
        }
    }
}

/// Whether a partial operation preserves every subuniverse of the fourth
/// power of the full algebra.
pub fn z4_preserves_all_sub_a4(f: &PartialFunction) -> bool {
    z4_preservation_violation(f).is_none()
}

/// All partial operations on the given domain that preserve every
/// subuniverse of the fourth power, found by backtracking over values in
/// domain-code order with incremental membership pruning. Returns the
/// functions together with the number of assignments pruned.
pub fn z4_enumerate_preserving(domain: &RelationSet) -> (Vec<PartialFunction>, u64) {
    assert_eq!(domain.size(), 4);
    let k = domain.arity();
    let mut codes: Vec<usize> = domain.iter_codes().collect();
    codes.sort_unstable();
    let m = codes.len();
    let mut args = vec![0u8; k];
    let points: Vec<Vec<u8>> = codes
        .iter()
        .map(|&c| {
            algebra::decode_into(4, c, &mut args);
            args.clone()
        })
        .collect();
    // Precompute row combinations grouped by their largest point index.
    let mut triggers: Vec<Vec<[usize; 4]>> = vec![Vec::new(); m];
    let mut combo = [0usize; 4];
    'outer: loop {
        triggers[combo[3]].push(combo);
        let mut i = 3;
        loop {
            combo[i] += 1;
            if combo[i] < m {
                for j in i + 1..4 {
                    combo[j] = combo[i];
                }
                break;
            }
            if i == 0 {
                break 'outer;
            }
            i -= 1;
        }
    }
    let gens_of = |c: &[usize; 4]| -> Vec<[u8; 4]> {
        let mut gens = vec![[0u8; 4]; k];
        for (j, &pi) in c.iter().enumerate() {
            for i in 0..k {
                gens[i][j] = points[pi][i];
            }
        }
        gens
    };
    let mut found = Vec::new();
    let mut pruned = 0u64;
    let mut values = vec![0u8; m];
    // values[depth] is the candidate under examination; every candidate is
    // checked against its triggered constraints exactly once.
    let mut depth = 0usize;
    'search: loop {
        let ok = triggers[depth].iter().all(|c| {
            let gens = gens_of(c);
            let value = [
                values[c[0]],
                values[c[1]],
                values[c[2]],
                values[c[3]],
            ];
            z4_sg4_contains(&value, &gens)
        });
        if ok {
            if depth + 1 < m {
                depth += 1;
                values[depth] = 0;
                continue;
            }
            let pairs: Vec<(Vec<u8>, u8)> = points
                .iter()
                .cloned()
                .zip(values.iter().copied())
                .collect();
            found.push(PartialFunction::from_pairs(4, k, &pairs).unwrap());
        } else {
            pruned += 1;
        }
        loop {
            if values[depth] < 3 {
                values[depth] += 1;
                break;
            }
            if depth == 0 {
                break 'search;
            }
            depth -= 1;
        }
    }
    (found, pruned)
}

/// Structural consequences of preservation for one partial operation:
/// the translation-difference identity and the scalar-multiple dichotomy,
/// both relative to the domain's coset form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomChecks {
    /// `f(x+u) = f(x) + f(u) - f(0)` over all in-domain instances, after
    /// shifting the domain to contain zero.
    pub translation_identity: bool,
    /// For every rep `v`, the map `x ↦ g(x·v)` (g the normalized function
    /// minus its linear fit on the subgroup) is identically 0 or doubling.
    pub scalar_dichotomy: bool,
}

/// Runs the structural checks on a partial operation whose domain
/// classifies. Panics if the domain does not classify.
pub fn z4_hom_checks(f: &PartialFunction) -> HomChecks {
    let k = f.arity();
    let domain = {
        let mut d = RelationSet::empty(4, k);
        for code in f.domain_codes() {
            d.insert_code(*code);
        }
        d
    };
    let form = z4_cad_classify(&domain).expect("domain must classify");
    let f0 = |y: &[u8]| -> u8 {
        let x = vadd(y, &form.shift);
        let base = f.get(&vadd(&vec![0u8; k], &form.shift)).unwrap();
        (f.get(&x).unwrap() + 4 - base) % 4
    };
    let shifted: Vec<Vec<u8>> = f
        .domain_codes()
        .iter()
        .map(|&c| {
            let mut args = vec![0u8; k];
            algebra::decode_into(4, c, &mut args);
            vsub(&args, &form.shift)
        })
        .collect();
    let shifted_set: HashSet<Vec<u8>> = shifted.iter().cloned().collect();
    let mut translation_identity = true;
    for x in &shifted {
        for u in &form.subgroup {
            let xu = vadd(x, u);
            if shifted_set.contains(&xu) && f0(&xu) != (f0(x) + f0(u)) % 4 {
                translation_identity = false;
            }
        }
    }
    // Linear fit on the subgroup: coefficients mod 2 suffice since the
    // subgroup consists of even tuples.
    let mut fit: Option<Vec<u8>> = None;
    'fit: for lam in 0..1usize << k {
        let l: Vec<u8> = (0..k).map(|i| (lam >> i & 1) as u8).collect();
        for u in &form.subgroup {
            let t: usize = l.iter().zip(u).map(|(a, b)| (a * b) as usize).sum();
            if (t % 4) as u8 != f0(u) {
                continue 'fit;
            }
        }
        fit = Some(l);
        break;
    }
    let mut scalar_dichotomy = fit.is_some();
    if let Some(l) = fit {
        let g = |x: &[u8]| -> u8 {
            let t: usize = l.iter().zip(x).map(|(a, b)| (a * b) as usize).sum();
            (f0(x) + 4 - (t % 4) as u8) % 4
        };
        for v in &form.reps {
            let h: Vec<u8> = (0..4u8)
                .map(|x| g(&v.iter().map(|&c| (x * c) % 4).collect::<Vec<u8>>()))
                .collect();
            let zero = h == vec![0, 0, 0, 0];
            let dbl = h == vec![0, 2, 0, 2];
            if !zero && !dbl {
                scalar_dichotomy = false;
            }
        }
    }
    HomChecks {
        translation_identity,
        scalar_dichotomy,
    }
}

/// How the duality verification selects domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every domain at the arity.
    Full,
    /// A deterministic pseudo-random selection of domains.
    Sampled {
        /// Number of domains to keep.
        count: usize,
        /// Seed for the selection.
        seed: u64,
    },
}

/// Outcome of the duality verification at one arity.
#[derive(Debug, Clone)]
pub struct Z4DualityReport {
    /// Arity scanned.
    pub arity: usize,
    /// Number of domains available at this arity.
    pub domains_total: usize,
    /// Number of domains actually scanned.
    pub domains_scanned: usize,
    /// Whether the scan was sampled rather than exhaustive.
    pub sampled: bool,
    /// Seed used for sampling, when sampled.
    pub seed: Option<u64>,
    /// Partial operations that passed the preservation test.
    pub functions_preserving: u64,
    /// Among those, the ones extended by some term table.
    pub functions_extended: u64,
    /// Assignments pruned during enumeration.
    pub assignments_pruned: u64,
    /// Preserving functions with no term extension (the theorem says none).
    pub counterexamples: Vec<PartialFunction>,
    /// Structural-check failures among preserving functions (expected 0).
    pub hom_check_failures: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Verifies, at one arity, that every preserving partial operation on every
/// (or a sampled set of) equationally definable domain extends to a term of
/// the full algebra, and that the structural consequences hold.
pub fn z4_verify_duality(k: usize, mode: VerifyMode) -> Z4DualityReport {
    assert!(k >= 1 && k <= 3, "verification supports arity 1..=3");
    let all_domains = z4_cad_enumerate(k);
    let domains_total = all_domains.len();
    let (domains, sampled, seed) = match mode {
        VerifyMode::Full => (all_domains, false, None),
        VerifyMode::Sampled { count, seed } => {
            let mut state = seed;
            let mut picked: Vec<usize> = Vec::new();
            let mut remaining: Vec<usize> = (0..domains_total).collect();
            while picked.len() < count.min(domains_total) {
                let i = (splitmix64(&mut state) % remaining.len() as u64) as usize;
                picked.push(remaining.swap_remove(i));
            }
            picked.sort_unstable();
            (
                picked.into_iter().map(|i| all_domains[i].clone()).collect(),
                true,
                Some(seed),
            )
        }
    };
    let terms = z4_normal_form_tables(k);
    let mut report = Z4DualityReport {
        arity: k,
        domains_total,
        domains_scanned: domains.len(),
        sampled,
        seed,
        functions_preserving: 0,
        functions_extended: 0,
        assignments_pruned: 0,
        counterexamples: Vec::new(),
        hom_check_failures: 0,
    };
    for domain in &domains {
        let (preserving, pruned) = z4_enumerate_preserving(domain);
        report.assignments_pruned += pruned;
        for f in preserving {
            report.functions_preserving += 1;
            let extended = terms.iter().any(|t| f.agrees_with(t));
            if extended {
                report.functions_extended += 1;
            } else {
                report.counterexamples.push(f.clone());
            }
            let checks = z4_hom_checks(&f);
            if !checks.translation_identity || !checks.scalar_dichotomy {
                report.hom_check_failures += 1;
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clone::{self, CloneKind};
    use crate::closure;

    #[test]
    fn algebra_tables() {
        let alg = z4_algebra(3);
        assert_eq!(alg.size(), 4);
        let names: Vec<&str> = alg.ops().iter().map(|o| o.name.as_str()).collect();
        assert_eq!(names, vec!["plus", "one", "dbl2", "dbl3"]);
        let plus = &alg.op("plus").unwrap().table;
        assert_eq!(plus.eval(&[3, 3]), 2);
        let dbl2 = &alg.op("dbl2").unwrap().table;
        assert_eq!(dbl2.eval(&[1, 3]), 2);
        assert_eq!(dbl2.eval(&[2, 1]), 0);
        let dbl3 = &alg.op("dbl3").unwrap().table;
        assert_eq!(dbl3.eval(&[1, 1, 1]), 2);
        assert_eq!(alg.op("one").unwrap().table.eval(&[3]), 1);
    }

    #[test]
    #[should_panic(expected = "product arity cap")]
    fn algebra_rejects_trivial_truncation() {
        let _ = z4_algebra(1);
    }

    #[test]
    fn normal_form_examples() {
        let alg = z4_algebra(2);
        let dbl2 = &alg.op("dbl2").unwrap().table;
        let form = z4_term_normal_form(dbl2).unwrap();
        assert_eq!(form.constant, 0);
        assert_eq!(form.lambdas, vec![0, 0]);
        assert_eq!(form.cosets.iter().cloned().collect::<Vec<_>>(), vec![vec![1, 1]]);

        let cube = FunctionTable::new(4, 1, vec![0, 1, 0, 3]).unwrap();
        assert!(z4_term_normal_form(&cube).is_none());

        let ident = FunctionTable::projection(4, 1, 0);
        let form = z4_term_normal_form(&ident).unwrap();
        assert_eq!(form.constant, 0);
        assert_eq!(form.lambdas, vec![1]);
        assert!(form.cosets.is_empty());

        // Constants 2 and 3 need the coset correction on every class.
        let three = FunctionTable::constant(4, 1, 3);
        let form = z4_term_normal_form(&three).unwrap();
        assert_eq!(form.constant, 1);
        assert_eq!(form.cosets.len(), 2);
    }

    #[test]
    fn normal_form_tables_are_distinct_and_counted() {
        for (k, expect) in [(1usize, 16usize), (2, 128), (3, 4096)] {
            let tables = z4_normal_form_tables(k);
            assert_eq!(tables.len(), expect);
            for w in tables.windows(2) {
                assert!(w[0].values() < w[1].values());
            }
            // Round trip through recognition.
            for t in tables.iter().step_by(17) {
                let form = z4_term_normal_form(t).unwrap();
                assert_eq!(&form.table(), t);
            }
        }
    }

    #[test]
    fn truncated_clones_match_normal_forms() {
        // At arities covered by the truncation the closure engine and the
        // closed form must produce identical table sets.
        let alg = z4_algebra(2);
        for k in [1usize, 2] {
            let slice = clone::clone_upto(&alg, k, CloneKind::Term, 1 << 22).unwrap();
            let forms = z4_normal_form_tables(k);
            assert_eq!(slice.tables(), &forms[..], "arity {k}");
        }
    }

    #[test]
    fn missing_cubic_products_shrink_the_ternary_clone() {
        let alg = z4_algebra(2);
        let slice = clone::clone_upto(&alg, 3, CloneKind::Term, 1 << 22).unwrap();
        assert_eq!(slice.len(), 2048);
        let forms = z4_normal_form_tables(3);
        assert_eq!(forms.len(), 4096);
        // The truncated clone is exactly the forms with correction degree
        // at most two.
        let mut expected: Vec<FunctionTable> = forms
            .iter()
            .filter(|t| {
                let d = z4_term_normal_form(t).unwrap().correction_degree();
                d.map_or(true, |d| d <= 2)
            })
            .cloned()
            .collect();
        expected.sort_by(|a, b| a.values().cmp(b.values()));
        assert_eq!(slice.tables(), &expected[..]);
    }

    #[test]
    fn cad_classification_examples() {
        let even = RelationSet::from_tuples(4, 1, &[vec![0], vec![2]]).unwrap();
        let form = z4_cad_classify(&even).unwrap();
        assert_eq!(form.shift, vec![0]);
        assert_eq!(form.subgroup, vec![vec![0], vec![2]]);
        assert_eq!(form.reps, vec![vec![0]]);

        let odd = RelationSet::from_tuples(4, 1, &[vec![1], vec![3]]).unwrap();
        let form = z4_cad_classify(&odd).unwrap();
        assert_eq!(form.subgroup, vec![vec![0], vec![2]]);
        assert_eq!(form.members(), odd);

        let not_cad = RelationSet::from_tuples(4, 1, &[vec![0], vec![1]]).unwrap();
        assert!(z4_cad_classify(&not_cad).is_none());

        let single = RelationSet::from_tuples(4, 1, &[vec![1]]).unwrap();
        let form = z4_cad_classify(&single).unwrap();
        assert_eq!(form.shift, vec![1]);
        assert_eq!(form.members(), single);

        // The even square in two variables.
        let evens = RelationSet::from_tuples(
            4,
            2,
            &[vec![0, 0], vec![0, 2], vec![2, 0], vec![2, 2]],
        )
        .unwrap();
        let form = z4_cad_classify(&evens).unwrap();
        assert_eq!(form.reps, vec![vec![0, 0]]);
        assert_eq!(form.subgroup.len(), 4);
    }

    #[test]
    fn cad_enumeration_counts() {
        let unary = z4_cad_enumerate(1);
        assert_eq!(unary.len(), 7);
        let mut sets: Vec<Vec<Vec<u8>>> = unary.iter().map(|d| d.tuples()).collect();
        sets.sort();
        let expected: Vec<Vec<Vec<u8>>> = vec![
            vec![vec![0]],
            vec![vec![0], vec![1], vec![2], vec![3]],
            vec![vec![0], vec![2]],
            vec![vec![1]],
            vec![vec![1], vec![3]],
            vec![vec![2]],
            vec![vec![3]],
        ];
        assert_eq!(sets, expected);
        for d in &unary {
            assert!(z4_cad_classify(d).is_some());
        }
        // Census at arity 2: 16 singletons, 24 two-element cosets, 28
        // four-element sets, 6 unions of two parity classes, 4 unions of
        // three, and the full square.
        let binary = z4_cad_enumerate(2);
        assert_eq!(binary.len(), 79);
        let mut by_size: HashMap<usize, usize> = HashMap::new();
        for d in &binary {
            *by_size.entry(d.len()).or_default() += 1;
            let form = z4_cad_classify(d).expect("enumerated domains classify");
            assert_eq!(form.members(), *d);
        }
        let census: Vec<(usize, usize)> = {
            let mut v: Vec<(usize, usize)> = by_size.into_iter().collect();
            v.sort();
            v
        };
        assert_eq!(census, vec![(1, 16), (2, 24), (4, 28), (8, 6), (12, 4), (16, 1)]);
        let ternary = z4_cad_enumerate(3);
        assert_eq!(ternary.len(), 2111);
        for d in ternary.iter().step_by(53) {
            let form = z4_cad_classify(d).expect("enumerated domains classify");
            assert_eq!(form.members(), *d);
        }
    }

    #[test]
    fn sg_membership_agrees_with_generic_closure() {
        // The closed-form membership must match the closure engine run on a
        // truncation whose products cover the generator count.
        let mut state = 0x5eedu64;
        for n_gens in 1..=3usize {
            let alg = z4_algebra(n_gens.max(2));
            for _ in 0..40 {
                let gens: Vec<Vec<u8>> = (0..n_gens)
                    .map(|_| {
                        let r = splitmix64(&mut state);
                        (0..4).map(|j| ((r >> (2 * j)) & 3) as u8).collect()
                    })
                    .collect();
                let generated = closure::subuniverse_generate(&alg, 4, &gens).unwrap();
                let gen_arrays: Vec<[u8; 4]> = gens
                    .iter()
                    .map(|g| [g[0], g[1], g[2], g[3]])
                    .collect();
                for code in 0..256usize {
                    let v = [
                        (code & 3) as u8,
                        (code >> 2 & 3) as u8,
                        (code >> 4 & 3) as u8,
                        (code >> 6 & 3) as u8,
                    ];
                    assert_eq!(
                        z4_sg4_contains(&v, &gen_arrays),
                        generated.contains_code(code),
                        "gens {gens:?} value {v:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn preservation_examples() {
        // The classic non-extendable map: 0 to 0, 2 to 1.
        let bad = PartialFunction::from_pairs(4, 1, &[(vec![0], 0), (vec![2], 1)]).unwrap();
        let violation = z4_preservation_violation(&bad).expect("must fail");
        assert!(!z4_preserves_all_sub_a4(&bad));
        // The violation is re-checkable.
        assert!(!z4_sg4_contains(&violation.value, &violation.generators));

        // Restrictions of terms always pass.
        let terms = z4_normal_form_tables(1);
        for t in terms.iter().step_by(3) {
            let f = PartialFunction::from_pairs(
                4,
                1,
                &[(vec![0], t.eval(&[0])), (vec![2], t.eval(&[2]))],
            )
            .unwrap();
            assert!(z4_preserves_all_sub_a4(&f));
        }

        // Addition restricted to the even square.
        let pairs: Vec<(Vec<u8>, u8)> = [0u8, 2]
            .iter()
            .flat_map(|&x| [0u8, 2].iter().map(move |&y| (vec![x, y], (x + y) % 4)))
            .collect();
        let f = PartialFunction::from_pairs(4, 2, &pairs).unwrap();
        assert!(z4_preserves_all_sub_a4(&f));
    }

    #[test]
    fn unary_duality_verification() {
        let report = z4_verify_duality(1, VerifyMode::Full);
        assert_eq!(report.arity, 1);
        assert_eq!(report.domains_total, 7);
        assert_eq!(report.domains_scanned, 7);
        assert!(!report.sampled);
        // Four constants on each singleton, eight functions on each
        // two-element coset, sixteen terms on the full line.
        assert_eq!(report.functions_preserving, 4 * 4 + 8 + 8 + 16);
        assert_eq!(report.functions_extended, report.functions_preserving);
        assert!(report.counterexamples.is_empty());
        assert_eq!(report.hom_check_failures, 0);
    }

    #[test]
    fn binary_duality_verification() {
        let report = z4_verify_duality(2, VerifyMode::Full);
        assert_eq!(report.domains_total, 79);
        assert!(report.counterexamples.is_empty());
        assert_eq!(report.functions_extended, report.functions_preserving);
        assert_eq!(report.hom_check_failures, 0);
        assert!(report.functions_preserving > 0);
    }

    #[test]
    fn sampled_verification_is_deterministic() {
        let a = z4_verify_duality(2, VerifyMode::Sampled { count: 5, seed: 11 });
        let b = z4_verify_duality(2, VerifyMode::Sampled { count: 5, seed: 11 });
        assert_eq!(a.functions_preserving, b.functions_preserving);
        assert_eq!(a.domains_scanned, 5);
        assert!(a.sampled);
        assert!(a.counterexamples.is_empty());
    }

    #[test]
    fn hom_checks_pass_on_term_restrictions() {
        let terms = z4_normal_form_tables(1);
        let domain = RelationSet::from_tuples(4, 1, &[vec![1], vec![3]]).unwrap();
        for t in &terms {
            let pairs: Vec<(Vec<u8>, u8)> = domain
                .tuples()
                .into_iter()
                .map(|p| {
                    let v = t.eval(&p);
                    (p, v)
                })
                .collect();
            let f = PartialFunction::from_pairs(4, 1, &pairs).unwrap();
            let checks = z4_hom_checks(&f);
            assert!(checks.translation_identity);
            assert!(checks.scalar_dichotomy);
        }
    }
}
