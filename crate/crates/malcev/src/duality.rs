//! Equationally definable domains, preservation of relations by partial
//! operations, term extendability, and the finite-relatedness scan that
//! searches for partial operations preserving a candidate relation set
//! without being restrictions of terms.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use crate::algebra::{self, FiniteAlgebra, FunctionTable};
use crate::clone::{self, CloneKind, CloneSlice};
use crate::closure::{self, ClosureError};
use crate::relation::{Bitset, PartialFunction, RelationSet};

/// A domain cut out by finitely many term equations, together with the
/// equations that define it.
#[derive(Debug, Clone)]
pub struct CadDomain {
    members: RelationSet,
    witness: Vec<(FunctionTable, FunctionTable)>,
}

impl CadDomain {
    /// Number of argument coordinates.
    pub fn arity(&self) -> usize {
        self.members.arity()
    }

    /// The point set.
    pub fn members(&self) -> &RelationSet {
        &self.members
    }

    /// Defining equations; the member set is their simultaneous solution
    /// set.
    pub fn witness(&self) -> &[(FunctionTable, FunctionTable)] {
        &self.witness
    }

    /// Recomputes the solution set of the witness equations and compares it
    /// with the stored members.
    pub fn check_witness(&self) -> bool {
        let n = match algebra::power_len(self.members.size(), self.members.arity()) {
            Some(n) => n,
            None => return false,
        };
        (0..n).all(|code| {
            let solves = self
                .witness
                .iter()
                .all(|(f, g)| f.eval_code(code) == g.eval_code(code));
            solves == self.members.contains_code(code)
        })
    }
}

/// Errors from domain enumeration and relatedness scans.
#[derive(Debug, thiserror::Error)]
pub enum DualityError {
    /// Clone or subuniverse generation ran out of budget.
    #[error(transparent)]
    Closure(#[from] ClosureError),
    /// More distinct domains than the cap allows.
    #[error("domain enumeration exceeded the cap of {cap} distinct sets")]
    DomainCap {
        /// The cap in force.
        cap: usize,
    },
}

/// All non-empty solution sets of single equations `f = g` over the slice,
/// closed under pairwise intersection, in ascending size order. Errors out
/// when more than `cap` distinct sets appear.
pub fn cad_enumerate(slice: &CloneSlice, cap: usize) -> Result<Vec<CadDomain>, DualityError> {
    let size = slice.size();
    let k = slice.arity();
    let n = algebra::power_len(size, k).expect("domain space too large");
    let tables = slice.tables();
    let solutions = |i: usize, j: usize| -> Bitset {
        let mut bits = Bitset::new(n);
        for code in 0..n {
            if tables[i].eval_code(code) == tables[j].eval_code(code) {
                bits.insert(code);
            }
        }
        bits
    };
    // Base sets: one per unordered pair of slice members, deduplicated.
    let mut index: HashMap<Bitset, usize> = HashMap::new();
    let mut sets: Vec<(Bitset, Vec<(usize, usize)>)> = Vec::new();
    for i in 0..tables.len() {
        for j in i..tables.len() {
            let mask = solutions(i, j);
            if mask.is_empty() || index.contains_key(&mask) {
                continue;
            }
            index.insert(mask.clone(), sets.len());
            sets.push((mask, vec![(i, j)]));
            if sets.len() > cap {
                return Err(DualityError::DomainCap { cap });
            }
        }
    }
    let base_count = sets.len();
    // Close under intersection with base sets; every finite intersection of
    // base sets is reached this way.
    let mut queue: VecDeque<usize> = (0..sets.len()).collect();
    while let Some(si) = queue.pop_front() {
        for bi in 0..base_count {
            let mut mask = sets[si].0.clone();
            mask.intersect_with(&sets[bi].0);
            if mask.is_empty() || index.contains_key(&mask) {
                continue;
            }
            let mut witness = sets[si].1.clone();
            witness.extend_from_slice(&sets[bi].1);
            witness.sort_unstable();
            witness.dedup();
            index.insert(mask.clone(), sets.len());
            sets.push((mask, witness));
            if sets.len() > cap {
                return Err(DualityError::DomainCap { cap });
            }
            queue.push_back(sets.len() - 1);
        }
    }
    sets.sort_by(|a, b| a.0.count().cmp(&b.0.count()).then_with(|| a.0.cmp(&b.0)));
    Ok(sets
        .into_iter()
        .map(|(mask, pairs)| CadDomain {
            members: RelationSet::from_bits(size, k, mask),
            witness: pairs
                .into_iter()
                .map(|(i, j)| (tables[i].clone(), tables[j].clone()))
                .collect(),
        })
        .collect())
}

/// Whether the partial operation maps member tuples of `r` back into `r`
/// whenever all the coordinatewise argument rows are defined. The caller is
/// responsible for `r` being a subuniverse when that reading matters.
pub fn preserves(f: &PartialFunction, r: &RelationSet) -> bool {
    assert_eq!(f.size(), r.size());
    let k = f.arity();
    let n = r.arity();
    let members: Vec<Vec<u8>> = r.tuples();
    if members.is_empty() {
        return true;
    }
    let mut pick = vec![0usize; k];
    'combo: loop {
        let mut value = vec![0u8; n];
        let mut defined = true;
        'rows: for j in 0..n {
            let row: Vec<u8> = pick.iter().map(|&i| members[i][j]).collect();
            match f.get(&row) {
                Some(v) => value[j] = v,
                None => {
                    defined = false;
                    break 'rows;
                }
            }
        }
        if defined && !r.contains(&value) {
            return false;
        }
        let mut i = 0;
        while i < k {
            pick[i] += 1;
            if pick[i] < members.len() {
                continue 'combo;
            }
            pick[i] = 0;
            i += 1;
        }
        return true;
    }
}

/// First table in the slice agreeing with the partial operation on its whole
/// domain, if any.
pub fn extends_to_term(f: &PartialFunction, slice: &CloneSlice) -> Option<FunctionTable> {
    assert_eq!(f.arity(), slice.arity());
    slice.tables().iter().find(|t| f.agrees_with(t)).cloned()
}

/// Whether the partial operation preserves every subuniverse of `A^power`,
/// by the generated-subuniverse reduction: it suffices that each value
/// tuple lies in the subuniverse generated by its argument tuples, that
/// being the least subuniverse containing them.
pub fn preserves_all_subpower(
    alg: &FiniteAlgebra,
    f: &PartialFunction,
    power: usize,
) -> Result<bool, ClosureError> {
    let k = f.arity();
    let dom: Vec<Vec<u8>> = {
        let mut args = vec![0u8; k];
        f.domain_codes()
            .iter()
            .map(|&c| {
                algebra::decode_into(alg.size(), c, &mut args);
                args.clone()
            })
            .collect()
    };
    let m = dom.len();
    if m == 0 {
        return Ok(true);
    }
    let mut memo: HashMap<Vec<Vec<u8>>, Rc<RelationSet>> = HashMap::new();
    let mut pick = vec![0usize; power];
    loop {
        let mut gens = vec![vec![0u8; power]; k];
        let mut value = vec![0u8; power];
        for (j, &pi) in pick.iter().enumerate() {
            for i in 0..k {
                gens[i][j] = dom[pi][i];
            }
            value[j] = f.get(&dom[pi]).unwrap();
        }
        let generated = match memo.get(&gens) {
            Some(g) => g.clone(),
            None => {
                let g = Rc::new(closure::subuniverse_generate(alg, power, &gens)?);
                memo.insert(gens.clone(), g.clone());
                g
            }
        };
        if !generated.contains(&value) {
            return Ok(false);
        }
        let mut i = 0;
        while i < power {
            pick[i] += 1;
            if pick[i] < m {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
        if i == power {
            return Ok(true);
        }
    }
}

/// What the relatedness scan tests preservation against.
#[derive(Debug, Clone)]
pub enum Candidates {
    /// A concrete list of relations.
    Explicit(Vec<RelationSet>),
    /// Every subuniverse of the given power, never materialized: membership
    /// of each value tuple in the subuniverse generated by the argument
    /// tuples is the binding constraint.
    AllSubpower {
        /// Exponent of the power.
        power: usize,
    },
}

/// Knobs for the relatedness scan.
#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// Element budget for clone-slice generation.
    pub clone_budget: usize,
    /// Maximum distinct domains per arity.
    pub domain_cap: usize,
    /// Maximum backtracking nodes per arity before giving up.
    pub node_budget: u64,
    /// Whether to shrink a found counterexample by greedy point removal.
    pub shrink: bool,
}

impl Default for ScanOptions {
    fn default() -> ScanOptions {
        ScanOptions {
            clone_budget: 8_000_000,
            domain_cap: 100_000,
            node_budget: 50_000_000,
            shrink: true,
        }
    }
}

/// Per-arity counters from the scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArityStats {
    /// The arity these counters belong to.
    pub arity: usize,
    /// Domains enumerated at this arity.
    pub domains: usize,
    /// Backtracking assignments pruned.
    pub pruned: u64,
    /// Completed assignments that preserved all candidates.
    pub preserving: u64,
}

/// A preserving-but-not-extendable partial operation, with its domain and
/// re-verified evidence.
#[derive(Debug, Clone)]
pub struct Counterexample {
    /// The partial operation.
    pub function: PartialFunction,
    /// The domain it lives on.
    pub domain: RelationSet,
    /// Re-verification outcome of preservation (true) and extension
    /// absence (true) via the public predicates.
    pub reverified: bool,
}

/// Outcome of a relatedness scan.
#[derive(Debug, Clone)]
pub enum ScanStatus {
    /// No counterexample up to the scanned arity.
    Certified,
    /// A partial operation preserving all candidates without a term
    /// extension.
    Counterexample(Box<Counterexample>),
    /// A cap or budget ran out before the arity was settled.
    Inconclusive {
        /// Arity at which the scan gave up.
        arity: usize,
        /// What ran out.
        reason: String,
    },
}

/// Scan result: status plus the per-arity counters that were completed.
#[derive(Debug, Clone)]
pub struct RelatednessVerdict {
    /// Certified, counterexample, or inconclusive.
    pub status: ScanStatus,
    /// Largest arity the scan was asked to cover.
    pub scanned_arity: usize,
    /// Counters for each arity reached.
    pub stats: Vec<ArityStats>,
}

// One preservation constraint on decided assignment points: when all of
// `rows` are assigned, the value tuple must satisfy the source it came
// from.
enum ConstraintKind {
    Explicit { candidate: usize },
    Generated { gens: Vec<Vec<u8>> },
}

struct Constraint {
    rows: Vec<usize>,
    kind: ConstraintKind,
}

/// Searches, for every arity up to `k_max` and every domain at that arity,
/// for a partial operation that preserves all candidates but extends to no
/// term of the slice. Domains are scanned in ascending size order,
/// assignment points in tuple-code order, values ascending; the first
/// counterexample in that order is returned.
pub fn finite_relatedness_scan(
    alg: &FiniteAlgebra,
    candidates: &Candidates,
    k_max: usize,
    opts: &ScanOptions,
) -> RelatednessVerdict {
    let mut stats = Vec::new();
    let mut sg_memo: HashMap<Vec<Vec<u8>>, Rc<RelationSet>> = HashMap::new();
    for k in 1..=k_max {
        let slice = match clone::clone_upto(alg, k, CloneKind::Term, opts.clone_budget) {
            Ok(s) => s,
            Err(e) => {
                return RelatednessVerdict {
                    status: ScanStatus::Inconclusive {
                        arity: k,
                        reason: format!("clone generation: {e}"),
                    },
                    scanned_arity: k_max,
                    stats,
                };
            }
        };
        let domains = match cad_enumerate(&slice, opts.domain_cap) {
            Ok(d) => d,
            Err(e) => {
                return RelatednessVerdict {
                    status: ScanStatus::Inconclusive {
                        arity: k,
                        reason: format!("domain enumeration: {e}"),
                    },
                    scanned_arity: k_max,
                    stats,
                };
            }
        };
        let mut arity_stats = ArityStats {
            arity: k,
            domains: domains.len(),
            pruned: 0,
            preserving: 0,
        };
        for domain in &domains {
            match scan_domain(
                alg,
                candidates,
                &slice,
                domain.members(),
                opts,
                &mut arity_stats,
                &mut sg_memo,
            ) {
                Ok(None) => {}
                Ok(Some(function)) => {
                    let function = if opts.shrink {
                        shrink_counterexample(alg, candidates, &slice, &function)
                    } else {
                        function
                    };
                    let reverified = reverify(alg, candidates, &slice, &function);
                    let mut domain_set = RelationSet::empty(alg.size(), k);
                    for &c in function.domain_codes() {
                        domain_set.insert_code(c);
                    }
                    stats.push(arity_stats);
                    return RelatednessVerdict {
                        status: ScanStatus::Counterexample(Box::new(Counterexample {
                            function,
                            domain: domain_set,
                            reverified,
                        })),
                        scanned_arity: k_max,
                        stats,
                    };
                }
                Err(reason) => {
                    stats.push(arity_stats);
                    return RelatednessVerdict {
                        status: ScanStatus::Inconclusive { arity: k, reason },
                        scanned_arity: k_max,
                        stats,
                    };
                }
            }
        }
        stats.push(arity_stats);
    }
    RelatednessVerdict {
        status: ScanStatus::Certified,
        scanned_arity: k_max,
        stats,
    }
}

/// Backtracking search over total assignments on one domain. Returns the
/// first completed assignment that preserves all candidates but has no term
/// extension, or None when every preserving assignment extends.
fn scan_domain(
    alg: &FiniteAlgebra,
    candidates: &Candidates,
    slice: &CloneSlice,
    domain: &RelationSet,
    opts: &ScanOptions,
    arity_stats: &mut ArityStats,
    sg_memo: &mut HashMap<Vec<Vec<u8>>, Rc<RelationSet>>,
) -> Result<Option<PartialFunction>, String> {
    let s = alg.size();
    let k = domain.arity();
    let mut codes: Vec<usize> = domain.iter_codes().collect();
    codes.sort_unstable();
    let m = codes.len();
    let mut args = vec![0u8; k];
    let points: Vec<Vec<u8>> = codes
        .iter()
        .map(|&c| {
            algebra::decode_into(s, c, &mut args);
            args.clone()
        })
        .collect();
    let point_index: HashMap<&[u8], usize> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_slice(), i))
        .collect();
    // Build the constraints whose argument rows all lie in the domain,
    // grouped by the largest row index so each is checked exactly when it
    // first becomes decidable.
    let mut triggers: Vec<Vec<Constraint>> = (0..m).map(|_| Vec::new()).collect();
    let explicit: &[RelationSet] = match candidates {
        Candidates::Explicit(list) => list,
        Candidates::AllSubpower { .. } => &[],
    };
    match candidates {
        Candidates::Explicit(list) => {
            for (ci, r) in list.iter().enumerate() {
                let members: Vec<Vec<u8>> = r.tuples();
                if members.is_empty() {
                    continue;
                }
                let n = r.arity();
                let mut pick = vec![0usize; k];
                'combo: loop {
                    let rows: Option<Vec<usize>> = (0..n)
                        .map(|j| {
                            let row: Vec<u8> = pick.iter().map(|&i| members[i][j]).collect();
                            point_index.get(row.as_slice()).copied()
                        })
                        .collect();
                    if let Some(rows) = rows {
                        let trigger = rows.iter().copied().max().unwrap();
                        triggers[trigger].push(Constraint {
                            rows,
                            kind: ConstraintKind::Explicit { candidate: ci },
                        });
                    }
                    let mut i = 0;
                    while i < k {
                        pick[i] += 1;
                        if pick[i] < members.len() {
                            continue 'combo;
                        }
                        pick[i] = 0;
                        i += 1;
                    }
                    break;
                }
            }
        }
        Candidates::AllSubpower { power } => {
            // Row tuples up to permutation: the generated subuniverse and
            // the value tuple permute together, so non-decreasing index
            // tuples carry the whole constraint.
            let mut pick = vec![0usize; *power];
            loop {
                let rows = pick.clone();
                let mut gens = vec![vec![0u8; *power]; k];
                for (j, &pi) in rows.iter().enumerate() {
                    for i in 0..k {
                        gens[i][j] = points[pi][i];
                    }
                }
                let trigger = rows.iter().copied().max().unwrap();
                triggers[trigger].push(Constraint {
                    rows,
                    kind: ConstraintKind::Generated { gens },
                });
                let mut i = 0;
                let p = *power;
                loop {
                    pick[i] += 1;
                    if pick[i] < m {
                        for j in (0..i).rev() {
                            pick[j] = pick[i];
                        }
                        break;
                    }
                    i += 1;
                    if i == p {
                        break;
                    }
                }
                if i == *power {
                    break;
                }
            }
        }
    }
    let mut nodes = 0u64;
    let mut values = vec![0u8; m];
    let mut depth = 0usize;
    loop {
        nodes += 1;
        if nodes > opts.node_budget {
            return Err(format!("assignment search exceeded {} nodes", opts.node_budget));
        }
        let ok = triggers[depth].iter().all(|c| {
            let value: Vec<u8> = c.rows.iter().map(|&i| values[i]).collect();
            match &c.kind {
                ConstraintKind::Explicit { candidate } => explicit[*candidate].contains(&value),
                ConstraintKind::Generated { gens } => {
                    let generated = match sg_memo.get(gens) {
                        Some(g) => g.clone(),
                        None => {
                            let g = Rc::new(
                                closure::subuniverse_generate(alg, gens[0].len(), gens)
                                    .expect("power universe fits the budget"),
                            );
                            sg_memo.insert(gens.clone(), g.clone());
                            g
                        }
                    };
                    generated.contains(&value)
                }
            }
        });
        if ok {
            if depth + 1 < m {
                depth += 1;
                values[depth] = 0;
                continue;
            }
            arity_stats.preserving += 1;
            let f = PartialFunction::from_codes(s, k, &codes, &values);
            if extends_to_term(&f, slice).is_none() {
                return Ok(Some(f));
            }
        } else {
            arity_stats.pruned += 1;
        }
        loop {
            if (values[depth] as usize) < s - 1 {
                values[depth] += 1;
                break;
            }
            if depth == 0 {
                return Ok(None);
            }
            depth -= 1;
        }
    }
}

/// Greedily removes domain points while the restriction still preserves all
/// candidates and still extends to no term.
fn shrink_counterexample(
    alg: &FiniteAlgebra,
    candidates: &Candidates,
    slice: &CloneSlice,
    f: &PartialFunction,
) -> PartialFunction {
    let mut current = f.clone();
    loop {
        let mut improved = false;
        let codes: Vec<usize> = current.domain_codes().to_vec();
        for drop in &codes {
            if current.len() <= 1 {
                break;
            }
            let keep: Vec<usize> = codes.iter().copied().filter(|c| c != drop).collect();
            let smaller = current.restrict(&keep);
            let still_preserves = match candidates {
                Candidates::Explicit(list) => list.iter().all(|r| preserves(&smaller, r)),
                Candidates::AllSubpower { power } => {
                    preserves_all_subpower(alg, &smaller, *power).unwrap_or(false)
                }
            };
            if still_preserves && extends_to_term(&smaller, slice).is_none() {
                current = smaller;
                improved = true;
                break;
            }
        }
        if !improved {
            return current;
        }
    }
}

/// Re-checks a counterexample through the public predicates.
fn reverify(
    alg: &FiniteAlgebra,
    candidates: &Candidates,
    slice: &CloneSlice,
    f: &PartialFunction,
) -> bool {
    let preserved = match candidates {
        Candidates::Explicit(list) => list.iter().all(|r| preserves(f, r)),
        Candidates::AllSubpower { power } => preserves_all_subpower(alg, f, *power).unwrap_or(false),
    };
    preserved && extends_to_term(f, slice).is_none()
}
