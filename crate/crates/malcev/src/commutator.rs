//! Higher commutators of congruences, the lower central series, nilpotence
//! and supernilpotence classification, and the decomposition of operations
//! into sums of commutators.
//!
//! Two generation methods are implemented for `[α₁,…,α_k]`:
//!
//! * **absorbing generation**: the congruence generated by all pairs
//!   `(f(b₁..b_k), f(o₁..o_k))` where `f` ranges over `Pol_k`, `f` is
//!   absorbing at the base point `(o₁..o_k)` (changing arguments away from
//!   the base one at a time never moves the value), and each `b_i` is
//!   `α_i`-related to `o_i`;
//! * **nilpotent-T generation**: the congruence generated by
//!   `(c(a₁..a_k, o), o)` over all commutator operations `c` in `Pol_{k+1}`
//!   and arguments `a_i` that are `α_i`-related to `o`. This description is
//!   only valid on nilpotent algebras, so non-nilpotent inputs are refused.
//!
//! The two methods agree on nilpotent algebras; the test suite checks that
//! agreement exhaustively on the stock examples.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;

use crate::algebra::{self, FiniteAlgebra, FunctionTable};
use crate::clone::{self, CloneKind, CloneSlice};
use crate::closure::ClosureError;
use crate::partition::{self, Partition};

/// How a higher commutator is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutatorMethod {
    /// Pairs from absorbing polynomials in `Pol_k`, all base points.
    AbsorbingGeneration,
    /// Pairs from commutator polynomials in `Pol_{k+1}`; nilpotent
    /// algebras only.
    NilpotentT,
}

/// Supernilpotence classification of an algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupernilpotenceStatus {
    /// Least `k` with the `(k+1)`-fold total commutator equal to equality.
    Degree(usize),
    /// Nilpotent, but no degree at or below the tested cap.
    ExceedsCap {
        /// Largest degree that was tested.
        cap: usize,
    },
    /// Not nilpotent, hence not supernilpotent of any degree.
    NotSupernilpotent,
}

/// Lower central series data and the classifications derived from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilpotenceReport {
    /// The series `1 = s₀ ⊇ s₁ ⊇ …` with `s_{n+1} = [1, s_n]`, listed up to
    /// equality or stabilization.
    pub series: Vec<Partition>,
    /// Least `n` with `series[n]` equal to equality, if the series gets
    /// there (nilpotency class).
    pub class: Option<usize>,
    /// Supernilpotence degree within the tested cap.
    pub supernilpotence: SupernilpotenceStatus,
}

/// A minimal non-abelian congruence below a bound, with its derived data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalNonabelian {
    /// The minimal non-abelian congruence found.
    pub alpha: Partition,
    /// Its self-commutator `[α,α]`.
    pub gamma: Partition,
    /// Least `k` with the `(k+1)`-fold `[α,…,α]` equal to equality.
    pub degree: usize,
}

/// Errors from commutator computations.
#[derive(Debug, thiserror::Error)]
pub enum CommutatorError {
    /// Slice generation ran out of budget.
    #[error(transparent)]
    Closure(#[from] ClosureError),
    /// An argument partition is not compatible with the operations.
    #[error("argument {index} is not a congruence of the algebra")]
    NotACongruence {
        /// Position in the argument list.
        index: usize,
    },
    /// The nilpotent-T method was asked for on a non-nilpotent algebra.
    #[error("nilpotent-T generation requires a nilpotent algebra")]
    NotNilpotent,
    /// Fewer than two argument congruences.
    #[error("commutators take at least two congruence arguments, got {got}")]
    TooFewArguments {
        /// Number of arguments supplied.
        got: usize,
    },
}

/// Shared computation context for one algebra: caches polynomial slices,
/// commutator membership, and the lower central series across queries.
pub struct CommutatorLab<'a> {
    alg: &'a FiniteAlgebra,
    budget: usize,
    pol: RefCell<HashMap<usize, Rc<CloneSlice>>>,
    commutators: RefCell<HashMap<usize, Rc<Vec<usize>>>>,
    series: RefCell<Option<Rc<Vec<Partition>>>>,
}

impl<'a> CommutatorLab<'a> {
    /// Creates a context with the given slice-generation budget.
    pub fn new(alg: &'a FiniteAlgebra, budget: usize) -> CommutatorLab<'a> {
        CommutatorLab {
            alg,
            budget,
            pol: RefCell::new(HashMap::new()),
            commutators: RefCell::new(HashMap::new()),
            series: RefCell::new(None),
        }
    }

    /// The algebra under study.
    pub fn algebra(&self) -> &FiniteAlgebra {
        self.alg
    }

    /// Cached polynomial slice of the given arity.
    pub fn pol_slice(&self, k: usize) -> Result<Rc<CloneSlice>, CommutatorError> {
        if let Some(slice) = self.pol.borrow().get(&k) {
            return Ok(slice.clone());
        }
        let slice = Rc::new(clone::clone_upto(self.alg, k, CloneKind::Polynomial, self.budget)?);
        self.pol.borrow_mut().insert(k, slice.clone());
        Ok(slice)
    }

    /// Indices of the commutator tables inside the polynomial slice of the
    /// given arity, cached.
    fn commutator_indices(&self, arity: usize) -> Result<Rc<Vec<usize>>, CommutatorError> {
        if let Some(ix) = self.commutators.borrow().get(&arity) {
            return Ok(ix.clone());
        }
        let slice = self.pol_slice(arity)?;
        let ix: Vec<usize> = slice
            .tables()
            .iter()
            .enumerate()
            .filter(|(_, t)| is_commutator_table(t))
            .map(|(i, _)| i)
            .collect();
        let ix = Rc::new(ix);
        self.commutators.borrow_mut().insert(arity, ix.clone());
        Ok(ix)
    }

    fn validate_congruences(&self, alphas: &[Partition]) -> Result<(), CommutatorError> {
        for (i, a) in alphas.iter().enumerate() {
            if a.size() != self.alg.size() || !a.is_congruence(self.alg) {
                return Err(CommutatorError::NotACongruence { index: i });
            }
        }
        Ok(())
    }

    /// The higher commutator `[α₁,…,α_k]` by the chosen method.
    pub fn higher_commutator(
        &self,
        alphas: &[Partition],
        method: CommutatorMethod,
    ) -> Result<Partition, CommutatorError> {
        if alphas.len() < 2 {
            return Err(CommutatorError::TooFewArguments { got: alphas.len() });
        }
        self.validate_congruences(alphas)?;
        match method {
            CommutatorMethod::AbsorbingGeneration => self.absorbing_commutator(alphas),
            CommutatorMethod::NilpotentT => {
                if self.nilpotency_class()?.is_none() {
                    return Err(CommutatorError::NotNilpotent);
                }
                self.nilpotent_t_commutator(alphas)
            }
        }
    }

    fn absorbing_commutator(&self, alphas: &[Partition]) -> Result<Partition, CommutatorError> {
        let k = alphas.len();
        let s = self.alg.size();
        let slice = self.pol_slice(k)?;
        let bases = algebra::power_len(s, k).expect("base point space too large");
        // Tuple codes passing through each base point in some coordinate:
        // the only points that matter for the absorption test.
        let mut cross: Vec<Vec<usize>> = vec![Vec::new(); bases];
        let mut point = vec![0u8; k];
        let mut base = vec![0u8; k];
        for code in 0..bases {
            algebra::decode_into(s, code, &mut point);
            for (b, cx) in cross.iter_mut().enumerate() {
                algebra::decode_into(s, b, &mut base);
                if point.iter().zip(&base).any(|(x, o)| x == o) {
                    cx.push(code);
                }
            }
        }
        let mut pairs: HashSet<(u8, u8)> = HashSet::new();
        let mut classes: Vec<Vec<u8>> = Vec::with_capacity(k);
        for f in slice.tables() {
            for (b, cx) in cross.iter().enumerate() {
                let fo = f.eval_code(b);
                if cx.iter().any(|&code| f.eval_code(code) != fo) {
                    continue;
                }
                // f is absorbing at this base point; run the in-α arguments.
                algebra::decode_into(s, b, &mut base);
                classes.clear();
                classes.extend(alphas.iter().zip(&base).map(|(a, &o)| a.class_of(o)));
                let mut idx = vec![0usize; k];
                loop {
                    for (i, slot) in point.iter_mut().enumerate() {
                        *slot = classes[i][idx[i]];
                    }
                    pairs.insert((f.eval(&point), fo));
                    let mut i = 0;
                    while i < k {
                        idx[i] += 1;
                        if idx[i] < classes[i].len() {
                            break;
                        }
                        idx[i] = 0;
                        i += 1;
                    }
                    if i == k {
                        break;
                    }
                }
            }
        }
        let mut pair_list: Vec<(u8, u8)> = pairs.into_iter().collect();
        pair_list.sort_unstable();
        Ok(partition::congruence_generate(self.alg, &pair_list))
    }

    fn nilpotent_t_commutator(&self, alphas: &[Partition]) -> Result<Partition, CommutatorError> {
        let k = alphas.len();
        let s = self.alg.size();
        let slice = self.pol_slice(k + 1)?;
        let commutators = self.commutator_indices(k + 1)?;
        let mut pairs: HashSet<(u8, u8)> = HashSet::new();
        let mut point = vec![0u8; k + 1];
        for &ci in commutators.iter() {
            let c = &slice.tables()[ci];
            for o in 0..s as u8 {
                point[k] = o;
                let classes: Vec<Vec<u8>> = alphas.iter().map(|a| a.class_of(o)).collect();
                let mut idx = vec![0usize; k];
                loop {
                    for i in 0..k {
                        point[i] = classes[i][idx[i]];
                    }
                    pairs.insert((c.eval(&point), o));
                    let mut i = 0;
                    while i < k {
                        idx[i] += 1;
                        if idx[i] < classes[i].len() {
                            break;
                        }
                        idx[i] = 0;
                        i += 1;
                    }
                    if i == k {
                        break;
                    }
                }
            }
        }
        let mut pair_list: Vec<(u8, u8)> = pairs.into_iter().collect();
        pair_list.sort_unstable();
        Ok(partition::congruence_generate(self.alg, &pair_list))
    }

    /// The lower central series up to equality or stabilization, cached.
    /// Always computed with absorbing generation (the nilpotent-T method
    /// would presuppose the answer).
    pub fn lower_central_series_raw(&self) -> Result<Rc<Vec<Partition>>, CommutatorError> {
        if let Some(series) = self.series.borrow().as_ref() {
            return Ok(series.clone());
        }
        let s = self.alg.size();
        let one = Partition::one(s);
        let mut series = vec![one.clone()];
        loop {
            let last = series.last().unwrap();
            if last.is_zero() {
                break;
            }
            let next = self.absorbing_commutator(&[one.clone(), last.clone()])?;
            debug_assert!(next.leq(last));
            if &next == last {
                break;
            }
            series.push(next);
        }
        let series = Rc::new(series);
        *self.series.borrow_mut() = Some(series.clone());
        Ok(series)
    }

    /// Nilpotency class: least `n` with the `n`-th series member equal to
    /// equality, or `None` when the series stabilizes above it.
    pub fn nilpotency_class(&self) -> Result<Option<usize>, CommutatorError> {
        let series = self.lower_central_series_raw()?;
        Ok(if series.last().unwrap().is_zero() {
            Some(series.len() - 1)
        } else {
            None
        })
    }

    /// Least `k <= cap` making the `(k+1)`-fold total commutator trivial.
    pub fn supernilpotence_degree(&self, cap: usize) -> Result<SupernilpotenceStatus, CommutatorError> {
        // A supernilpotent algebra is nilpotent, so a failed nilpotence test
        // settles the question without enumerating larger slices.
        if self.nilpotency_class()?.is_none() {
            return Ok(SupernilpotenceStatus::NotSupernilpotent);
        }
        let one = Partition::one(self.alg.size());
        for k in 1..=cap {
            let args = vec![one.clone(); k + 1];
            if self.absorbing_commutator(&args)?.is_zero() {
                return Ok(SupernilpotenceStatus::Degree(k));
            }
        }
        Ok(SupernilpotenceStatus::ExceedsCap { cap })
    }

    /// Full nilpotence report: series, class, and supernilpotence within
    /// `cap`.
    pub fn report(&self, cap: usize) -> Result<NilpotenceReport, CommutatorError> {
        let series = self.lower_central_series_raw()?;
        let class = self.nilpotency_class()?;
        let supernilpotence = self.supernilpotence_degree(cap)?;
        Ok(NilpotenceReport {
            series: series.to_vec(),
            class,
            supernilpotence,
        })
    }

    /// Whether `[α, 1]` is the equality relation.
    pub fn centrality_check(&self, alpha: &Partition) -> Result<bool, CommutatorError> {
        let one = Partition::one(self.alg.size());
        Ok(self
            .higher_commutator(&[alpha.clone(), one], CommutatorMethod::AbsorbingGeneration)?
            .is_zero())
    }

    /// Searches the congruence lattice for a minimal non-abelian congruence
    /// below `beta`; returns it with `γ = [α,α]` and its supernilpotence
    /// degree (within `cap`).
    pub fn minimal_nonabelian_below(
        &self,
        beta: &Partition,
        cap: usize,
    ) -> Result<Option<MinimalNonabelian>, CommutatorError> {
        let lattice = partition::congruence_lattice(self.alg);
        let mut nonabelian: Vec<(Partition, Partition)> = Vec::new();
        for theta in lattice {
            if !theta.leq(beta) {
                continue;
            }
            let sq = self.higher_commutator(
                &[theta.clone(), theta.clone()],
                CommutatorMethod::AbsorbingGeneration,
            )?;
            if !sq.is_zero() {
                nonabelian.push((theta, sq));
            }
        }
        let minimals: Vec<(Partition, Partition)> = nonabelian
            .iter()
            .filter(|(theta, _)| {
                !nonabelian
                    .iter()
                    .any(|(other, _)| other != theta && other.leq(theta))
            })
            .cloned()
            .collect();
        for (alpha, gamma) in minimals {
            // Iterated binary commutators bound the flat ones from below, so
            // a stalled series rules out supernilpotence at every degree
            // without touching larger clone slices.
            let mut descending = alpha.clone();
            let reaches_zero = loop {
                if descending.is_zero() {
                    break true;
                }
                let next =
                    self.absorbing_commutator(&[alpha.clone(), descending.clone()])?;
                if next == descending {
                    break false;
                }
                descending = next;
            };
            if !reaches_zero {
                continue;
            }
            for k in 2..=cap {
                let args = vec![alpha.clone(); k + 1];
                if self.absorbing_commutator(&args)?.is_zero() {
                    return Ok(Some(MinimalNonabelian {
                        alpha,
                        gamma,
                        degree: k,
                    }));
                }
            }
        }
        // Every non-abelian congruence contains a minimal one, and growing
        // the congruence only grows its commutators, so the failures above
        // cover the whole interval below `beta`.
        Ok(None)
    }
}

/// Whether a table satisfies the commutator absorption identity
/// `z ∈ {x₁..x_k} ⇒ c(x₁..x_k, z) = z`.
fn is_commutator_table(c: &FunctionTable) -> bool {
    let s = c.size();
    let m = c.arity();
    let n = algebra::power_len(s, m).expect("table too large");
    let mut args = vec![0u8; m];
    for code in 0..n {
        algebra::decode_into(s, code, &mut args);
        let z = args[m - 1];
        if args[..m - 1].contains(&z) && c.eval_code(code) != z {
            return false;
        }
    }
    true
}

/// One-shot form of [`CommutatorLab::higher_commutator`].
pub fn higher_commutator(
    alg: &FiniteAlgebra,
    alphas: &[Partition],
    method: CommutatorMethod,
    budget: usize,
) -> Result<Partition, CommutatorError> {
    CommutatorLab::new(alg, budget).higher_commutator(alphas, method)
}

/// One-shot form of [`CommutatorLab::report`].
pub fn lower_central_series(
    alg: &FiniteAlgebra,
    cap: usize,
    budget: usize,
) -> Result<NilpotenceReport, CommutatorError> {
    CommutatorLab::new(alg, budget).report(cap)
}

/// One-shot form of [`CommutatorLab::centrality_check`].
pub fn centrality_check(alg: &FiniteAlgebra, alpha: &Partition, budget: usize) -> Result<bool, CommutatorError> {
    CommutatorLab::new(alg, budget).centrality_check(alpha)
}

/// One-shot form of [`CommutatorLab::minimal_nonabelian_below`].
pub fn minimal_nonabelian_below(
    alg: &FiniteAlgebra,
    beta: &Partition,
    cap: usize,
    budget: usize,
) -> Result<Option<MinimalNonabelian>, CommutatorError> {
    CommutatorLab::new(alg, budget).minimal_nonabelian_below(beta, cap)
}

/// A representation of an operation as a base term plus a sum of
/// commutators, one per non-empty subset of the first `k` argument
/// positions.
///
/// The defining identity, verified exhaustively on construction, is
/// `f(x, z) = f(z,…,z) +_z Σ_S c_S(x_S, z)` where `a +_z b := m(a, z, b)`,
/// the sum is associated left-to-right, and `S` runs through `order`.
#[derive(Debug, Clone)]
pub struct CommutatorDecomposition {
    /// The Mal'cev table the sums are taken with.
    pub malcev: FunctionTable,
    /// `f(z,…,z)` as a unary table.
    pub base: FunctionTable,
    /// Subsets of `0..k` in summation order.
    pub order: Vec<Vec<usize>>,
    /// For each subset in `order`: the commutator `c_S` of arity `|S|+1`.
    pub terms: Vec<FunctionTable>,
}

/// Errors from the commutator-sum decomposition.
#[derive(Debug, thiserror::Error)]
pub enum DecomposeError {
    /// Commutator machinery failed underneath.
    #[error(transparent)]
    Commutator(#[from] CommutatorError),
    /// The algebra has no Mal'cev term.
    #[error("no Mal'cev term found; decomposition needs a nilpotent algebra")]
    NoMalcev,
    /// The algebra is not nilpotent.
    #[error("the lower central series does not reach equality; decomposition needs a nilpotent algebra")]
    NotNilpotent,
    /// A supplied subset order is not a permutation of the non-empty
    /// subsets.
    #[error("subset order must list every non-empty subset of 0..{k} exactly once")]
    BadOrder {
        /// Number of argument positions.
        k: usize,
    },
    /// Construction completed but the defining identity failed; this
    /// indicates the theory's hypotheses do not hold for the input.
    #[error("decomposition identity failed at input code {code}")]
    IdentityFailed {
        /// Tuple code of a violating input.
        code: usize,
    },
    /// An intermediate residual left its expected congruence class.
    #[error("residual escaped its congruence bound in round {round}")]
    ResidualEscaped {
        /// Series index of the failing round.
        round: usize,
    },
}

/// All non-empty subsets of `0..k`, ordered by cardinality then
/// lexicographically; the default summation order.
pub fn default_subset_order(k: usize) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = (1usize..1 << k)
        .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
}

struct SumContext {
    malcev: FunctionTable,
    zproj: FunctionTable,
}

impl SumContext {
    /// Pointwise `a +_z b = m(a, z, b)` on tables whose last argument is z.
    fn add(&self, a: &FunctionTable, b: &FunctionTable) -> FunctionTable {
        FunctionTable::pointwise(&self.malcev, &[a, &self.zproj, b])
    }

    /// Pointwise `-_z a = m(z, a, z)`.
    fn neg(&self, a: &FunctionTable) -> FunctionTable {
        FunctionTable::pointwise(&self.malcev, &[&self.zproj, a, &self.zproj])
    }
}

/// Replaces argument `j` of a `(k+1)`-ary table by its last argument.
fn substitute_z(t: &FunctionTable, j: usize) -> FunctionTable {
    let m = t.arity();
    let map: Vec<usize> = (0..m).map(|i| if i == j { m - 1 } else { i }).collect();
    t.reindex(m, &map)
}

/// Decomposes a residual `e` (arity `k+1`, congruent to z modulo the current
/// series member, fixing the diagonal) into commutators `d_S` for non-empty
/// `S ⊆ active`, exact modulo the next series member.
fn decompose_residual(
    e: &FunctionTable,
    active: &[usize],
    ctx: &SumContext,
) -> BTreeMap<Vec<usize>, FunctionTable> {
    let mut out: BTreeMap<Vec<usize>, FunctionTable> = BTreeMap::new();
    // The iterated correction e_j subtracts, for each active coordinate in
    // turn, the slice with that coordinate sent to z; the final table
    // vanishes whenever an active coordinate equals z, i.e. it is a
    // commutator in the active coordinates.
    let mut ej = e.clone();
    for &j in active {
        let collapsed = substitute_z(&ej, j);
        ej = FunctionTable::pointwise(&ctx.malcev, &[&ej, &collapsed, &ctx.zproj]);
    }
    out.insert(active.to_vec(), ej);
    if active.len() <= 1 {
        return out;
    }
    // Alternating inclusion-exclusion over proper non-empty subsets, with
    // each piece decomposed recursively.
    let ka = active.len();
    let mut proper: Vec<Vec<usize>> = Vec::new();
    for mask in 1usize..(1 << ka) - 1 {
        proper.push(
            (0..ka)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| active[i])
                .collect(),
        );
    }
    proper.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut contributions: BTreeMap<Vec<usize>, Vec<(bool, FunctionTable)>> = BTreeMap::new();
    contributions.insert(active.to_vec(), Vec::new());
    for t_set in proper {
        let mut et = e.clone();
        for &j in active {
            if !t_set.contains(&j) {
                et = substitute_z(&et, j);
            }
        }
        let negative = (ka + 1 - t_set.len()) % 2 == 1;
        for (s_set, d) in decompose_residual(&et, &t_set, ctx) {
            contributions.entry(s_set).or_default().push((negative, d));
        }
    }
    for (s_set, parts) in contributions {
        if parts.is_empty() {
            continue;
        }
        let mut acc = ctx.zproj.clone();
        for (negative, d) in parts {
            let signed = if negative { ctx.neg(&d) } else { d };
            acc = ctx.add(&acc, &signed);
        }
        out.insert(s_set, acc);
    }
    out
}

/// Writes `f` (arity `k+1`) as its diagonal plus an ordered `+_z` sum of
/// commutators `c_S`, one per non-empty subset `S` of the first `k`
/// argument positions. `order` defaults to cardinality-then-lexicographic;
/// the identity is verified exhaustively before returning.
pub fn decompose_commutator_sum(
    alg: &FiniteAlgebra,
    f: &FunctionTable,
    order: Option<Vec<Vec<usize>>>,
    budget: usize,
) -> Result<CommutatorDecomposition, DecomposeError> {
    assert!(f.arity() >= 2, "decomposition needs arity k+1 with k >= 1");
    assert_eq!(f.size(), alg.size());
    let k = f.arity() - 1;
    let s = alg.size();
    let order = match order {
        Some(o) => {
            let mut sorted: Vec<Vec<usize>> = o.clone();
            sorted.sort();
            let mut expect = default_subset_order(k);
            expect.sort();
            if sorted != expect {
                return Err(DecomposeError::BadOrder { k });
            }
            o
        }
        None => default_subset_order(k),
    };

    let lab = CommutatorLab::new(alg, budget);
    let series = lab.lower_central_series_raw()?;
    if !series.last().unwrap().is_zero() {
        return Err(DecomposeError::NotNilpotent);
    }
    let malcev = clone::find_malcev(alg, budget)
        .map_err(CommutatorError::from)?
        .ok_or(DecomposeError::NoMalcev)?;
    let ctx = SumContext {
        zproj: FunctionTable::projection(s, k + 1, k),
        malcev: malcev.clone(),
    };

    // Solving m(p, z, w) = v for w: the third-slot translations of a
    // Mal'cev operation on a nilpotent algebra are bijections.
    let mut solve = vec![255u8; s * s * s];
    for p in 0..s {
        for z in 0..s {
            for w in 0..s as u8 {
                let v = malcev.eval(&[p as u8, z as u8, w]) as usize;
                solve[p + s * (z + s * v)] = w;
            }
        }
    }
    if solve.iter().any(|&w| w == 255) {
        return Err(DecomposeError::NoMalcev);
    }

    let base_diag = {
        let map: Vec<usize> = vec![k; k + 1];
        f.reindex(k + 1, &map)
    };
    let mut terms: BTreeMap<Vec<usize>, FunctionTable> = order
        .iter()
        .map(|sset| (sset.clone(), ctx.zproj.clone()))
        .collect();

    let assemble = |terms: &BTreeMap<Vec<usize>, FunctionTable>| -> FunctionTable {
        let mut acc = base_diag.clone();
        for sset in &order {
            acc = ctx.add(&acc, &terms[sset]);
        }
        acc
    };

    let n_points = algebra::power_len(s, k + 1).expect("table too large");
    let rounds = series.len() - 1;
    for round in 0..rounds {
        let assembled = assemble(&terms);
        // Exact residual: e with assembled +_z e = f.
        let mut evals = vec![0u8; n_points];
        for (code, ev) in evals.iter_mut().enumerate() {
            let p = assembled.eval_code(code) as usize;
            let z = {
                let mut c = code;
                for _ in 0..k {
                    c /= s;
                }
                c
            };
            let v = f.eval_code(code) as usize;
            *ev = solve[p + s * (z + s * v)];
        }
        let e = FunctionTable::new(s, k + 1, evals).expect("solved within range");
        // The residual must already be trivial modulo the current series
        // member, and must fix the diagonal.
        let eta = &series[round];
        let mut args = vec![0u8; k + 1];
        for code in 0..n_points {
            algebra::decode_into(s, code, &mut args);
            if !eta.same(e.eval_code(code), args[k]) {
                return Err(DecomposeError::ResidualEscaped { round });
            }
        }
        if e == ctx.zproj {
            break;
        }
        let active: Vec<usize> = (0..k).collect();
        let ds = decompose_residual(&e, &active, &ctx);
        for (sset, d) in ds {
            let cur = &terms[&sset];
            terms.insert(sset.clone(), ctx.add(cur, &d));
        }
    }

    // Final exhaustive verification of the defining identity.
    let assembled = assemble(&terms);
    for code in 0..n_points {
        if assembled.eval_code(code) != f.eval_code(code) {
            return Err(DecomposeError::IdentityFailed { code });
        }
    }

    // Compress each c_S to arity |S|+1 and confirm it depends on nothing
    // else and is a commutator.
    let mut compressed = Vec::with_capacity(order.len());
    for sset in &order {
        let full = &terms[sset];
        let mut map = vec![sset.len(); k + 1];
        for (pos, &i) in sset.iter().enumerate() {
            map[i] = pos;
        }
        map[k] = sset.len();
        let small = full.reindex(sset.len() + 1, &map);
        // Re-expand and compare to verify independence from the dropped
        // coordinates.
        let mut back_map = vec![0usize; sset.len() + 1];
        for (pos, &i) in sset.iter().enumerate() {
            back_map[pos] = i;
        }
        back_map[sset.len()] = k;
        let expanded = small.reindex(k + 1, &back_map);
        if &expanded != full {
            return Err(DecomposeError::IdentityFailed { code: 0 });
        }
        if clone::commutator_classify(&small).is_none() {
            return Err(DecomposeError::IdentityFailed { code: 0 });
        }
        compressed.push(small);
    }

    Ok(CommutatorDecomposition {
        malcev,
        base: f.reindex(1, &vec![0; k + 1]),
        order,
        terms: compressed,
    })
}
