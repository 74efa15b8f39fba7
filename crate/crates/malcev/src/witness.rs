//! Ghost-element witness construction on a finite index window.
//!
//! Elements live in `(A^{2^k})^window`: at every window index sits a tuple
//! indexed by subsets of `{1,..,k}`, and off-window coordinates are read as
//! the constant all-`o` tuple. The module builds the pulse generators `d_i`,
//! the signed sums `v_{i,j}`, the parity functional that every generated
//! element must satisfy, and the ghost element that fails it, then closes
//! the generators under the fundamental operations to a bounded depth and
//! checks that the ghost never appears.

use std::collections::HashSet;
use std::fmt;

use crate::algebra::{FiniteAlgebra, FunctionTable};
use crate::clone::{self, CloneKind};
use crate::closure::ClosureError;
use crate::commutator::{CommutatorError, CommutatorLab};
use crate::partition::Partition;

/// How consecutive adjacent `v` blocks combine into `v_{i,j}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumRule {
    /// Straight sums; applies when every rank-`k` commutator vanishes on
    /// repeated in-`α` arguments.
    Plain,
    /// Alternating signs; applies when some rank-`k` commutator takes a
    /// non-trivial value on arguments with a repeat, which the setup then
    /// moves to the first two positions.
    Alternating,
}

impl fmt::Display for SumRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SumRule::Plain => write!(f, "plain"),
            SumRule::Alternating => write!(f, "alternating"),
        }
    }
}

/// Errors from witness setup and element construction.
#[derive(Debug, thiserror::Error)]
pub enum WitnessError {
    /// Commutator machinery failed underneath.
    #[error(transparent)]
    Commutator(#[from] CommutatorError),
    /// Clone generation failed underneath.
    #[error(transparent)]
    Closure(#[from] ClosureError),
    /// No non-abelian supernilpotent congruence below the requested bound.
    #[error("no non-abelian supernilpotent congruence at or below the given one")]
    NoTarget,
    /// The algebra has no ternary Mal'cev term.
    #[error("the algebra has no Mal'cev term")]
    NoMalcev,
    /// No commutator with a non-trivial in-class value was found, so neither
    /// sum rule can be witnessed.
    #[error("no commutator of rank {rank} takes a non-trivial value on in-class arguments")]
    NoCommutatorValue {
        /// The rank searched (arity minus one).
        rank: usize,
    },
    /// The forced sum rule has no witness of the required shape.
    #[error("the requested sum rule {rule} has no witnessing commutator")]
    OverrideUnavailable {
        /// The rule that was forced.
        rule: SumRule,
    },
    /// The window cannot hold one full pulse interaction.
    #[error("window holds {got} indices but the construction needs at least {need}")]
    WindowTooShort {
        /// Minimum window length `2(t+3)+2`.
        need: i64,
        /// Actual window length.
        got: i64,
    },
    /// An element was requested at indices outside the window.
    #[error("index {index} falls outside the window")]
    OutsideWindow {
        /// The offending index.
        index: i64,
    },
    /// A signed sum needs a strictly increasing index pair.
    #[error("signed sums need i < j, got {i} and {j}")]
    BadSpan {
        /// Left index.
        i: i64,
        /// Right index.
        j: i64,
    },
}

/// One element of `(A^{2^k})^window`.
///
/// Entry `(i, s)` is the value at window index `i` and subset bitmask `s`
/// (bit `l-1` set iff `l` lies in the subset). Off-window indices are not
/// stored; every operation treats them as the all-`o` tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WitnessElement {
    lo: i64,
    hi: i64,
    subsets: usize,
    data: Box<[u8]>,
}

impl WitnessElement {
    /// Lower window bound.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Upper window bound (inclusive).
    pub fn hi(&self) -> i64 {
        self.hi
    }

    /// Number of subset coordinates (`2^k`).
    pub fn subsets(&self) -> usize {
        self.subsets
    }

    /// The entry at a window index and subset bitmask.
    pub fn entry(&self, i: i64, s: usize) -> u8 {
        assert!(self.lo <= i && i <= self.hi, "index {i} outside window");
        assert!(s < self.subsets);
        self.data[(i - self.lo) as usize * self.subsets + s]
    }

    /// The tuple at one window index.
    pub fn tuple_at(&self, i: i64) -> &[u8] {
        assert!(self.lo <= i && i <= self.hi, "index {i} outside window");
        let start = (i - self.lo) as usize * self.subsets;
        &self.data[start..start + self.subsets]
    }
}

/// The fixed data the construction runs on: target algebra, the located
/// congruence pair, the chosen commutator with its argument witnesses, the
/// sum rule, and the index window.
#[derive(Debug, Clone)]
pub struct WitnessSetup {
    alg: FiniteAlgebra,
    malcev: FunctionTable,
    alpha: Partition,
    gamma: Partition,
    degree: usize,
    commutator: FunctionTable,
    args: Vec<u8>,
    base: u8,
    rule: SumRule,
    t: i64,
    lo: i64,
    hi: i64,
}

/// Optional knobs for [`setup_witness`].
#[derive(Debug, Clone, Copy, Default)]
pub struct WitnessOptions {
    /// Size of a superalgebra the elements are imagined to range over; only
    /// enlarges `t = 2|B|+1`. Defaults to the algebra's own size.
    pub superset_size: Option<usize>,
    /// Forces the sum rule instead of scanning for a repeated-argument
    /// witness first.
    pub rule_override: Option<SumRule>,
    /// Supernilpotence search cap when locating the congruence pair.
    pub degree_cap: usize,
}

impl WitnessOptions {
    fn cap(&self) -> usize {
        if self.degree_cap == 0 {
            4
        } else {
            self.degree_cap
        }
    }
}

/// Locates a minimal non-abelian congruence `α` at or below `beta`, its
/// derived abelian congruence `γ = [α,α]`, the degree `k`, and a commutator
/// of rank `k` with a non-trivial in-`α` value; decides the sum rule
/// (alternating preferred, by scanning repeated-argument witnesses first)
/// and fixes the window.
pub fn setup_witness(
    alg: &FiniteAlgebra,
    beta: &Partition,
    lo: i64,
    hi: i64,
    budget: usize,
) -> Result<WitnessSetup, WitnessError> {
    setup_witness_with(alg, beta, lo, hi, budget, WitnessOptions::default())
}

/// [`setup_witness`] with explicit options.
pub fn setup_witness_with(
    alg: &FiniteAlgebra,
    beta: &Partition,
    lo: i64,
    hi: i64,
    budget: usize,
    opts: WitnessOptions,
) -> Result<WitnessSetup, WitnessError> {
    let b = opts.superset_size.unwrap_or(alg.size()).max(alg.size());
    let t = 2 * b as i64 + 1;
    let need = 2 * (t + 3) + 2;
    let got = hi - lo + 1;
    if got < need {
        return Err(WitnessError::WindowTooShort { need, got });
    }
    let lab = CommutatorLab::new(alg, budget);
    let found = lab
        .minimal_nonabelian_below(beta, opts.cap())?
        .ok_or(WitnessError::NoTarget)?;
    let alpha = found.alpha;
    let gamma = found.gamma;
    let k = found.degree;

    let slice = clone::clone_upto(alg, k + 1, CloneKind::Polynomial, budget)?;
    let commutators: Vec<&FunctionTable> = slice
        .tables()
        .iter()
        .filter(|f| clone::commutator_classify(f).is_some())
        .collect();
    let witness_scan = |want_repeat: bool| -> Option<(FunctionTable, Vec<u8>, u8)> {
        let s = alg.size();
        let n = crate::algebra::power_len(s, k).unwrap();
        let mut a = vec![0u8; k];
        for f in &commutators {
            for o in 0..s as u8 {
                for code in 0..n {
                    crate::algebra::decode_into(s, code, &mut a);
                    if !a.iter().all(|&ai| alpha.same(ai, o)) {
                        continue;
                    }
                    let repeat = (0..k).find_map(|i| {
                        (i + 1..k).find(|&j| a[i] == a[j]).map(|j| (i, j))
                    });
                    if want_repeat && repeat.is_none() {
                        continue;
                    }
                    let mut point = a.clone();
                    point.push(o);
                    if f.eval(&point) == o {
                        continue;
                    }
                    if want_repeat {
                        // Permute arguments so the repeated pair sits first.
                        let (i, j) = repeat.unwrap();
                        let mut map = vec![0usize; k + 1];
                        map[i] = 0;
                        map[j] = 1;
                        let mut next = 2;
                        for (p, slot) in map.iter_mut().enumerate().take(k) {
                            if p != i && p != j {
                                *slot = next;
                                next += 1;
                            }
                        }
                        map[k] = k;
                        let mut new_args = vec![0u8; k];
                        for (p, &q) in map.iter().enumerate().take(k) {
                            new_args[q] = a[p];
                        }
                        return Some((f.reindex(k + 1, &map), new_args, o));
                    }
                    return Some(((*f).clone(), a.clone(), o));
                }
            }
        }
        None
    };

    let (rule, found) = match opts.rule_override {
        Some(SumRule::Alternating) => (
            SumRule::Alternating,
            witness_scan(true).ok_or(WitnessError::OverrideUnavailable {
                rule: SumRule::Alternating,
            })?,
        ),
        Some(SumRule::Plain) => (
            SumRule::Plain,
            witness_scan(false).ok_or(WitnessError::OverrideUnavailable { rule: SumRule::Plain })?,
        ),
        None => match witness_scan(true) {
            Some(found) => (SumRule::Alternating, found),
            None => (
                SumRule::Plain,
                witness_scan(false).ok_or(WitnessError::NoCommutatorValue { rank: k })?,
            ),
        },
    };
    let (commutator, args, base) = found;
    let malcev = clone::find_malcev(alg, budget)?.ok_or(WitnessError::NoMalcev)?;
    Ok(WitnessSetup {
        alg: alg.clone(),
        malcev,
        alpha,
        gamma,
        degree: k,
        commutator,
        args,
        base,
        rule,
        t,
        lo,
        hi,
    })
}

impl WitnessSetup {
    /// The algebra the construction runs over.
    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.alg
    }

    /// The located minimal non-abelian congruence.
    pub fn alpha(&self) -> &Partition {
        &self.alpha
    }

    /// Its derived abelian congruence.
    pub fn gamma(&self) -> &Partition {
        &self.gamma
    }

    /// The degree `k`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The chosen rank-`k` commutator (arity `k+1`).
    pub fn commutator(&self) -> &FunctionTable {
        &self.commutator
    }

    /// The argument witnesses `a_1..a_k`.
    pub fn witness_args(&self) -> &[u8] {
        &self.args
    }

    /// The base point `o`.
    pub fn base(&self) -> u8 {
        self.base
    }

    /// The sum rule in force.
    pub fn rule(&self) -> SumRule {
        self.rule
    }

    /// The pulse spacing `t = 2|B|+1`.
    pub fn t(&self) -> i64 {
        self.t
    }

    /// The window bounds, inclusive.
    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    fn width(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    fn subset_count(&self) -> usize {
        1 << self.degree
    }

    /// The tuple with `a_l` at subsets containing `l` and `o` elsewhere.
    pub fn u_tuple(&self, l: usize) -> Vec<u8> {
        assert!((1..=self.degree).contains(&l));
        (0..self.subset_count())
            .map(|s| if s >> (l - 1) & 1 == 1 { self.args[l - 1] } else { self.base })
            .collect()
    }

    /// The all-`o` tuple.
    pub fn o_tuple(&self) -> Vec<u8> {
        vec![self.base; self.subset_count()]
    }

    fn from_tuples(&self, at: impl Fn(i64) -> Vec<u8>) -> WitnessElement {
        let subsets = self.subset_count();
        let mut data = Vec::with_capacity(self.width() * subsets);
        for i in self.lo..=self.hi {
            let tuple = at(i);
            assert_eq!(tuple.len(), subsets);
            data.extend_from_slice(&tuple);
        }
        WitnessElement {
            lo: self.lo,
            hi: self.hi,
            subsets,
            data: data.into_boxed_slice(),
        }
    }

    /// The constant element with value `a` everywhere.
    pub fn constant(&self, a: u8) -> WitnessElement {
        assert!((a as usize) < self.alg.size());
        self.from_tuples(|_| vec![a; self.subset_count()])
    }

    /// The range of `i` whose pulse support `{i, i+1, i+t+2, i+t+3}` fits
    /// the window, as an inclusive pair.
    pub fn pulse_range(&self) -> (i64, i64) {
        (self.lo, self.hi - self.t - 3)
    }

    /// The pulse element `d_i`: `u_1` at `i` and `i+t+3`, `u_2` at `i+1`
    /// and `i+t+2`, the all-`o` tuple elsewhere.
    pub fn d(&self, i: i64) -> Result<WitnessElement, WitnessError> {
        let (dlo, dhi) = self.pulse_range();
        if i < dlo || i > dhi {
            return Err(WitnessError::OutsideWindow { index: i });
        }
        let u1 = self.u_tuple(1);
        let u2 = if self.degree >= 2 { self.u_tuple(2) } else { self.u_tuple(1) };
        let o = self.o_tuple();
        Ok(self.from_tuples(|j| {
            if j == i || j == i + self.t + 3 {
                u1.clone()
            } else if j == i + 1 || j == i + self.t + 2 {
                u2.clone()
            } else {
                o.clone()
            }
        }))
    }

    /// The constant element repeating `u_l`, for `3 <= l <= k`.
    pub fn c_l(&self, l: usize) -> WitnessElement {
        assert!((3..=self.degree).contains(&l));
        let u = self.u_tuple(l);
        self.from_tuples(|_| u.clone())
    }

    /// Every generator with a stable label: all in-window pulses, the
    /// repeated `u_l` elements, and one constant per algebra element.
    pub fn generators(&self) -> Vec<(String, WitnessElement)> {
        let mut out = Vec::new();
        let (dlo, dhi) = self.pulse_range();
        for i in dlo..=dhi {
            out.push((format!("d[{i}]"), self.d(i).unwrap()));
        }
        for l in 3..=self.degree {
            out.push((format!("c[{l}]"), self.c_l(l)));
        }
        for a in 0..self.alg.size() as u8 {
            out.push((format!("const[{a}]"), self.constant(a)));
        }
        out
    }

    /// Applies a table coordinatewise over the whole window.
    pub fn apply(&self, table: &FunctionTable, args: &[&WitnessElement]) -> WitnessElement {
        assert_eq!(table.arity(), args.len());
        let subsets = self.subset_count();
        let width = self.width();
        for w in args {
            assert_eq!((w.lo, w.hi, w.subsets), (self.lo, self.hi, subsets));
        }
        let mut data = vec![0u8; width * subsets];
        let mut point = vec![0u8; args.len()];
        for (pos, slot) in data.iter_mut().enumerate() {
            for (p, w) in point.iter_mut().zip(args) {
                *p = w.data[pos];
            }
            *slot = table.eval(&point);
        }
        WitnessElement {
            lo: self.lo,
            hi: self.hi,
            subsets,
            data: data.into_boxed_slice(),
        }
    }

    fn add_base(&self, x: u8, y: u8) -> u8 {
        self.malcev.eval(&[x, self.base, y])
    }

    fn neg_base(&self, x: u8) -> u8 {
        self.malcev.eval(&[self.base, x, self.base])
    }

    /// The value tuple `e = f(u_1,..,u_k, o-tuple)`, computed pointwise and
    /// checked against its closed form: `f(a_1,..,a_k,o)` at the full
    /// subset, `o` elsewhere.
    pub fn e_tuple(&self) -> Vec<u8> {
        let k = self.degree;
        let e: Vec<u8> = (0..self.subset_count())
            .map(|s| {
                let mut point: Vec<u8> = (1..=k)
                    .map(|l| if s >> (l - 1) & 1 == 1 { self.args[l - 1] } else { self.base })
                    .collect();
                point.push(self.base);
                self.commutator.eval(&point)
            })
            .collect();
        let full = self.subset_count() - 1;
        let mut point = self.args.clone();
        point.push(self.base);
        let hit = self.commutator.eval(&point);
        for (s, &v) in e.iter().enumerate() {
            let expect = if s == full { hit } else { self.base };
            assert_eq!(v, expect, "absorption forces the e tuple shape");
        }
        e
    }

    /// The adjacent block `v_{i,i+1} = f(d_i, d_{i-t-2}, c_3..c_k, o-elem)`,
    /// shape-checked: `e` at `i`, the swapped value at `i+1`, all-`o`
    /// elsewhere.
    pub fn v_adjacent(&self, i: i64) -> Result<WitnessElement, WitnessError> {
        let a = self.d(i)?;
        let b = self.d(i - self.t - 2)?;
        let mut args: Vec<WitnessElement> = vec![a, b];
        for l in 3..=self.degree {
            args.push(self.c_l(l));
        }
        args.push(self.constant(self.base));
        let refs: Vec<&WitnessElement> = args.iter().collect();
        let v = self.apply(&self.commutator, &refs);

        let e = self.e_tuple();
        let swapped: Vec<u8> = {
            let k = self.degree;
            (0..self.subset_count())
                .map(|s| {
                    let mut point: Vec<u8> = (1..=k)
                        .map(|l| if s >> (l - 1) & 1 == 1 { self.args[l - 1] } else { self.base })
                        .collect();
                    if k >= 2 {
                        point.swap(0, 1);
                    }
                    point.push(self.base);
                    self.commutator.eval(&point)
                })
                .collect()
        };
        for j in self.lo..=self.hi {
            let expect: &[u8] = if j == i {
                &e
            } else if j == i + 1 {
                &swapped
            } else {
                &[]
            };
            if expect.is_empty() {
                assert!(
                    v.tuple_at(j).iter().all(|&x| x == self.base),
                    "adjacent block must vanish away from its two indices"
                );
            } else {
                assert_eq!(v.tuple_at(j), expect, "adjacent block shape at {j}");
            }
        }
        Ok(v)
    }

    /// The signed sum `v_{i,j}` over adjacent blocks, combined pointwise in
    /// the abelian group on `o`'s `γ`-class. Shape-checked: `e` at `i`, a
    /// rule-dependent sign of `e` at `j`, all-`o` elsewhere.
    pub fn v(&self, i: i64, j: i64) -> Result<WitnessElement, WitnessError> {
        if i >= j {
            return Err(WitnessError::BadSpan { i, j });
        }
        let mut total = self.v_adjacent(i)?;
        for l in i + 1..j {
            let block = self.v_adjacent(l)?;
            let negate = match self.rule {
                SumRule::Plain => false,
                SumRule::Alternating => (l - i).rem_euclid(2) == 1,
            };
            let mut data = total.data.clone();
            for (pos, slot) in data.iter_mut().enumerate() {
                let b = if negate {
                    self.neg_base(block.data[pos])
                } else {
                    block.data[pos]
                };
                *slot = self.add_base(*slot, b);
            }
            total = WitnessElement { data, ..total };
        }

        let e = self.e_tuple();
        let at_j: Vec<u8> = match self.rule {
            SumRule::Plain => e.iter().map(|&x| self.neg_base(x)).collect(),
            SumRule::Alternating => {
                if (j - i - 1).rem_euclid(2) == 0 {
                    e.clone()
                } else {
                    e.iter().map(|&x| self.neg_base(x)).collect()
                }
            }
        };
        for idx in self.lo..=self.hi {
            let got = total.tuple_at(idx);
            if idx == i {
                assert_eq!(got, &e[..], "signed sum shape at the left index");
            } else if idx == j {
                assert_eq!(got, &at_j[..], "signed sum shape at the right index");
            } else {
                assert!(
                    got.iter().all(|&x| x == self.base),
                    "signed sum must vanish between and beyond its indices"
                );
            }
        }
        Ok(total)
    }

    /// The ghost: `e` at index 0, all-`o` elsewhere.
    pub fn ghost(&self) -> Result<WitnessElement, WitnessError> {
        if self.lo > 0 || self.hi < 0 {
            return Err(WitnessError::OutsideWindow { index: 0 });
        }
        let e = self.e_tuple();
        let o = self.o_tuple();
        Ok(self.from_tuples(|i| if i == 0 { e.clone() } else { o.clone() }))
    }

    /// The signed double sum over all entries, in the abelian group on
    /// `o`'s `γ`-class: subset parity flips the inner sign, and under the
    /// alternating rule the index parity flips the outer sign. Returns
    /// `None` when some entry leaves the class, which makes the functional
    /// inapplicable.
    pub fn parity(&self, w: &WitnessElement) -> Option<u8> {
        assert_eq!((w.lo, w.hi, w.subsets), (self.lo, self.hi, self.subset_count()));
        if w.data.iter().any(|&x| !self.gamma.same(x, self.base)) {
            return None;
        }
        let mut total = self.base;
        for i in self.lo..=self.hi {
            let mut inner = self.base;
            for s in 0..self.subset_count() {
                let mut term = w.entry(i, s);
                if (s.count_ones() & 1) == 1 {
                    term = self.neg_base(term);
                }
                inner = self.add_base(inner, term);
            }
            if self.rule == SumRule::Alternating && i.rem_euclid(2) == 1 {
                inner = self.neg_base(inner);
            }
            total = self.add_base(total, inner);
        }
        Some(total)
    }
}

/// Outcome of the bounded-closure ghost check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhostReport {
    /// Depth that was asked for.
    pub depth_requested: usize,
    /// Deepest fully completed closure level.
    pub depth_completed: usize,
    /// Whether the element budget cut generation short.
    pub partial: bool,
    /// Element budget in force.
    pub element_budget: usize,
    /// Number of generators (including constants).
    pub generators: usize,
    /// Total elements generated.
    pub elements: usize,
    /// Elements with every entry in `o`'s class, where the parity
    /// functional applies.
    pub applicable: usize,
    /// Applicable elements whose parity is not `o`. The construction
    /// promises zero.
    pub violations: usize,
    /// Whether the ghost turned up in the generated fragment.
    pub ghost_found: bool,
    /// Whether the parity functional applies to the ghost.
    pub ghost_applicable: bool,
    /// Whether the ghost fails the parity condition, as it must.
    pub ghost_fails_parity: bool,
}

/// Closes the generators under the fundamental operations to the given
/// depth (or until the element budget runs out), then checks that the
/// ghost is absent, that every applicable element passes the parity
/// condition, and that the ghost itself fails it.
pub fn verify_ghost_absent(
    setup: &WitnessSetup,
    depth: usize,
    element_budget: usize,
) -> Result<GhostReport, WitnessError> {
    let ghost = setup.ghost()?;
    let generators = setup.generators();
    let mut all: Vec<WitnessElement> = Vec::new();
    let mut seen: HashSet<WitnessElement> = HashSet::new();
    let mut partial = false;
    'seed: for (_, g) in &generators {
        if all.len() >= element_budget {
            partial = true;
            break 'seed;
        }
        if seen.insert(g.clone()) {
            all.push(g.clone());
        }
    }
    let mut depth_completed = 0;
    let mut frontier_start = 0;
    'levels: for level in 1..=depth {
        if partial {
            break;
        }
        let snapshot = all.len();
        if frontier_start == snapshot {
            // Nothing new last level; the closure is complete.
            depth_completed = depth;
            break;
        }
        for op in setup.algebra().ops() {
            let m = op.table.arity();
            let mut pick = vec![0usize; m];
            loop {
                // Tuples with every argument old were handled at an earlier
                // level.
                if m == 0 || pick.iter().any(|&i| i >= frontier_start) {
                    let args: Vec<&WitnessElement> = pick.iter().map(|&i| &all[i]).collect();
                    let fresh = setup.apply(&op.table, &args);
                    if !seen.contains(&fresh) {
                        if all.len() >= element_budget {
                            partial = true;
                            break 'levels;
                        }
                        seen.insert(fresh.clone());
                        all.push(fresh);
                    }
                }
                let mut pos = 0;
                while pos < m {
                    pick[pos] += 1;
                    if pick[pos] < snapshot {
                        break;
                    }
                    pick[pos] = 0;
                    pos += 1;
                }
                if pos == m {
                    break;
                }
            }
        }
        depth_completed = level;
        frontier_start = snapshot;
    }
    let mut applicable = 0usize;
    let mut violations = 0usize;
    for w in &all {
        if let Some(p) = setup.parity(w) {
            applicable += 1;
            if p != setup.base() {
                violations += 1;
            }
        }
    }
    let ghost_parity = setup.parity(&ghost);
    Ok(GhostReport {
        depth_requested: depth,
        depth_completed,
        partial,
        element_budget,
        generators: generators.len(),
        elements: all.len(),
        applicable,
        violations,
        ghost_found: seen.contains(&ghost),
        ghost_applicable: ghost_parity.is_some(),
        ghost_fails_parity: ghost_parity.is_some_and(|p| p != setup.base()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition;
    use crate::samples;
    use crate::z4;

    const BUDGET: usize = 1 << 22;

    fn z4a2_setup() -> WitnessSetup {
        let alg = z4::z4_algebra(2);
        let one = Partition::one(4);
        setup_witness(&alg, &one, -13, 16, BUDGET).unwrap()
    }

    #[test]
    fn setup_finds_the_doubled_product_commutator() {
        let setup = z4a2_setup();
        assert_eq!(setup.degree(), 2);
        assert!(setup.alpha().is_one());
        assert_eq!(setup.gamma().blocks(), vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(setup.rule(), SumRule::Alternating);
        assert_eq!(setup.witness_args(), &[1, 1]);
        assert_eq!(setup.base(), 0);
        assert_eq!(setup.t(), 9);
        // The chosen commutator is x,y,z -> 2(x-z)(y-z)+z.
        let mut expect = vec![0u8; 64];
        for (code, v) in expect.iter_mut().enumerate() {
            let (x, y, z) = (code % 4, code / 4 % 4, code / 16);
            *v = ((2 * (x + 4 - z) * (y + 4 - z) + z) % 4) as u8;
        }
        assert_eq!(setup.commutator().values(), &expect[..]);
    }

    #[test]
    fn setup_rejects_abelian_targets() {
        let grp = samples::cyclic_group(4);
        let one = Partition::one(4);
        let err = setup_witness(&grp, &one, -13, 16, BUDGET).unwrap_err();
        assert!(matches!(err, WitnessError::NoTarget));
    }

    #[test]
    fn setup_rejects_short_windows() {
        let alg = z4::z4_algebra(2);
        let one = Partition::one(4);
        let err = setup_witness(&alg, &one, 0, 5, BUDGET).unwrap_err();
        match err {
            WitnessError::WindowTooShort { need, got } => {
                assert_eq!(need, 26);
                assert_eq!(got, 6);
            }
            other => panic!("expected window rejection, got {other:?}"),
        }
        // Exactly the minimum length is accepted.
        assert!(setup_witness(&alg, &one, -13, 12, BUDGET).is_ok());
    }

    #[test]
    fn generator_layouts() {
        let setup = z4a2_setup();
        assert_eq!(setup.u_tuple(1), vec![0, 1, 0, 1]);
        assert_eq!(setup.u_tuple(2), vec![0, 0, 1, 1]);
        assert_eq!(setup.o_tuple(), vec![0, 0, 0, 0]);

        let d0 = setup.d(0).unwrap();
        for i in -13..=16i64 {
            let expect: Vec<u8> = match i {
                0 | 12 => setup.u_tuple(1),
                1 | 11 => setup.u_tuple(2),
                _ => setup.o_tuple(),
            };
            assert_eq!(d0.tuple_at(i), &expect[..], "pulse entry at {i}");
        }
        assert_eq!(setup.pulse_range(), (-13, 4));
        assert!(setup.d(5).is_err());
        assert!(setup.d(-14).is_err());

        // Degree 2 has no repeated-u generators; 18 pulses + 4 constants.
        let gens = setup.generators();
        assert_eq!(gens.len(), 22);
        assert!(gens.iter().all(|(label, _)| !label.starts_with("c[")));
    }

    #[test]
    fn e_and_signed_sums() {
        let setup = z4a2_setup();
        assert_eq!(setup.e_tuple(), vec![0, 0, 0, 2]);

        // Adjacent blocks carry e at both indices under the alternating
        // rule with a repeated argument pair.
        let v01 = setup.v_adjacent(0).unwrap();
        assert_eq!(v01.tuple_at(0), &[0, 0, 0, 2]);
        assert_eq!(v01.tuple_at(1), &[0, 0, 0, 2]);

        // Signed sums collapse to the two endpoint values; in this algebra
        // the negated value coincides with e. The shape assertions run
        // inside v() for every pair.
        for i in -2..=3i64 {
            for j in i + 1..=4 {
                let v = setup.v(i, j).unwrap();
                assert_eq!(v.tuple_at(i), &[0, 0, 0, 2]);
                assert_eq!(v.tuple_at(j), &[0, 0, 0, 2]);
            }
        }
        assert!(setup.v(1, 1).is_err());
        assert!(setup.v(-3, 0).is_err(), "d(-14) support does not fit");
    }

    #[test]
    fn parity_values() {
        let setup = z4a2_setup();
        let o_elem = setup.constant(0);
        assert_eq!(setup.parity(&o_elem), Some(0));

        // Every signed sum is in the generated subuniverse, so its parity
        // vanishes.
        for j in 1..=4i64 {
            let v = setup.v(0, j).unwrap();
            assert_eq!(setup.parity(&v), Some(0));
        }

        let ghost = setup.ghost().unwrap();
        assert_eq!(setup.parity(&ghost), Some(2));

        // Entries outside the base class make the functional inapplicable.
        assert_eq!(setup.parity(&setup.constant(1)), None);
        // The even constant stays applicable and balances out.
        assert_eq!(setup.parity(&setup.constant(2)), Some(0));
    }

    #[test]
    fn parity_is_additive_on_applicable_elements() {
        let setup = z4a2_setup();
        let o_elem = setup.constant(setup.base());
        let samples: Vec<WitnessElement> = vec![
            setup.v(0, 1).unwrap(),
            setup.v(0, 2).unwrap(),
            setup.v(-1, 3).unwrap(),
            setup.ghost().unwrap(),
            setup.constant(0),
            setup.constant(2),
        ];
        for x in &samples {
            for y in &samples {
                let sum = setup.apply(&setup.malcev, &[x, &o_elem, y]);
                let expect = setup.add_base(
                    setup.parity(x).unwrap(),
                    setup.parity(y).unwrap(),
                );
                assert_eq!(setup.parity(&sum), Some(expect));
            }
        }
    }

    #[test]
    fn ghost_is_absent_at_depth_zero_and_one() {
        let setup = z4a2_setup();
        let report = verify_ghost_absent(&setup, 0, 1 << 20).unwrap();
        assert_eq!(report.generators, 22);
        assert_eq!(report.elements, 22);
        assert_eq!(report.depth_completed, 0);
        assert!(!report.partial);
        assert_eq!(report.violations, 0);
        assert!(!report.ghost_found);
        assert!(report.ghost_applicable);
        assert!(report.ghost_fails_parity);

        let report = verify_ghost_absent(&setup, 1, 1 << 20).unwrap();
        assert_eq!(report.depth_completed, 1);
        assert!(!report.partial);
        assert!(report.elements > 22);
        assert_eq!(report.violations, 0);
        assert!(!report.ghost_found);
    }

    #[test]
    fn tiny_budget_reports_partial() {
        let setup = z4a2_setup();
        let report = verify_ghost_absent(&setup, 2, 1).unwrap();
        assert!(report.partial);
        assert!(report.elements <= 1);
        assert_eq!(report.depth_completed, 0);
    }

    #[test]
    fn deeper_closure_on_the_minimum_window() {
        let alg = z4::z4_algebra(2);
        let one = Partition::one(4);
        let setup = setup_witness(&alg, &one, -13, 12, BUDGET).unwrap();
        let report = verify_ghost_absent(&setup, 2, 200_000).unwrap();
        assert_eq!(report.violations, 0);
        assert!(!report.ghost_found);
        assert!(report.ghost_fails_parity);
        assert!(report.depth_completed >= 1);
    }

    #[test]
    fn klein_group_is_rejected_for_lack_of_nonabelian_congruence() {
        let alg = samples::klein_four();
        let one = Partition::one(4);
        let err = setup_witness(&alg, &one, -13, 16, BUDGET).unwrap_err();
        assert!(matches!(err, WitnessError::NoTarget));
    }

    #[test]
    fn window_must_contain_the_origin_for_the_ghost() {
        let alg = z4::z4_algebra(2);
        let one = Partition::one(4);
        let setup = setup_witness(&alg, &one, 1, 30, BUDGET).unwrap();
        assert!(matches!(setup.ghost(), Err(WitnessError::OutsideWindow { index: 0 })));
        assert!(matches!(
            verify_ghost_absent(&setup, 0, 1000),
            Err(WitnessError::OutsideWindow { index: 0 })
        ));
    }

    #[test]
    fn forced_plain_rule_still_builds_consistent_sums() {
        let alg = z4::z4_algebra(2);
        let one = Partition::one(4);
        let setup = setup_witness_with(
            &alg,
            &one,
            -13,
            16,
            BUDGET,
            WitnessOptions {
                rule_override: Some(SumRule::Plain),
                ..WitnessOptions::default()
            },
        )
        .unwrap();
        assert_eq!(setup.rule(), SumRule::Plain);
        // Shape checks inside v() exercise the plain-rule sign pattern.
        for j in 1..=4i64 {
            let v = setup.v(0, j).unwrap();
            assert_eq!(setup.parity(&v), Some(0));
        }
    }

    #[test]
    fn s3_has_no_usable_target() {
        // The symmetric group is not nilpotent; its only non-abelian
        // congruence is not supernilpotent, so setup must refuse.
        let alg = samples::symmetric_group_3();
        let one = Partition::one(6);
        let err = setup_witness(&alg, &one, -15, 20, 6_000_000).unwrap_err();
        assert!(matches!(err, WitnessError::NoTarget));
    }

    #[test]
    fn partition_module_helpers_agree_with_setup() {
        let setup = z4a2_setup();
        let lattice = partition::congruence_lattice(setup.algebra());
        assert!(lattice.iter().any(|p| p == setup.gamma()));
    }
}
