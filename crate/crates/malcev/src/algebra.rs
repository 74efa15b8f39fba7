//! Finite algebras as finite sets `0..size` with named finitary operations.
//!
//! Every finitary object in this crate (operation tables, members of powers,
//! relation membership bitsets) is addressed through one tuple encoding:
//! a tuple `(a_0, ..., a_{n-1})` over `0..s` has code `sum a_i * s^i`, so the
//! first coordinate is the least significant digit. [`FunctionTable`] stores
//! the values of a function `A^n -> A` in that order.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Mixed-radix code of a tuple over a base set, first coordinate least
/// significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TupleCode {
    /// Number of coordinates.
    pub arity: usize,
    /// The code, in `0..size^arity`.
    pub code: usize,
}

impl TupleCode {
    /// Encodes a tuple over `0..size`.
    ///
    /// # Panics
    ///
    /// Panics if a coordinate is out of range or `size^arity` overflows.
    pub fn encode(size: usize, tuple: &[u8]) -> TupleCode {
        TupleCode {
            arity: tuple.len(),
            code: encode(size, tuple),
        }
    }

    /// Decodes back into an explicit tuple.
    pub fn decode(&self, size: usize) -> Vec<u8> {
        let mut out = vec![0u8; self.arity];
        decode_into(size, self.code, &mut out);
        out
    }
}

/// Encodes a tuple as a bare `usize` code. Hot paths use this directly.
pub(crate) fn encode(size: usize, tuple: &[u8]) -> usize {
    let mut code = 0usize;
    for &a in tuple.iter().rev() {
        debug_assert!((a as usize) < size);
        code = code * size + a as usize;
    }
    code
}

/// Decodes a code into a preallocated buffer of the desired arity.
pub(crate) fn decode_into(size: usize, mut code: usize, out: &mut [u8]) {
    for slot in out.iter_mut() {
        *slot = (code % size) as u8;
        code /= size;
    }
    debug_assert_eq!(code, 0);
}

/// `size^arity` with overflow checking.
pub(crate) fn power_len(size: usize, arity: usize) -> Option<usize> {
    let mut n = 1usize;
    for _ in 0..arity {
        n = n.checked_mul(size)?;
    }
    Some(n)
}

/// A total function `A^arity -> A` on `A = {0..size}`, stored as a flat
/// table of `size^arity` values in tuple-code order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunctionTable {
    size: usize,
    arity: usize,
    values: Vec<u8>,
}

impl FunctionTable {
    /// Wraps a flat value table, validating its length and value range.
    pub fn new(size: usize, arity: usize, values: Vec<u8>) -> Result<FunctionTable, AlgebraError> {
        if size == 0 || size > 255 {
            return Err(AlgebraError::BadSize { size });
        }
        let expect = power_len(size, arity).ok_or(AlgebraError::TooLarge { size, arity })?;
        if values.len() != expect {
            return Err(AlgebraError::TableLength {
                arity,
                expected: expect,
                got: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|&v| v as usize >= size) {
            return Err(AlgebraError::ValueRange {
                index: pos,
                value: values[pos],
                size,
            });
        }
        Ok(FunctionTable { size, arity, values })
    }

    /// The `i`-th projection of the given arity.
    pub fn projection(size: usize, arity: usize, i: usize) -> FunctionTable {
        assert!(i < arity, "projection index {i} out of range for arity {arity}");
        let n = power_len(size, arity).expect("table too large");
        let mut values = vec![0u8; n];
        let mut buf = vec![0u8; arity];
        for (code, v) in values.iter_mut().enumerate() {
            decode_into(size, code, &mut buf);
            *v = buf[i];
        }
        FunctionTable { size, arity, values }
    }

    /// The constant function of the given arity with the given value.
    pub fn constant(size: usize, arity: usize, value: u8) -> FunctionTable {
        assert!((value as usize) < size);
        let n = power_len(size, arity).expect("table too large");
        FunctionTable {
            size,
            arity,
            values: vec![value; n],
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

    /// The flat value table in tuple-code order.
    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Evaluates at an explicit argument tuple.
    pub fn eval(&self, args: &[u8]) -> u8 {
        debug_assert_eq!(args.len(), self.arity);
        self.values[encode(self.size, args)]
    }

    /// Evaluates at an argument tuple given by its code.
    #[inline]
    pub fn eval_code(&self, code: usize) -> u8 {
        self.values[code]
    }

    /// Composes `self(g_0(x), ..., g_{m-1}(x))`. All `g_i` must share one
    /// arity, which becomes the arity of the result.
    pub fn compose(&self, args: &[&FunctionTable]) -> FunctionTable {
        assert_eq!(args.len(), self.arity, "composition arity mismatch");
        let inner_arity = args.first().map_or(0, |g| g.arity);
        assert!(args.iter().all(|g| g.arity == inner_arity && g.size == self.size));
        let n = power_len(self.size, inner_arity).expect("table too large");
        let mut values = vec![0u8; n];
        let mut point = vec![0u8; self.arity];
        for (code, v) in values.iter_mut().enumerate() {
            for (slot, g) in point.iter_mut().zip(args) {
                *slot = g.values[code];
            }
            *v = self.values[encode(self.size, &point)];
        }
        FunctionTable {
            size: self.size,
            arity: inner_arity,
            values,
        }
    }

    /// Reindexes arguments: the result `r` of arity `new_arity` satisfies
    /// `r(y) = self(y[map[0]], ..., y[map[arity-1]])`. Covers argument
    /// permutation, identification of arguments, and padding with unused
    /// arguments.
    pub fn reindex(&self, new_arity: usize, map: &[usize]) -> FunctionTable {
        assert_eq!(map.len(), self.arity);
        assert!(map.iter().all(|&j| j < new_arity));
        let n = power_len(self.size, new_arity).expect("table too large");
        let mut values = vec![0u8; n];
        let mut point = vec![0u8; new_arity];
        let mut inner = vec![0u8; self.arity];
        for (code, v) in values.iter_mut().enumerate() {
            decode_into(self.size, code, &mut point);
            for (slot, &j) in inner.iter_mut().zip(map) {
                *slot = point[j];
            }
            *v = self.values[encode(self.size, &inner)];
        }
        FunctionTable {
            size: self.size,
            arity: new_arity,
            values,
        }
    }

    /// Pointwise combination: applies a binary-or-wider outer table to
    /// matching entries of several tables of one common arity.
    pub fn pointwise(outer: &FunctionTable, args: &[&FunctionTable]) -> FunctionTable {
        assert_eq!(args.len(), outer.arity);
        let first = args.first().expect("pointwise needs at least one table");
        assert!(args.iter().all(|t| t.arity == first.arity && t.size == outer.size));
        let mut values = vec![0u8; first.values.len()];
        let mut point = vec![0u8; outer.arity];
        for (code, v) in values.iter_mut().enumerate() {
            for (slot, t) in point.iter_mut().zip(args) {
                *slot = t.values[code];
            }
            *v = outer.values[encode(outer.size, &point)];
        }
        FunctionTable {
            size: outer.size,
            arity: first.arity,
            values,
        }
    }
}

impl fmt::Display for FunctionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-ary/{}: [", self.arity, self.size)?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// A named fundamental operation of an algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    /// Name used in files and reports.
    pub name: String,
    /// The operation's value table.
    pub table: FunctionTable,
}

/// A finite algebra: the base set `0..size` with a list of named operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    size: usize,
    ops: Vec<Operation>,
}

impl FiniteAlgebra {
    /// Builds an algebra from named operations over a common base set.
    pub fn new(size: usize, ops: Vec<Operation>) -> Result<FiniteAlgebra, AlgebraError> {
        if size == 0 || size > 255 {
            return Err(AlgebraError::BadSize { size });
        }
        for op in &ops {
            if op.table.size() != size {
                return Err(AlgebraError::SizeMismatch {
                    name: op.name.clone(),
                    op_size: op.table.size(),
                    size,
                });
            }
            if op.table.arity() == 0 {
                return Err(AlgebraError::NullaryOp { name: op.name.clone() });
            }
        }
        for (i, op) in ops.iter().enumerate() {
            if ops[..i].iter().any(|o| o.name == op.name) {
                return Err(AlgebraError::DuplicateName { name: op.name.clone() });
            }
        }
        Ok(FiniteAlgebra { size, ops })
    }

    /// Base set size.
    pub fn size(&self) -> usize {
        self.size
    }

    /// The operations, in declaration order.
    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    /// Looks an operation up by name.
    pub fn op(&self, name: &str) -> Option<&Operation> {
        self.ops.iter().find(|o| o.name == name)
    }

    /// Largest operation arity (0 if there are no operations).
    pub fn max_arity(&self) -> usize {
        self.ops.iter().map(|o| o.table.arity()).max().unwrap_or(0)
    }

    /// Serializes into the JSON file format understood by [`load_algebra`].
    pub fn to_json(&self) -> String {
        let file = AlgebraFile {
            size: self.size,
            ops: self
                .ops
                .iter()
                .map(|o| OpFile {
                    name: o.name.clone(),
                    arity: o.table.arity(),
                    table: o.table.values().to_vec(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("algebra serialization cannot fail")
    }
}

/// Applies an operation table coordinatewise to tuples of a power.
///
/// `args` holds `arity` tuples of one common length `n`; the result is the
/// length-`n` tuple whose `j`-th entry is the operation applied to the `j`-th
/// entries of the arguments.
pub fn apply_pointwise(op: &FunctionTable, args: &[&[u8]]) -> Vec<u8> {
    assert_eq!(args.len(), op.arity(), "pointwise arity mismatch");
    let n = args.first().map_or(0, |t| t.len());
    assert!(args.iter().all(|t| t.len() == n), "pointwise length mismatch");
    let mut out = vec![0u8; n];
    let mut point = vec![0u8; op.arity()];
    for (j, slot) in out.iter_mut().enumerate() {
        for (p, t) in point.iter_mut().zip(args) {
            *p = t[j];
        }
        *slot = op.eval(&point);
    }
    out
}

/// Errors arising while building or loading an algebra.
#[derive(Debug, thiserror::Error)]
pub enum AlgebraError {
    /// Base set size outside `1..=255`.
    #[error("unsupported base set size {size} (must be 1..=255)")]
    BadSize {
        /// Rejected size.
        size: usize,
    },
    /// `size^arity` does not fit in memory addressing.
    #[error("table of arity {arity} over {size} elements is too large")]
    TooLarge {
        /// Base set size.
        size: usize,
        /// Requested arity.
        arity: usize,
    },
    /// Flat table has the wrong number of entries.
    #[error("table for arity {arity} has {got} entries, expected {expected}")]
    TableLength {
        /// Declared arity.
        arity: usize,
        /// Entries the arity calls for.
        expected: usize,
        /// Entries actually present.
        got: usize,
    },
    /// A table entry is not an element of the base set.
    #[error("table entry {value} at index {index} is outside 0..{size}")]
    ValueRange {
        /// Flat index of the offending entry.
        index: usize,
        /// The entry.
        value: u8,
        /// Base set size.
        size: usize,
    },
    /// Operation declared over a different base set than the algebra.
    #[error("operation {name} is over {op_size} elements, algebra has {size}")]
    SizeMismatch {
        /// Operation name.
        name: String,
        /// Size the table was built with.
        op_size: usize,
        /// Size of the algebra.
        size: usize,
    },
    /// Nullary operations are not supported; use a constant unary instead.
    #[error("operation {name} is nullary; encode constants as unary operations")]
    NullaryOp {
        /// Operation name.
        name: String,
    },
    /// Two operations share a name.
    #[error("duplicate operation name {name}")]
    DuplicateName {
        /// The repeated name.
        name: String,
    },
    /// Underlying JSON was malformed.
    #[error("malformed algebra file: {0}")]
    Parse(#[from] serde_json::Error),
    /// File could not be read.
    #[error("cannot read algebra file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
struct AlgebraFile {
    size: usize,
    ops: Vec<OpFile>,
}

#[derive(Serialize, Deserialize)]
struct OpFile {
    name: String,
    arity: usize,
    table: Vec<u8>,
}

/// Loads an algebra from a JSON file of the form
/// `{"size": 4, "ops": [{"name": "plus", "arity": 2, "table": [...]}]}`
/// with flat tables in tuple-code order (first argument least significant).
pub fn load_algebra(path: &Path) -> Result<FiniteAlgebra, AlgebraError> {
    let text = std::fs::read_to_string(path)?;
    load_algebra_str(&text)
}

/// Parses an algebra from JSON text; see [`load_algebra`] for the format.
pub fn load_algebra_str(text: &str) -> Result<FiniteAlgebra, AlgebraError> {
    let file: AlgebraFile = serde_json::from_str(text)?;
    let mut ops = Vec::with_capacity(file.ops.len());
    for op in file.ops {
        if op.arity == 0 {
            return Err(AlgebraError::NullaryOp { name: op.name });
        }
        let table = FunctionTable::new(file.size, op.arity, op.table)?;
        ops.push(Operation { name: op.name, table });
    }
    FiniteAlgebra::new(file.size, ops)
}
