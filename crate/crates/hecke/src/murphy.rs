//! Traces of products of Murphy operators.
//!
//! The Murphy operators L_2, ..., L_n form a commuting family that is
//! simultaneously diagonal in the chain basis of an irreducible
//! representation: L_p multiplies a chain by the q-content of the box the
//! chain adds at step p. Traces of their products therefore reduce to sums
//! over growth chains, which this module evaluates by a branching recursion
//! on diagrams instead of enumerating chains one by one.
//!
//! Products are restricted to non-consecutive index lists (gaps of at least
//! two): those are exactly the products the character pipeline needs, and
//! the restriction keeps the recursion over corner boxes valid.

use crate::diagrams::{dimension, Partition};
use crate::laurent::{q_bracket, rint, LaurentPoly};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

/// Errors for Murphy trace queries.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MurphyError {
    /// An operator index lies outside `2..=n`.
    #[error("Murphy index {index} out of range for {n} boxes")]
    IndexOutOfRange { index: usize, n: usize },
    /// Two requested indices are equal or adjacent.
    #[error("Murphy indices must differ by at least two")]
    ConsecutiveIndices,
}

/// A strictly increasing list of Murphy operator indices with gaps of at
/// least two, each at least 2. The empty list stands for the identity.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MurphyIndexList {
    indices: Vec<usize>,
}

impl MurphyIndexList {
    /// Canonicalizes (sorts) the given indices and validates the spacing
    /// rules. The operators commute, so order does not matter on input.
    pub fn new(mut indices: Vec<usize>) -> Result<Self, MurphyError> {
        indices.sort_unstable();
        for &i in &indices {
            if i < 2 {
                return Err(MurphyError::IndexOutOfRange { index: i, n: 0 });
            }
        }
        for w in indices.windows(2) {
            if w[1] - w[0] < 2 {
                return Err(MurphyError::ConsecutiveIndices);
            }
        }
        Ok(MurphyIndexList { indices })
    }

    pub fn empty() -> Self {
        MurphyIndexList { indices: Vec::new() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn max(&self) -> Option<usize> {
        self.indices.last().copied()
    }
}

impl fmt::Display for MurphyIndexList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L(")?;
        for (i, x) in self.indices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Memoized table of Murphy product traces, keyed by diagram and index list.
///
/// Inserts are idempotent (every computation of the same key yields the same
/// polynomial), so the table can be shared freely across threads.
pub struct TraceTable {
    entries: Mutex<HashMap<(Partition, Vec<usize>), LaurentPoly>>,
}

impl TraceTable {
    pub fn new() -> Self {
        TraceTable { entries: Mutex::new(HashMap::new()) }
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Trace of the product of Murphy operators over the irreducible
    /// representation labeled by `g`.
    pub fn trace(&self, g: &Partition, idx: &MurphyIndexList) -> Result<LaurentPoly, MurphyError> {
        let n = g.n();
        if let Some(&max) = idx.indices().last() {
            if max > n {
                return Err(MurphyError::IndexOutOfRange { index: max, n });
            }
        }
        Ok(self.trace_inner(g, idx.indices()))
    }

    fn trace_inner(&self, g: &Partition, idx: &[usize]) -> LaurentPoly {
        // Base case: the empty product is the identity and its trace is the
        // number of chains.
        if idx.is_empty() {
            return LaurentPoly::constant(rint(dimension(g) as i64));
        }
        let key = (g.clone(), idx.to_vec());
        if let Some(v) = self.entries.lock().unwrap().get(&key) {
            return v.clone();
        }
        let n = g.n();
        let max = *idx.last().unwrap();
        let mut acc = LaurentPoly::zero();
        if max < n {
            // Every chain factors through a corner removal at the top step,
            // which does not touch the requested operators.
            for i in g.corner_rows() {
                let smaller = without_row_box(g, i);
                acc = acc + self.trace_inner(&smaller, idx);
            }
        } else {
            // The top operator is diagonal with eigenvalue given by the
            // corner the chain fills last.
            for i in g.corner_rows() {
                let smaller = without_row_box(g, i);
                let qc = q_bracket(g.corner_content(i)).shift(1);
                acc = acc + qc * self.trace_inner(&smaller, &idx[..idx.len() - 1]);
            }
        }
        self.entries
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| acc.clone());
        acc
    }
}

impl Default for TraceTable {
    fn default() -> Self {
        Self::new()
    }
}

fn without_row_box(g: &Partition, row: usize) -> Partition {
    let mut parts = g.parts().to_vec();
    parts[row] -= 1;
    if parts[row] == 0 {
        parts.remove(row);
    }
    Partition::new(parts)
}

fn shared_table() -> &'static TraceTable {
    static TABLE: OnceLock<TraceTable> = OnceLock::new();
    TABLE.get_or_init(TraceTable::new)
}

/// Trace of the single Murphy operator L_i over the representation labeled
/// by `g`, using the shared memo table.
pub fn murphy_trace(g: &Partition, i: usize) -> Result<LaurentPoly, MurphyError> {
    if i < 2 || i > g.n() {
        return Err(MurphyError::IndexOutOfRange { index: i, n: g.n() });
    }
    murphy_product_trace(g, &MurphyIndexList::new(vec![i]).expect("single index"))
}

/// Trace of a product of Murphy operators over the representation labeled
/// by `g`, using the shared memo table.
pub fn murphy_product_trace(g: &Partition, idx: &MurphyIndexList) -> Result<LaurentPoly, MurphyError> {
    shared_table().trace(g, idx)
}
