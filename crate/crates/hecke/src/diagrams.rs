//! Young diagrams, their growth chains, and the spectrum of the fundamental
//! central invariant.
//!
//! A partition of n labels an irreducible representation of H_n(q). The
//! central invariant acts in it by the scalar
//!
//! ```text
//! V(g) = q * sum over boxes (i, j) of [j - i]_q
//! ```
//!
//! where `[m]_q` is the q-bracket and `j - i` is the content of the box.
//! At generic `q` this scalar determines the diagram; the classical `q = 1`
//! limit does not (the first collision appears at n = 6).

use crate::laurent::{eval_at, q_bracket, rint, LaurentPoly, Rational};
use num::BigInt;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

/// Errors for diagram-level queries.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    /// Classical eigenvalues are implemented for orders 2 and 3 only.
    #[error("unsupported classical order {0}")]
    UnsupportedOrder(usize),
    /// No diagram with the requested box count has the given spectrum value.
    #[error("no diagram of size {n} has the given eigenvalue")]
    NoSuchDiagram { n: usize },
}

/// An integer partition written with weakly decreasing positive parts.
///
/// The empty partition (of zero) is allowed; it arises as the decoded shape
/// of trivial spectra.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition, checking that parts are positive and weakly
    /// decreasing.
    pub fn new(parts: Vec<usize>) -> Self {
        for w in parts.windows(2) {
            assert!(w[0] >= w[1], "parts must be weakly decreasing");
        }
        assert!(parts.iter().all(|&p| p > 0), "parts must be positive");
        Partition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Total number of boxes.
    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.parts.len()
    }

    /// Length of the given (0-based) row, zero when the row is absent.
    pub fn row(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// The boxes `(row, col)` of the diagram, 1-based, in row-major order.
    pub fn boxes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &len)| (1..=len).map(move |j| (i + 1, j)))
    }

    /// Removes one box from row `i` (0-based), dropping the row if it empties.
    fn without_box_in_row(&self, i: usize) -> Partition {
        let mut parts = self.parts.clone();
        parts[i] -= 1;
        if parts[i] == 0 {
            parts.remove(i);
        }
        Partition { parts }
    }

    /// Rows whose last box is removable (corners), as 0-based row indices.
    pub fn corner_rows(&self) -> Vec<usize> {
        (0..self.parts.len())
            .filter(|&i| i + 1 == self.parts.len() || self.parts[i] > self.parts[i + 1])
            .collect()
    }

    /// The content `col - row` of the corner box in the given 0-based row.
    pub fn corner_content(&self, i: usize) -> i64 {
        self.parts[i] as i64 - 1 - i as i64
    }
}

impl fmt::Display for Partition {
    /// Canonical text form, e.g. `[4,1,1]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition{self}")
    }
}

/// Error for the partition text grammar.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid partition text: {0}")]
pub struct ParsePartitionError(String);

impl FromStr for Partition {
    type Err = ParsePartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| ParsePartitionError(format!("{t:?} is not bracketed")))?;
        let mut parts = Vec::new();
        if !inner.trim().is_empty() {
            for piece in inner.split(',') {
                let p: usize = piece
                    .trim()
                    .parse()
                    .map_err(|_| ParsePartitionError(format!("bad part {piece:?}")))?;
                if p == 0 {
                    return Err(ParsePartitionError("zero part".into()));
                }
                parts.push(p);
            }
        }
        for w in parts.windows(2) {
            if w[0] < w[1] {
                return Err(ParsePartitionError(format!("parts not decreasing in {t:?}")));
            }
        }
        Ok(Partition { parts })
    }
}

/// All partitions of `n >= 1` in reverse lexicographic order, `[n]` first
/// and `[1, 1, ..., 1]` last.
pub fn partitions_of(n: usize) -> Vec<Partition> {
    assert!(n >= 1, "partitions_of requires n >= 1");
    fn rec(remaining: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { parts: prefix.clone() });
            return;
        }
        let top = remaining.min(max);
        for first in (1..=top).rev() {
            prefix.push(first);
            rec(remaining - first, first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// The multiset of box contents `col - row`, in row-major order.
pub fn contents(g: &Partition) -> Vec<i64> {
    g.boxes().map(|(i, j)| j as i64 - i as i64).collect()
}

/// Eigenvalue of the classical (q = 1) central element of order `p` on the
/// symmetric group side: the sum of contents for `p = 2`, and the sum of
/// squared contents minus `n(n-1)/2` for `p = 3`.
pub fn classical_eigenvalue(g: &Partition, p: usize) -> Result<Rational, DiagramError> {
    let cs = contents(g);
    match p {
        2 => Ok(rint(cs.iter().sum())),
        3 => {
            let sq: i64 = cs.iter().map(|c| c * c).sum();
            let n = g.n() as i64;
            Ok(rint(sq) - rint(n * (n - 1)) / rint(2))
        }
        other => Err(DiagramError::UnsupportedOrder(other)),
    }
}

/// Eigenvalue of the fundamental central invariant: `q * sum [content]_q`
/// over the boxes of the diagram.
pub fn fundamental_eigenvalue(g: &Partition) -> LaurentPoly {
    let mut acc = LaurentPoly::zero();
    for c in contents(g) {
        acc = acc + q_bracket(c).shift(1);
    }
    acc
}

/// Cumulative counts of box contents: `pi[k]` counts boxes of content at
/// least `k > 0` and `nu[k]` counts boxes of content at most `k < 0`.
/// Only nonzero counts are stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ContentProfile {
    pi: BTreeMap<i64, usize>,
    nu: BTreeMap<i64, usize>,
}

impl ContentProfile {
    /// Count of boxes with content `>= k`, for `k >= 1`.
    pub fn pi(&self, k: i64) -> usize {
        self.pi.get(&k).copied().unwrap_or(0)
    }

    /// Count of boxes with content `<= k`, for `k <= -1`.
    pub fn nu(&self, k: i64) -> usize {
        self.nu.get(&k).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty() && self.nu.is_empty()
    }

    /// Reassembles the fundamental eigenvalue from the profile:
    /// `sum q^k pi_k - sum q^(k+1) nu_k`.
    pub fn to_eigenvalue(&self) -> LaurentPoly {
        let mut acc = LaurentPoly::zero();
        for (&k, &count) in &self.pi {
            acc = acc + LaurentPoly::monomial(k, rint(count as i64));
        }
        for (&k, &count) in &self.nu {
            acc = acc - LaurentPoly::monomial(k + 1, rint(count as i64));
        }
        acc
    }
}

/// The content profile of a diagram.
pub fn content_profile(g: &Partition) -> ContentProfile {
    let cs = contents(g);
    let mut profile = ContentProfile::default();
    let max = cs.iter().max().copied().unwrap_or(0);
    let min = cs.iter().min().copied().unwrap_or(0);
    for k in 1..=max {
        let count = cs.iter().filter(|&&c| c >= k).count();
        if count > 0 {
            profile.pi.insert(k, count);
        }
    }
    for k in min..=-1 {
        let count = cs.iter().filter(|&&c| c <= k).count();
        if count > 0 {
            profile.nu.insert(k, count);
        }
    }
    profile
}

/// Recovers the unique diagram with `n` boxes whose fundamental eigenvalue
/// equals `v`, reading the cumulative content counts off the coefficients
/// of `v` and validating the result by recomputation.
pub fn reconstruct_from_eigenvalue(v: &LaurentPoly, n: usize) -> Result<Partition, DiagramError> {
    let fail = || DiagramError::NoSuchDiagram { n };
    let to_count = |c: Rational| -> Result<i64, DiagramError> {
        if !c.is_integer() {
            return Err(fail());
        }
        let i: BigInt = c.to_integer();
        i64::try_from(i).map_err(|_| fail())
    };
    // Coefficient of q^k is pi_k for k >= 1 and -nu_(k-1) for k <= 0.
    let mut diag_counts: BTreeMap<i64, i64> = BTreeMap::new();
    let mut prev = 0i64;
    if let Some(top) = v.max_exp() {
        for k in (1..=top).rev() {
            let pi_k = to_count(v.coeff(k))?;
            // pi is a tail sum, so it must grow weakly as k decreases.
            let d = pi_k - prev;
            if d < 0 {
                return Err(fail());
            }
            if d > 0 {
                diag_counts.insert(k, d);
            }
            prev = pi_k;
        }
    }
    prev = 0;
    if let Some(bottom) = v.min_exp() {
        for k in bottom - 1..=-1 {
            let nu_k = to_count(-v.coeff(k + 1))?;
            let d = nu_k - prev;
            if d < 0 {
                return Err(fail());
            }
            if d > 0 {
                diag_counts.insert(k, d);
            }
            prev = nu_k;
        }
    }
    let off_diagonal: i64 = diag_counts.values().sum();
    let main = n as i64 - off_diagonal;
    if main <= 0 && !(n == 0 && main == 0) {
        return Err(fail());
    }
    if main > 0 {
        diag_counts.insert(0, main);
    }
    // Rebuild rows: box (i, j) lies on diagonal j - i and is the min(i, j)-th
    // box along it, so row i extends while the diagonal count allows.
    let mut parts = Vec::new();
    for i in 1.. {
        let mut len = 0usize;
        for j in 1.. {
            let k = j as i64 - i as i64;
            let depth = j.min(i) as i64;
            if diag_counts.get(&k).copied().unwrap_or(0) >= depth {
                len = j;
            } else {
                break;
            }
        }
        if len == 0 {
            break;
        }
        parts.push(len);
    }
    if parts.iter().sum::<usize>() != n {
        return Err(fail());
    }
    for w in parts.windows(2) {
        if w[0] < w[1] {
            return Err(fail());
        }
    }
    let g = Partition { parts };
    if &fundamental_eigenvalue(&g) != v {
        return Err(fail());
    }
    Ok(g)
}

/// A maximal chain of diagrams from a single box up to a full shape, with
/// the box added at each step.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct DiagramChain {
    shapes: Vec<Partition>,
    added_boxes: Vec<(usize, usize)>,
}

impl DiagramChain {
    /// The intermediate shapes; `shapes()[k]` has `k + 1` boxes.
    pub fn shapes(&self) -> &[Partition] {
        &self.shapes
    }

    /// The 1-based `(row, col)` coordinates added at each step.
    pub fn added_boxes(&self) -> &[(usize, usize)] {
        &self.added_boxes
    }

    /// The box added at step `i` (so `added_box(1) == (1, 1)`).
    pub fn added_box(&self, i: usize) -> (usize, usize) {
        self.added_boxes[i - 1]
    }

    /// Number of boxes in the final shape.
    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn final_shape(&self) -> &Partition {
        self.shapes.last().expect("chains are nonempty")
    }
}

/// All maximal chains ending at `g`, in a deterministic order: chains whose
/// final box sits in a lower row come first, recursively at each size. For
/// two-chain shapes this places the row-first chain at index 0.
pub fn chains_of(g: &Partition) -> Vec<DiagramChain> {
    if g.n() == 0 {
        return vec![DiagramChain { shapes: Vec::new(), added_boxes: Vec::new() }];
    }
    if g.n() == 1 {
        return vec![DiagramChain {
            shapes: vec![g.clone()],
            added_boxes: vec![(1, 1)],
        }];
    }
    let mut out = Vec::new();
    for i in g.corner_rows().into_iter().rev() {
        let smaller = g.without_box_in_row(i);
        let added = (i + 1, g.parts[i]);
        for mut chain in chains_of(&smaller) {
            chain.shapes.push(g.clone());
            chain.added_boxes.push(added);
            out.push(chain);
        }
    }
    out
}

fn dimension_table() -> &'static Mutex<HashMap<Partition, u64>> {
    static TABLE: OnceLock<Mutex<HashMap<Partition, u64>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Number of maximal chains ending at `g` (the dimension of the associated
/// irreducible representation), memoized globally.
pub fn dimension(g: &Partition) -> u64 {
    if g.n() <= 1 {
        return 1;
    }
    if let Some(&d) = dimension_table().lock().unwrap().get(g) {
        return d;
    }
    let d = g
        .corner_rows()
        .into_iter()
        .map(|i| dimension(&g.without_box_in_row(i)))
        .sum();
    dimension_table().lock().unwrap().insert(g.clone(), d);
    d
}

/// The q-content `q [col - row]_q` of the box a chain adds at step `i`
/// (valid for `2 <= i <= n`; step 1 always adds the corner box of content
/// zero, whose q-content vanishes).
pub fn q_content_added(chain: &DiagramChain, i: usize) -> LaurentPoly {
    assert!((2..=chain.len()).contains(&i), "step index out of range");
    let (row, col) = chain.added_box(i);
    q_bracket(col as i64 - row as i64).shift(1)
}

/// Expands the scaled invariant `((q-1)/q) V(g)` as an exact series in `d`
/// with `q = e^d`.
///
/// The linear coefficient is the classical order-2 eigenvalue and twice the
/// quadratic coefficient is the order-3 eigenvalue plus `n(n-1)/2`.
pub fn scaled_invariant_series(g: &Partition, order: usize) -> crate::laurent::DeltaSeries {
    let v = fundamental_eigenvalue(g);
    let scaled = &v - &v.shift(-1);
    crate::laurent::to_delta_series(&scaled, order)
}

/// Checks whether the values of `fundamental_eigenvalue` at `q = 1` are
/// pairwise distinct for the partitions of `n`, returning the colliding
/// pairs (as index pairs into `partitions_of(n)`).
pub fn classical_collisions(n: usize) -> Vec<(Partition, Partition)> {
    let parts = partitions_of(n);
    let values: Vec<Rational> = parts
        .iter()
        .map(|g| eval_at(&fundamental_eigenvalue(g), &rint(1)).unwrap())
        .collect();
    let mut out = Vec::new();
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if values[i] == values[j] {
                out.push((parts[i].clone(), parts[j].clone()));
            }
        }
    }
    out
}
