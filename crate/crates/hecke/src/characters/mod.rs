//! Irreducible characters of the Hecke algebra on arbitrary words.
//!
//! The generators of a conjugacy class are encoded as [`GWord`]s, products
//! of the standard generators `g_i`. Every word can be reduced, through
//! trace-preserving rewriting, to a linear combination of traces of Murphy
//! operator products, which the recursive trace tables in [`crate::murphy`]
//! evaluate directly. This module exposes the closed-form conversion
//! formulas for single cycles, the expansion rules used by the rewriting
//! engine, and the engine itself via [`class_character`],
//! [`character_table`] and [`reduce_word_trace`].

mod engine;

pub use engine::{
    character_table, character_table_seq, class_character, reduce_word_trace, CharacterTable,
};

#[doc(hidden)]
pub use engine::stats;

use std::fmt;

use num::BigInt;

use crate::diagrams::{partitions_of, Partition};
use crate::laurent::{
    exact_div, f_coeff, LaurentError, LaurentPoly, Rational, RationalFunction,
};
use crate::murphy::{murphy_product_trace, murphy_trace, MurphyIndexList, MurphyError};

/// Errors arising while reducing words or assembling character data.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CharactersError {
    /// A word or class label does not match the ambient number of strands.
    #[error("object of size {found} used where size {expected} was required")]
    SizeMismatch { expected: usize, found: usize },
    /// Rewriting failed to bring a word into standard form within the
    /// exploration budget.
    #[error("word could not be reduced to standard form")]
    UnreducibleWord,
    /// Two central eigenvalues coincide, so no separating polynomial exists.
    #[error("central eigenvalues are not pairwise distinct")]
    DegenerateEigenvalues,
    /// An underlying Murphy trace computation failed.
    #[error(transparent)]
    Murphy(#[from] MurphyError),
    /// An underlying Laurent polynomial computation failed.
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// A word in the generators `g_1, ..., g_{n-1}`.
///
/// Letters are stored as the generator subscripts. The word `(g_1 g_3)` has
/// letters `[1, 3]`. Words are not reduced on construction; reduction is the
/// job of [`reduce_word_trace`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GWord {
    letters: Vec<usize>,
}

impl GWord {
    /// Creates a word from generator subscripts. Letters must be positive;
    /// whether they fit a given strand count is checked at evaluation time.
    pub fn new(letters: Vec<usize>) -> Self {
        assert!(
            letters.iter().all(|&l| l >= 1),
            "generator subscripts start at 1"
        );
        GWord { letters }
    }

    /// The empty word, representing the identity element.
    pub fn empty() -> Self {
        GWord { letters: Vec::new() }
    }

    /// The generator subscripts in multiplication order.
    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    /// Number of letters in the word.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// Whether the word is the identity.
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest subscript used, or zero for the empty word.
    pub fn max_letter(&self) -> usize {
        self.letters.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for GWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "(1)");
        }
        write!(f, "(")?;
        for (t, l) in self.letters.iter().enumerate() {
            if t > 0 {
                write!(f, " ")?;
            }
            write!(f, "g_{l}")?;
        }
        write!(f, ")")
    }
}

/// The cycle type represented by a word, with fixed points left implicit.
///
/// `lengths` lists the non-unit cycle lengths in weakly decreasing order;
/// `n` is the ambient number of strands, so the number of fixed points is
/// `n` minus the sum of the listed lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SegmentShape {
    lengths: Vec<usize>,
    n: usize,
}

impl SegmentShape {
    /// Builds a shape from explicit non-unit cycle lengths.
    pub fn new(mut lengths: Vec<usize>, n: usize) -> Self {
        assert!(
            lengths.iter().all(|&c| c >= 2),
            "cycle lengths below 2 are fixed points and stay implicit"
        );
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        let total: usize = lengths.iter().sum();
        assert!(total <= n, "cycles do not fit on {n} strands");
        SegmentShape { lengths, n }
    }

    /// The cycle type of the conjugacy class labelled by a partition of `n`.
    pub fn from_class(mu: &Partition) -> Self {
        let lengths: Vec<usize> = mu.parts().iter().copied().filter(|&p| p >= 2).collect();
        SegmentShape {
            lengths,
            n: mu.n(),
        }
    }

    /// Non-unit cycle lengths in weakly decreasing order.
    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Ambient number of strands.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether the shape is the identity class.
    pub fn is_identity(&self) -> bool {
        self.lengths.is_empty()
    }
}

impl fmt::Display for SegmentShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (t, c) in self.lengths.iter().enumerate() {
            if t > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}} on {}", self.n)
    }
}

/// The canonical minimal-length word for the conjugacy class labelled `mu`.
///
/// Each part `p >= 2` contributes a run of `p - 1` consecutive ascending
/// generators, runs are laid out left to right with one skipped subscript
/// between consecutive runs, and parts equal to 1 contribute nothing.
/// For `mu = [2, 2]` on four strands this yields `(g_1 g_3)`.
pub fn class_word(mu: &Partition, n: usize) -> GWord {
    assert_eq!(mu.n(), n, "class label must be a partition of {n}");
    let mut letters = Vec::new();
    let mut start = 1usize;
    for &p in mu.parts() {
        if p >= 2 {
            letters.extend(start..start + p - 1);
            start += p;
        }
    }
    GWord { letters }
}

/// Exact binomial coefficient as a rational number.
fn binomial(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::from_integer(BigInt::from(0));
    }
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for t in 0..k.min(n - k) {
        num *= BigInt::from((n - t) as u64);
        den *= BigInt::from((t + 1) as u64);
    }
    Rational::new(num, den)
}

/// Trace of a single `k`-cycle word `g_1 g_2 ... g_{k-1}` on the module
/// labelled `g`, expressed through Murphy operator traces.
///
/// The alternating binomial combination of the traces of `L_k, ..., L_2`
/// is divisible by `(q - 1)^{k-2}` after clearing denominators, and the
/// quotient times `q^{k-2}` is the requested trace. Divisibility failure
/// is reported rather than silently truncated.
pub fn single_cycle_trace(g: &Partition, k: usize) -> Result<LaurentPoly, CharactersError> {
    let n = g.n();
    if k < 2 || k > n {
        return Err(MurphyError::IndexOutOfRange { index: k, n }.into());
    }
    let mut sum = LaurentPoly::zero();
    for i in 0..=(k - 2) {
        let mut term = murphy_trace(g, k - i)?;
        term = term.scale(&binomial(k - 1, i));
        if i % 2 == 0 {
            sum = &sum + &term;
        } else {
            sum = &sum - &term;
        }
    }
    if k == 2 {
        return Ok(sum);
    }
    let power = (k - 2) as u32;
    let num = sum.shift(power as i64);
    let den = (&LaurentPoly::q() - &LaurentPoly::one()).pow(power);
    Ok(exact_div(&num, &den)?)
}

/// Trace of a `k`-cycle word times a spectator Murphy operator `L_m`.
///
/// Uses the same alternating combination as [`single_cycle_trace`] with
/// `L_m` riding along in every trace. The spectator must satisfy
/// `m >= k + 2`; otherwise its strand is entangled with the cycle and the
/// expansion is invalid, reported as [`MurphyError::ConsecutiveIndices`].
pub fn cycle_times_murphy_trace(
    g: &Partition,
    k: usize,
    m: usize,
) -> Result<LaurentPoly, CharactersError> {
    let n = g.n();
    if k < 2 || k > n {
        return Err(MurphyError::IndexOutOfRange { index: k, n }.into());
    }
    if m < k + 2 {
        return Err(MurphyError::ConsecutiveIndices.into());
    }
    if m > n {
        return Err(MurphyError::IndexOutOfRange { index: m, n }.into());
    }
    let mut sum = LaurentPoly::zero();
    for i in 0..=(k - 2) {
        let list = MurphyIndexList::new(vec![k - i, m])?;
        let mut term = murphy_product_trace(g, &list)?;
        term = term.scale(&binomial(k - 1, i));
        if i % 2 == 0 {
            sum = &sum + &term;
        } else {
            sum = &sum - &term;
        }
    }
    if k == 2 {
        return Ok(sum);
    }
    let power = (k - 2) as u32;
    let num = sum.shift(power as i64);
    let den = (&LaurentPoly::q() - &LaurentPoly::one()).pow(power);
    Ok(exact_div(&num, &den)?)
}

/// Expands the product of an ascending run ending at `g_p` with an adjacent
/// hook word on letters `p + 1, ..., p + r` into plain run words.
///
/// The run is `g_k g_{k+1} ... g_p` preceded by the untouched prefix
/// `g_1 ... g_{k-1}`; `k = 0` means the run is empty and only the prefix
/// convention degenerates away. The hook length must satisfy `r >= 1`.
/// Returned entries pair a coefficient with the replacement word
/// `g_1 ... g_{k-1} g_{k+1} ... g_{p+r-l}` for each `l` from `0` to `r - 1`,
/// with coefficient `binom(r-1, l) q^l (q-1)^{r-1-l}`.
pub fn v_reduction(k: usize, p: usize, r: usize) -> Vec<(LaurentPoly, GWord)> {
    assert!(r >= 1, "hook must contain at least one strand pair");
    assert!(k <= p, "run start may not exceed run end");
    let q = LaurentPoly::q();
    let qm1 = &q - &LaurentPoly::one();
    let mut out = Vec::with_capacity(r);
    for l in 0..r {
        let coeff = LaurentPoly::constant(binomial(r - 1, l))
            .shift(l as i64)
            * qm1.pow((r - 1 - l) as u32);
        let mut letters: Vec<usize> = (1..k).collect();
        letters.extend(k + 1..=p + r - l);
        out.push((coeff, GWord { letters }));
    }
    out
}

/// Expands the product of the full run `g_1 ... g_p` with a hook word whose
/// base letter `l` lies inside the run, `1 <= l <= p`, and whose top extends
/// `r >= 1` letters beyond the run.
///
/// Each returned pair `(coefficient, kappa)` names the term in which the run
/// is split at position `kappa`; `kappa = 0` keeps the run whole. The split
/// terms compose with [`v_reduction`] applied at `kappa`. Coefficients are
/// `(q - 1) q^kappa f_{2(d-kappa)+1}` for `kappa` in `1..=d` and `f_{2d+1}`
/// for `kappa = 0`, where `d = p - l + 1` is the overlap depth.
pub fn overlap_reduction(p: usize, l: usize, r: usize) -> Vec<(LaurentPoly, usize)> {
    assert!(r >= 1, "hook must extend beyond the run");
    assert!(l >= 1 && l <= p, "hook base must lie inside the run");
    let d = p - l + 1;
    let q = LaurentPoly::q();
    let qm1 = &q - &LaurentPoly::one();
    let mut out = Vec::with_capacity(d + 1);
    for kappa in 1..=d {
        let coeff = &qm1.shift(kappa as i64) * &f_coeff((2 * (d - kappa) + 1) as u32);
        out.push((coeff, kappa));
    }
    out.push((f_coeff((2 * d + 1) as u32), 0));
    out
}

/// Coefficients of the polynomial that projects onto the eigenspace of the
/// central invariant labelled `g` among all modules on `n` strands.
///
/// The polynomial is `prod_{h != g} (x - v_h) / (v_g - v_h)` where `v_h` is
/// the central eigenvalue of module `h`. Coefficients are returned lowest
/// degree first, with length equal to the number of modules. Fails with
/// [`CharactersError::DegenerateEigenvalues`] if two eigenvalues coincide,
/// which does not happen for generic `q`.
pub fn projection_coefficients(
    n: usize,
    g: &Partition,
) -> Result<Vec<RationalFunction>, CharactersError> {
    assert_eq!(g.n(), n, "module label must be a partition of {n}");
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<Partition, Vec<RationalFunction>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(coeffs) = cache.lock().expect("projection cache poisoned").get(g) {
        return Ok(coeffs.clone());
    }
    let coeffs = projection_coefficients_uncached(n, g)?;
    cache
        .lock()
        .expect("projection cache poisoned")
        .insert(g.clone(), coeffs.clone());
    Ok(coeffs)
}

fn projection_coefficients_uncached(
    n: usize,
    g: &Partition,
) -> Result<Vec<RationalFunction>, CharactersError> {
    let shapes = partitions_of(n);
    let values: Vec<LaurentPoly> = shapes
        .iter()
        .map(crate::diagrams::fundamental_eigenvalue)
        .collect();
    for a in 0..values.len() {
        for b in (a + 1)..values.len() {
            if values[a] == values[b] {
                return Err(CharactersError::DegenerateEigenvalues);
            }
        }
    }
    let own = shapes
        .iter()
        .position(|h| h == g)
        .expect("partition of n appears in the full list");
    let mut numerator = vec![LaurentPoly::one()];
    let mut denominator = LaurentPoly::one();
    for (h, value) in values.iter().enumerate() {
        if h == own {
            continue;
        }
        let mut next = vec![LaurentPoly::zero(); numerator.len() + 1];
        for (deg, c) in numerator.iter().enumerate() {
            next[deg + 1] = &next[deg + 1] + c;
            next[deg] = &next[deg] - &(c * value);
        }
        numerator = next;
        denominator = &denominator * &(&values[own] - value);
    }
    let den = RationalFunction::from_poly(denominator);
    numerator
        .into_iter()
        .map(|c| Ok(RationalFunction::from_poly(c).div(&den)?))
        .collect::<Result<Vec<_>, LaurentError>>()
        .map_err(CharactersError::from)
}
