//! Explicit matrix models of the irreducible representations.
//!
//! This module is the certification layer of the crate: it constructs every
//! generator of H_n(q) as an explicit matrix over rational functions in the
//! chain basis, so that algebra relations, Murphy spectra, central
//! invariants, traces, and projections can all be checked directly against
//! honest matrix arithmetic. It is deliberately slower than the trace
//! pipeline in [`crate::characters`]; its purpose is to be independent of
//! it.
//!
//! The basis of the representation labeled by `g` is the set of growth
//! chains of `g`. A generator acts on the two steps it touches: chains
//! whose boxes at those steps share a row (or column) are eigenvectors with
//! eigenvalue `q` (or `-1`), and the remaining chains pair up into two by
//! two blocks whose entries follow from the Murphy recursion
//! `L_(p+1) = q^-1 g_p L_p g_p + g_p` together with the quadratic relation.
//! The off-diagonal gauge is fixed by setting the lower left entry of every
//! block to 1.

use crate::diagrams::{chains_of, fundamental_eigenvalue, q_content_added, DiagramChain, Partition};
use crate::laurent::{exact_div, poly_gcd, LaurentError, LaurentPoly, Rational, RationalFunction};
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

/// Errors for matrix construction and evaluation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The seminormal construction could not be completed.
    #[error("representation construction failed: {0}")]
    ConstructionFailed(String),
    /// A trace failed to clear its denominator.
    #[error("trace left a residual denominator")]
    ResidualDenominator,
}

/// A square matrix over rational functions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RfMatrix {
    n: usize,
    entries: Vec<RationalFunction>,
}

impl RfMatrix {
    pub fn zero(n: usize) -> Self {
        RfMatrix { n, entries: vec![RationalFunction::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = RationalFunction::one();
        }
        m
    }

    pub fn scalar(n: usize, v: &RationalFunction) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = v.clone();
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &RationalFunction {
        &self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: RationalFunction) {
        self.entries[r * self.n + c] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        RfMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        RfMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, v: &RationalFunction) -> Self {
        RfMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e.mul(v)).collect(),
        }
    }

    /// Matrix product, skipping zero entries (generator matrices have at
    /// most two nonzero entries per row, so this matters).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zero(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul(b);
                    out.entries[r * n + c] = out.entries[r * n + c].add(&prod);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> RationalFunction {
        let mut acc = RationalFunction::zero();
        for i in 0..self.n {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|r| (0..self.n).all(|c| r == c || self.get(r, c).is_zero()))
    }

    /// Direct sum with another matrix, placing `self` in the upper block.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        let mut out = Self::zero(n);
        for r in 0..self.n {
            for c in 0..self.n {
                out.entries[r * n + c] = self.get(r, c).clone();
            }
        }
        for r in 0..other.n {
            for c in 0..other.n {
                out.entries[(self.n + r) * n + (self.n + c)] = other.get(r, c).clone();
            }
        }
        out
    }

    /// Evaluates every entry at a rational point, row-major.
    pub fn eval_entries(&self, q0: &Rational) -> Result<Vec<Rational>, LaurentError> {
        self.entries.iter().map(|e| e.eval_at(q0)).collect()
    }
}

/// All generator matrices of one irreducible representation, in the chain
/// basis.
pub struct IrrepMatrices {
    pub shape: Partition,
    pub dim: usize,
    /// `generators[i]` is the matrix of g_(i+1); there are n - 1 of them.
    pub generators: Vec<RfMatrix>,
    /// The chain labeling each basis vector.
    pub chains: Vec<DiagramChain>,
}

/// Builds the matrices of all generators for the representation labeled by
/// `g`.
pub fn build_irrep(g: &Partition) -> Result<IrrepMatrices, OracleError> {
    let n = g.n();
    assert!(n >= 1, "representations need at least one box");
    let chains = chains_of(g);
    let dim = chains.len();
    let index: HashMap<&[(usize, usize)], usize> = chains
        .iter()
        .enumerate()
        .map(|(i, c)| (c.added_boxes(), i))
        .collect();
    let q = RationalFunction::from_poly(LaurentPoly::q());
    let qm1 = RationalFunction::from_poly("q-1".parse().unwrap());
    let minus_one = RationalFunction::from_poly(LaurentPoly::constant(-Rational::from_integer(1.into())));

    let mut generators = Vec::with_capacity(n.saturating_sub(1));
    for p in 1..n {
        let mut m = RfMatrix::zero(dim);
        for (t, chain) in chains.iter().enumerate() {
            let bp = chain.added_box(p);
            let bq = chain.added_box(p + 1);
            if bp.0 == bq.0 {
                m.set(t, t, q.clone());
            } else if bp.1 == bq.1 {
                m.set(t, t, minus_one.clone());
            } else {
                // Swap the order of the two boxes to find the partner chain.
                let mut swapped = chain.added_boxes().to_vec();
                swapped.swap(p - 1, p);
                let &t2 = index.get(swapped.as_slice()).ok_or_else(|| {
                    OracleError::ConstructionFailed(format!(
                        "no partner chain at step {p} in {g}"
                    ))
                })?;
                if t > t2 {
                    continue;
                }
                let x = RationalFunction::from_poly(q_content_added(chain, p));
                let y = RationalFunction::from_poly(q_content_added(chain, p + 1));
                let den = y.sub(&x);
                if den.is_zero() {
                    return Err(OracleError::ConstructionFailed(format!(
                        "equal q-contents at step {p} in {g}"
                    )));
                }
                let a = q.add(&qm1.mul(&y)).div(&den).expect("nonzero denominator");
                let d = qm1.sub(&a);
                let b = a.mul(&d).add(&q);
                m.set(t, t, a);
                m.set(t2, t2, d);
                m.set(t2, t, RationalFunction::one());
                m.set(t, t2, b);
            }
        }
        generators.push(m);
    }
    Ok(IrrepMatrices { shape: g.clone(), dim, generators, chains })
}

impl IrrepMatrices {
    fn generator(&self, i: usize) -> &RfMatrix {
        &self.generators[i - 1]
    }
}

/// The matrix of the Murphy operator L_p, built by the recursion
/// `L_2 = g_1`, `L_(p+1) = q^-1 g_p L_p g_p + g_p`.
pub fn murphy_matrix(m: &IrrepMatrices, p: usize) -> RfMatrix {
    let n = m.shape.n();
    assert!((2..=n).contains(&p), "Murphy index out of range");
    let q_inv = RationalFunction::from_poly(LaurentPoly::monomial(-1, Rational::from_integer(1.into())));
    let mut l = m.generator(1).clone();
    for k in 2..p {
        let gk = m.generator(k);
        l = gk.mul(&l).mul(gk).scale(&q_inv).add(gk);
    }
    l
}

/// The matrix of the fundamental central invariant, as the weighted sum of
/// all hook words `q^(i-j+1) g_i ... g_(j-1) ... g_i` over `i < j <= n`.
pub fn fundamental_invariant_matrix(m: &IrrepMatrices) -> RfMatrix {
    let n = m.shape.n();
    let mut acc = RfMatrix::zero(m.dim);
    for j in 2..=n {
        for i in 1..j {
            let hook = hook_matrix(m, i, j);
            let weight = RationalFunction::from_poly(LaurentPoly::monomial(
                i as i64 - j as i64 + 1,
                Rational::from_integer(1.into()),
            ));
            acc = acc.add(&hook.scale(&weight));
        }
    }
    acc
}

/// The matrix of the palindromic hook word `g_i g_(i+1) ... g_(j-1) ... g_i`.
pub fn hook_matrix(m: &IrrepMatrices, i: usize, j: usize) -> RfMatrix {
    assert!(i < j && j <= m.shape.n());
    let mut acc = m.generator(i).clone();
    for k in i + 1..j {
        acc = acc.mul(m.generator(k));
    }
    for k in (i..j - 1).rev() {
        acc = acc.mul(m.generator(k));
    }
    acc
}

/// Trace of the product of generators named by `word` (1-based letters).
///
/// The trace of any word is a Laurent polynomial even though individual
/// entries are genuine rational functions; failure to clear the denominator
/// therefore signals a corrupted representation.
pub fn word_trace(m: &IrrepMatrices, word: &[usize]) -> Result<LaurentPoly, OracleError> {
    let n = m.shape.n();
    assert!(
        word.iter().all(|&l| l >= 1 && l < n),
        "word letters must name generators of the algebra"
    );
    let mut acc = RfMatrix::identity(m.dim);
    for &l in word {
        acc = acc.mul(m.generator(l));
    }
    acc.trace().to_laurent().map_err(|_| OracleError::ResidualDenominator)
}

/// One named pass/fail record in a verification report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub ok: bool,
}

/// The outcome of a batch of matrix-level identity checks.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub subject: String,
    pub checks: Vec<CheckRecord>,
}

impl VerifyReport {
    fn push(&mut self, name: String, ok: bool) {
        self.checks.push(CheckRecord { name, ok });
    }

    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn violations(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.ok)
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.violations().next().map(|c| c.name.as_str())
    }
}

/// Checks the defining relations and the spectral facts this crate relies
/// on, one record per identity: the quadratic relation for every generator,
/// braid and commutation relations, diagonality of every Murphy matrix with
/// the predicted chain eigenvalues, and scalarity of the central invariant
/// with the predicted eigenvalue.
pub fn verify_relations(m: &IrrepMatrices) -> VerifyReport {
    let n = m.shape.n();
    let mut report = VerifyReport { subject: m.shape.to_string(), checks: Vec::new() };
    let q = RationalFunction::from_poly(LaurentPoly::q());
    let qm1 = RationalFunction::from_poly("q-1".parse::<LaurentPoly>().unwrap());
    let id = RfMatrix::identity(m.dim);

    for i in 1..n {
        let g = m.generator(i);
        let lhs = g.mul(g);
        let rhs = g.scale(&qm1).add(&id.scale(&q));
        report.push(format!("quadratic g{i}"), lhs == rhs);
    }
    for i in 1..n.saturating_sub(1) {
        let a = m.generator(i);
        let b = m.generator(i + 1);
        let lhs = a.mul(b).mul(a);
        let rhs = b.mul(a).mul(b);
        report.push(format!("braid g{i} g{}", i + 1), lhs == rhs);
    }
    for i in 1..n {
        for j in i + 2..n {
            let a = m.generator(i);
            let b = m.generator(j);
            report.push(format!("commutation g{i} g{j}"), a.mul(b) == b.mul(a));
        }
    }
    for p in 2..=n {
        let l = murphy_matrix(m, p);
        let mut ok = l.is_diagonal();
        if ok {
            for (t, chain) in m.chains.iter().enumerate() {
                let expected = RationalFunction::from_poly(q_content_added(chain, p));
                if l.get(t, t) != &expected {
                    ok = false;
                    break;
                }
            }
        }
        report.push(format!("murphy L{p} diagonal with chain spectrum"), ok);
    }
    if n >= 2 {
        let c = fundamental_invariant_matrix(m);
        let expected = RfMatrix::scalar(
            m.dim,
            &RationalFunction::from_poly(fundamental_eigenvalue(&m.shape)),
        );
        report.push("central invariant scalar".to_string(), c == expected);
    }
    report
}

/// Checks the spectral projections on the direct sum of two representations
/// of the same size: each projection acts as the identity on its own block,
/// as zero on the other, projections for absent shapes act as zero, and all
/// projections sum to the identity.
///
/// The central invariant of each summand is first certified to be a scalar
/// matrix, so a projection polynomial acts on a block exactly as its value
/// at that block's scalar. The block values are computed over a cleared
/// common denominator, which keeps the rest of the check in exact polynomial
/// arithmetic instead of repeated rational function reduction.
pub fn verify_projection(a: &Partition, b: &Partition) -> Result<VerifyReport, OracleError> {
    assert_eq!(a.n(), b.n(), "shapes must have equal box counts");
    let n = a.n();
    let mut report = VerifyReport { subject: format!("{a} (+) {b}"), checks: Vec::new() };
    let mut blocks: Vec<(Partition, LaurentPoly)> = Vec::new();
    for shape in [a, b] {
        let m = build_irrep(shape)?;
        let c = fundamental_invariant_matrix(&m);
        let value = c.get(0, 0).clone();
        report.push(
            format!("central invariant scalar on block {shape}"),
            c == RfMatrix::scalar(m.dim, &value),
        );
        let value = value.to_laurent().map_err(|_| OracleError::ResidualDenominator)?;
        blocks.push((shape.clone(), value));
    }
    let mut unity: Vec<RationalFunction> = vec![RationalFunction::zero(); blocks.len()];
    for g in crate::diagrams::partitions_of(n) {
        let coeffs = crate::characters::projection_coefficients(n, &g)
            .map_err(|e| OracleError::ConstructionFailed(e.to_string()))?;
        let mut den = LaurentPoly::one();
        for c in &coeffs {
            let shared = poly_gcd(&den, c.denominator());
            let extra = exact_div(c.denominator(), &shared)
                .map_err(|e| OracleError::ConstructionFailed(e.to_string()))?;
            den = &den * &extra;
        }
        let nums: Vec<LaurentPoly> = coeffs
            .iter()
            .map(|c| exact_div(&den, c.denominator()).map(|s| c.numerator() * &s))
            .collect::<Result<_, _>>()
            .map_err(|e: LaurentError| OracleError::ConstructionFailed(e.to_string()))?;
        let mut ok = true;
        for ((shape, value), total) in blocks.iter().zip(unity.iter_mut()) {
            let mut u = LaurentPoly::zero();
            for c in nums.iter().rev() {
                u = &(&u * value) + c;
            }
            ok &= if &g == shape { u == den } else { u.is_zero() };
            let contribution = RationalFunction::new(u, den.clone())
                .map_err(|e| OracleError::ConstructionFailed(e.to_string()))?;
            *total = total.add(&contribution);
        }
        report.push(format!("projection {g} block structure"), ok);
    }
    report.push(
        "projections sum to identity".to_string(),
        unity.iter().all(|v| v == &RationalFunction::one()),
    );
    Ok(report)
}

/// Evaluates a polynomial with rational function coefficients at a matrix
/// argument by Horner's rule.
pub fn eval_matrix_poly(coeffs: &[RationalFunction], x: &RfMatrix) -> RfMatrix {
    let mut acc = RfMatrix::zero(x.size());
    for c in coeffs.iter().rev() {
        acc = acc.mul(x);
        for i in 0..x.size() {
            let v = acc.get(i, i).add(c);
            acc.set(i, i, v);
        }
    }
    acc
}
