//! Quadratic Casimir spectra for quantum special unitary modules.
//!
//! A module of the rank `N` quantum group is labelled by a diagram with at
//! most `N - 1` rows. Its quadratic Casimir eigenvalue is the Laurent
//! polynomial `sum_k q^(2 L_k)` over `k = 1..N`, where `L_k = l_k - k` and
//! `l_k` is the k-th row length (zero for absent rows). The `L_k` strictly
//! decrease, so the eigenvalue determines the diagram: this module houses
//! the spectrum type, the encoder and decoder in both directions, the
//! deformation series, and the exact identity connecting the Casimir
//! eigenvalue to the fundamental invariant of the corresponding Hecke
//! algebra module.

use num::One;
use serde::Serialize;
use thiserror::Error;

use crate::diagrams::{fundamental_eigenvalue, Partition};
use crate::laurent::{q_bracket, rint, to_delta_series, DeltaSeries, LaurentPoly, Rational};

/// Why a Laurent polynomial fails to be a Casimir spectrum.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectrumDefect {
    /// A term has a coefficient other than one.
    #[error("coefficient of q^{exponent} is {coefficient}, expected 1")]
    NonUnitCoefficient { exponent: i64, coefficient: String },
    /// A term has an odd exponent where only even ones can occur.
    #[error("exponent {0} is odd")]
    OddExponent(i64),
    /// The number of terms does not match the rank.
    #[error("expected {expected} terms for this rank, found {found}")]
    WrongTermCount { expected: usize, found: usize },
    /// The decoded row lengths dip below zero.
    #[error("decoded row {row} would have negative length {length}")]
    NegativeRow { row: usize, length: i64 },
    /// Directly supplied levels are not strictly decreasing.
    #[error("levels must strictly decrease")]
    LevelsNotDecreasing,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CasimirError {
    /// The rank parameter must be at least two.
    #[error("rank must be at least 2, got {0}")]
    RankTooSmall(usize),
    /// The diagram has too many rows for the requested rank.
    #[error("shape has {rows} rows but rank {rank} admits at most {}", .rank - 1)]
    TooManyRows { rows: usize, rank: usize },
    /// The polynomial does not encode any diagram at this rank.
    #[error("malformed spectrum: {0}")]
    MalformedSpectrum(SpectrumDefect),
}

/// The strictly decreasing level sequence `L_1 > L_2 > ... > L_(N-1)` of a
/// rank `N` Casimir eigenvalue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CasimirSpectrum {
    rank: usize,
    levels: Vec<i64>,
}

impl CasimirSpectrum {
    /// Builds a spectrum from explicit levels, which must strictly decrease
    /// and number exactly `rank - 1`.
    pub fn new(rank: usize, levels: Vec<i64>) -> Result<Self, CasimirError> {
        if rank < 2 {
            return Err(CasimirError::RankTooSmall(rank));
        }
        if levels.len() != rank - 1 {
            return Err(CasimirError::MalformedSpectrum(
                SpectrumDefect::WrongTermCount {
                    expected: rank - 1,
                    found: levels.len(),
                },
            ));
        }
        if levels.windows(2).any(|w| w[0] <= w[1]) {
            return Err(CasimirError::MalformedSpectrum(
                SpectrumDefect::LevelsNotDecreasing,
            ));
        }
        Ok(CasimirSpectrum { rank, levels })
    }

    /// The spectrum of the module labelled by `g` at the given rank, with
    /// `L_k = l_k - k` and absent rows counted as zero length.
    pub fn from_partition(g: &Partition, rank: usize) -> Result<Self, CasimirError> {
        if rank < 2 {
            return Err(CasimirError::RankTooSmall(rank));
        }
        if g.rows() >= rank {
            return Err(CasimirError::TooManyRows {
                rows: g.rows(),
                rank,
            });
        }
        let levels = (1..rank)
            .map(|k| g.row(k - 1) as i64 - k as i64)
            .collect();
        Ok(CasimirSpectrum { rank, levels })
    }

    /// Reads a spectrum off an eigenvalue polynomial: `rank - 1` terms, all
    /// coefficients one, all exponents even.
    pub fn from_polynomial(v: &LaurentPoly, rank: usize) -> Result<Self, CasimirError> {
        if rank < 2 {
            return Err(CasimirError::RankTooSmall(rank));
        }
        if v.term_count() != rank - 1 {
            return Err(CasimirError::MalformedSpectrum(
                SpectrumDefect::WrongTermCount {
                    expected: rank - 1,
                    found: v.term_count(),
                },
            ));
        }
        let mut levels = Vec::with_capacity(rank - 1);
        for (e, c) in v.terms() {
            if !c.is_one() {
                return Err(CasimirError::MalformedSpectrum(
                    SpectrumDefect::NonUnitCoefficient {
                        exponent: e,
                        coefficient: c.to_string(),
                    },
                ));
            }
            if e.rem_euclid(2) != 0 {
                return Err(CasimirError::MalformedSpectrum(SpectrumDefect::OddExponent(
                    e,
                )));
            }
            levels.push(e / 2);
        }
        levels.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CasimirSpectrum { rank, levels })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Levels in strictly decreasing order.
    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    /// The eigenvalue polynomial `sum_k q^(2 L_k)`.
    pub fn polynomial(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.levels.iter().map(|&l| (2 * l, Rational::one())))
    }

    /// Recovers the diagram: row lengths `l_k = L_k + k` with trailing zero
    /// rows stripped. Fails if any row length would be negative.
    pub fn partition(&self) -> Result<Partition, CasimirError> {
        let mut rows = Vec::with_capacity(self.levels.len());
        for (i, &l) in self.levels.iter().enumerate() {
            let length = l + (i as i64 + 1);
            if length < 0 {
                return Err(CasimirError::MalformedSpectrum(SpectrumDefect::NegativeRow {
                    row: i + 1,
                    length,
                }));
            }
            rows.push(length as usize);
        }
        while rows.last() == Some(&0) {
            rows.pop();
        }
        Ok(Partition::new(rows))
    }
}

/// The quadratic Casimir eigenvalue of the module labelled by `g` at the
/// given rank.
pub fn casimir_eigenvalue(g: &Partition, rank: usize) -> Result<LaurentPoly, CasimirError> {
    Ok(CasimirSpectrum::from_partition(g, rank)?.polynomial())
}

/// Decodes an eigenvalue polynomial back into the diagram it labels.
pub fn decode_spectrum(v: &LaurentPoly, rank: usize) -> Result<Partition, CasimirError> {
    CasimirSpectrum::from_polynomial(v, rank)?.partition()
}

/// Decodes one eigenvalue per block of a completely reducible module,
/// keeping per-block failures in place.
pub fn decode_blocks(vs: &[LaurentPoly], rank: usize) -> Vec<Result<Partition, CasimirError>> {
    vs.iter().map(|v| decode_spectrum(v, rank)).collect()
}

/// Expands the Casimir eigenvalue around the classical point `q = e^d` as a
/// series in `d` up to the given order.
///
/// The constant term is `rank - 1`, the linear coefficient is twice the sum
/// of the levels, and the quadratic coefficient is twice the sum of their
/// squares.
pub fn casimir_delta_series(
    g: &Partition,
    rank: usize,
    order: usize,
) -> Result<DeltaSeries, CasimirError> {
    Ok(to_delta_series(&casimir_eigenvalue(g, rank)?, order))
}

/// Both sides of the exact identity tying the fundamental Hecke invariant
/// (with deformation parameter squared) to the Casimir eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub left: LaurentPoly,
    pub right: LaurentPoly,
    pub holds: bool,
}

/// Checks, exactly, the identity
/// `((q^2-1)/q^2)^2 A(q^2) + ((q^2-1)/q^2) n = B + [1-N] at q^2`,
/// where `A` is the fundamental invariant eigenvalue of `g` on `n` boxes,
/// `B` is the rank `N` Casimir eigenvalue, and `[m]` is the q-bracket.
pub fn hecke_casimir_relation_check(
    g: &Partition,
    rank: usize,
) -> Result<RelationReport, CasimirError> {
    let spectrum = CasimirSpectrum::from_partition(g, rank)?;
    let factor = &LaurentPoly::one() - &LaurentPoly::monomial(-2, Rational::one());
    let invariant_sq = fundamental_eigenvalue(g).substitute_q_power(2);
    let boxes = rint(g.n() as i64);
    let left = &(&factor.pow(2) * &invariant_sq) + &factor.scale(&boxes);
    let bracket = q_bracket(1 - rank as i64).substitute_q_power(2);
    let right = &spectrum.polynomial() + &bracket;
    let holds = left == right;
    Ok(RelationReport { left, right, holds })
}
