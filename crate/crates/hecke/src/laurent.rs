//! Exact arithmetic for Laurent polynomials in `q` over the rationals,
//! rational functions built from them, and truncated power series in the
//! variable `d` obtained by substituting `q = e^d`.
//!
//! Every quantity in this crate (eigenvalues, traces, characters) is a value
//! of one of these types; no floating point is involved anywhere.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use thiserror::Error;

/// Exact rational scalar used for all coefficients.
pub type Rational = BigRational;

/// A rational number from a machine integer.
pub fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Errors produced by the arithmetic operations in this module.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    /// Division by the zero polynomial.
    #[error("division by the zero polynomial")]
    DivisionByZero,
    /// The quotient exists as a rational function but not as a Laurent
    /// polynomial.
    #[error("no exact Laurent quotient exists")]
    NotDivisible,
    /// Evaluation at `q = 0`, where negative powers are undefined.
    #[error("evaluation at zero base")]
    ZeroBase,
}

/// A Laurent polynomial in `q` with exact rational coefficients.
///
/// Only nonzero coefficients are stored, keyed by their (possibly negative)
/// integer exponent, so two values are equal exactly when they are the same
/// polynomial.
///
/// ```
/// use hecke::laurent::LaurentPoly;
///
/// let a: LaurentPoly = "q^2-1".parse().unwrap();
/// let b: LaurentPoly = "q-1".parse().unwrap();
/// let c: LaurentPoly = "q+1".parse().unwrap();
/// assert_eq!(b * c, a);
/// ```
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Rational>,
}

impl LaurentPoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        Self::monomial(0, Rational::one())
    }

    /// The variable `q` itself.
    pub fn q() -> Self {
        Self::monomial(1, Rational::one())
    }

    /// The constant polynomial with the given value.
    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, c)
    }

    /// The single term `c * q^exp`.
    pub fn monomial(exp: i64, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        LaurentPoly { terms }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing
    /// duplicates and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in iter {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exp: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff(0).is_one()
    }

    /// The coefficient of `q^exp` (zero when the term is absent).
    pub fn coeff(&self, exp: i64) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Iterates over `(exponent, coefficient)` pairs in increasing exponent
    /// order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// Number of stored (nonzero) terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Largest exponent with a nonzero coefficient.
    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Multiplies by the scalar `c`.
    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Multiplies by the monomial `q^exp`.
    pub fn shift(&self, exp: i64) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.checked_add(exp).expect("Laurent exponent overflow"), v.clone()))
                .collect(),
        }
    }

    /// Raises to a nonnegative integer power.
    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitutes `q -> q^k`, scaling every exponent by `k`.
    ///
    /// `k` must be nonzero so the substitution is invertible on monomials.
    pub fn substitute_q_power(&self, k: i64) -> Self {
        assert!(k != 0, "substitution exponent must be nonzero");
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.checked_mul(k).expect("Laurent exponent overflow"), v.clone()))
                .collect(),
        }
    }

    /// Sum of all coefficients, which equals the value at `q = 1`.
    pub fn coeff_sum(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |a, c| a + c)
    }
}

impl From<i64> for LaurentPoly {
    fn from(n: i64) -> Self {
        Self::constant(rint(n))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms.iter() {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms.iter() {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ea, ca) in self.terms.iter() {
            for (eb, cb) in rhs.terms.iter() {
                let e = ea.checked_add(*eb).expect("Laurent exponent overflow");
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_value_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl $trait for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$method(rhs)
            }
        }
        impl $trait<LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                self.$method(&rhs)
            }
        }
    )*};
}

forward_value_ops!(Add::add, Sub::sub, Mul::mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

/// Exact quotient `a / b` when it exists as a Laurent polynomial.
///
/// ```
/// use hecke::laurent::{exact_div, LaurentPoly};
///
/// let a: LaurentPoly = "q^3+1".parse().unwrap();
/// let b: LaurentPoly = "q+1".parse().unwrap();
/// assert_eq!(exact_div(&a, &b).unwrap(), "q^2-q+1".parse().unwrap());
/// ```
pub fn exact_div(a: &LaurentPoly, b: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
    if b.is_zero() {
        return Err(LaurentError::DivisionByZero);
    }
    if a.is_zero() {
        return Ok(LaurentPoly::zero());
    }
    let sa = a.min_exp().unwrap();
    let sb = b.min_exp().unwrap();
    // Both shifted operands are ordinary polynomials with nonzero constant
    // term, so Laurent divisibility reduces to ordinary divisibility.
    let mut rem = a.shift(-sa);
    let div = b.shift(-sb);
    let div_deg = div.max_exp().unwrap();
    let div_lead = div.coeff(div_deg);
    let mut quot = LaurentPoly::zero();
    while !rem.is_zero() {
        let rem_deg = rem.max_exp().unwrap();
        if rem_deg < div_deg {
            return Err(LaurentError::NotDivisible);
        }
        let factor = rem.coeff(rem_deg) / &div_lead;
        let shift = rem_deg - div_deg;
        quot.add_term(shift, factor.clone());
        rem = &rem - &div.scale(&factor).shift(shift);
    }
    Ok(quot.shift(sa - sb))
}

/// The q-bracket `[m]_q = (q^m - 1) / (q - 1)` for any integer `m`.
///
/// `[0]_q = 0`; for `m > 0` this is `1 + q + ... + q^(m-1)`, and for
/// `m < 0` it is `-(q^m + ... + q^-1)`.
pub fn q_bracket(m: i64) -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    if m > 0 {
        for t in 0..m {
            p.add_term(t, Rational::one());
        }
    } else {
        for t in m..0 {
            p.add_term(t, -Rational::one());
        }
    }
    p
}

/// The expansion coefficient `f_p = (q^p - (-1)^p) / (q + 1)`.
///
/// It satisfies `g^p = f_p g + q f_(p-1)` for any `g` obeying the quadratic
/// relation `g^2 = (q - 1) g + q`.
pub fn f_coeff(p: u32) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    for t in 0..p {
        let sign = if (p - 1 - t) % 2 == 0 { Rational::one() } else { -Rational::one() };
        out.add_term(t as i64, sign);
    }
    out
}

/// Expands `g^p` as `f_p g + q f_(p-1)`, returning `(f_p, q * f_(p-1))`.
pub fn power_expand(p: u32) -> (LaurentPoly, LaurentPoly) {
    assert!(p >= 1, "power_expand requires p >= 1");
    (f_coeff(p), f_coeff(p - 1).shift(1))
}

/// Evaluates the polynomial at the nonzero rational point `q0`.
pub fn eval_at(a: &LaurentPoly, q0: &Rational) -> Result<Rational, LaurentError> {
    if q0.is_zero() {
        return Err(LaurentError::ZeroBase);
    }
    let mut acc = Rational::zero();
    for (e, c) in a.terms() {
        let p = if e >= 0 {
            num::pow::pow(q0.clone(), e as usize)
        } else {
            num::pow::pow(q0.recip(), (-e) as usize)
        };
        acc += c * p;
    }
    Ok(acc)
}

/// A truncated exact power series in `d`, where `q = e^d`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DeltaSeries {
    coeffs: Vec<Rational>,
}

impl DeltaSeries {
    /// The zero series truncated at the given order.
    pub fn zero(order: usize) -> Self {
        DeltaSeries { coeffs: vec![Rational::zero(); order + 1] }
    }

    /// Builds a series from its coefficients for `d^0 ... d^order`.
    ///
    /// The coefficient list must be nonempty.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series carries at least the constant term");
        DeltaSeries { coeffs }
    }

    /// Truncation order (the highest retained power of `d`).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The coefficient of `d^k` (zero above the truncation order).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Truncated product of two series of equal order.
    pub fn mul(&self, other: &DeltaSeries) -> DeltaSeries {
        assert_eq!(self.order(), other.order(), "series orders must agree");
        let order = self.order();
        let mut out = DeltaSeries::zero(order);
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(order - i) {
                let prod = &self.coeffs[i] * &other.coeffs[j];
                out.coeffs[i + j] += prod;
            }
        }
        out
    }

    pub fn add(&self, other: &DeltaSeries) -> DeltaSeries {
        assert_eq!(self.order(), other.order(), "series orders must agree");
        DeltaSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(other.coeffs.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl fmt::Display for DeltaSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*d"),
                _ => format!("{c}*d^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Taylor-expands `a(e^d)` about `d = 0` up to the given order, exactly.
///
/// The coefficient of `d^k` is `sum_m c_m m^k / k!` over the terms
/// `c_m q^m` of `a`.
pub fn to_delta_series(a: &LaurentPoly, order: usize) -> DeltaSeries {
    let mut out = DeltaSeries::zero(order);
    let mut factorial = Rational::one();
    for k in 0..=order {
        if k > 0 {
            factorial *= rint(k as i64);
        }
        let mut acc = Rational::zero();
        for (m, c) in a.terms() {
            let mk = num::pow::pow(BigInt::from(m), k);
            acc += c * Rational::from_integer(mk);
        }
        out.coeffs[k] = acc / &factorial;
    }
    out
}

/// A quotient of Laurent polynomials with a nonzero denominator.
///
/// Values are kept in a reduced canonical form (coprime numerator and
/// denominator, monic ordinary denominator), but equality is still defined
/// by cross-multiplication so it never depends on the representation.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFunction {
    /// Builds `num / den`, reducing to canonical form.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, LaurentError> {
        if den.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        let mut rf = RationalFunction { num, den };
        rf.reduce();
        Ok(rf)
    }

    pub fn zero() -> Self {
        RationalFunction { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        RationalFunction { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        RationalFunction { num: p, den: LaurentPoly::one() }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = LaurentPoly::one();
            return;
        }
        let g = poly_gcd(&self.num, &self.den);
        if !g.is_one() {
            self.num = exact_div(&self.num, &g).expect("gcd divides numerator");
            self.den = exact_div(&self.den, &g).expect("gcd divides denominator");
        }
        // Normalize the denominator to a monic ordinary polynomial, folding
        // the monomial and leading-coefficient adjustments into the numerator.
        let shift = self.den.min_exp().unwrap();
        if shift != 0 {
            self.den = self.den.shift(-shift);
            self.num = self.num.shift(-shift);
        }
        let lead = self.den.coeff(self.den.max_exp().unwrap());
        if !lead.is_one() {
            let inv = lead.recip();
            self.den = self.den.scale(&inv);
            self.num = self.num.scale(&inv);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = &self.num * &other.den + &other.num * &self.den;
        let den = &self.den * &other.den;
        RationalFunction::new(num, den).expect("nonzero denominators")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        RationalFunction::new(&self.num * &other.num, &self.den * &other.den)
            .expect("nonzero denominators")
    }

    pub fn div(&self, other: &Self) -> Result<Self, LaurentError> {
        if other.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        RationalFunction::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }

    pub fn inverse(&self) -> Result<Self, LaurentError> {
        if self.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn scale_poly(&self, p: &LaurentPoly) -> Self {
        RationalFunction::new(&self.num * p, self.den.clone()).expect("nonzero denominator")
    }

    /// Clears the denominator, succeeding only when the value is actually a
    /// Laurent polynomial.
    pub fn to_laurent(&self) -> Result<LaurentPoly, LaurentError> {
        exact_div(&self.num, &self.den)
    }

    /// Evaluates at a rational point where the denominator does not vanish.
    pub fn eval_at(&self, q0: &Rational) -> Result<Rational, LaurentError> {
        let d = eval_at(&self.den, q0)?;
        if d.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        Ok(eval_at(&self.num, q0)? / d)
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RationalFunction {}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Monic greatest common divisor, up to a monomial factor, of two Laurent
/// polynomials (zero inputs are absorbed).
///
/// Low-degree inputs use plain monic Euclidean division, whose rational
/// coefficient growth is harmless at such sizes and which avoids content
/// bookkeeping. Larger inputs run a primitive remainder sequence: every
/// intermediate polynomial is rescaled to integer coefficients with content
/// one and the division step is fraction free, which keeps coefficients
/// bounded where the monic sequence would blow up.
pub(crate) fn poly_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    const PRIMITIVE_THRESHOLD: i64 = 16;
    let span = |p: &LaurentPoly| match (p.min_exp(), p.max_exp()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0,
    };
    if span(a) <= PRIMITIVE_THRESHOLD && span(b) <= PRIMITIVE_THRESHOLD {
        return poly_gcd_monic(a, b);
    }
    let mut x = primitive_part(a);
    let mut y = primitive_part(b);
    while !y.is_zero() {
        let r = pseudo_rem(&x, &y);
        x = y;
        y = primitive_part(&r);
    }
    if x.is_zero() {
        return LaurentPoly::one();
    }
    let lead = x.coeff(x.max_exp().unwrap());
    x.scale(&lead.recip())
}

/// Euclidean variant of [`poly_gcd`] for small operands.
fn poly_gcd_monic(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    let normalize = |p: &LaurentPoly| -> LaurentPoly {
        if p.is_zero() {
            return LaurentPoly::zero();
        }
        let shifted = p.shift(-p.min_exp().unwrap());
        let lead = shifted.coeff(shifted.max_exp().unwrap());
        shifted.scale(&lead.recip())
    };
    let mut x = normalize(a);
    let mut y = normalize(b);
    while !y.is_zero() {
        let r = poly_rem(&x, &y);
        x = y;
        y = normalize(&r);
    }
    if x.is_zero() {
        LaurentPoly::one()
    } else {
        x
    }
}

/// Remainder of ordinary polynomial division (inputs must be ordinary, i.e.
/// have no negative exponents; the divisor must be nonzero).
fn poly_rem(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    let deg_b = b.max_exp().expect("nonzero divisor");
    let lead_b = b.coeff(deg_b);
    let mut rem = a.clone();
    while let Some(deg_r) = rem.max_exp() {
        if deg_r < deg_b {
            break;
        }
        let factor = rem.coeff(deg_r) / &lead_b;
        rem = &rem - &b.scale(&factor).shift(deg_r - deg_b);
    }
    rem
}

/// Divides out the monomial prefactor and the rational content, leaving an
/// ordinary polynomial with coprime integer coefficients and a nonzero
/// constant term.
fn primitive_part(p: &LaurentPoly) -> LaurentPoly {
    if p.is_zero() {
        return LaurentPoly::zero();
    }
    let shifted = p.shift(-p.min_exp().unwrap());
    let mut numer = BigInt::zero();
    let mut denom = BigInt::one();
    for (_, c) in shifted.terms() {
        numer = numer.gcd(c.numer());
        denom = denom.lcm(c.denom());
    }
    let content = Rational::new(numer, denom);
    shifted.scale(&content.recip())
}

/// Fraction-free remainder of ordinary polynomial division: the true
/// remainder times a power of the divisor's leading coefficient. Inputs must
/// have no negative exponents and the divisor must be nonzero.
fn pseudo_rem(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    let deg_b = b.max_exp().expect("nonzero divisor");
    let lead_b = b.coeff(deg_b);
    let mut rem = a.clone();
    while let Some(deg_r) = rem.max_exp() {
        if deg_r < deg_b {
            break;
        }
        let lead_r = rem.coeff(deg_r);
        rem = &rem.scale(&lead_b) - &b.scale(&lead_r).shift(deg_r - deg_b);
    }
    rem
}

fn render_coeff(c: &Rational) -> String {
    if c.is_integer() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for LaurentPoly {
    /// Canonical text form: terms in decreasing exponent order, explicit
    /// signs, exponents written as `q^-1`, no spaces.
    ///
    /// ```
    /// use hecke::laurent::LaurentPoly;
    ///
    /// let p: LaurentPoly = "q^3+2q^2+3q-2-q^-1".parse().unwrap();
    /// assert_eq!(p.to_string(), "q^3+2q^2+3q-2-q^-1");
    /// ```
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let negative = c.is_negative();
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            let mag = c.abs();
            if *e == 0 {
                write!(f, "{}", render_coeff(&mag))?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}", render_coeff(&mag))?;
                }
                if *e == 1 {
                    write!(f, "q")?;
                } else {
                    write!(f, "q^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

/// Error for the canonical polynomial text grammar.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid polynomial text: {0}")]
pub struct ParsePolyError(String);

impl FromStr for LaurentPoly {
    type Err = ParsePolyError;

    /// Parses the canonical rendering produced by `Display`.
    ///
    /// Whitespace is ignored. Each term is an optional rational coefficient
    /// (`3`, `3/2`) followed by an optional `q` power (`q`, `q^4`, `q^-1`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(ParsePolyError("empty input".into()));
        }
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let mut out = LaurentPoly::zero();
        let err = |msg: &str| ParsePolyError(format!("{msg} in {text:?}"));

        let read_digits = |pos: &mut usize| -> Option<BigInt> {
            let start = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            if *pos == start {
                None
            } else {
                Some(text[start..*pos].parse().unwrap())
            }
        };

        while pos < bytes.len() {
            let mut sign = 1i64;
            if bytes[pos] == b'+' {
                pos += 1;
            } else if bytes[pos] == b'-' {
                sign = -1;
                pos += 1;
            } else if pos > 0 {
                return Err(err("expected '+' or '-' between terms"));
            }
            let mut coeff = match read_digits(&mut pos) {
                Some(n) => {
                    if pos < bytes.len() && bytes[pos] == b'/' {
                        pos += 1;
                        let d = read_digits(&mut pos).ok_or_else(|| err("expected denominator"))?;
                        if d.is_zero() {
                            return Err(err("zero denominator"));
                        }
                        Rational::new(n, d)
                    } else {
                        Rational::from_integer(n)
                    }
                }
                None => Rational::one(),
            };
            let mut exp = 0i64;
            let mut saw_q = false;
            if pos < bytes.len() && bytes[pos] == b'q' {
                saw_q = true;
                pos += 1;
                exp = 1;
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    let mut esign = 1i64;
                    if pos < bytes.len() && bytes[pos] == b'-' {
                        esign = -1;
                        pos += 1;
                    }
                    let e = read_digits(&mut pos).ok_or_else(|| err("expected exponent"))?;
                    let e: i64 = e.try_into().map_err(|_| err("exponent out of range"))?;
                    exp = esign * e;
                }
            }
            if !saw_q && coeff.is_one() && (pos == 0 || !bytes[pos - 1].is_ascii_digit()) {
                return Err(err("expected a term"));
            }
            if sign < 0 {
                coeff = -coeff;
            }
            out.add_term(exp, coeff);
        }
        Ok(out)
    }
}

mod serde_impl {
    use super::*;
    use serde::de::Error as DeError;
    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    fn rational_to_string(c: &Rational) -> String {
        format!("{}/{}", c.numer(), c.denom())
    }

    fn rational_from_string(s: &str) -> Result<Rational, String> {
        let parse_int = |t: &str| -> Result<BigInt, String> {
            t.parse().map_err(|_| format!("invalid integer {t:?}"))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err("zero denominator".into());
                }
                Ok(Rational::new(parse_int(n)?, d))
            }
            None => Ok(Rational::from_integer(parse_int(s)?)),
        }
    }

    impl Serialize for LaurentPoly {
        /// Serializes as a JSON object mapping exponent (text key) to
        /// coefficient (text `"num/den"`), in increasing exponent order.
        fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
            let mut map = serializer.serialize_map(Some(self.term_count()))?;
            for (e, c) in self.terms() {
                map.serialize_entry(&e.to_string(), &rational_to_string(c))?;
            }
            map.end()
        }
    }

    impl<'de> Deserialize<'de> for LaurentPoly {
        fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
            let raw = BTreeMap::<String, String>::deserialize(deserializer)?;
            let mut out = LaurentPoly::zero();
            for (k, v) in raw {
                let e: i64 = k.parse().map_err(|_| D::Error::custom(format!("bad exponent {k:?}")))?;
                let c = rational_from_string(&v).map_err(D::Error::custom)?;
                out.add_term(e, c);
            }
            Ok(out)
        }
    }

    impl Serialize for DeltaSeries {
        fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
            #[derive(Serialize)]
            struct Repr {
                order: usize,
                coeffs: Vec<String>,
            }
            Repr {
                order: self.order(),
                coeffs: self.coeffs().iter().map(rational_to_string).collect(),
            }
            .serialize(serializer)
        }
    }

    impl<'de> Deserialize<'de> for DeltaSeries {
        fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
            #[derive(Deserialize)]
            struct Repr {
                order: usize,
                coeffs: Vec<String>,
            }
            let repr = Repr::deserialize(deserializer)?;
            if repr.coeffs.len() != repr.order + 1 {
                return Err(D::Error::custom("series length does not match order"));
            }
            let coeffs = repr
                .coeffs
                .iter()
                .map(|s| rational_from_string(s).map_err(D::Error::custom))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(DeltaSeries::from_coeffs(coeffs))
        }
    }
}
