//! Finite Laurent expansions with exact coefficient arithmetic.
//!
//! The coefficient ring is generic: `Complex<F>` for secular polynomials,
//! `BigInt`/`BigRational` for the balanced path-counting identities, plain
//! reals for generating functions. No truncation ever happens; products are
//! full convolutions.

use crate::scalar::{C, Real};
use num_traits::{One, Zero};
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficient ring requirements.
pub trait Coeff:
    Clone
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
}

impl<T> Coeff for T where
    T: Clone
        + PartialEq
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
{
}

/// `Σ_k c_k x^k` over a finite exponent range; zero is the empty expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly<T: Coeff> {
    lo: i64,
    coeffs: Vec<T>,
}

impl<T: Coeff> LaurentPoly<T> {
    pub fn zero() -> Self {
        LaurentPoly { lo: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        LaurentPoly { lo: 0, coeffs: vec![T::one()] }
    }

    pub fn monomial(k: i64, c: T) -> Self {
        LaurentPoly { lo: k, coeffs: vec![c] }.trimmed()
    }

    /// Build from the coefficient of `x^lo` upward; trailing/leading zeros trimmed.
    pub fn from_coeffs(lo: i64, coeffs: Vec<T>) -> Self {
        LaurentPoly { lo, coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.lo = 0;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with nonzero coefficient (None for the zero expansion).
    pub fn lo(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.lo)
        }
    }

    /// Highest exponent with nonzero coefficient.
    pub fn hi(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.lo + self.coeffs.len() as i64 - 1)
        }
    }

    pub fn coeff(&self, k: i64) -> T {
        if self.is_zero() || k < self.lo || k >= self.lo + self.coeffs.len() as i64 {
            T::zero()
        } else {
            self.coeffs[(k - self.lo) as usize].clone()
        }
    }

    /// Coefficients in exponent order together with the lowest exponent.
    pub fn parts(&self) -> (i64, &[T]) {
        (self.lo, &self.coeffs)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(rhs.lo);
        let hi = (self.lo + self.coeffs.len() as i64).max(rhs.lo + rhs.coeffs.len() as i64);
        let mut coeffs = vec![T::zero(); (hi - lo) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.lo - lo) as usize + i] = c.clone();
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            let slot = &mut coeffs[(rhs.lo - lo) as usize + i];
            *slot = slot.clone() + c.clone();
        }
        LaurentPoly { lo, coeffs }.trimmed()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let slot = &mut coeffs[i + j];
                *slot = slot.clone() + a.clone() * b.clone();
            }
        }
        LaurentPoly { lo: self.lo + rhs.lo, coeffs }.trimmed()
    }

    pub fn scale(&self, s: &T) -> Self {
        LaurentPoly {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
        .trimmed()
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentPoly { lo: self.lo + k, coeffs: self.coeffs.clone() }
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> LaurentPoly<U> {
        LaurentPoly { lo: self.lo, coeffs: self.coeffs.iter().map(&f).collect() }.trimmed()
    }
}

impl<F: Real> LaurentPoly<C<F>> {
    /// Evaluate at a nonzero complex point.
    pub fn eval(&self, z: C<F>) -> C<F> {
        if self.is_zero() {
            return C::zero();
        }
        let mut acc: C<F> = C::zero();
        for coeff in self.coeffs.iter().rev() {
            acc = acc * z + *coeff;
        }
        acc * z.powi(self.lo as i32)
    }

    pub fn max_coeff_norm(&self) -> F {
        self.coeffs.iter().map(|c| c.norm()).fold(F::zero(), F::max)
    }
}

impl<F: Real> LaurentPoly<F> {
    /// Lift real coefficients into the complex plane.
    pub fn to_complex(&self) -> LaurentPoly<C<F>> {
        self.map(|&c| C::new(c, F::zero()))
    }
}

/// 2×2 matrix of Laurent expansions.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentMat2<T: Coeff> {
    pub m: [[LaurentPoly<T>; 2]; 2],
}

impl<T: Coeff> LaurentMat2<T> {
    pub fn identity() -> Self {
        LaurentMat2 {
            m: [
                [LaurentPoly::one(), LaurentPoly::zero()],
                [LaurentPoly::zero(), LaurentPoly::one()],
            ],
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let e = |i: usize, j: usize| {
            self.m[i][0]
                .mul(&rhs.m[0][j])
                .add(&self.m[i][1].mul(&rhs.m[1][j]))
        };
        LaurentMat2 { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    pub fn mul_vec(&self, v: &[LaurentPoly<T>; 2]) -> [LaurentPoly<T>; 2] {
        [
            self.m[0][0].mul(&v[0]).add(&self.m[0][1].mul(&v[1])),
            self.m[1][0].mul(&v[0]).add(&self.m[1][1].mul(&v[1])),
        ]
    }
}

/// `row · M · col` where `row` is a 2-component Laurent row vector.
pub fn bilinear<T: Coeff>(
    row: &[LaurentPoly<T>; 2],
    mat: &LaurentMat2<T>,
    col: &[LaurentPoly<T>; 2],
) -> LaurentPoly<T> {
    let mv = mat.mul_vec(col);
    row[0].mul(&mv[0]).add(&row[1].mul(&mv[1]))
}
