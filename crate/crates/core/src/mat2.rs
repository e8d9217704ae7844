//! Dense complex 2×2 matrices, the workhorse of the transfer-matrix side.

use crate::scalar::{c, C, Real};
use num_traits::{One, Zero};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<F: Real> {
    pub m: [[C<F>; 2]; 2],
}

impl<F: Real> Mat2<F> {
    pub fn new(a: C<F>, b: C<F>, d: C<F>, e: C<F>) -> Self {
        Mat2 { m: [[a, b], [d, e]] }
    }

    pub fn identity() -> Self {
        Mat2::new(C::one(), C::zero(), C::zero(), C::one())
    }

    pub fn zero() -> Self {
        Mat2::new(C::zero(), C::zero(), C::zero(), C::zero())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn mul_vec(&self, v: [C<F>; 2]) -> [C<F>; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn scale(&self, s: F) -> Self {
        let f = |z: C<F>| z * s;
        Mat2::new(f(self.m[0][0]), f(self.m[0][1]), f(self.m[1][0]), f(self.m[1][1]))
    }

    pub fn scale_c(&self, s: C<F>) -> Self {
        Mat2::new(self.m[0][0] * s, self.m[0][1] * s, self.m[1][0] * s, self.m[1][1] * s)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Mat2::new(
            self.m[0][0] + rhs.m[0][0],
            self.m[0][1] + rhs.m[0][1],
            self.m[1][0] + rhs.m[1][0],
            self.m[1][1] + rhs.m[1][1],
        )
    }

    pub fn det(&self) -> C<F> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> C<F> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn adjoint(&self) -> Self {
        Mat2::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm_sqr() == F::zero() {
            return None;
        }
        Some(Mat2::new(self.m[1][1] / d, -self.m[0][1] / d, -self.m[1][0] / d, self.m[0][0] / d))
    }

    pub fn frobenius(&self) -> F {
        let s = self.m[0][0].norm_sqr()
            + self.m[0][1].norm_sqr()
            + self.m[1][0].norm_sqr()
            + self.m[1][1].norm_sqr();
        s.sqrt()
    }

    /// Largest singular value. For a 2×2 matrix
    /// σ±² = (‖A‖_F² ± √(‖A‖_F⁴ − 4|det A|²)) / 2.
    pub fn op_norm(&self) -> F {
        let f2 = self.m[0][0].norm_sqr()
            + self.m[0][1].norm_sqr()
            + self.m[1][0].norm_sqr()
            + self.m[1][1].norm_sqr();
        let d = self.det().norm();
        let disc = (f2 * f2 - F::lit(4.0) * d * d).max(F::zero());
        (((f2 + disc.sqrt()) / F::lit(2.0)).max(F::zero())).sqrt()
    }

    /// Eigenvalues via the quadratic formula, largest modulus first.
    pub fn eigenvalues(&self) -> (C<F>, C<F>) {
        let two = F::lit(2.0);
        let h = self.trace() / c(two, F::zero());
        let disc = h * h - self.det();
        let s = disc.sqrt();
        let (l1, l2) = (h + s, h - s);
        if l1.norm() >= l2.norm() {
            (l1, l2)
        } else {
            (l2, l1)
        }
    }

    pub fn max_abs(&self) -> F {
        self.m[0][0]
            .norm()
            .max(self.m[0][1].norm())
            .max(self.m[1][0].norm())
            .max(self.m[1][1].norm())
    }
}

/// Direct sum of 2×2 rotation-like complex blocks is not needed; what is
/// needed repeatedly is the spectral radius.
pub fn spectral_radius<F: Real>(m: &Mat2<F>) -> F {
    m.eigenvalues().0.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cis;
    use num_complex::Complex;

    #[test]
    fn inverse_roundtrip() {
        let m = Mat2::<f64>::new(c(1.0, 2.0), c(0.5, -1.0), c(3.0, 0.0), c(-2.0, 0.25));
        let inv = m.inverse().unwrap();
        let p = m.mul(&inv);
        assert!((p.m[0][0] - Complex::one()).norm() < 1e-14);
        assert!(p.m[0][1].norm() < 1e-14);
        assert!(p.m[1][0].norm() < 1e-14);
        assert!((p.m[1][1] - Complex::one()).norm() < 1e-14);
    }

    #[test]
    fn op_norm_of_rotation_is_one() {
        let th = 0.77;
        let m: Mat2<f64> = Mat2::new(cis(th), Complex::zero(), Complex::zero(), cis(-2.0 * th));
        // the σ² formula loses half the digits near σ_max = σ_min
        assert!((m.op_norm() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let m = Mat2::<f64>::new(c(3.0, 0.0), Complex::zero(), Complex::zero(), c(0.5, 0.0));
        let (l1, l2) = m.eigenvalues();
        assert!((l1 - c(3.0, 0.0)).norm() < 1e-14);
        assert!((l2 - c(0.5, 0.0)).norm() < 1e-14);
    }
}
