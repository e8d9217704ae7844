//! Dense complex eigensolver: Givens reduction to upper Hessenberg form
//! (cheap for the five-diagonal blocks, a no-op for companion matrices)
//! followed by an implicit single-shift QR iteration with Wilkinson shifts.
//!
//! Eigenvalues only, no Schur vectors. The QR sweep applies row rotations
//! immediately (contiguous in the row-major layout) and defers the
//! column-rotation tails of rows far above the bulge to a single contiguous
//! pass at the end of the sweep, which keeps the iteration cache-friendly on
//! size-2000 blocks.

use crate::error::{Error, Result};
use crate::scalar::{C, Real};
use num_complex::Complex;
use num_traits::{One, Zero};

/// Square complex matrix in row-major storage.
#[derive(Clone, Debug)]
pub struct DenseMat<F: Real> {
    n: usize,
    a: Vec<C<F>>,
}

impl<F: Real> DenseMat<F> {
    pub fn zeros(n: usize) -> Self {
        DenseMat { n, a: vec![C::zero(); n * n] }
    }

    pub fn from_rows(n: usize, a: Vec<C<F>>) -> Self {
        assert_eq!(a.len(), n * n);
        DenseMat { n, a }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C<F> {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C<F>) {
        self.a[i * self.n + j] = v;
    }

    pub fn data(&self) -> &[C<F>] {
        &self.a
    }
}

/// Complex Givens rotation G = [[c, s], [-conj(s), c]] with real c ≥ 0 such
/// that G (x, y)ᵀ = (r, 0)ᵀ.
#[inline]
fn givens<F: Real>(x: C<F>, y: C<F>) -> (F, C<F>) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == F::zero() {
        return (F::one(), C::zero());
    }
    if ax == F::zero() {
        return (F::zero(), y.conj() / ay);
    }
    let d = (ax * ax + ay * ay).sqrt();
    let c = ax / d;
    let s = (x / ax) * (y.conj() / d);
    (c, s)
}

#[inline]
fn rotate_pair<F: Real>(c: F, s: C<F>, a: C<F>, b: C<F>) -> (C<F>, C<F>) {
    (a * c + s * b, -(s.conj()) * a + b * c)
}

/// Reduce to upper Hessenberg form by Givens similarity transforms,
/// skipping entries that are already zero (so a banded input costs O(n²)).
pub fn hessenberg_reduce<F: Real>(m: &mut DenseMat<F>) {
    let n = m.n;
    if n < 3 {
        return;
    }
    for j in 0..n - 2 {
        for i in (j + 2..n).rev() {
            let y = m.at(i, j);
            if y.is_zero() {
                continue;
            }
            let x = m.at(i - 1, j);
            let (c, s) = givens(x, y);
            // rows i-1, i over columns j..n
            for col in j..n {
                let (p, q) = rotate_pair(c, s, m.at(i - 1, col), m.at(i, col));
                m.set(i - 1, col, p);
                m.set(i, col, q);
            }
            m.set(i, j, C::zero());
            // columns i-1, i over all rows (zero pairs skipped)
            for row in 0..n {
                let a = m.at(row, i - 1);
                let b = m.at(row, i);
                if a.is_zero() && b.is_zero() {
                    continue;
                }
                m.set(row, i - 1, a * c + b * s.conj());
                m.set(row, i, -(a * s) + b * c);
            }
        }
    }
}

/// Parlett–Reinsch balancing (diagonal similarity with powers of two);
/// preserves Hessenberg structure and improves companion-matrix spectra.
pub fn balance<F: Real>(m: &mut DenseMat<F>) {
    let n = m.n;
    let radix = F::lit(2.0);
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut col_norm = F::zero();
            let mut row_norm = F::zero();
            for j in 0..n {
                if j != i {
                    col_norm += m.at(j, i).norm();
                    row_norm += m.at(i, j).norm();
                }
            }
            if col_norm == F::zero() || row_norm == F::zero() {
                continue;
            }
            let start = col_norm + row_norm;
            let mut f = F::one();
            let mut c = col_norm;
            let mut r = row_norm;
            while c < r / radix {
                c *= radix;
                r /= radix;
                f *= radix;
            }
            while c >= r * radix {
                c /= radix;
                r *= radix;
                f /= radix;
            }
            if (c + r) < F::lit(0.95) * start && f != F::one() {
                converged = false;
                let inv = F::one() / f;
                for j in 0..n {
                    let v = m.at(i, j) * inv;
                    m.set(i, j, v);
                }
                for j in 0..n {
                    let v = m.at(j, i) * f;
                    m.set(j, i, v);
                }
            }
        }
        if converged {
            break;
        }
    }
}

fn eig2<F: Real>(a: C<F>, b: C<F>, c0: C<F>, d: C<F>) -> (C<F>, C<F>) {
    let half = F::lit(0.5);
    let mean = (a + d) * half;
    let disc = (a - d) * (a - d) * F::lit(0.25) + b * c0;
    let s = disc.sqrt();
    (mean + s, mean - s)
}

fn wilkinson_shift<F: Real>(a: C<F>, b: C<F>, c0: C<F>, d: C<F>) -> C<F> {
    let (l1, l2) = eig2(a, b, c0, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvalues of an upper Hessenberg matrix by implicit single-shift QR.
pub fn hessenberg_eigenvalues<F: Real>(m: &mut DenseMat<F>) -> Result<Vec<C<F>>> {
    let n = m.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    if m.a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("non-finite entry in eigensolver input".into()));
    }
    let scale = m.a.iter().map(|z| z.norm()).fold(F::zero(), F::max);
    if scale == F::zero() {
        return Ok(vec![C::zero(); n]);
    }
    let ulp = F::epsilon();
    let small = F::min_positive_value() / ulp;

    let mut eigs: Vec<C<F>> = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut stalls = 0usize;

    'outer: loop {
        // deflate trivial 1×1 / locate the active block [l..=hi]
        let mut l = hi;
        while l > 0 {
            let sub = m.at(l, l - 1).norm();
            let mut tst = m.at(l - 1, l - 1).norm() + m.at(l, l).norm();
            if tst == F::zero() {
                tst = scale;
            }
            if sub <= (ulp * tst).max(small) {
                m.set(l, l - 1, C::zero());
                break;
            }
            l -= 1;
        }

        if l == hi {
            eigs.push(m.at(hi, hi));
            if hi == 0 {
                break 'outer;
            }
            hi -= 1;
            stalls = 0;
            continue;
        }
        if l + 1 == hi {
            let (e1, e2) = eig2(m.at(l, l), m.at(l, hi), m.at(hi, l), m.at(hi, hi));
            eigs.push(e2);
            eigs.push(e1);
            if l == 0 {
                break 'outer;
            }
            hi = l - 1;
            stalls = 0;
            continue;
        }

        stalls += 1;
        if stalls > 50 {
            return Err(Error::Numeric(format!(
                "QR iteration exceeded 50 sweeps for the eigenvalue at block [{l}, {hi}]"
            )));
        }
        let mu = if stalls.is_multiple_of(12) {
            // exceptional shift to break symmetric stalls
            m.at(hi, hi) + Complex::new(F::lit(0.75) * m.at(hi, hi - 1).norm(), F::zero())
        } else {
            wilkinson_shift(
                m.at(hi - 1, hi - 1),
                m.at(hi - 1, hi),
                m.at(hi, hi - 1),
                m.at(hi, hi),
            )
        };
        sweep(m, l, hi, mu);
    }

    Ok(eigs)
}

/// One implicit single-shift bulge chase on the active block [l..=hi].
fn sweep<F: Real>(m: &mut DenseMat<F>, l: usize, hi: usize, mu: C<F>) {
    let n = m.n;
    let mut rots: Vec<(F, C<F>)> = Vec::with_capacity(hi - l);
    let mut x = m.at(l, l) - mu;
    let mut y = m.at(l + 1, l);

    for k in l..hi {
        let (c, s) = givens(x, y);
        rots.push((c, s));

        // rows k, k+1 over columns col0..=hi (contiguous slices)
        let col0 = if k == l { l } else { k - 1 };
        {
            let (top, bottom) = m.a.split_at_mut((k + 1) * n);
            let row_k = &mut top[k * n + col0..k * n + hi + 1];
            let row_k1 = &mut bottom[col0..hi + 1];
            for (a, b) in row_k.iter_mut().zip(row_k1.iter_mut()) {
                let (p, q) = rotate_pair(c, s, *a, *b);
                *a = p;
                *b = q;
            }
        }

        // immediate column application on the bulge window rows
        let row_lo = if k == l { l } else { k - 1 };
        let row_hi = (k + 2).min(hi);
        for row in row_lo..=row_hi {
            let a = m.at(row, k);
            let b = m.at(row, k + 1);
            m.set(row, k, a * c + b * s.conj());
            m.set(row, k + 1, -(a * s) + b * c);
        }

        if k + 1 < hi {
            x = m.at(k + 1, k);
            y = m.at(k + 2, k);
        }
    }

    // deferred column-rotation tails: row i still needs G_k for k ≥ i+2,
    // applied in generation order along the contiguous row
    for i in l..=hi.saturating_sub(3) {
        let row = &mut m.a[i * n..(i + 1) * n];
        for k in (i + 2)..hi {
            let (c, s) = rots[k - l];
            let a = row[k];
            let b = row[k + 1];
            row[k] = a * c + b * s.conj();
            row[k + 1] = -(a * s) + b * c;
        }
    }
}

/// Eigenvalues of a general square complex matrix.
pub fn eigenvalues<F: Real>(mut m: DenseMat<F>) -> Result<Vec<C<F>>> {
    balance(&mut m);
    hessenberg_reduce(&mut m);
    hessenberg_eigenvalues(&mut m)
}

/// Roots of a polynomial given by ascending coefficients c₀ + c₁ z + …,
/// via the balanced companion matrix, polished by compensated-Horner Newton
/// steps (the raw companion spectrum carries the monomial-basis condition
/// number; the polish brings simple roots back to working precision).
pub fn companion_roots<F: Real>(coeffs: &[C<F>]) -> Result<Vec<C<F>>> {
    let mut cs = coeffs.to_vec();
    while cs.last().map(|c| c.is_zero()).unwrap_or(false) {
        cs.pop();
    }
    if cs.len() <= 1 {
        return Err(Error::Usage("polynomial must have positive degree".into()));
    }
    let deg = cs.len() - 1;
    let lead = cs[deg];
    let mut m = DenseMat::zeros(deg);
    for (i, ci) in cs.iter().take(deg).enumerate() {
        m.set(i, deg - 1, -(*ci / lead));
        if i + 1 < deg {
            m.set(i + 1, i, C::one());
        }
    }
    balance(&mut m);
    let mut roots = hessenberg_eigenvalues(&mut m)?;
    for root in roots.iter_mut() {
        *root = newton_polish(&cs, *root, 3);
    }
    Ok(roots)
}

// error-free transforms (Dekker/Knuth); the splitter depends on the
// mantissa width and is derived from the machine epsilon
pub(crate) fn splitter<F: Real>() -> F {
    let bits = (-F::epsilon().log2()).round();
    ((bits + F::one()) * F::lit(0.5)).ceil().exp2() + F::one()
}

#[inline]
pub(crate) fn two_sum<F: Real>(a: F, b: F) -> (F, F) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
pub(crate) fn two_prod<F: Real>(a: F, b: F, split: F) -> (F, F) {
    let p = a * b;
    let ca = split * a;
    let ah = ca - (ca - a);
    let al = a - ah;
    let cb = split * b;
    let bh = cb - (cb - b);
    let bl = b - bh;
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

/// Sum a + b with the rounding error reported separately, componentwise.
#[inline]
pub(crate) fn ctwo_sum<F: Real>(a: C<F>, b: C<F>) -> (C<F>, C<F>) {
    let (re, ere) = two_sum(a.re, b.re);
    let (im, eim) = two_sum(a.im, b.im);
    (Complex::new(re, im), Complex::new(ere, eim))
}

/// Product a·b with a first-order error estimate.
#[inline]
pub(crate) fn ctwo_prod<F: Real>(a: C<F>, b: C<F>, split: F) -> (C<F>, C<F>) {
    let (p1, e1) = two_prod(a.re, b.re, split);
    let (p2, e2) = two_prod(a.im, b.im, split);
    let (p3, e3) = two_prod(a.re, b.im, split);
    let (p4, e4) = two_prod(a.im, b.re, split);
    let (re, e5) = two_sum(p1, -p2);
    let (im, e6) = two_sum(p3, p4);
    (Complex::new(re, im), Complex::new(e1 - e2 + e5, e3 + e4 + e6))
}

/// Horner evaluation of Σ c_k z^k with a first-order compensation term,
/// accurate as if computed in roughly twice the working precision.
pub(crate) fn comp_horner<F: Real>(coeffs: &[C<F>], z: C<F>) -> C<F> {
    let split = splitter::<F>();
    let mut main = C::<F>::zero();
    let mut comp = C::<F>::zero();
    for ck in coeffs.iter().rev() {
        // main * z with error terms
        let (p1, e1) = two_prod(main.re, z.re, split);
        let (p2, e2) = two_prod(main.im, z.im, split);
        let (p3, e3) = two_prod(main.re, z.im, split);
        let (p4, e4) = two_prod(main.im, z.re, split);
        let (re_m, e5) = two_sum(p1, -p2);
        let (im_m, e6) = two_sum(p3, p4);
        // + coefficient
        let (re, e7) = two_sum(re_m, ck.re);
        let (im, e8) = two_sum(im_m, ck.im);
        comp = comp * z + Complex::new(e1 - e2 + e5 + e7, e3 + e4 + e6 + e8);
        main = Complex::new(re, im);
    }
    main + comp
}

pub(crate) fn horner_derivative<F: Real>(coeffs: &[C<F>], z: C<F>) -> C<F> {
    let mut acc = C::<F>::zero();
    for (k, ck) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * z + *ck * F::from_usize(k).unwrap();
    }
    acc
}

/// A few Newton steps with compensated evaluation; returns the input when
/// the derivative collapses (multiple roots keep their companion value).
fn newton_polish<F: Real>(coeffs: &[C<F>], mut z: C<F>, iters: usize) -> C<F> {
    for _ in 0..iters {
        let dp = horner_derivative(coeffs, z);
        if dp.norm_sqr() == F::zero() {
            return z;
        }
        let p = comp_horner(coeffs, z);
        let step = p / dp;
        // reject wild steps near root clusters
        if !step.re.is_finite() || !step.im.is_finite() || step.norm() > F::lit(0.1) {
            return z;
        }
        z -= step;
    }
    z
}

/// Newton polish against a polynomial held as a compensated coefficient
/// pair (main + comp): the evaluation error drops to second order in the
/// working precision, so roots of ill-conditioned monomial expansions are
/// recovered at full accuracy.
pub(crate) fn newton_polish_pair<F: Real>(
    main: &[C<F>],
    comp: &[C<F>],
    mut z: C<F>,
    iters: usize,
) -> C<F> {
    let horner_comp_part = |z: C<F>| {
        let mut acc = C::<F>::zero();
        for ck in comp.iter().rev() {
            acc = acc * z + *ck;
        }
        acc
    };
    for _ in 0..iters {
        let dp = horner_derivative(main, z);
        if dp.norm_sqr() == F::zero() {
            return z;
        }
        let p = comp_horner(main, z) + horner_comp_part(z);
        let step = p / dp;
        if !step.re.is_finite() || !step.im.is_finite() || step.norm() > F::lit(0.1) {
            return z;
        }
        z -= step;
    }
    z
}
