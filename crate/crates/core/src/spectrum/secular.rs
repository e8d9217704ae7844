//! Secular-polynomial route to the spectrum of a truncated block: the
//! eigenvalue condition ⟨a_j(z)| Φ^{m₀,n₀}(z) b_k(z)⟩ = 0 with boundary
//! vectors chosen by the parities of the cut sites. Exact Laurent
//! arithmetic turns the condition into a polynomial of degree N − M whose
//! roots are the eigenvalues of V^{M,N}; they are extracted through the
//! balanced companion matrix.

use crate::eig;
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::model::{Coefficients, PhaseField, SiteInterval};
use crate::scalar::{c, C, Real};
use crate::spectrum::measure::SpectralMeasure;
use crate::transfer::transfer_laurent;
use num_traits::Zero;

type LVec2<F> = [LaurentPoly<C<F>>; 2];

/// The four boundary vectors b₁..b₄ of the cut eigenvalue relations and the
/// two bra vectors used in the secular pairing. On the unit circle
/// bra_j(z)ᵀ w equals the Hermitian pairing ⟨a_j(e^{iλ})|w⟩ with the choice
/// a_j(e^{iλ}) = b_j(e^{−iλ}): the conjugation is applied to the constant
/// coefficient vectors once, so the pairing stays a finite Laurent object.
#[derive(Clone, Debug)]
pub struct BoundaryVectors<F: Real> {
    pub b: [LVec2<F>; 4],
    pub bra: [LVec2<F>; 2],
}

pub fn boundary_vectors<F: Real>(params: Coefficients<F>) -> BoundaryVectors<F> {
    let r = params.r();
    let t = params.t();
    let t2 = params.t2();
    let zero = F::zero();
    let mono = LaurentPoly::monomial;

    // b1 = (1/t²) [ -it(r - 1/z) ; (r - z) + r(r - 1/z) ]
    let b1: LVec2<F> = [
        mono(0, c(zero, -(r * t) / t2)).add(&mono(-1, c(zero, t / t2))),
        mono(1, c(-(F::one() / t2), zero))
            .add(&mono(0, c(r * (F::one() + r) / t2, zero)))
            .add(&mono(-1, c(-(r / t2), zero))),
    ];
    // b2 = [ 1 ; (z - r)/(it) ]
    let b2: LVec2<F> = [
        mono(0, c(F::one(), zero)),
        mono(1, c(zero, -(F::one() / t))).add(&mono(0, c(zero, r / t))),
    ];
    // b3 = (1/t²) [ (r - z) + r(r - 1/z) ; -it(r - 1/z) ]
    let b3: LVec2<F> = [b1[1].clone(), b1[0].clone()];
    // b4 = [ (z - r)/(it) ; 1 ]
    let b4: LVec2<F> = [b2[1].clone(), b2[0].clone()];

    let conj_coeffs = |v: &LVec2<F>| -> LVec2<F> {
        [v[0].map(|z| z.conj()), v[1].map(|z| z.conj())]
    };
    let bra1 = conj_coeffs(&b1);
    let bra2 = conj_coeffs(&b2);

    BoundaryVectors { b: [b1, b2, b3, b4], bra: [bra1, bra2] }
}

/// Outcome of the secular route.
#[derive(Clone, Debug)]
pub struct SecularOutcome<F: Real> {
    pub measure: SpectralMeasure<F>,
    /// Normalized secular polynomial (constant term nonzero).
    pub poly: LaurentPoly<C<F>>,
    pub degree: usize,
    pub leading_abs: F,
    /// Half the number of sites spanned by the transfer product, n₀ − m₀.
    pub half_span: i64,
    /// Roots within 1e−3 of z = −1, flagged for dense-route confirmation.
    pub near_minus_one: usize,
}

/// Laurent expansion held as a compensated coefficient pair: `main` plus a
/// first-order error track `comp`. The transfer product convolves dozens of
/// factors whose rounding, amplified by the monomial-basis condition number
/// of the final polynomial, would otherwise cost half the eigenphase digits.
#[derive(Clone, Debug)]
struct CompPoly<F: Real> {
    lo: i64,
    main: Vec<C<F>>,
    comp: Vec<C<F>>,
}

impl<F: Real> CompPoly<F> {
    fn zero() -> Self {
        CompPoly { lo: 0, main: Vec::new(), comp: Vec::new() }
    }

    fn from_laurent(p: &LaurentPoly<C<F>>) -> Self {
        match p.lo() {
            None => Self::zero(),
            Some(lo) => {
                let (_, coeffs) = p.parts();
                CompPoly {
                    lo,
                    main: coeffs.to_vec(),
                    comp: vec![C::zero(); coeffs.len()],
                }
            }
        }
    }

    fn is_zero(&self) -> bool {
        self.main.is_empty()
    }

    fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(o.lo);
        let hi = (self.lo + self.main.len() as i64).max(o.lo + o.main.len() as i64);
        let mut main = vec![C::<F>::zero(); (hi - lo) as usize];
        let mut comp = vec![C::<F>::zero(); (hi - lo) as usize];
        for (i, &v) in self.main.iter().enumerate() {
            main[(self.lo - lo) as usize + i] = v;
            comp[(self.lo - lo) as usize + i] = self.comp[i];
        }
        for (i, &v) in o.main.iter().enumerate() {
            let k = (o.lo - lo) as usize + i;
            let (sum, err) = eig::ctwo_sum(main[k], v);
            main[k] = sum;
            comp[k] += err + o.comp[i];
        }
        CompPoly { lo, main, comp }
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let split = eig::splitter::<F>();
        let len = self.main.len() + o.main.len() - 1;
        let mut main = vec![C::<F>::zero(); len];
        let mut comp = vec![C::<F>::zero(); len];
        for (i, &a) in self.main.iter().enumerate() {
            for (j, &b) in o.main.iter().enumerate() {
                let k = i + j;
                let (p, perr) = eig::ctwo_prod(a, b, split);
                let (sum, serr) = eig::ctwo_sum(main[k], p);
                main[k] = sum;
                comp[k] += perr + serr + a * o.comp[j] + self.comp[i] * b;
            }
        }
        CompPoly { lo: self.lo + o.lo, main, comp }
    }

    /// Collapse to an ordinary Laurent expansion (main + comp).
    fn collapse(&self) -> LaurentPoly<C<F>> {
        LaurentPoly::from_coeffs(
            self.lo,
            self.main.iter().zip(&self.comp).map(|(&m, &c0)| m + c0).collect(),
        )
    }
}

type CompVec2<F> = [CompPoly<F>; 2];

struct CompMat2<F: Real> {
    m: [[CompPoly<F>; 2]; 2],
}

impl<F: Real> CompMat2<F> {
    fn mul_vec(&self, v: &CompVec2<F>) -> CompVec2<F> {
        [
            self.m[0][0].mul(&v[0]).add(&self.m[0][1].mul(&v[1])),
            self.m[1][0].mul(&v[0]).add(&self.m[1][1].mul(&v[1])),
        ]
    }
}

/// Eigenphases of V^{M,N} through the secular polynomial. The phase field
/// must cover [M+1, N]; the transfer product never touches the phases
/// zeroed by end cuts.
pub fn secular_roots<F: Real>(
    phases: &PhaseField<F>,
    params: Coefficients<F>,
    m: i64,
    n: i64,
) -> Result<SecularOutcome<F>> {
    if n - m <= 4 {
        return Err(Error::Usage(format!(
            "secular window [{}, {}] too small: need N − M > 4",
            m + 1,
            n
        )));
    }
    let need = SiteInterval::new(m + 1, n)?;
    if !phases.window().contains_interval(need) {
        return Err(Error::Usage(format!(
            "phase window {:?} does not cover the block sites {:?}",
            phases.window(),
            need
        )));
    }

    let m_even = m.rem_euclid(2) == 0;
    let n_even = n.rem_euclid(2) == 0;
    let m0 = if m_even { m / 2 } else { (m - 1) / 2 };
    let n0 = if n_even { n / 2 } else { (n + 1) / 2 };
    let k_idx = if m_even { 1usize } else { 2 };
    let j_idx = if n_even { 1usize } else { 2 };

    let bv = boundary_vectors(params);
    let comp2 = |v: &LVec2<F>| -> CompVec2<F> {
        [CompPoly::from_laurent(&v[0]), CompPoly::from_laurent(&v[1])]
    };

    // Φ^{m0,n0} b_k accumulated right-to-left in compensated arithmetic
    let mut vec = comp2(&bv.b[k_idx - 1]);
    for kk in (m0 + 2)..=(n0 - 1) {
        let t_l = transfer_laurent(phases.eta(2 * kk), phases.eta(2 * kk - 1), params);
        let t_c = CompMat2 {
            m: [
                [CompPoly::from_laurent(&t_l.m[0][0]), CompPoly::from_laurent(&t_l.m[0][1])],
                [CompPoly::from_laurent(&t_l.m[1][0]), CompPoly::from_laurent(&t_l.m[1][1])],
            ],
        };
        vec = t_c.mul_vec(&vec);
    }
    let bra = comp2(&bv.bra[j_idx - 1]);
    let pairing = bra[0].mul(&vec[0]).add(&bra[1].mul(&vec[1]));

    let collapsed = pairing.collapse();
    let lo = collapsed
        .lo()
        .ok_or_else(|| Error::Numeric("secular pairing vanished identically".into()))?;
    let poly = collapsed.shift(-lo);

    let degree = poly.hi().unwrap() as usize;
    let expected = (2 * (n0 - m0) + 2 - (k_idx as i64 + j_idx as i64)) as usize;
    if degree != expected || degree != (n - m) as usize {
        return Err(Error::Numeric(format!(
            "secular polynomial degree {degree} does not match the block dimension {} \
             (parity formula {expected})",
            n - m
        )));
    }

    let (plo, coeffs) = poly.parts();
    debug_assert_eq!(plo, 0);
    let raw_roots = eig::companion_roots(coeffs)?;

    // refine against the compensated pair, aligned with the shifted poly
    let offset = (lo - pairing.lo) as usize;
    let main_shifted = &pairing.main[offset..];
    let comp_shifted = &pairing.comp[offset..];
    let roots: Vec<C<F>> = raw_roots
        .into_iter()
        .map(|root| eig::newton_polish_pair(main_shifted, comp_shifted, root, 3))
        .collect();

    let circle_tol = F::lit(1e-6);
    for root in &roots {
        let dev = (root.norm() - F::one()).abs();
        if dev > circle_tol {
            return Err(Error::Numeric(format!(
                "secular root off the unit circle by {dev:e} (Laurent arithmetic bug)"
            )));
        }
    }
    let near_minus_one = roots
        .iter()
        .filter(|r| (*r - c(-F::one(), F::zero())).norm() < F::lit(1e-3))
        .count();
    let measure = SpectralMeasure::from_eigenvalues(&roots, circle_tol)?;
    let leading_abs = poly.coeff(degree as i64).norm();

    Ok(SecularOutcome {
        measure,
        poly,
        degree,
        leading_abs,
        half_span: n0 - m0,
        near_minus_one,
    })
}
