//! Polynomials, Gegenbauer and Jacobi families, basis expansions, real roots
//! and quadrature.

mod measure;
mod poly;
mod roots;

pub use measure::{monic_orthogonal, monic_orthogonal_family, partial_product_expansion, quadrature, JacobiMeasure};
pub use poly::Poly;
pub use roots::{real_roots, RealRoot};

use crate::error::Result;
use crate::exactfield::{rat, Rational, Scalar};

/// The positive-definite kernel family of a geometry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// C_i^lambda, orthogonal for (1-t^2)^(lambda-1/2) dt.
    Gegenbauer { lambda: Rational },
    /// Monic Jacobi polynomials for (1-t)^alpha (1+t)^beta dt.
    Jacobi { alpha: Rational, beta: Rational },
}

impl Kernel {
    /// Gegenbauer kernel of the sphere S^(n-1) in R^n.
    pub fn sphere(n: usize) -> Self {
        Kernel::Gegenbauer { lambda: rat(n as i64 - 2, 2) }
    }

    pub fn jacobi(alpha: Rational, beta: Rational) -> Self {
        Kernel::Jacobi { alpha, beta }
    }

    pub fn measure<S: Scalar>(&self) -> JacobiMeasure<S> {
        match self {
            Kernel::Gegenbauer { lambda } => {
                let e = lambda - rat(1, 2);
                JacobiMeasure::new(e.clone(), e)
            }
            Kernel::Jacobi { alpha, beta } => JacobiMeasure::new(alpha.clone(), beta.clone()),
        }
    }

    /// Basis polynomials of degrees 0..=d over the rationals.
    pub fn basis(&self, d: usize) -> Vec<Poly<Rational>> {
        match self {
            Kernel::Gegenbauer { lambda } => gegenbauer_family(lambda, d),
            Kernel::Jacobi { alpha, beta } => {
                monic_orthogonal_family(&JacobiMeasure::<Rational>::new(alpha.clone(), beta.clone()), d)
                    .expect("Jacobi measures with alpha, beta > -1 are positive definite")
            }
        }
    }

    pub fn basis_in<S: Scalar>(&self, d: usize) -> Vec<Poly<S>> {
        self.basis(d).iter().map(|p| p.convert::<S>()).collect()
    }

    pub fn describe(&self) -> String {
        match self {
            Kernel::Gegenbauer { lambda } => format!("gegenbauer(lambda={lambda})"),
            Kernel::Jacobi { alpha, beta } => format!("jacobi(alpha={alpha}, beta={beta})"),
        }
    }
}

/// Gegenbauer polynomial C_i^lambda by the three-term recurrence.
///
/// At lambda = 0 the recurrence degenerates; the Chebyshev polynomial T_i
/// (the normalized limit of C_i^lambda / lambda) is returned instead.
pub fn gegenbauer(lambda: &Rational, i: usize) -> Poly<Rational> {
    gegenbauer_family(lambda, i).pop().expect("family is nonempty")
}

pub fn gegenbauer_family(lambda: &Rational, d: usize) -> Vec<Poly<Rational>> {
    let t = Poly::<Rational>::x();
    let mut out = vec![Poly::<Rational>::one()];
    if d == 0 {
        return out;
    }
    if lambda.is_zero() {
        out.push(t.clone());
        for i in 2..=d {
            let next = &(&t.scale(&rat(2, 1)) * &out[i - 1]) - &out[i - 2];
            out.push(next);
        }
        return out;
    }
    out.push(t.scale(&(lambda * rat(2, 1))));
    for i in 2..=d {
        let ii = Rational::from_integer((i as i64).into());
        let c1 = (ii.clone() + lambda - rat(1, 1)) * rat(2, 1) / ii.clone();
        let c2 = (ii.clone() + lambda * rat(2, 1) - rat(2, 1)) / ii;
        let next = &(&t.scale(&c1) * &out[i - 1]) - &out[i - 2].scale(&c2);
        out.push(next);
    }
    out
}

/// Monic Jacobi polynomial of degree i for (1-t)^alpha (1+t)^beta dt.
pub fn jacobi_kernel(alpha: &Rational, beta: &Rational, i: usize) -> Result<Poly<Rational>> {
    monic_orthogonal(&JacobiMeasure::<Rational>::new(alpha.clone(), beta.clone()), i)
}

/// Coefficients of a polynomial in a kernel basis.
#[derive(Clone, Debug, PartialEq)]
pub struct UltraExpansion<S: Scalar> {
    pub kernel: Kernel,
    pub coeffs: Vec<S>,
}

impl<S: Scalar> UltraExpansion<S> {
    pub fn reconstruct(&self) -> Poly<S> {
        if self.coeffs.is_empty() {
            return Poly::zero();
        }
        let basis = self.kernel.basis_in::<S>(self.coeffs.len() - 1);
        basis
            .iter()
            .zip(&self.coeffs)
            .fold(Poly::zero(), |acc, (b, c)| &acc + &b.scale(c))
    }

    /// Value of the represented polynomial at t = 1.
    pub fn value_at_one(&self) -> S {
        if self.coeffs.is_empty() {
            return S::zero();
        }
        let basis = self.kernel.basis(self.coeffs.len() - 1);
        let one = Rational::from_integer(1.into());
        basis
            .iter()
            .zip(&self.coeffs)
            .fold(S::zero(), |acc, (b, c)| acc + c.clone() * S::from_rational(&b.eval(&one)))
    }

    pub fn alpha0(&self) -> S {
        self.coeffs.first().cloned().unwrap_or_else(S::zero)
    }

    /// Indices of negative coefficients (with a relative tolerance in floating mode).
    pub fn negative_indices(&self) -> Vec<usize> {
        let tol = pd_tolerance(&self.coeffs);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| if S::EXACT { c.sign() < 0 } else { c.to_f64() < -tol })
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.negative_indices().is_empty()
    }

    pub fn is_strictly_positive_definite(&self) -> bool {
        let tol = pd_tolerance(&self.coeffs);
        !self.coeffs.is_empty()
            && self
                .coeffs
                .iter()
                .all(|c| if S::EXACT { c.sign() > 0 } else { c.to_f64() > tol })
    }
}

/// Floating-mode slack for sign checks on expansion coefficients.
pub fn pd_tolerance<S: Scalar>(coeffs: &[S]) -> f64 {
    if S::EXACT {
        0.0
    } else {
        1e-12 * coeffs.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }
}

/// Change of basis from powers of t to the kernel basis (back substitution).
pub fn expand<S: Scalar>(p: &Poly<S>, kernel: &Kernel) -> UltraExpansion<S> {
    let Some(d) = p.degree() else {
        return UltraExpansion { kernel: kernel.clone(), coeffs: Vec::new() };
    };
    let basis = kernel.basis_in::<S>(d);
    let coeffs = expand_in_basis(p, &basis);
    UltraExpansion { kernel: kernel.clone(), coeffs }
}

/// Coefficients of `p` in a triangular basis (basis[i] has degree i).
pub fn expand_in_basis<S: Scalar>(p: &Poly<S>, basis: &[Poly<S>]) -> Vec<S> {
    let Some(d) = p.degree() else {
        return Vec::new();
    };
    assert!(basis.len() > d, "basis too short");
    let mut rest = p.clone();
    let mut coeffs = vec![S::zero(); d + 1];
    for i in (0..=d).rev() {
        let c = rest.coeff(i) / basis[i].leading();
        if !c.is_zero() {
            rest = &rest - &basis[i].scale(&c);
        }
        coeffs[i] = c;
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::rat_int;
    use proptest::prelude::*;

    fn rp(v: &[Rational]) -> Poly<Rational> {
        Poly::new(v.to_vec())
    }

    #[test]
    fn gegenbauer_examples() {
        let l = rat(3, 7);
        assert_eq!(gegenbauer(&l, 0), Poly::one());
        assert_eq!(gegenbauer(&l, 1), rp(&[rat_int(0), rat(6, 7)]));
        assert_eq!(gegenbauer(&rat(1, 2), 2), rp(&[rat(-1, 2), rat_int(0), rat(3, 2)]));
        assert_eq!(gegenbauer(&rat_int(1), 2), rp(&[rat_int(-1), rat_int(0), rat_int(4)]));
        // at lambda = 0 the family is Chebyshev
        assert_eq!(gegenbauer(&rat_int(0), 3), rp(&[rat_int(0), rat_int(-3), rat_int(0), rat_int(4)]));
    }

    #[test]
    fn gegenbauer_values_at_one() {
        // C_i^lambda(1) = (2 lambda)_i / i!
        let l = rat(3, 2);
        let one = rat_int(1);
        let mut poch = rat_int(1);
        for i in 0..8 {
            if i > 0 {
                poch = poch * (rat_int(2) * l.clone() + rat_int(i - 1)) / rat_int(i);
            }
            assert_eq!(gegenbauer(&l, i as usize).eval(&one), poch);
        }
    }

    #[test]
    fn jacobi_kernel_examples() {
        assert_eq!(jacobi_kernel(&rat(1, 2), &rat(3, 2), 0).unwrap(), Poly::one());
        assert_eq!(jacobi_kernel(&rat_int(0), &rat_int(0), 1).unwrap(), Poly::x());
        // orthogonality of t + c to 1 under (1-t) dt: integral (t+c)(1-t) = 2c - 2/3
        assert_eq!(jacobi_kernel(&rat_int(1), &rat_int(0), 1).unwrap(), rp(&[rat(1, 3), rat_int(1)]));
    }

    #[test]
    fn symmetric_jacobi_is_rescaled_gegenbauer() {
        for lam in [rat(1, 2), rat(1, 1), rat(5, 2), rat(3, 1)] {
            let a = lam.clone() - rat(1, 2);
            for i in 0..7 {
                let j = jacobi_kernel(&a, &a, i).unwrap();
                let g = gegenbauer(&lam, i);
                assert_eq!(g.monic(), j);
            }
        }
    }

    #[test]
    fn expand_examples() {
        let half = Kernel::Gegenbauer { lambda: rat(1, 2) };
        assert_eq!(expand(&Poly::<Rational>::x(), &half).coeffs, vec![rat_int(0), rat_int(1)]);
        let t2 = Poly::monomial(rat_int(1), 2);
        assert_eq!(expand(&t2, &half).coeffs, vec![rat(1, 3), rat_int(0), rat(2, 3)]);
        let g3 = Kernel::Gegenbauer { lambda: rat_int(3) };
        let c5 = gegenbauer(&rat_int(3), 5);
        let e = expand(&c5, &g3);
        assert_eq!(e.coeffs, vec![rat_int(0), rat_int(0), rat_int(0), rat_int(0), rat_int(0), rat_int(1)]);
    }

    proptest! {
        #[test]
        fn expand_reconstruct_identity(
            coeffs in proptest::collection::vec(-20i64..20, 1..10),
            lam_num in 0i64..8,
            jac in proptest::bool::ANY,
        ) {
            let p = Poly::new(coeffs.iter().map(|&c| rat_int(c)).collect());
            let kernel = if jac {
                Kernel::Jacobi { alpha: rat(lam_num, 2), beta: rat(lam_num % 3 - 1, 2) }
            } else {
                Kernel::Gegenbauer { lambda: rat(lam_num, 2) }
            };
            let e = expand(&p, &kernel);
            prop_assert_eq!(e.reconstruct(), p);
        }
    }
}
