use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::exactfield::{Rational, Scalar};

/// Dense univariate polynomial in the power basis; `coeffs[i]` multiplies t^i.
#[derive(Clone, PartialEq)]
pub struct Poly<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        Poly::new(vec![c])
    }

    /// The polynomial t.
    pub fn x() -> Self {
        Poly::new(vec![S::zero(), S::one()])
    }

    /// t - r.
    pub fn linear_root(r: &S) -> Self {
        Poly::new(vec![-r.clone(), S::one()])
    }

    pub fn monomial(c: S, deg: usize) -> Self {
        let mut v = vec![S::zero(); deg + 1];
        v[deg] = c;
        Poly::new(v)
    }

    pub fn from_roots(roots: &[S]) -> Self {
        roots.iter().fold(Poly::one(), |p, r| &p * &Poly::linear_root(r))
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> S {
        self.coeffs.last().cloned().unwrap_or_else(S::zero)
    }

    pub fn eval(&self, t: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t.clone() + c.clone();
        }
        acc
    }

    /// Horner in double precision on converted coefficients.
    pub fn eval_f64(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c.to_f64();
        }
        acc
    }

    pub fn scale(&self, c: &S) -> Self {
        Poly::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * S::from_i64(i as i64))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// Quotient and remainder; panics if `d` is zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() < d.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![S::zero(); self.coeffs.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - c.clone() * dj.clone();
                }
            }
            rem[k + dd] = S::zero();
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Exact division; errors if the remainder is nonzero (exact domains only).
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(d);
        if S::EXACT && !r.is_zero() {
            return Err(Error::InvalidInput("polynomial division is not exact".into()));
        }
        Ok(q)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading();
        Poly::new(self.coeffs.iter().map(|c| c.clone() / l.clone()).collect())
    }

    /// Monic gcd by the Euclidean algorithm (meaningful in exact domains).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: returns (a_1, a_2, ...) with
    /// self = c * prod a_i^i and each a_i square-free. Exact domains only.
    pub fn squarefree_decomposition(&self) -> Vec<Self> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a = f.gcd(&fp);
        let mut b = f.div_exact(&a).expect("gcd divides");
        let mut c = fp.div_exact(&a).expect("gcd divides derivative");
        let mut d = &c - &b.derivative();
        loop {
            let a_i = b.gcd(&d);
            b = b.div_exact(&a_i).expect("gcd divides");
            c = d.div_exact(&a_i).expect("gcd divides");
            out.push(a_i);
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            d = &c - &b.derivative();
        }
        out
    }

    /// p(t + c) via repeated synthetic division (Taylor shift).
    pub fn shift(&self, c: &S) -> Self {
        let n = self.coeffs.len();
        let mut v = self.coeffs.clone();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                v[j] = v[j].clone() + c.clone() * v[j + 1].clone();
            }
        }
        Poly::new(v)
    }

    /// p(s*t).
    pub fn scale_arg(&self, s: &S) -> Self {
        let mut pw = S::one();
        let mut v = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            v.push(c.clone() * pw.clone());
            pw = pw * s.clone();
        }
        Poly::new(v)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Poly::one(), |acc, _| &acc * self)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_f64(&self) -> Poly<f64> {
        self.map(|c| c.to_f64())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }
}

impl Poly<Rational> {
    pub fn convert<T: Scalar>(&self) -> Poly<T> {
        self.map(|c| T::from_rational(c))
    }
}

impl<S: Scalar> fmt::Debug for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{i}")?,
            }
        }
        Ok(())
    }
}

impl<S: Scalar> Add for &Poly<S> {
    type Output = Poly<S>;
    fn add(self, o: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<S: Scalar> Sub for &Poly<S> {
    type Output = Poly<S>;
    fn sub(self, o: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl<S: Scalar> Mul for &Poly<S> {
    type Output = Poly<S>;
    fn mul(self, o: &Poly<S>) -> Poly<S> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![S::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(v)
    }
}

impl<S: Scalar> Neg for &Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<S: Scalar> Add for Poly<S> {
    type Output = Poly<S>;
    fn add(self, o: Poly<S>) -> Poly<S> {
        &self + &o
    }
}

impl<S: Scalar> Sub for Poly<S> {
    type Output = Poly<S>;
    fn sub(self, o: Poly<S>) -> Poly<S> {
        &self - &o
    }
}

impl<S: Scalar> Mul for Poly<S> {
    type Output = Poly<S>;
    fn mul(self, o: Poly<S>) -> Poly<S> {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{rat, rat_int};

    fn p(v: &[i64]) -> Poly<Rational> {
        Poly::new(v.iter().map(|&x| rat_int(x)).collect())
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = p(&[1, 3, 3, 1]);
        let d = p(&[0, 1]);
        let (q, r) = a.div_rem(&d);
        assert_eq!(q, p(&[3, 3, 1]));
        assert_eq!(r, p(&[1]));
        assert_eq!(&(&q * &d) + &r, a);
    }

    #[test]
    fn shift_matches_composition() {
        let a = p(&[2, -1, 0, 5]);
        let c = rat(3, 2);
        let s = a.shift(&c);
        for x in [-2i64, 0, 1, 4] {
            let x = rat_int(x);
            assert_eq!(s.eval(&x), a.eval(&(x.clone() + c.clone())));
        }
    }

    #[test]
    fn squarefree_parts() {
        // (t+1)^2 (t-2)^3 t
        let f = &(&p(&[1, 1]).pow(2) * &p(&[-2, 1]).pow(3)) * &p(&[0, 1]);
        let parts = f.squarefree_decomposition();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0], p(&[0, 1]));
        assert_eq!(parts[1], p(&[1, 1]));
        assert_eq!(parts[2], p(&[-2, 1]));
    }

    #[test]
    fn derivative_and_eval() {
        let a = p(&[1, 2, 3]);
        assert_eq!(a.derivative(), p(&[2, 6]));
        assert_eq!(a.eval(&rat_int(2)), rat_int(17));
        assert_eq!(a.nth_derivative(3), Poly::zero());
    }
}
