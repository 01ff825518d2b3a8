use num_traits::Signed;
use statrs::function::beta::ln_beta;

use super::roots::real_roots;
use super::{expand_in_basis, Poly};
use crate::error::{Error, Result};
use crate::exactfield::{rat, Rational, Scalar};

/// w(t) = (1-t)^alpha (1+t)^beta * prod_j sign_j (r_j - t) on [-1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiMeasure<S: Scalar> {
    pub alpha: Rational,
    pub beta: Rational,
    pub extra_linear_roots: Vec<(S, i32)>,
}

impl<S: Scalar> JacobiMeasure<S> {
    pub fn new(alpha: Rational, beta: Rational) -> Self {
        let m1 = -Rational::one();
        assert!(alpha > m1 && beta > m1, "Jacobi exponents must exceed -1");
        JacobiMeasure { alpha, beta, extra_linear_roots: Vec::new() }
    }

    /// Lebesgue measure dt on [-1, 1].
    pub fn lebesgue() -> Self {
        JacobiMeasure::new(Rational::zero(), Rational::zero())
    }

    /// Multiplies the density by sign * (r - t).
    pub fn with_linear_factor(mut self, r: S, sign: i32) -> Self {
        self.extra_linear_roots.push((r, sign.signum()));
        self
    }

    pub fn is_positive(&self) -> bool {
        self.extra_linear_roots.is_empty()
    }

    /// Total mass of the unsigned part, 2^(alpha+beta+1) B(alpha+1, beta+1).
    pub fn mass_f64(&self) -> f64 {
        let a = self.alpha.to_f64();
        let b = self.beta.to_f64();
        ((a + b + 1.0) * std::f64::consts::LN_2 + ln_beta(a + 1.0, b + 1.0)).exp()
    }

    /// Moments of the unsigned part divided by its mass, exact in the rationals:
    /// with t = 2u - 1, u follows Beta(beta+1, alpha+1).
    pub fn relative_jacobi_moments(&self, count: usize) -> Vec<Rational> {
        let ap1 = self.beta.clone() + Rational::one();
        let s = self.alpha.clone() + self.beta.clone() + rat(2, 1);
        // beta moments E[u^j]
        let mut eu = vec![Rational::one()];
        for i in 1..count {
            let k = Rational::from_integer(((i - 1) as i64).into());
            let next = eu[i - 1].clone() * (ap1.clone() + k.clone()) / (s.clone() + k);
            eu.push(next);
        }
        let mut out = Vec::with_capacity(count);
        for k in 0..count {
            let mut acc = Rational::zero();
            let mut binom = Rational::one();
            for j in 0..=k {
                if j > 0 {
                    binom = binom * Rational::from_integer(((k - j + 1) as i64).into())
                        / Rational::from_integer((j as i64).into());
                }
                let mut term = binom.clone() * eu[j].clone() * Rational::from_integer(num_bigint::BigInt::from(1) << j);
                if (k - j) % 2 == 1 {
                    term = -term;
                }
                acc += term;
            }
            out.push(acc);
        }
        out
    }

    /// The extra factor prod sign_j (r_j - t) as a polynomial.
    pub fn extra_factor(&self) -> Poly<S> {
        self.extra_linear_roots.iter().fold(Poly::one(), |acc, (r, sg)| {
            let f = Poly::new(vec![r.clone(), -S::one()]).scale(&S::from_i64(*sg as i64));
            &acc * &f
        })
    }

    /// Relative moments (unsigned mass normalized to 1) of the full signed density.
    pub fn moments(&self, count: usize) -> Vec<S> {
        let e = self.extra_factor();
        let extra = e.coeffs().len().saturating_sub(1);
        let base: Vec<S> = self
            .relative_jacobi_moments(count + extra)
            .iter()
            .map(S::from_rational)
            .collect();
        (0..count)
            .map(|k| {
                e.coeffs()
                    .iter()
                    .enumerate()
                    .fold(S::zero(), |acc, (j, c)| acc + c.clone() * base[k + j].clone())
            })
            .collect()
    }

    /// Relative integral of a polynomial.
    pub fn integrate_relative(&self, p: &Poly<S>) -> S {
        let m = self.moments(p.coeffs().len());
        p.coeffs().iter().zip(&m).fold(S::zero(), |acc, (c, mk)| acc + c.clone() * mk.clone())
    }
}

fn inner<S: Scalar>(p: &Poly<S>, q: &Poly<S>, m: &[S]) -> S {
    let mut acc = S::zero();
    for (i, a) in p.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in q.coeffs().iter().enumerate() {
            acc = acc + a.clone() * b.clone() * m[i + j].clone();
        }
    }
    acc
}

/// Inner product of the measure: exact moments, or in floating mode a Gauss
/// rule for the unsigned part (monomial moments are too ill-conditioned).
enum InnerProduct<S: Scalar> {
    Moments(Vec<S>),
    Rule(Vec<(f64, f64)>),
}

impl<S: Scalar> InnerProduct<S> {
    fn new(mu: &JacobiMeasure<S>, d: usize) -> Result<Self> {
        if S::EXACT {
            return Ok(InnerProduct::Moments(mu.moments(2 * d + 2)));
        }
        let base = JacobiMeasure::<Rational>::new(mu.alpha.clone(), mu.beta.clone());
        let nq = d + 2 + mu.extra_linear_roots.len() / 2;
        let mass = base.mass_f64();
        let e = mu.extra_factor();
        let rule = quadrature(&base, nq, &Rational::zero())?
            .into_iter()
            .map(|(x, w)| (x, w / mass * e.eval_f64(x)))
            .collect();
        Ok(InnerProduct::Rule(rule))
    }

    fn eval(&self, p: &Poly<S>, q: &Poly<S>) -> S {
        match self {
            InnerProduct::Moments(m) => inner(p, q, m),
            InnerProduct::Rule(r) => {
                let v: f64 = r.iter().map(|(x, w)| w * p.eval_f64(*x) * q.eval_f64(*x)).sum();
                S::from_f64(v).expect("floating domain")
            }
        }
    }
}

/// Monic orthogonal polynomials p_0..p_d by the Stieltjes recurrence.
pub fn monic_orthogonal_family<S: Scalar>(mu: &JacobiMeasure<S>, d: usize) -> Result<Vec<Poly<S>>> {
    let ip = InnerProduct::new(mu, d)?;
    let t = Poly::<S>::x();
    let mut out = vec![Poly::<S>::one()];
    let mut norms: Vec<S> = Vec::new();
    for i in 0..d {
        let pi = &out[i];
        let ni = ip.eval(pi, pi);
        let bad = if S::EXACT { ni.sign() <= 0 } else { !(ni.to_f64() > 0.0) };
        if bad {
            return Err(Error::NotPositiveDefinite(format!("norm of degree {i} is not positive")));
        }
        let tp = &t * pi;
        let a = ip.eval(&tp, pi) / ni.clone();
        let mut next = &tp - &pi.scale(&a);
        if i > 0 {
            let b = ni.clone() / norms[i - 1].clone();
            next = &next - &out[i - 1].scale(&b);
        }
        norms.push(ni);
        out.push(next);
    }
    Ok(out)
}

pub fn monic_orthogonal<S: Scalar>(mu: &JacobiMeasure<S>, i: usize) -> Result<Poly<S>> {
    Ok(monic_orthogonal_family(mu, i)?.pop().expect("nonempty"))
}

/// Nodes are the roots of p_n + alpha p_{n-1}; the rule is exact through degree 2n-2.
pub fn quadrature(mu: &JacobiMeasure<Rational>, n: usize, alpha: &Rational) -> Result<Vec<(f64, f64)>> {
    if !mu.is_positive() {
        return Err(Error::InvalidInput("quadrature needs a positive measure".into()));
    }
    if alpha.is_negative() {
        return Err(Error::InvalidInput("quadrature parameter must be nonnegative".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let fam = monic_orthogonal_family(mu, n)?;
    let q = &fam[n] + &fam[n - 1].scale(alpha);
    let bound = root_bound(&q);
    let roots = real_roots(&q, &(-bound.clone()), &bound, 1e-14)?;
    if roots.len() != n || roots.iter().any(|r| r.multiplicity != 1) {
        return Err(Error::RootIsolation(format!("expected {n} simple nodes, found {}", roots.len())));
    }
    let one = Rational::one();
    for r in &roots {
        if r.hi > one || r.lo < -one.clone() {
            return Err(Error::NodeOutOfRange(format!("{:.15}", r.approx)));
        }
    }
    let m = mu.moments(2 * n);
    let h = inner(&fam[n - 1], &fam[n - 1], &m).to_f64() * mu.mass_f64();
    let pf = fam[n - 1].to_f64();
    let qd = q.derivative().to_f64();
    Ok(roots
        .iter()
        .map(|r| {
            let x = r.approx;
            (x, h / (pf.eval(&x) * qd.eval(&x)))
        })
        .collect())
}

/// Cauchy bound on the absolute value of real roots.
pub fn root_bound<S: Scalar>(p: &Poly<S>) -> S {
    let lc = p.leading().abs_s();
    let n = p.coeffs().len();
    let mut m = S::zero();
    for c in &p.coeffs()[..n.saturating_sub(1)] {
        let v = c.abs_s() / lc.clone();
        if v.cmp_s(&m) == std::cmp::Ordering::Greater {
            m = v;
        }
    }
    m + S::one()
}

/// Coefficients of prod_{i<=k} (t - r_i) in the monic orthogonal basis p_0..p_k,
/// where r_1 < r_2 < ... are the roots of p_n + alpha p_{n-1}.
pub fn partial_product_expansion(
    mu: &JacobiMeasure<Rational>,
    n: usize,
    alpha: &Rational,
    k: usize,
) -> Result<Vec<f64>> {
    if k >= n {
        return Err(Error::InvalidInput("k must be below n".into()));
    }
    let fam = monic_orthogonal_family(mu, n)?;
    let q = &fam[n] + &fam[n - 1].scale(alpha);
    let bound = root_bound(&q);
    let roots = real_roots(&q, &(-bound.clone()), &bound, 1e-15)?;
    let nodes: Vec<f64> = roots
        .iter()
        .flat_map(|r| std::iter::repeat(r.approx).take(r.multiplicity))
        .collect();
    if nodes.len() < k {
        return Err(Error::RootIsolation("too few real roots".into()));
    }
    let prod = Poly::<f64>::from_roots(&nodes[..k]);
    let basis: Vec<Poly<f64>> = fam[..=k].iter().map(|p| p.to_f64()).collect();
    Ok(expand_in_basis(&prod, &basis))
}
