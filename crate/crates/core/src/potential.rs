//! Potential functions f(r) of squared distance r, with the cos-variable
//! form a(t) = f(2 - 2t).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactfield::{parse_rational, rat_int, Rational, Scalar};
use crate::orthopoly::Poly;

type Oracle = Arc<dyn Fn(f64, usize) -> Vec<f64> + Send + Sync>;

/// Built-in families plus an arbitrary derivative oracle.
#[derive(Clone)]
pub enum Potential {
    /// 1/r^s
    InversePower(Rational),
    /// e^{-c r}
    Exponential(Rational),
    /// (4 - r)^k
    TruncatedPower(u32),
    /// log(4/r)
    Log4,
    /// sum c_i r^i
    Polynomial(Vec<Rational>),
    /// (c + r)^{-s}
    ShiftedInverse { s: Rational, c: Rational },
    /// `oracle(r, n)` returns f(r), f'(r), ..., f^{(n-1)}(r).
    Custom { name: String, oracle: Oracle },
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Potential({self})")
    }
}

impl PartialEq for Potential {
    fn eq(&self, other: &Self) -> bool {
        self.to_string() == other.to_string()
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::InversePower(s) => write!(f, "inv:{s}"),
            Potential::Exponential(c) => write!(f, "exp:{c}"),
            Potential::TruncatedPower(k) => write!(f, "pow4:{k}"),
            Potential::Log4 => write!(f, "log4"),
            Potential::Polynomial(c) => {
                write!(f, "poly:")?;
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
            Potential::ShiftedInverse { s, c } => write!(f, "sinv:{s},{c}"),
            Potential::Custom { name, .. } => write!(f, "custom:{name}"),
        }
    }
}

fn positive(x: &Rational, what: &str) -> Result<Rational> {
    if x.sign() <= 0 {
        return Err(Error::Potential(format!("{what} must be positive")));
    }
    Ok(x.clone())
}

impl std::str::FromStr for Potential {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Potential::parse(s)
    }
}

impl Potential {
    /// Parses `inv:s`, `exp:c`, `pow4:k`, `log4`, `poly:c0,c1,...`, `sinv:s,c`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "log4" {
            return Ok(Potential::Log4);
        }
        let (tag, arg) = text
            .split_once(':')
            .ok_or_else(|| Error::Potential(format!("cannot parse potential '{text}'")))?;
        let num = |s: &str| parse_rational(s.trim()).map_err(|e| Error::Potential(e.to_string()));
        match tag {
            "inv" => Ok(Potential::InversePower(positive(&num(arg)?, "s")?)),
            "exp" => Ok(Potential::Exponential(positive(&num(arg)?, "c")?)),
            "pow4" => {
                let k: u32 = arg
                    .trim()
                    .parse()
                    .map_err(|_| Error::Potential(format!("pow4 needs a nonnegative integer, got '{arg}'")))?;
                Ok(Potential::TruncatedPower(k))
            }
            "poly" => {
                let c = arg.split(',').map(num).collect::<Result<Vec<_>>>()?;
                if c.is_empty() {
                    return Err(Error::Potential("poly needs coefficients".into()));
                }
                Ok(Potential::Polynomial(c))
            }
            "sinv" => {
                let (s, c) = arg
                    .split_once(',')
                    .ok_or_else(|| Error::Potential("sinv needs 's,c'".into()))?;
                Ok(Potential::ShiftedInverse { s: positive(&num(s)?, "s")?, c: positive(&num(c)?, "c")? })
            }
            _ => Err(Error::Potential(format!("unknown potential family '{tag}'"))),
        }
    }

    pub fn custom(name: &str, oracle: impl Fn(f64, usize) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Potential::Custom { name: name.to_string(), oracle: Arc::new(oracle) }
    }

    /// f(r), f'(r), ..., f^{(n-1)}(r) in double precision.
    pub fn f_derivs(&self, r: f64, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        match self {
            Potential::InversePower(s) => {
                let s = s.to_f64();
                let mut c = 1.0;
                for j in 0..n {
                    out.push(c * r.powf(-s - j as f64));
                    c *= -(s + j as f64);
                }
            }
            Potential::ShiftedInverse { s, c } => {
                let (s, x) = (s.to_f64(), c.to_f64() + r);
                let mut k = 1.0;
                for j in 0..n {
                    out.push(k * x.powf(-s - j as f64));
                    k *= -(s + j as f64);
                }
            }
            Potential::Exponential(c) => {
                let c = c.to_f64();
                let e = (-c * r).exp();
                let mut k = 1.0;
                for _ in 0..n {
                    out.push(k * e);
                    k *= -c;
                }
            }
            Potential::TruncatedPower(k) => {
                let x = 4.0 - r;
                let mut c = 1.0;
                for j in 0..n {
                    if j as u32 > *k {
                        out.push(0.0);
                    } else {
                        out.push(c * x.powi((*k - j as u32) as i32));
                        c *= -((*k - j as u32) as f64);
                    }
                }
            }
            Potential::Log4 => {
                if n > 0 {
                    out.push((4.0 / r).ln());
                }
                let mut c = -1.0;
                for j in 1..n {
                    out.push(c * r.powi(-(j as i32)));
                    c *= -(j as f64);
                }
            }
            Potential::Polynomial(c) => {
                let mut p = Poly::new(c.iter().map(|x| x.to_f64()).collect());
                for _ in 0..n {
                    out.push(p.eval(&r));
                    p = p.derivative();
                }
            }
            Potential::Custom { oracle, .. } => {
                out = oracle(r, n);
                out.resize(n, f64::NAN);
            }
        }
        out
    }

    pub fn value(&self, r: f64) -> f64 {
        self.f_derivs(r, 1)[0]
    }

    /// a(t), a'(t), ... for a(t) = f(2 - 2t).
    pub fn a_derivs(&self, t: f64, n: usize) -> Vec<f64> {
        let mut d = self.f_derivs(2.0 - 2.0 * t, n);
        let mut s = 1.0;
        for v in d.iter_mut() {
            *v *= s;
            s *= -2.0;
        }
        d
    }

    pub fn a(&self, t: f64) -> f64 {
        self.value(2.0 - 2.0 * t)
    }

    /// a(t) as an exact polynomial, when f is a polynomial family.
    pub fn a_poly(&self) -> Option<Poly<Rational>> {
        match self {
            Potential::TruncatedPower(k) => Some(Poly::new(vec![rat_int(2), rat_int(2)]).pow(*k as usize)),
            Potential::Polynomial(c) => {
                let r = Poly::new(vec![rat_int(2), rat_int(-2)]);
                let mut acc = Poly::zero();
                for ci in c.iter().rev() {
                    acc = &(&acc * &r) + &Poly::constant(ci.clone());
                }
                Some(acc)
            }
            _ => None,
        }
    }

    fn integer_exponent(s: &Rational) -> Option<i64> {
        if s.denom() == &1.into() {
            num_traits::ToPrimitive::to_i64(s.numer())
        } else {
            None
        }
    }

    /// Exact f^{(j)}(r), j < n, when the family is rational-valued at r.
    pub fn f_derivs_exact<S: Scalar>(&self, r: &S, n: usize) -> Option<Vec<S>> {
        let rational_inverse = |x: S, s: i64| -> Option<Vec<S>> {
            if x.is_zero() {
                return None;
            }
            let inv = S::one() / x;
            let mut c = S::one();
            let mut out = Vec::with_capacity(n);
            for j in 0..n {
                out.push(c.clone() * inv.powi((s + j as i64) as u32));
                c = c * S::from_i64(-(s + j as i64));
            }
            Some(out)
        };
        match self {
            Potential::InversePower(s) => rational_inverse(r.clone(), Self::integer_exponent(s)?),
            Potential::ShiftedInverse { s, c } => {
                rational_inverse(S::from_rational(c) + r.clone(), Self::integer_exponent(s)?)
            }
            Potential::TruncatedPower(_) | Potential::Polynomial(_) => {
                let f = match self {
                    Potential::TruncatedPower(k) => Poly::new(vec![rat_int(4), rat_int(-1)]).pow(*k as usize),
                    Potential::Polynomial(c) => Poly::new(c.clone()),
                    _ => unreachable!(),
                };
                let mut p = f.convert::<S>();
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    out.push(p.eval(r));
                    p = p.derivative();
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Exact a^{(j)}(t), j < n.
    pub fn a_derivs_exact<S: Scalar>(&self, t: &S, n: usize) -> Option<Vec<S>> {
        let r = S::from_i64(2) - S::from_i64(2) * t.clone();
        let mut d = self.f_derivs_exact(&r, n)?;
        let mut s = S::one();
        for v in d.iter_mut() {
            *v = v.clone() * s.clone();
            s = s * S::from_i64(-2);
        }
        Some(d)
    }

    pub fn supports_exact(&self) -> bool {
        match self {
            Potential::InversePower(s) => Self::integer_exponent(s).is_some(),
            Potential::ShiftedInverse { s, .. } => Self::integer_exponent(s).is_some(),
            Potential::TruncatedPower(_) | Potential::Polynomial(_) => true,
            _ => false,
        }
    }

    /// True when a(t) = f(2-2t) is absolutely monotonic on [-1, 1)
    /// (decided from the family, or from the coefficients of a in powers of 1+t).
    pub fn is_absolutely_monotonic(&self) -> bool {
        match self {
            Potential::InversePower(_)
            | Potential::Exponential(_)
            | Potential::TruncatedPower(_)
            | Potential::Log4
            | Potential::ShiftedInverse { .. } => true,
            Potential::Polynomial(_) => {
                let a = self.a_poly().expect("polynomial family");
                a.shift(&rat_int(-1)).coeffs().iter().all(|c| c.sign() >= 0)
            }
            Potential::Custom { .. } => false,
        }
    }

    /// f is finite at r = 0.
    pub fn finite_at_zero(&self) -> bool {
        !matches!(self, Potential::InversePower(_) | Potential::Log4)
    }

    pub fn truncated_power_index(&self) -> Option<u32> {
        match self {
            Potential::TruncatedPower(k) => Some(*k),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::rat;

    fn families() -> Vec<Potential> {
        ["inv:1", "inv:0.5", "inv:2", "exp:1", "exp:0.3", "pow4:5", "log4", "poly:1,-2,0.5", "sinv:1,1", "sinv:1.5,0.2"]
            .iter()
            .map(|s| Potential::parse(s).unwrap())
            .collect()
    }

    #[test]
    fn parse_render_round_trip() {
        for p in families() {
            assert_eq!(Potential::parse(&p.to_string()).unwrap(), p);
        }
        assert!(Potential::parse("inv:-1").is_err());
        assert!(Potential::parse("pow4:x").is_err());
        assert!(Potential::parse("nope:1").is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for p in families() {
            for &r in &[0.3, 1.1, 2.5, 3.7] {
                let d = p.f_derivs(r, 4);
                for j in 0..3 {
                    let h = 1e-5;
                    let up = p.f_derivs(r + h, j + 1)[j];
                    let dn = p.f_derivs(r - h, j + 1)[j];
                    let fd = (up - dn) / (2.0 * h);
                    assert!((fd - d[j + 1]).abs() <= 1e-6 * d[j + 1].abs().max(1.0), "{p} j={j} r={r}");
                }
            }
        }
    }

    #[test]
    fn exact_jets_agree_with_floating() {
        for s in ["inv:1", "inv:2", "pow4:4", "poly:1,-2,1/2", "sinv:1,1"] {
            let p = Potential::parse(s).unwrap();
            let t = rat(-1, 3);
            let e = p.a_derivs_exact(&t, 4).unwrap();
            let f = p.a_derivs(-1.0 / 3.0, 4);
            for (x, y) in e.iter().zip(&f) {
                assert!((x.to_f64() - y).abs() <= 1e-12 * y.abs().max(1.0));
            }
        }
        assert!(Potential::parse("exp:1").unwrap().a_derivs_exact(&rat(0, 1), 1).is_none());
    }

    #[test]
    fn absolute_monotonicity() {
        assert!(Potential::parse("pow4:3").unwrap().is_absolutely_monotonic());
        // f(r) = r is decreasing in t
        assert!(!Potential::parse("poly:0,1").unwrap().is_absolutely_monotonic());
        assert!(Potential::parse("poly:4,-1").unwrap().is_absolutely_monotonic());
        let a = Potential::TruncatedPower(2).a_poly().unwrap();
        assert_eq!(a, Poly::new(vec![rat_int(4), rat_int(8), rat_int(4)]));
    }
}
