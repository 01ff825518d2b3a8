//! The one-dimensional Euclidean construction: an auxiliary h on R with
//! h(k) = f(k^2) at nonzero integers and a nonnegative Fourier transform,
//! realized as truncated series with explicit tail bounds.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::Scalar;

/// Terms used for the x-independent constant sum.
pub const CONSTANT_TERMS: usize = 1_000_000;

/// A value together with a bound on the omitted series mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounded {
    pub value: f64,
    pub tail: f64,
}

#[derive(Clone, Debug)]
pub struct OneDimCertificate {
    pub f: Potential,
    pub k_terms: usize,
    /// f~(k) = f(k^2) for k = 1..=K.
    pub ft: Vec<f64>,
    /// f~'(k) = 2k f'(k^2) for k = 1..=K.
    pub ftp: Vec<f64>,
    /// sum_{k >= 1} (f~(k) + k f~'(k)), truncated at `CONSTANT_TERMS`.
    pub constant: f64,
    pub constant_terms: usize,
    pub constant_tail: f64,
    /// Bound on sum_{k > K} (f~(k) + k |f~'(k)|).
    pub tail: f64,
    /// Bound on sum_{k > K} (f~(k) + k |f~'(k)|) / k^2.
    pub tail2: f64,
}

enum Decay {
    Gaussian(f64),
    Power(f64),
}

fn decay(f: &Potential) -> Result<Decay> {
    let s = match f {
        Potential::Exponential(c) => return Ok(Decay::Gaussian(c.to_f64())),
        Potential::InversePower(s) => s.to_f64(),
        Potential::ShiftedInverse { s, .. } => s.to_f64(),
        other => return Err(Error::Potential(format!("{other} is not a decaying completely monotonic family"))),
    };
    if 2.0 * s <= 1.0 {
        return Err(Error::Potential(format!("{f}: decay r^-{s} is too slow (need exponent above 1/2)")));
    }
    Ok(Decay::Power(s))
}

/// Bounds on sum_{k>K} g(k) and sum_{k>K} g(k)/k^2, g(k) = f~(k) + k|f~'(k)|.
fn tail_bounds(d: &Decay, k: usize) -> Result<(f64, f64)> {
    let kf = k.max(1) as f64;
    match *d {
        Decay::Gaussian(c) => {
            let g = |x: f64| (1.0 + 2.0 * c * x * x) * (-c * x * x).exp();
            // g(k+1)/g(k) is decreasing in k, so its value at K+1 bounds the rest
            let rho = (-c * (2.0 * kf + 3.0)).exp() * (1.0 + 2.0 * c * (kf + 2.0).powi(2)) / (1.0 + 2.0 * c * (kf + 1.0).powi(2));
            if rho >= 1.0 {
                return Err(Error::InvalidInput(format!("K = {k} is too small for a geometric tail bound")));
            }
            let t = g(kf + 1.0) / (1.0 - rho) * (1.0 + 1e-12);
            Ok((t, t / (kf + 1.0).powi(2)))
        }
        Decay::Power(s) => {
            // g(x) <= (1+2s) x^{-2s}, decreasing
            let t = (1.0 + 2.0 * s) * kf.powf(1.0 - 2.0 * s) / (2.0 * s - 1.0);
            let t2 = kf.powf(-1.0 - 2.0 * s);
            Ok((t, t2))
        }
    }
}

impl OneDimCertificate {
    pub fn new(f: &Potential, k_terms: usize) -> Result<Self> {
        if k_terms == 0 {
            return Err(Error::InvalidInput("K must be positive".into()));
        }
        let d = decay(f)?;
        let ftp_at = |k: f64| 2.0 * k * f.f_derivs(k * k, 2)[1];
        let ft: Vec<f64> = (1..=k_terms).map(|k| f.value((k * k) as f64)).collect();
        let ftp: Vec<f64> = (1..=k_terms).map(|k| ftp_at(k as f64)).collect();
        let kc = match d {
            Decay::Gaussian(_) => k_terms.max(64),
            Decay::Power(_) => k_terms.max(CONSTANT_TERMS),
        };
        let mut constant = 0.0;
        // smallest terms first
        for k in (1..=kc).rev() {
            let x = k as f64;
            constant += f.value(x * x) + x * ftp_at(x);
        }
        let (constant_tail, _) = tail_bounds(&d, kc)?;
        let (tail, tail2) = tail_bounds(&d, k_terms)?;
        Ok(OneDimCertificate { f: f.clone(), k_terms, ft, ftp, constant, constant_terms: kc, constant_tail, tail, tail2 })
    }

    pub fn f_squared(&self, x: f64) -> f64 {
        self.f.value(x * x)
    }
}

fn sinc2(y: f64, s2: f64) -> f64 {
    if y.abs() < 1e-6 {
        1.0 - (PI * y).powi(2) / 3.0
    } else {
        s2 / (PI * y).powi(2)
    }
}

fn q(y: f64, s2: f64) -> f64 {
    if y.abs() < 1e-6 {
        y * (1.0 - (PI * y).powi(2) / 3.0)
    } else {
        s2 / (PI * PI * y)
    }
}

/// h(x), with integers handled by continuity.
pub fn eval_h(c: &OneDimCertificate, x: f64) -> Bounded {
    // sin^2(pi x) from the offset to the nearest integer, accurate near integers
    let s2 = (PI * (x - x.round())).sin().powi(2);
    let mut v = 0.0;
    for k in (1..=c.k_terms).rev() {
        let kf = k as f64;
        v += c.ft[k - 1] * (sinc2(x - kf, s2) + sinc2(x + kf, s2)) + c.ftp[k - 1] * (q(x - kf, s2) - q(x + kf, s2));
    }
    v -= 2.0 * sinc2(x, s2) * c.constant;
    let series_tail = if c.k_terms as f64 >= 2.0 * x.abs() { 5.0 / (PI * PI) * c.tail2 } else { 2.0 * c.tail };
    Bounded { value: v, tail: series_tail + 2.0 * c.constant_tail }
}

/// h^(t); zero outside [-1, 1].
pub fn eval_hhat(c: &OneDimCertificate, t: f64) -> Bounded {
    let t = t.abs();
    if t >= 1.0 {
        return Bounded { value: 0.0, tail: 0.0 };
    }
    let (sn, cs) = (2.0 * PI * t).sin_cos();
    // cos/sin of 2 pi k t by rotation
    let (mut ck, mut sk) = (1.0, 0.0);
    let mut a = 0.0;
    let mut b = 0.0;
    for k in 0..c.k_terms {
        let (nc, ns) = (ck * cs - sk * sn, sk * cs + ck * sn);
        ck = nc;
        sk = ns;
        a += c.ft[k] * ck;
        b += c.ftp[k] * sk;
    }
    let v = 2.0 * (1.0 - t) * (a - c.constant) - b / PI;
    Bounded { value: v, tail: 2.0 * c.tail + 2.0 * c.constant_tail + 1e-15 * c.k_terms as f64 * c.ft[0].abs() }
}

#[derive(Clone, Debug)]
pub struct OneDimVerdict {
    /// min over the grid of f(x^2) - h(x) on (0, 10].
    pub h_margin: f64,
    pub h_tail: f64,
    /// min of h^ on [0, 1].
    pub hhat_margin: f64,
    pub hhat_tail: f64,
    pub hhat_at_one_derivative: f64,
    pub identity_lhs: f64,
    pub lattice_sum: f64,
    pub identity_error: f64,
    pub identity_tol: f64,
    pub interpolation_ok: bool,
    pub passed: bool,
    pub counterexample: Option<String>,
}

impl OneDimVerdict {
    pub fn report(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("min f(x^2) - h(x) on (0,10]   = {:.6e} (tail {:.1e})\n", self.h_margin, self.h_tail));
        s.push_str(&format!("min h^(t) on [0,1]          = {:.6e} (tail {:.1e})\n", self.hhat_margin, self.hhat_tail));
        s.push_str(&format!("h^(0) - h(0)                = {:.12}\n", self.identity_lhs));
        s.push_str(&format!("sum_(k != 0) f(k^2)         = {:.12}\n", self.lattice_sum));
        s.push_str(&format!("identity error              = {:.3e} (allowed {:.1e})\n", self.identity_error, self.identity_tol));
        s.push_str(&format!("h^'(1) (reported only)      = {:.6e}\n", self.hhat_at_one_derivative));
        s.push_str(&format!("interpolation h(k) = f(k^2) = {}\n", self.interpolation_ok));
        if let Some(c) = &self.counterexample {
            s.push_str(&format!("counterexample: {c}\n"));
        }
        s.push_str(&format!("verdict = {}\n", if self.passed { "pass" } else { "FAIL" }));
        s
    }
}

/// Checks h <= f(x^2) on (0, 10], h^ >= 0 on [0, 1] and the lattice identity.
pub fn verify_onedim(c: &OneDimCertificate, grid: usize) -> Result<OneDimVerdict> {
    if grid < 2 {
        return Err(Error::InvalidInput("grid needs at least two points".into()));
    }
    let mut counterexample = None;
    let mut h_margin = f64::INFINITY;
    let mut h_tail: f64 = 0.0;
    for j in 1..=grid {
        let x = 10.0 * j as f64 / grid as f64;
        let h = eval_h(c, x);
        let fx = c.f_squared(x);
        let m = fx - h.value;
        let slack = h.tail + 1e-12 * fx.abs().max(1.0);
        h_tail = h_tail.max(h.tail);
        if m < -slack && counterexample.is_none() {
            counterexample = Some(format!("h({x}) = {} exceeds f(x^2) = {fx}", h.value));
        }
        h_margin = h_margin.min(m);
    }
    let mut hhat_margin = f64::INFINITY;
    let mut hhat_tail: f64 = 0.0;
    for j in 0..grid {
        let t = j as f64 / (grid - 1) as f64;
        let v = eval_hhat(c, t);
        hhat_tail = hhat_tail.max(v.tail);
        if v.value < -(v.tail + 1e-12) && counterexample.is_none() {
            counterexample = Some(format!("h^({t}) = {} is negative", v.value));
        }
        hhat_margin = hhat_margin.min(v.value);
    }
    let h0 = eval_h(c, 0.0);
    let hh0 = eval_hhat(c, 0.0);
    let identity_lhs = hh0.value - h0.value;
    // lattice sum computed on its own, smallest terms first
    let kc = c.constant_terms;
    let mut lattice = 0.0;
    for k in (1..=kc).rev() {
        lattice += c.f.value((k * k) as f64);
    }
    lattice *= 2.0;
    let (lt, _) = tail_bounds(&decay(&c.f)?, kc)?;
    let identity_error = (identity_lhs - lattice).abs();
    let identity_tol = 1e-10 + h0.tail + hh0.tail + 2.0 * lt;
    if identity_error > identity_tol && counterexample.is_none() {
        counterexample = Some(format!("h^(0) - h(0) = {identity_lhs} but the lattice sum is {lattice}"));
    }
    let mut interpolation_ok = true;
    for k in 1..=(c.k_terms / 2).max(1) {
        let h = eval_h(c, k as f64);
        if (h.value - c.f_squared(k as f64)).abs() > h.tail + 1e-12 * c.f_squared(k as f64).abs().max(1e-300) {
            interpolation_ok = false;
        }
    }
    let e = 1e-6;
    let hhat_at_one_derivative = (eval_hhat(c, 1.0 - e).value - eval_hhat(c, 1.0 - 2.0 * e).value) / e;
    let passed = counterexample.is_none() && interpolation_ok;
    Ok(OneDimVerdict {
        h_margin,
        h_tail,
        hhat_margin,
        hhat_tail,
        hhat_at_one_derivative,
        identity_lhs,
        lattice_sum: lattice,
        identity_error,
        identity_tol,
        interpolation_ok,
        passed,
        counterexample,
    })
}

/// (x, h(x), f(x^2)) rows on [0, x_max].
pub fn h_table(c: &OneDimCertificate, x_max: f64, rows: usize) -> Vec<(f64, f64, f64)> {
    (0..rows)
        .map(|j| {
            let x = x_max * j as f64 / (rows.max(2) - 1) as f64;
            (x, eval_h(c, x).value, c.f_squared(x))
        })
        .collect()
}

/// (t, h^(t)) rows on [0, 1].
pub fn hhat_table(c: &OneDimCertificate, rows: usize) -> Vec<(f64, f64)> {
    (0..rows)
        .map(|j| {
            let t = j as f64 / (rows.max(2) - 1) as f64;
            (t, eval_hhat(c, t).value)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cert(f: &str, k: usize) -> OneDimCertificate {
        OneDimCertificate::new(&Potential::parse(f).unwrap(), k).unwrap()
    }

    #[test]
    fn gaussian_values() {
        let c = cert("exp:1", 8);
        let h3 = eval_h(&c, 3.0);
        assert!((h3.value - (-9f64).exp()).abs() <= h3.tail + 1e-16, "{:?}", h3);
        // independent series for h(0) = -2 sum (1 - 2k^2) e^{-k^2}
        let h0: f64 = -2.0 * (1..40).map(|k| (1.0 - 2.0 * (k * k) as f64) * (-((k * k) as f64)).exp()).sum::<f64>();
        assert!((eval_h(&c, 0.0).value - h0).abs() < 1e-13);
        assert!((h0 - 0.996381).abs() < 1e-6, "{h0}");
        let lattice: f64 = 2.0 * (1..40).map(|k| (-((k * k) as f64)).exp()).sum::<f64>();
        assert!((lattice - 0.772637).abs() < 1e-6);
        let d = eval_hhat(&c, 0.0).value - eval_h(&c, 0.0).value;
        assert!((d - lattice).abs() < 1e-12);
        assert_eq!(eval_hhat(&c, 1.0).value, 0.0);
        assert!(eval_hhat(&c, 1.0 - 1e-12).value.abs() < 1e-10);
        assert_eq!(eval_hhat(&c, 1.5).value, 0.0);
    }

    #[test]
    fn verifier_passes_for_gaussian_and_shifted_inverse() {
        let v = verify_onedim(&cert("exp:1", 8), 10_000).unwrap();
        assert!(v.passed, "{}", v.report());
        assert!(v.identity_error < 1e-10);
        let v = verify_onedim(&cert("sinv:1,1", 2000), 10_000).unwrap();
        assert!(v.passed, "{}", v.report());
        // closed form: sum_{k != 0} 1/(1+k^2) = pi coth(pi) - 1
        let exact = PI / PI.tanh() - 1.0;
        assert!((v.lattice_sum - exact).abs() < 1e-5, "{}", v.lattice_sum);
    }

    #[test]
    fn slow_decay_rejected() {
        assert!(OneDimCertificate::new(&Potential::parse("inv:1/2").unwrap(), 10).is_err());
        assert!(OneDimCertificate::new(&Potential::parse("pow4:3").unwrap(), 10).is_err());
    }

    #[test]
    fn interpolation_of_derivative() {
        let c = cert("exp:1/2", 10);
        for k in 1..=5 {
            let x = k as f64;
            let e = 1e-5;
            let dh = (eval_h(&c, x + e).value - eval_h(&c, x - e).value) / (2.0 * e);
            let df = 2.0 * x * c.f.f_derivs(x * x, 2)[1];
            assert!((dh - df).abs() < 1e-8, "k={k}: {dh} vs {df}");
        }
        let dh0 = (eval_h(&c, 1e-5).value - eval_h(&c, -1e-5).value) / 2e-5;
        assert!(dh0.abs() < 1e-9);
    }

    #[test]
    fn fourier_consistency() {
        use rand::{Rng, SeedableRng};
        let c = cert("exp:1", 10);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 20_000;
        for _ in 0..20 {
            let x: f64 = rng.gen_range(-6.0..6.0);
            // 2 int_0^1 h^(t) cos(2 pi t x) dt by composite Simpson
            let g = |t: f64| eval_hhat(&c, t).value * (2.0 * PI * t * x).cos();
            let hstep = 1.0 / n as f64;
            let mut s = g(0.0) + g(1.0);
            for j in 1..n {
                s += g(j as f64 * hstep) * if j % 2 == 1 { 4.0 } else { 2.0 };
            }
            let integral = 2.0 * s * hstep / 3.0;
            let h = eval_h(&c, x).value;
            assert!((integral - h).abs() < 1e-9, "x={x}: {integral} vs {h}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn evenness(x in -12.0f64..12.0, t in -1.0f64..1.0, which in 0usize..3) {
            let c = cert(["exp:1", "exp:3/2", "sinv:2,1"][which], 60);
            let (a, b) = (eval_h(&c, x).value, eval_h(&c, -x).value);
            prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
            let (a, b) = (eval_hhat(&c, t).value, eval_hhat(&c, -t).value);
            prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
        }

        #[test]
        fn tail_dominates_omitted_mass(k in 1usize..200, which in 0usize..4) {
            let f = ["exp:1/4", "inv:1", "inv:3/2", "sinv:1,1"][which];
            let c = cert(f, k);
            let p = c.f.clone();
            let mut omitted = 0.0;
            let mut omitted2 = 0.0;
            for j in (k + 1..k + 200_000).rev() {
                let x = j as f64;
                let g = p.value(x * x) + x * (2.0 * x * p.f_derivs(x * x, 2)[1]).abs();
                omitted += g;
                omitted2 += g / (x * x);
            }
            prop_assert!(omitted <= c.tail, "{} > {}", omitted, c.tail);
            prop_assert!(omitted2 <= c.tail2);
        }
    }
}
