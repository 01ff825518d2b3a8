//! The exact 600-cell certificate over Q(sqrt5).
//!
//! h has degree at most 17, matches a at the eight inner products, matches
//! a' at all of them except t_1 = -1, and has vanishing kernel coefficients
//! 11, 12 and 13 (lambda = 1). Positive definiteness and domination reduce
//! to linear functionals in the jets of a, checked for a = (1+t)^k for all k.

use std::cmp::Ordering;

use super::{verify_domination, Certificate, CertificateKind, DominationMode};
use crate::error::{Error, Result};
use crate::exactfield::{rat, QuadExt, Scalar};
use crate::interp::{hermite, JetData, NodeSpec};
use crate::orthopoly::{Kernel, Poly};
use crate::potential::Potential;

const M: usize = 8;
const DEGREE: usize = 17;
const VANISHING: [usize; 3] = [11, 12, 13];

fn q(n: i64) -> QuadExt {
    QuadExt::from_rational(rat(n, 1))
}

fn qr(n: i64, d: i64) -> QuadExt {
    QuadExt::from_rational(rat(n, d))
}

/// The inner products -1, (-1-sqrt5)/4, -1/2, (1-sqrt5)/4, 0, (-1+sqrt5)/4, 1/2, (1+sqrt5)/4.
pub fn standard_nodes() -> [QuadExt; M] {
    [
        q(-1),
        QuadExt::from_ints(-1, 4, -1, 4),
        qr(-1, 2),
        QuadExt::from_ints(1, 4, -1, 4),
        q(0),
        QuadExt::from_ints(-1, 4, 1, 4),
        qr(1, 2),
        QuadExt::from_ints(1, 4, 1, 4),
    ]
}

/// sum u_i a(t_i) + v_i a'(t_i) + w2 a''(-1) + w3 a'''(-1).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFunctional600 {
    pub u: [QuadExt; M],
    pub v: [QuadExt; M],
    pub w2: QuadExt,
    pub w3: QuadExt,
}

impl Default for LinearFunctional600 {
    fn default() -> Self {
        LinearFunctional600 {
            u: Default::default(),
            v: Default::default(),
            w2: QuadExt::default(),
            w3: QuadExt::default(),
        }
    }
}

impl LinearFunctional600 {
    pub fn is_zero(&self) -> bool {
        self.u.iter().chain(&self.v).chain([&self.w2, &self.w3]).all(Scalar::is_zero)
    }

    fn add_scaled(&mut self, other: &LinearFunctional600, c: &QuadExt) {
        for i in 0..M {
            self.u[i] = self.u[i].add_ref(&other.u[i].mul_ref(c));
            self.v[i] = self.v[i].add_ref(&other.v[i].mul_ref(c));
        }
        self.w2 = self.w2.add_ref(&other.w2.mul_ref(c));
        self.w3 = self.w3.add_ref(&other.w3.mul_ref(c));
    }

    /// Value on a(t) = (1+t)^k.
    pub fn eval_power(&self, nodes: &[QuadExt; M], k: u32) -> QuadExt {
        let mut s = QuadExt::default();
        for i in 0..M {
            let x = q(1) + nodes[i].clone();
            s = s.add_ref(&self.u[i].mul_ref(&x.powi(k)));
            if k > 0 {
                s = s.add_ref(&self.v[i].mul_ref(&(q(k as i64) * x.powi(k - 1))));
            }
        }
        if k == 2 {
            s = s.add_ref(&self.w2.mul_ref(&q(2)));
        }
        if k == 3 {
            s = s.add_ref(&self.w3.mul_ref(&q(6)));
        }
        s
    }

    pub fn render(&self) -> String {
        let u: Vec<String> = self.u.iter().map(|x| x.to_string()).collect();
        let v: Vec<String> = self.v.iter().map(|x| x.to_string()).collect();
        format!("u = [{}]; v = [{}]; w2 = {}; w3 = {}", u.join(", "), v.join(", "), self.w2, self.w3)
    }
}

fn chi(x: &QuadExt) -> QuadExt {
    if x.sign() <= 0 {
        x.clone()
    } else {
        QuadExt::default()
    }
}

/// Outcome of certifying L((1+t)^k) >= 0 for every k >= 0.
#[derive(Clone, Debug)]
pub struct ThresholdCheck {
    pub label: String,
    pub functional: LinearFunctional600,
    /// The functional vanishes identically.
    pub trivial: bool,
    pub v8_positive: bool,
    pub ell: u32,
    /// Left side of the threshold inequality at k = ell.
    pub ellsum: QuadExt,
    pub ellsum_ok: bool,
    /// First k < ell with a negative value.
    pub first_negative: Option<(u32, QuadExt)>,
    pub passed: bool,
}

impl ThresholdCheck {
    pub fn describe(&self) -> String {
        if self.trivial {
            return format!("{}: identically zero -> pass", self.label);
        }
        let mut s = format!(
            "{}: v_8 = {} ({}), threshold sum at l = {} is {} (~{:.6e}) ({})",
            self.label,
            self.functional.v[M - 1],
            if self.v8_positive { "> 0" } else { "NOT > 0" },
            self.ell,
            self.ellsum,
            self.ellsum.to_f64(),
            if self.ellsum_ok { ">= 0" } else { "NEGATIVE" }
        );
        match &self.first_negative {
            Some((k, v)) => s.push_str(&format!(", value at k = {k} is {v} < 0")),
            None => s.push_str(&format!(", values for k = 0..{} nonnegative", self.ell.saturating_sub(1))),
        }
        s.push_str(if self.passed { " -> pass" } else { " -> FAIL" });
        s
    }
}

/// Certifies L((1+t)^k) >= 0 for all k: v_8 > 0, the threshold inequality at
/// k = ell, and direct evaluation for k < ell.
pub fn check_threshold(label: &str, l: &LinearFunctional600, nodes: &[QuadExt; M], ell: u32) -> Result<ThresholdCheck> {
    let top = &nodes[M - 1];
    if nodes.iter().any(|t| t.cmp(top) == Ordering::Greater) {
        return Err(Error::InvalidInput("t_8 must be the largest node".into()));
    }
    if nodes.iter().any(|t| (q(1) + t.clone()).sign() < 0) {
        return Err(Error::InvalidInput("nodes must be >= -1".into()));
    }
    if ell < 4 {
        return Err(Error::InvalidInput("threshold l must be at least 4 (a'' and a''' terms)".into()));
    }
    if l.is_zero() {
        return Ok(ThresholdCheck {
            label: label.into(),
            functional: l.clone(),
            trivial: true,
            v8_positive: false,
            ell,
            ellsum: QuadExt::default(),
            ellsum_ok: true,
            first_negative: None,
            passed: true,
        });
    }
    let v8 = &l.v[M - 1];
    let v8_positive = v8.sign() > 0;
    let mut sum = QuadExt::default();
    for i in 0..M {
        let x = q(1) + nodes[i].clone();
        sum = sum.add_ref(&chi(&l.u[i]).mul_ref(&x.powi(ell)));
        sum = sum.add_ref(&chi(&l.v[i]).mul_ref(&(q(ell as i64) * x.powi(ell - 1))));
    }
    let x8 = q(1) + top.clone();
    sum = sum.add_ref(&v8.mul_ref(&(q(ell as i64) * x8.powi(ell - 1))));
    let ellsum_ok = sum.sign() >= 0;
    let mut first_negative = None;
    for k in 0..ell {
        let v = l.eval_power(nodes, k);
        if v.sign() < 0 {
            first_negative = Some((k, v));
            break;
        }
    }
    let passed = v8_positive && ellsum_ok && first_negative.is_none();
    Ok(ThresholdCheck {
        label: label.into(),
        functional: l.clone(),
        trivial: false,
        v8_positive,
        ell,
        ellsum: sum,
        ellsum_ok,
        first_negative,
        passed,
    })
}

/// Slot index of a(t_i) and a'(t_i) among the 15 interpolation data.
fn slot_value(i: usize) -> usize {
    if i == 0 {
        0
    } else {
        2 * i - 1
    }
}

fn slot_deriv(i: usize) -> usize {
    debug_assert!(i > 0);
    2 * i
}

const SLOTS: usize = 2 * M - 1;

fn slot_functional(s: usize) -> LinearFunctional600 {
    let mut l = LinearFunctional600::default();
    if s == 0 {
        l.u[0] = q(1);
    } else if s % 2 == 1 {
        l.u[(s + 1) / 2] = q(1);
    } else {
        l.v[s / 2] = q(1);
    }
    l
}

/// Gauss-Jordan inverse over Q(sqrt5).
fn invert(mut a: Vec<Vec<QuadExt>>) -> Result<Vec<Vec<QuadExt>>> {
    let n = a.len();
    let mut inv: Vec<Vec<QuadExt>> = (0..n).map(|i| (0..n).map(|j| q((i == j) as i64)).collect()).collect();
    for c in 0..n {
        let p = (c..n)
            .find(|&r| !Scalar::is_zero(&a[r][c]))
            .ok_or_else(|| Error::Singular("600-cell interpolation system is singular".into()))?;
        a.swap(c, p);
        inv.swap(c, p);
        let piv = a[c][c].clone();
        for j in 0..n {
            a[c][j] = a[c][j].clone() / piv.clone();
            inv[c][j] = inv[c][j].clone() / piv.clone();
        }
        for r in 0..n {
            if r == c || Scalar::is_zero(&a[r][c]) {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..n {
                let x = a[c][j].mul_ref(&f);
                a[r][j] = a[r][j].sub_ref(&x);
                let y = inv[c][j].mul_ref(&f);
                inv[r][j] = inv[r][j].sub_ref(&y);
            }
        }
    }
    Ok(inv)
}

/// The degree-17 interpolation system and its linear functionals.
#[derive(Clone, Debug)]
pub struct Cell600System {
    pub nodes: [QuadExt; M],
    basis: Vec<Poly<QuadExt>>,
    /// Free kernel indices (all but 11, 12, 13).
    free: Vec<usize>,
    /// inverse[j][s]: coefficient of data slot s in the j-th free coefficient.
    inverse: Vec<Vec<QuadExt>>,
}

impl Cell600System {
    pub fn standard() -> Self {
        Self::with_nodes(standard_nodes()).expect("the 600-cell system is nonsingular")
    }

    /// The same construction at other nodes (t_1 = -1 < t_2 < ... < t_8 < 1).
    pub fn with_nodes(nodes: [QuadExt; M]) -> Result<Self> {
        if nodes[0] != q(-1) {
            return Err(Error::InvalidInput("t_1 must be -1".into()));
        }
        NodeSpec::new(nodes.to_vec(), vec![1; M])?;
        let basis = Kernel::sphere(4).basis_in::<QuadExt>(DEGREE);
        let free: Vec<usize> = (0..=DEGREE).filter(|j| !VANISHING.contains(j)).collect();
        let derivs: Vec<Poly<QuadExt>> = basis.iter().map(|p| p.derivative()).collect();
        let mut a = vec![vec![QuadExt::default(); free.len()]; SLOTS];
        for (col, &j) in free.iter().enumerate() {
            for i in 0..M {
                a[slot_value(i)][col] = basis[j].eval(&nodes[i]);
                if i > 0 {
                    a[slot_deriv(i)][col] = derivs[j].eval(&nodes[i]);
                }
            }
        }
        let inverse = invert(a)?;
        Ok(Cell600System { nodes, basis, free, inverse })
    }

    fn node_spec(&self) -> NodeSpec<QuadExt> {
        let mut mult = vec![2; M];
        mult[0] = 1;
        NodeSpec::new(self.nodes.to_vec(), mult).expect("ascending nodes")
    }

    /// Slot data a(t_1), a(t_2), a'(t_2), ..., a(t_8), a'(t_8).
    fn slot_data(&self, f: &Potential) -> Result<Vec<QuadExt>> {
        let mut d = vec![QuadExt::default(); SLOTS];
        for i in 0..M {
            let j = f
                .a_derivs_exact(&self.nodes[i], 2)
                .ok_or_else(|| Error::Potential(format!("{f} has no exact jets")))?;
            d[slot_value(i)] = j[0].clone();
            if i > 0 {
                d[slot_deriv(i)] = j[1].clone();
            }
        }
        Ok(d)
    }

    /// Kernel coefficients of h for the given slot data (all 18).
    pub fn coefficients(&self, data: &[QuadExt]) -> Vec<QuadExt> {
        let mut c = vec![QuadExt::default(); DEGREE + 1];
        for (row, &j) in self.free.iter().enumerate() {
            c[j] = self.inverse[row]
                .iter()
                .zip(data)
                .fold(QuadExt::default(), |acc, (x, y)| acc.add_ref(&x.mul_ref(y)));
        }
        c
    }

    pub fn h_from_data(&self, data: &[QuadExt]) -> Poly<QuadExt> {
        self.coefficients(data)
            .iter()
            .zip(&self.basis)
            .fold(Poly::zero(), |acc, (c, b)| &acc + &b.scale(c))
    }

    pub fn h_for(&self, f: &Potential) -> Result<Poly<QuadExt>> {
        Ok(self.h_from_data(&self.slot_data(f)?))
    }

    /// The 18 kernel-coefficient functionals (11, 12, 13 are identically zero).
    pub fn coefficient_functionals(&self) -> Vec<LinearFunctional600> {
        let mut out = vec![LinearFunctional600::default(); DEGREE + 1];
        for (row, &j) in self.free.iter().enumerate() {
            for s in 0..SLOTS {
                out[j].add_scaled(&slot_functional(s), &self.inverse[row][s]);
            }
        }
        out
    }

    fn slot_basis_h(&self, s: usize) -> Poly<QuadExt> {
        let mut e = vec![QuadExt::default(); SLOTS];
        e[s] = q(1);
        self.h_from_data(&e)
    }

    fn slot_basis_hermite(&self, s: usize) -> Result<Poly<QuadExt>> {
        let spec = self.node_spec();
        let mut jets = JetData { jets: spec.multiplicities.iter().map(|&k| vec![QuadExt::default(); k]).collect() };
        let (i, d) = if s == 0 { (0, 0) } else { ((s + 1) / 2, (s + 1) % 2) };
        jets.jets[i][d] = q(1);
        hermite(&spec, &jets)
    }

    /// F(t) = (t+1) prod_{i>=2} (t - t_i)^2.
    pub fn domination_polynomial(&self) -> Poly<QuadExt> {
        self.node_spec().node_polynomial()
    }

    /// Functionals for q_hat(-1) >= 0, q_hat(1) >= 0 and -lc(q_hat) >= 0, where
    /// q_hat = q + (h_tilde - h)/F, h_tilde = H(a, F), and q is the quadratic
    /// Taylor polynomial of (a - h_tilde)/F at t = -1.
    pub fn domination_functionals(&self) -> Result<[LinearFunctional600; 3]> {
        let big_f = self.domination_polynomial();
        let g = big_f.div_exact(&Poly::linear_root(&q(-1)))?;
        let gs = g.shift(&q(-1));
        let (g0, g1, g2) = (gs.coeff(0), gs.coeff(1), gs.coeff(2));
        let r0 = q(1) / g0.clone();
        let r1 = -(g1.clone() / g0.mul_ref(&g0));
        let r2 = (g1.mul_ref(&g1) - g0.mul_ref(&g2)) / g0.mul_ref(&g0).mul_ref(&g0);

        // E_j = (a^{(j)}(-1) - h_tilde^{(j)}(-1)) / j! for j = 1, 2, 3
        let mut e = [LinearFunctional600::default(), LinearFunctional600::default(), LinearFunctional600::default()];
        e[0].v[0] = q(1);
        e[1].w2 = qr(1, 2);
        e[2].w3 = qr(1, 6);
        // D(s) = (h_tilde - h)/F in powers of s = t + 1
        let mut dq = [LinearFunctional600::default(), LinearFunctional600::default(), LinearFunctional600::default()];
        let m1 = q(-1);
        for s in 0..SLOTS {
            let ht = self.slot_basis_hermite(s)?;
            let hs = self.slot_basis_h(s);
            let sl = slot_functional(s);
            let mut d = ht.clone();
            for (j, fact) in [(1usize, 1i64), (2, 2), (3, 6)] {
                d = d.derivative();
                let c = -(d.eval(&m1) / q(fact));
                e[j - 1].add_scaled(&sl, &c);
            }
            let quot = (&ht - &hs).div_exact(&big_f).map_err(|_| {
                Error::Singular("h_tilde - h is not divisible by F (interpolation conditions violated)".into())
            })?;
            if quot.degree().map_or(false, |d| d > 2) {
                return Err(Error::Singular("(h_tilde - h)/F has degree above 2".into()));
            }
            let qs = quot.shift(&m1);
            for k in 0..3 {
                dq[k].add_scaled(&sl, &qs.coeff(k));
            }
        }
        // q(s) = q0 + q1 s + q2 s^2
        let mut q0 = LinearFunctional600::default();
        q0.add_scaled(&e[0], &r0);
        let mut q1 = LinearFunctional600::default();
        q1.add_scaled(&e[0], &r1);
        q1.add_scaled(&e[1], &r0);
        let mut q2 = LinearFunctional600::default();
        q2.add_scaled(&e[0], &r2);
        q2.add_scaled(&e[1], &r1);
        q2.add_scaled(&e[2], &r0);

        let mut at_minus = q0.clone();
        at_minus.add_scaled(&dq[0], &q(1));
        let mut at_plus = q0;
        at_plus.add_scaled(&q1, &q(2));
        at_plus.add_scaled(&q2, &q(4));
        for (k, w) in [(0usize, 1i64), (1, 2), (2, 4)] {
            at_plus.add_scaled(&dq[k], &q(w));
        }
        let mut lead = LinearFunctional600::default();
        lead.add_scaled(&q2, &q(-1));
        lead.add_scaled(&dq[2], &q(-1));
        Ok([at_minus, at_plus, lead])
    }
}

/// Verdict for one of the two 600-cell checks.
#[derive(Clone, Debug)]
pub struct Cell600Verdict {
    pub checks: Vec<ThresholdCheck>,
    pub passed: bool,
}

impl Cell600Verdict {
    pub fn report(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&c.describe());
            s.push('\n');
        }
        s.push_str(if self.passed { "verdict = pass\n" } else { "verdict = FAIL\n" });
        s
    }
}

pub fn verify_600cell_pd_with(sys: &Cell600System, ell: u32) -> Result<Cell600Verdict> {
    let checks = sys
        .coefficient_functionals()
        .iter()
        .enumerate()
        .map(|(j, l)| check_threshold(&format!("alpha_{j}"), l, &sys.nodes, ell))
        .collect::<Result<Vec<_>>>()?;
    let passed = checks.iter().all(|c| c.passed);
    Ok(Cell600Verdict { checks, passed })
}

pub fn verify_600cell_domination_with(sys: &Cell600System, ell: u32) -> Result<Cell600Verdict> {
    let labels = ["q_hat(-1) >= 0", "q_hat(1) >= 0", "leading coefficient <= 0"];
    let checks = sys
        .domination_functionals()?
        .iter()
        .zip(labels)
        .map(|(l, name)| check_threshold(name, l, &sys.nodes, ell))
        .collect::<Result<Vec<_>>>()?;
    let passed = checks.iter().all(|c| c.passed);
    Ok(Cell600Verdict { checks, passed })
}

/// Positive definiteness for every (1+t)^k, with l = 32.
pub fn verify_600cell_pd() -> Result<Cell600Verdict> {
    verify_600cell_pd_with(&Cell600System::standard(), 32)
}

/// h <= a for every (1+t)^k, with l = 36.
pub fn verify_600cell_domination() -> Result<Cell600Verdict> {
    verify_600cell_domination_with(&Cell600System::standard(), 36)
}

/// The certificate for f(r) = (4 - r)^k, i.e. a(t) = (2+2t)^k.
pub fn build_600cell_certificate(k: u32) -> Result<Certificate<QuadExt>> {
    build_600cell_certificate_with(&Cell600System::standard(), k)
}

pub fn build_600cell_certificate_with(sys: &Cell600System, k: u32) -> Result<Certificate<QuadExt>> {
    let f = Potential::TruncatedPower(k);
    let h = sys.h_for(&f)?;
    let kernel = Kernel::sphere(4);
    let mut cert = Certificate::from_poly(CertificateKind::Cell600, kernel, 120, h);
    cert.expansion.coeffs.resize(DEGREE + 1, QuadExt::default());
    for j in VANISHING {
        if !Scalar::is_zero(&cert.expansion.coeffs[j]) {
            return Err(Error::Singular(format!("kernel coefficient {j} does not vanish")));
        }
    }
    cert.potential = Some(f.clone());
    cert.nodes = Some(sys.node_spec());
    cert.pd_verified = cert.expansion.is_positive_definite();
    if !cert.pd_verified {
        cert.notes.push("negative kernel coefficient".into());
    }
    let dom = verify_domination(&cert.h, cert.nodes.as_ref(), &f, DominationMode::Sturm)?;
    cert.domination_verified = dom.passed;
    cert.notes.push(format!("domination ({}): {}", dom.mode, dom.detail));
    cert.notes.push("kernel coefficients 11, 12, 13 vanish".into());
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{cell600, energy};
    use crate::exactfield::Number;
    use crate::interp::{hermite_of_poly, quotient};

    #[test]
    fn constant_potential() {
        let c = build_600cell_certificate(0).unwrap();
        assert_eq!(c.h, Poly::constant(q(1)));
        assert_eq!(c.bound, q(14280));
        assert!(c.expansion.coeffs[1..].iter().all(Scalar::is_zero));
    }

    #[test]
    fn bound_equals_energy_small_k() {
        let cfg = cell600();
        for k in [1u32, 2, 5, 12, 17] {
            let c = build_600cell_certificate(k).unwrap();
            assert!(c.h.degree().unwrap() <= 17);
            assert_eq!(Number::Exact(c.bound.clone()), energy(&cfg, &Potential::TruncatedPower(k)).unwrap(), "k={k}");
            assert!(c.is_valid(), "k={k}: {}", c.report());
        }
        assert_eq!(build_600cell_certificate(1).unwrap().bound, q(28320));
    }

    #[test]
    fn functionals_reproduce_coefficients() {
        let sys = Cell600System::standard();
        let funcs = sys.coefficient_functionals();
        assert!(funcs[11].is_zero() && funcs[12].is_zero() && funcs[13].is_zero());
        let two = q(2);
        for k in [0u32, 3, 9, 20] {
            let c = build_600cell_certificate(k).unwrap();
            for (j, l) in funcs.iter().enumerate() {
                // a = (2+2t)^k = 2^k (1+t)^k
                let v = l.eval_power(&sys.nodes, k).mul_ref(&two.powi(k));
                assert_eq!(v, c.expansion.coeffs[j], "k={k} j={j}");
            }
        }
    }

    #[test]
    fn domination_functionals_match_direct_quadratic() {
        let sys = Cell600System::standard();
        let fs = sys.domination_functionals().unwrap();
        let big_f = sys.domination_polynomial();
        let m1 = q(-1);
        for k in [0u32, 1, 2, 3, 4, 7, 15, 24] {
            let a = Poly::new(vec![q(1), q(1)]).pow(k as usize);
            let data: Vec<QuadExt> = {
                let da = a.derivative();
                let mut d = vec![QuadExt::default(); SLOTS];
                for i in 0..M {
                    d[slot_value(i)] = a.eval(&sys.nodes[i]);
                    if i > 0 {
                        d[slot_deriv(i)] = da.eval(&sys.nodes[i]);
                    }
                }
                d
            };
            let h = sys.h_from_data(&data);
            let ht = hermite_of_poly(&a, &big_f);
            let quo = quotient(&a, &big_f).shift(&m1);
            let taylor = Poly::new(vec![quo.coeff(0), quo.coeff(1), quo.coeff(2)]);
            let corr = (&ht - &h).div_exact(&big_f).unwrap().shift(&m1);
            let qhat = &taylor + &corr;
            let direct = [qhat.eval(&q(0)), qhat.eval(&q(2)), -qhat.coeff(2)];
            for (l, want) in fs.iter().zip(direct) {
                assert_eq!(l.eval_power(&sys.nodes, k), want, "k={k}");
            }
        }
    }

    #[test]
    fn threshold_soundness_beyond_ell() {
        let sys = Cell600System::standard();
        let v = verify_600cell_pd_with(&sys, 32).unwrap();
        assert!(v.passed, "{}", v.report());
        // the threshold argument predicts nonnegativity past l; check a stretch directly
        for l in sys.coefficient_functionals() {
            for k in 32..48 {
                assert!(l.eval_power(&sys.nodes, k).sign() >= 0);
            }
        }
    }

    #[test]
    fn domination_passes_and_grid_cross_check() {
        let v = verify_600cell_domination().unwrap();
        assert!(v.passed, "{}", v.report());
        let sys = Cell600System::standard();
        for k in [0u32, 4, 11, 31] {
            let f = Potential::TruncatedPower(k);
            let h = sys.h_for(&f).unwrap().to_f64();
            for j in 0..1000 {
                let t = -1.0 + 2.0 * j as f64 / 1000.0;
                let a = f.a(t);
                assert!(a - h.eval(&t) >= -1e-9 * a.abs().max(1.0), "k={k} t={t}");
            }
        }
    }

    #[test]
    fn mutated_node_fails() {
        let mut nodes = standard_nodes();
        nodes[7] = nodes[7].clone() - qr(1, 50);
        let sys = Cell600System::with_nodes(nodes).unwrap();
        let pd = verify_600cell_pd_with(&sys, 32).unwrap();
        let dom = verify_600cell_domination_with(&sys, 36).unwrap();
        assert!(!pd.passed && !dom.passed);
    }
}
