//! Linear-programming energy bounds and their certificates.

pub mod cell600;
pub mod file;

use std::cmp::Ordering;
use std::fmt;

use crate::config::{Geometry, PointConfiguration};
use crate::error::{Error, Result};
use crate::exactfield::{QuadExt, Scalar};
use crate::interp::{conductivity_chain, hermite, JetData, NodeSpec};
use crate::orthopoly::{expand, real_roots, Kernel, Poly, UltraExpansion};
use crate::potential::Potential;

pub use cell600::{
    build_600cell_certificate, build_600cell_certificate_with, verify_600cell_domination, verify_600cell_domination_with,
    verify_600cell_pd, verify_600cell_pd_with, Cell600System, Cell600Verdict,
    LinearFunctional600, ThresholdCheck,
};
pub use file::{verify_certificate_text, CertificateFile, Verdict, VerdictLine};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    Sharp,
    Levenshtein,
    Cell600,
    Projective,
    LpNumeric,
    Explicit,
}

impl CertificateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateKind::Sharp => "sharp",
            CertificateKind::Levenshtein => "levenshtein",
            CertificateKind::Cell600 => "cell600",
            CertificateKind::Projective => "projective",
            CertificateKind::LpNumeric => "lp-numeric",
            CertificateKind::Explicit => "explicit",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "sharp" => CertificateKind::Sharp,
            "levenshtein" => CertificateKind::Levenshtein,
            "cell600" => CertificateKind::Cell600,
            "projective" => CertificateKind::Projective,
            "lp-numeric" => CertificateKind::LpNumeric,
            "explicit" => CertificateKind::Explicit,
            _ => return Err(Error::Parse(format!("unknown certificate kind '{s}'"))),
        })
    }
}

/// An auxiliary polynomial h with its kernel expansion and the bound it implies.
#[derive(Clone, Debug)]
pub struct Certificate<S: Scalar> {
    pub kind: CertificateKind,
    pub kernel: Kernel,
    pub n_points: usize,
    pub h: Poly<S>,
    pub expansion: UltraExpansion<S>,
    pub nodes: Option<NodeSpec<S>>,
    pub potential: Option<Potential>,
    /// N^2 alpha_0 - N h(1).
    pub bound: S,
    pub pd_verified: bool,
    pub domination_verified: bool,
    pub strict: bool,
    pub notes: Vec<String>,
}

impl<S: Scalar> Certificate<S> {
    /// Builds the record for `h`, computing the expansion and bound.
    pub fn from_poly(kind: CertificateKind, kernel: Kernel, n_points: usize, h: Poly<S>) -> Self {
        let expansion = expand(&h, &kernel);
        let bound = bound_value(&expansion, n_points);
        Certificate {
            kind,
            kernel,
            n_points,
            h,
            expansion,
            nodes: None,
            potential: None,
            bound,
            pd_verified: false,
            domination_verified: false,
            strict: false,
            notes: Vec::new(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.pd_verified && self.domination_verified
    }

    pub fn bound_f64(&self) -> f64 {
        self.bound.to_f64()
    }

    /// Key-value summary.
    pub fn report(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("kind = {}\n", self.kind.as_str()));
        s.push_str(&format!("kernel = {}\n", self.kernel.describe()));
        s.push_str(&format!("n_points = {}\n", self.n_points));
        if let Some(f) = &self.potential {
            s.push_str(&format!("potential = {f}\n"));
        }
        if let Some(n) = &self.nodes {
            let parts: Vec<String> = n
                .nodes
                .iter()
                .zip(&n.multiplicities)
                .map(|(t, k)| format!("{}^{}", t.render(), k))
                .collect();
            s.push_str(&format!("nodes = {}\n", parts.join(" ")));
        }
        s.push_str(&format!("degree = {}\n", self.h.degree().unwrap_or(0)));
        let coeffs: Vec<String> = self.expansion.coeffs.iter().map(|c| c.render()).collect();
        s.push_str(&format!("alpha = [{}]\n", coeffs.join(", ")));
        s.push_str(&format!("bound = {}\n", self.bound.render()));
        if S::EXACT {
            s.push_str(&format!("bound_approx = {:.12}\n", self.bound.to_f64()));
        }
        s.push_str(&format!("pd_verified = {}\n", self.pd_verified));
        s.push_str(&format!("domination_verified = {}\n", self.domination_verified));
        s.push_str(&format!("strict = {}\n", self.strict));
        for n in &self.notes {
            s.push_str(&format!("note = {n}\n"));
        }
        s
    }
}

/// An exact or a floating certificate.
#[derive(Clone, Debug)]
pub enum AnyCertificate {
    Exact(Certificate<QuadExt>),
    Float(Certificate<f64>),
}

impl AnyCertificate {
    pub fn bound_f64(&self) -> f64 {
        match self {
            AnyCertificate::Exact(c) => c.bound_f64(),
            AnyCertificate::Float(c) => c.bound_f64(),
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            AnyCertificate::Exact(c) => c.is_valid(),
            AnyCertificate::Float(c) => c.is_valid(),
        }
    }

    pub fn pd_verified(&self) -> bool {
        match self {
            AnyCertificate::Exact(c) => c.pd_verified,
            AnyCertificate::Float(c) => c.pd_verified,
        }
    }

    pub fn report(&self) -> String {
        match self {
            AnyCertificate::Exact(c) => c.report(),
            AnyCertificate::Float(c) => c.report(),
        }
    }

    pub fn as_exact(&self) -> Option<&Certificate<QuadExt>> {
        match self {
            AnyCertificate::Exact(c) => Some(c),
            AnyCertificate::Float(_) => None,
        }
    }

    pub fn as_float(&self) -> Option<&Certificate<f64>> {
        match self {
            AnyCertificate::Float(c) => Some(c),
            AnyCertificate::Exact(_) => None,
        }
    }

    pub fn to_file(&self) -> CertificateFile {
        match self {
            AnyCertificate::Exact(c) => CertificateFile::from_certificate(c),
            AnyCertificate::Float(c) => CertificateFile::from_certificate(c),
        }
    }
}

/// N^2 alpha_0 - N h(1), without validity checks.
pub fn bound_value<S: Scalar>(e: &UltraExpansion<S>, n_points: usize) -> S {
    let n = S::from_i64(n_points as i64);
    n.clone() * n.clone() * e.alpha0() - n * e.value_at_one()
}

fn check_coefficients<S: Scalar>(e: &UltraExpansion<S>) -> Result<()> {
    let neg = e.negative_indices();
    if !neg.is_empty() {
        let list: Vec<String> = neg.iter().map(|i| format!("{i} ({})", e.coeffs[*i].render())).collect();
        return Err(Error::InvalidCertificate(format!("negative kernel coefficients at indices {}", list.join(", "))));
    }
    Ok(())
}

/// The linear-programming bound N^2 alpha_0 - N h(1); errors when some alpha_i < 0.
pub fn lp_bound<S: Scalar>(e: &UltraExpansion<S>, n_points: usize) -> Result<S> {
    check_coefficients(e)?;
    Ok(bound_value(e, n_points))
}

/// Bound for charges c_i: (sum c_i)^2 alpha_0 - (sum c_i^2) h(1).
pub fn lp_bound_charges<S: Scalar>(e: &UltraExpansion<S>, charges: &[S]) -> Result<S> {
    check_coefficients(e)?;
    let s = charges.iter().fold(S::zero(), |acc, c| acc + c.clone());
    let s2 = charges.iter().fold(S::zero(), |acc, c| acc + c.clone() * c.clone());
    Ok(s.clone() * s * e.alpha0() - s2 * e.value_at_one())
}

/// lp_bound for h given by its coefficients in the kernel basis.
pub fn lp_bound_from_coeffs(kernel: &Kernel, coeffs: &[f64], n_points: usize) -> Result<f64> {
    let e = UltraExpansion { kernel: kernel.clone(), coeffs: coeffs.to_vec() };
    lp_bound(&e, n_points)
}

fn jets_for<S: Scalar>(f: &Potential, t: &S, k: usize) -> Result<Vec<S>> {
    if S::EXACT {
        f.a_derivs_exact(t, k)
            .ok_or_else(|| Error::Potential(format!("{f} has no exact jet at t = {}", t.render())))
    } else {
        let d = f.a_derivs(t.to_f64(), k);
        if d.iter().any(|x| !x.is_finite()) {
            return Err(Error::Potential(format!("{f} is not finite at t = {}", t.to_f64())));
        }
        Ok(d.into_iter().map(|x| S::from_f64(x).expect("finite")).collect())
    }
}

/// Certificate from Hermite interpolation of a(t) = f(2 - 2t): order 2 at
/// every node, or order 1 at t_1 = -1 when `antipodal_first_order`.
pub fn certificate_at_nodes<S: Scalar>(
    kind: CertificateKind,
    kernel: &Kernel,
    n_points: usize,
    nodes: &[S],
    f: &Potential,
    antipodal_first_order: bool,
) -> Result<Certificate<S>> {
    if nodes.is_empty() {
        return Err(Error::InvalidInput("no interpolation nodes".into()));
    }
    let m1 = -S::one();
    if nodes[0].cmp_s(&m1) == Ordering::Less || nodes[nodes.len() - 1].cmp_s(&S::one()) != Ordering::Less {
        return Err(Error::NodeOutOfRange("nodes must lie in [-1, 1)".into()));
    }
    let mut mult = vec![2; nodes.len()];
    if antipodal_first_order {
        if nodes[0] != m1 {
            return Err(Error::InvalidInput("the antipodal construction needs t_1 = -1".into()));
        }
        mult[0] = 1;
    }
    let spec = NodeSpec::new(nodes.to_vec(), mult)?;
    let jets = JetData::from_fn(&spec, |t, k| jets_for(f, t, k))?;
    let h = hermite(&spec, &jets)?;
    let mut cert = Certificate::from_poly(kind, kernel.clone(), n_points, h);
    cert.potential = Some(f.clone());

    let chain = conductivity_chain(kernel, nodes, !antipodal_first_order, antipodal_first_order)?;
    let abs_mono = f.is_absolutely_monotonic();
    let direct = cert.expansion.is_positive_definite();
    if chain.conductive && abs_mono {
        cert.notes.push("positive definite by the conductivity chain".into());
    } else {
        if let Some(msg) = chain.describe_failure() {
            cert.notes.push(format!("conductivity chain fails: {msg}"));
        }
        if !abs_mono {
            cert.notes.push(format!("{f} is not known to be absolutely monotonic"));
        }
    }
    if !direct {
        let neg: Vec<String> = cert.expansion.negative_indices().iter().map(|i| i.to_string()).collect();
        cert.notes.push(format!("h has negative kernel coefficients at indices {}", neg.join(", ")));
    }
    // an exact nonnegative expansion proves positive definiteness of this h on its own
    cert.pd_verified = (chain.conductive && abs_mono && direct) || (S::EXACT && direct);
    cert.strict = chain.strictly_conductive && abs_mono;
    let dom = verify_domination(&cert.h, Some(&spec), f, DominationMode::Structural)?;
    cert.domination_verified = dom.passed;
    if !dom.passed {
        cert.notes.push(format!("domination: {}", dom.detail));
    }
    cert.nodes = Some(spec);
    Ok(cert)
}

/// Sharp-configuration certificate for a sphere configuration.
///
/// Exact when the configuration is exact and f has exact jets; floating otherwise.
pub fn build_sharp_certificate(c: &PointConfiguration, f: &Potential) -> Result<AnyCertificate> {
    if c.geometry.is_projective() {
        return Err(Error::InvalidInput("use projective_certificate for projective spaces".into()));
    }
    build_from_configuration(c, f, false, CertificateKind::Sharp)
}

fn build_from_configuration(
    c: &PointConfiguration,
    f: &Potential,
    antipodal: bool,
    kind: CertificateKind,
) -> Result<AnyCertificate> {
    let kernel = c.geometry.kernel();
    let values = c.distance_distribution().nonunit_values();
    if values.is_empty() {
        return Err(Error::InvalidInput("configuration has a single point".into()));
    }
    let n = c.len();
    if values.iter().all(|v| v.is_exact()) && f.supports_exact() {
        let nodes: Vec<QuadExt> = values.iter().map(|v| v.as_exact().expect("exact").clone()).collect();
        Ok(AnyCertificate::Exact(certificate_at_nodes(kind, &kernel, n, &nodes, f, antipodal)?))
    } else {
        let nodes: Vec<f64> = values.iter().map(|v| v.to_f64()).collect();
        Ok(AnyCertificate::Float(certificate_at_nodes(kind, &kernel, n, &nodes, f, antipodal)?))
    }
}

/// Sharp certificate from an explicit inner-product list on S^{n-1}.
pub fn build_sharp_certificate_from_nodes<S: Scalar>(
    n: usize,
    n_points: usize,
    nodes: &[S],
    f: &Potential,
) -> Result<Certificate<S>> {
    certificate_at_nodes(CertificateKind::Sharp, &Kernel::sphere(n), n_points, nodes, f, false)
}

/// Projective certificate in the Jacobi kernel of the geometry.
pub fn projective_certificate(c: &PointConfiguration, f: &Potential, antipodal: bool) -> Result<AnyCertificate> {
    if !matches!(c.geometry, Geometry::Projective { .. }) {
        return Err(Error::InvalidInput("projective_certificate needs a projective configuration".into()));
    }
    build_from_configuration(c, f, antipodal, CertificateKind::Projective)
}

/// Projective certificate from cos-distances in an explicit kernel.
pub fn projective_certificate_from_nodes<S: Scalar>(
    kernel: &Kernel,
    n_points: usize,
    nodes: &[S],
    f: &Potential,
    antipodal: bool,
) -> Result<Certificate<S>> {
    certificate_at_nodes(CertificateKind::Projective, kernel, n_points, nodes, f, antipodal)
}

/// Largest admissible alpha: -C_m(-1) / C_{m-1}(-1).
pub fn levenshtein_alpha_max(n: usize, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be at least 1".into()));
    }
    let b = Kernel::sphere(n).basis(m);
    Ok(-b[m].eval_f64(-1.0) / b[m - 1].eval_f64(-1.0))
}

/// Certificate with nodes at the roots of C_m + alpha C_{m-1}.
pub fn build_levenshtein_certificate(
    n: usize,
    m: usize,
    alpha: f64,
    n_points: usize,
    f: &Potential,
) -> Result<Certificate<f64>> {
    if n < 2 {
        return Err(Error::InvalidInput("dimension must be at least 2".into()));
    }
    let amax = levenshtein_alpha_max(n, m)?;
    if !(alpha >= 0.0 && alpha <= amax * (1.0 + 1e-12)) {
        return Err(Error::InvalidInput(format!("alpha must lie in [0, {amax}] so that t_1 >= -1")));
    }
    let kernel = Kernel::sphere(n);
    let b = kernel.basis_in::<f64>(m);
    let p = &b[m] + &b[m - 1].scale(&alpha);
    let roots = real_roots(&p, &-1.0, &1.0, 1e-14)?;
    let mut nodes: Vec<f64> = roots.iter().map(|r| r.approx.max(-1.0)).collect();
    nodes.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if nodes.len() != m {
        return Err(Error::RootIsolation(format!("expected {m} roots in [-1, 1], found {}", nodes.len())));
    }
    let mut cert = certificate_at_nodes(CertificateKind::Levenshtein, &kernel, n_points, &nodes, f, false)?;
    cert.notes.push(format!("nodes are the roots of C_{m} + {alpha} C_{}", m - 1));
    Ok(cert)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DominationMode {
    Structural,
    Sturm,
    Grid,
}

impl DominationMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "structural" => Ok(DominationMode::Structural),
            "sturm" => Ok(DominationMode::Sturm),
            "grid" => Ok(DominationMode::Grid),
            _ => Err(Error::InvalidInput(format!("unknown domination mode '{s}'"))),
        }
    }
}

impl fmt::Display for DominationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DominationMode::Structural => "structural",
            DominationMode::Sturm => "sturm",
            DominationMode::Grid => "grid",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominationVerdict {
    pub mode: DominationMode,
    pub passed: bool,
    /// min (a - h) found (0 for structural proofs).
    pub margin: f64,
    pub argmin: f64,
    pub detail: String,
}

const GRID_POINTS: usize = 10_000;

/// Checks h(t) <= a(t) on [-1, 1).
pub fn verify_domination<S: Scalar>(
    h: &Poly<S>,
    nodes: Option<&NodeSpec<S>>,
    f: &Potential,
    mode: DominationMode,
) -> Result<DominationVerdict> {
    match mode {
        DominationMode::Structural => structural(h, nodes, f),
        DominationMode::Sturm => sturm(h, nodes, f),
        DominationMode::Grid => Ok(grid(&h.to_f64(), f)),
    }
}

fn fail(mode: DominationMode, detail: String) -> DominationVerdict {
    DominationVerdict { mode, passed: false, margin: f64::NAN, argmin: f64::NAN, detail }
}

fn structural<S: Scalar>(h: &Poly<S>, nodes: Option<&NodeSpec<S>>, f: &Potential) -> Result<DominationVerdict> {
    let mode = DominationMode::Structural;
    let spec = nodes.ok_or_else(|| Error::InvalidInput("structural mode needs the interpolation nodes".into()))?;
    if !f.is_absolutely_monotonic() {
        return Ok(fail(mode, format!("{f} is not known to be absolutely monotonic")));
    }
    let m1 = -S::one();
    for (t, &k) in spec.nodes.iter().zip(&spec.multiplicities) {
        if t.cmp_s(&m1) == Ordering::Less || t.cmp_s(&S::one()) != Ordering::Less {
            return Ok(fail(mode, format!("node {} outside [-1, 1)", t.render())));
        }
        if k % 2 == 1 && *t != m1 {
            return Ok(fail(mode, format!("odd multiplicity at interior node {}", t.render())));
        }
    }
    if h.degree().map_or(false, |d| d >= spec.order()) {
        return Ok(fail(mode, "deg h is not below the interpolation order".into()));
    }
    let jets = JetData::from_fn(spec, |t, k| jets_for(f, t, k))?;
    let got = JetData::from_poly(spec, h);
    for (i, (a, b)) in jets.jets.iter().zip(&got.jets).enumerate() {
        for (j, (x, y)) in a.iter().zip(b).enumerate() {
            let ok = if S::EXACT {
                x == y
            } else {
                (x.to_f64() - y.to_f64()).abs() <= 1e-8 * x.to_f64().abs().max(1.0)
            };
            if !ok {
                return Ok(fail(
                    mode,
                    format!("h does not match derivative {j} of a at node {}", spec.nodes[i].render()),
                ));
            }
        }
    }
    Ok(DominationVerdict {
        mode,
        passed: true,
        margin: 0.0,
        argmin: spec.nodes[0].to_f64(),
        detail: "Hermite remainder: absolutely monotonic a, nonnegative node polynomial".into(),
    })
}

fn sturm<S: Scalar>(h: &Poly<S>, nodes: Option<&NodeSpec<S>>, f: &Potential) -> Result<DominationVerdict> {
    let mode = DominationMode::Sturm;
    if !S::EXACT {
        return Err(Error::InvalidInput("sturm mode needs exact coefficients".into()));
    }
    let a = f
        .a_poly()
        .ok_or_else(|| Error::InvalidInput(format!("sturm mode needs a polynomial potential, got {f}")))?;
    let d = &a.convert::<S>() - h;
    if d.is_zero() {
        return Ok(DominationVerdict { mode, passed: true, margin: 0.0, argmin: -1.0, detail: "a - h is identically zero".into() });
    }
    let lo = -S::one();
    let hi = S::one();
    let roots = real_roots(&d, &lo, &hi, 1e-6)?;
    for r in &roots {
        let interior = r.lo.cmp_s(&lo) == Ordering::Greater && r.hi.cmp_s(&hi) == Ordering::Less;
        if interior && r.multiplicity % 2 == 1 {
            return Ok(fail(mode, format!("a - h changes sign near t = {:.12}", r.approx)));
        }
    }
    // no sign change inside (-1, 1): test the widest root-free gap
    let mut marks = vec![lo.clone()];
    for r in &roots {
        marks.push(r.lo.clone());
        marks.push(r.hi.clone());
    }
    marks.push(hi);
    let half = S::from_rational(&crate::exactfield::rat(1, 2));
    let mut best: Option<(S, S)> = None;
    for w in marks.windows(2) {
        let gap = w[1].clone() - w[0].clone();
        if best.as_ref().map_or(true, |(g, _)| gap.cmp_s(g) == Ordering::Greater) {
            best = Some((gap, (w[0].clone() + w[1].clone()) * half.clone()));
        }
    }
    let (_, probe) = best.expect("at least one gap");
    let v = d.eval(&probe);
    if v.sign() <= 0 {
        return Ok(fail(mode, format!("a - h = {} < 0 at t = {}", v.render(), probe.render())));
    }
    let mut detail = format!("no odd-multiplicity root in (-1, 1); a - h > 0 at t = {}", probe.render());
    if let Some(spec) = nodes {
        let want: usize = spec.order();
        let got: usize = roots.iter().map(|r| r.multiplicity).sum();
        detail.push_str(&format!("; root count {got} (prescribed {want})"));
    }
    let g = grid(&h.to_f64(), f);
    Ok(DominationVerdict { mode, passed: true, margin: g.margin.max(0.0), argmin: g.argmin, detail })
}

fn grid(h: &Poly<f64>, f: &Potential) -> DominationVerdict {
    let mode = DominationMode::Grid;
    let gap = |t: f64| f.a(t) - h.eval(&t);
    let ts: Vec<f64> = (0..GRID_POINTS).map(|j| -1.0 + 2.0 * j as f64 / GRID_POINTS as f64).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| gap(t)).collect();
    let scale = ts.iter().map(|&t| f.a(t).abs()).filter(|x| x.is_finite()).fold(1.0, f64::max);
    if vals.iter().any(|v| v.is_nan()) {
        return fail(mode, "a(t) is not finite on the grid".into());
    }
    let mut margin = f64::INFINITY;
    let mut argmin = -1.0;
    let step = 2.0 / GRID_POINTS as f64;
    for j in 0..vals.len() {
        let left = if j > 0 { vals[j - 1] } else { f64::INFINITY };
        let right = if j + 1 < vals.len() { vals[j + 1] } else { f64::INFINITY };
        let (mut t, mut v) = (ts[j], vals[j]);
        if v <= left && v <= right {
            // golden-section refinement around a local minimum
            let (mut a, mut b) = ((t - step).max(-1.0), (t + step).min(1.0 - 1e-12));
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..60 {
                let x1 = b - g * (b - a);
                let x2 = a + g * (b - a);
                if gap(x1) < gap(x2) {
                    b = x2;
                } else {
                    a = x1;
                }
            }
            let x = 0.5 * (a + b);
            let vx = gap(x);
            if vx < v {
                t = x;
                v = vx;
            }
        }
        if v < margin {
            margin = v;
            argmin = t;
        }
    }
    let tol = 1e-10 * scale;
    let passed = margin >= -tol;
    let detail = if passed {
        format!("min (a - h) = {margin:e} at t = {argmin:.9}")
    } else {
        format!("violation: h - a = {:e} > 0 at t = {argmin:.9}", -margin)
    };
    DominationVerdict { mode, passed, margin, argmin, detail }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{self, energy};
    use crate::exactfield::{rat, Number};

    fn pot(s: &str) -> Potential {
        Potential::parse(s).unwrap()
    }

    #[test]
    fn explicit_twenty_point_bound() {
        let k = Kernel::sphere(3);
        let c = [0.8729, 0.634, 0.425, 0.258, 0.135, 0.0569, 0.016];
        let b = lp_bound_from_coeffs(&k, &c, 20).unwrap();
        assert!((b - 301.204).abs() < 5e-4, "{b}");
        let e = UltraExpansion { kernel: k.clone(), coeffs: vec![0.0, 1.0] };
        assert!(lp_bound(&e, 20).unwrap() < 0.0);
        let e = UltraExpansion { kernel: k.clone(), coeffs: vec![0.5] };
        assert_eq!(lp_bound(&e, 20).unwrap(), 20.0 * 19.0 * 0.5);
        let e = UltraExpansion { kernel: k, coeffs: vec![1.0, -0.5, 0.2, -0.1] };
        let err = lp_bound(&e, 20).unwrap_err().to_string();
        assert!(err.contains("1 (") && err.contains("3 ("), "{err}");
    }

    #[test]
    fn charges_reduce_to_counts() {
        let e = UltraExpansion { kernel: Kernel::sphere(3), coeffs: vec![0.8729, 0.634, 0.425] };
        let b = lp_bound(&e, 7).unwrap();
        let c = lp_bound_charges(&e, &[1.0; 7]).unwrap();
        assert!((b - c).abs() < 1e-12);
    }

    #[test]
    fn levenshtein_bound() {
        let c = build_levenshtein_certificate(3, 3, 0.752718117, 20, &pot("inv:0.5")).unwrap();
        assert!(c.is_valid(), "{}", c.report());
        assert!((c.bound - 299.708).abs() < 0.01, "{}", c.bound);
        let t = build_levenshtein_certificate(3, 1, 0.0, 20, &pot("inv:1")).unwrap();
        let nodes = &t.nodes.as_ref().unwrap().nodes;
        assert_eq!(nodes.len(), 1);
        assert!(nodes[0].abs() < 1e-14);
        let a = pot("inv:1").a_derivs(0.0, 2);
        assert!((t.h.coeff(0) - a[0]).abs() < 1e-12 && (t.h.coeff(1) - a[1]).abs() < 1e-12);
        let amax = levenshtein_alpha_max(3, 2).unwrap();
        let e = build_levenshtein_certificate(3, 2, amax, 20, &pot("inv:1")).unwrap();
        assert!((e.nodes.unwrap().nodes[0] + 1.0).abs() < 1e-12);
        assert!(build_levenshtein_certificate(3, 2, amax + 0.1, 20, &pot("inv:1")).is_err());
    }

    #[test]
    fn simplex_tangent_line_is_sharp() {
        for (n, big_n) in [(3usize, 4usize), (6, 4), (5, 6)] {
            let c = config::simplex(n, big_n).unwrap();
            for f in ["inv:1", "inv:2", "pow4:1", "exp:1"] {
                let f = pot(f);
                let cert = build_sharp_certificate(&c, &f).unwrap();
                assert!(cert.is_valid());
                let want = (big_n * (big_n - 1)) as f64 * f.value(2.0 + 2.0 / (big_n as f64 - 1.0));
                assert!((cert.bound_f64() - want).abs() < 1e-10 * want);
            }
        }
    }

    #[test]
    fn icosahedron_sharp_exact() {
        let c = config::icosahedron();
        let f = pot("inv:1");
        let cert = build_sharp_certificate(&c, &f).unwrap();
        let ex = cert.as_exact().unwrap();
        assert!(ex.is_valid() && ex.strict);
        assert_eq!(Number::Exact(ex.bound.clone()), energy(&c, &f).unwrap());
        let p = build_sharp_certificate(&c, &pot("pow4:5")).unwrap();
        let p = p.as_exact().unwrap();
        let v = verify_domination(&p.h, p.nodes.as_ref(), &pot("pow4:5"), DominationMode::Structural).unwrap();
        assert!(v.passed);
        let s = verify_domination(&p.h, None, &pot("pow4:5"), DominationMode::Sturm).unwrap();
        assert!(s.passed, "{}", s.detail);
    }

    #[test]
    fn cell24_is_not_sharp() {
        let c = config::cell24();
        let f = pot("pow4:2");
        let cert = build_sharp_certificate(&c, &f).unwrap();
        let e = energy(&c, &f).unwrap().to_f64();
        assert!(cert.bound_f64() <= e + 1e-9);
        let f = pot("pow4:6");
        let cert = build_sharp_certificate(&c, &f).unwrap();
        assert!(cert.bound_f64() < energy(&c, &f).unwrap().to_f64() - 1e-6);
    }

    #[test]
    fn domination_modes() {
        let f = pot("pow4:3");
        let a = f.a_poly().unwrap().convert::<QuadExt>();
        let v = verify_domination(&a, None, &f, DominationMode::Sturm).unwrap();
        assert!(v.passed && v.margin == 0.0);
        let g = verify_domination(&a.to_f64(), None, &f, DominationMode::Grid).unwrap();
        assert!(g.passed && g.margin.abs() < 1e-12);
        let shifted = &a.to_f64() + &Poly::constant(1e-6);
        let g = verify_domination(&shifted, None, &f, DominationMode::Grid).unwrap();
        assert!(!g.passed && (g.margin + 1e-6).abs() < 1e-9);
        let sq = &a + &Poly::constant(QuadExt::from_rational(rat(1, 1_000_000)));
        assert!(!verify_domination(&sq, None, &f, DominationMode::Sturm).unwrap().passed);
        assert!(verify_domination(&a.to_f64(), None, &f, DominationMode::Sturm).is_err());
    }

    #[test]
    fn projective_simplex_and_sphere_reduction() {
        let c = config::cp2_simplex_exact();
        for k in 0..=1u32 {
            let f = Potential::TruncatedPower(k);
            let cert = projective_certificate(&c, &f, false).unwrap();
            let ex = cert.as_exact().unwrap();
            assert!(ex.is_valid());
            let want = QuadExt::from_rational(rat(30, 1)) * f.a_derivs_exact(&QuadExt::from_rational(rat(-3, 5)), 1).unwrap()[0].clone();
            assert_eq!(ex.bound, want);
        }
        // sphere S^2 as the Jacobi kernel (0, 0) reproduces the Gegenbauer bound
        let ico = config::icosahedron();
        let f = pot("inv:1");
        let nodes: Vec<QuadExt> = ico
            .distance_distribution()
            .nonunit_values()
            .iter()
            .map(|v| v.as_exact().unwrap().clone())
            .collect();
        let j = projective_certificate_from_nodes(&Kernel::jacobi(rat(0, 1), rat(0, 1)), 12, &nodes, &f, false).unwrap();
        let g = build_sharp_certificate(&ico, &f).unwrap();
        assert_eq!(&j.bound, &g.as_exact().unwrap().bound);
        let anti = projective_certificate_from_nodes(
            &Kernel::jacobi(rat(1, 1), rat(0, 1)),
            3,
            &[QuadExt::from_rational(rat(-1, 1))],
            &pot("pow4:2"),
            true,
        )
        .unwrap();
        assert!(anti.is_valid() && !anti.strict);
    }
}
