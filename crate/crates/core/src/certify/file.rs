//! Certificate files (TOML) and their independent re-verification.

use serde::{Deserialize, Serialize};

use super::{bound_value, verify_domination, Certificate, CertificateKind, DominationMode};
use crate::error::{Error, Result};
use crate::exactfield::{parse_rational, QuadExt, Scalar};
use crate::interp::NodeSpec;
use crate::orthopoly::{expand, pd_tolerance, Kernel, Poly};
use crate::potential::Potential;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CertificateFile {
    pub kind: String,
    /// "exact" (Q(sqrt5) text form) or "float".
    pub scalar_mode: String,
    /// "gegenbauer" or "jacobi".
    pub kernel: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    pub n_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[serde(default)]
    pub nodes: Vec<String>,
    #[serde(default)]
    pub multiplicities: Vec<usize>,
    /// Coefficients of h in powers of t.
    pub h_power: Vec<String>,
    /// Coefficients of h in the kernel basis.
    pub h_kernel: Vec<String>,
    pub bound: String,
    pub pd_verified: bool,
    pub domination_verified: bool,
    pub strict: bool,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl CertificateFile {
    pub fn from_certificate<S: Scalar>(c: &Certificate<S>) -> Self {
        let (kernel, lambda, alpha, beta) = match &c.kernel {
            Kernel::Gegenbauer { lambda } => ("gegenbauer", Some(lambda.to_string()), None, None),
            Kernel::Jacobi { alpha, beta } => ("jacobi", None, Some(alpha.to_string()), Some(beta.to_string())),
        };
        let (nodes, multiplicities) = match &c.nodes {
            Some(n) => (n.nodes.iter().map(|t| t.render()).collect(), n.multiplicities.clone()),
            None => (Vec::new(), Vec::new()),
        };
        CertificateFile {
            kind: c.kind.as_str().into(),
            scalar_mode: if S::EXACT { "exact" } else { "float" }.into(),
            kernel: kernel.into(),
            lambda,
            alpha,
            beta,
            n_points: c.n_points,
            potential: c.potential.as_ref().map(|f| f.to_string()),
            nodes,
            multiplicities,
            h_power: c.h.coeffs().iter().map(|x| x.render()).collect(),
            h_kernel: c.expansion.coeffs.iter().map(|x| x.render()).collect(),
            bound: c.bound.render(),
            pd_verified: c.pd_verified,
            domination_verified: c.domination_verified,
            strict: c.strict,
            notes: c.notes.clone(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn render(&self) -> String {
        toml::to_string(self).expect("serializable")
    }

    pub fn kernel(&self) -> Result<Kernel> {
        let need = |x: &Option<String>, name: &str| -> Result<_> {
            parse_rational(x.as_deref().ok_or_else(|| Error::Parse(format!("missing {name}")))?)
        };
        match self.kernel.as_str() {
            "gegenbauer" => Ok(Kernel::Gegenbauer { lambda: need(&self.lambda, "lambda")? }),
            "jacobi" => Ok(Kernel::jacobi(need(&self.alpha, "alpha")?, need(&self.beta, "beta")?)),
            k => Err(Error::Parse(format!("unknown kernel '{k}'"))),
        }
    }

    pub fn verify(&self) -> Result<Verdict> {
        match self.scalar_mode.as_str() {
            "exact" => verify_typed::<QuadExt>(self),
            "float" => verify_typed::<f64>(self),
            m => Err(Error::Parse(format!("unknown scalar_mode '{m}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerdictLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Every re-checked claim of a certificate file.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub lines: Vec<VerdictLine>,
    pub passed: bool,
}

impl Verdict {
    pub fn report(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            s.push_str(&format!("[{}] {}: {}\n", if l.passed { "pass" } else { "FAIL" }, l.name, l.detail));
        }
        s.push_str(&format!("verdict = {}\n", if self.passed { "pass" } else { "FAIL" }));
        s
    }
}

fn close<S: Scalar>(a: &S, b: &S, rel: f64) -> bool {
    if S::EXACT {
        a == b
    } else {
        (a.to_f64() - b.to_f64()).abs() <= rel * a.to_f64().abs().max(b.to_f64().abs()).max(1.0)
    }
}

fn parse_all<S: Scalar>(v: &[String]) -> Result<Vec<S>> {
    v.iter().map(|s| S::parse_text(s)).collect()
}

fn verify_typed<S: Scalar>(file: &CertificateFile) -> Result<Verdict> {
    let kind = CertificateKind::parse(&file.kind)?;
    let kernel = file.kernel()?;
    let h = Poly::new(parse_all::<S>(&file.h_power)?);
    let claimed: Vec<S> = parse_all(&file.h_kernel)?;
    let bound: S = S::parse_text(&file.bound)?;
    let mut lines = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        lines.push(VerdictLine { name: name.into(), passed, detail });
    };

    let e = expand(&h, &kernel);
    let mut coeffs = e.coeffs.clone();
    coeffs.resize(claimed.len().max(coeffs.len()), S::zero());
    let mut claimed_padded = claimed.clone();
    claimed_padded.resize(coeffs.len(), S::zero());
    let scale = coeffs.iter().map(|c| c.to_f64().abs()).fold(1.0, f64::max);
    let same = coeffs
        .iter()
        .zip(&claimed_padded)
        .all(|(a, b)| if S::EXACT { a == b } else { (a.to_f64() - b.to_f64()).abs() <= 1e-9 * scale });
    push("kernel expansion", same, format!("{} coefficients recomputed from h", coeffs.len()));

    let recomputed = bound_value(&e, file.n_points);
    let ok = close(&recomputed, &bound, 1e-12);
    push("bound", ok, format!("N^2 alpha_0 - N h(1) = {} (claimed {})", recomputed.render(), bound.render()));

    if file.pd_verified {
        let tol = pd_tolerance(&e.coeffs);
        let neg: Vec<usize> = e
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| if S::EXACT { c.sign() < 0 } else { c.to_f64() < -tol })
            .map(|(i, _)| i)
            .collect();
        push(
            "positive definite",
            neg.is_empty(),
            if neg.is_empty() { "all kernel coefficients nonnegative".into() } else { format!("negative at {neg:?}") },
        );
    }

    if file.domination_verified {
        let f = Potential::parse(
            file.potential.as_deref().ok_or_else(|| Error::Parse("domination claimed without a potential".into()))?,
        )?;
        let spec = if file.nodes.is_empty() {
            None
        } else {
            Some(NodeSpec::new(parse_all::<S>(&file.nodes)?, file.multiplicities.clone())?)
        };
        let primary = if S::EXACT && f.a_poly().is_some() {
            Some(DominationMode::Sturm)
        } else if spec.is_some() && kind != CertificateKind::Cell600 && kind != CertificateKind::LpNumeric {
            Some(DominationMode::Structural)
        } else {
            None
        };
        if let Some(mode) = primary {
            let v = verify_domination(&h, spec.as_ref(), &f, mode)?;
            push(&format!("domination ({mode})"), v.passed, v.detail);
        }
        let g = verify_domination(&h, None, &f, DominationMode::Grid)?;
        push("domination (grid)", g.passed, g.detail);
        if kind == CertificateKind::LpNumeric && !f.finite_at_zero() {
            let tmax = 1.0 - 1e-6;
            let hf = h.to_f64();
            let top = hf.eval(&1.0).max(hf.eval(&tmax));
            push("near t = 1", top <= f.a(tmax), format!("max h on [t_max, 1] ~ {top:.6}, a(t_max) = {:.6}", f.a(tmax)));
        }
    }
    let passed = lines.iter().all(|l| l.passed);
    Ok(Verdict { lines, passed })
}

/// Parses and verifies a certificate document.
pub fn verify_certificate_text(text: &str) -> Result<Verdict> {
    CertificateFile::parse(text)?.verify()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{build_600cell_certificate, build_sharp_certificate};
    use crate::config;

    #[test]
    fn round_trip_exact_and_float() {
        let certs = vec![
            build_sharp_certificate(&config::icosahedron(), &Potential::parse("inv:1").unwrap()).unwrap(),
            build_sharp_certificate(&config::icosahedron(), &Potential::parse("exp:1").unwrap()).unwrap(),
            build_sharp_certificate(&config::ngon(7).unwrap(), &Potential::parse("inv:2").unwrap()).unwrap(),
        ];
        for c in certs {
            let file = c.to_file();
            let text = file.render();
            let back = CertificateFile::parse(&text).unwrap();
            assert_eq!(back, file);
            assert_eq!(back.bound, file.bound);
            let v = back.verify().unwrap();
            assert!(v.passed, "{}", v.report());
        }
        let c = build_600cell_certificate(6).unwrap();
        let v = verify_certificate_text(&CertificateFile::from_certificate(&c).render()).unwrap();
        assert!(v.passed, "{}", v.report());
    }

    #[test]
    fn tampering_is_detected() {
        let c = build_sharp_certificate(&config::icosahedron(), &Potential::parse("inv:1").unwrap()).unwrap();
        let mut f = c.to_file();
        f.bound = "100".into();
        assert!(!f.verify().unwrap().passed);
        let mut f = c.to_file();
        let x = QuadExt::parse(&f.h_power[0]).unwrap() + QuadExt::from_ints(1, 1000, 0, 1);
        f.h_power[0] = x.render();
        let v = f.verify().unwrap();
        assert!(!v.passed);
    }
}
