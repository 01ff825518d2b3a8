use std::cmp::Ordering;

use super::Poly;
use crate::error::{Error, Result};
use crate::exactfield::{rat, Scalar};

/// A real root enclosed in [lo, hi] (lo == hi when located exactly).
#[derive(Clone, Debug, PartialEq)]
pub struct RealRoot<S: Scalar> {
    pub lo: S,
    pub hi: S,
    pub approx: f64,
    pub multiplicity: usize,
}

/// All real roots of `p` in [lo, hi], sorted.
///
/// Exact scalars: square-free factorization, Sturm counting and bisection to
/// width `tol`. Floating scalars: roots are bracketed between critical points
/// of `p`; roots closer than 1e-9 are merged into one cluster.
pub fn real_roots<S: Scalar>(p: &Poly<S>, lo: &S, hi: &S, tol: f64) -> Result<Vec<RealRoot<S>>> {
    if p.is_zero() {
        return Err(Error::InvalidInput("real_roots of the zero polynomial".into()));
    }
    if lo.cmp_s(hi) == Ordering::Greater {
        return Err(Error::InvalidInput("empty interval".into()));
    }
    if S::EXACT {
        exact_roots(p, lo, hi, tol)
    } else {
        float_roots_checked(p, lo, hi, tol)
    }
}

fn sign_changes<S: Scalar>(seq: &[Poly<S>], x: &S) -> usize {
    let mut last = 0;
    let mut n = 0;
    for q in seq {
        let s = q.eval(x).sign();
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

fn sturm_sequence<S: Scalar>(f: &Poly<S>) -> Vec<Poly<S>> {
    let mut seq = vec![f.clone(), f.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        // normalize by |lc| to keep the sign pattern while taming growth
        let l = r.leading().abs_s();
        seq.push(-&r.scale(&(S::one() / l)));
    }
    seq
}

fn half<S: Scalar>() -> S {
    S::from_rational(&rat(1, 2))
}

fn exact_roots<S: Scalar>(p: &Poly<S>, lo: &S, hi: &S, tol: f64) -> Result<Vec<RealRoot<S>>> {
    let mut out = Vec::new();
    for (i, f) in p.squarefree_decomposition().iter().enumerate() {
        if f.degree().unwrap_or(0) == 0 {
            continue;
        }
        let mult = i + 1;
        if f.eval(lo).is_zero() {
            out.push(RealRoot { lo: lo.clone(), hi: lo.clone(), approx: lo.to_f64(), multiplicity: mult });
        }
        let seq = sturm_sequence(f);
        let mut stack = vec![(lo.clone(), hi.clone(), sign_changes(&seq, lo), sign_changes(&seq, hi))];
        while let Some((a, b, va, vb)) = stack.pop() {
            let count = va.saturating_sub(vb);
            if count == 0 {
                continue;
            }
            if count == 1 {
                out.push(refine(f, a, b, tol, mult));
                continue;
            }
            let m = (a.clone() + b.clone()) * half::<S>();
            let vm = sign_changes(&seq, &m);
            stack.push((a, m.clone(), va, vm));
            stack.push((m, b, vm, vb));
        }
    }
    out.sort_by(|x, y| x.lo.cmp_s(&y.lo));
    Ok(out)
}

/// Narrows an interval (a, b] holding exactly one simple root of f.
fn refine<S: Scalar>(f: &Poly<S>, mut a: S, mut b: S, tol: f64, mult: usize) -> RealRoot<S> {
    let sb = f.eval(&b).sign();
    if sb == 0 {
        return RealRoot { approx: b.to_f64(), lo: b.clone(), hi: b, multiplicity: mult };
    }
    loop {
        if (b.clone() - a.clone()).to_f64() <= tol {
            break;
        }
        let m = (a.clone() + b.clone()) * half::<S>();
        let sm = f.eval(&m).sign();
        if sm == 0 {
            return RealRoot { approx: m.to_f64(), lo: m.clone(), hi: m, multiplicity: mult };
        }
        if sm != sb {
            a = m;
        } else {
            b = m;
        }
    }
    let approx = ((a.clone() + b.clone()) * half::<S>()).to_f64();
    RealRoot { lo: a, hi: b, approx, multiplicity: mult }
}

fn float_roots_checked<S: Scalar>(p: &Poly<S>, lo: &S, hi: &S, tol: f64) -> Result<Vec<RealRoot<S>>> {
    let (l, h) = (lo.to_f64(), hi.to_f64());
    let floor = 4.0 * f64::EPSILON * l.abs().max(h.abs()).max(1.0);
    if tol < floor {
        return Err(Error::RootIsolation(format!(
            "tolerance {tol:e} unreachable in double precision (floor {floor:e})"
        )));
    }
    let pf = p.to_f64();
    let raw = float_roots(&pf, l, h);
    let mut out: Vec<RealRoot<S>> = Vec::new();
    for (x, m) in raw {
        if let Some(last) = out.last_mut() {
            if x - last.approx < 1e-9 {
                last.multiplicity += m;
                last.hi = S::from_f64(x).unwrap_or_else(S::zero);
                continue;
            }
        }
        let s = S::from_f64(x).unwrap_or_else(S::zero);
        out.push(RealRoot { lo: s.clone(), hi: s, approx: x, multiplicity: m });
    }
    Ok(out)
}

fn eval_scale(p: &Poly<f64>, x: f64) -> f64 {
    let ax = x.abs();
    let mut acc = 0.0;
    for c in p.coeffs().iter().rev() {
        acc = acc * ax + c.abs();
    }
    acc
}

fn near_zero(p: &Poly<f64>, x: f64) -> bool {
    p.eval(&x).abs() <= 64.0 * f64::EPSILON * eval_scale(p, x)
}

/// Roots with multiplicities, unmerged.
fn float_roots(p: &Poly<f64>, lo: f64, hi: f64) -> Vec<(f64, usize)> {
    let Some(d) = p.degree() else { return Vec::new() };
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        let x = -p.coeff(0) / p.coeff(1);
        return if x >= lo && x <= hi { vec![(x, 1)] } else { Vec::new() };
    }
    let crit = float_roots(&p.derivative(), lo, hi);
    let mut out = Vec::new();
    let mut marks: Vec<(f64, bool)> = Vec::new();
    for (c, m) in &crit {
        let is_root = near_zero(p, *c);
        if is_root {
            out.push((*c, m + 1));
        }
        marks.push((*c, is_root));
    }
    let mut pts = vec![(lo, false)];
    pts.extend(marks);
    pts.push((hi, false));
    for (x, flag) in [pts[0], pts[pts.len() - 1]] {
        if !flag && near_zero(p, x) && !crit.iter().any(|(c, _)| (c - x).abs() < 1e-12) {
            out.push((x, 1));
        }
    }
    for w in pts.windows(2) {
        let (a, fa) = w[0];
        let (b, fb) = w[1];
        if fa || fb || b <= a {
            continue;
        }
        let (va, vb) = (p.eval(&a), p.eval(&b));
        if near_zero(p, a) || near_zero(p, b) || va.signum() == vb.signum() {
            continue;
        }
        out.push((bisect(p, a, b, va), 1));
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

fn bisect(p: &Poly<f64>, mut a: f64, mut b: f64, va: f64) -> f64 {
    let sa = va.signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let vm = p.eval(&m);
        if vm == 0.0 {
            return m;
        }
        if vm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{rat_int, Rational};
    use crate::orthopoly::gegenbauer;

    #[test]
    fn quadratic_roots_exact() {
        let p = Poly::new(vec![rat(-1, 3), rat_int(0), rat_int(1)]);
        let r = real_roots(&p, &rat_int(-1), &rat_int(1), 1e-15).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_eq!(r.len(), 2);
        assert!((r[0].approx + s).abs() < 1e-14 && (r[1].approx - s).abs() < 1e-14);
        let g = gegenbauer(&rat(1, 2), 2);
        let r2 = real_roots(&g, &rat_int(-1), &rat_int(1), 1e-15).unwrap();
        assert!((r2[1].approx - s).abs() < 1e-14);
    }

    #[test]
    fn double_root_at_endpoint() {
        let p = Poly::new(vec![rat_int(1), rat_int(2), rat_int(1)]);
        let r = real_roots(&p, &rat_int(-1), &rat_int(1), 1e-12).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert_eq!(r[0].lo, rat_int(-1));
        let pf = p.to_f64();
        let rf = real_roots(&pf, &-1.0, &1.0, 1e-12).unwrap();
        assert_eq!(rf.len(), 1);
        assert_eq!(rf[0].multiplicity, 2);
        assert!((rf[0].approx + 1.0).abs() < 1e-9);
    }

    #[test]
    fn floating_roots_and_tolerance_floor() {
        let p = Poly::<f64>::from_roots(&[-0.5, 0.1, 0.3, 0.3]);
        let r = real_roots(&p, &-1.0, &1.0, 1e-12).unwrap();
        assert_eq!(r.iter().map(|x| x.multiplicity).collect::<Vec<_>>(), vec![1, 1, 2]);
        assert!((r[1].approx - 0.1).abs() < 1e-12);
        assert!(matches!(real_roots(&p, &-1.0, &1.0, 1e-20), Err(Error::RootIsolation(_))));
    }

    #[test]
    fn exact_counts_by_multiplicity() {
        let x = Poly::<Rational>::x();
        let f = &(&x.pow(3) * &Poly::linear_root(&rat(1, 2)).pow(2)) * &Poly::linear_root(&rat(7, 1));
        let r = real_roots(&f, &rat_int(-1), &rat_int(1), 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!((r[0].multiplicity, r[1].multiplicity), (3, 2));
        assert_eq!(r[1].lo, rat(1, 2));
    }
}
