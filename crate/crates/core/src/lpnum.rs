//! Numerical linear-programming bounds: optimize h over a discretized
//! constraint h(t_j) <= a(t_j), then post-certify between grid points.

use crate::certify::{Certificate, CertificateKind};
use crate::config::{energy, Geometry, PointConfiguration};
use crate::error::{Error, Result};
use crate::interp::NodeSpec;
use crate::orthopoly::{Kernel, Poly, UltraExpansion};
use crate::potential::Potential;

pub const DEFAULT_T_MAX: f64 = 1.0 - 1e-6;

/// Dense two-phase simplex for max c.x subject to A x <= b, x >= 0.
pub mod simplex {
    use crate::error::{Error, Result};

    const EPS: f64 = 1e-11;

    #[derive(Clone, Debug)]
    pub struct Solution {
        pub x: Vec<f64>,
        pub objective: f64,
        pub iterations: usize,
    }

    struct Tableau {
        rows: Vec<Vec<f64>>,
        rhs: Vec<f64>,
        basis: Vec<usize>,
        ncols: usize,
    }

    impl Tableau {
        fn pivot(&mut self, r: usize, c: usize) {
            let p = self.rows[r][c];
            for v in self.rows[r].iter_mut() {
                *v /= p;
            }
            self.rhs[r] /= p;
            let prow = self.rows[r].clone();
            let prhs = self.rhs[r];
            for i in 0..self.rows.len() {
                if i == r {
                    continue;
                }
                let f = self.rows[i][c];
                if f != 0.0 {
                    for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                        *v -= f * pv;
                    }
                    self.rhs[i] -= f * prhs;
                }
            }
            self.basis[r] = c;
        }

        /// Maximizes obj.x over the current basis; columns in `banned` never enter.
        fn optimize(&mut self, obj: &[f64], banned: &[bool], max_iter: usize, iters: &mut usize) -> Result<()> {
            let mut degenerate_run = 0usize;
            loop {
                if *iters >= max_iter {
                    return Err(Error::NonConvergence(format!("simplex exceeded {max_iter} pivots")));
                }
                // reduced costs
                let mut best: Option<(usize, f64)> = None;
                let bland = degenerate_run > 50;
                for j in 0..self.ncols {
                    if banned[j] || self.basis.contains(&j) {
                        continue;
                    }
                    let mut rc = obj[j];
                    for (i, &b) in self.basis.iter().enumerate() {
                        rc -= obj[b] * self.rows[i][j];
                    }
                    if rc > EPS {
                        if bland {
                            best = Some((j, rc));
                            break;
                        }
                        if best.map_or(true, |(_, v)| rc > v) {
                            best = Some((j, rc));
                        }
                    }
                }
                let Some((c, _)) = best else { return Ok(()) };
                let mut leave: Option<(usize, f64)> = None;
                for i in 0..self.rows.len() {
                    let a = self.rows[i][c];
                    if a > EPS {
                        let ratio = self.rhs[i] / a;
                        let better = match leave {
                            None => true,
                            Some((li, lr)) => {
                                ratio < lr - EPS || (ratio <= lr + EPS && self.basis[i] < self.basis[li])
                            }
                        };
                        if better {
                            leave = Some((i, ratio));
                        }
                    }
                }
                let Some((r, ratio)) = leave else { return Err(Error::Unbounded) };
                degenerate_run = if ratio.abs() <= EPS { degenerate_run + 1 } else { 0 };
                self.pivot(r, c);
                *iters += 1;
            }
        }
    }

    pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<Solution> {
        let n = c.len();
        let m = a.len();
        if a.iter().any(|r| r.len() != n) || b.len() != m {
            return Err(Error::InvalidInput("LP dimensions disagree".into()));
        }
        // columns: x (n), slacks (m), artificials (one per negative rhs)
        let neg: Vec<usize> = (0..m).filter(|&i| b[i] < 0.0).collect();
        let ncols = n + m + neg.len();
        let mut rows = vec![vec![0.0; ncols]; m];
        let mut rhs = vec![0.0; m];
        let mut basis = vec![0; m];
        let mut art = 0;
        for i in 0..m {
            let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                rows[i][j] = s * a[i][j];
            }
            rows[i][n + i] = s;
            rhs[i] = s * b[i];
            if b[i] < 0.0 {
                rows[i][n + m + art] = 1.0;
                basis[i] = n + m + art;
                art += 1;
            } else {
                basis[i] = n + i;
            }
        }
        let mut t = Tableau { rows, rhs, basis, ncols };
        let max_iter = 50 * (m + n + 10);
        let mut iters = 0;
        if !neg.is_empty() {
            let mut obj = vec![0.0; ncols];
            for k in 0..neg.len() {
                obj[n + m + k] = -1.0;
            }
            t.optimize(&obj, &vec![false; ncols], max_iter, &mut iters)?;
            let infeas: f64 = t.basis.iter().zip(&t.rhs).filter(|(b, _)| **b >= n + m).map(|(_, r)| *r).sum();
            if infeas > 1e-9 * (1.0 + b.iter().map(|x| x.abs()).fold(0.0, f64::max)) {
                return Err(Error::Infeasible);
            }
            // drive remaining (zero-level) artificials out of the basis
            for i in 0..m {
                if t.basis[i] >= n + m {
                    if let Some(j) = (0..n + m).find(|&j| t.rows[i][j].abs() > 1e-9 && !t.basis.contains(&j)) {
                        t.pivot(i, j);
                    }
                }
            }
        }
        let mut obj = vec![0.0; ncols];
        obj[..n].copy_from_slice(c);
        let mut banned = vec![false; ncols];
        for flag in banned.iter_mut().skip(n + m) {
            *flag = true;
        }
        t.optimize(&obj, &banned, max_iter, &mut iters)?;
        let mut x = vec![0.0; n];
        for (i, &bcol) in t.basis.iter().enumerate() {
            if bcol < n {
                x[bcol] = t.rhs[i].max(0.0);
            }
        }
        let objective = c.iter().zip(&x).map(|(a, b)| a * b).sum();
        Ok(Solution { x, objective, iterations: iters })
    }
}

/// The discretized LP for N points with kernel polynomials up to `degree`.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub kernel: Kernel,
    pub n_points: usize,
    pub f: Potential,
    pub degree: usize,
    pub grid: Vec<f64>,
    pub t_max: f64,
}

impl LpProblem {
    /// Uniform grid of `grid_size` points on [-1, t_max] for S^{n-1}.
    pub fn sphere(n: usize, n_points: usize, f: Potential, degree: usize, grid_size: usize) -> Result<Self> {
        Self::new(Kernel::sphere(n), n_points, f, degree, uniform_grid(grid_size, DEFAULT_T_MAX), DEFAULT_T_MAX)
    }

    pub fn new(kernel: Kernel, n_points: usize, f: Potential, degree: usize, mut grid: Vec<f64>, t_max: f64) -> Result<Self> {
        if !(t_max < 1.0 && t_max > -1.0) {
            return Err(Error::InvalidInput("t_max must lie in (-1, 1)".into()));
        }
        if grid.is_empty() {
            return Err(Error::InvalidInput("empty constraint grid".into()));
        }
        if grid.iter().any(|t| !(-1.0..=t_max).contains(t)) {
            return Err(Error::InvalidInput("grid points must lie in [-1, t_max]".into()));
        }
        if n_points < 2 {
            return Err(Error::InvalidInput("N must be at least 2".into()));
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        Ok(LpProblem { kernel, n_points, f, degree, grid, t_max })
    }

    /// Adds extra constraint points (clipped to [-1, t_max]).
    pub fn with_points(mut self, pts: &[f64]) -> Self {
        self.grid.extend(pts.iter().copied().filter(|t| (-1.0..=self.t_max).contains(t)));
        self.grid.sort_by(f64::total_cmp);
        self.grid.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        self
    }
}

pub fn uniform_grid(size: usize, t_max: f64) -> Vec<f64> {
    if size <= 1 {
        return vec![-1.0];
    }
    (0..size).map(|j| -1.0 + (t_max + 1.0) * j as f64 / (size - 1) as f64).collect()
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub expansion: UltraExpansion<f64>,
    pub h: Poly<f64>,
    /// N^2 alpha_0 - N h(1) for the LP optimum.
    pub raw_bound: f64,
    /// Bound after lowering alpha_0 by delta.
    pub certified_bound: f64,
    /// Largest violation of h <= a found between grid points.
    pub violation: f64,
    pub delta: f64,
    /// h(1) <= a(t_max), covering (t_max, 1).
    pub tail_ok: bool,
    pub iterations: usize,
}

impl LpSolution {
    /// Certified h (alpha_0 lowered by delta).
    pub fn certified_h(&self) -> Poly<f64> {
        &self.h - &Poly::constant(self.delta)
    }

    pub fn to_certificate(&self, p: &LpProblem) -> Certificate<f64> {
        let mut c = Certificate::from_poly(CertificateKind::LpNumeric, p.kernel.clone(), p.n_points, self.certified_h());
        c.potential = Some(p.f.clone());
        c.pd_verified = c.expansion.is_positive_definite();
        c.domination_verified = self.tail_ok;
        c.nodes = None::<NodeSpec<f64>>;
        c.notes.push(format!("raw bound {} lowered by delta = {:e}", self.raw_bound, self.delta));
        c
    }
}

fn min_gap(h: &Poly<f64>, f: &Potential, lo: f64, hi: f64, samples: usize) -> f64 {
    let gap = |t: f64| f.a(t) - h.eval(&t);
    let step = (hi - lo) / samples as f64;
    let ts: Vec<f64> = (0..=samples).map(|j| lo + step * j as f64).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| gap(t)).collect();
    let mut best = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    for j in 0..vals.len() {
        let l = if j > 0 { vals[j - 1] } else { f64::INFINITY };
        let r = if j + 1 < vals.len() { vals[j + 1] } else { f64::INFINITY };
        if vals[j] <= l && vals[j] <= r {
            let (mut a, mut b) = ((ts[j] - step).max(lo), (ts[j] + step).min(hi));
            for _ in 0..80 {
                let x1 = b - gr * (b - a);
                let x2 = a + gr * (b - a);
                if gap(x1) < gap(x2) {
                    b = x2;
                } else {
                    a = x1;
                }
            }
            best = best.min(gap(0.5 * (a + b))).min(gap(a)).min(gap(b));
        }
    }
    best
}

/// Solves the discretized LP and post-certifies the result.
pub fn solve(p: &LpProblem) -> Result<LpSolution> {
    let basis = p.kernel.basis_in::<f64>(p.degree);
    let n = p.n_points as f64;
    let avals: Vec<f64> = p.grid.iter().map(|&t| p.f.a(t)).collect();
    if avals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Potential(format!("{} is not finite on the grid", p.f)));
    }
    let ones: Vec<f64> = basis.iter().map(|b| b.eval(&1.0)).collect();
    // variables alpha_i; objective N^2 alpha_0 - N sum alpha_i C_i(1)
    let mut c: Vec<f64> = ones.iter().map(|v| -n * v).collect();
    c[0] += n * n;
    // scale rows so that comparisons are relative
    let mut a = Vec::with_capacity(p.grid.len());
    let mut b = Vec::with_capacity(p.grid.len());
    for (t, av) in p.grid.iter().zip(&avals) {
        let row: Vec<f64> = basis.iter().map(|q| q.eval(t)).collect();
        let s = row.iter().map(|x| x.abs()).fold(av.abs(), f64::max).max(1e-300);
        a.push(row.iter().map(|x| x / s).collect());
        b.push(av / s);
    }
    let sol = simplex::maximize(&c, &a, &b)?;
    let expansion = UltraExpansion { kernel: p.kernel.clone(), coeffs: sol.x.clone() };
    let h = expansion.reconstruct();
    let raw_bound = n * n * sol.x[0] - n * ones.iter().zip(&sol.x).map(|(o, x)| o * x).sum::<f64>();
    let lo = p.grid[0].min(-1.0);
    let samples = (20 * p.grid.len()).max(4000);
    let m = min_gap(&h, &p.f, lo, p.t_max, samples);
    let violation = (-m).max(0.0);
    let scale = avals.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let delta = if violation > 0.0 { violation + 4.0 * f64::EPSILON * scale } else { 0.0 };
    let certified_bound = raw_bound - delta * (n * n - n);
    let hc = &h - &Poly::constant(delta);
    let top = hc.eval(&1.0).max(hc.eval(&p.t_max));
    let tail_ok = top <= p.f.a(p.t_max);
    if sol.x[0] < delta {
        return Err(Error::InvalidCertificate(format!(
            "alpha_0 = {} cannot absorb the violation {delta:e}",
            sol.x[0]
        )));
    }
    Ok(LpSolution { expansion, h, raw_bound, certified_bound, violation, delta, tail_ok, iterations: sol.iterations })
}

#[derive(Clone, Debug)]
pub struct GapReport {
    pub certified_bound: f64,
    pub energy: f64,
    pub relative_gap: f64,
    pub solution: LpSolution,
}

/// Compares the certified LP bound with the energy of a configuration.
/// The configuration's inner products are added to the constraint grid.
pub fn evaluate_gap(p: &LpProblem, c: &PointConfiguration) -> Result<GapReport> {
    if c.len() != p.n_points {
        return Err(Error::InvalidInput(format!("configuration has {} points, problem expects {}", c.len(), p.n_points)));
    }
    if let Geometry::Sphere { .. } = c.geometry {
        if c.geometry.kernel() != p.kernel {
            return Err(Error::InvalidInput("configuration dimension does not match the kernel".into()));
        }
    } else {
        return Err(Error::InvalidInput("evaluate_gap needs a sphere configuration".into()));
    }
    let ts: Vec<f64> = c.distance_distribution().nonunit_values().iter().map(|v| v.to_f64()).collect();
    let q = p.clone().with_points(&ts);
    let solution = solve(&q)?;
    let e = energy(c, &p.f)?.to_f64();
    Ok(GapReport {
        certified_bound: solution.certified_bound,
        energy: e,
        relative_gap: (e - solution.certified_bound) / if e == 0.0 { 1.0 } else { e.abs() },
        solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{build_sharp_certificate, lp_bound, verify_domination, DominationMode};
    use crate::config;
    use proptest::prelude::*;

    fn pot(s: &str) -> Potential {
        Potential::parse(s).unwrap()
    }

    #[test]
    fn simplex_small_problems() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3
        let s = simplex::maximize(&[3.0, 2.0], &[vec![1.0, 1.0], vec![1.0, 3.0], vec![1.0, 0.0]], &[4.0, 6.0, 3.0]).unwrap();
        assert!((s.objective - 11.0).abs() < 1e-12);
        // negative rhs needs phase one: x >= 1 written as -x <= -1
        let s = simplex::maximize(&[-1.0], &[vec![-1.0]], &[-1.0]).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-12);
        assert!(matches!(simplex::maximize(&[1.0], &[vec![-1.0]], &[1.0]), Err(Error::Unbounded)));
        assert!(matches!(simplex::maximize(&[1.0], &[vec![1.0], vec![-1.0]], &[1.0, -2.0]), Err(Error::Infeasible)));
    }

    #[test]
    fn twenty_points_coulomb() {
        let p = LpProblem::sphere(3, 20, pot("inv:0.5"), 6, 200).unwrap();
        let s = solve(&p).unwrap();
        assert!(s.certified_bound >= 301.0 && s.certified_bound <= 301.763, "{}", s.certified_bound);
        assert!(s.tail_ok);
        let cert = s.to_certificate(&p);
        assert!(lp_bound(&cert.expansion, 20).is_ok());
        let g = verify_domination(&cert.h, None, &p.f, DominationMode::Grid).unwrap();
        assert!(g.passed, "{}", g.detail);
    }

    #[test]
    fn constant_certificates() {
        let f = pot("inv:1");
        let p = LpProblem::sphere(3, 10, f.clone(), 0, 100).unwrap();
        let s = solve(&p).unwrap();
        assert!((s.certified_bound - 90.0 * f.value(4.0)).abs() < 1e-9);
        let p = LpProblem::sphere(4, 7, pot("pow4:0"), 3, 50).unwrap();
        assert!((solve(&p).unwrap().certified_bound - 42.0).abs() < 1e-9);
    }

    #[test]
    fn gaps() {
        let p = LpProblem::sphere(3, 12, pot("inv:1"), 5, 600).unwrap();
        let g = evaluate_gap(&p, &config::icosahedron()).unwrap();
        assert!(g.relative_gap <= 1e-6 && g.relative_gap >= -1e-12, "{}", g.relative_gap);
        let sharp = build_sharp_certificate(&config::icosahedron(), &pot("inv:1")).unwrap().bound_f64();
        assert!((g.certified_bound - sharp).abs() <= 1e-6 * sharp);
        let two = config::simplex(3, 2).unwrap();
        for f in ["inv:1", "exp:2", "pow4:3"] {
            let p = LpProblem::sphere(3, 2, pot(f), 1, 50).unwrap();
            let g = evaluate_gap(&p, &two).unwrap();
            assert!(g.relative_gap.abs() < 1e-9, "{f}: {}", g.relative_gap);
        }
    }

    #[test]
    fn monotone_in_degree() {
        let (mut last_raw, mut last_cert) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for d in 0..=8 {
            let p = LpProblem::sphere(3, 20, pot("inv:0.5"), d, 150).unwrap();
            let s = solve(&p).unwrap();
            assert!(s.raw_bound >= last_raw - 1e-12 * s.raw_bound.abs(), "d={d}");
            assert!(s.certified_bound >= last_cert - 1e-12 * s.raw_bound.abs(), "d={d} {} {last_cert}", s.certified_bound);
            last_raw = s.raw_bound;
            last_cert = s.certified_bound;
        }
    }

    #[test]
    fn denser_nested_grid_lowers_raw_and_keeps_certificate() {
        let coarse = LpProblem::sphere(3, 20, pot("inv:0.5"), 6, 101).unwrap();
        let fine = LpProblem::sphere(3, 20, pot("inv:0.5"), 6, 401).unwrap();
        let (a, b) = (solve(&coarse).unwrap(), solve(&fine).unwrap());
        assert!(b.raw_bound <= a.raw_bound + 1e-9);
        assert!(b.certified_bound >= a.certified_bound - 1e-9);
    }

    fn random_config(seed: u64, n: usize, npts: usize) -> PointConfiguration {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..npts)
            .map(|_| {
                let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.into_iter().map(|x| x / s).collect()
            })
            .collect();
        PointConfiguration::float(Geometry::Sphere { n }, pts, None).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn weak_duality(seed in 0u64..10_000, n in 2usize..6, npts in 2usize..16, d in 1usize..7, which in 0usize..4) {
            let f = pot(["inv:1", "exp:1", "pow4:4", "inv:2"][which]);
            let p = LpProblem::sphere(n, npts, f.clone(), d, 120).unwrap();
            let s = solve(&p).unwrap();
            let c = random_config(seed, n, npts);
            let e = energy(&c, &f).unwrap().to_f64();
            prop_assert!(s.certified_bound <= e * (1.0 + 1e-9), "{} > {}", s.certified_bound, e);
        }
    }
}
