//! Projected gradient descent for pair energies on (S^{n-1})^N, plus
//! candidate comparison and basin bookkeeping.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{energy, Geometry, PointConfiguration};
use crate::error::{Error, Result};
use crate::potential::Potential;

/// Distinct local minima are told apart by their sorted r-multisets at this tolerance.
pub const DEDUP_TOL: f64 = 1e-5;

#[derive(Clone, Debug)]
pub struct DescentRun {
    pub seed: u64,
    pub start: PointConfiguration,
    pub f: Potential,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub initial_step: f64,
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl DescentRun {
    pub fn new(start: PointConfiguration, f: Potential) -> Self {
        DescentRun { seed: 0, start, f, armijo: 1e-4, initial_step: 1e-2, grad_tol: 1e-10, max_iter: 20_000 }
    }

    /// Seeded uniform random start on S^{n-1}.
    pub fn random(n: usize, n_points: usize, f: Potential, seed: u64) -> Result<Self> {
        let mut r = DescentRun::new(random_start(n, n_points, seed)?, f);
        r.seed = seed;
        Ok(r)
    }
}

/// N points from normalized Gaussian vectors.
pub fn random_start(n: usize, n_points: usize, seed: u64) -> Result<PointConfiguration> {
    if n < 2 || n_points < 2 {
        return Err(Error::InvalidInput("need n >= 2 and N >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(n_points);
    while pts.len() < n_points {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s > 1e-12 {
            pts.push(v.into_iter().map(|x| x / s).collect());
        }
    }
    PointConfiguration::float(Geometry::Sphere { n }, pts, Some("random"))
}

#[derive(Clone, Debug)]
pub struct DescentResult {
    pub config: PointConfiguration,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn pair_r(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Sum over ordered pairs of f(|x_i - x_j|^2).
pub fn energy_of(pts: &[Vec<f64>], f: &Potential) -> f64 {
    let mut e = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            e += f.value(pair_r(&pts[i], &pts[j]));
        }
    }
    2.0 * e
}

/// Euclidean gradient of `energy_of` with respect to every coordinate.
pub fn gradient(pts: &[Vec<f64>], f: &Potential) -> Vec<Vec<f64>> {
    let n = pts.first().map_or(0, |p| p.len());
    let mut g = vec![vec![0.0; n]; pts.len()];
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = f.f_derivs(pair_r(&pts[i], &pts[j]), 2)[1];
            for k in 0..n {
                let c = 4.0 * d * (pts[i][k] - pts[j][k]);
                g[i][k] += c;
                g[j][k] -= c;
            }
        }
    }
    g
}

fn project(pts: &[Vec<f64>], g: &mut [Vec<f64>]) {
    for (x, gi) in pts.iter().zip(g.iter_mut()) {
        let dot: f64 = x.iter().zip(gi.iter()).map(|(a, b)| a * b).sum();
        for (gk, xk) in gi.iter_mut().zip(x) {
            *gk -= dot * xk;
        }
    }
}

fn norm2(g: &[Vec<f64>]) -> f64 {
    g.iter().flatten().map(|x| x * x).sum()
}

fn step(pts: &[Vec<f64>], g: &[Vec<f64>], s: f64) -> Vec<Vec<f64>> {
    pts.iter()
        .zip(g)
        .map(|(x, gi)| {
            let y: Vec<f64> = x.iter().zip(gi).map(|(a, b)| a - s * b).collect();
            let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            y.into_iter().map(|v| v / n).collect()
        })
        .collect()
}

pub fn minimize(run: &DescentRun) -> Result<DescentResult> {
    let Geometry::Sphere { n } = run.start.geometry else {
        return Err(Error::InvalidInput("descent runs on spheres only".into()));
    };
    if run.start.len() < 2 {
        return Err(Error::InvalidInput("need at least two points".into()));
    }
    let mut pts = run.start.float_coords().expect("float coordinates");
    let mut e = energy_of(&pts, &run.f);
    if !e.is_finite() {
        return Err(Error::Potential(format!(
            "{} is singular at the starting configuration (coincident points?); use a spread-out start",
            run.f
        )));
    }
    let mut s = run.initial_step;
    let mut iterations = 0;
    let mut converged = false;
    let mut g = gradient(&pts, &run.f);
    project(&pts, &mut g);
    let mut gn = norm2(&g);
    let mut stalled = 0;
    let mut prev: Option<(Vec<Vec<f64>>, Vec<Vec<f64>>)> = None;
    while iterations < run.max_iter {
        if gn.sqrt() <= run.grad_tol * e.abs().max(1.0) {
            converged = true;
            break;
        }
        // Barzilai-Borwein trial step, then Armijo backtracking
        s = match &prev {
            Some((px, pg)) => {
                let (mut ss, mut sy) = (0.0, 0.0);
                for i in 0..pts.len() {
                    for k in 0..n {
                        let dx = pts[i][k] - px[i][k];
                        ss += dx * dx;
                        sy += dx * (g[i][k] - pg[i][k]);
                    }
                }
                if sy > 0.0 { (ss / sy).min(1e3 * s.max(1e-12)) } else { 2.0 * s }
            }
            None => s,
        };
        let mut accepted = false;
        for _ in 0..60 {
            let trial = step(&pts, &g, s);
            let et = energy_of(&trial, &run.f);
            if et.is_finite() && et <= e - run.armijo * s * gn {
                stalled = if e - et <= 1e-15 * e.abs() { stalled + 1 } else { 0 };
                prev = Some((std::mem::replace(&mut pts, trial), g.clone()));
                e = et;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        iterations += 1;
        if !accepted {
            // no representable decrease left
            converged = gn.sqrt() <= 1e-6 * e.abs().max(1.0);
            break;
        }
        g = gradient(&pts, &run.f);
        project(&pts, &mut g);
        gn = norm2(&g);
        if stalled >= 50 {
            converged = gn.sqrt() <= 1e-6 * e.abs().max(1.0);
            break;
        }
    }
    let config = PointConfiguration::float(Geometry::Sphere { n }, pts, Some("descent"))?;
    let energy = energy(&config, &run.f)?.to_f64();
    Ok(DescentResult { config, energy, grad_norm: gn.sqrt(), iterations, converged })
}

/// Sorted squared distances over unordered pairs.
pub fn distance_signature(c: &PointConfiguration) -> Vec<f64> {
    let mut v = Vec::new();
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            v.push(c.pair_r_f64(i, j));
        }
    }
    v.sort_by(f64::total_cmp);
    v
}

fn same_signature(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Assigns class ids by distance signature; returns one id per input.
pub fn classify(configs: &[&PointConfiguration], tol: f64) -> Vec<usize> {
    let mut reps: Vec<Vec<f64>> = Vec::new();
    configs
        .iter()
        .map(|c| {
            let sig = distance_signature(c);
            match reps.iter().position(|r| same_signature(r, &sig, tol)) {
                Some(k) => k,
                None => {
                    reps.push(sig);
                    reps.len() - 1
                }
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct RunLog {
    pub seed: u64,
    pub energy: f64,
    pub iterations: usize,
    pub class: usize,
}

/// Independent seeded runs; basins are numbered in order of first appearance.
pub fn run_batch(n: usize, n_points: usize, f: &Potential, seeds: impl IntoIterator<Item = u64>) -> Result<Vec<RunLog>> {
    let mut results = Vec::new();
    for seed in seeds {
        let r = minimize(&DescentRun::random(n, n_points, f.clone(), seed)?)?;
        results.push((seed, r));
    }
    let cfgs: Vec<&PointConfiguration> = results.iter().map(|(_, r)| &r.config).collect();
    let classes = classify(&cfgs, DEDUP_TOL);
    Ok(results
        .iter()
        .zip(classes)
        .map(|((seed, r), class)| RunLog { seed: *seed, energy: r.energy, iterations: r.iterations, class })
        .collect())
}

pub fn render_run_log(logs: &[RunLog]) -> String {
    let mut s = String::from("seed\tenergy\titerations\tclass\n");
    for l in logs {
        s.push_str(&format!("{}\t{:.9}\t{}\t{}\n", l.seed, l.energy, l.iterations, l.class));
    }
    s
}

#[derive(Clone, Debug)]
pub struct Ranking {
    pub energies: Vec<f64>,
    /// Candidate indices sorted by energy.
    pub order: Vec<usize>,
    pub argmin: usize,
    /// True if the two lowest energies agree to 1e-9 relative.
    pub tie: bool,
}

pub fn compare_candidates(candidates: &[PointConfiguration], f: &Potential) -> Result<Ranking> {
    let first = candidates.first().ok_or_else(|| Error::InvalidInput("no candidates".into()))?;
    for c in candidates {
        if c.len() != first.len() || c.geometry != first.geometry {
            return Err(Error::InvalidInput(format!(
                "candidates differ in size or space: {} vs {}",
                first.label(),
                c.label()
            )));
        }
    }
    let energies = candidates.iter().map(|c| energy(c, f).map(|e| e.to_f64())).collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..energies.len()).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
    let tie = order.len() > 1 && {
        let (a, b) = (energies[order[0]], energies[order[1]]);
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300)
    };
    Ok(Ranking { argmin: order[0], energies, order, tie })
}

/// North pole plus a square at height z.
pub fn square_pyramid(z: f64) -> Result<PointConfiguration> {
    if !(-1.0..1.0).contains(&z) {
        return Err(Error::InvalidInput("square height must lie in [-1, 1)".into()));
    }
    let rho = (1.0 - z * z).sqrt();
    let mut pts = vec![vec![0.0, 0.0, 1.0]];
    for (x, y) in [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)] {
        pts.push(vec![rho * x, rho * y, z]);
    }
    PointConfiguration::float(Geometry::Sphere { n: 3 }, pts, Some("square_pyramid"))
}

/// Minimizes energy over the square height z in [-1, 0] (the opposite hemisphere).
pub fn optimize_square_pyramid(f: &Potential) -> Result<(f64, f64, PointConfiguration)> {
    let e = |z: f64| -> f64 { square_pyramid(z).ok().and_then(|c| energy(&c, f).ok()).map_or(f64::INFINITY, |v| v.to_f64()) };
    let n = 2000;
    let (lo, hi) = (-1.0 + 1e-9, 0.0);
    let zs: Vec<f64> = (0..=n).map(|j| lo + (hi - lo) * j as f64 / n as f64).collect();
    let j = (0..zs.len()).min_by(|&a, &b| e(zs[a]).total_cmp(&e(zs[b]))).expect("nonempty grid");
    let (mut a, mut b) = (zs[j.saturating_sub(1)], zs[(j + 1).min(n)]);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let x1 = b - gr * (b - a);
        let x2 = a + gr * (b - a);
        if e(x1) < e(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let z = 0.5 * (a + b);
    let c = square_pyramid(z)?;
    Ok((z, energy(&c, f)?.to_f64(), c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config;

    fn pot(s: &str) -> Potential {
        Potential::parse(s).unwrap()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let fams = ["inv:1", "inv:0.5", "inv:5/2", "exp:1", "exp:3", "pow4:3", "pow4:7", "log4", "poly:1,-2,1/3", "sinv:1,1/2"];
        for (idx, fam) in fams.iter().enumerate() {
            let f = pot(fam);
            for seed in 0..4u64 {
                let mut pts = random_start(3 + (seed as usize % 3), 7, 100 * idx as u64 + seed).unwrap().float_coords().unwrap();
                // off the sphere as well: the gradient is of the ambient function
                for p in pts.iter_mut() {
                    p[0] *= 1.1;
                }
                let g = gradient(&pts, &f);
                let h = 1e-5;
                let mut num = 0.0;
                let mut den = 0.0;
                for i in 0..pts.len() {
                    for k in 0..pts[i].len() {
                        let mut p = pts.clone();
                        p[i][k] += h;
                        let ep = energy_of(&p, &f);
                        p[i][k] -= 2.0 * h;
                        let em = energy_of(&p, &f);
                        let fd = (ep - em) / (2.0 * h);
                        num += (fd - g[i][k]).powi(2);
                        den += g[i][k].powi(2);
                    }
                }
                let rel = (num / den.max(1e-300)).sqrt();
                assert!(rel <= 1e-6, "{fam} seed {seed}: {rel}");
            }
        }
    }

    #[test]
    fn antipodal_pair() {
        for n in [2, 3, 5] {
            let r = minimize(&DescentRun::random(n, 2, pot("inv:1"), 3).unwrap()).unwrap();
            assert!((r.energy - 0.5).abs() < 1e-10, "{}", r.energy);
        }
    }

    #[test]
    fn twelve_points_find_icosahedron() {
        let f = pot("inv:0.5");
        let target = energy(&config::icosahedron(), &f).unwrap().to_f64();
        let best = (0..4)
            .map(|s| minimize(&DescentRun::random(3, 12, f.clone(), s).unwrap()).unwrap().energy)
            .fold(f64::INFINITY, f64::min);
        assert!((best - target).abs() <= 1e-8 * target, "{best} vs {target}");
    }

    #[test]
    fn energy_never_increases() {
        let f = pot("inv:1");
        for seed in 0..5 {
            let run = DescentRun::random(4, 9, f.clone(), seed).unwrap();
            let e0 = energy(&run.start, &f).unwrap().to_f64();
            let r = minimize(&run).unwrap();
            assert!(r.energy <= e0 + 1e-12);
        }
    }

    #[test]
    fn coincident_start_is_reported() {
        let pts = vec![vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let c = PointConfiguration::float(Geometry::Sphere { n: 3 }, pts, None).unwrap();
        let e = minimize(&DescentRun::new(c, pot("inv:1"))).unwrap_err();
        assert!(e.to_string().contains("spread-out"));
    }

    #[test]
    fn pyramid_beats_bipyramid() {
        let f = pot("pow4:7");
        let (_, _, pyr) = optimize_square_pyramid(&f).unwrap();
        let r = compare_candidates(&[config::triangular_bipyramid(), pyr], &f).unwrap();
        assert_eq!(r.argmin, 1);
        assert!(!r.tie);
        assert!(r.energies[1] < r.energies[0]);
    }

    #[test]
    fn pentagons_versus_midpoint_code() {
        let a = config::edge_midpoint_simplex_4_10();
        let b = config::two_pentagons_s3();
        for k in 0..=10 {
            let r = compare_candidates(&[a.clone(), b.clone()], &pot(&format!("pow4:{k}"))).unwrap();
            match k {
                0..=2 => assert!(r.tie, "k={k} {:?}", r.energies),
                3..=6 => assert!(r.argmin == 1 && !r.tie, "k={k} {:?}", r.energies),
                _ => assert!(r.argmin == 0 && !r.tie, "k={k} {:?}", r.energies),
            }
        }
    }

    #[test]
    fn identical_candidates_tie() {
        let r = compare_candidates(&[config::icosahedron(), config::icosahedron()], &pot("inv:1")).unwrap();
        assert!(r.tie);
        assert!(compare_candidates(&[config::icosahedron(), config::cell24()], &pot("inv:1")).is_err());
    }

    #[test]
    fn classes_by_signature() {
        let a = config::cell24().to_float();
        let b = random_start(4, 24, 1).unwrap();
        let ids = classify(&[&a, &b, &a], DEDUP_TOL);
        assert_eq!(ids, vec![0, 1, 0]);
    }

    #[test]
    fn bound_never_exceeds_descent_energy() {
        use crate::certify::build_sharp_certificate;
        let f = pot("inv:1");
        let bound = build_sharp_certificate(&config::icosahedron(), &f).unwrap().bound_f64();
        for s in 0..3 {
            let r = minimize(&DescentRun::random(3, 12, f.clone(), s).unwrap()).unwrap();
            assert!(bound <= r.energy + 1e-9 * bound);
        }
    }
}
