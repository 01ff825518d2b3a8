//! Point configurations on spheres and projective spaces: built-ins,
//! distance distributions, energies and design strengths.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactfield::{rat, CompensatedSum, Number, QuadExt, Rational, Scalar};
use crate::orthopoly::{Kernel, Poly};
use crate::potential::Potential;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseField {
    Real,
    Complex,
    Quaternion,
}

impl BaseField {
    pub fn real_dim(self) -> usize {
        match self {
            BaseField::Real => 1,
            BaseField::Complex => 2,
            BaseField::Quaternion => 4,
        }
    }

    /// Second Jacobi exponent of the projective space.
    pub fn beta(self) -> Rational {
        match self {
            BaseField::Real => rat(-1, 2),
            BaseField::Complex => rat(0, 1),
            BaseField::Quaternion => rat(1, 1),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "R" | "real" => Ok(BaseField::Real),
            "C" | "complex" => Ok(BaseField::Complex),
            "H" | "quaternion" => Ok(BaseField::Quaternion),
            _ => Err(Error::InvalidInput(format!("unknown base field '{s}'"))),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BaseField::Real => "R",
            BaseField::Complex => "C",
            BaseField::Quaternion => "H",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    /// The unit sphere S^{n-1} in R^n.
    Sphere { n: usize },
    /// Projective space KP^dim.
    Projective { field: BaseField, dim: usize },
}

impl Geometry {
    pub fn kernel(&self) -> Kernel {
        match *self {
            Geometry::Sphere { n } => Kernel::sphere(n),
            Geometry::Projective { field, dim } => {
                let real = (dim * field.real_dim()) as i64;
                Kernel::jacobi(rat(real - 2, 2), field.beta())
            }
        }
    }

    pub fn is_projective(&self) -> bool {
        matches!(self, Geometry::Projective { .. })
    }

    pub fn describe(&self) -> String {
        match self {
            Geometry::Sphere { n } => format!("sphere S^{} in R^{n}", n - 1),
            Geometry::Projective { field, dim } => format!("projective {}P^{dim}", field.symbol()),
        }
    }
}

/// Coordinates. Exact points share a common squared norm `norm2`.
#[derive(Clone, Debug, PartialEq)]
pub enum Points {
    Exact { coords: Vec<Vec<QuadExt>>, norm2: QuadExt },
    Float(Vec<Vec<f64>>),
    ComplexFloat(Vec<Vec<Complex64>>),
}

#[derive(Clone, Debug)]
pub struct PointConfiguration {
    pub geometry: Geometry,
    pub points: Points,
    pub name: Option<String>,
    cache: OnceLock<DistanceDistribution>,
}

impl PartialEq for PointConfiguration {
    fn eq(&self, other: &Self) -> bool {
        self.geometry == other.geometry && self.points == other.points && self.name == other.name
    }
}

fn dot_q(x: &[QuadExt], y: &[QuadExt]) -> QuadExt {
    x.iter().zip(y).fold(QuadExt::default(), |acc, (a, b)| acc.add_ref(&a.mul_ref(b)))
}

fn dot_f(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn dot_c(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

/// Rank over Q(sqrt5) by Gaussian elimination.
pub fn exact_rank(rows: &[Vec<QuadExt>]) -> usize {
    let mut m: Vec<Vec<QuadExt>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !Scalar::is_zero(&m[i][c])) else { continue };
        m.swap(rank, p);
        let piv = m[rank][c].clone();
        for i in 0..m.len() {
            if i != rank && !Scalar::is_zero(&m[i][c]) {
                let f = m[i][c].clone() / piv.clone();
                for j in c..cols {
                    let v = m[rank][j].mul_ref(&f);
                    m[i][j] = m[i][j].sub_ref(&v);
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

impl PointConfiguration {
    fn build(geometry: Geometry, points: Points, name: Option<String>) -> Self {
        PointConfiguration { geometry, points, name, cache: OnceLock::new() }
    }

    /// Exact points with a common squared norm (checked), rank at most the dimension.
    pub fn exact(geometry: Geometry, coords: Vec<Vec<QuadExt>>, name: Option<&str>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("configuration has no points".into()));
        }
        let dim = coords[0].len();
        if coords.iter().any(|c| c.len() != dim) {
            return Err(Error::InvalidInput("points have different lengths".into()));
        }
        let norm2 = dot_q(&coords[0], &coords[0]);
        if Scalar::is_zero(&norm2) {
            return Err(Error::InvalidInput("zero vector".into()));
        }
        if coords.iter().any(|c| dot_q(c, c) != norm2) {
            return Err(Error::InvalidInput("exact points must share a common norm".into()));
        }
        let max_rank = match geometry {
            Geometry::Sphere { n } => n,
            Geometry::Projective { field: BaseField::Real, dim } => dim + 1,
            Geometry::Projective { field: BaseField::Complex, dim } => 2 * (dim + 1),
            Geometry::Projective { .. } => {
                return Err(Error::InvalidInput("quaternionic coordinates are not supported".into()))
            }
        };
        if dim > max_rank && exact_rank(&coords) > max_rank {
            return Err(Error::InvalidInput(format!("points span more than {max_rank} dimensions")));
        }
        if dim < max_rank && matches!(geometry, Geometry::Sphere { .. }) {
            return Err(Error::InvalidInput("fewer coordinates than the sphere dimension".into()));
        }
        Ok(Self::build(geometry, Points::Exact { coords, norm2 }, name.map(String::from)))
    }

    /// Floating unit vectors (norms checked to 1e-10).
    pub fn float(geometry: Geometry, coords: Vec<Vec<f64>>, name: Option<&str>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("configuration has no points".into()));
        }
        let dim = coords[0].len();
        if coords.iter().any(|c| c.len() != dim) {
            return Err(Error::InvalidInput("points have different lengths".into()));
        }
        if let Geometry::Sphere { n } = geometry {
            if dim != n {
                return Err(Error::InvalidInput(format!("expected {n} coordinates, got {dim}")));
            }
        }
        for c in &coords {
            if (dot_f(c, c).sqrt() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidInput("floating points must be unit vectors".into()));
            }
        }
        Ok(Self::build(geometry, Points::Float(coords), name.map(String::from)))
    }

    pub fn complex_float(field_dim: usize, coords: Vec<Vec<Complex64>>, name: Option<&str>) -> Result<Self> {
        if coords.iter().any(|c| c.len() != field_dim + 1) {
            return Err(Error::InvalidInput("wrong number of homogeneous coordinates".into()));
        }
        for c in &coords {
            if (dot_c(c, c).re.sqrt() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidInput("projective representatives must be unit vectors".into()));
            }
        }
        let g = Geometry::Projective { field: BaseField::Complex, dim: field_dim };
        Ok(Self::build(g, Points::ComplexFloat(coords), name.map(String::from)))
    }

    pub fn len(&self) -> usize {
        match &self.points {
            Points::Exact { coords, .. } => coords.len(),
            Points::Float(c) => c.len(),
            Points::ComplexFloat(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.points, Points::Exact { .. })
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| "configuration".into())
    }

    /// Inner product (sphere) or cos-distance (projective) of points i and j.
    pub fn pair_value(&self, i: usize, j: usize) -> Number {
        let proj = self.geometry.is_projective();
        match &self.points {
            Points::Exact { coords, norm2 } => {
                let ip = dot_q(&coords[i], &coords[j]);
                if proj {
                    let two = QuadExt::from_rational(rat(2, 1));
                    Number::Exact(two * ip.mul_ref(&ip) / norm2.mul_ref(norm2) - QuadExt::from_rational(rat(1, 1)))
                } else {
                    Number::Exact(ip / norm2.clone())
                }
            }
            Points::Float(c) => {
                let ip = dot_f(&c[i], &c[j]);
                Number::Float(if proj { 2.0 * ip * ip - 1.0 } else { ip })
            }
            Points::ComplexFloat(c) => Number::Float(2.0 * dot_c(&c[i], &c[j]).norm_sqr() - 1.0),
        }
    }

    pub fn pair_value_f64(&self, i: usize, j: usize) -> f64 {
        match &self.points {
            Points::Exact { .. } => self.pair_value(i, j).to_f64(),
            Points::Float(c) => {
                let ip = dot_f(&c[i], &c[j]);
                if self.geometry.is_projective() {
                    2.0 * ip * ip - 1.0
                } else {
                    ip
                }
            }
            Points::ComplexFloat(c) => 2.0 * dot_c(&c[i], &c[j]).norm_sqr() - 1.0,
        }
    }

    /// Squared chordal distance 2 - 2t; for real float points taken as |x - y|^2.
    pub fn pair_r_f64(&self, i: usize, j: usize) -> f64 {
        match (&self.points, self.geometry.is_projective()) {
            (Points::Float(c), false) => c[i].iter().zip(&c[j]).map(|(a, b)| (a - b) * (a - b)).sum(),
            _ => (2.0 - 2.0 * self.pair_value_f64(i, j)).max(0.0),
        }
    }

    /// Floating copy with unit vectors.
    pub fn to_float(&self) -> PointConfiguration {
        match &self.points {
            Points::Exact { coords, norm2 } => {
                let s = norm2.to_f64().sqrt();
                let c = coords.iter().map(|p| p.iter().map(|x| x.to_f64() / s).collect()).collect();
                Self::build(self.geometry, Points::Float(c), self.name.clone())
            }
            _ => self.clone(),
        }
    }

    /// Real coordinates as unit vectors (for sphere geometry).
    pub fn float_coords(&self) -> Option<Vec<Vec<f64>>> {
        match self.to_float().points {
            Points::Float(c) => Some(c),
            _ => None,
        }
    }

    pub fn distance_distribution(&self) -> &DistanceDistribution {
        self.cache.get_or_init(|| DistanceDistribution::tally(self))
    }
}

/// Ordered-pair counts of inner products (or cos-distances), ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceDistribution {
    pub entries: Vec<(Number, usize)>,
    pub n_points: usize,
    /// Per-point counts when every point sees the same distribution.
    pub per_point: Option<Vec<(Number, usize)>>,
}

const FLOAT_MERGE: f64 = 1e-9;

fn merge_float(values: &mut Vec<f64>) -> Vec<(f64, usize)> {
    values.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, usize)> = Vec::new();
    for v in values.iter() {
        match out.last_mut() {
            Some((x, c)) if (v - *x).abs() <= FLOAT_MERGE => *c += 1,
            _ => out.push((*v, 1)),
        }
    }
    out
}

impl DistanceDistribution {
    fn tally(c: &PointConfiguration) -> Self {
        let n = c.len();
        if c.is_exact() {
            let mut rows: Vec<BTreeMap<QuadExt, usize>> = vec![BTreeMap::new(); n];
            for i in 0..n {
                for j in i..n {
                    let Number::Exact(v) = c.pair_value(i, j) else { unreachable!() };
                    *rows[i].entry(v.clone()).or_default() += 1;
                    if i != j {
                        *rows[j].entry(v).or_default() += 1;
                    }
                }
            }
            let mut total: BTreeMap<QuadExt, usize> = BTreeMap::new();
            for r in &rows {
                for (v, k) in r {
                    *total.entry(v.clone()).or_default() += k;
                }
            }
            let uniform = rows.iter().all(|r| r == &rows[0]);
            let conv = |m: &BTreeMap<QuadExt, usize>| m.iter().map(|(v, k)| (Number::Exact(v.clone()), *k)).collect();
            DistanceDistribution {
                entries: conv(&total),
                n_points: n,
                per_point: if uniform { Some(conv(&rows[0])) } else { None },
            }
        } else {
            let mut all = Vec::with_capacity(n * n);
            let mut rows: Vec<Vec<f64>> = vec![Vec::with_capacity(n); n];
            for i in 0..n {
                for j in i..n {
                    let v = c.pair_value_f64(i, j);
                    rows[i].push(v);
                    all.push(v);
                    if i != j {
                        rows[j].push(v);
                        all.push(v);
                    }
                }
            }
            let total = merge_float(&mut all);
            let row_tallies: Vec<Vec<(f64, usize)>> = rows.iter_mut().map(merge_float).collect();
            let uniform = row_tallies.iter().all(|r| {
                r.len() == row_tallies[0].len()
                    && r.iter().zip(&row_tallies[0]).all(|(a, b)| a.1 == b.1 && (a.0 - b.0).abs() <= FLOAT_MERGE)
            });
            let conv = |v: &[(f64, usize)]| v.iter().map(|(x, k)| (Number::Float(*x), *k)).collect();
            DistanceDistribution {
                entries: conv(&total),
                n_points: n,
                per_point: if uniform { Some(conv(&row_tallies[0])) } else { None },
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|(v, _)| v.is_exact())
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|(_, k)| k).sum()
    }

    fn is_one(v: &Number) -> bool {
        match v {
            Number::Exact(q) => *q == QuadExt::from_rational(rat(1, 1)),
            Number::Float(x) => (x - 1.0).abs() <= FLOAT_MERGE,
        }
    }

    /// Distinct values other than 1, ascending.
    pub fn nonunit_values(&self) -> Vec<Number> {
        self.entries.iter().filter(|(v, _)| !Self::is_one(v)).map(|(v, _)| v.clone()).collect()
    }

    /// Parses rows "value count" (ordered-pair counts, including the N self pairs at 1).
    pub fn parse(text: &str) -> Result<Self> {
        let mut exact = Vec::new();
        let mut float = Vec::new();
        let mut all_exact = true;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(v), Some(k), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse(format!("line {}: expected 'value count'", lineno + 1)));
            };
            let k: usize = k.parse().map_err(|_| Error::Parse(format!("line {}: bad count", lineno + 1)))?;
            let decimal = v.contains('.') || v.contains('e') || v.contains('E');
            match QuadExt::parse(v) {
                Ok(q) if !decimal => {
                    float.push((q.to_f64(), k));
                    exact.push((q, k));
                }
                _ => {
                    all_exact = false;
                    let x: f64 = v.parse().map_err(|_| Error::Parse(format!("line {}: bad value '{v}'", lineno + 1)))?;
                    float.push((x, k));
                }
            }
        }
        let total: usize = float.iter().map(|(_, k)| k).sum();
        let n = (total as f64).sqrt().round() as usize;
        if n * n != total || n == 0 {
            return Err(Error::Parse(format!("total count {total} is not N^2")));
        }
        if float.iter().any(|(x, _)| !(-1.0..=1.0).contains(x)) {
            return Err(Error::Parse("values must lie in [-1, 1]".into()));
        }
        let entries: Vec<(Number, usize)> = if all_exact {
            let mut m: BTreeMap<QuadExt, usize> = BTreeMap::new();
            for (q, k) in exact {
                *m.entry(q).or_default() += k;
            }
            m.into_iter().map(|(q, k)| (Number::Exact(q), k)).collect()
        } else {
            float.sort_by(|a, b| a.0.total_cmp(&b.0));
            float.into_iter().map(|(x, k)| (Number::Float(x), k)).collect()
        };
        let d = DistanceDistribution { entries, n_points: n, per_point: None };
        let ones: usize = d.entries.iter().filter(|(v, _)| Self::is_one(v)).map(|(_, k)| k).sum();
        if ones < n {
            return Err(Error::Parse(format!("value 1 needs count at least N = {n}")));
        }
        Ok(d)
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(v, k)| format!("{v} {k}\n")).collect()
    }
}

/// Energy sum over ordered pairs of distinct points of f(2 - 2t).
pub fn energy_from_distribution(d: &DistanceDistribution, f: &Potential) -> Result<Number> {
    let exact = d.is_exact() && f.supports_exact();
    let two = QuadExt::from_rational(rat(2, 1));
    let mut eq = QuadExt::default();
    let mut ef = CompensatedSum::new();
    for (v, k) in &d.entries {
        let mut count = *k;
        if DistanceDistribution::is_one(v) {
            count -= d.n_points.min(count);
            if count == 0 {
                continue;
            }
            if !f.finite_at_zero() {
                return Err(Error::Potential(format!("{f} is infinite at coincident points")));
            }
        }
        if exact {
            let t = v.as_exact().expect("exact");
            let r = two.clone() - two.mul_ref(t);
            let fv = f
                .f_derivs_exact(&r, 1)
                .ok_or_else(|| Error::Potential(format!("{f} undefined at r = {r}")))?;
            eq = eq.add_ref(&fv[0].mul_ref(&QuadExt::from_rational(rat(count as i64, 1))));
        } else {
            let r = 2.0 - 2.0 * v.to_f64();
            let fv = f.value(r.max(0.0));
            if !fv.is_finite() {
                return Err(Error::Potential(format!("{f} is not finite at r = {r}")));
            }
            ef.add(fv * count as f64);
        }
    }
    Ok(if exact { Number::Exact(eq) } else { Number::Float(ef.value()) })
}

/// Exact configurations go through the distance distribution; floating ones
/// are summed pairwise, since clustered values would perturb f near 0.
pub fn energy(c: &PointConfiguration, f: &Potential) -> Result<Number> {
    if c.is_exact() {
        energy_from_distribution(c.distance_distribution(), f)
    } else {
        energy_pairwise(c, f).map(Number::Float)
    }
}

/// O(N^2) floating energy without the distribution.
pub fn energy_pairwise(c: &PointConfiguration, f: &Potential) -> Result<f64> {
    let mut s = CompensatedSum::new();
    let n = c.len();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let r = c.pair_r_f64(i, j);
            let v = f.value(r);
            if !v.is_finite() {
                return Err(Error::Potential(format!("{f} is not finite at r = {r}")));
            }
            s.add(v);
        }
    }
    Ok(s.value())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignReport {
    /// Largest M with S_1 = ... = S_M = 0.
    pub strength: usize,
    /// S_i for i = 1..=max_m.
    pub sums: Vec<Number>,
    pub zero: Vec<bool>,
}

/// Double sums of kernel polynomials over ordered pairs.
pub fn design_sums(d: &DistanceDistribution, kernel: &Kernel, max_m: usize) -> DesignReport {
    let basis = kernel.basis(max_m);
    let exact = d.is_exact();
    let n2 = (d.n_points * d.n_points) as f64;
    let mut sums = Vec::new();
    let mut zero = Vec::new();
    for p in basis.iter().skip(1) {
        if exact {
            let pq = p.convert::<QuadExt>();
            let s = d.entries.iter().fold(QuadExt::default(), |acc, (v, k)| {
                acc.add_ref(&pq.eval(v.as_exact().expect("exact")).mul_ref(&QuadExt::from_rational(rat(*k as i64, 1))))
            });
            zero.push(Scalar::is_zero(&s));
            sums.push(Number::Exact(s));
        } else {
            let pf = p.to_f64();
            let mut s = CompensatedSum::new();
            for (v, k) in &d.entries {
                s.add(pf.eval(&v.to_f64()) * *k as f64);
            }
            let scale = pf.eval(&1.0).abs().max(pf.max_abs_coeff());
            zero.push(s.value().abs() < n2 * 1e-9 * scale);
            sums.push(Number::Float(s.value()));
        }
    }
    let strength = zero.iter().take_while(|z| **z).count();
    DesignReport { strength, sums, zero }
}

pub fn design_strength(c: &PointConfiguration, max_m: usize) -> DesignReport {
    design_sums(c.distance_distribution(), &c.geometry.kernel(), max_m)
}

fn q(v: i64) -> QuadExt {
    QuadExt::from_rational(rat(v, 1))
}

fn qr(n: i64, d: i64) -> QuadExt {
    QuadExt::from_rational(rat(n, d))
}

/// Sign patterns of a vector, applied to nonzero entries only.
fn all_signs(v: &[QuadExt]) -> Vec<Vec<QuadExt>> {
    let mut out = vec![Vec::new()];
    for x in v {
        let mut next = Vec::new();
        for p in &out {
            if Scalar::is_zero(x) {
                let mut a = p.clone();
                a.push(x.clone());
                next.push(a);
            } else {
                for s in [1, -1] {
                    let mut a = p.clone();
                    a.push(if s > 0 { x.clone() } else { -x.clone() });
                    next.push(a);
                }
            }
        }
        out = next;
    }
    out
}

pub fn ngon(n: usize) -> Result<PointConfiguration> {
    if n < 1 {
        return Err(Error::InvalidInput("ngon needs N >= 1".into()));
    }
    let c = (0..n)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / n as f64;
            vec![a.cos(), a.sin()]
        })
        .collect();
    PointConfiguration::float(Geometry::Sphere { n: 2 }, c, Some(&format!("ngon({n})")))
}

/// Regular simplex of N <= n+1 points on S^{n-1}, as N e_i - (1,...,1) in R^N.
pub fn simplex(n: usize, big_n: usize) -> Result<PointConfiguration> {
    if big_n < 2 || big_n > n + 1 {
        return Err(Error::InvalidInput(format!("simplex needs 2 <= N <= n+1, got n={n}, N={big_n}")));
    }
    let coords: Vec<Vec<QuadExt>> = (0..big_n)
        .map(|i| (0..big_n).map(|j| q(if i == j { big_n as i64 - 1 } else { -1 })).collect())
        .collect();
    let coords = if big_n < n { pad(coords, n) } else { coords };
    PointConfiguration::exact(Geometry::Sphere { n }, coords, Some(&format!("simplex({n},{big_n})")))
}

fn pad(mut coords: Vec<Vec<QuadExt>>, n: usize) -> Vec<Vec<QuadExt>> {
    for c in coords.iter_mut() {
        c.resize(n, QuadExt::default());
    }
    coords
}

pub fn cross_polytope(n: usize) -> Result<PointConfiguration> {
    if n < 1 {
        return Err(Error::InvalidInput("cross polytope needs n >= 1".into()));
    }
    let mut coords = Vec::new();
    for i in 0..n {
        for s in [1, -1] {
            let mut v = vec![QuadExt::default(); n];
            v[i] = q(s);
            coords.push(v);
        }
    }
    PointConfiguration::exact(Geometry::Sphere { n }, coords, Some(&format!("cross_polytope({n})")))
}

/// Cyclic permutations of (0, +-1, +-phi).
pub fn icosahedron() -> PointConfiguration {
    let phi = QuadExt::golden();
    let mut coords = Vec::new();
    for s in all_signs(&[q(0), q(1), phi]) {
        for r in 0..3 {
            coords.push((0..3).map(|i| s[(i + r) % 3].clone()).collect());
        }
    }
    PointConfiguration::exact(Geometry::Sphere { n: 3 }, coords, Some("icosahedron")).expect("valid icosahedron")
}

fn is_even_permutation(p: &[usize]) -> bool {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 0
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut v = p.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out
}

fn cell24_coords() -> Vec<Vec<QuadExt>> {
    let mut coords = Vec::new();
    for i in 0..4 {
        for s in [1, -1] {
            let mut v = vec![QuadExt::default(); 4];
            v[i] = q(s);
            coords.push(v);
        }
    }
    coords.extend(all_signs(&vec![qr(1, 2); 4]));
    coords
}

/// The 24 unit Hurwitz quaternions.
pub fn cell24() -> PointConfiguration {
    PointConfiguration::exact(Geometry::Sphere { n: 4 }, cell24_coords(), Some("cell24")).expect("valid 24-cell")
}

/// The 120 unit icosians: the 24-cell plus even permutations of (+-phi, +-1, +-1/phi, 0)/2.
pub fn cell600() -> PointConfiguration {
    let mut coords = cell24_coords();
    let phi = QuadExt::golden();
    let base = [phi.clone() * qr(1, 2), qr(1, 2), (phi - q(1)) * qr(1, 2), q(0)];
    for s in all_signs(&base) {
        for p in permutations(4).into_iter().filter(|p| is_even_permutation(p)) {
            coords.push((0..4).map(|i| s[p[i]].clone()).collect());
        }
    }
    PointConfiguration::exact(Geometry::Sphere { n: 4 }, coords, Some("cell600")).expect("valid 600-cell")
}

/// The 240 roots of E8, scaled by 2 (integer coordinates, squared norm 8).
pub fn e8_roots() -> PointConfiguration {
    let mut coords = Vec::new();
    for i in 0..8 {
        for j in i + 1..8 {
            for (si, sj) in [(2, 2), (2, -2), (-2, 2), (-2, -2)] {
                let mut v = vec![q(0); 8];
                v[i] = q(si);
                v[j] = q(sj);
                coords.push(v);
            }
        }
    }
    for mask in 0u32..256 {
        if mask.count_ones() % 2 == 0 {
            coords.push((0..8).map(|b| q(if mask >> b & 1 == 1 { -1 } else { 1 })).collect());
        }
    }
    PointConfiguration::exact(Geometry::Sphere { n: 8 }, coords, Some("e8_roots")).expect("valid E8")
}

/// Poles plus an equatorial triangle on S^2.
pub fn triangular_bipyramid() -> PointConfiguration {
    let h = 3f64.sqrt() / 2.0;
    let coords = vec![
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.0, -1.0],
        vec![1.0, 0.0, 0.0],
        vec![-0.5, h, 0.0],
        vec![-0.5, -h, 0.0],
    ];
    PointConfiguration::float(Geometry::Sphere { n: 3 }, coords, Some("triangular_bipyramid")).expect("valid bipyramid")
}

/// Two regular pentagons in orthogonal planes of R^4.
pub fn two_pentagons_s3() -> PointConfiguration {
    let mut coords = Vec::new();
    for plane in 0..2 {
        for k in 0..5 {
            let a = 2.0 * PI * k as f64 / 5.0;
            let mut v = vec![0.0; 4];
            v[2 * plane] = a.cos();
            v[2 * plane + 1] = a.sin();
            coords.push(v);
        }
    }
    PointConfiguration::float(Geometry::Sphere { n: 4 }, coords, Some("two_pentagons_s3")).expect("valid pentagons")
}

/// Edge midpoints of the regular simplex in R^4: a (4, 10, 1/6) code.
pub fn edge_midpoint_simplex_4_10() -> PointConfiguration {
    let mut coords = Vec::new();
    for i in 0..5 {
        for j in i + 1..5 {
            coords.push((0..5).map(|k| q(if k == i || k == j { 3 } else { -2 })).collect());
        }
    }
    PointConfiguration::exact(Geometry::Sphere { n: 4 }, coords, Some("edge_midpoint_simplex_4_10"))
        .expect("valid midpoint code")
}

fn cp2_rows<T: Clone>(tau: T, one: T, zero: T) -> Vec<Vec<T>> {
    vec![
        vec![tau.clone(), one.clone(), zero.clone()],
        vec![tau.clone(), one.clone(), zero.clone()],
        vec![one.clone(), zero.clone(), tau.clone()],
        vec![one.clone(), zero.clone(), tau.clone()],
        vec![zero.clone(), tau.clone(), one.clone()],
        vec![zero, tau, one],
    ]
}

/// The six points [tau,1,0], [tau,-1,0], [1,0,tau], [-1,0,tau], [0,tau,1], [0,tau,-1] of CP^2.
pub fn cp2_simplex(tau: Complex64) -> Result<PointConfiguration> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    if (tau.norm() - phi).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("|tau| must be the golden ratio, got {}", tau.norm())));
    }
    let o = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let mut rows = cp2_rows(tau, o, z);
    rows[1][1] = -o;
    rows[3][0] = -o;
    rows[5][2] = -o;
    let s = (tau.norm_sqr() + 1.0).sqrt();
    let rows = rows.into_iter().map(|r| r.into_iter().map(|x| x / s).collect()).collect();
    PointConfiguration::complex_float(2, rows, Some("cp2_simplex"))
}

/// cp2_simplex at tau = (1+sqrt5)/2, exactly over Q(sqrt5).
pub fn cp2_simplex_exact() -> PointConfiguration {
    let mut rows = cp2_rows(QuadExt::golden(), q(1), q(0));
    rows[1][1] = q(-1);
    rows[3][0] = q(-1);
    rows[5][2] = q(-1);
    PointConfiguration::exact(Geometry::Projective { field: BaseField::Complex, dim: 2 }, rows, Some("cp2_simplex"))
        .expect("valid CP^2 simplex")
}

fn parse_args(s: &str) -> Result<(String, Vec<usize>)> {
    let s = s.trim();
    let (name, args) = if let Some((n, rest)) = s.split_once('(') {
        (n, rest.strip_suffix(')').ok_or_else(|| Error::Parse(format!("unbalanced parentheses in '{s}'")))?)
    } else if let Some((n, rest)) = s.split_once(':') {
        (n, rest)
    } else {
        (s, "")
    };
    let args = args
        .split(',')
        .filter(|a| !a.trim().is_empty())
        .map(|a| a.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad argument '{a}'"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((name.trim().to_string(), args))
}

pub const BUILTIN_NAMES: &[&str] = &[
    "ngon(N)",
    "simplex(n,N)",
    "cross_polytope(n)",
    "icosahedron",
    "cell600",
    "e8_roots",
    "cell24",
    "two_pentagons_s3",
    "triangular_bipyramid",
    "edge_midpoint_simplex_4_10",
    "cp2_simplex",
];

/// Built-in configuration by name, e.g. `simplex(3,4)` or `ngon:5`.
pub fn builtin(spec: &str) -> Result<PointConfiguration> {
    let (name, args) = parse_args(spec)?;
    let want = |k: usize| -> Result<()> {
        if args.len() != k {
            return Err(Error::InvalidInput(format!("{name} takes {k} parameter(s)")));
        }
        Ok(())
    };
    match name.as_str() {
        "ngon" => {
            want(1)?;
            ngon(args[0])
        }
        "simplex" => {
            want(2)?;
            simplex(args[0], args[1])
        }
        "cross_polytope" => {
            want(1)?;
            cross_polytope(args[0])
        }
        "icosahedron" => want(0).map(|_| icosahedron()),
        "cell600" => want(0).map(|_| cell600()),
        "e8_roots" | "e8" => want(0).map(|_| e8_roots()),
        "cell24" => want(0).map(|_| cell24()),
        "two_pentagons_s3" => want(0).map(|_| two_pentagons_s3()),
        "triangular_bipyramid" => want(0).map(|_| triangular_bipyramid()),
        "edge_midpoint_simplex_4_10" => want(0).map(|_| edge_midpoint_simplex_4_10()),
        "cp2_simplex" => want(0).map(|_| cp2_simplex_exact()),
        _ => Err(Error::InvalidInput(format!("unknown builtin '{name}'; known: {}", BUILTIN_NAMES.join(", ")))),
    }
}

/// On-disk configuration document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConfigFile {
    /// "sphere" or "projective".
    pub geometry: String,
    /// Ambient dimension (sphere) or projective dimension.
    pub n: usize,
    /// Base field for projective geometry: R or C.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    /// "exact" or "float".
    pub scalar_mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub points: Vec<Vec<String>>,
    /// Imaginary parts for complex projective points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_imag: Option<Vec<Vec<String>>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn render(&self) -> String {
        toml::to_string(self).expect("serializable")
    }

    pub fn into_configuration(self) -> Result<PointConfiguration> {
        let geometry = match self.geometry.as_str() {
            "sphere" => Geometry::Sphere { n: self.n },
            "projective" => Geometry::Projective {
                field: BaseField::parse(self.field.as_deref().unwrap_or("R"))?,
                dim: self.n,
            },
            g => return Err(Error::InvalidInput(format!("unknown geometry '{g}'"))),
        };
        let name = self.name.as_deref();
        match self.scalar_mode.as_str() {
            "exact" => {
                if self.points_imag.is_some() {
                    return Err(Error::InvalidInput("exact mode takes real coordinates only".into()));
                }
                let coords = self
                    .points
                    .iter()
                    .map(|r| r.iter().map(|s| QuadExt::parse(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                PointConfiguration::exact(geometry, coords, name)
            }
            "float" => {
                let pf = |s: &String| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}'")));
                let re = self
                    .points
                    .iter()
                    .map(|r| r.iter().map(pf).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                match (&geometry, &self.points_imag) {
                    (Geometry::Projective { field: BaseField::Complex, dim }, im) => {
                        let im = match im {
                            Some(im) => im
                                .iter()
                                .map(|r| r.iter().map(pf).collect::<Result<Vec<_>>>())
                                .collect::<Result<Vec<_>>>()?,
                            None => re.iter().map(|r| vec![0.0; r.len()]).collect(),
                        };
                        if im.len() != re.len() {
                            return Err(Error::InvalidInput("points_imag must match points".into()));
                        }
                        let rows = re
                            .iter()
                            .zip(&im)
                            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| Complex64::new(*x, *y)).collect())
                            .collect();
                        PointConfiguration::complex_float(*dim, rows, name)
                    }
                    (_, Some(_)) => Err(Error::InvalidInput("points_imag needs complex projective geometry".into())),
                    _ => PointConfiguration::float(geometry, re, name),
                }
            }
            m => Err(Error::InvalidInput(format!("unknown scalar_mode '{m}'"))),
        }
    }

    pub fn from_configuration(c: &PointConfiguration) -> Self {
        let (geometry, n, field) = match c.geometry {
            Geometry::Sphere { n } => ("sphere", n, None),
            Geometry::Projective { field, dim } => ("projective", dim, Some(field.symbol().to_string())),
        };
        let (mode, points, imag) = match &c.points {
            Points::Exact { coords, .. } => ("exact", coords.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(), None),
            Points::Float(p) => ("float", p.iter().map(|r| r.iter().map(|x| format!("{x:?}")).collect()).collect(), None),
            Points::ComplexFloat(p) => (
                "float",
                p.iter().map(|r| r.iter().map(|x| format!("{:?}", x.re)).collect()).collect(),
                Some(p.iter().map(|r| r.iter().map(|x| format!("{:?}", x.im)).collect()).collect()),
            ),
        };
        ConfigFile {
            geometry: geometry.into(),
            n,
            field,
            scalar_mode: mode.into(),
            name: c.name.clone(),
            points,
            points_imag: imag,
        }
    }
}

/// Loads `builtin:<name>` or a configuration file path.
pub fn load_configuration(spec: &str) -> Result<PointConfiguration> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin(name);
    }
    let text = std::fs::read_to_string(spec)?;
    ConfigFile::parse(&text)?.into_configuration()
}

/// Kernel polynomial evaluation helper shared with certify.
pub fn kernel_values(kernel: &Kernel, degree: usize, t: f64) -> Vec<f64> {
    kernel.basis(degree).iter().map(|p: &Poly<Rational>| p.eval_f64(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn values(c: &PointConfiguration) -> Vec<String> {
        c.distance_distribution().nonunit_values().iter().map(|v| v.to_string()).collect()
    }

    fn counts(c: &PointConfiguration) -> Vec<(String, usize)> {
        c.distance_distribution()
            .per_point
            .clone()
            .unwrap()
            .iter()
            .map(|(v, k)| (v.to_string(), *k))
            .collect()
    }

    #[test]
    fn cross_polytope_values() {
        let c = cross_polytope(4).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(values(&c), vec!["-1", "0"]);
    }

    #[test]
    fn cell600_distribution() {
        let c = cell600();
        assert_eq!(c.len(), 120);
        let got = counts(&c);
        let want = vec![
            ("-1", 1),
            ("-1/4-1/4*sqrt5", 12),
            ("-1/2", 20),
            ("-1/4+1/4*sqrt5", 12),
            ("0", 30),
            ("1/4-1/4*sqrt5", 12),
            ("1/2", 20),
            ("1/4+1/4*sqrt5", 12),
            ("1", 1),
        ];
        let mut got_sorted = got.clone();
        got_sorted.sort();
        let mut want: Vec<(String, usize)> = want.into_iter().map(|(a, b)| (a.to_string(), b)).collect();
        want.sort();
        assert_eq!(got_sorted, want);
    }

    #[test]
    fn simplex_and_icosahedron_distributions() {
        let s = simplex(3, 4).unwrap();
        assert_eq!(counts(&s), vec![("-1/3".to_string(), 3), ("1".to_string(), 1)]);
        let ico = icosahedron();
        assert_eq!(
            counts(&ico),
            vec![("-1".into(), 1), ("-1/5*sqrt5".into(), 5), ("1/5*sqrt5".into(), 5), ("1".into(), 1)]
        );
    }

    #[test]
    fn energies() {
        let inv1 = Potential::parse("inv:1").unwrap();
        assert_eq!(energy(&cell24(), &inv1).unwrap(), Number::Exact(QuadExt::from_ints(334, 1, 0, 1)));
        let p1 = Potential::parse("pow4:1").unwrap();
        assert_eq!(energy(&cell600(), &p1).unwrap(), Number::Exact(QuadExt::from_ints(28320, 1, 0, 1)));
        for (n, big_n) in [(3usize, 4usize), (5, 3), (7, 8)] {
            let f = Potential::parse("inv:2").unwrap();
            let e = energy(&simplex(n, big_n).unwrap(), &f).unwrap().to_f64();
            let r = 2.0 + 2.0 / (big_n as f64 - 1.0);
            let want = (big_n * (big_n - 1)) as f64 * f.value(r);
            assert!((e - want).abs() < 1e-12 * want);
        }
        let f = Potential::parse("exp:1").unwrap();
        for n in 2..6 {
            let e = energy(&cross_polytope(n).unwrap(), &f).unwrap().to_f64();
            let want = (2 * n * (2 * n - 2)) as f64 * f.value(2.0) + (2 * n) as f64 * f.value(4.0);
            assert!((e - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn design_strengths() {
        assert_eq!(design_strength(&icosahedron(), 6).strength, 5);
        assert_eq!(design_strength(&cross_polytope(5).unwrap(), 4).strength, 3);
        assert_eq!(design_strength(&simplex(4, 5).unwrap(), 4).strength, 2);
        let d = design_strength(&cell600(), 20);
        assert_eq!(d.strength, 11);
        assert!(!d.zero[11]);
        assert!(d.zero[12..19].iter().all(|z| *z));
    }

    #[test]
    fn cp2_simplex_is_projective_simplex() {
        let c = cp2_simplex_exact();
        let v = values(&c);
        assert_eq!(v, vec!["-3/5"]);
        assert_eq!(c.distance_distribution().per_point.as_ref().unwrap()[0].1, 5);
        assert!(design_strength(&c, 1).strength >= 1);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let a = cp2_simplex(Complex64::new(phi, 0.0)).unwrap();
        let rot = Complex64::from_polar(phi, PI / 3.0);
        let b = cp2_simplex(rot).unwrap();
        let da = a.distance_distribution();
        let db = b.distance_distribution();
        assert_eq!(da.entries.len(), db.entries.len());
        for ((x, k), (y, l)) in da.entries.iter().zip(&db.entries) {
            assert_eq!(k, l);
            assert!((x.to_f64() - y.to_f64()).abs() < 1e-12);
        }
        assert!((da.entries[0].0.to_f64() + 0.6).abs() < 1e-12);
        assert!(cp2_simplex(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn sharp_configurations_are_not_2m_plus_1_designs() {
        let cs = vec![icosahedron(), cross_polytope(4).unwrap(), simplex(5, 6).unwrap(), e8_roots()];
        for c in cs {
            let d = c.distance_distribution();
            let m = d.nonunit_values().len();
            let rep = design_strength(&c, 2 * m + 1);
            assert!(rep.strength < 2 * m + 1, "{}", c.label());
            // the obstruction polynomial vanishes on every pair but has positive constant coefficient
            let ts: Vec<QuadExt> = d.nonunit_values().iter().map(|v| v.as_exact().unwrap().clone()).collect();
            let mut g = Poly::new(vec![q(1), q(-1)]);
            for t in &ts {
                g = &g * &Poly::linear_root(t).pow(2);
            }
            let e = crate::orthopoly::expand(&g, &c.geometry.kernel());
            assert!(e.alpha0().sign() > 0);
        }
    }

    #[test]
    fn distribution_file_round_trip() {
        let d = cell600().distance_distribution().clone();
        let back = DistanceDistribution::parse(&d.render()).unwrap();
        assert_eq!(back.entries, d.entries);
        assert_eq!(back.n_points, 120);
        assert!(DistanceDistribution::parse("0.5 3\n").is_err());
    }

    #[test]
    fn config_file_round_trip() {
        for c in [icosahedron(), two_pentagons_s3(), cp2_simplex(Complex64::from_polar((1.0 + 5f64.sqrt()) / 2.0, 0.4)).unwrap()] {
            let text = ConfigFile::from_configuration(&c).render();
            let back = ConfigFile::parse(&text).unwrap().into_configuration().unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn builtin_names_parse() {
        assert_eq!(builtin("simplex(3,4)").unwrap().len(), 4);
        assert_eq!(builtin("ngon:7").unwrap().len(), 7);
        assert_eq!(builtin("e8_roots").unwrap().len(), 240);
        assert!(builtin("leech").is_err());
        assert!(builtin("simplex(3,9)").is_err());
    }

    fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = dot_f(&v, &v).sqrt();
        v.into_iter().map(|x| x / s).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn energy_rotation_invariant(seed in 0u64..1000, npts in 2usize..30, n in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Vec<f64>> = (0..npts).map(|_| random_unit(&mut rng, n)).collect();
            // a random orthogonal map from Gram-Schmidt
            let mut basis: Vec<Vec<f64>> = Vec::new();
            while basis.len() < n {
                let mut v = random_unit(&mut rng, n);
                for b in &basis {
                    let d = dot_f(&v, b);
                    for (x, y) in v.iter_mut().zip(b) { *x -= d * y; }
                }
                let s = dot_f(&v, &v).sqrt();
                if s > 1e-3 { basis.push(v.into_iter().map(|x| x / s).collect()); }
            }
            let rotated: Vec<Vec<f64>> = pts.iter().map(|p| basis.iter().map(|b| dot_f(b, p)).collect()).collect();
            let g = Geometry::Sphere { n };
            let a = PointConfiguration::float(g, pts, None).unwrap();
            let b = PointConfiguration::float(g, rotated, None).unwrap();
            for f in ["inv:1", "exp:1", "pow4:3", "log4"] {
                let f = Potential::parse(f).unwrap();
                let ea = energy(&a, &f).unwrap().to_f64();
                let eb = energy(&b, &f).unwrap().to_f64();
                prop_assert!((ea - eb).abs() <= 1e-10 * ea.abs().max(1.0));
                let ep = energy_pairwise(&a, &f).unwrap();
                prop_assert!((ea - ep).abs() <= 1e-10 * ea.abs().max(1.0));
            }
            // first Gegenbauer double sum is 2 lambda |sum x|^2
            let mut s = vec![0.0; n];
            for p in a.float_coords().unwrap() { for (x, y) in s.iter_mut().zip(&p) { *x += y; } }
            let lam = (n as f64 - 2.0) / 2.0;
            let s1 = design_strength(&a, 1).sums[0].to_f64();
            let want = if n == 2 { dot_f(&s, &s) } else { 2.0 * lam * dot_f(&s, &s) };
            prop_assert!((s1 - want).abs() <= 1e-9 * (npts * npts) as f64);
            prop_assert!(s1 >= -1e-9);
        }
    }

    #[test]
    fn exact_energy_matches_pairwise_for_builtins() {
        let f = Potential::parse("inv:1").unwrap();
        for c in [icosahedron(), cell24(), cross_polytope(6).unwrap(), edge_midpoint_simplex_4_10()] {
            let e = energy(&c, &f).unwrap().to_f64();
            let p = energy_pairwise(&c.to_float(), &f).unwrap();
            assert!((e - p).abs() < 1e-10 * e);
        }
    }
}
