//! Hermite interpolation, the quotient operator and conductivity chains.

use crate::error::{Error, Result};
use crate::exactfield::Scalar;
use crate::orthopoly::{expand, Kernel, Poly, UltraExpansion};

/// Interpolation nodes with multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSpec<S: Scalar> {
    pub nodes: Vec<S>,
    pub multiplicities: Vec<usize>,
}

impl<S: Scalar> NodeSpec<S> {
    pub fn new(nodes: Vec<S>, multiplicities: Vec<usize>) -> Result<Self> {
        if nodes.len() != multiplicities.len() {
            return Err(Error::InvalidInput("node and multiplicity counts differ".into()));
        }
        if multiplicities.iter().any(|&k| k == 0) {
            return Err(Error::InvalidInput("multiplicities must be positive".into()));
        }
        for w in nodes.windows(2) {
            if w[0].cmp_s(&w[1]) != std::cmp::Ordering::Less {
                return Err(Error::InvalidInput("nodes must be strictly ascending".into()));
            }
        }
        Ok(NodeSpec { nodes, multiplicities })
    }

    /// Every node with the same multiplicity.
    pub fn uniform(nodes: Vec<S>, k: usize) -> Result<Self> {
        let m = nodes.len();
        NodeSpec::new(nodes, vec![k; m])
    }

    /// D = sum of multiplicities.
    pub fn order(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// prod (t - t_i)^{k_i}.
    pub fn node_polynomial(&self) -> Poly<S> {
        self.nodes
            .iter()
            .zip(&self.multiplicities)
            .fold(Poly::one(), |acc, (t, &k)| &acc * &Poly::linear_root(t).pow(k))
    }
}

/// Derivatives a(t_i), a'(t_i), ..., a^{(k_i - 1)}(t_i) at each node.
#[derive(Clone, Debug, PartialEq)]
pub struct JetData<S: Scalar> {
    pub jets: Vec<Vec<S>>,
}

impl<S: Scalar> JetData<S> {
    pub fn from_fn(spec: &NodeSpec<S>, mut jet: impl FnMut(&S, usize) -> Result<Vec<S>>) -> Result<Self> {
        let jets = spec
            .nodes
            .iter()
            .zip(&spec.multiplicities)
            .map(|(t, &k)| jet(t, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(JetData { jets })
    }

    pub fn from_poly(spec: &NodeSpec<S>, a: &Poly<S>) -> Self {
        let jets = spec
            .nodes
            .iter()
            .zip(&spec.multiplicities)
            .map(|(t, &k)| {
                let mut d = a.clone();
                (0..k)
                    .map(|_| {
                        let v = d.eval(t);
                        d = d.derivative();
                        v
                    })
                    .collect()
            })
            .collect();
        JetData { jets }
    }
}

/// Unique polynomial of degree < D matching all jets, by confluent divided differences.
pub fn hermite<S: Scalar>(spec: &NodeSpec<S>, jets: &JetData<S>) -> Result<Poly<S>> {
    if jets.jets.len() != spec.nodes.len()
        || jets.jets.iter().zip(&spec.multiplicities).any(|(j, &k)| j.len() < k)
    {
        return Err(Error::InvalidInput("jet data incomplete for node spec".into()));
    }
    // z: nodes repeated by multiplicity; (node index, position within block)
    let mut z: Vec<(usize, S)> = Vec::new();
    for (i, (t, &k)) in spec.nodes.iter().zip(&spec.multiplicities).enumerate() {
        for _ in 0..k {
            z.push((i, t.clone()));
        }
    }
    let d = z.len();
    let mut fact = vec![S::one()];
    for j in 1..d {
        let f = fact[j - 1].clone() * S::from_i64(j as i64);
        fact.push(f);
    }
    // column-by-column divided difference table, keeping the top entries
    let mut col: Vec<S> = z.iter().map(|(i, _)| jets.jets[*i][0].clone()).collect();
    let mut newton = vec![col[0].clone()];
    for order in 1..d {
        let mut next = Vec::with_capacity(d - order);
        for s in 0..d - order {
            let (ia, ta) = &z[s];
            let (ib, tb) = &z[s + order];
            let v = if ia == ib {
                jets.jets[*ia][order].clone() / fact[order].clone()
            } else {
                let den = tb.clone() - ta.clone();
                if den.is_zero() {
                    return Err(Error::Singular("coincident interpolation nodes".into()));
                }
                (col[s + 1].clone() - col[s].clone()) / den
            };
            next.push(v);
        }
        newton.push(next[0].clone());
        col = next;
    }
    let mut p = Poly::constant(newton[d - 1].clone());
    for k in (0..d - 1).rev() {
        p = &(&p * &Poly::linear_root(&z[k].1)) + &Poly::constant(newton[k].clone());
    }
    Ok(p)
}

/// H(a, g) for polynomial a: the remainder of a modulo g.
pub fn hermite_of_poly<S: Scalar>(a: &Poly<S>, g: &Poly<S>) -> Poly<S> {
    a.div_rem(g).1
}

/// Q(a, g) = (a - H(a, g)) / g.
pub fn quotient<S: Scalar>(a: &Poly<S>, g: &Poly<S>) -> Poly<S> {
    a.div_rem(g).0
}

/// One partial product along a conductivity chain.
#[derive(Clone, Debug)]
pub struct ChainFactor<S: Scalar> {
    pub roots: Vec<S>,
    pub poly: Poly<S>,
    pub expansion: UltraExpansion<S>,
    pub positive_definite: bool,
    pub strictly_positive_definite: bool,
}

#[derive(Clone, Debug)]
pub struct ChainReport<S: Scalar> {
    /// Factors whose positive definiteness the chain requires.
    pub factors: Vec<ChainFactor<S>>,
    /// The polynomial g for which H(a, g) is certified positive definite.
    pub target: Poly<S>,
    pub conductive: bool,
    pub strictly_conductive: bool,
    /// Whether F itself is positive definite (distinct from conductivity).
    pub f_positive_definite: bool,
    /// (factor index, coefficient index) of the first failure.
    pub failure: Option<(usize, usize)>,
}

impl<S: Scalar> ChainReport<S> {
    pub fn describe_failure(&self) -> Option<String> {
        self.failure.map(|(f, c)| {
            let fac = &self.factors[f];
            format!(
                "partial product with {} roots has coefficient {} = {} < 0",
                fac.roots.len(),
                c,
                fac.expansion.coeffs[c].render()
            )
        })
    }
}

/// Certifies conductivity by positive definiteness of partial products.
///
/// `square`: target F^2, where F = prod (t - t_i);
/// `antipodal_first_order`: t_1 = -1 enters once, target (t+1) prod_{i>=2} (t - t_i)^2;
/// otherwise target F.
pub fn conductivity_chain<S: Scalar>(
    kernel: &Kernel,
    roots: &[S],
    square: bool,
    antipodal_first_order: bool,
) -> Result<ChainReport<S>> {
    if roots.is_empty() {
        return Err(Error::InvalidInput("conductivity chain needs at least one root".into()));
    }
    let m1 = -S::one();
    for w in roots.windows(2) {
        if w[0].cmp_s(&w[1]) != std::cmp::Ordering::Less {
            return Err(Error::InvalidInput("roots must be strictly ascending".into()));
        }
    }
    if roots[0].cmp_s(&m1) == std::cmp::Ordering::Less || roots[roots.len() - 1].cmp_s(&S::one()) != std::cmp::Ordering::Less
    {
        return Err(Error::NodeOutOfRange("roots must lie in [-1, 1)".into()));
    }
    if antipodal_first_order && roots[0] != m1 {
        return Err(Error::InvalidInput("antipodal chain needs t_1 = -1".into()));
    }
    let m = roots.len();
    // the sequence of linear factors multiplied in, and which prefixes must be PD
    let seq: Vec<S> = if antipodal_first_order {
        let mut s = vec![m1.clone()];
        for r in &roots[1..] {
            s.push(r.clone());
            s.push(r.clone());
        }
        s
    } else if square {
        roots.iter().chain(roots.iter()).cloned().collect()
    } else {
        roots.to_vec()
    };
    // for F^2 = F * F the second copy needs only F positive definite
    let checked: Vec<usize> = if square && !antipodal_first_order {
        (1..=m).collect()
    } else {
        (1..seq.len()).collect()
    };
    let mut factors = Vec::new();
    let mut failure = None;
    let mut prod = Poly::<S>::one();
    let mut prefix = Vec::new();
    let mut f_pd = false;
    for (j, r) in seq.iter().enumerate() {
        prod = &prod * &Poly::linear_root(r);
        prefix.push(r.clone());
        let len = j + 1;
        let is_f = !antipodal_first_order && len == m;
        if !checked.contains(&len) && !is_f {
            continue;
        }
        let e = expand(&prod, kernel);
        let neg = e.negative_indices();
        let pd = neg.is_empty();
        if is_f {
            f_pd = pd;
        }
        let strict = e.is_strictly_positive_definite();
        if checked.contains(&len) {
            if !pd && failure.is_none() {
                failure = Some((factors.len(), neg[0]));
            }
            factors.push(ChainFactor {
                roots: prefix.clone(),
                poly: prod.clone(),
                expansion: e,
                positive_definite: pd,
                strictly_positive_definite: strict,
            });
        }
    }
    let conductive = failure.is_none();
    let trivial_antipodal = roots[0] == m1 && m == 1;
    let strictly_conductive =
        conductive && factors.iter().all(|f| f.strictly_positive_definite) && !trivial_antipodal;
    Ok(ChainReport { factors, target: prod, conductive, strictly_conductive, f_positive_definite: f_pd, failure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{rat, rat_int, QuadExt, Rational};
    use proptest::prelude::*;

    fn rp(v: &[i64]) -> Poly<Rational> {
        Poly::new(v.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn cubic_at_double_zero_node() {
        let a = Poly::monomial(rat_int(1), 3);
        let spec = NodeSpec::new(vec![rat_int(0)], vec![2]).unwrap();
        let h = hermite(&spec, &JetData::from_poly(&spec, &a)).unwrap();
        assert!(h.is_zero());
    }

    #[test]
    fn reproduces_low_degree_polynomial() {
        let a = rp(&[3, -1, 4, 1, -5]);
        let spec = NodeSpec::new(vec![rat(-1, 2), rat(1, 3), rat_int(1)], vec![2, 1, 2]).unwrap();
        assert_eq!(hermite(&spec, &JetData::from_poly(&spec, &a)).unwrap(), a);
    }

    #[test]
    fn simplex_tangent_line() {
        // f(r) = 1/r, N = 5: tangent to a(t) = 1/(2-2t) at t0 = -1/4
        let t0 = rat(-1, 4);
        let spec = NodeSpec::new(vec![t0.clone()], vec![2]).unwrap();
        let r = rat_int(2) - rat_int(2) * t0.clone();
        let jets = JetData { jets: vec![vec![rat_int(1) / r.clone(), rat_int(2) / (r.clone() * r.clone())]] };
        let h = hermite(&spec, &jets).unwrap();
        assert_eq!(h.degree(), Some(1));
        assert_eq!(h.eval(&t0), rat(2, 5));
        assert_eq!(h.coeff(1), rat(8, 25));
    }

    #[test]
    fn quotient_examples() {
        let g = rp(&[1, 0, -2, 1]);
        assert_eq!(quotient(&g, &g), Poly::one());
        let a = rp(&[1, 1]).pow(3);
        let q = quotient(&a, &Poly::<Rational>::x());
        assert_eq!(q.eval(&rat_int(0)), rat_int(3));
    }

    #[test]
    fn quotient_matches_hermite_of_poly() {
        let a = rp(&[1, 1]).pow(7);
        let spec = NodeSpec::new(vec![rat(-1, 2), rat(1, 5)], vec![2, 3]).unwrap();
        let g = spec.node_polynomial();
        let h = hermite(&spec, &JetData::from_poly(&spec, &a)).unwrap();
        assert_eq!(hermite_of_poly(&a, &g), h);
        assert_eq!(&(&quotient(&a, &g) * &g) + &h, a);
    }

    #[test]
    fn single_linear_factor_is_conductive() {
        let k = Kernel::sphere(3);
        for r in [rat(-1, 2), rat(1, 2)] {
            let rep = conductivity_chain::<Rational>(&k, &[r.clone()], false, false).unwrap();
            assert!(rep.conductive);
            assert!(rep.factors.is_empty());
            assert_eq!(rep.f_positive_definite, r < rat_int(0));
        }
    }

    #[test]
    fn icosahedron_chain_over_quadratic_field() {
        let s = QuadExt::from_ints(0, 1, 1, 5);
        let roots = vec![QuadExt::from_ints(-1, 1, 0, 1), -s.clone(), s];
        let rep = conductivity_chain(&Kernel::sphere(3), &roots, true, false).unwrap();
        assert!(rep.conductive && rep.strictly_conductive);
        assert_eq!(rep.factors.len(), 3);
        assert_eq!(rep.target.degree(), Some(6));
    }

    #[test]
    fn cross_polytope_chain() {
        for n in 2..8 {
            let rep = conductivity_chain::<Rational>(&Kernel::sphere(n), &[rat_int(-1), rat_int(0)], true, false).unwrap();
            assert!(rep.conductive, "n = {n}");
        }
    }

    #[test]
    fn antipodal_single_node_trivial() {
        let k = Kernel::jacobi(rat(1, 1), rat(0, 1));
        let rep = conductivity_chain::<Rational>(&k, &[rat_int(-1)], true, true).unwrap();
        assert!(rep.conductive);
        assert_eq!(rep.target, rp(&[1, 1]));
    }

    #[test]
    fn positive_first_root_breaks_chain() {
        let roots = [rat(1, 2), rat(9, 10)];
        let rep = conductivity_chain::<Rational>(&Kernel::sphere(3), &roots, true, false).unwrap();
        assert!(!rep.conductive);
        assert_eq!(rep.failure, Some((0, 0)));
        assert!(rep.describe_failure().is_some());
    }

    proptest! {
        #[test]
        fn jets_reproduced(
            vals in proptest::collection::vec(-9i64..10, 6),
            nodes in proptest::collection::btree_set(-8i64..8, 3),
        ) {
            let nodes: Vec<Rational> = nodes.into_iter().map(|n| rat(n, 8)).collect();
            let spec = NodeSpec::new(nodes.clone(), vec![2, 1, 3]).unwrap();
            let jets = JetData { jets: vec![
                vec![rat_int(vals[0]), rat_int(vals[1])],
                vec![rat_int(vals[2])],
                vec![rat_int(vals[3]), rat_int(vals[4]), rat_int(vals[5])],
            ]};
            let h = hermite(&spec, &jets).unwrap();
            prop_assert!(h.degree().unwrap_or(0) < 6);
            prop_assert_eq!(JetData::from_poly(&spec, &h), jets);
        }

        #[test]
        fn composition_law(
            a in proptest::collection::vec(-9i64..10, 1..9),
            r1 in proptest::collection::vec(-8i64..8, 1..4),
            r2 in proptest::collection::vec(-8i64..8, 1..4),
        ) {
            let a = rp(&a);
            let g1 = Poly::from_roots(&r1.iter().map(|&r| rat(r, 8)).collect::<Vec<_>>());
            let g2 = Poly::from_roots(&r2.iter().map(|&r| rat(r, 8)).collect::<Vec<_>>());
            prop_assert_eq!(quotient(&a, &(&g1 * &g2)), quotient(&quotient(&a, &g1), &g2));
        }

        #[test]
        fn remainder_nonnegative_for_even_multiplicities(
            k in 2usize..14,
            nodes in proptest::collection::btree_set(-15i64..15, 1..4),
        ) {
            let a = rp(&[1, 1]).pow(k);
            let nodes: Vec<Rational> = nodes.into_iter().map(|n| rat(n, 16)).collect();
            let spec = NodeSpec::uniform(nodes, 2).unwrap();
            let h = hermite(&spec, &JetData::from_poly(&spec, &a)).unwrap();
            let diff = (&a - &h).to_f64();
            for i in 0..1000 {
                let t = -1.0 + 2.0 * i as f64 / 1000.0;
                prop_assert!(diff.eval(&t) >= -1e-9 * (1.0 + t).powi(k as i32).max(1.0));
            }
        }

        #[test]
        fn quotient_absolutely_monotonic(
            k in 1usize..16,
            nodes in proptest::collection::btree_set(-16i64..16, 1..4),
            mults in proptest::collection::vec(1usize..3, 3),
        ) {
            let a = rp(&[1, 1]).pow(k);
            let nodes: Vec<Rational> = nodes.into_iter().map(|n| rat(n, 16)).collect();
            let m = nodes.len();
            let spec = NodeSpec::new(nodes, mults[..m].to_vec()).unwrap();
            let q = quotient(&a, &spec.node_polynomial());
            // coefficients in powers of (1 + t)
            let in_s = q.shift(&rat_int(-1));
            for c in in_s.coeffs() {
                prop_assert!(c.sign() >= 0);
            }
        }
    }
}
