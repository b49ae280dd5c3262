//! Scalar symbols with derivative oracles, and divided differences with repeated nodes.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Nodes closer than this (relative to `1 + max|node|`) are snapped together.
pub const NODE_SNAP_TOL: f64 = 1e-12;

type DerivativeFn = dyn Fn(usize, f64) -> f64 + Send + Sync;

#[derive(Clone)]
enum SymbolKind {
    AbsPow(f64),
    Polynomial(Vec<f64>),
    Custom(Arc<DerivativeFn>),
}

/// Real function of a real variable together with its derivatives up to `max_order`.
#[derive(Clone)]
pub struct SymbolFunction {
    kind: SymbolKind,
    max_order: usize,
}

impl fmt::Debug for SymbolFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SymbolKind::AbsPow(p) => write!(f, "AbsPow({p})"),
            SymbolKind::Polynomial(c) => write!(f, "Polynomial({c:?})"),
            SymbolKind::Custom(_) => write!(f, "Custom(max_order = {})", self.max_order),
        }
    }
}

impl SymbolFunction {
    /// `f(x) = |x|^p`.
    ///
    /// Derivatives are exposed only where `f` is continuously differentiable: order 2 for
    /// `p ≥ 2`, order 1 for `1 < p < 2`, order 0 otherwise. At the origin `f'(0) = 0`,
    /// `f''(0) = 2` for `p = 2` and `0` for `p > 2`.
    pub fn abs_pow(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidExponent(format!(
                "|x|^p symbol needs finite p > 0, got {p}"
            )));
        }
        let max_order = if p >= 2.0 {
            2
        } else if p > 1.0 {
            1
        } else {
            0
        };
        Ok(SymbolFunction {
            kind: SymbolKind::AbsPow(p),
            max_order,
        })
    }

    /// Polynomial `Σ coeffs[k] x^k`; derivatives of every order are available.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        SymbolFunction {
            kind: SymbolKind::Polynomial(coeffs.to_vec()),
            max_order: usize::MAX,
        }
    }

    /// User supplied oracle: `eval(k, x)` must return `f^{(k)}(x)` for `k ≤ max_order`.
    pub fn custom(
        max_order: usize,
        eval: impl Fn(usize, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SymbolFunction {
            kind: SymbolKind::Custom(Arc::new(eval)),
            max_order,
        }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Exponent of an `|x|^p` symbol.
    pub fn abs_pow_exponent(&self) -> Option<f64> {
        match self.kind {
            SymbolKind::AbsPow(p) => Some(p),
            _ => None,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative(0, x).expect("order 0 is always available")
    }

    /// `f^{(order)}(x)`.
    pub fn derivative(&self, order: usize, x: f64) -> Result<f64> {
        if order > self.max_order {
            return Err(Error::OrderInsufficient {
                required: order,
                available: self.max_order,
            });
        }
        Ok(match &self.kind {
            SymbolKind::AbsPow(p) => abs_pow_derivative(*p, order, x),
            SymbolKind::Polynomial(c) => polynomial_derivative(c, order, x),
            SymbolKind::Custom(eval) => eval(order, x),
        })
    }
}

fn abs_pow_derivative(p: f64, order: usize, x: f64) -> f64 {
    let ax = x.abs();
    match order {
        0 => ax.powf(p),
        1 if x == 0.0 => 0.0,
        1 => p * ax.powf(p - 1.0) * x.signum(),
        2 if x == 0.0 => {
            if p == 2.0 {
                2.0
            } else {
                0.0
            }
        }
        2 => p * (p - 1.0) * ax.powf(p - 2.0),
        _ => unreachable!("max_order of |x|^p never exceeds 2"),
    }
}

fn polynomial_derivative(coeffs: &[f64], order: usize, x: f64) -> f64 {
    if order >= coeffs.len() {
        return 0.0;
    }
    // k-th coefficient of f^(order) is coeffs[k + order] · (k+order)!/k!
    let mut acc = 0.0;
    for k in (0..coeffs.len() - order).rev() {
        let falling: f64 = ((k + 1)..=(k + order)).map(|j| j as f64).product();
        acc = acc * x + coeffs[k + order] * falling;
    }
    acc
}

/// Divided difference `f^{[k]}(λ_0, …, λ_k)` for `k + 1` nodes.
///
/// Nodes within `NODE_SNAP_TOL·(1 + max|λ|)` of an earlier node are replaced by it; the
/// recursion then takes the difference-quotient branch for distinct trailing nodes and the
/// derivative branch for equal ones.
pub fn divided_difference(f: &SymbolFunction, nodes: &[f64]) -> Result<f64> {
    if nodes.is_empty() {
        return Err(Error::Precondition(
            "divided difference needs at least one node".into(),
        ));
    }
    if let Some(bad) = nodes.iter().find(|x| !x.is_finite()) {
        return Err(Error::Precondition(format!("node {bad} is not finite")));
    }
    let snapped = snap_nodes(nodes);
    last_arg_derivative(f, &snapped, 0)
}

fn snap_nodes(nodes: &[f64]) -> Vec<f64> {
    let scale = 1.0 + nodes.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let tol = NODE_SNAP_TOL * scale;
    let mut out: Vec<f64> = Vec::with_capacity(nodes.len());
    for &x in nodes {
        let rep = out
            .iter()
            .copied()
            .find(|&y| (x - y).abs() <= tol)
            .unwrap_or(x);
        out.push(rep);
    }
    out
}

/// `∂^r/∂λ^r f^{[k]}(λ_0, …, λ_{k−1}, λ)` evaluated at `λ = λ_k`.
fn last_arg_derivative(f: &SymbolFunction, nodes: &[f64], r: usize) -> Result<f64> {
    let k = nodes.len() - 1;
    if k == 0 {
        return f.derivative(r, nodes[0]);
    }
    let a = nodes[k - 1];
    let lambda = nodes[k];
    let with_last = |mu: f64| {
        let mut v = nodes[..k - 1].to_vec();
        v.push(mu);
        v
    };
    if a == lambda {
        // g(λ) = (F(λ) − F(a))/(λ − a) has Taylor coefficients F^{(j+1)}(a)/(j+1)!
        let lower = last_arg_derivative(f, &with_last(a), r + 1)?;
        return Ok(lower / (r + 1) as f64);
    }
    let at_a = last_arg_derivative(f, &with_last(a), 0)?;
    let at_lambda = with_last(lambda);
    let gap = a - lambda;
    // g(λ)(a − λ) = F(a) − F(λ), differentiated j times.
    let mut g = (at_a - last_arg_derivative(f, &at_lambda, 0)?) / gap;
    for j in 1..=r {
        g = (j as f64 * g - last_arg_derivative(f, &at_lambda, j)?) / gap;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn monomial(d: usize) -> SymbolFunction {
        let mut c = vec![0.0; d + 1];
        c[d] = 1.0;
        SymbolFunction::polynomial(&c)
    }

    /// Complete homogeneous symmetric polynomial by enumerating exponent tuples.
    fn complete_homogeneous(degree: usize, vars: &[f64]) -> f64 {
        fn go(degree: usize, vars: &[f64], acc: f64) -> f64 {
            match vars.split_first() {
                None => {
                    if degree == 0 {
                        acc
                    } else {
                        0.0
                    }
                }
                Some((&x, rest)) => (0..=degree)
                    .map(|e| go(degree - e, rest, acc * x.powi(e as i32)))
                    .sum(),
            }
        }
        go(degree, vars, 1.0)
    }

    #[test]
    fn abs_pow_values() {
        let f = SymbolFunction::abs_pow(2.0).unwrap();
        assert_eq!(f.value(-3.0), 9.0);
        assert_eq!(f.derivative(1, -3.0).unwrap(), -6.0);
        assert_eq!(f.derivative(2, -3.0).unwrap(), 2.0);
        assert_eq!(f.derivative(2, 0.0).unwrap(), 2.0);

        let f = SymbolFunction::abs_pow(3.0).unwrap();
        assert_eq!(f.value(-2.0), 8.0);
        assert_eq!(f.derivative(1, -2.0).unwrap(), -12.0);
        assert_eq!(f.derivative(2, -2.0).unwrap(), 12.0);

        let f = SymbolFunction::abs_pow(2.5).unwrap();
        assert_eq!(f.derivative(2, 0.0).unwrap(), 0.0);
        assert_eq!(f.derivative(1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn abs_pow_orders() {
        assert_eq!(SymbolFunction::abs_pow(4.0).unwrap().max_order(), 2);
        assert_eq!(SymbolFunction::abs_pow(1.5).unwrap().max_order(), 1);
        assert_eq!(SymbolFunction::abs_pow(1.0).unwrap().max_order(), 0);
        assert_eq!(SymbolFunction::abs_pow(0.5).unwrap().max_order(), 0);
        let f = SymbolFunction::abs_pow(1.5).unwrap();
        assert!(matches!(
            f.derivative(2, 1.0),
            Err(Error::OrderInsufficient {
                required: 2,
                available: 1
            })
        ));
        assert!(SymbolFunction::abs_pow(0.0).is_err());
        assert!(SymbolFunction::abs_pow(-1.0).is_err());
        assert!(SymbolFunction::abs_pow(f64::INFINITY).is_err());
    }

    #[test]
    fn polynomial_values() {
        assert_eq!(SymbolFunction::polynomial(&[0.0, 0.0, 1.0]).value(3.0), 9.0);
        assert_eq!(monomial(3).derivative(1, 1.0).unwrap(), 3.0);
        assert_eq!(monomial(4).derivative(2, 2.0).unwrap(), 48.0);
        assert_eq!(monomial(4).derivative(5, 2.0).unwrap(), 0.0);
        assert_eq!(SymbolFunction::polynomial(&[]).value(1.0), 0.0);
    }

    #[test]
    fn frozen_examples() {
        assert_eq!(
            divided_difference(&monomial(3), &[0.0, 1.0, 2.0]).unwrap(),
            3.0
        );
        assert_eq!(divided_difference(&monomial(3), &[1.0, 1.0]).unwrap(), 3.0);
        let abs3 = SymbolFunction::abs_pow(3.0).unwrap();
        assert_eq!(divided_difference(&abs3, &[-1.0, 0.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn zeroth_order_is_value() {
        assert_eq!(divided_difference(&monomial(2), &[-4.0]).unwrap(), 16.0);
    }

    #[test]
    fn confluent_nodes_give_taylor_coefficients() {
        let f = monomial(5);
        // f^{[k]}(a, …, a) = f^{(k)}(a)/k!
        let a: f64 = 1.3;
        let expect2 = 20.0 * a.powi(3) / 2.0;
        let expect3 = 60.0 * a.powi(2) / 6.0;
        assert!((divided_difference(&f, &[a, a, a]).unwrap() - expect2).abs() < 1e-12);
        assert!((divided_difference(&f, &[a, a, a, a]).unwrap() - expect3).abs() < 1e-12);
    }

    #[test]
    fn mixed_repeated_nodes_match_homogeneous_polynomial() {
        let f = monomial(5);
        for nodes in [
            [0.5, 0.5, -1.0],
            [0.5, -1.0, 0.5],
            [-1.0, 0.5, 0.5],
            [2.0, 2.0, 2.0],
        ] {
            let got = divided_difference(&f, &nodes).unwrap();
            let want = complete_homogeneous(3, &nodes);
            assert!((got - want).abs() < 1e-12, "{nodes:?}: {got} vs {want}");
        }
        let got = divided_difference(&f, &[0.3, 0.3, -0.7, -0.7]).unwrap();
        assert!((got - complete_homogeneous(2, &[0.3, 0.3, -0.7, -0.7])).abs() < 1e-12);
    }

    #[test]
    fn repeated_nodes_need_derivatives() {
        let abs1 = SymbolFunction::abs_pow(1.0).unwrap();
        assert!(matches!(
            divided_difference(&abs1, &[0.5, 0.5]),
            Err(Error::OrderInsufficient { .. })
        ));
        // distinct nodes never touch the derivative oracle
        assert!((divided_difference(&abs1, &[-1.0, 1.0]).unwrap()).abs() < 1e-15);
        let abs25 = SymbolFunction::abs_pow(2.5).unwrap();
        assert!(divided_difference(&abs25, &[0.1, 0.1, 0.1]).is_ok());
        assert!(divided_difference(&abs25, &[0.1, 0.1, 0.1, 0.1]).is_err());
        assert!(divided_difference(&abs25, &[]).is_err());
        assert!(divided_difference(&abs25, &[f64::NAN]).is_err());
    }

    #[test]
    fn near_coincident_nodes_are_snapped() {
        let f = monomial(3);
        let d = divided_difference(&f, &[1.0, 1.0 + 1e-13]).unwrap();
        assert_eq!(d, 3.0);
    }

    #[test]
    fn confluent_limit() {
        let f = SymbolFunction::abs_pow(2.5).unwrap();
        for a in [-2.0, -0.3, 0.7, 1.9] {
            let h = 1e-6;
            let d = divided_difference(&f, &[a, a + h]).unwrap();
            let fp = f.derivative(1, a).unwrap();
            assert!((d - fp).abs() <= 1e-5 * (1.0 + fp.abs()));
        }
    }

    #[test]
    fn custom_symbol_respects_order() {
        let f = SymbolFunction::custom(1, |_, x| x.exp());
        assert!((divided_difference(&f, &[0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(divided_difference(&f, &[0.0, 0.0, 0.0]).is_err());
    }

    // Difference quotients lose ~eps/gap^k; the properties are checked on separated nodes.
    fn separated(nodes: &[f64], gap: f64) -> bool {
        nodes
            .iter()
            .enumerate()
            .all(|(i, x)| nodes[..i].iter().all(|y| (x - y).abs() > gap))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn permutation_symmetry(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
            prop_assume!(separated(&[a, b, c], 1e-2));
            let f = monomial(4);
            let base = divided_difference(&f, &[a, b, c]).unwrap();
            for perm in [[a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                let v = divided_difference(&f, &perm).unwrap();
                prop_assert!((v - base).abs() <= 1e-9 * (1.0 + base.abs()), "{perm:?}: {v} vs {base}");
            }
        }

        #[test]
        fn polynomial_exactness(n in 0usize..=5, seed_nodes in prop::collection::vec(-2.0f64..2.0, 7)) {
            prop_assume!(separated(&seed_nodes[..=n + 1], 5e-2));
            let f = monomial(n);
            let top = divided_difference(&f, &seed_nodes[..=n]).unwrap();
            let next = divided_difference(&f, &seed_nodes[..=n + 1]).unwrap();
            prop_assert!((top - 1.0).abs() <= 1e-9);
            prop_assert!(next.abs() <= 1e-9);
        }

        #[test]
        fn second_order_monomial_identity(d in 2usize..=5, a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
            prop_assume!(separated(&[a, b, c], 1e-2));
            let got = divided_difference(&monomial(d), &[a, b, c]).unwrap();
            let want = complete_homogeneous(d - 2, &[a, b, c]);
            prop_assert!((got - want).abs() <= 1e-8 * (1.0 + want.abs()));
        }
    }
}
