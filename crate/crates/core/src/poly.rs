//! Exact sparse multivariate polynomials over `f64`.
//!
//! Backing store is a `BTreeMap` from exponent vector to coefficient, so
//! iteration order — and therefore every evaluation's summation order — is
//! deterministic. Coefficient arithmetic is ordinary `f64`, but terms that
//! cancel to exactly 0.0 are pruned, which keeps Lie-derivative towers of
//! the catalogue systems exact: their coefficients are small dyadic-ish
//! rationals and the products stay well inside the 53-bit mantissa.
//!
//! Used by the observability and parity diagnostics, which need analytic
//! derivatives that finite differencing cannot deliver at depth.

use std::collections::BTreeMap;

/// A polynomial in `nvars` variables: monomial exponents → coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        if c != 0.0 {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    /// The variable `x_i` as a polynomial.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut exp = vec![0u32; nvars];
        exp[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(exp, 1.0);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of monomials with nonzero coefficient.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = self.terms.clone();
        for (exp, &c) in &other.terms {
            let entry = terms.entry(exp.clone()).or_insert(0.0);
            *entry += c;
            if *entry == 0.0 {
                terms.remove(exp);
            }
        }
        Poly { nvars: self.nvars, terms }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut terms: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let entry = terms.entry(exp.clone()).or_insert(0.0);
                *entry += ca * cb;
                if *entry == 0.0 {
                    terms.remove(&exp);
                }
            }
        }
        Poly { nvars: self.nvars, terms }
    }

    pub fn scale(&self, c: f64) -> Poly {
        if c == 0.0 {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, &v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Partial derivative with respect to `x_i`.
    pub fn diff(&self, i: usize) -> Poly {
        assert!(i < self.nvars);
        let mut terms = BTreeMap::new();
        for (exp, &c) in &self.terms {
            if exp[i] > 0 {
                let mut e2 = exp.clone();
                e2[i] -= 1;
                let coeff = c * f64::from(exp[i]);
                let entry = terms.entry(e2.clone()).or_insert(0.0);
                *entry += coeff;
                if *entry == 0.0 {
                    terms.remove(&e2);
                }
            }
        }
        Poly { nvars: self.nvars, terms }
    }

    /// Evaluate at a point; terms are summed in fixed BTreeMap order.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars);
        let mut total = 0.0;
        for (exp, &c) in &self.terms {
            let mut term = c;
            for (e, &xi) in exp.iter().zip(x) {
                if *e > 0 {
                    term *= xi.powi(*e as i32);
                }
            }
            total += term;
        }
        total
    }

    /// Lie derivative along a polynomial vector field:
    /// `L_f self = Σ_k (∂ self/∂x_k) · f_k`.
    pub fn lie_derivative(&self, field: &[Poly]) -> Poly {
        assert_eq!(field.len(), self.nvars);
        let mut out = Poly::zero(self.nvars);
        for (k, fk) in field.iter().enumerate() {
            out = out.add(&self.diff(k).mul(fk));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    #[test]
    fn arithmetic_matches_hand_expansion() {
        // (x + y)^2 = x^2 + 2xy + y^2
        let s = x(0).add(&x(1));
        let sq = s.mul(&s);
        assert_eq!(sq.eval(&[2.0, 3.0, 0.0]), 25.0);
        assert_eq!(sq.term_count(), 3);
    }

    #[test]
    fn cancellation_prunes_exactly() {
        let p = x(0).mul(&x(1));
        let q = p.sub(&p);
        assert!(q.is_zero());
    }

    #[test]
    fn derivative_of_power() {
        // d/dx x^3 = 3x^2
        let cube = x(0).mul(&x(0)).mul(&x(0));
        let d = cube.diff(0);
        assert_eq!(d.eval(&[2.0, 0.0, 0.0]), 12.0);
    }

    #[test]
    fn lie_derivative_is_chain_rule() {
        // h = z, field = (y, -x, x*y): L_f h = x*y
        let field = [x(1), x(0).scale(-1.0), x(0).mul(&x(1))];
        let h = x(2);
        let lh = h.lie_derivative(&field);
        assert_eq!(lh.eval(&[3.0, 5.0, 0.0]), 15.0);
        // second derivative: L_f(xy) = y*y - x*x
        let l2 = lh.lie_derivative(&field);
        assert_eq!(l2.eval(&[3.0, 5.0, 0.0]), 25.0 - 9.0);
    }

    #[test]
    fn eval_order_is_deterministic() {
        let p = x(0).add(&x(1)).add(&x(2)).mul(&x(0).sub(&x(2)));
        let v1 = p.eval(&[0.1, 0.2, 0.3]);
        let v2 = p.eval(&[0.1, 0.2, 0.3]);
        assert_eq!(v1.to_bits(), v2.to_bits());
    }
}
