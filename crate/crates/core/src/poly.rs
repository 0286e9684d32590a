//! Sparse multivariate polynomials over `f64`.
//!
//! Coefficient arithmetic is floating point, but the operations used by the
//! exact backend (derivatives, products of small-integer data such as
//! structure constants) cancel exactly, so identities like `d∘d = 0` and the
//! Jacobi identity of a Lie–Poisson structure hold coefficient-wise.

use std::collections::BTreeMap;

/// Exponent multi-index; length equals the number of variables.
pub type MultiIndex = Vec<u16>;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    num_vars: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: f64) -> Self {
        let mut p = Self::zero(num_vars);
        if c != 0.0 {
            p.terms.insert(vec![0; num_vars], c);
        }
        p
    }

    /// The coordinate variable `x_i`.
    pub fn var(num_vars: usize, i: usize) -> Self {
        assert!(i < num_vars);
        let mut exps = vec![0u16; num_vars];
        exps[i] = 1;
        let mut p = Self::zero(num_vars);
        p.terms.insert(exps, 1.0);
        p
    }

    /// Monomial `c * x^exps`.
    pub fn monomial(num_vars: usize, exps: &[u16], c: f64) -> Self {
        assert_eq!(exps.len(), num_vars);
        let mut p = Self::zero(num_vars);
        if c != 0.0 {
            p.terms.insert(exps.to_vec(), c);
        }
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &f64)> {
        self.terms.iter()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn insert(&mut self, exps: MultiIndex, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get() + c;
                if v == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.num_vars, other.num_vars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        let mut out = Self::zero(self.num_vars);
        if s == 0.0 {
            return out;
        }
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.num_vars, other.num_vars);
        let mut out = Self::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: MultiIndex = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(exps, ca * cb);
            }
        }
        out
    }

    /// Partial derivative with respect to `x_i`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        assert!(i < self.num_vars);
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut exps = e.clone();
            let k = exps[i] as f64;
            exps[i] -= 1;
            out.insert(exps, c * k);
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.num_vars);
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (xi, &k) in x.iter().zip(e.iter()) {
                for _ in 0..k {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }

    /// Re-index into a larger variable space, mapping `x_i ↦ x_{i+offset}`.
    pub fn embed(&self, new_num_vars: usize, offset: usize) -> Polynomial {
        assert!(self.num_vars + offset <= new_num_vars);
        let mut out = Self::zero(new_num_vars);
        for (e, c) in &self.terms {
            let mut exps = vec![0u16; new_num_vars];
            exps[offset..offset + self.num_vars].copy_from_slice(e);
            out.terms.insert(exps, *c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_eval() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        // (x + 2y)^2 = x^2 + 4xy + 4y^2
        let p = x.add(&y.scale(2.0));
        let sq = p.mul(&p);
        assert_eq!(sq.eval(&[1.0, 2.0]), 25.0);
        assert_eq!(sq.derivative(0).eval(&[1.0, 2.0]), 2.0 * 5.0);
    }

    #[test]
    fn cancellation_is_exact() {
        let x = Polynomial::var(1, 0);
        let p = x.mul(&x).sub(&x.mul(&x));
        assert!(p.is_zero());
    }

    #[test]
    fn mixed_partials_commute_exactly() {
        let x = Polynomial::var(3, 0);
        let y = Polynomial::var(3, 1);
        let z = Polynomial::var(3, 2);
        let p = x.mul(&y).mul(&z).add(&x.mul(&x).mul(&y)).scale(3.5);
        let a = p.derivative(0).derivative(1);
        let b = p.derivative(1).derivative(0);
        assert!(a.sub(&b).is_zero());
    }

    #[test]
    fn embed_shifts_variables() {
        let x = Polynomial::var(1, 0);
        let p = x.embed(3, 2);
        assert_eq!(p.eval(&[0.0, 0.0, 4.0]), 4.0);
    }
}
