//! Sparse multivariate polynomials with rational coefficients.
//!
//! Variables are addressed by index; `x1` is index 0. A monomial is an
//! exponent vector with trailing zeros stripped, so equal polynomials have
//! equal representations regardless of how many variables were declared.

use std::collections::BTreeMap;
use std::fmt;

use super::scalar::{one, Ring, Scalar};
use crate::error::{Error, Result};

pub type Monomial = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Scalar>,
}

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn mono_mul(a: &[u32], b: &[u32]) -> Monomial {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0))
        .collect();
    trim(out)
}

impl Poly {
    pub fn constant(c: Scalar) -> Self {
        let mut p = Poly::default();
        p.add_term(Vec::new(), c);
        p
    }

    /// The variable with index `i` (rendered `x{i+1}`).
    pub fn var(i: usize) -> Self {
        let mut m = vec![0; i + 1];
        m[i] = 1;
        let mut p = Poly::default();
        p.add_term(m, one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Poly::default();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Affine-linear polynomial `c0 + Σ coeffs[i]·x_i`.
    pub fn linear(c0: Scalar, coeffs: &[Scalar]) -> Self {
        let mut p = Poly::constant(c0);
        for (i, c) in coeffs.iter().enumerate() {
            p = p.add(&Poly::var(i).scale(c));
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if Ring::is_zero(&c) {
            return;
        }
        let m = trim(m);
        let entry = self.terms.entry(m.clone()).or_insert_with(Ring::zero);
        *entry = &*entry + c;
        if Ring::is_zero(entry) {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &[u32]) -> Scalar {
        self.terms.get(&trim(m.to_vec())).cloned().unwrap_or_else(Ring::zero)
    }

    /// Number of variable slots in use: one past the largest index present.
    pub fn num_vars(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Vec::is_empty)
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.is_constant() {
            Some(self.coeff(&[]))
        } else {
            None
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if Ring::is_zero(s) {
            return Poly::default();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::constant(one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = Ring::mul(&acc, &base);
            }
            base = Ring::mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        let mut acc: Scalar = Ring::zero();
        for (m, c) in &self.terms {
            if m.len() > point.len() {
                return Err(Error::MissingSubstitute(m.len() - 1));
            }
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t = &t * &point[i];
                }
            }
            acc = &acc + t;
        }
        Ok(acc)
    }

    /// Substitutes `subst[i]` for variable `i`.
    pub fn compose(&self, subst: &[Poly]) -> Result<Poly> {
        let mut acc = Poly::default();
        for (m, c) in &self.terms {
            if m.len() > subst.len() {
                return Err(Error::MissingSubstitute(m.len() - 1));
            }
            let mut t = Poly::constant(c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = Ring::mul(&t, &subst[i].pow(e));
                }
            }
            acc = Ring::add(&acc, &t);
        }
        Ok(acc)
    }

    /// Like [`Poly::compose`] but with a sparse substitution; every variable
    /// that occurs must have an entry.
    pub fn compose_map(&self, subst: &BTreeMap<usize, Poly>) -> Result<Poly> {
        let n = self.num_vars();
        let mut dense = Vec::with_capacity(n);
        for i in 0..n {
            match subst.get(&i) {
                Some(p) => dense.push(p.clone()),
                None if self.terms.keys().any(|m| m.get(i).copied().unwrap_or(0) > 0) => {
                    return Err(Error::MissingSubstitute(i))
                }
                None => dense.push(Poly::default()),
            }
        }
        self.compose(&dense)
    }

    /// Renders with the given variable names (index `i` → `names[i]`),
    /// falling back to `x{i+1}`.
    pub fn render_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        // Highest degree first, then lexicographic on exponents.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = super::scalar::is_negative(c);
            let mag = if neg { -c.clone() } else { c.clone() };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
                factors.push(if e == 1 { name } else { format!("{name}^{e}") });
            }
            let is_one = mag == one();
            if factors.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if !is_one {
                    out.push_str(&mag.to_string());
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

impl Ring for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn one() -> Self {
        Poly::constant(one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
    fn sub(&self, other: &Self) -> Self {
        Ring::add(self, &Ring::neg(other))
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = Poly::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(mono_mul(a, b), ca * cb);
            }
        }
        out
    }
    fn neg(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
    fn from_scalar(s: Scalar) -> Self {
        Poly::constant(s)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(&[]))
    }
}

/// Free-standing form of [`Poly::compose`].
pub fn poly_compose(f: &Poly, subst: &[Poly]) -> Result<Poly> {
    f.compose(subst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::int;

    fn x1() -> Poly {
        Poly::var(0)
    }

    #[test]
    fn identity_substitution() {
        assert_eq!(poly_compose(&x1(), &[x1()]).unwrap(), x1());
    }

    #[test]
    fn binomial() {
        let f = x1().pow(2);
        let g = Ring::add(&x1(), &Poly::constant(int(1)));
        let expected = Poly::from_terms([(vec![2], int(1)), (vec![1], int(2)), (vec![], int(1))]);
        assert_eq!(f.compose(&[g]).unwrap(), expected);
        assert_eq!(expected.to_string(), "x1^2 + 2*x1 + 1");
    }

    #[test]
    fn missing_substitute() {
        let f = Poly::var(1);
        assert_eq!(f.compose(&[x1()]), Err(Error::MissingSubstitute(1)));
        let mut m = BTreeMap::new();
        m.insert(1, x1());
        assert_eq!(Poly::var(0).compose_map(&m), Err(Error::MissingSubstitute(0)));
    }

    #[test]
    fn zero_coefficients_dropped() {
        let p = Ring::sub(&x1(), &x1());
        assert!(Ring::is_zero(&p));
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn render_negative_and_fraction() {
        let p = Poly::from_terms([
            (vec![1, 1], crate::exact::scalar::frac(-1, 2)),
            (vec![], int(-3)),
        ]);
        assert_eq!(p.to_string(), "-1/2*x1*x2 - 3");
    }
}
