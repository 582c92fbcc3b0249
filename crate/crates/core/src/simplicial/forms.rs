//! Polynomial differential forms in barycentric coordinates.
//!
//! A form on an `n`-simplex is a sum of terms `c · λ^a · dλ_σ` over all
//! `n + 1` barycentric symbols, with `σ` strictly increasing. The redundant
//! representation is what makes vertex-map pullbacks simple; equality is
//! decided on the canonical form, which eliminates `λ_n` and `dλ_n`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{rat, Rational};

/// Exponents of `λ_0 … λ_n` together with the wedge indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub wedge: Vec<usize>,
}

impl Term {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct BarycentricForm {
    n: usize,
    /// Nonzero coefficients only.
    terms: BTreeMap<Term, Rational>,
}

/// `λ_w ↦ constant + Σ a_v λ_v` and `dλ_w ↦ Σ a_v dλ_v`.
#[derive(Clone, Debug)]
pub(crate) struct AffineRule {
    pub constant: Rational,
    pub linear: Vec<(usize, Rational)>,
}

impl BarycentricForm {
    pub fn zero(n: usize) -> Self {
        BarycentricForm {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Self::monomial(n, c, &vec![0; n + 1], &[])
            .expect("the constant term is well formed")
    }

    /// `c · Π λ_i^{a_i} · dλ_{wedge}`. Wedge indices may be in any order; the
    /// sign of the sorting permutation is applied and repeated indices give
    /// zero.
    pub fn monomial(n: usize, c: Rational, exponents: &[u32], wedge: &[usize]) -> Result<Self> {
        if exponents.len() != n + 1 || wedge.iter().any(|&w| w > n) {
            return Err(Error::DimensionMismatch(format!(
                "term with {} exponents and wedge {wedge:?} on a {n}-simplex",
                exponents.len()
            )));
        }
        let mut out = Self::zero(n);
        if let Some((sign, sorted)) = sort_wedge(wedge) {
            let coefficient = if sign { -c } else { c };
            out.push(
                Term {
                    exponents: exponents.to_vec(),
                    wedge: sorted,
                },
                coefficient,
            );
        }
        Ok(out)
    }

    /// `λ_i` on an `n`-simplex.
    pub fn lambda(n: usize, i: usize) -> Self {
        let mut e = vec![0; n + 1];
        e[i] = 1;
        Self::monomial(n, rat(1), &e, &[]).expect("index within the simplex")
    }

    /// `dλ_i` on an `n`-simplex.
    pub fn dlambda(n: usize, i: usize) -> Self {
        Self::monomial(n, rat(1), &vec![0; n + 1], &[i]).expect("index within the simplex")
    }

    /// Dimension of the simplex the form lives on.
    pub fn simplex_dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Form degree of the first term, or `None` for the zero form.
    pub fn form_degree(&self) -> Option<usize> {
        self.terms.keys().next().map(|t| t.wedge.len())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.n);
        if c.is_zero() {
            return out;
        }
        for (t, v) in &self.terms {
            out.terms.insert(t.clone(), v * c);
        }
        out
    }

    /// Wedge product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut wedge = a.wedge.clone();
                wedge.extend_from_slice(&b.wedge);
                let Some((sign, sorted)) = sort_wedge(&wedge) else {
                    continue;
                };
                let exponents = a
                    .exponents
                    .iter()
                    .zip(&b.exponents)
                    .map(|(x, y)| x + y)
                    .collect();
                let c = ca * cb;
                out.push(
                    Term {
                        exponents,
                        wedge: sorted,
                    },
                    if sign { -c } else { c },
                );
            }
        }
        Ok(out)
    }

    /// Rewrites every symbol by an affine rule, landing on a `target`-simplex.
    pub(crate) fn substitute(&self, target: usize, rules: &[AffineRule]) -> Self {
        debug_assert_eq!(rules.len(), self.n + 1);
        let lambdas: Vec<Self> = rules
            .iter()
            .map(|r| {
                let mut f = Self::constant(target, r.constant.clone());
                for (v, a) in &r.linear {
                    f = &f + &Self::lambda(target, *v).scale(a);
                }
                f
            })
            .collect();
        let dlambdas: Vec<Self> = rules
            .iter()
            .map(|r| {
                r.linear.iter().fold(Self::zero(target), |acc, (v, a)| {
                    &acc + &Self::dlambda(target, *v).scale(a)
                })
            })
            .collect();
        let mut powers: Vec<Vec<Self>> = lambdas
            .iter()
            .map(|l| vec![Self::constant(target, rat(1)), l.clone()])
            .collect();
        let mut out = Self::zero(target);
        for (term, c) in &self.terms {
            let mut acc = Self::constant(target, c.clone());
            for (w, &a) in term.exponents.iter().enumerate() {
                let a = a as usize;
                while powers[w].len() <= a {
                    let next = powers[w]
                        .last()
                        .expect("powers start at one")
                        .wedge(&lambdas[w])
                        .expect("same simplex");
                    powers[w].push(next);
                }
                if a > 0 {
                    acc = acc.wedge(&powers[w][a]).expect("same simplex");
                }
            }
            for &w in &term.wedge {
                acc = acc.wedge(&dlambdas[w]).expect("same simplex");
            }
            out = &out + &acc;
        }
        out
    }

    /// The unique representative free of `λ_n` and `dλ_n`, obtained from
    /// `λ_n = 1 − Σ_{i<n} λ_i` and `dλ_n = −Σ_{i<n} dλ_i`.
    pub fn canonical(&self) -> Self {
        let n = self.n;
        let rules: Vec<AffineRule> = (0..=n)
            .map(|w| {
                if w < n {
                    AffineRule {
                        constant: rat(0),
                        linear: vec![(w, rat(1))],
                    }
                } else {
                    AffineRule {
                        constant: rat(1),
                        linear: (0..n).map(|i| (i, rat(-1))).collect(),
                    }
                }
            })
            .collect();
        self.substitute(n, &rules)
    }

    /// Equality as forms on the simplex.
    pub fn same_form(&self, other: &Self) -> bool {
        self.n == other.n && (self - other).canonical().is_zero()
    }

    /// Pullback along a vertex map from an `m`-simplex: `images[v]` is the
    /// vertex of this form's simplex that `v` is sent to.
    pub fn pullback(&self, map: &super::SimplicialMap) -> Result<Self> {
        if map.codomain_dim() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "map into a {}-simplex applied to a form on a {}-simplex",
                map.codomain_dim(),
                self.n
            )));
        }
        let mut rules: Vec<AffineRule> = (0..=self.n)
            .map(|_| AffineRule {
                constant: rat(0),
                linear: Vec::new(),
            })
            .collect();
        for (v, &w) in map.images().iter().enumerate() {
            rules[w].linear.push((v, rat(1)));
        }
        Ok(self.substitute(map.domain_dim(), &rules))
    }

    /// The same symbols read on a simplex of dimension `target ≥ n`.
    pub fn reinterpret(&self, target: usize) -> Result<Self> {
        if target < self.n {
            return Err(Error::DimensionMismatch(format!(
                "cannot read a form on a {}-simplex on a {target}-simplex",
                self.n
            )));
        }
        let mut out = Self::zero(target);
        for (t, c) in &self.terms {
            let mut exponents = t.exponents.clone();
            exponents.resize(target + 1, 0);
            out.push(
                Term {
                    exponents,
                    wedge: t.wedge.clone(),
                },
                c.clone(),
            );
        }
        Ok(out)
    }

    fn push(&mut self, term: Term, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(term) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "forms on a {}-simplex and a {}-simplex",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

/// Sorts wedge indices, returning whether the permutation was odd, or `None`
/// if an index repeats.
fn sort_wedge(wedge: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut v = wedge.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((odd, v))
    }
}

impl Add for &BarycentricForm {
    type Output = BarycentricForm;

    fn add(self, rhs: &BarycentricForm) -> BarycentricForm {
        assert_eq!(self.n, rhs.n, "forms on different simplices");
        let mut out = self.clone();
        for (t, c) in &rhs.terms {
            out.push(t.clone(), c.clone());
        }
        out
    }
}

impl Sub for &BarycentricForm {
    type Output = BarycentricForm;

    fn sub(self, rhs: &BarycentricForm) -> BarycentricForm {
        self + &-rhs
    }
}

impl Neg for &BarycentricForm {
    type Output = BarycentricForm;

    fn neg(self) -> BarycentricForm {
        self.scale(&-Rational::one())
    }
}

impl Mul for &BarycentricForm {
    type Output = BarycentricForm;

    /// Wedge product; panics on forms over different simplices.
    fn mul(self, rhs: &BarycentricForm) -> BarycentricForm {
        self.wedge(rhs).expect("forms on the same simplex")
    }
}

impl fmt::Display for BarycentricForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (v, &a) in t.exponents.iter().enumerate() {
                match a {
                    0 => {}
                    1 => write!(f, "·λ{v}")?,
                    _ => write!(f, "·λ{v}^{a}")?,
                }
            }
            if !t.wedge.is_empty() {
                let parts: Vec<String> = t.wedge.iter().map(|w| format!("dλ{w}")).collect();
                write!(f, "·{}", parts.join("∧"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BarycentricForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}-simplex] {self}", self.n)
    }
}
