//! The built-in simplicial spaces and their instantiation over a complex.

use std::collections::HashMap;
use std::fmt;

use super::forms::{BarycentricForm, Term};
use super::{SimplicialComplex, SimplicialMap};
use crate::error::{Error, Result};
use crate::funcspace::FunctionSpace;
use crate::linalg::{rat, RatMatrix, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SimplicialSpace {
    /// `𝒫_r`, scalar polynomials of degree at most `r`.
    Lagrange { r: u32 },
    /// `𝒫_rΛ^k`, `k`-forms with polynomial coefficients of degree at most `r`.
    PolyForms { r: u32, k: usize },
    /// `𝒫₁⁻Λ^k`, spanned by the Whitney forms.
    Whitney { k: usize },
}

impl SimplicialSpace {
    pub fn form_degree(&self) -> usize {
        match *self {
            SimplicialSpace::Lagrange { .. } => 0,
            SimplicialSpace::PolyForms { k, .. } | SimplicialSpace::Whitney { k } => k,
        }
    }

    /// Basis forms on the `d`-simplex, labelled in local vertex indices.
    pub fn basis_forms(&self, d: usize) -> Vec<BarycentricForm> {
        match *self {
            SimplicialSpace::Lagrange { r } => homogeneous_exponents(d, r)
                .into_iter()
                .map(|e| BarycentricForm::monomial(d, rat(1), &e, &[]).expect("valid term"))
                .collect(),
            SimplicialSpace::PolyForms { r, k } => {
                let wedges = subsets_of(&(1..=d).collect::<Vec<_>>(), k);
                let mut out = Vec::new();
                for e in homogeneous_exponents(d, r) {
                    for w in &wedges {
                        out.push(BarycentricForm::monomial(d, rat(1), &e, w).expect("valid term"));
                    }
                }
                out
            }
            SimplicialSpace::Whitney { k } => subsets_of(&(0..=d).collect::<Vec<_>>(), k + 1)
                .into_iter()
                .map(|sigma| whitney_form(d, &sigma))
                .collect(),
        }
    }

    /// Basis labels on the face with the given global vertices.
    pub fn basis_labels(&self, face: &[usize]) -> Vec<String> {
        let d = face.len() - 1;
        let mono = |e: &[u32]| -> String {
            let parts: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| {
                    if a == 1 {
                        format!("λ{}", face[i])
                    } else {
                        format!("λ{}^{a}", face[i])
                    }
                })
                .collect();
            if parts.is_empty() {
                "1".into()
            } else {
                parts.join("")
            }
        };
        match *self {
            SimplicialSpace::Lagrange { r } => {
                homogeneous_exponents(d, r).iter().map(|e| mono(e)).collect()
            }
            SimplicialSpace::PolyForms { r, k } => {
                let wedges = subsets_of(&(1..=d).collect::<Vec<_>>(), k);
                let mut out = Vec::new();
                for e in homogeneous_exponents(d, r) {
                    for w in &wedges {
                        let dl: Vec<String> = w.iter().map(|&i| format!("dλ{}", face[i])).collect();
                        if dl.is_empty() {
                            out.push(mono(&e));
                        } else {
                            out.push(format!("{} {}", mono(&e), dl.join("∧")));
                        }
                    }
                }
                out
            }
            SimplicialSpace::Whitney { k } => subsets_of(&(0..=d).collect::<Vec<_>>(), k + 1)
                .into_iter()
                .map(|s| {
                    let v: Vec<String> = s.iter().map(|&i| face[i].to_string()).collect();
                    format!("φ({})", v.join(","))
                })
                .collect(),
        }
    }

    /// `dim ℱ(T^d)` by closed formula.
    pub fn dim_on(&self, d: usize) -> usize {
        match *self {
            SimplicialSpace::Lagrange { r } => binomial(d + r as usize, d),
            SimplicialSpace::PolyForms { r, k } => binomial(d + r as usize, d) * binomial(d, k),
            SimplicialSpace::Whitney { k } => binomial(d + 1, k + 1),
        }
    }

    /// Parses `lagrange:<r>`, `plambda:<r>:<k>`, `p0lambda:<k>` or
    /// `whitney:<k>`.
    pub fn parse(text: &str) -> Option<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            ["lagrange", r] => Some(SimplicialSpace::Lagrange { r: r.parse().ok()? }),
            ["plambda", r, k] => Some(SimplicialSpace::PolyForms {
                r: r.parse().ok()?,
                k: k.parse().ok()?,
            }),
            ["p0lambda", k] => Some(SimplicialSpace::PolyForms {
                r: 0,
                k: k.parse().ok()?,
            }),
            ["whitney", k] => Some(SimplicialSpace::Whitney { k: k.parse().ok()? }),
            _ => None,
        }
    }
}

impl fmt::Display for SimplicialSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SimplicialSpace::Lagrange { r } => write!(f, "lagrange:{r}"),
            SimplicialSpace::PolyForms { r, k } => write!(f, "plambda:{r}:{k}"),
            SimplicialSpace::Whitney { k } => write!(f, "whitney:{k}"),
        }
    }
}

/// `φ_σ = Σ_i (−1)^i λ_{σ_i} dλ_{σ∖σ_i}`.
fn whitney_form(d: usize, sigma: &[usize]) -> BarycentricForm {
    let mut out = BarycentricForm::zero(d);
    for (i, &s) in sigma.iter().enumerate() {
        let mut e = vec![0; d + 1];
        e[s] = 1;
        let rest: Vec<usize> = sigma.iter().copied().filter(|&x| x != s).collect();
        let sign = if i % 2 == 0 { rat(1) } else { rat(-1) };
        out = &out + &BarycentricForm::monomial(d, sign, &e, &rest).expect("valid term");
    }
    out
}

/// Exponent vectors of length `d + 1` summing to `r`, largest first.
fn homogeneous_exponents(d: usize, r: u32) -> Vec<Vec<u32>> {
    fn rec(slots: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=left).rev() {
            prefix.push(a);
            rec(slots - 1, left - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d + 1, r, &mut Vec::new(), &mut out);
    out
}

fn subsets_of(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if items.len() < size {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in subsets_of(&items[i + 1..], size - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// A space's basis on one simplex, with the data needed to read off
/// coordinates of arbitrary forms.
#[derive(Clone, Debug)]
pub struct FormBasis {
    d: usize,
    forms: Vec<BarycentricForm>,
    keys: HashMap<Term, usize>,
    /// Canonical coefficients of each basis form, one column per form.
    matrix: RatMatrix,
    left_inverse: RatMatrix,
}

impl FormBasis {
    pub fn new(space: SimplicialSpace, d: usize) -> Self {
        let forms = space.basis_forms(d);
        let canonical: Vec<BarycentricForm> = forms.iter().map(BarycentricForm::canonical).collect();
        let mut keys: HashMap<Term, usize> = HashMap::new();
        for f in &canonical {
            for (t, _) in f.terms() {
                let next = keys.len();
                keys.entry(t.clone()).or_insert(next);
            }
        }
        let mut matrix = RatMatrix::zeros(keys.len(), forms.len());
        for (j, f) in canonical.iter().enumerate() {
            for (t, c) in f.terms() {
                matrix.set(keys[t], j, c.clone());
            }
        }
        let gram = &matrix.transpose() * &matrix;
        let left_inverse = &gram
            .inverse()
            .expect("basis forms are linearly independent")
            * &matrix.transpose();
        FormBasis {
            d,
            forms,
            keys,
            matrix,
            left_inverse,
        }
    }

    pub fn simplex_dim(&self) -> usize {
        self.d
    }

    pub fn forms(&self) -> &[BarycentricForm] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    /// Coordinates of `form` in this basis.
    pub fn coordinates(&self, form: &BarycentricForm) -> Result<Vec<Rational>> {
        if form.simplex_dim() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "form on a {}-simplex read in a basis on a {}-simplex",
                form.simplex_dim(),
                self.d
            )));
        }
        let mut v = vec![rat(0); self.keys.len()];
        for (t, c) in form.canonical().terms() {
            let &row = self.keys.get(t).ok_or(Error::NotInSpace)?;
            v[row] = c.clone();
        }
        let x = self.left_inverse.mul_vec(&v);
        if self.matrix.mul_vec(&x) != v {
            return Err(Error::NotInSpace);
        }
        Ok(x)
    }

    /// The form with the given coordinates.
    pub fn combine(&self, coefficients: &[Rational]) -> BarycentricForm {
        self.forms
            .iter()
            .zip(coefficients)
            .fold(BarycentricForm::zero(self.d), |acc, (f, c)| &acc + &f.scale(c))
    }
}

/// Per-space caches of bases and pullback matrices.
#[derive(Debug)]
pub(crate) struct Tables {
    space: SimplicialSpace,
    bases: HashMap<usize, FormBasis>,
    pullbacks: HashMap<SimplicialMap, RatMatrix>,
}

impl Tables {
    pub fn new(space: SimplicialSpace) -> Self {
        Tables {
            space,
            bases: HashMap::new(),
            pullbacks: HashMap::new(),
        }
    }

    pub fn basis(&mut self, d: usize) -> &FormBasis {
        let space = self.space;
        self.bases.entry(d).or_insert_with(|| FormBasis::new(space, d))
    }

    /// `Φ*` in coordinates: `dim ℱ(domain) × dim ℱ(codomain)`.
    pub fn pullback(&mut self, map: &SimplicialMap) -> RatMatrix {
        if let Some(m) = self.pullbacks.get(map) {
            return m.clone();
        }
        let sources = self.basis(map.codomain_dim()).forms().to_vec();
        let target = self.basis(map.domain_dim()).clone();
        let columns: Vec<Vec<Rational>> = sources
            .iter()
            .map(|f| {
                let pulled = f.pullback(map).expect("dimensions agree by construction");
                target
                    .coordinates(&pulled)
                    .expect("the built-in spaces are closed under vertex-map pullback")
            })
            .collect();
        let m = RatMatrix::from_columns(target.len(), &columns);
        self.pullbacks.insert(map.clone(), m.clone());
        m
    }
}

/// `Φ*: ℱ(codomain) → ℱ(domain)` in the bases of `space`.
pub fn pullback_matrix(space: SimplicialSpace, map: &SimplicialMap) -> RatMatrix {
    Tables::new(space).pullback(map)
}

/// The space over every face of `complex`, with traces given by pullback
/// along face inclusions.
pub fn instantiate(space: SimplicialSpace, complex: &SimplicialComplex) -> FunctionSpace {
    instantiate_with(&mut Tables::new(space), complex)
}

pub(crate) fn instantiate_with(tables: &mut Tables, complex: &SimplicialComplex) -> FunctionSpace {
    let dims: Vec<usize> = complex
        .faces()
        .iter()
        .map(|f| tables.basis(f.len() - 1).len())
        .collect();
    let mut traces = Vec::new();
    for (k, f) in complex.poset().covers() {
        let inc = SimplicialMap::face_inclusion(complex.face(k), complex.face(f))
            .expect("cover pairs are face inclusions");
        traces.push(((k, f), tables.pullback(&inc)));
    }
    let labels = complex
        .faces()
        .iter()
        .map(|f| tables.space.basis_labels(f))
        .collect();
    FunctionSpace::new(complex.poset().clone(), dims, traces)
        .and_then(|s| s.with_labels(labels))
        .expect("pullback traces have consistent shapes")
}
