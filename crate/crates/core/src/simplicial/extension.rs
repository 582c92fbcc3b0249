//! Simplicial extension operators `E_m : ℱ̊(T^m) → ℱ(Q^{m+1})` and their
//! relation to extension families on a complex.
//!
//! `E_m` is a `dim ℱ(Q^{m+1}) × dim ℱ̊(T^m)` matrix against the canonical
//! vanishing-trace basis of `T^m`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use super::spaces::{instantiate_with, Tables};
use super::{collapse_map, SimplicialComplex, SimplicialMap, SimplicialSpace, StandardSimplexPair};
use crate::error::{Error, Result};
use crate::extension::ExtensionFamily;
use crate::linalg::{RatMatrix, Rational, Solution};
use crate::poset::Elem;
use crate::Verdict;

/// Canonical basis of `ℱ̊(T^m)`, in the coordinates of `ℱ(T^m)`.
pub fn simplex_vanishing_basis(space: SimplicialSpace, m: usize) -> RatMatrix {
    let t = SimplicialComplex::simplex(m);
    let top = t.faces().len() - 1;
    super::instantiate(space, &t).vanishing_trace(top).basis
}

/// A failed condition of a simplicial extension operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimpextViolation {
    /// Shape differs from `dim ℱ(Q^{m+1}) × dim ℱ̊(T^m)`.
    Shape {
        got: (usize, usize),
        expected: (usize, usize),
    },
    /// `tr_{T^m} E_m` is not the inclusion.
    NotInclusion,
    /// `tr_S E_m ≠ 0` for a face `S` (local vertices of `Q^{m+1}`) not
    /// containing `T^m`.
    NonzeroTrace { face: Vec<usize> },
}

struct Reference {
    q: SimplicialComplex,
    space: crate::funcspace::FunctionSpace,
    t: Elem,
    top: Elem,
    vanishing: RatMatrix,
}

fn reference(space: SimplicialSpace, m: usize) -> Reference {
    let pair = StandardSimplexPair::new(m);
    let q = pair.q_complex();
    let fs = super::instantiate(space, &q);
    let t = q.face_index(&pair.t_face()).expect("T^m is a face of Q^{m+1}");
    let top = q.faces().len() - 1;
    let vanishing = fs.vanishing_trace(t).basis;
    Reference {
        q,
        space: fs,
        t,
        top,
        vanishing,
    }
}

/// Checks both defining conditions of a simplicial extension operator.
pub fn check_simpext(space: SimplicialSpace, m: usize, em: &RatMatrix) -> Verdict<SimpextViolation> {
    let r = reference(space, m);
    let expected = (r.space.dim(r.top), r.vanishing.cols());
    if em.shape() != expected {
        return Verdict::Violations(vec![SimpextViolation::Shape {
            got: em.shape(),
            expected,
        }]);
    }
    let mut violations = Vec::new();
    if r.space.trace(r.t, r.top) * em != r.vanishing {
        violations.push(SimpextViolation::NotInclusion);
    }
    for s in 0..r.q.faces().len() {
        if s == r.t || s == r.top {
            continue;
        }
        if !(r.space.trace(s, r.top) * em).is_zero() {
            violations.push(SimpextViolation::NonzeroTrace {
                face: r.q.face(s).to_vec(),
            });
        }
    }
    Verdict::from_violations(violations)
}

/// The operator that reads each homogeneous representative on `T^m` as the
/// same expression on `Q^{m+1}`, certified against both conditions.
pub fn homogeneous_extension(space: SimplicialSpace, m: usize) -> Result<RatMatrix> {
    let mut tables = Tables::new(space);
    let t_forms = tables.basis(m).forms().to_vec();
    let q_basis = tables.basis(m + 1).clone();
    let columns = t_forms
        .iter()
        .map(|f| q_basis.coordinates(&f.reinterpret(m + 1)?))
        .collect::<Result<Vec<Vec<Rational>>>>()?;
    let lift = RatMatrix::from_columns(q_basis.len(), &columns);
    let em = &lift * &simplex_vanishing_basis(space, m);
    match check_simpext(space, m, &em) {
        Verdict::Valid => Ok(em),
        Verdict::Violations(v) => Err(Error::CertificateFailed(format!(
            "{space} in dimension {m}: {v:?}"
        ))),
    }
}

/// Bubble extension for `𝒫_r`: the homogeneous degree-`r` representative of
/// a vanishing-trace function, read on `Q^{m+1}`.
pub fn bubble_extension(r: u32, m: usize) -> Result<RatMatrix> {
    homogeneous_extension(SimplicialSpace::Lagrange { r }, m)
}

/// Whitney extension for `𝒫₁⁻Λ^k`: `φ_{0…m} ↦ φ_{0…m}` when `k = m`, the
/// empty operator otherwise.
pub fn whitney_extension(k: usize, m: usize) -> Result<RatMatrix> {
    homogeneous_extension(SimplicialSpace::Whitney { k }, m)
}

/// Whether every homogeneous representative in `ℱ̊(T^m)` for `𝒫_r` is
/// divisible by `λ_0 ⋯ λ_m`, checked monomial by monomial.
pub fn bubble_factorizes(r: u32, m: usize) -> bool {
    let space = SimplicialSpace::Lagrange { r };
    let forms = space.basis_forms(m);
    let v = simplex_vanishing_basis(space, m);
    let divisible = v.columns().all(|col| {
        col.iter().zip(&forms).all(|(c, f)| {
            c.is_zero() || f.terms().all(|(t, _)| t.exponents.iter().all(|&a| a >= 1))
        })
    });
    divisible
}

/// Outcome of searching for a simplicial extension operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimpextSolution {
    Feasible(RatMatrix),
    /// `yᵀ M = 0` and `yᵀ B ≠ 0` for the stacked system `M X = B`.
    Infeasible {
        certificate: Vec<Rational>,
        system: RatMatrix,
        rhs: RatMatrix,
    },
}

impl SimpextSolution {
    /// Re-checks the infeasibility certificate exactly; `true` for feasible
    /// outcomes.
    pub fn certificate_holds(&self) -> bool {
        match self {
            SimpextSolution::Feasible(_) => true,
            SimpextSolution::Infeasible {
                certificate,
                system,
                rhs,
            } => {
                let y = RatMatrix::from_columns(certificate.len(), std::slice::from_ref(certificate)).transpose();
                (&y * system).is_zero() && !(&y * rhs).is_zero()
            }
        }
    }
}

/// Solves the linear system `tr_{T^m} X = inclusion`, `tr_S X = 0` for every
/// other proper face `S` of `Q^{m+1}`.
pub fn solve_simpext(space: SimplicialSpace, m: usize) -> Result<SimpextSolution> {
    let r = reference(space, m);
    let mut rows = vec![r.space.trace(r.t, r.top).clone()];
    let mut rhs = vec![r.vanishing.clone()];
    for s in 0..r.q.faces().len() {
        if s == r.t || s == r.top {
            continue;
        }
        rows.push(r.space.trace(s, r.top).clone());
        rhs.push(RatMatrix::zeros(r.space.dim(s), r.vanishing.cols()));
    }
    let system = RatMatrix::vstack(r.space.dim(r.top), &rows.iter().collect::<Vec<_>>())?;
    let rhs = RatMatrix::vstack(r.vanishing.cols(), &rhs.iter().collect::<Vec<_>>())?;
    Ok(match system.solve(&rhs)? {
        Solution::Solution(x) => SimpextSolution::Feasible(x),
        Solution::Infeasible(certificate) => SimpextSolution::Infeasible {
            certificate,
            system,
            rhs,
        },
    })
}

/// The consistent family of the theorem: `E_K^F = (Φ_K^F)* E_m (Ψ_K^K)*⁻¹`
/// for faces of dimension `m` below the complex dimension, extension by zero
/// for faces of top dimension.
///
/// `ems[m]` may be omitted when `ℱ̊(T^m) = 0`.
pub fn local_ops_from_simplicial(
    complex: &SimplicialComplex,
    space: SimplicialSpace,
    ems: &BTreeMap<usize, RatMatrix>,
) -> Result<ExtensionFamily> {
    let mut tables = Tables::new(space);
    let fs = Arc::new(instantiate_with(&mut tables, complex));
    let Some(n) = complex.dim() else {
        return ExtensionFamily::new(fs, Vec::new());
    };
    let p = fs.poset();
    let vanishing: Vec<RatMatrix> = p.elements().map(|e| fs.vanishing_trace(e).basis).collect();
    let mut reference_vanishing: BTreeMap<usize, RatMatrix> = BTreeMap::new();
    let mut ops = Vec::new();
    for k in p.elements() {
        let m = complex.face_dim(k);
        if m == n {
            ops.push(((k, k), vanishing[k].clone()));
            continue;
        }
        let v_t = reference_vanishing
            .entry(m)
            .or_insert_with(|| simplex_vanishing_basis(space, m))
            .clone();
        let expected = (tables.basis(m + 1).len(), v_t.cols());
        let em = match ems.get(&m) {
            Some(em) if em.shape() == expected => em.clone(),
            Some(em) => {
                return Err(Error::DimensionMismatch(format!(
                    "E_{m} has shape {:?}, expected {expected:?}",
                    em.shape()
                )))
            }
            None if v_t.cols() == 0 => RatMatrix::zeros(expected.0, 0),
            None => return Err(Error::MissingEm(m)),
        };
        let face = complex.face(k).to_vec();
        let x = psi_coordinates(&mut tables, &v_t, &vanishing[k], m)?;
        let x_inv = x.inverse().ok_or(Error::NotInSpace)?;
        let em_k = &em * &x_inv;
        let phi = collapse_map(complex, &face)?;
        for f in p.elements() {
            let pull = tables.pullback(&phi.restricted(complex.face(f)));
            ops.push(((k, f), &pull * &em_k));
        }
    }
    ExtensionFamily::new(fs, ops)
}

/// Coordinates `X` of `(Ψ_K^K)*` between the vanishing-trace bases:
/// `(Ψ_K^K)* V_T = V_K X`.
fn psi_coordinates(
    tables: &mut Tables,
    v_t: &RatMatrix,
    v_k: &RatMatrix,
    m: usize,
) -> Result<RatMatrix> {
    let psi = tables.pullback(&SimplicialMap::identity(m));
    match v_k.solve(&(&psi * v_t))? {
        Solution::Solution(x) => Ok(x),
        Solution::Infeasible(_) => Err(Error::NotInSpace),
    }
}

/// Recovers `E_m = ((Φ_K^T)*)⁻¹ E_K^T (Ψ_K^K)*` from a family on `complex`,
/// using the first `(m+1)`-face `T` and its first `m`-subface `K`.
pub fn simplicial_from_local(
    complex: &SimplicialComplex,
    space: SimplicialSpace,
    family: &ExtensionFamily,
    m: usize,
) -> Result<RatMatrix> {
    let no_pair = || Error::NoSuitableFacePair(m + 1, m);
    let t = complex.faces_of_dim(m + 1).next().ok_or_else(no_pair)?;
    let k = complex
        .faces_of_dim(m)
        .find(|&k| complex.poset().leq(k, t))
        .ok_or_else(no_pair)?;
    if family.space().poset().len() != complex.faces().len() {
        return Err(Error::DimensionMismatch(
            "family does not live on this complex".into(),
        ));
    }
    let mut tables = Tables::new(space);
    let phi = collapse_map(complex, complex.face(k))?;
    let pull = tables.pullback(&phi.restricted(complex.face(t)));
    let pull_inv = pull.inverse().ok_or_else(|| {
        Error::CertificateFailed("collapse onto Q^{m+1} is not invertible".into())
    })?;
    let v_t = simplex_vanishing_basis(space, m);
    let x = psi_coordinates(&mut tables, &v_t, family.vanishing_basis(k), m)?;
    let em = &(&pull_inv * family.op(k, t).as_ref()) * &x;
    match check_simpext(space, m, &em) {
        Verdict::Valid => Ok(em),
        Verdict::Violations(v) => Err(Error::CertificateFailed(format!(
            "recovered E_{m} for {space}: {v:?}"
        ))),
    }
}
