//! Geometric decompositions of the top space and of its dual.
//!
//! Both inductions run over a space whose poset has a top element `𝒯`
//! (typically the hat space of [`FunctionSpace::with_global_top`] together
//! with [`crate::extension::extend_family_to_hat`]). Dual vectors are
//! coordinate columns against the primal basis of the relevant space.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::extension::ExtensionFamily;
use crate::funcspace::FunctionSpace;
use crate::linalg::{direct_sum_check, DirectSum, RatMatrix, Solution};
use crate::poset::{Elem, PeelDirection};
use crate::Verdict;

/// One application of the peeling lemma: `ℐ(𝔖∖{T}) = ℐ(𝔖) ⊕ E_T^𝒯 ℱ̊(T)`.
#[derive(Clone, Debug)]
pub struct StepSplit {
    pub element: Elem,
    /// Basis of `ℐ(𝔖∖{T})`.
    pub lower_basis: RatMatrix,
    /// Basis of `ℐ(𝔖)`.
    pub ideal: RatMatrix,
    /// `E_T^𝒯` on the canonical basis of `ℱ̊(T)`.
    pub block: RatMatrix,
    /// `φ − E_T^𝒯 tr_T^𝒯 φ` for each column `φ` of `lower_basis`.
    pub retained: RatMatrix,
    /// `E_T^𝒯 tr_T^𝒯 φ` for each column `φ` of `lower_basis`.
    pub extended: RatMatrix,
}

impl StepSplit {
    /// Exact check of the split: the retained parts lie in `ℐ(𝔖)`, the two
    /// parts add back up, and the dimensions of the sum are additive.
    pub fn certify(&self) -> bool {
        let n = self.lower_basis.rows();
        let rank_of = |blocks: &[&RatMatrix]| {
            RatMatrix::hstack(n, blocks).map(|m| m.rank()).unwrap_or(usize::MAX)
        };
        let ideal_rank = self.ideal.cols();
        &self.retained + &self.extended == self.lower_basis
            && rank_of(&[&self.ideal, &self.retained]) == ideal_rank
            && rank_of(&[&self.ideal, &self.block]) == ideal_rank + self.block.cols()
            && ideal_rank + self.block.cols() == self.lower_basis.cols()
    }
}

/// `ℱ(𝒯) = ⊕_F E_F^𝒯 ℱ̊(F)` with the exact blocks and a rank certificate.
#[derive(Clone, Debug)]
pub struct Decomposition {
    top: Elem,
    ambient_dim: usize,
    order: Vec<Elem>,
    blocks: BTreeMap<Elem, RatMatrix>,
    steps: Vec<StepSplit>,
    certificate: DirectSum,
}

impl Decomposition {
    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// The peel sequence the induction followed.
    pub fn order(&self) -> &[Elem] {
        &self.order
    }

    /// Elements carrying a block, in index order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        self.blocks.keys().copied()
    }

    pub fn block(&self, f: Elem) -> &RatMatrix {
        &self.blocks[&f]
    }

    pub fn blocks(&self) -> &BTreeMap<Elem, RatMatrix> {
        &self.blocks
    }

    pub fn steps(&self) -> &[StepSplit] {
        &self.steps
    }

    pub fn certificate(&self) -> &DirectSum {
        &self.certificate
    }

    pub fn is_certified(&self) -> bool {
        self.certificate.is_certified()
    }

    /// Blocks side by side in element order.
    pub fn combined(&self) -> RatMatrix {
        let refs: Vec<&RatMatrix> = self.blocks.values().collect();
        RatMatrix::hstack(self.ambient_dim, &refs).expect("blocks share the ambient dimension")
    }

    /// The coordinate projection onto the `f` block: the rows of the inverse
    /// of [`Decomposition::combined`] belonging to `f`.
    pub fn block_projection(&self, f: Elem) -> Option<RatMatrix> {
        let inverse = self.combined().inverse()?;
        let mut start = 0;
        for (&e, b) in &self.blocks {
            if e == f {
                return Some(inverse.row_range(start, start + b.cols()));
            }
            start += b.cols();
        }
        None
    }
}

fn top_of(space: &FunctionSpace) -> Result<Elem> {
    space.top().ok_or(Error::NoTopElement)
}

fn check_family(family: &ExtensionFamily) -> Result<()> {
    match family.verify()? {
        Verdict::Valid => Ok(()),
        Verdict::Violations(v) => Err(Error::InconsistentFamily(v.len())),
    }
}

/// One peeling step on the lower set `members` with maximal element `t`.
pub fn decompose_step(family: &ExtensionFamily, members: &[Elem], t: Elem) -> Result<StepSplit> {
    let space = family.space();
    let p = space.poset();
    let top = top_of(space)?;
    let set = p.lower_set(members)?;
    if !set.is_maximal(p, t) {
        return Err(Error::NotMaximal(p.name(t).to_owned()));
    }
    let ideal = space.vanishing_ideal(&set)?.basis;
    let lower_basis = space.vanishing_ideal(&set.without(t))?.basis;
    let block = family.op(t, top).into_owned();
    let traced = space.trace(t, top) * &lower_basis;
    let coefficients = match family.vanishing_basis(t).solve(&traced)? {
        Solution::Solution(c) => c,
        // traces of ℐ(𝔖∖{T}) always vanish below T
        Solution::Infeasible(_) => return Err(Error::InconsistentFamily(1)),
    };
    let extended = &block * &coefficients;
    let retained = &lower_basis - &extended;
    Ok(StepSplit {
        element: t,
        lower_basis,
        ideal,
        block,
        retained,
        extended,
    })
}

/// The geometric decomposition along the deterministic downward peel.
///
/// The family is verified first; its space must have a top element.
pub fn geometric_decomposition(family: &ExtensionFamily) -> Result<Decomposition> {
    check_family(family)?;
    let order = family.space().poset().peel_sequence(PeelDirection::Down);
    decompose_along(family, order)
}

/// [`geometric_decomposition`] along a caller-chosen downward peel.
pub fn geometric_decomposition_with_peel(
    family: &ExtensionFamily,
    order: &[Elem],
) -> Result<Decomposition> {
    check_family(family)?;
    decompose_along(family, order.to_vec())
}

pub(crate) fn decompose_along(family: &ExtensionFamily, order: Vec<Elem>) -> Result<Decomposition> {
    let space = family.space();
    let p = space.poset();
    let top = top_of(space)?;
    if order.len() != p.len() {
        return Err(Error::DimensionMismatch(format!(
            "peel of length {} for {} elements",
            order.len(),
            p.len()
        )));
    }
    let mut remaining = p.full_set();
    let mut blocks = BTreeMap::new();
    let mut steps = Vec::with_capacity(order.len());
    for &t in &order {
        let step = decompose_step(family, &remaining.to_vec(), t)?;
        remaining = remaining.without(t);
        blocks.insert(t, step.block.clone());
        steps.push(step);
    }
    let ambient_dim = space.dim(top);
    let refs: Vec<&RatMatrix> = blocks.values().collect();
    let certificate = direct_sum_check(&refs, ambient_dim)?;
    Ok(Decomposition {
        top,
        ambient_dim,
        order,
        blocks,
        steps,
        certificate,
    })
}

/// The decomposition of `ℱ(T)` over `Δ(T)`, with elements reported by their
/// indices in the full poset.
pub fn local_decomposition(family: &ExtensionFamily, t: Elem) -> Result<Decomposition> {
    if t >= family.space().poset().len() {
        return Err(Error::UnknownIdentifier(format!("#{t}")));
    }
    let (restricted, map) = family.restrict_to_down_set(t);
    check_family(&restricted)?;
    local_from_restricted(&restricted, &map)
}

/// [`local_decomposition`] for every element, trusting the family.
pub(crate) fn local_decompositions_unchecked(
    family: &ExtensionFamily,
) -> Result<BTreeMap<Elem, Decomposition>> {
    let mut out = BTreeMap::new();
    for t in family.space().poset().elements() {
        let (restricted, map) = family.restrict_to_down_set(t);
        out.insert(t, local_from_restricted(&restricted, &map)?);
    }
    Ok(out)
}

/// Local decompositions at every element.
pub fn local_decompositions(family: &ExtensionFamily) -> Result<BTreeMap<Elem, Decomposition>> {
    check_family(family)?;
    local_decompositions_unchecked(family)
}

fn local_from_restricted(restricted: &ExtensionFamily, map: &[Elem]) -> Result<Decomposition> {
    let order = restricted.space().poset().peel_sequence(PeelDirection::Down);
    let d = decompose_along(restricted, order)?;
    Ok(Decomposition {
        top: map[d.top],
        ambient_dim: d.ambient_dim,
        order: d.order.iter().map(|&e| map[e]).collect(),
        blocks: d.blocks.into_iter().map(|(e, b)| (map[e], b)).collect(),
        steps: d
            .steps
            .into_iter()
            .map(|s| StepSplit {
                element: map[s.element],
                ..s
            })
            .collect(),
        certificate: d.certificate,
    })
}

/// Dagger functionals at `f` given by Euclidean pairing with the canonical
/// basis of `ℱ̊(F)`.
pub fn dagger_euclidean(space: &FunctionSpace, f: Elem) -> RatMatrix {
    space.vanishing_trace(f).basis
}

/// Dagger functionals at `f` given by the projection onto the `ℱ̊(F)` block
/// of the local decomposition of `ℱ(F)`.
pub fn dagger_projection(
    local: &BTreeMap<Elem, Decomposition>,
    f: Elem,
) -> Result<RatMatrix> {
    let missing = || Error::MissingDecomposition(format!("#{f}"));
    let decomp = local.get(&f).filter(|d| d.top() == f).ok_or_else(missing)?;
    Ok(decomp.block_projection(f).ok_or_else(missing)?.transpose())
}

/// Daggers at every element, by the requested construction.
pub fn daggers(family: &ExtensionFamily, kind: DaggerKind) -> Result<BTreeMap<Elem, RatMatrix>> {
    let space = family.space();
    match kind {
        DaggerKind::Euclidean => Ok(space
            .poset()
            .elements()
            .map(|f| (f, dagger_euclidean(space, f)))
            .collect()),
        DaggerKind::Projection => {
            let local = local_decompositions(family)?;
            space
                .poset()
                .elements()
                .map(|f| dagger_projection(&local, f).map(|d| (f, d)))
                .collect()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DaggerKind {
    Euclidean,
    Projection,
}

/// Why a dagger choice fails to restrict isomorphically onto `ℱ̊(F)*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DaggerViolation {
    /// The functionals are not coordinate vectors on `ℱ(F)`.
    WrongAmbient { rows: usize, expected: usize },
    /// Count of functionals differs from `dim ℱ̊(F)`.
    NotSquare { functionals: usize, vanishing_dim: usize },
    /// The pairing with `ℱ̊(F)` is singular.
    Singular,
}

/// Checks that the pairing of `dagger` against the canonical basis of
/// `ℱ̊(F)` is square and invertible.
pub fn verify_dagger(space: &FunctionSpace, f: Elem, dagger: &RatMatrix) -> Verdict<DaggerViolation> {
    let basis = space.vanishing_trace(f).basis;
    if dagger.rows() != space.dim(f) {
        return Verdict::Violations(vec![DaggerViolation::WrongAmbient {
            rows: dagger.rows(),
            expected: space.dim(f),
        }]);
    }
    if dagger.cols() != basis.cols() {
        return Verdict::Violations(vec![DaggerViolation::NotSquare {
            functionals: dagger.cols(),
            vanishing_dim: basis.cols(),
        }]);
    }
    if (&dagger.transpose() * &basis).inverse().is_none() {
        return Verdict::Violations(vec![DaggerViolation::Singular]);
    }
    Verdict::Valid
}

/// One step of the dual induction:
/// `𝒞(𝔖 ∪ {T}) = 𝒞(𝔖) ⊕ (tr_T^𝒯)* ℱ̊(T)†`.
#[derive(Clone, Debug)]
pub struct DualStep {
    pub element: Elem,
    /// Basis of `𝒞(𝔖 ∪ {T})`, the annihilator of `ℐ(𝔖 ∪ {T})`.
    pub annihilator: RatMatrix,
    /// `(tr_T^𝒯)* ℱ̊(T)†`.
    pub block: RatMatrix,
    /// Coefficients `β = (V_Tᵀ D_T)⁻¹ (E_T^𝒯)ᵀ α` for each column `α`.
    pub coefficients: RatMatrix,
    /// `α − (tr_T^𝒯)* D_T β`, which annihilates `ℐ(𝔖)`.
    pub retained: RatMatrix,
}

#[derive(Clone, Debug)]
pub struct DualDecomposition {
    top: Elem,
    ambient_dim: usize,
    order: Vec<Elem>,
    blocks: BTreeMap<Elem, RatMatrix>,
    steps: Vec<DualStep>,
    certificate: DirectSum,
}

impl DualDecomposition {
    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn order(&self) -> &[Elem] {
        &self.order
    }

    pub fn block(&self, f: Elem) -> &RatMatrix {
        &self.blocks[&f]
    }

    pub fn blocks(&self) -> &BTreeMap<Elem, RatMatrix> {
        &self.blocks
    }

    pub fn steps(&self) -> &[DualStep] {
        &self.steps
    }

    pub fn certificate(&self) -> &DirectSum {
        &self.certificate
    }

    pub fn is_certified(&self) -> bool {
        self.certificate.is_certified()
    }

    pub fn combined(&self) -> RatMatrix {
        let refs: Vec<&RatMatrix> = self.blocks.values().collect();
        RatMatrix::hstack(self.ambient_dim, &refs).expect("blocks share the ambient dimension")
    }

    /// Drops the block of `f`.
    pub fn without_block(&self, f: Elem) -> DualDecomposition {
        let mut out = self.clone();
        out.blocks.remove(&f);
        out
    }
}

/// The dual decomposition along the deterministic upward peel.
pub fn dual_decomposition(
    family: &ExtensionFamily,
    daggers: &BTreeMap<Elem, RatMatrix>,
) -> Result<DualDecomposition> {
    let order = family.space().poset().peel_sequence(PeelDirection::Up);
    dual_decomposition_with_peel(family, daggers, &order)
}

pub fn dual_decomposition_with_peel(
    family: &ExtensionFamily,
    daggers: &BTreeMap<Elem, RatMatrix>,
    order: &[Elem],
) -> Result<DualDecomposition> {
    let space = family.space();
    let p = space.poset();
    let top = top_of(space)?;
    if !p.is_valid_peel(order, PeelDirection::Up) {
        return Err(Error::DimensionMismatch("not a valid upward peel".into()));
    }
    for f in p.elements() {
        let dagger = daggers
            .get(&f)
            .ok_or_else(|| Error::InvalidDagger(p.name(f).to_owned()))?;
        if !verify_dagger(space, f, dagger).is_valid() {
            return Err(Error::InvalidDagger(p.name(f).to_owned()));
        }
    }
    let n = space.dim(top);
    let mut set = p.empty_set();
    let mut blocks = BTreeMap::new();
    let mut steps = Vec::with_capacity(order.len());
    for &t in order {
        let before = space.vanishing_ideal(&set)?.basis;
        set = set.with(t);
        let after = space.vanishing_ideal(&set)?.basis;
        let annihilator = after.transpose().kernel_basis();
        let dagger = &daggers[&t];
        let block = &space.trace(t, top).transpose() * dagger;
        let pairing = &family.vanishing_basis(t).transpose() * dagger;
        let pairing_inverse = pairing
            .inverse()
            .ok_or_else(|| Error::InvalidDagger(p.name(t).to_owned()))?;
        let ext = family.op(t, top);
        let coefficients = &pairing_inverse * &(&ext.transpose() * &annihilator);
        let retained = &annihilator - &(&block * &coefficients);
        // the retained functionals must annihilate ℐ(𝔖)
        if !(&retained.transpose() * &before).is_zero() {
            return Err(Error::InconsistentFamily(1));
        }
        blocks.insert(t, block.clone());
        steps.push(DualStep {
            element: t,
            annihilator,
            block,
            coefficients,
            retained,
        });
    }
    let refs: Vec<&RatMatrix> = blocks.values().collect();
    let certificate = direct_sum_check(&refs, n)?;
    Ok(DualDecomposition {
        top,
        ambient_dim: n,
        order: order.to_vec(),
        blocks,
        steps,
        certificate,
    })
}

/// Outcome of pairing the dual blocks against the primal blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Unisolvence {
    /// The pairing matrix (functionals × basis vectors) is invertible.
    Certified { pairing: RatMatrix },
    /// The pairing matrix is not square or is singular.
    Failure { pairing: RatMatrix },
}

impl Unisolvence {
    pub fn is_certified(&self) -> bool {
        matches!(self, Unisolvence::Certified { .. })
    }
}

pub fn unisolvence_check(primal: &Decomposition, dual: &DualDecomposition) -> Result<Unisolvence> {
    if primal.ambient_dim() != dual.ambient_dim() || primal.top() != dual.top() {
        return Err(Error::DimensionMismatch(format!(
            "primal ambient {} at #{}, dual ambient {} at #{}",
            primal.ambient_dim(),
            primal.top(),
            dual.ambient_dim(),
            dual.top()
        )));
    }
    let pairing = &dual.combined().transpose() * &primal.combined();
    if pairing.is_square() && pairing.inverse().is_some() {
        Ok(Unisolvence::Certified { pairing })
    } else {
        Ok(Unisolvence::Failure { pairing })
    }
}
