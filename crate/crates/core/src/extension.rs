//! Extension operators defined on vanishing-trace subspaces.
//!
//! An [`ExtensionFamily`] stores `E_K^F : ℱ̊(K) → ℱ(F)` as a
//! `dim(F) × dim ℱ̊(K)` matrix against the canonical vanishing-trace basis of
//! `K` (the one returned by [`FunctionSpace::vanishing_trace`]). Absent
//! entries are the zero map.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::decomp::{local_decompositions, Decomposition};
use crate::error::{Error, Result};
use crate::funcspace::{FunctionSpace, GlobalSpace, HatSpace};
use crate::linalg::{RatMatrix, Solution};
use crate::poset::Elem;
use crate::Verdict;

#[derive(Clone)]
pub struct ExtensionFamily {
    space: Arc<FunctionSpace>,
    vanishing: Vec<RatMatrix>,
    ops: BTreeMap<(Elem, Elem), RatMatrix>,
}

/// A failed consistency condition, with the elements that witness it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyViolation {
    /// `E_K^K` is not the inclusion of `ℱ̊(K)`.
    NotInclusion { element: String },
    /// `E_K^F ≠ 0` although `K ≰ F`.
    NonzeroOffStar { source: String, target: String },
    /// `tr_G^F E_K^F ≠ E_K^G` for `G ≤ F`.
    TraceMismatch {
        source: String,
        lower: String,
        upper: String,
    },
}

impl fmt::Display for FamilyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyViolation::NotInclusion { element } => {
                write!(f, "condition 1: E[{element}→{element}] is not the inclusion")
            }
            FamilyViolation::NonzeroOffStar { source, target } => {
                write!(f, "condition 2: E[{source}→{target}] is nonzero but {source} ≰ {target}")
            }
            FamilyViolation::TraceMismatch {
                source,
                lower,
                upper,
            } => write!(
                f,
                "condition 3: tr[{lower}←{upper}] E[{source}→{upper}] ≠ E[{source}→{lower}]"
            ),
        }
    }
}

impl ExtensionFamily {
    /// Wraps operator matrices for `space`. Shapes are checked; consistency
    /// is not (see [`ExtensionFamily::verify`]).
    pub fn new(
        space: Arc<FunctionSpace>,
        ops: impl IntoIterator<Item = ((Elem, Elem), RatMatrix)>,
    ) -> Result<Self> {
        let vanishing: Vec<RatMatrix> = space
            .poset()
            .elements()
            .map(|e| space.vanishing_trace(e).basis)
            .collect();
        Self::with_vanishing(space, vanishing, ops)
    }

    pub(crate) fn with_vanishing(
        space: Arc<FunctionSpace>,
        vanishing: Vec<RatMatrix>,
        ops: impl IntoIterator<Item = ((Elem, Elem), RatMatrix)>,
    ) -> Result<Self> {
        let mut stored = BTreeMap::new();
        for ((k, f), m) in ops {
            let n = space.poset().len();
            if k >= n || f >= n {
                return Err(Error::UnknownIdentifier(format!("#{}", k.max(f))));
            }
            let expected = (space.dim(f), vanishing[k].cols());
            if m.shape() != expected {
                return Err(Error::ShapeMismatch {
                    lower: space.poset().name(k).to_owned(),
                    upper: space.poset().name(f).to_owned(),
                    got: m.shape(),
                    expected,
                });
            }
            if !m.is_zero() {
                stored.insert((k, f), m);
            }
        }
        Ok(ExtensionFamily {
            space,
            vanishing,
            ops: stored,
        })
    }

    /// The family that extends every vanishing-trace function by zero: only
    /// the inclusions `E_K^K` are nonzero.
    ///
    /// This is consistent exactly when traces of vanishing-trace functions
    /// to larger elements are never forced; it is the natural family for
    /// fully discontinuous spaces and for the top-dimensional cells of a
    /// complex.
    pub fn inclusions_only(space: Arc<FunctionSpace>) -> Self {
        let vanishing: Vec<RatMatrix> = space
            .poset()
            .elements()
            .map(|e| space.vanishing_trace(e).basis)
            .collect();
        let ops: Vec<_> = vanishing
            .iter()
            .enumerate()
            .map(|(k, v)| ((k, k), v.clone()))
            .collect();
        Self::with_vanishing(space, vanishing, ops).expect("inclusions have matching shapes")
    }

    pub fn space(&self) -> &FunctionSpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<FunctionSpace> {
        &self.space
    }

    /// Canonical basis of `ℱ̊(K)` the operators act on.
    pub fn vanishing_basis(&self, k: Elem) -> &RatMatrix {
        &self.vanishing[k]
    }

    pub fn vanishing_dim(&self, k: Elem) -> usize {
        self.vanishing[k].cols()
    }

    /// `E_K^F`, materializing the zero map for absent entries.
    pub fn op(&self, k: Elem, f: Elem) -> Cow<'_, RatMatrix> {
        match self.ops.get(&(k, f)) {
            Some(m) => Cow::Borrowed(m),
            None => Cow::Owned(RatMatrix::zeros(self.space.dim(f), self.vanishing[k].cols())),
        }
    }

    /// Stored (nonzero) entries.
    pub fn entries(&self) -> impl Iterator<Item = (&(Elem, Elem), &RatMatrix)> {
        self.ops.iter()
    }

    /// Checks the three consistency conditions exactly over every element,
    /// every pair and every relation, without trusting any cached result.
    pub fn verify(&self) -> Result<Verdict<FamilyViolation>> {
        let p = self.space.poset();
        let name = |e: Elem| p.name(e).to_owned();
        for (&(k, f), m) in &self.ops {
            let expected = (self.space.dim(f), self.vanishing[k].cols());
            if m.shape() != expected {
                return Err(Error::ShapeMismatch {
                    lower: name(k),
                    upper: name(f),
                    got: m.shape(),
                    expected,
                });
            }
        }
        let mut violations = Vec::new();
        for k in p.elements() {
            if *self.op(k, k) != self.vanishing[k] {
                violations.push(FamilyViolation::NotInclusion { element: name(k) });
            }
            for f in p.elements() {
                if !p.leq(k, f) && !self.op(k, f).is_zero() {
                    violations.push(FamilyViolation::NonzeroOffStar {
                        source: name(k),
                        target: name(f),
                    });
                }
            }
            for f in p.elements() {
                let ext = self.op(k, f);
                for g in p.lower_bounds(f) {
                    if self.space.trace(g, f) * ext.as_ref() != *self.op(k, g) {
                        violations.push(FamilyViolation::TraceMismatch {
                            source: name(k),
                            lower: name(g),
                            upper: name(f),
                        });
                    }
                }
            }
        }
        Ok(Verdict::from_violations(violations))
    }

    /// Restriction of the family to `Δ(T)`, indexed like
    /// [`FunctionSpace::restrict_to_down_set`].
    pub fn restrict_to_down_set(&self, t: Elem) -> (ExtensionFamily, Vec<Elem>) {
        let (space, map) = self.space.restrict_to_down_set(t);
        let vanishing = map.iter().map(|&m| self.vanishing[m].clone()).collect();
        let mut ops = Vec::new();
        for (i, &a) in map.iter().enumerate() {
            for (j, &b) in map.iter().enumerate() {
                if let Some(m) = self.ops.get(&(a, b)) {
                    ops.push(((i, j), m.clone()));
                }
            }
        }
        let family = Self::with_vanishing(Arc::new(space), vanishing, ops)
            .expect("restriction preserves shapes");
        (family, map)
    }
}

impl fmt::Debug for ExtensionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.space.poset();
        let entries: Vec<String> = self
            .ops
            .iter()
            .map(|(&(k, t), m)| format!("{}→{}: {:?}", p.name(k), p.name(t), m.shape()))
            .collect();
        f.debug_struct("ExtensionFamily")
            .field("ops", &entries)
            .finish_non_exhaustive()
    }
}

/// Builds the consistent family `E_K^F := tr_F^𝒯 E_K^𝒯` on the base poset
/// from local extension operators into the global space.
///
/// `locals[k]` is a `dim ℱ(𝒯) × dim ℱ̊(K)` matrix in global coordinates. Both
/// defining conditions of a local operator are checked first.
pub fn consistent_from_local(hat: &HatSpace, locals: &[RatMatrix]) -> Result<ExtensionFamily> {
    let base = &hat.base;
    let p = base.poset();
    if locals.len() != p.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} local operators for {} elements",
            locals.len(),
            p.len()
        )));
    }
    let vanishing: Vec<RatMatrix> = p.elements().map(|e| base.vanishing_trace(e).basis).collect();
    let mut ops = Vec::new();
    for k in p.elements() {
        let local = &locals[k];
        if local.shape() != (hat.global.dim(), vanishing[k].cols()) {
            return Err(Error::ShapeMismatch {
                lower: p.name(k).to_owned(),
                upper: hat.hat.poset().name(hat.top).to_owned(),
                got: local.shape(),
                expected: (hat.global.dim(), vanishing[k].cols()),
            });
        }
        for f in p.elements() {
            let image = &hat.global.projection(f) * local;
            if f == k && image != vanishing[k] {
                return Err(Error::NotLocalOperator {
                    element: p.name(k).to_owned(),
                    condition: "trace onto the element itself is not the inclusion".into(),
                });
            }
            if !p.leq(k, f) && !image.is_zero() {
                return Err(Error::NotLocalOperator {
                    element: p.name(k).to_owned(),
                    condition: format!("trace onto `{}` is nonzero", p.name(f)),
                });
            }
            ops.push(((k, f), image));
        }
    }
    ExtensionFamily::with_vanishing(Arc::new(base.clone()), vanishing, ops)
}

/// Stacks `(E_K^F)_F` into the product space and expresses it in global
/// coordinates, one matrix per element of the base poset.
pub fn local_from_consistent(family: &ExtensionFamily, global: &GlobalSpace) -> Result<Vec<RatMatrix>> {
    let space = family.space();
    let p = space.poset();
    let mut out = Vec::with_capacity(p.len());
    for k in p.elements() {
        let mut stacked = RatMatrix::zeros(global.product_dim(), family.vanishing_dim(k));
        for f in p.elements() {
            let block = family.op(k, f);
            for i in 0..block.rows() {
                for j in 0..block.cols() {
                    stacked.set(global.layout[f] + i, j, block.get(i, j).clone());
                }
            }
        }
        match global.basis.solve(&stacked)? {
            Solution::Solution(coords) => out.push(coords),
            Solution::Infeasible(_) => return Err(Error::NotCompatible(p.name(k).to_owned())),
        }
    }
    Ok(out)
}

/// Lifts a consistent family on the base poset to the poset with the global
/// space adjoined as its top: `E_K^𝒯` are the local operators and every
/// `E_𝒯^F` is the zero map on `ℱ̊(𝒯) = 0`.
pub fn extend_family_to_hat(family: &ExtensionFamily, hat: &HatSpace) -> Result<ExtensionFamily> {
    let locals = local_from_consistent(family, &hat.global)?;
    let mut ops: Vec<((Elem, Elem), RatMatrix)> = family
        .entries()
        .map(|(&pair, m)| (pair, m.clone()))
        .collect();
    for (k, local) in locals.into_iter().enumerate() {
        ops.push(((k, hat.top), local));
    }
    let mut vanishing = family.vanishing.clone();
    vanishing.push(hat.hat.vanishing_trace(hat.top).basis);
    ops.push(((hat.top, hat.top), vanishing[hat.top].clone()));
    ExtensionFamily::with_vanishing(Arc::new(hat.hat.clone()), vanishing, ops)
}

/// Extension operators on the full spaces: `Ē_G^F : ℱ(G) → ℱ(F)` for
/// `G ≤ F`, defined blockwise on the local decomposition of `ℱ(G)` by
/// `Ē_G^F(E_K^G ψ) = E_K^F ψ`.
#[derive(Clone, Debug)]
pub struct FullExtension {
    ops: BTreeMap<(Elem, Elem), RatMatrix>,
}

/// A failed identity among the full-space extension operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FullExtensionViolation {
    /// `tr_G^F Ē_G^F` is not the identity.
    NotRightInverse { lower: String, upper: String },
    /// `tr_G^T Ē_F^T ≠ Ē_K^G tr_K^F` with `K` the meet of `F` and `G`.
    MeetMismatch {
        meet: String,
        first: String,
        second: String,
        top: String,
    },
    /// `tr_G^T Ē_F^T ≠ 0` although `F` and `G` have no common lower bound.
    DisjointNonzero {
        first: String,
        second: String,
        top: String,
    },
}

impl FullExtension {
    /// `Ē_G^F`.
    ///
    /// # Panics
    ///
    /// Panics unless `g ≤ f`.
    pub fn op(&self, g: Elem, f: Elem) -> &RatMatrix {
        &self.ops[&(g, f)]
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(Elem, Elem)> {
        self.ops.keys()
    }

    /// Checks the two defining identities exactly.
    ///
    /// The commuting identity is checked for every `F, G ≤ T` whose common
    /// lower bounds have a greatest element `K` (the meet); when `F` and `G`
    /// share no lower bound at all, `tr_G^T Ē_F^T` must vanish. Pairs with
    /// common lower bounds but no meet are not constrained.
    pub fn certify(&self, space: &FunctionSpace) -> Verdict<FullExtensionViolation> {
        let p = space.poset();
        let name = |e: Elem| p.name(e).to_owned();
        let mut violations = Vec::new();
        for (&(g, f), ext) in &self.ops {
            if space.trace(g, f) * ext != RatMatrix::identity(space.dim(g)) {
                violations.push(FullExtensionViolation::NotRightInverse {
                    lower: name(g),
                    upper: name(f),
                });
            }
        }
        for t in p.elements() {
            for f in p.lower_bounds(t) {
                for g in p.lower_bounds(t) {
                    let lhs = space.trace(g, t) * self.op(f, t);
                    match meet(space, f, g) {
                        Meet::Bottomless => {
                            if !lhs.is_zero() {
                                violations.push(FullExtensionViolation::DisjointNonzero {
                                    first: name(f),
                                    second: name(g),
                                    top: name(t),
                                });
                            }
                        }
                        Meet::Element(k) => {
                            let rhs = self.op(k, g) * space.trace(k, f);
                            if lhs != rhs {
                                violations.push(FullExtensionViolation::MeetMismatch {
                                    meet: name(k),
                                    first: name(f),
                                    second: name(g),
                                    top: name(t),
                                });
                            }
                        }
                        Meet::Ambiguous => {}
                    }
                }
            }
        }
        Verdict::from_violations(violations)
    }
}

pub(crate) enum Meet {
    Element(Elem),
    Bottomless,
    Ambiguous,
}

/// Greatest common lower bound of `a` and `b`, if it exists.
pub(crate) fn meet(space: &FunctionSpace, a: Elem, b: Elem) -> Meet {
    let p = space.poset();
    let common: Vec<Elem> = p.lower_bounds(a).filter(|&k| p.leq(k, b)).collect();
    if common.is_empty() {
        return Meet::Bottomless;
    }
    match common
        .iter()
        .find(|&&k| common.iter().all(|&l| p.leq(l, k)))
    {
        Some(&k) => Meet::Element(k),
        None => Meet::Ambiguous,
    }
}

/// Extends every `E_G^F` from `ℱ̊(G)` to `ℱ(G)` using the supplied local
/// decompositions of each `ℱ(G)` (one per element, with `G` as top).
pub fn extend_to_full_space(
    family: &ExtensionFamily,
    local: &BTreeMap<Elem, Decomposition>,
) -> Result<FullExtension> {
    let space = family.space();
    let p = space.poset();
    let mut ops = BTreeMap::new();
    for g in p.elements() {
        let decomp = local
            .get(&g)
            .filter(|d| d.top() == g)
            .ok_or_else(|| Error::MissingDecomposition(p.name(g).to_owned()))?;
        let basis_inverse = decomp
            .combined()
            .inverse()
            .ok_or_else(|| Error::MissingDecomposition(p.name(g).to_owned()))?;
        let lower: Vec<Elem> = decomp.elements().collect();
        for f in p.upper_bounds(g) {
            let images: Vec<Cow<'_, RatMatrix>> = lower.iter().map(|&k| family.op(k, f)).collect();
            let refs: Vec<&RatMatrix> = images.iter().map(AsRef::as_ref).collect();
            let stacked = RatMatrix::hstack(space.dim(f), &refs)?;
            ops.insert((g, f), &stacked * &basis_inverse);
        }
    }
    Ok(FullExtension { ops })
}

/// [`extend_to_full_space`] with the local decompositions computed here.
pub fn full_extension(family: &ExtensionFamily) -> Result<FullExtension> {
    let local = local_decompositions(family)?;
    extend_to_full_space(family, &local)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{synthesize_presheaf, synthesize_presheaf_with, Carrier};
    use crate::linalg::rat;

    #[test]
    fn zero_extension_family_is_consistent() {
        for seed in 0..10 {
            let (_, family) = synthesize_presheaf(seed, 12, 5);
            assert!(family.verify().unwrap().is_valid(), "seed {seed}");
        }
    }

    #[test]
    fn nonzero_off_star_violates_condition_two() {
        let (space, family) = synthesize_presheaf_with(3, 10, 4, Carrier::Faces);
        let p = space.poset();
        // pick two incomparable elements with a nonzero vanishing space
        let (k, f) = p
            .elements()
            .flat_map(|k| p.elements().map(move |f| (k, f)))
            .find(|&(k, f)| !p.leq(k, f) && family.vanishing_dim(k) > 0 && space.dim(f) > 0)
            .expect("an incomparable pair exists");
        let mut ops: Vec<_> = family.entries().map(|(&pr, m)| (pr, m.clone())).collect();
        let mut bad = RatMatrix::zeros(space.dim(f), family.vanishing_dim(k));
        bad.set(0, 0, rat(1));
        ops.push(((k, f), bad));
        let broken = ExtensionFamily::new(family.space_arc().clone(), ops).unwrap();
        let verdict = broken.verify().unwrap();
        assert!(verdict.violations().contains(&FamilyViolation::NonzeroOffStar {
            source: p.name(k).to_owned(),
            target: p.name(f).to_owned(),
        }));
    }

    #[test]
    fn local_and_consistent_round_trip() {
        for seed in 0..10 {
            let (space, family) = synthesize_presheaf_with(seed, 14, 5, Carrier::Faces);
            let hat = space.with_global_top();
            let locals = local_from_consistent(&family, &hat.global).unwrap();
            let back = consistent_from_local(&hat, &locals).unwrap();
            for k in space.poset().elements() {
                for f in space.poset().elements() {
                    assert_eq!(back.op(k, f), family.op(k, f));
                }
            }
        }
    }

    #[test]
    fn empty_poset_has_no_locals() {
        let (space, _) = synthesize_presheaf(0, 1, 1);
        let empty = space.restrict_to(&[]).0;
        let family = ExtensionFamily::inclusions_only(Arc::new(empty.clone()));
        let hat = empty.with_global_top();
        assert!(local_from_consistent(&family, &hat.global).unwrap().is_empty());
    }

    #[test]
    fn non_local_operator_is_rejected() {
        let (space, family) = synthesize_presheaf(1, 8, 4);
        let hat = space.with_global_top();
        let mut locals = local_from_consistent(&family, &hat.global).unwrap();
        let k = (0..locals.len()).find(|&k| locals[k].cols() > 0).unwrap();
        locals[k] = locals[k].scale(&rat(2));
        assert!(matches!(
            consistent_from_local(&hat, &locals),
            Err(Error::NotLocalOperator { .. })
        ));
    }

    #[test]
    fn hat_family_is_consistent() {
        for seed in 0..10 {
            let (space, family) = synthesize_presheaf_with(seed, 12, 5, Carrier::Faces);
            let hat = space.with_global_top();
            let lifted = extend_family_to_hat(&family, &hat).unwrap();
            assert!(lifted.verify().unwrap().is_valid(), "seed {seed}");
            assert_eq!(lifted.op(hat.top, hat.top).shape(), (hat.global.dim(), 0));
        }
    }

    #[test]
    fn full_extension_identities_on_presheaves() {
        for seed in 0..5 {
            let (space, family) = synthesize_presheaf_with(seed, 12, 5, Carrier::Faces);
            let full = full_extension(&family).unwrap();
            for g in space.poset().elements() {
                assert_eq!(*full.op(g, g), RatMatrix::identity(space.dim(g)));
            }
            assert!(full.certify(&space).is_valid(), "seed {seed}");
        }
    }

    #[test]
    fn missing_decomposition_is_reported() {
        let (_, family) = synthesize_presheaf(2, 6, 3);
        assert!(matches!(
            extend_to_full_space(&family, &BTreeMap::new()),
            Err(Error::MissingDecomposition(_))
        ));
    }
}
