//! Function spaces on posets: one finite-dimensional space per element and a
//! trace matrix per order relation, subject to functoriality.
//!
//! Coordinates are always taken against the element's stored basis, and a
//! trace `tr_K^F` is a `dim(K) × dim(F)` matrix acting on column vectors.
//! Zero-dimensional spaces are ordinary values here (0-row or 0-column
//! matrices), since vanishing-trace spaces are frequently trivial.

pub(crate) mod synth;

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{rat, RatMatrix};
use crate::poset::{Elem, LowerSet, Poset};
use crate::Verdict;

pub use synth::{synthesize_presheaf, synthesize_presheaf_with, Carrier};

#[derive(Clone)]
pub struct FunctionSpace {
    poset: Poset,
    dims: Vec<usize>,
    labels: Vec<Vec<String>>,
    /// Trace matrices for every comparable pair `(k, f)`, `k ≤ f`.
    traces: HashMap<(Elem, Elem), RatMatrix>,
}

/// A subspace of one element's space, as independent coordinate columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub element: Elem,
    pub basis: RatMatrix,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

/// A functoriality failure found by [`FunctionSpace::verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceViolation {
    /// `tr_F^F` is not the identity.
    NotIdentity { element: String },
    /// `tr_K^G · tr_G^F ≠ tr_K^F` for `K ≤ G ≤ F`.
    Composition {
        lower: String,
        middle: String,
        upper: String,
    },
}

impl fmt::Display for TraceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceViolation::NotIdentity { element } => {
                write!(f, "trace of `{element}` onto itself is not the identity")
            }
            TraceViolation::Composition {
                lower,
                middle,
                upper,
            } => write!(f, "traces do not compose through {lower} ≤ {middle} ≤ {upper}"),
        }
    }
}

/// The inverse limit: compatible tuples `(φ_F)_F` inside the product of all
/// element spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalSpace {
    /// Offset of each element's block in the stacked coordinate vector.
    pub layout: Vec<usize>,
    pub dims: Vec<usize>,
    /// Columns are compatible tuples; they form a basis of the global space.
    pub basis: RatMatrix,
}

impl GlobalSpace {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn product_dim(&self) -> usize {
        self.basis.rows()
    }

    /// The coordinate projection `tr_𝒯^F` as a `dim(F) × dim(𝒯)` matrix.
    pub fn projection(&self, f: Elem) -> RatMatrix {
        self.basis
            .row_range(self.layout[f], self.layout[f] + self.dims[f])
    }
}

/// A space together with its global completion: the poset with the formal
/// top element adjoined and the global space sitting over it.
///
/// Elements of the base poset keep their indices in `hat`; the top is the
/// last element.
#[derive(Clone)]
pub struct HatSpace {
    pub base: FunctionSpace,
    pub hat: FunctionSpace,
    pub global: GlobalSpace,
    pub top: Elem,
}

impl FunctionSpace {
    /// Assembles a space from per-element dimensions and trace matrices.
    ///
    /// `traces` must cover at least every cover relation of the poset. Missing
    /// diagonal entries default to the identity and any other missing
    /// comparable pair is filled by composing along covers; supplied entries
    /// are kept as given, so inconsistent input is caught by
    /// [`FunctionSpace::verify`].
    pub fn new(
        poset: Poset,
        dims: Vec<usize>,
        traces: impl IntoIterator<Item = ((Elem, Elem), RatMatrix)>,
    ) -> Result<Self> {
        if dims.len() != poset.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} dimensions for {} elements",
                dims.len(),
                poset.len()
            )));
        }
        let mut stored: HashMap<(Elem, Elem), RatMatrix> = HashMap::new();
        for ((k, f), m) in traces {
            if k >= poset.len() || f >= poset.len() || !poset.leq(k, f) {
                return Err(Error::UnknownIdentifier(format!(
                    "trace ({}, {}) for an incomparable pair",
                    poset.names().get(k).map_or("?", String::as_str),
                    poset.names().get(f).map_or("?", String::as_str),
                )));
            }
            check_shape(&poset, &dims, k, f, &m)?;
            stored.insert((k, f), m);
        }
        for e in poset.elements() {
            stored
                .entry((e, e))
                .or_insert_with(|| RatMatrix::identity(dims[e]));
        }
        for (k, f) in poset.covers() {
            if !stored.contains_key(&(k, f)) {
                return Err(Error::MissingTrace(
                    poset.name(k).to_owned(),
                    poset.name(f).to_owned(),
                ));
            }
        }
        let covers = poset.covers();
        let mut pairs: Vec<(Elem, Elem)> = poset.comparable_pairs().collect();
        // fill longer relations after shorter ones
        pairs.sort_by_key(|&(k, f)| poset.lower_bounds(f).filter(|&g| poset.leq(k, g)).count());
        for (k, f) in pairs {
            if stored.contains_key(&(k, f)) {
                continue;
            }
            let &(_, g) = covers
                .iter()
                .find(|&&(a, g)| a == k && poset.leq(g, f))
                .expect("a strict relation factors through a cover");
            let m = &stored[&(k, g)] * &stored[&(g, f)];
            stored.insert((k, f), m);
        }
        let labels = dims
            .iter()
            .map(|&d| (0..d).map(|i| format!("b{i}")).collect())
            .collect();
        Ok(FunctionSpace {
            poset,
            dims,
            labels,
            traces: stored,
        })
    }

    /// Attaches human-readable basis labels. They never affect computation.
    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        for (e, l) in labels.iter().enumerate() {
            if self.dims.get(e) != Some(&l.len()) {
                return Err(Error::DimensionMismatch(format!(
                    "label count for element #{e}"
                )));
            }
        }
        if labels.len() != self.dims.len() {
            return Err(Error::DimensionMismatch("label vector length".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Replaces one stored trace matrix (shape-checked, otherwise unchecked).
    pub fn replace_trace(&mut self, k: Elem, f: Elem, m: RatMatrix) -> Result<()> {
        if !self.poset.leq(k, f) {
            return Err(Error::UnknownIdentifier(format!(
                "({}, {}) are not comparable",
                self.poset.name(k),
                self.poset.name(f)
            )));
        }
        check_shape(&self.poset, &self.dims, k, f, &m)?;
        self.traces.insert((k, f), m);
        Ok(())
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn dim(&self, e: Elem) -> usize {
        self.dims[e]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self, e: Elem) -> &[String] {
        &self.labels[e]
    }

    /// `tr_K^F`.
    ///
    /// # Panics
    ///
    /// Panics unless `k ≤ f`.
    pub fn trace(&self, k: Elem, f: Elem) -> &RatMatrix {
        self.traces
            .get(&(k, f))
            .unwrap_or_else(|| panic!("no trace for incomparable pair ({k}, {f})"))
    }

    pub fn try_trace(&self, k: Elem, f: Elem) -> Option<&RatMatrix> {
        self.traces.get(&(k, f))
    }

    pub fn top(&self) -> Option<Elem> {
        self.poset.top()
    }

    /// Checks both functoriality laws exactly over every relation and every
    /// chain `K ≤ G ≤ F`.
    pub fn verify(&self) -> Result<Verdict<TraceViolation>> {
        for (&(k, f), m) in &self.traces {
            check_shape(&self.poset, &self.dims, k, f, m)?;
        }
        let p = &self.poset;
        let mut violations = Vec::new();
        for e in p.elements() {
            if *self.trace(e, e) != RatMatrix::identity(self.dims[e]) {
                violations.push(TraceViolation::NotIdentity {
                    element: p.name(e).to_owned(),
                });
            }
        }
        for f in p.elements() {
            for g in p.lower_bounds(f) {
                for k in p.lower_bounds(g) {
                    if self.trace(k, g) * self.trace(g, f) != *self.trace(k, f) {
                        violations.push(TraceViolation::Composition {
                            lower: p.name(k).to_owned(),
                            middle: p.name(g).to_owned(),
                            upper: p.name(f).to_owned(),
                        });
                    }
                }
            }
        }
        Ok(Verdict::from_violations(violations))
    }

    /// `ℱ̊(F)`: the common kernel of the traces to all strictly smaller
    /// elements, with the reduced-echelon canonical basis.
    pub fn vanishing_trace(&self, f: Elem) -> Subspace {
        let below: Vec<&RatMatrix> = self
            .poset
            .lower_bounds(f)
            .filter(|&k| k != f)
            .map(|k| self.trace(k, f))
            .collect();
        let stacked = RatMatrix::vstack(self.dims[f], &below).expect("traces share a domain");
        Subspace {
            element: f,
            basis: stacked.kernel_basis(),
        }
    }

    /// The inverse limit over the whole poset, computed as the kernel of the
    /// stacked compatibility operator `(φ_F) ↦ tr_K^F φ_F − φ_K` over covers.
    pub fn assemble_global(&self) -> GlobalSpace {
        let mut layout = Vec::with_capacity(self.dims.len());
        let mut total = 0;
        for &d in &self.dims {
            layout.push(total);
            total += d;
        }
        let covers = self.poset.covers();
        let rows: usize = covers.iter().map(|&(k, _)| self.dims[k]).sum();
        let mut op = RatMatrix::zeros(rows, total);
        let mut r = 0;
        for &(k, f) in &covers {
            let t = self.trace(k, f);
            for i in 0..self.dims[k] {
                for j in 0..self.dims[f] {
                    op.set(r + i, layout[f] + j, t.get(i, j).clone());
                }
                op.set(r + i, layout[k] + i, rat(-1));
            }
            r += self.dims[k];
        }
        GlobalSpace {
            layout,
            dims: self.dims.clone(),
            basis: op.kernel_basis(),
        }
    }

    /// Adjoins the global space as a formal top element.
    pub fn with_global_top(&self) -> HatSpace {
        let global = self.assemble_global();
        let (poset, top) = self.poset.adjoin_top();
        let mut dims = self.dims.clone();
        dims.push(global.dim());
        let mut traces: Vec<((Elem, Elem), RatMatrix)> = self
            .traces
            .iter()
            .map(|(&pair, m)| (pair, m.clone()))
            .collect();
        for f in self.poset.elements() {
            traces.push(((f, top), global.projection(f)));
        }
        let mut labels = self.labels.clone();
        labels.push((0..global.dim()).map(|i| format!("g{i}")).collect());
        let hat = FunctionSpace::new(poset, dims, traces)
            .and_then(|s| s.with_labels(labels))
            .expect("global projections have consistent shapes");
        HatSpace {
            base: self.clone(),
            hat,
            global,
            top,
        }
    }

    /// The space restricted to `Δ(T)`. Returns it together with the map from
    /// new element indices to old ones; `T` becomes the top.
    pub fn restrict_to_down_set(&self, t: Elem) -> (FunctionSpace, Vec<Elem>) {
        let members: Vec<Elem> = self.poset.down_set(t).to_vec();
        self.restrict_to(&members)
    }

    pub(crate) fn restrict_to(&self, members: &[Elem]) -> (FunctionSpace, Vec<Elem>) {
        let poset = self.poset.induced(members);
        let dims = members.iter().map(|&m| self.dims[m]).collect();
        let mut traces = Vec::new();
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                if self.poset.leq(a, b) {
                    traces.push(((i, j), self.trace(a, b).clone()));
                }
            }
        }
        let labels = members.iter().map(|&m| self.labels[m].clone()).collect();
        let space = FunctionSpace::new(poset, dims, traces)
            .and_then(|s| s.with_labels(labels))
            .expect("restriction of a valid space is valid");
        (space, members.to_vec())
    }

    /// `ℐ(𝔖)`: elements of the top space whose traces vanish on every member
    /// of the lower set `members`.
    pub fn vanish_on_lower_set(&self, members: &[Elem]) -> Result<Subspace> {
        let set = self.poset.lower_set(members)?;
        self.vanishing_ideal(&set)
    }

    pub(crate) fn vanishing_ideal(&self, set: &LowerSet) -> Result<Subspace> {
        let top = self.top().ok_or(Error::NoTopElement)?;
        let rows: Vec<&RatMatrix> = set.iter().map(|f| self.trace(f, top)).collect();
        let stacked = RatMatrix::vstack(self.dims[top], &rows)?;
        Ok(Subspace {
            element: top,
            basis: stacked.kernel_basis(),
        })
    }
}

impl fmt::Debug for FunctionSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpace")
            .field("poset", &self.poset)
            .field("dims", &self.dims)
            .finish_non_exhaustive()
    }
}

fn check_shape(poset: &Poset, dims: &[usize], k: Elem, f: Elem, m: &RatMatrix) -> Result<()> {
    let expected = (dims[k], dims[f]);
    if m.shape() != expected {
        return Err(Error::ShapeMismatch {
            lower: poset.name(k).to_owned(),
            upper: poset.name(f).to_owned(),
            got: m.shape(),
            expected,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Piecewise linears on one triangle: dim 1 per vertex, 2 per edge,
    /// 3 on the face, traces are restriction of nodal values.
    fn p1_triangle() -> FunctionSpace {
        let names = ["v0", "v1", "v2", "e01", "e02", "e12", "f"];
        let verts: [&[usize]; 7] = [&[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]];
        nodal_space(&names, &verts)
    }

    fn nodal_space(names: &[&str], verts: &[&[usize]]) -> FunctionSpace {
        let n = names.len();
        let mut covers = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if verts[a].len() + 1 == verts[b].len()
                    && verts[a].iter().all(|v| verts[b].contains(v))
                {
                    covers.push((a, b));
                }
            }
        }
        let poset =
            Poset::from_indices(names.iter().map(|s| s.to_string()).collect(), &covers).unwrap();
        let dims = verts.iter().map(|v| v.len()).collect();
        let traces: Vec<_> = covers
            .iter()
            .map(|&(a, b)| {
                let m = RatMatrix::from_fn(verts[a].len(), verts[b].len(), |i, j| {
                    rat((verts[a][i] == verts[b][j]) as i64)
                });
                ((a, b), m)
            })
            .collect();
        FunctionSpace::new(poset, dims, traces).unwrap()
    }

    #[test]
    fn closure_fills_long_relations() {
        let s = p1_triangle();
        let v0 = s.poset().index_of("v0").unwrap();
        let f = s.poset().index_of("f").unwrap();
        assert_eq!(*s.trace(v0, f), RatMatrix::from_i64(&[&[1, 0, 0]]));
        assert!(s.verify().unwrap().is_valid());
    }

    #[test]
    fn perturbed_trace_is_reported() {
        let mut s = p1_triangle();
        let p = s.poset().clone();
        let (v0, e01, f) = (
            p.index_of("v0").unwrap(),
            p.index_of("e01").unwrap(),
            p.index_of("f").unwrap(),
        );
        let mut t = s.trace(e01, f).clone();
        t.set(0, 0, rat(2));
        s.replace_trace(e01, f, t).unwrap();
        let verdict = s.verify().unwrap();
        assert!(verdict.violations().contains(&TraceViolation::Composition {
            lower: "v0".into(),
            middle: "e01".into(),
            upper: "f".into(),
        }));
        assert!(!verdict.violations().iter().any(|v| matches!(
            v,
            TraceViolation::Composition { middle, .. } if middle == "e12"
        )));
        let _ = v0;
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let mut s = p1_triangle();
        let e01 = s.poset().index_of("e01").unwrap();
        let f = s.poset().index_of("f").unwrap();
        let err = s.replace_trace(e01, f, RatMatrix::zeros(3, 3)).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }

    #[test]
    fn discrete_space_is_valid_product() {
        let poset = Poset::new::<&str>(&["a", "b"], &[]).unwrap();
        let s = FunctionSpace::new(poset, vec![2, 3], []).unwrap();
        assert!(s.verify().unwrap().is_valid());
        let g = s.assemble_global();
        assert_eq!(g.dim(), 5);
        assert_eq!(g.basis, RatMatrix::identity(5));
    }

    #[test]
    fn missing_cover_trace_is_an_error() {
        let poset = Poset::new(&["a", "b"], &[("a", "b")]).unwrap();
        let err = FunctionSpace::new(poset, vec![1, 1], []).unwrap_err();
        assert_eq!(err, Error::MissingTrace("a".into(), "b".into()));
    }

    #[test]
    fn vanishing_traces_of_nodal_space() {
        let s = p1_triangle();
        for e in s.poset().elements() {
            let expected = usize::from(s.dim(e) == 1);
            assert_eq!(s.vanishing_trace(e).dim(), expected, "{}", s.poset().name(e));
        }
    }

    #[test]
    fn global_space_of_nodal_triangle() {
        let s = p1_triangle();
        let g = s.assemble_global();
        assert_eq!(g.dim(), 3);
        // every column is a compatible tuple
        for (k, f) in s.poset().comparable_pairs() {
            assert_eq!(s.trace(k, f) * &g.projection(f), g.projection(k));
        }
    }

    #[test]
    fn hat_top_has_trivial_vanishing_space() {
        let hat = p1_triangle().with_global_top();
        assert_eq!(hat.hat.poset().len(), 8);
        assert!(hat.hat.verify().unwrap().is_valid());
        assert_eq!(hat.hat.vanishing_trace(hat.top).dim(), 0);
    }

    #[test]
    fn restriction_to_down_sets() {
        let s = p1_triangle();
        let p = s.poset();
        let (r, map) = s.restrict_to_down_set(p.index_of("f").unwrap());
        assert_eq!(r.poset().len(), 7);
        assert_eq!(map, (0..7).collect::<Vec<_>>());
        let (r, map) = s.restrict_to_down_set(p.index_of("e12").unwrap());
        assert_eq!(r.poset().len(), 3);
        assert_eq!(r.top(), Some(2));
        assert_eq!(*r.trace(0, 2), *s.trace(map[0], map[2]));
        let (r, _) = s.restrict_to_down_set(p.index_of("v2").unwrap());
        assert_eq!((r.poset().len(), r.dim(0)), (1, 1));
    }

    #[test]
    fn vanishing_ideals_at_the_extremes() {
        let hat = p1_triangle().with_global_top();
        let all: Vec<Elem> = hat.hat.poset().elements().collect();
        assert_eq!(hat.hat.vanish_on_lower_set(&[]).unwrap().dim(), 3);
        assert_eq!(hat.hat.vanish_on_lower_set(&all).unwrap().dim(), 0);
        let e01 = hat.hat.poset().index_of("e01").unwrap();
        assert!(matches!(
            hat.hat.vanish_on_lower_set(&[e01]),
            Err(Error::NotLowerSet { .. })
        ));
        // vanishing at v0 and v1 leaves the hat function of v2
        let v = hat.hat.poset().lookup(&["v0", "v1"]).unwrap();
        assert_eq!(hat.hat.vanish_on_lower_set(&v).unwrap().dim(), 1);
    }
}
