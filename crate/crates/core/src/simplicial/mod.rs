//! Simplicial complexes, barycentric forms and the built-in spaces on them.
//!
//! Local vertex indices of a face follow its sorted global vertex order. The
//! pair `T^m ≤ Q^{m+1}` is realised on the simplex with local vertices
//! `0, …, m+1`: vertex `i ≤ m` is `e_i` and vertex `m+1` is the origin, so
//! `T^m` is the face `{0, …, m}`.

mod complex;
mod extension;
mod forms;
mod spaces;

pub use complex::SimplicialComplex;
pub use extension::{
    bubble_extension, bubble_factorizes, check_simpext, homogeneous_extension,
    local_ops_from_simplicial, simplex_vanishing_basis, simplicial_from_local, solve_simpext,
    whitney_extension, SimpextSolution, SimpextViolation,
};
pub use forms::{BarycentricForm, Term};
pub use spaces::{instantiate, pullback_matrix, FormBasis, SimplicialSpace};

use crate::error::{Error, Result};

/// A vertex map between simplices: local vertex `v` of the domain goes to
/// local vertex `images[v]` of the codomain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimplicialMap {
    domain_dim: usize,
    codomain_dim: usize,
    images: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(domain_dim: usize, codomain_dim: usize, images: Vec<usize>) -> Result<Self> {
        if images.len() != domain_dim + 1 || images.iter().any(|&w| w > codomain_dim) {
            return Err(Error::DimensionMismatch(format!(
                "vertex images {images:?} for a map from a {domain_dim}-simplex to a {codomain_dim}-simplex"
            )));
        }
        Ok(SimplicialMap {
            domain_dim,
            codomain_dim,
            images,
        })
    }

    pub fn identity(n: usize) -> Self {
        SimplicialMap {
            domain_dim: n,
            codomain_dim: n,
            images: (0..=n).collect(),
        }
    }

    /// Inclusion of the face with global vertices `sub` into the face with
    /// global vertices `sup`, both sorted.
    pub fn face_inclusion(sub: &[usize], sup: &[usize]) -> Result<Self> {
        let images = sub
            .iter()
            .map(|v| sup.iter().position(|w| w == v))
            .collect::<Option<Vec<usize>>>()
            .ok_or_else(|| Error::UnknownFace(sub.to_vec()))?;
        Self::new(sub.len() - 1, sup.len() - 1, images)
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SimplicialMap) -> Result<Self> {
        if inner.codomain_dim != self.domain_dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose a map into a {}-simplex with one from a {}-simplex",
                inner.codomain_dim, self.domain_dim
            )));
        }
        Self::new(
            inner.domain_dim,
            self.codomain_dim,
            inner.images.iter().map(|&v| self.images[v]).collect(),
        )
    }

    /// Sorted codomain vertices hit by the map.
    pub fn image_face(&self) -> Vec<usize> {
        let mut v = self.images.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The same map with codomain restricted to its image face.
    pub fn onto_image(&self) -> Self {
        let face = self.image_face();
        SimplicialMap {
            domain_dim: self.domain_dim,
            codomain_dim: face.len() - 1,
            images: self
                .images
                .iter()
                .map(|w| face.binary_search(w).expect("image lies in the image face"))
                .collect(),
        }
    }

    pub fn is_bijective(&self) -> bool {
        self.domain_dim == self.codomain_dim && self.image_face().len() == self.images.len()
    }
}

/// `T^n ≤ Q^{n+1}` in local vertex indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StandardSimplexPair {
    pub n: usize,
}

impl StandardSimplexPair {
    pub fn new(n: usize) -> Self {
        StandardSimplexPair { n }
    }

    /// Vertices `e_0, …, e_n` of `T^n`.
    pub fn t_face(&self) -> Vec<usize> {
        (0..=self.n).collect()
    }

    /// Local index of the origin of `Q^{n+1}`.
    pub fn origin(&self) -> usize {
        self.n + 1
    }

    /// `Q^{n+1}` as a complex.
    pub fn q_complex(&self) -> SimplicialComplex {
        SimplicialComplex::simplex(self.n + 1)
    }
}

/// `Φ_K^𝒯`: the vertex map sending the `i`-th vertex of `K` (sorted) to
/// `e_i` and every other vertex of the complex to the origin of `Q^{m+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseMap {
    face: Vec<usize>,
    images: Vec<usize>,
}

pub fn collapse_map(complex: &SimplicialComplex, face: &[usize]) -> Result<CollapseMap> {
    let k = complex.face_index(face)?;
    let face = complex.face(k).to_vec();
    let origin = face.len();
    let images = (0..complex.vertex_count())
        .map(|v| face.iter().position(|&w| w == v).unwrap_or(origin))
        .collect();
    Ok(CollapseMap { face, images })
}

impl CollapseMap {
    /// Dimension `m` of the collapsed face.
    pub fn m(&self) -> usize {
        self.face.len() - 1
    }

    /// Image of each vertex of the complex in `Q^{m+1}`.
    pub fn vertex_images(&self) -> &[usize] {
        &self.images
    }

    /// `Φ_K^F` for the face with global vertices `face`.
    pub fn restricted(&self, face: &[usize]) -> SimplicialMap {
        SimplicialMap {
            domain_dim: face.len() - 1,
            codomain_dim: self.m() + 1,
            images: face.iter().map(|&v| self.images[v]).collect(),
        }
    }

    /// `Q_K^F`, the image face in local indices of `Q^{m+1}`.
    pub fn image_face(&self, face: &[usize]) -> Vec<usize> {
        self.restricted(face).image_face()
    }
}
