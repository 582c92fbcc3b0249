use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::funcspace::synth::face_name;
use crate::poset::{Elem, Poset};

/// An abstract simplicial complex given by its top cells; cells of different
/// dimensions may be mixed.
///
/// Faces are sorted vertex tuples, ordered by size and then
/// lexicographically; that order is also the element order of the face
/// poset.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    vertex_count: usize,
    cells: Vec<Vec<usize>>,
    faces: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, Elem>,
    poset: Poset,
}

impl SimplicialComplex {
    pub fn build(vertex_count: usize, cells: &[Vec<usize>]) -> Result<Self> {
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for cell in cells {
            let mut sorted = cell.clone();
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::DuplicateVertexInCell {
                        cell: cell.clone(),
                        vertex: w[0],
                    });
                }
            }
            if let Some(&v) = sorted.iter().find(|&&v| v >= vertex_count) {
                return Err(Error::IndexOutOfRange {
                    cell: cell.clone(),
                    vertex: v,
                    vertex_count,
                });
            }
            for mask in 1u64..(1 << sorted.len()) {
                faces.insert(
                    sorted
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, &v)| v)
                        .collect(),
                );
            }
        }
        let mut faces: Vec<Vec<usize>> = faces.into_iter().collect();
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let index: HashMap<Vec<usize>, Elem> =
            faces.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let mut covers = Vec::new();
        for (i, f) in faces.iter().enumerate() {
            if f.len() < 2 {
                continue;
            }
            for skip in 0..f.len() {
                let mut sub = f.clone();
                sub.remove(skip);
                covers.push((index[&sub], i));
            }
        }
        let names = faces.iter().map(|f| face_name(f)).collect();
        let poset = Poset::from_indices(names, &covers).expect("face inclusion is a partial order");
        Ok(SimplicialComplex {
            vertex_count,
            cells: cells.to_vec(),
            faces,
            index,
            poset,
        })
    }

    /// The single `n`-simplex on vertices `0..=n`.
    pub fn simplex(n: usize) -> Self {
        Self::build(n + 1, &[(0..=n).collect()]).expect("a simplex is a valid complex")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face(&self, e: Elem) -> &[usize] {
        &self.faces[e]
    }

    pub fn face_dim(&self, e: Elem) -> usize {
        self.faces[e].len() - 1
    }

    /// Index of the face with the given vertices, in any order.
    pub fn face_index(&self, vertices: &[usize]) -> Result<Elem> {
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        self.index
            .get(&sorted)
            .copied()
            .ok_or(Error::UnknownFace(sorted))
    }

    /// Largest face dimension; `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.faces.last().map(|f| f.len() - 1)
    }

    pub fn faces_of_dim(&self, m: usize) -> impl Iterator<Item = Elem> + '_ {
        (0..self.faces.len()).filter(move |&e| self.faces[e].len() == m + 1)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    /// Whether the 1-skeleton is connected (vacuously true without faces).
    pub fn is_connected(&self) -> bool {
        let vertices: Vec<usize> = self.faces_of_dim(0).map(|e| self.faces[e][0]).collect();
        let Some(&start) = vertices.first() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for e in self.faces_of_dim(1) {
                let f = &self.faces[e];
                if f.contains(&v) {
                    for &w in f {
                        if seen.insert(w) {
                            stack.push(w);
                        }
                    }
                }
            }
        }
        seen.len() == vertices.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_counts() {
        assert_eq!(SimplicialComplex::simplex(2).faces().len(), 7);
        assert_eq!(SimplicialComplex::simplex(3).faces().len(), 15);
        let square = SimplicialComplex::build(4, &[vec![0, 1, 2], vec![0, 2, 3]]).unwrap();
        assert_eq!(square.faces().len(), 11);
        assert_eq!(square.faces_of_dim(1).count(), 5);
        assert_eq!(square.dim(), Some(2));
        assert!(square.is_connected());
    }

    #[test]
    fn order_is_inclusion() {
        let c = SimplicialComplex::simplex(3);
        for a in 0..c.faces().len() {
            for b in 0..c.faces().len() {
                let subset = c.face(a).iter().all(|v| c.face(b).contains(v));
                assert_eq!(c.poset().leq(a, b), subset);
            }
        }
    }

    #[test]
    fn rejects_bad_cells() {
        assert!(matches!(
            SimplicialComplex::build(3, &[vec![0, 1, 1]]),
            Err(Error::DuplicateVertexInCell { vertex: 1, .. })
        ));
        assert!(matches!(
            SimplicialComplex::build(2, &[vec![0, 2]]),
            Err(Error::IndexOutOfRange { vertex: 2, .. })
        ));
    }

    #[test]
    fn mixed_dimensions() {
        let c = SimplicialComplex::build(5, &[vec![0, 1, 2], vec![3, 4]]).unwrap();
        assert_eq!(c.faces().len(), 7 + 3);
        assert!(!c.is_connected());
        assert_eq!(c.face_index(&[2, 0]).unwrap(), c.face_index(&[0, 2]).unwrap());
        assert!(matches!(c.face_index(&[0, 3]), Err(Error::UnknownFace(_))));
    }
}
