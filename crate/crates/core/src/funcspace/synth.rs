//! Seeded random restriction presheaves for property testing.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FunctionSpace;
use crate::extension::ExtensionFamily;
use crate::linalg::{rat, RatMatrix};
use crate::poset::{Elem, Poset};

/// What a face's functions are defined on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Carrier {
    /// Functions on the vertices of the face. Only vertices carry
    /// vanishing-trace functions.
    Vertices,
    /// Functions on all nonempty subfaces of the face. Every face carries a
    /// one-dimensional vanishing-trace space.
    Faces,
}

/// [`synthesize_presheaf_with`] on the vertex carrier.
pub fn synthesize_presheaf(
    seed: u64,
    max_elements: usize,
    carrier_size: usize,
) -> (FunctionSpace, ExtensionFamily) {
    synthesize_presheaf_with(seed, max_elements, carrier_size, Carrier::Vertices)
}

/// A random abstract simplicial complex on at most `carrier_size` vertices
/// with at most `max_elements` faces, carrying the restriction presheaf of
/// functions on `carrier` and the extension-by-zero family.
///
/// The face carriers satisfy `X_K ∩ X_F = ⋃_{G ≤ K, G ≤ F} X_G`, which is
/// what makes extension by zero consistent.
pub fn synthesize_presheaf_with(
    seed: u64,
    max_elements: usize,
    carrier_size: usize,
    carrier: Carrier,
) -> (FunctionSpace, ExtensionFamily) {
    let max_elements = max_elements.max(1);
    let carrier_size = carrier_size.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    faces.insert(vec![rng.gen_range(0..carrier_size)]);
    for _ in 0..4 * max_elements {
        let size = rng.gen_range(1..=carrier_size.min(4));
        let mut cell: Vec<usize> = rand::seq::index::sample(&mut rng, carrier_size, size).into_vec();
        cell.sort_unstable();
        let new: Vec<Vec<usize>> = subsets(&cell)
            .into_iter()
            .filter(|s| !faces.contains(s))
            .collect();
        if faces.len() + new.len() <= max_elements {
            faces.extend(new);
        }
    }
    let mut faces: Vec<Vec<usize>> = faces.into_iter().collect();
    faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let index: BTreeMap<&[usize], Elem> = faces
        .iter()
        .enumerate()
        .map(|(i, f)| (f.as_slice(), i))
        .collect();

    let names: Vec<String> = faces.iter().map(|f| face_name(f)).collect();
    let mut covers = Vec::new();
    for (i, f) in faces.iter().enumerate() {
        if f.len() < 2 {
            continue;
        }
        for skip in 0..f.len() {
            let mut sub = f.clone();
            sub.remove(skip);
            covers.push((index[sub.as_slice()], i));
        }
    }
    let poset = Poset::from_indices(names, &covers).expect("face inclusion is a partial order");

    let carriers: Vec<Vec<Vec<usize>>> = faces
        .iter()
        .map(|f| match carrier {
            Carrier::Vertices => f.iter().map(|&v| vec![v]).collect(),
            Carrier::Faces => {
                let mut s = subsets(f);
                s.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
                s
            }
        })
        .collect();
    let dims: Vec<usize> = carriers.iter().map(Vec::len).collect();

    let mut traces = Vec::new();
    let mut embeddings = BTreeMap::new();
    for (k, f) in poset.comparable_pairs() {
        let sel = selection(&carriers[k], &carriers[f]);
        embeddings.insert((k, f), sel.transpose());
        traces.push(((k, f), sel));
    }
    let labels = carriers
        .iter()
        .map(|c| c.iter().map(|x| face_name(x)).collect())
        .collect();
    let space = FunctionSpace::new(poset, dims, traces)
        .and_then(|s| s.with_labels(labels))
        .expect("restriction presheaf is well formed");
    let space = Arc::new(space);

    let vanishing: Vec<RatMatrix> = space
        .poset()
        .elements()
        .map(|e| space.vanishing_trace(e).basis)
        .collect();
    let ops: Vec<_> = embeddings
        .into_iter()
        .map(|((k, f), emb)| ((k, f), &emb * &vanishing[k]))
        .collect();
    let family = ExtensionFamily::with_vanishing(space.clone(), vanishing, ops)
        .expect("zero extension has matching shapes");
    ((*space).clone(), family)
}

/// Canonical face name: the sorted vertex tuple, e.g. `(0,2)`.
pub(crate) fn face_name(vertices: &[usize]) -> String {
    let inner: Vec<String> = vertices.iter().map(usize::to_string).collect();
    format!("({})", inner.join(","))
}

fn subsets(cell: &[usize]) -> Vec<Vec<usize>> {
    (1u32..(1 << cell.len()))
        .map(|mask| {
            cell.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

/// Restriction from functions on `upper` to functions on `lower ⊆ upper`.
fn selection(lower: &[Vec<usize>], upper: &[Vec<usize>]) -> RatMatrix {
    let mut m = RatMatrix::zeros(lower.len(), upper.len());
    for (i, x) in lower.iter().enumerate() {
        let j = upper
            .iter()
            .position(|y| y == x)
            .expect("carrier of a subface is contained in the face carrier");
        m.set(i, j, rat(1));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_spaces_are_functorial() {
        for seed in 0..20 {
            for carrier in [Carrier::Vertices, Carrier::Faces] {
                let (space, _) = synthesize_presheaf_with(seed, 20, 6, carrier);
                assert!(space.poset().len() <= 20);
                assert!(space.verify().unwrap().is_valid());
            }
        }
    }

    #[test]
    fn single_element() {
        let (space, family) = synthesize_presheaf(5, 1, 4);
        assert_eq!(space.poset().len(), 1);
        assert_eq!(space.dim(0), 1);
        assert_eq!(*family.op(0, 0), RatMatrix::identity(1));
    }

    #[test]
    fn deterministic_in_seed() {
        let (a, _) = synthesize_presheaf(7, 20, 6);
        let (b, _) = synthesize_presheaf(7, 20, 6);
        assert_eq!(a.poset().names(), b.poset().names());
    }

    #[test]
    fn face_carrier_bubbles() {
        let (space, family) = synthesize_presheaf_with(11, 15, 5, Carrier::Faces);
        for e in space.poset().elements() {
            assert_eq!(family.vanishing_dim(e), 1);
        }
    }
}
