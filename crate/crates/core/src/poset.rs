//! Finite posets stored as explicit order closures.
//!
//! Elements are addressed by dense indices ([`Elem`]) and carry opaque string
//! names. The order is kept as one bitset of lower bounds and one of upper
//! bounds per element, so `leq` is a single bit probe.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Index of an element within its [`Poset`].
pub type Elem = usize;

#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    names: Vec<String>,
    index: HashMap<String, Elem>,
    /// `down[f]` holds every `k` with `k ≤ f`.
    down: Vec<FixedBitSet>,
    /// `up[k]` holds every `f` with `k ≤ f`.
    up: Vec<FixedBitSet>,
}

/// Direction of a peel ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeelDirection {
    /// Repeatedly remove a maximal element of what remains; every suffix of
    /// the sequence is a lower set.
    Down,
    /// Repeatedly add a minimal element of what is missing; every prefix of
    /// the sequence is a lower set.
    Up,
}

/// A downward-closed subset of a poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerSet {
    members: FixedBitSet,
}

impl Poset {
    /// Builds a poset from element names and `(lower, upper)` cover pairs.
    ///
    /// The stored order is the reflexive-transitive closure of the covers.
    pub fn new<S: AsRef<str>>(elements: &[S], covers: &[(S, S)]) -> Result<Self> {
        let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_owned()).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::DuplicateIdentifier(n.clone()));
            }
        }
        let lookup = |s: &S| {
            index
                .get(s.as_ref())
                .copied()
                .ok_or_else(|| Error::UnknownIdentifier(s.as_ref().to_owned()))
        };
        let pairs = covers
            .iter()
            .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(names, &pairs)
    }

    /// Like [`Poset::new`] with covers given as index pairs into `names`.
    pub fn from_indices(names: Vec<String>, covers: &[(Elem, Elem)]) -> Result<Self> {
        let n = names.len();
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateIdentifier(name.clone()));
            }
        }
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(Error::UnknownIdentifier(format!("#{}", a.max(b))));
            }
            succ[a].push(b);
        }
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (start, reach) in up.iter_mut().enumerate() {
            let mut stack = vec![start];
            reach.insert(start);
            while let Some(x) = stack.pop() {
                for &y in &succ[x] {
                    if !reach.contains(y) {
                        reach.insert(y);
                        stack.push(y);
                    }
                }
            }
        }
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for (k, reach) in up.iter().enumerate() {
            for f in reach.ones() {
                down[f].insert(k);
            }
        }
        for a in 0..n {
            for b in up[a].ones() {
                if b != a && up[b].contains(a) {
                    return Err(Error::CycleDetected(names[a].clone(), names[b].clone()));
                }
            }
        }
        Ok(Poset {
            names,
            index,
            down,
            up,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.len()
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<Elem> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownIdentifier(name.to_owned()))
    }

    pub fn lookup<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<Elem>> {
        names.iter().map(|n| self.index_of(n.as_ref())).collect()
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.up[a].contains(b)
    }

    pub fn lt(&self, a: Elem, b: Elem) -> bool {
        a != b && self.leq(a, b)
    }

    /// Elements `k ≤ f`, in index order.
    pub fn lower_bounds(&self, f: Elem) -> impl Iterator<Item = Elem> + '_ {
        self.down[f].ones()
    }

    /// Elements `f ≥ k`, in index order.
    pub fn upper_bounds(&self, k: Elem) -> impl Iterator<Item = Elem> + '_ {
        self.up[k].ones()
    }

    /// Number of pairs in the order relation, reflexive pairs included.
    pub fn relation_size(&self) -> usize {
        self.up.iter().map(|s| s.count_ones(..)).sum()
    }

    /// All `(k, f)` with `k ≤ f`.
    pub fn comparable_pairs(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.elements()
            .flat_map(move |k| self.up[k].ones().map(move |f| (k, f)))
    }

    /// The Hasse diagram: `(k, f)` with `k < f` and nothing strictly between.
    pub fn covers(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for k in self.elements() {
            for f in self.up[k].ones() {
                if f == k {
                    continue;
                }
                let between = self.up[k]
                    .ones()
                    .any(|g| g != k && g != f && self.leq(g, f));
                if !between {
                    out.push((k, f));
                }
            }
        }
        out
    }

    /// The unique element above every other element, if any.
    pub fn top(&self) -> Option<Elem> {
        self.elements()
            .find(|&t| self.down[t].count_ones(..) == self.len())
    }

    pub fn maximal_elements(&self) -> Vec<Elem> {
        self.elements()
            .filter(|&e| self.up[e].count_ones(..) == 1)
            .collect()
    }

    /// `Δ(t) = {f | f ≤ t}`.
    pub fn down_set(&self, t: Elem) -> LowerSet {
        LowerSet {
            members: self.down[t].clone(),
        }
    }

    pub fn is_lower_set(&self, members: &[Elem]) -> bool {
        self.lower_set(members).is_ok()
    }

    /// Validates that `members` is downward closed.
    pub fn lower_set(&self, members: &[Elem]) -> Result<LowerSet> {
        let mut set = FixedBitSet::with_capacity(self.len());
        for &m in members {
            set.insert(m);
        }
        for m in set.ones() {
            if let Some(missing) = self.down[m].ones().find(|&k| !set.contains(k)) {
                return Err(Error::NotLowerSet {
                    member: self.names[m].clone(),
                    missing: self.names[missing].clone(),
                });
            }
        }
        Ok(LowerSet { members: set })
    }

    pub fn full_set(&self) -> LowerSet {
        let mut members = FixedBitSet::with_capacity(self.len());
        members.insert_range(..);
        LowerSet { members }
    }

    pub fn empty_set(&self) -> LowerSet {
        LowerSet {
            members: FixedBitSet::with_capacity(self.len()),
        }
    }

    /// `𝔗 ⊔ {⊤}` with the new element above everything. Returns the extended
    /// poset and the index of the new top, which is always `self.len()`.
    pub fn adjoin_top(&self) -> (Poset, Elem) {
        let mut top_name = String::from("⊤");
        while self.index.contains_key(&top_name) {
            top_name.push('\'');
        }
        let n = self.len();
        let mut names = self.names.clone();
        names.push(top_name);
        let mut covers = self.covers();
        covers.extend(self.maximal_elements().into_iter().map(|m| (m, n)));
        let hat = Poset::from_indices(names, &covers).expect("adjoining a top cannot create a cycle");
        (hat, n)
    }

    /// The sub-poset on `members` (kept in the given order) with the induced
    /// order.
    pub fn induced(&self, members: &[Elem]) -> Poset {
        let names = members.iter().map(|&m| self.names[m].clone()).collect();
        let mut covers = Vec::new();
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                if i != j && self.leq(a, b) {
                    covers.push((i, j));
                }
            }
        }
        Poset::from_indices(names, &covers).expect("induced order of a poset is a poset")
    }

    /// Deterministic peel ordering; ties are broken by element name.
    pub fn peel_sequence(&self, direction: PeelDirection) -> Vec<Elem> {
        self.peel_with(direction, |candidates| {
            *candidates
                .iter()
                .min_by(|&&a, &&b| self.names[a].cmp(&self.names[b]))
                .expect("nonempty candidate set")
        })
    }

    /// A uniformly chosen valid peel ordering, step by step.
    pub fn random_peel<R: Rng + ?Sized>(&self, direction: PeelDirection, rng: &mut R) -> Vec<Elem> {
        self.peel_with(direction, |candidates| {
            *candidates.choose(rng).expect("nonempty candidate set")
        })
    }

    fn peel_with(
        &self,
        direction: PeelDirection,
        mut pick: impl FnMut(&[Elem]) -> Elem,
    ) -> Vec<Elem> {
        let mut remaining = FixedBitSet::with_capacity(self.len());
        remaining.insert_range(..);
        let mut out = Vec::with_capacity(self.len());
        while out.len() < self.len() {
            let candidates: Vec<Elem> = remaining
                .ones()
                .filter(|&e| {
                    let relatives = match direction {
                        PeelDirection::Down => &self.up[e],
                        PeelDirection::Up => &self.down[e],
                    };
                    relatives.ones().all(|x| x == e || !remaining.contains(x))
                })
                .collect();
            let e = pick(&candidates);
            remaining.set(e, false);
            out.push(e);
        }
        out
    }

    /// Whether `sequence` is a permutation of the elements satisfying the
    /// peel condition for `direction`.
    pub fn is_valid_peel(&self, sequence: &[Elem], direction: PeelDirection) -> bool {
        if sequence.len() != self.len() {
            return false;
        }
        let mut seen = FixedBitSet::with_capacity(self.len());
        for &e in sequence {
            if e >= self.len() || seen.contains(e) {
                return false;
            }
            let ok = match direction {
                // everything above e was already removed
                PeelDirection::Down => self.up[e].ones().all(|x| x == e || seen.contains(x)),
                // everything below e was already added
                PeelDirection::Up => self.down[e].ones().all(|x| x == e || seen.contains(x)),
            };
            if !ok {
                return false;
            }
            seen.insert(e);
        }
        true
    }
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<(&str, &str)> = self
            .covers()
            .into_iter()
            .map(|(a, b)| (self.name(a), self.name(b)))
            .collect();
        f.debug_struct("Poset")
            .field("elements", &self.names)
            .field("covers", &covers)
            .finish()
    }
}

impl LowerSet {
    pub fn contains(&self, e: Elem) -> bool {
        self.members.contains(e)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        self.members.ones()
    }

    pub fn to_vec(&self) -> Vec<Elem> {
        self.iter().collect()
    }

    /// Whether `t` is a maximal member (no other member lies above it).
    pub fn is_maximal(&self, poset: &Poset, t: Elem) -> bool {
        self.contains(t) && poset.upper_bounds(t).all(|f| f == t || !self.contains(f))
    }

    /// `self ∖ {t}`; the caller guarantees `t` is maximal.
    pub fn without(&self, t: Elem) -> LowerSet {
        let mut members = self.members.clone();
        members.set(t, false);
        LowerSet { members }
    }

    /// `self ⊔ {t}`; the caller guarantees `t` is minimal in the complement.
    pub fn with(&self, t: Elem) -> LowerSet {
        let mut members = self.members.clone();
        members.insert(t);
        LowerSet { members }
    }
}
