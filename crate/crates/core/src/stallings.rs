//! Folded based core graphs: the canonical representation of a finitely
//! generated subgroup of a free group.
//!
//! A graph here is a deterministic automaton over the basis letters: at
//! every vertex there is at most one outgoing and at most one incoming edge
//! per label. Every constructor folds, trims to the based core and
//! renumbers vertices by a breadth-first traversal from the basepoint, so
//! two graphs represent the same subgroup exactly when they are equal.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{Automorphism, Letter, Word};

/// A folded, based, core Stallings graph, always stored in canonical form.
///
/// `out[v][l]` is the target of the l-labeled edge leaving `v` (labels are
/// 0-based internally), `inn[v][l]` the source of the l-labeled edge
/// entering `v`. The basepoint is vertex 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoreGraph {
    ambient_rank: usize,
    out: Vec<Vec<Option<usize>>>,
    inn: Vec<Vec<Option<usize>>>,
}

/// Serialized form: `{"rank": n, "basepoint": 0, "edges": [[src, dst, label], ...]}`
/// with 1-based labels.
#[derive(Serialize, Deserialize)]
struct GraphRepr {
    rank: usize,
    basepoint: usize,
    edges: Vec<(usize, usize, usize)>,
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.parent[b.max(a)] = b.min(a);
        true
    }
}

impl CoreGraph {
    /// The trivial subgroup: a lone basepoint.
    pub fn trivial(ambient_rank: usize) -> CoreGraph {
        CoreGraph {
            ambient_rank,
            out: vec![vec![None; ambient_rank]],
            inn: vec![vec![None; ambient_rank]],
        }
    }

    /// The full rose: one loop per basis letter.
    pub fn rose(ambient_rank: usize) -> CoreGraph {
        CoreGraph::letter_rose(ambient_rank, &(1..=ambient_rank).collect())
    }

    /// A single vertex with one loop per letter in `letters`.
    pub fn letter_rose(ambient_rank: usize, letters: &BTreeSet<usize>) -> CoreGraph {
        let mut g = CoreGraph::trivial(ambient_rank);
        for &l in letters {
            assert!(l >= 1 && l <= ambient_rank);
            g.out[0][l - 1] = Some(0);
            g.inn[0][l - 1] = Some(0);
        }
        g
    }

    /// Builds the subgroup graph: a wedge of loops spelling the generators,
    /// folded and trimmed to the based core.
    pub fn build(ambient_rank: usize, generators: &[Word]) -> Result<CoreGraph> {
        for w in generators {
            if w.ambient_rank() != ambient_rank {
                return Err(Error::RankMismatch {
                    left: ambient_rank,
                    right: w.ambient_rank(),
                });
            }
        }

        // Edge list over provisional vertices; 0 is the basepoint.
        let mut n_vertices = 1usize;
        let mut edges: Vec<(usize, usize, usize)> = Vec::new(); // (src, label0, dst)
        for w in generators {
            let letters = w.letters();
            if letters.is_empty() {
                continue;
            }
            let mut cur = 0usize;
            for (k, l) in letters.iter().enumerate() {
                let next = if k + 1 == letters.len() {
                    0
                } else {
                    n_vertices += 1;
                    n_vertices - 1
                };
                if l.sign() > 0 {
                    edges.push((cur, l.index() - 1, next));
                } else {
                    edges.push((next, l.index() - 1, cur));
                }
                cur = next;
            }
        }

        // Fold: merge targets of equal-labeled edges leaving (or entering)
        // the same vertex until the graph is deterministic.
        let mut dsu = Dsu::new(n_vertices);
        loop {
            let mut merged = false;
            let mut by_out: HashMap<(usize, usize), usize> = HashMap::new();
            let mut by_in: HashMap<(usize, usize), usize> = HashMap::new();
            for &(s, l, d) in &edges {
                let s = dsu.find(s);
                let d = dsu.find(d);
                if let Some(&d2) = by_out.get(&(s, l)) {
                    if d2 != d {
                        dsu.union(d, d2);
                        merged = true;
                        break;
                    }
                } else {
                    by_out.insert((s, l), d);
                }
                if let Some(&s2) = by_in.get(&(d, l)) {
                    if s2 != s {
                        dsu.union(s, s2);
                        merged = true;
                        break;
                    }
                } else {
                    by_in.insert((d, l), s);
                }
            }
            if !merged {
                break;
            }
        }

        // Assemble the folded graph on class representatives.
        let mut class_of: HashMap<usize, usize> = HashMap::new();
        let mut count = 0usize;
        for v in 0..n_vertices {
            let r = dsu.find(v);
            class_of.entry(r).or_insert_with(|| {
                count += 1;
                count - 1
            });
        }
        let base = class_of[&dsu.find(0)];
        let mut out = vec![vec![None; ambient_rank]; count];
        let mut inn = vec![vec![None; ambient_rank]; count];
        for &(s, l, d) in &edges {
            let s = class_of[&dsu.find(s)];
            let d = class_of[&dsu.find(d)];
            out[s][l] = Some(d);
            inn[d][l] = Some(s);
        }

        let mut g = CoreGraph {
            ambient_rank,
            out,
            inn,
        };
        g.trim_core(base);
        g.canonicalize(base);
        Ok(g)
    }

    /// Removes non-basepoint vertices of total degree <= 1 until none remain.
    /// Vertices are only marked dead here; `canonicalize` compacts.
    fn trim_core(&mut self, base: usize) {
        let n = self.out.len();
        let degree = |g: &CoreGraph, v: usize| -> usize {
            g.out[v].iter().flatten().count() + g.inn[v].iter().flatten().count()
        };
        let mut queue: VecDeque<usize> = (0..n)
            .filter(|&v| v != base && degree(self, v) <= 1)
            .collect();
        while let Some(v) = queue.pop_front() {
            if v == base || degree(self, v) > 1 {
                continue;
            }
            for l in 0..self.ambient_rank {
                if let Some(d) = self.out[v][l].take() {
                    self.inn[d][l] = None;
                    if d != base && degree(self, d) <= 1 {
                        queue.push_back(d);
                    }
                }
                if let Some(s) = self.inn[v][l].take() {
                    self.out[s][l] = None;
                    if s != base && degree(self, s) <= 1 {
                        queue.push_back(s);
                    }
                }
            }
        }
    }

    /// Renumbers vertices in breadth-first discovery order from the
    /// basepoint, exploring per label the outgoing then the incoming edge.
    /// Dead (degree-0 non-basepoint) vertices are dropped.
    fn canonicalize(&mut self, base: usize) {
        let mut order: Vec<usize> = Vec::with_capacity(self.out.len());
        let mut new_id: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        new_id.insert(base, 0);
        order.push(base);
        queue.push_back(base);
        while let Some(v) = queue.pop_front() {
            for l in 0..self.ambient_rank {
                for w in [self.out[v][l], self.inn[v][l]].into_iter().flatten() {
                    if let std::collections::hash_map::Entry::Vacant(e) = new_id.entry(w) {
                        e.insert(order.len());
                        order.push(w);
                        queue.push_back(w);
                    }
                }
            }
        }
        let count = order.len();
        let mut out = vec![vec![None; self.ambient_rank]; count];
        let mut inn = vec![vec![None; self.ambient_rank]; count];
        for (new_v, &old_v) in order.iter().enumerate() {
            for l in 0..self.ambient_rank {
                if let Some(d) = self.out[old_v][l] {
                    out[new_v][l] = Some(new_id[&d]);
                }
                if let Some(s) = self.inn[old_v][l] {
                    inn[new_v][l] = Some(new_id[&s]);
                }
            }
        }
        self.out = out;
        self.inn = inn;
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn basepoint(&self) -> usize {
        0
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(|row| row.iter().flatten().count()).sum()
    }

    /// Cycle rank |E| − |V| + 1 of the (connected) graph.
    pub fn subgroup_rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    pub fn is_trivial(&self) -> bool {
        self.edge_count() == 0
    }

    /// Edges as (src, dst, 1-based label), in canonical order.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let mut edges = Vec::with_capacity(self.edge_count());
        for v in 0..self.vertex_count() {
            for l in 0..self.ambient_rank {
                if let Some(d) = self.out[v][l] {
                    edges.push((v, d, l + 1));
                }
            }
        }
        edges
    }

    /// True iff reading `w` from the basepoint traverses existing edges and
    /// returns to the basepoint.
    pub fn contains(&self, w: &Word) -> Result<bool> {
        if w.ambient_rank() != self.ambient_rank {
            return Err(Error::RankMismatch {
                left: self.ambient_rank,
                right: w.ambient_rank(),
            });
        }
        let mut v = 0usize;
        for l in w.letters() {
            let next = if l.sign() > 0 {
                self.out[v][l.index() - 1]
            } else {
                self.inn[v][l.index() - 1]
            };
            match next {
                Some(u) => v = u,
                None => return Ok(false),
            }
        }
        Ok(v == 0)
    }

    /// Breadth-first spanning tree from the basepoint in canonical edge
    /// order; returns, per vertex, the word spelled by the tree path from
    /// the basepoint, plus the set of tree edges.
    fn spanning_tree(&self) -> (Vec<Word>, BTreeSet<(usize, usize, usize)>) {
        let n = self.vertex_count();
        let rank = self.ambient_rank;
        let mut path: Vec<Option<Word>> = vec![None; n];
        let mut tree: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        let mut queue = VecDeque::new();
        path[0] = Some(Word::identity(rank));
        queue.push_back(0usize);
        while let Some(v) = queue.pop_front() {
            for l in 0..rank {
                if let Some(d) = self.out[v][l] {
                    if path[d].is_none() {
                        let step = Word::from_letters(rank, [Letter::positive(l + 1)]).unwrap();
                        path[d] = Some(path[v].as_ref().unwrap().concat(&step).unwrap());
                        tree.insert((v, d, l + 1));
                        queue.push_back(d);
                    }
                }
                if let Some(s) = self.inn[v][l] {
                    if path[s].is_none() {
                        let step =
                            Word::from_letters(rank, [Letter::positive(l + 1).inverse()]).unwrap();
                        path[s] = Some(path[v].as_ref().unwrap().concat(&step).unwrap());
                        tree.insert((s, v, l + 1));
                        queue.push_back(s);
                    }
                }
            }
        }
        let paths = path.into_iter().map(|p| p.expect("graph connected")).collect();
        (paths, tree)
    }

    /// A free basis of the subgroup, one word per non-tree edge, in
    /// canonical edge order. `build` of the result reproduces the graph.
    pub fn subgroup_basis(&self) -> Vec<Word> {
        let (paths, tree) = self.spanning_tree();
        let mut basis = Vec::with_capacity(self.subgroup_rank());
        for (s, d, l) in self.edges() {
            if tree.contains(&(s, d, l)) {
                continue;
            }
            let step = Word::from_letters(self.ambient_rank, [Letter::positive(l)]).unwrap();
            let w = paths[s]
                .concat(&step)
                .unwrap()
                .concat(&paths[d].inverse())
                .unwrap();
            basis.push(w);
        }
        basis
    }

    /// The image subgroup under an automorphism of the ambient group.
    pub fn image(&self, a: &Automorphism) -> Result<CoreGraph> {
        if a.rank() != self.ambient_rank {
            return Err(Error::RankMismatch {
                left: self.ambient_rank,
                right: a.rank(),
            });
        }
        let words: Result<Vec<Word>> = self.subgroup_basis().iter().map(|w| a.apply(w)).collect();
        CoreGraph::build(self.ambient_rank, &words?)
    }

    /// The intersection of the two subgroups: the component of the pair of
    /// basepoints in the product automaton, trimmed to the core.
    pub fn intersect(&self, other: &CoreGraph) -> Result<CoreGraph> {
        if other.ambient_rank != self.ambient_rank {
            return Err(Error::RankMismatch {
                left: self.ambient_rank,
                right: other.ambient_rank,
            });
        }
        let rank = self.ambient_rank;
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut queue = VecDeque::new();
        ids.insert((0, 0), 0);
        pairs.push((0, 0));
        queue.push_back((0usize, 0usize));
        let mut edges: Vec<(usize, usize, usize)> = Vec::new();
        while let Some((u, v)) = queue.pop_front() {
            let uv = ids[&(u, v)];
            for l in 0..rank {
                if let (Some(a), Some(b)) = (self.out[u][l], other.out[v][l]) {
                    let next = *ids.entry((a, b)).or_insert_with(|| {
                        pairs.push((a, b));
                        queue.push_back((a, b));
                        pairs.len() - 1
                    });
                    edges.push((uv, l, next));
                }
                if let (Some(a), Some(b)) = (self.inn[u][l], other.inn[v][l]) {
                    if let std::collections::hash_map::Entry::Vacant(e) = ids.entry((a, b)) {
                        e.insert(pairs.len());
                        pairs.push((a, b));
                        queue.push_back((a, b));
                    }
                }
            }
        }
        let count = pairs.len();
        let mut out = vec![vec![None; rank]; count];
        let mut inn = vec![vec![None; rank]; count];
        for (s, l, d) in edges {
            out[s][l] = Some(d);
            inn[d][l] = Some(s);
        }
        let mut g = CoreGraph {
            ambient_rank: rank,
            out,
            inn,
        };
        g.trim_core(0);
        g.canonicalize(0);
        Ok(g)
    }

    /// If the graph is a single vertex whose loops carry distinct single
    /// letters, returns that letter set (the trivial graph gives the empty
    /// set); otherwise `None`.
    pub fn letter_rose_letters(&self) -> Option<BTreeSet<usize>> {
        if self.vertex_count() != 1 {
            return None;
        }
        Some(
            (0..self.ambient_rank)
                .filter(|&l| self.out[0][l].is_some())
                .map(|l| l + 1)
                .collect(),
        )
    }

    /// Canonical string key; equal keys mean equal subgroups.
    pub fn key(&self) -> String {
        let edges: Vec<String> = self
            .edges()
            .into_iter()
            .map(|(s, d, l)| format!("{}{}{}", s, Letter::positive(l).to_char(), d))
            .collect();
        format!(
            "n{};v{};{}",
            self.ambient_rank,
            self.vertex_count(),
            edges.join(",")
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        let repr = GraphRepr {
            rank: self.ambient_rank,
            basepoint: 0,
            edges: self.edges(),
        };
        serde_json::to_value(repr).expect("graph serializes")
    }

    /// Parses and validates a serialized graph, then renumbers canonically.
    pub fn from_json(v: &serde_json::Value) -> Result<CoreGraph> {
        let repr: GraphRepr = serde_json::from_value(v.clone())?;
        if repr.rank == 0 || repr.rank > crate::words::MAX_RANK {
            return Err(Error::Malformed(format!("ambient rank {} out of range", repr.rank)));
        }
        let max_v = repr
            .edges
            .iter()
            .map(|&(s, d, _)| s.max(d))
            .chain([repr.basepoint])
            .max()
            .unwrap_or(0);
        let count = max_v + 1;
        let mut out = vec![vec![None; repr.rank]; count];
        let mut inn = vec![vec![None; repr.rank]; count];
        for &(s, d, l) in &repr.edges {
            if l == 0 || l > repr.rank {
                return Err(Error::Malformed(format!("edge label {l} out of range")));
            }
            if out[s][l - 1].is_some() || inn[d][l - 1].is_some() {
                return Err(Error::Malformed("graph is not folded".into()));
            }
            out[s][l - 1] = Some(d);
            inn[d][l - 1] = Some(s);
        }
        // Reject disconnected or non-core inputs rather than silently fixing.
        let mut real: BTreeSet<usize> = repr
            .edges
            .iter()
            .flat_map(|&(s, d, _)| [s, d])
            .collect();
        real.insert(repr.basepoint);
        let degree = |v: usize| -> usize {
            out[v].iter().flatten().count() + inn[v].iter().flatten().count()
        };
        for &v in &real {
            if v != repr.basepoint && degree(v) <= 1 {
                return Err(Error::Malformed("graph is not a based core graph".into()));
            }
        }
        let mut seen = BTreeSet::from([repr.basepoint]);
        let mut queue = VecDeque::from([repr.basepoint]);
        while let Some(v) = queue.pop_front() {
            for l in 0..repr.rank {
                for u in [out[v][l], inn[v][l]].into_iter().flatten() {
                    if seen.insert(u) {
                        queue.push_back(u);
                    }
                }
            }
        }
        if seen != real {
            return Err(Error::Malformed("graph is not connected".into()));
        }
        let mut g = CoreGraph {
            ambient_rank: repr.rank,
            out,
            inn,
        };
        g.canonicalize(repr.basepoint);
        Ok(g)
    }
}

impl std::fmt::Debug for CoreGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CoreGraph({})", self.key())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(rank: usize, s: &str) -> Word {
        Word::parse(rank, s).unwrap()
    }

    fn build(rank: usize, gens: &[&str]) -> CoreGraph {
        let words: Vec<Word> = gens.iter().map(|s| w(rank, s)).collect();
        CoreGraph::build(rank, &words).unwrap()
    }

    #[test]
    fn sub_rose() {
        let g = build(3, &["x", "y"]);
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.subgroup_rank(), 2);
    }

    #[test]
    fn folded_conjugate_shape() {
        // Hand folding: x-loop at the base, a y-edge, an x-loop at the far
        // vertex.
        let g = build(3, &["x", "yxY"]);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.subgroup_rank(), 2);
        let edges = g.edges();
        assert!(edges.contains(&(0, 0, 1)));
        assert!(edges.contains(&(0, 1, 2)));
        assert!(edges.contains(&(1, 1, 1)));
    }

    #[test]
    fn empty_build_is_trivial() {
        let g = CoreGraph::build(3, &[]).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.subgroup_rank(), 0);
        assert!(g.is_trivial());
    }

    #[test]
    fn membership_examples() {
        let g = build(3, &["x", "yxY"]);
        assert!(!g.contains(&w(3, "y")).unwrap());
        assert!(g.contains(&w(3, "yxxY")).unwrap());
        assert!(g.contains(&Word::identity(3)).unwrap());
    }

    /// All reduced products of at most `k` factors drawn from the
    /// generators and their inverses.
    fn products(rank: usize, gens: &[&str], k: usize) -> BTreeSet<String> {
        let mut factors: Vec<Word> = Vec::new();
        for g in gens {
            factors.push(w(rank, g));
            factors.push(w(rank, g).inverse());
        }
        let mut current: BTreeSet<Vec<Letter>> = BTreeSet::new();
        current.insert(Vec::new());
        let mut all = current.clone();
        for _ in 0..k {
            let mut next = BTreeSet::new();
            for p in &current {
                let pw = Word::from_letters(rank, p.iter().copied()).unwrap();
                for f in &factors {
                    next.insert(pw.concat(f).unwrap().letters().to_vec());
                }
            }
            all.extend(next.iter().cloned());
            current = next;
        }
        all.into_iter()
            .map(|ls| Word::from_letters(rank, ls).unwrap().to_string())
            .collect()
    }

    #[test]
    fn membership_agrees_with_product_enumeration() {
        let gens = ["x", "yxY"];
        let g = build(2, &gens);
        let inside = products(2, &gens, 6);
        // Soundness: every short product traces back to the basepoint.
        for s in products(2, &gens, 4) {
            assert!(g.contains(&w(2, &s)).unwrap(), "missing {s}");
        }
        // Completeness on short words: any reduced word of length <= 3 the
        // graph accepts shows up among bounded products.
        let letters = ["x", "X", "y", "Y"];
        let mut pool = vec![String::new()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for p in &pool {
                for l in letters {
                    next.push(format!("{p}{l}"));
                }
            }
            pool.extend(next);
        }
        for s in pool {
            let word = w(2, &s);
            if g.contains(&word).unwrap() {
                assert!(inside.contains(&word.to_string()), "extra {word}");
            }
        }
    }

    #[test]
    fn basis_examples() {
        let rose = build(3, &["x", "y"]);
        let basis: Vec<String> = rose.subgroup_basis().iter().map(|w| w.to_string()).collect();
        assert_eq!(basis, vec!["x", "y"]);

        let g = build(3, &["x", "yxY"]);
        let basis: Vec<String> = g.subgroup_basis().iter().map(|w| w.to_string()).collect();
        assert_eq!(basis, vec!["x", "yxY"]);

        assert!(CoreGraph::trivial(3).subgroup_basis().is_empty());
    }

    #[test]
    fn basis_roundtrip() {
        for gens in [vec!["x", "yxY"], vec!["xy", "yz"], vec!["xyX", "zz"]] {
            let g = build(3, &gens);
            let rebuilt = CoreGraph::build(3, &g.subgroup_basis()).unwrap();
            assert_eq!(g, rebuilt);
        }
    }

    #[test]
    fn generator_order_is_irrelevant() {
        assert_eq!(build(3, &["x", "yxY"]), build(3, &["yxY", "x"]));
    }

    #[test]
    fn based_subgroups_stay_distinct() {
        let a = build(2, &["xy"]);
        let b = build(2, &["yx"]);
        assert_ne!(a, b);
        // Membership cross-check: xy separates the two subgroups.
        assert!(a.contains(&w(2, "xy")).unwrap());
        assert!(!b.contains(&w(2, "xy")).unwrap());
    }

    #[test]
    fn image_examples() {
        let g = build(2, &["x"]);
        let id = Automorphism::identity(2).unwrap();
        assert_eq!(g.image(&id).unwrap(), g);

        let a = Automorphism::new(
            vec![w(2, "xy"), w(2, "y")],
            vec![w(2, "xY"), w(2, "y")],
        )
        .unwrap();
        assert_eq!(g.image(&a).unwrap(), build(2, &["xy"]));
    }

    #[test]
    fn intersection_examples() {
        let a = build(3, &["x", "y"]);
        let b = build(3, &["y", "z"]);
        assert_eq!(a.intersect(&b).unwrap(), build(3, &["y"]));
        assert_eq!(a.intersect(&a).unwrap(), a);
        let c = build(3, &["x"]);
        let d = build(3, &["y"]);
        assert!(c.intersect(&d).unwrap().is_trivial());
    }

    #[test]
    fn letter_rose_detection() {
        let rose = build(3, &["x", "z"]);
        assert_eq!(
            rose.letter_rose_letters(),
            Some(BTreeSet::from([1, 3]))
        );
        assert_eq!(build(3, &["xy"]).letter_rose_letters(), None);
        assert_eq!(
            CoreGraph::trivial(3).letter_rose_letters(),
            Some(BTreeSet::new())
        );
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let g = build(3, &["x", "yxY"]);
        let v = g.to_json();
        assert_eq!(CoreGraph::from_json(&v).unwrap(), g);
        // An unfolded graph is rejected.
        let bad = serde_json::json!({
            "rank": 2, "basepoint": 0,
            "edges": [[0, 1, 1], [0, 2, 1]]
        });
        assert!(CoreGraph::from_json(&bad).is_err());
        // A dangling (non-core) vertex is rejected.
        let bad = serde_json::json!({
            "rank": 2, "basepoint": 0,
            "edges": [[0, 0, 1], [0, 1, 2]]
        });
        assert!(CoreGraph::from_json(&bad).is_err());
    }

    #[test]
    fn rank_is_bounded_by_generators() {
        let g = build(3, &["xy", "yx", "xxyy"]);
        assert!(g.subgroup_rank() <= 3);
        // Free generation gives equality.
        assert_eq!(build(3, &["x", "y", "z"]).subgroup_rank(), 3);
    }
}
