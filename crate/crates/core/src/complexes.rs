//! Abstract simplicial complexes, order complexes of finite posets, links,
//! and combinatorial statistics.
//!
//! A complex stores its vertex labels (sorted, which fixes the orientation
//! order) and its facets only; faces are generated on demand. The empty
//! complex (no vertices) is a legitimate value.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::limits::Limits;

type Bits = Vec<u64>;

fn bits_new(n: usize) -> Bits {
    vec![0u64; n.div_ceil(64)]
}

fn bit_set(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn bit_get(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn bits_disjoint(a: &Bits, b: &Bits) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == 0)
}

fn bits_subset(a: &Bits, b: &Bits) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn bits_ones(b: &Bits) -> impl Iterator<Item = usize> + '_ {
    b.iter().enumerate().flat_map(|(w, &word)| {
        (0..64).filter_map(move |k| (word >> k & 1 == 1).then_some(w * 64 + k))
    })
}

/// A finite strict poset with canonical string keys, validated to be
/// irreflexive and transitive at construction.
pub struct PosetView {
    keys: Vec<String>,
    less: Vec<Bits>,
}

impl PosetView {
    /// `keys` must already be sorted and duplicate-free; `lt(i, j)` decides
    /// the strict order on those indices.
    pub fn new(keys: Vec<String>, lt: impl Fn(usize, usize) -> bool) -> Result<PosetView> {
        for pair in keys.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::InvalidPoset(
                    "element keys must be sorted and distinct".into(),
                ));
            }
        }
        let n = keys.len();
        let mut less = vec![bits_new(n); n];
        for i in 0..n {
            for j in 0..n {
                if lt(i, j) {
                    bit_set(&mut less[i], j);
                }
            }
        }
        for i in 0..n {
            if bit_get(&less[i], i) {
                return Err(Error::InvalidPoset(format!("relation is reflexive at {}", keys[i])));
            }
            for j in bits_ones(&less[i]) {
                if !bits_subset(&less[j], &less[i]) {
                    return Err(Error::InvalidPoset(format!(
                        "relation is not transitive through {}",
                        keys[j]
                    )));
                }
                if bit_get(&less[j], i) {
                    return Err(Error::InvalidPoset(format!(
                        "relation has a 2-cycle between {} and {}",
                        keys[i], keys[j]
                    )));
                }
            }
        }
        Ok(PosetView { keys, less })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, i: usize) -> &str {
        &self.keys[i]
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        bit_get(&self.less[i], j)
    }
}

/// An abstract simplicial complex with opaque canonical vertex labels and a
/// facet list forming an antichain.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimplicialComplex {
    vertex_labels: Vec<String>,
    facets: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    pub fn empty() -> SimplicialComplex {
        SimplicialComplex {
            vertex_labels: Vec::new(),
            facets: Vec::new(),
        }
    }

    /// Validating constructor: labels are sorted (reindexing facets),
    /// facets are sorted and deduplicated, the antichain property and
    /// coverage of every vertex are enforced.
    pub fn new(vertex_labels: Vec<String>, facets: Vec<Vec<usize>>) -> Result<SimplicialComplex> {
        let n = vertex_labels.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| vertex_labels[a].cmp(&vertex_labels[b]));
        let mut relabel = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new;
        }
        let sorted_labels: Vec<String> = order.iter().map(|&i| vertex_labels[i].clone()).collect();
        for pair in sorted_labels.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidComplex(format!("duplicate vertex label {}", pair[0])));
            }
        }
        let mut new_facets = Vec::with_capacity(facets.len());
        for f in facets {
            let mut g: Vec<usize> = f
                .into_iter()
                .map(|v| {
                    if v >= n {
                        Err(Error::InvalidComplex(format!("facet vertex {v} out of range")))
                    } else {
                        Ok(relabel[v])
                    }
                })
                .collect::<Result<_>>()?;
            g.sort_unstable();
            g.dedup();
            if g.is_empty() {
                return Err(Error::InvalidComplex("empty facet".into()));
            }
            if g.len() > 24 {
                return Err(Error::InvalidComplex("facet dimension beyond supported range".into()));
            }
            new_facets.push(g);
        }
        new_facets.sort();
        new_facets.dedup();

        let facet_set: BTreeSet<&Vec<usize>> = new_facets.iter().collect();
        let mut covered = vec![false; n];
        for f in &new_facets {
            for &v in f {
                covered[v] = true;
            }
            // Antichain: no proper subset of a facet may itself be a facet.
            for mask in 1u32..(1 << f.len()) - 1 {
                let sub: Vec<usize> = f
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                if facet_set.contains(&sub) {
                    return Err(Error::InvalidComplex(format!(
                        "facets are not an antichain: {sub:?} inside {f:?}"
                    )));
                }
            }
        }
        if let Some(v) = covered.iter().position(|&c| !c) {
            return Err(Error::InvalidComplex(format!(
                "vertex {} lies in no facet",
                sorted_labels[v]
            )));
        }
        Ok(SimplicialComplex {
            vertex_labels: sorted_labels,
            facets: new_facets,
        })
    }

    /// Constructor for facet lists already known to be an antichain of
    /// maximal chains over sorted labels (order complexes, links).
    pub(crate) fn from_maximal_faces(
        vertex_labels: Vec<String>,
        mut facets: Vec<Vec<usize>>,
    ) -> SimplicialComplex {
        for f in &mut facets {
            f.sort_unstable();
        }
        facets.sort();
        facets.dedup();
        debug_assert!(vertex_labels.windows(2).all(|p| p[0] < p[1]));
        SimplicialComplex {
            vertex_labels,
            facets,
        }
    }

    pub fn vertex_labels(&self) -> &[String] {
        &self.vertex_labels
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_labels.is_empty()
    }

    /// Dimension of the complex; the empty complex has dimension −1.
    pub fn dimension(&self) -> i64 {
        self.facets
            .iter()
            .map(|f| f.len() as i64 - 1)
            .max()
            .unwrap_or(-1)
    }

    /// All faces grouped by dimension: entry `d` lists the d-faces, sorted.
    pub fn faces_by_dimension(&self) -> Vec<Vec<Vec<usize>>> {
        let dim = self.dimension();
        if dim < 0 {
            return Vec::new();
        }
        let mut sets: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); dim as usize + 1];
        for f in &self.facets {
            for mask in 1u32..1 << f.len() {
                let sub: Vec<usize> = f
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                sets[sub.len() - 1].insert(sub);
            }
        }
        sets.into_iter()
            .map(|s| s.into_iter().collect())
            .collect()
    }

    /// Face counts per dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        self.faces_by_dimension().iter().map(Vec::len).collect()
    }

    /// Unreduced Euler characteristic.
    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &count)| if d % 2 == 0 { count as i64 } else { -(count as i64) })
            .sum()
    }

    /// Reduced Euler characteristic (counts the empty face with sign −1).
    pub fn reduced_euler_characteristic(&self) -> i64 {
        self.euler_characteristic() - 1
    }

    pub fn contains_face(&self, simplex: &[usize]) -> bool {
        if simplex.is_empty() {
            return true;
        }
        let mut s = simplex.to_vec();
        s.sort_unstable();
        s.dedup();
        self.facets
            .iter()
            .any(|f| s.iter().all(|v| f.binary_search(v).is_ok()))
    }

    /// The link of a face: all faces disjoint from `simplex` whose union
    /// with it is again a face. The result is re-indexed over its own
    /// (sorted) vertex set.
    pub fn link(&self, simplex: &[usize]) -> Result<SimplicialComplex> {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.iter().any(|&v| v >= self.vertex_count()) {
            return Err(Error::NotAFace(s));
        }
        if !self.contains_face(&s) {
            return Err(Error::NotAFace(s));
        }
        let mut link_facets: Vec<Vec<usize>> = Vec::new();
        for f in &self.facets {
            if s.iter().all(|v| f.binary_search(v).is_ok()) {
                let rest: Vec<usize> = f
                    .iter()
                    .copied()
                    .filter(|v| s.binary_search(v).is_err())
                    .collect();
                if !rest.is_empty() {
                    link_facets.push(rest);
                }
            }
        }
        if link_facets.is_empty() {
            return Ok(SimplicialComplex::empty());
        }
        let used: BTreeSet<usize> = link_facets.iter().flatten().copied().collect();
        let old_ids: Vec<usize> = used.into_iter().collect();
        let reindex: BTreeMap<usize, usize> =
            old_ids.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let labels: Vec<String> = old_ids
            .iter()
            .map(|&v| self.vertex_labels[v].clone())
            .collect();
        let facets = link_facets
            .into_iter()
            .map(|f| f.into_iter().map(|v| reindex[&v]).collect())
            .collect();
        Ok(SimplicialComplex::from_maximal_faces(labels, facets))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.vertex_labels,
            "facets": self.facets,
        })
    }

    pub fn from_json(v: &Value) -> Result<SimplicialComplex> {
        let vertices: Vec<String> = v
            .get("vertices")
            .cloned()
            .map(serde_json::from_value)
            .transpose()?
            .ok_or_else(|| Error::InvalidComplex("missing \"vertices\"".into()))?;
        let facets: Vec<Vec<usize>> = v
            .get("facets")
            .cloned()
            .map(serde_json::from_value)
            .transpose()?
            .ok_or_else(|| Error::InvalidComplex("missing \"facets\"".into()))?;
        if vertices.is_empty() && facets.is_empty() {
            return Ok(SimplicialComplex::empty());
        }
        SimplicialComplex::new(vertices, facets)
    }
}

/// The order complex of a finite poset: simplices are chains, facets are
/// the maximal chains, vertex labels are the element keys.
pub fn order_complex(poset: &PosetView, limits: &Limits) -> Result<SimplicialComplex> {
    let n = poset.len();
    if n == 0 {
        return Ok(SimplicialComplex::empty());
    }

    // Covering relation: j covers i when nothing sits strictly between.
    let mut below = vec![bits_new(n); n];
    for i in 0..n {
        for j in bits_ones(&poset.less[i]) {
            bit_set(&mut below[j], i);
        }
    }
    let mut covers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in bits_ones(&poset.less[i]) {
            if bits_disjoint(&poset.less[i], &below[j]) {
                covers[i].push(j);
            }
        }
    }

    // Every maximal chain follows covering steps from a minimal element to
    // a maximal one.
    let minimal: Vec<usize> = (0..n)
        .filter(|&i| below[i].iter().all(|&w| w == 0))
        .collect();
    let mut facets: Vec<Vec<usize>> = Vec::new();
    let mut chain: Vec<usize> = Vec::new();
    let mut stack: Vec<(usize, bool)> = minimal.iter().rev().map(|&v| (v, false)).collect();
    while let Some((v, leaving)) = stack.pop() {
        if leaving {
            chain.pop();
            continue;
        }
        chain.push(v);
        stack.push((v, true));
        if covers[v].is_empty() {
            let mut facet = chain.clone();
            facet.sort_unstable();
            facets.push(facet);
            limits.check_count("enumerating maximal chains", facets.len(), limits.max_facets, || {
                format!("{} facets so far", facets.len())
            })?;
            if facets.len().is_multiple_of(4096) {
                limits.check_deadline("enumerating maximal chains", || {
                    format!("{} facets so far", facets.len())
                })?;
            }
        } else {
            for &next in covers[v].iter().rev() {
                stack.push((next, false));
            }
        }
    }
    facets.sort();
    Ok(SimplicialComplex::from_maximal_faces(
        poset.keys.clone(),
        facets,
    ))
}

/// Order complex of the proper nonempty sub-bitmasks of `(1 << n) − 1`,
/// with the supplied per-mask labels. Shared by the apartment builders.
pub(crate) fn subset_chain_complex(
    n: usize,
    label_of_mask: impl Fn(u32) -> String,
) -> Result<SimplicialComplex> {
    let full: u32 = if n >= 32 { u32::MAX } else { (1 << n) - 1 };
    let mut items: Vec<(String, u32)> = (1..full)
        .map(|mask| (label_of_mask(mask), mask))
        .collect();
    items.sort();
    for pair in items.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::Internal(format!(
                "distinct subsets produced the same label {}",
                pair[0].0
            )));
        }
    }
    let keys: Vec<String> = items.iter().map(|(k, _)| k.clone()).collect();
    let masks: Vec<u32> = items.iter().map(|(_, m)| *m).collect();
    let poset = PosetView::new(keys, |i, j| {
        masks[i] != masks[j] && masks[i] & masks[j] == masks[i]
    })?;
    order_complex(&poset, &Limits::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subsets_complex() -> SimplicialComplex {
        // Proper nonempty subsets of {1,2,3} under strict inclusion.
        subset_chain_complex(3, |mask| format!("s{mask:03b}")).unwrap()
    }

    #[test]
    fn proper_subsets_of_three_make_a_hexagon() {
        let k = subsets_complex();
        assert_eq!(k.vertex_count(), 6);
        assert_eq!(k.f_vector(), vec![6, 6]);
        assert_eq!(k.dimension(), 1);
    }

    #[test]
    fn antichain_gives_isolated_vertices() {
        let keys: Vec<String> = (0..4).map(|i| format!("e{i}")).collect();
        let poset = PosetView::new(keys, |_, _| false).unwrap();
        let k = order_complex(&poset, &Limits::default()).unwrap();
        assert_eq!(k.vertex_count(), 4);
        assert_eq!(k.f_vector(), vec![4]);
        assert_eq!(k.dimension(), 0);
    }

    #[test]
    fn total_order_gives_one_top_simplex() {
        let keys: Vec<String> = (0..3).map(|i| format!("e{i}")).collect();
        let poset = PosetView::new(keys, |i, j| i < j).unwrap();
        let k = order_complex(&poset, &Limits::default()).unwrap();
        assert_eq!(k.facets(), &[vec![0, 1, 2]]);
        assert_eq!(k.f_vector(), vec![3, 3, 1]);
    }

    #[test]
    fn invalid_posets_are_rejected() {
        let keys: Vec<String> = (0..3).map(|i| format!("e{i}")).collect();
        // Not transitive: 0<1, 1<2, but not 0<2.
        let r = PosetView::new(keys.clone(), |i, j| (i, j) == (0, 1) || (i, j) == (1, 2));
        assert!(r.is_err());
        // Reflexive.
        let r = PosetView::new(keys.clone(), |i, j| i <= j);
        assert!(r.is_err());
        // Unsorted keys.
        let r = PosetView::new(vec!["b".into(), "a".into()], |_, _| false);
        assert!(r.is_err());
    }

    #[test]
    fn link_examples() {
        let hexagon = subsets_complex();
        // Any vertex of a 6-cycle has two isolated vertices as its link.
        for v in 0..hexagon.vertex_count() {
            let link = hexagon.link(&[v]).unwrap();
            assert_eq!(link.f_vector(), vec![2]);
        }

        // Link of the empty simplex is the complex itself.
        assert_eq!(hexagon.link(&[]).unwrap(), hexagon);

        // Link of a facet is the empty complex.
        let facet = hexagon.facets()[0].clone();
        assert!(hexagon.link(&facet).unwrap().is_empty());

        // Not a face.
        assert!(hexagon.link(&[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn link_of_an_edge_in_the_subdivided_tetrahedron_boundary() {
        // Order complex of proper nonempty subsets of {1,2,3,4}.
        let k = subset_chain_complex(4, |mask| format!("s{mask:04b}")).unwrap();
        assert_eq!(k.vertex_count(), 14);
        // The edge {1} < {1,2}: its link consists of the two supersets
        // {1,2,3} and {1,2,4}, an S⁰.
        let v1 = k.vertex_labels().iter().position(|l| l == "s0001").unwrap();
        let v12 = k.vertex_labels().iter().position(|l| l == "s0011").unwrap();
        let link = k.link(&[v1, v12]).unwrap();
        assert_eq!(link.f_vector(), vec![2]);
    }

    #[test]
    fn euler_characteristic_examples() {
        assert_eq!(subsets_complex().euler_characteristic(), 0);
        let point = SimplicialComplex::new(vec!["p".into()], vec![vec![0]]).unwrap();
        assert_eq!(point.euler_characteristic(), 1);
        assert_eq!(point.reduced_euler_characteristic(), 0);
        assert_eq!(SimplicialComplex::empty().euler_characteristic(), 0);
        assert_eq!(SimplicialComplex::empty().dimension(), -1);
    }

    #[test]
    fn validation_catches_bad_complexes() {
        // Facet list not an antichain.
        assert!(SimplicialComplex::new(
            vec!["a".into(), "b".into()],
            vec![vec![0, 1], vec![0]],
        )
        .is_err());
        // Vertex in no facet.
        assert!(SimplicialComplex::new(
            vec!["a".into(), "b".into()],
            vec![vec![0]],
        )
        .is_err());
        // Out-of-range index.
        assert!(SimplicialComplex::new(vec!["a".into()], vec![vec![1]]).is_err());
        // Duplicate label.
        assert!(SimplicialComplex::new(
            vec!["a".into(), "a".into()],
            vec![vec![0], vec![1]],
        )
        .is_err());
    }

    #[test]
    fn labels_are_sorted_on_build() {
        let k = SimplicialComplex::new(
            vec!["b".into(), "a".into()],
            vec![vec![0, 1]],
        )
        .unwrap();
        assert_eq!(k.vertex_labels(), &["a".to_string(), "b".to_string()]);
        assert_eq!(k.facets(), &[vec![0, 1]]);
    }

    #[test]
    fn json_roundtrip() {
        let k = subsets_complex();
        let v = k.to_json();
        assert_eq!(SimplicialComplex::from_json(&v).unwrap(), k);
    }
}
