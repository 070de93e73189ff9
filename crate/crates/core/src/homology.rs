//! Exact reduced simplicial homology over the integers, computed through
//! the Smith normal form of the boundary matrices.
//!
//! Matrices carry arbitrary-precision integer entries and are stored
//! sparsely; the reduction prefers pivots of smallest absolute value, so
//! the abundant ±1 entries of boundary matrices are consumed first and
//! coefficient growth stays tame.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num::{BigInt, One, Signed, Zero};
use rayon::prelude::*;

use crate::complexes::SimplicialComplex;

/// A sparse integer matrix with exact entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<HashMap<usize, BigInt>>,
}

impl IntegerMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> IntegerMatrix {
        IntegerMatrix {
            nrows,
            ncols,
            rows: vec![HashMap::new(); nrows],
        }
    }

    pub fn identity(n: usize) -> IntegerMatrix {
        let mut m = IntegerMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> IntegerMatrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = IntegerMatrix::zero(nrows, ncols);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                if v != 0 {
                    m.set(i, j, BigInt::from(v));
                }
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.rows[i].get(&j).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        assert!(i < self.nrows && j < self.ncols);
        if v.is_zero() {
            self.rows[i].remove(&j);
        } else {
            self.rows[i].insert(j, v);
        }
    }

    pub fn nonzero_count(&self) -> usize {
        self.rows.iter().map(HashMap::len).sum()
    }

    /// Dense product, for small consistency checks.
    pub fn multiply(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = IntegerMatrix::zero(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for (&k, a) in &self.rows[i] {
                for (&j, b) in &other.rows[k] {
                    let cur = out.get(i, j) + a * b;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(HashMap::is_empty)
    }
}

/// Mutable sparse workspace for the Smith reduction: row-major entries with
/// a per-column index of occupied rows.
struct SnfWorkspace {
    rows: Vec<HashMap<usize, BigInt>>,
    cols: Vec<BTreeSet<usize>>,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
}

impl SnfWorkspace {
    fn new(m: &IntegerMatrix) -> SnfWorkspace {
        let mut cols = vec![BTreeSet::new(); m.ncols];
        for (i, row) in m.rows.iter().enumerate() {
            for &j in row.keys() {
                cols[j].insert(i);
            }
        }
        SnfWorkspace {
            rows: m.rows.clone(),
            cols,
            row_alive: vec![true; m.nrows],
            col_alive: vec![true; m.ncols],
        }
    }

    fn entry(&self, i: usize, j: usize) -> Option<&BigInt> {
        self.rows[i].get(&j)
    }

    fn write(&mut self, i: usize, j: usize, v: BigInt) {
        if v.is_zero() {
            if self.rows[i].remove(&j).is_some() {
                self.cols[j].remove(&i);
            }
        } else {
            if self.rows[i].insert(j, v).is_none() {
                self.cols[j].insert(i);
            }
        }
    }

    /// `rows[target] -= q * rows[source]`; returns positions that became ±1.
    fn row_subtract(&mut self, target: usize, q: &BigInt, source: usize) -> Vec<(usize, usize)> {
        if q.is_zero() {
            return Vec::new();
        }
        let updates: Vec<(usize, BigInt)> = self.rows[source]
            .iter()
            .map(|(&j, v)| (j, v * q))
            .collect();
        let mut new_units = Vec::new();
        for (j, delta) in updates {
            let v = self.rows[target].get(&j).cloned().unwrap_or_else(BigInt::zero) - delta;
            let unit = v.magnitude().is_one();
            self.write(target, j, v);
            if unit {
                new_units.push((target, j));
            }
        }
        new_units
    }

    /// Drops a fully processed pivot row and column from the active set.
    fn retire(&mut self, row: usize, col: usize) {
        let entries: Vec<usize> = self.rows[row].keys().copied().collect();
        for j in entries {
            self.rows[row].remove(&j);
            self.cols[j].remove(&row);
        }
        self.row_alive[row] = false;
        self.col_alive[col] = false;
    }

    /// Smallest-|value| entry among active rows/columns, position-ordered.
    fn min_abs_entry(&self) -> Option<(usize, usize)> {
        let mut best: Option<(BigInt, usize, usize)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if !self.row_alive[i] {
                continue;
            }
            for (&j, v) in row {
                if !self.col_alive[j] {
                    continue;
                }
                let a = v.abs();
                let better = match &best {
                    None => true,
                    Some((cur, bi, bj)) => {
                        a < *cur || (a == *cur && (i, j) < (*bi, *bj))
                    }
                };
                if better {
                    best = Some((a, i, j));
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }
}

/// Invariant factors d₁ | d₂ | … of the matrix (including unit factors);
/// their count is the rank.
pub fn snf(m: &IntegerMatrix) -> Vec<BigInt> {
    let mut ws = SnfWorkspace::new(m);
    let mut unit_factors = 0usize;

    // Unit phase: a pivot of absolute value 1 clears its column with one
    // elimination sweep, and its row by column operations that touch
    // nothing else, so it can be retired immediately. Within a column the
    // shortest unit row is taken as the pivot, which keeps fill-in near
    // linear on incidence-like matrices (short rows merge into long ones).
    let mut unit_cols: BTreeSet<usize> = ws
        .rows
        .iter()
        .flat_map(|row| {
            row.iter()
                .filter(|(_, v)| v.magnitude().is_one())
                .map(|(&j, _)| j)
        })
        .collect();
    while let Some(&j) = unit_cols.iter().next() {
        unit_cols.remove(&j);
        if !ws.col_alive[j] {
            continue;
        }
        let mut best: Option<(usize, usize)> = None;
        for &r in &ws.cols[j] {
            if ws.entry(r, j).expect("indexed entry").magnitude().is_one() {
                let len = ws.rows[r].len();
                if best.is_none_or(|b| (len, r) < b) {
                    best = Some((len, r));
                }
            }
        }
        let Some((_, i)) = best else {
            continue;
        };
        let pivot = ws.entry(i, j).expect("pivot present").clone();
        let others: Vec<usize> = ws.cols[j].iter().copied().filter(|&r| r != i).collect();
        for r in others {
            let q = ws.entry(r, j).expect("indexed entry") / &pivot;
            for (_, c) in ws.row_subtract(r, &q, i) {
                unit_cols.insert(c);
            }
        }
        ws.retire(i, j);
        unit_factors += 1;
    }

    // General phase on whatever is left (the torsion core is small for the
    // complexes handled here).
    let mut factors: Vec<BigInt> = Vec::new();
    'outer: loop {
        let (mut pi, mut pj) = match ws.min_abs_entry() {
            Some(p) => p,
            None => break,
        };
        // Grind the pivot row and column down with Euclidean steps until
        // the pivot divides everything it faces.
        loop {
            let pivot = ws.entry(pi, pj).expect("pivot present").clone();
            // Reduce the pivot column.
            let col_rows: Vec<usize> = ws.cols[pj].iter().copied().filter(|&r| r != pi).collect();
            let mut dirty = false;
            for r in col_rows {
                let v = ws.entry(r, pj).expect("indexed entry").clone();
                let q = &v / &pivot;
                ws.row_subtract(r, &q, pi);
                if ws.entry(r, pj).is_some() {
                    dirty = true;
                }
            }
            if dirty {
                // A nonzero remainder is strictly smaller than the pivot;
                // adopt the smallest entry in this column as the new pivot.
                let (mut best_r, mut best_a): (Option<usize>, Option<BigInt>) = (None, None);
                for &r in &ws.cols[pj] {
                    let a = ws.entry(r, pj).expect("indexed entry").abs();
                    if best_a.as_ref().is_none_or(|b| a < *b) {
                        best_a = Some(a);
                        best_r = Some(r);
                    }
                }
                pi = best_r.expect("column nonempty");
                continue;
            }
            // Column is clean; reduce the pivot row by column operations.
            // Subtracting multiples of the pivot column only touches the
            // pivot row now, so it is a plain entry update.
            let row_cols: Vec<(usize, BigInt)> = ws.rows[pi]
                .iter()
                .filter(|(&c, _)| c != pj)
                .map(|(&c, v)| (c, v.clone()))
                .collect();
            let mut row_dirty = false;
            for (c, v) in row_cols {
                let q = &v / &pivot;
                let rem = v - &q * &pivot;
                let is_zero = rem.is_zero();
                ws.write(pi, c, rem);
                if !is_zero {
                    row_dirty = true;
                }
            }
            if row_dirty {
                let (mut best_c, mut best_a): (Option<usize>, Option<BigInt>) = (None, None);
                for (&c, v) in &ws.rows[pi] {
                    let a = v.abs();
                    if best_a.as_ref().is_none_or(|b| a < *b) {
                        best_a = Some(a);
                        best_c = Some(c);
                    }
                }
                pj = best_c.expect("row nonempty");
                continue;
            }
            // Pivot row and column are clean. Enforce divisibility against
            // the remaining submatrix: fold an offending row in and regrind.
            let pivot = ws.entry(pi, pj).expect("pivot present").clone();
            let offender = ws.rows.iter().enumerate().find_map(|(r, row)| {
                if !ws.row_alive[r] || r == pi {
                    return None;
                }
                row.iter()
                    .any(|(&c, v)| ws.col_alive[c] && !(v % &pivot).is_zero())
                    .then_some(r)
            });
            if let Some(r) = offender {
                ws.row_subtract(pi, &BigInt::from(-1), r);
                continue 'outer;
            }
            factors.push(pivot.abs());
            ws.retire(pi, pj);
            break;
        }
    }

    // The unit factors divide everything; the general-phase factors each
    // divided the whole remaining submatrix when extracted, so the chain
    // d₁ | d₂ | … holds by construction.
    let mut all = vec![BigInt::one(); unit_factors];
    all.extend(factors);
    debug_assert!(all.windows(2).all(|p| (&p[1] % &p[0]).is_zero()));
    all
}

/// Rank of the matrix over the rationals.
pub fn rank(m: &IntegerMatrix) -> usize {
    snf(m).len()
}

/// Signed boundary operators of the reduced chain complex, indexed by
/// degree: entry 0 is the augmentation map C₀ → C₋₁ (a row of ones), entry
/// d is ∂_d for 1 ≤ d ≤ dim.
pub fn boundary_matrices(k: &SimplicialComplex) -> Vec<IntegerMatrix> {
    let faces = k.faces_by_dimension();
    if faces.is_empty() {
        return Vec::new();
    }
    let index: Vec<HashMap<&[usize], usize>> = faces
        .iter()
        .map(|fs| {
            fs.iter()
                .enumerate()
                .map(|(i, f)| (f.as_slice(), i))
                .collect()
        })
        .collect();

    let mut mats = Vec::with_capacity(faces.len());
    let mut aug = IntegerMatrix::zero(1, faces[0].len());
    for j in 0..faces[0].len() {
        aug.set(0, j, BigInt::one());
    }
    mats.push(aug);

    for d in 1..faces.len() {
        let mut m = IntegerMatrix::zero(faces[d - 1].len(), faces[d].len());
        for (j, simplex) in faces[d].iter().enumerate() {
            for (drop, _) in simplex.iter().enumerate() {
                let mut face = simplex.clone();
                face.remove(drop);
                let i = index[d - 1][face.as_slice()];
                let sign = if drop % 2 == 0 { 1 } else { -1 };
                m.set(i, j, BigInt::from(sign));
            }
        }
        mats.push(m);
    }
    mats
}

/// Reduced homology in one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeHomology {
    pub degree: i64,
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

/// Reduced Betti numbers and torsion coefficients, degrees −1 through dim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyResult {
    pub degrees: Vec<DegreeHomology>,
}

impl HomologyResult {
    pub fn betti(&self, degree: i64) -> usize {
        self.degrees
            .iter()
            .find(|d| d.degree == degree)
            .map_or(0, |d| d.betti)
    }

    pub fn torsion(&self, degree: i64) -> &[BigInt] {
        self.degrees
            .iter()
            .find(|d| d.degree == degree)
            .map_or(&[], |d| d.torsion.as_slice())
    }

    pub fn has_torsion(&self) -> bool {
        self.degrees.iter().any(|d| !d.torsion.is_empty())
    }

    pub fn max_degree(&self) -> i64 {
        self.degrees.iter().map(|d| d.degree).max().unwrap_or(-1)
    }

    /// Unreduced Betti number (reduced plus one in degree zero for
    /// nonempty complexes).
    pub fn unreduced_betti(&self, degree: i64) -> usize {
        let reduced = self.betti(degree);
        if degree == 0 && self.max_degree() >= 0 {
            reduced + 1
        } else {
            reduced
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.degrees
                .iter()
                .map(|d| {
                    serde_json::json!({
                        "degree": d.degree,
                        "betti": d.betti,
                        "torsion": d.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }
}

/// Reduced integer homology of the complex.
pub fn reduced_homology(k: &SimplicialComplex) -> HomologyResult {
    if k.is_empty() {
        // The empty complex is a (−1)-sphere: only the empty face lives,
        // and the augmentation has nothing to hit it with.
        return HomologyResult {
            degrees: vec![DegreeHomology {
                degree: -1,
                betti: 1,
                torsion: Vec::new(),
            }],
        };
    }
    let mats = boundary_matrices(k);
    let f: Vec<usize> = k.f_vector();
    let snfs: Vec<Vec<BigInt>> = mats.par_iter().map(snf).collect();
    let rank_of = |d: usize| -> usize { snfs.get(d).map_or(0, Vec::len) };

    let dim = f.len() as i64 - 1;
    let mut degrees = Vec::with_capacity(f.len() + 1);
    degrees.push(DegreeHomology {
        degree: -1,
        betti: 1 - rank_of(0),
        torsion: Vec::new(),
    });
    for d in 0..=dim {
        let du = d as usize;
        let kernel = f[du] - rank_of(du);
        let image = rank_of(du + 1);
        let torsion: Vec<BigInt> = snfs
            .get(du + 1)
            .map(|factors| {
                factors
                    .iter()
                    .filter(|t| !t.magnitude().is_one())
                    .cloned()
                    .collect()
            })
            .unwrap_or_default();
        degrees.push(DegreeHomology {
            degree: d,
            betti: kernel - image,
            torsion,
        });
    }
    HomologyResult { degrees }
}

/// If the homology is that of a wedge of r spheres of dimension m (free,
/// concentrated in degree m, torsion-free everywhere), returns r.
pub fn wedge_of_spheres_rank(h: &HomologyResult, m: i64) -> Option<usize> {
    if h.has_torsion() {
        return None;
    }
    if h.degrees.iter().any(|d| d.degree != m && d.betti != 0) {
        return None;
    }
    Some(h.betti(m))
}

/// Computes homology and applies [`wedge_of_spheres_rank`].
pub fn is_wedge_of_spheres(k: &SimplicialComplex, m: i64) -> Option<usize> {
    wedge_of_spheres_rank(&reduced_homology(k), m)
}

/// A top-dimensional cycle with ±1 coefficients on every facet, found by
/// propagating orientations across ridges. Exists exactly when the facets
/// form a connected orientable pseudomanifold (e.g. any apartment sphere).
pub fn fundamental_cycle(k: &SimplicialComplex) -> Option<Vec<(usize, i64)>> {
    let facets = k.facets();
    if facets.is_empty() {
        return None;
    }
    let top = facets[0].len();
    if facets.iter().any(|f| f.len() != top) {
        return None;
    }
    if top == 1 {
        return None; // isolated points carry no interesting top cycle
    }

    // Ridge incidences with boundary signs.
    let mut ridges: HashMap<Vec<usize>, Vec<(usize, i64)>> = HashMap::new();
    for (fi, f) in facets.iter().enumerate() {
        for drop in 0..top {
            let mut r = f.clone();
            r.remove(drop);
            let sign = if drop % 2 == 0 { 1 } else { -1 };
            ridges.entry(r).or_default().push((fi, sign));
        }
    }
    if ridges.values().any(|v| v.len() != 2) {
        return None;
    }

    let mut coeff: Vec<Option<i64>> = vec![None; facets.len()];
    coeff[0] = Some(1);
    let mut queue = VecDeque::from([0usize]);
    while let Some(fi) = queue.pop_front() {
        let c = coeff[fi].expect("assigned before queueing");
        for drop in 0..top {
            let mut r = facets[fi].clone();
            r.remove(drop);
            let pair = &ridges[&r];
            let (other, s_other) = if pair[0].0 == fi { pair[1] } else { pair[0] };
            let s_self = pair.iter().find(|(f, _)| *f == fi).expect("incident").1;
            // Cancellation along the ridge: c·s_self + c'·s_other = 0.
            let needed = -c * s_self / s_other;
            match coeff[other] {
                None => {
                    coeff[other] = Some(needed);
                    queue.push_back(other);
                }
                Some(existing) if existing != needed => return None,
                Some(_) => {}
            }
        }
    }
    if coeff.iter().any(Option::is_none) {
        return None; // disconnected facet graph
    }
    Some(
        coeff
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i, c.expect("all assigned")))
            .collect(),
    )
}
