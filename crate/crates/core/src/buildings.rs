//! The spherical building of proper nonzero subspaces of a vector space:
//! exact over finite prime fields, and over the rationals for the
//! apartments hit by the abelianization map from subgroup graphs.

use std::collections::{BTreeMap, HashMap};

use num::{BigInt, BigRational, One, Zero};

use crate::complexes::{order_complex, subset_chain_complex, PosetView, SimplicialComplex};
use crate::error::{Error, Result};
use crate::factors::FreeFactor;
use crate::homology::{reduced_homology, wedge_of_spheres_rank, HomologyResult};
use crate::limits::Limits;
use crate::stallings::CoreGraph;
use crate::words::Word;

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn fp_inv(a: u64, q: u64) -> u64 {
    // Fermat inverse; q is prime and a nonzero.
    let mut base = a % q;
    let mut exp = q - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    acc
}

/// Canonical reduced row echelon form over F_q; zero rows are dropped and
/// rows are ordered by pivot column.
fn rref_fp(q: u64, mut rows: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    for row in &mut rows {
        for v in row.iter_mut() {
            *v %= q;
        }
    }
    let mut pivot_row = 0usize;
    for col in 0..ncols {
        let Some(found) = (pivot_row..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let inv = fp_inv(rows[pivot_row][col], q);
        for v in rows[pivot_row].iter_mut() {
            *v = *v * inv % q;
        }
        for r in 0..rows.len() {
            if r != pivot_row && rows[r][col] != 0 {
                let factor = rows[r][col];
                for c in 0..ncols {
                    let sub = factor * rows[pivot_row][c] % q;
                    rows[r][c] = (rows[r][c] + q - sub) % q;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    rows
}

/// Canonical reduced row echelon form over the rationals.
fn rref_q(mut rows: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivot_row = 0usize;
    for col in 0..ncols {
        let Some(found) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let inv = rows[pivot_row][col].clone();
        for v in rows[pivot_row].iter_mut() {
            *v = &*v / &inv;
        }
        for r in 0..rows.len() {
            if r != pivot_row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in 0..ncols {
                    let sub = &factor * &rows[pivot_row][c];
                    rows[r][c] = &rows[r][c] - sub;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    rows
}

/// A subspace of F_q^n in canonical reduced row echelon form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FqSubspace {
    q: u64,
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl FqSubspace {
    /// The row space of the given vectors.
    pub fn span(q: u64, n: usize, vectors: &[Vec<u64>]) -> Result<FqSubspace> {
        if !is_prime(q) {
            return Err(Error::Malformed(format!("{q} is not prime")));
        }
        for v in vectors {
            if v.len() != n {
                return Err(Error::Malformed(format!(
                    "vector length {} does not match dimension {n}",
                    v.len()
                )));
            }
        }
        Ok(FqSubspace {
            q,
            n,
            rows: rref_fp(q, vectors.to_vec()),
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn ambient_dimension(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn contains_vector(&self, v: &[u64]) -> bool {
        let mut v: Vec<u64> = v.iter().map(|&x| x % self.q).collect();
        for row in &self.rows {
            let pivot = row.iter().position(|&x| x == 1).expect("rref row has a pivot");
            let factor = v[pivot];
            if factor != 0 {
                for c in 0..self.n {
                    let sub = factor * row[c] % self.q;
                    v[c] = (v[c] + self.q - sub) % self.q;
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    /// Subspace containment.
    pub fn le(&self, other: &FqSubspace) -> bool {
        self.q == other.q
            && self.n == other.n
            && self.rows.iter().all(|r| other.contains_vector(r))
    }

    pub fn lt(&self, other: &FqSubspace) -> bool {
        self.dim() < other.dim() && self.le(other)
    }

    /// Canonical label: dimension then the rref entries.
    pub fn key(&self) -> String {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| r.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
            .collect();
        format!("d{};[{}]", self.dim(), rows.join(";"))
    }
}

impl std::fmt::Debug for FqSubspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fq(q={},{})", self.q, self.key())
    }
}

/// A subspace of Q^n in canonical reduced row echelon form.
#[derive(Clone, PartialEq, Eq)]
pub struct QSubspace {
    n: usize,
    rows: Vec<Vec<BigRational>>,
}

impl QSubspace {
    pub fn span_rational(n: usize, vectors: &[Vec<BigRational>]) -> Result<QSubspace> {
        for v in vectors {
            if v.len() != n {
                return Err(Error::Malformed(format!(
                    "vector length {} does not match dimension {n}",
                    v.len()
                )));
            }
        }
        Ok(QSubspace {
            n,
            rows: rref_q(vectors.to_vec()),
        })
    }

    pub fn span_integer(n: usize, vectors: &[Vec<i64>]) -> Result<QSubspace> {
        let rational: Vec<Vec<BigRational>> = vectors
            .iter()
            .map(|v| {
                v.iter()
                    .map(|&x| BigRational::from_integer(BigInt::from(x)))
                    .collect()
            })
            .collect();
        QSubspace::span_rational(n, &rational)
    }

    pub fn ambient_dimension(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    pub fn contains_vector(&self, v: &[BigRational]) -> bool {
        let mut v = v.to_vec();
        for row in &self.rows {
            let pivot = row
                .iter()
                .position(|x| x.is_one())
                .expect("rref row has a pivot");
            if !v[pivot].is_zero() {
                let factor = v[pivot].clone();
                for c in 0..self.n {
                    let sub = &factor * &row[c];
                    v[c] = &v[c] - sub;
                }
            }
        }
        v.iter().all(Zero::is_zero)
    }

    pub fn le(&self, other: &QSubspace) -> bool {
        self.n == other.n && self.rows.iter().all(|r| other.contains_vector(r))
    }

    pub fn lt(&self, other: &QSubspace) -> bool {
        self.dim() < other.dim() && self.le(other)
    }

    /// Canonical label with exact fraction entries.
    pub fn key(&self) -> String {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        format!("d{};[{}]", self.dim(), rows.join(";"))
    }
}

impl std::fmt::Debug for QSubspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Q({})", self.key())
    }
}

/// Gaussian binomial coefficient: the number of k-dimensional subspaces of
/// F_q^n.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let qi = |e: usize| -> BigInt {
        // q^e − 1
        num::pow::pow(BigInt::from(q), e) - 1
    };
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= qi(n - i);
        den *= qi(i + 1);
    }
    num / den
}

fn desk_scale_ok(n: usize, q: u64) -> bool {
    (n <= 4 && q <= 3) || (n <= 3 && q <= 5)
}

/// All proper nonzero subspaces of F_q^n, in canonical (dim, rref) order.
/// Subspaces are generated directly as reduced row echelon forms: choose
/// the pivot columns, then run through the free entries.
pub fn enumerate_subspaces(n: usize, q: u64, limits: &Limits) -> Result<Vec<FqSubspace>> {
    if !is_prime(q) {
        return Err(Error::Malformed(format!("{q} is not prime")));
    }
    if n < 2 {
        return Err(Error::Malformed("ambient dimension must be at least 2".into()));
    }
    if !desk_scale_ok(n, q) && !limits.allow_large {
        return Err(Error::DeskScale(format!(
            "building for n={n}, q={q} exceeds the default window"
        )));
    }
    let total: BigInt = (1..n).map(|k| gaussian_binomial(n, k, q)).sum();
    if total > BigInt::from(limits.max_states) {
        return Err(Error::ResourceCap {
            what: "enumerating subspaces",
            limit: limits.max_states,
            progress: format!("{total} subspaces would be generated"),
        });
    }

    let mut out = Vec::new();
    for k in 1..n {
        for pivots in combinations(n, k) {
            // Free positions: row i may hold anything in columns right of
            // its pivot that are not pivot columns themselves.
            let mut free: Vec<(usize, usize)> = Vec::new();
            for (i, &p) in pivots.iter().enumerate() {
                for c in p + 1..n {
                    if !pivots.contains(&c) {
                        free.push((i, c));
                    }
                }
            }
            // The resource guard above keeps q^free countable in u128.
            let combos = u128::from(q).pow(free.len() as u32);
            for code in 0..combos {
                let mut rows = vec![vec![0u64; n]; k];
                for (i, &p) in pivots.iter().enumerate() {
                    rows[i][p] = 1;
                }
                let mut c = code;
                for &(i, col) in &free {
                    rows[i][col] = (c % u128::from(q)) as u64;
                    c /= u128::from(q);
                }
                out.push(FqSubspace { q, n, rows });
            }
        }
    }
    out.sort_by_key(|s| (s.dim(), s.rows.clone()));
    debug_assert_eq!(BigInt::from(out.len()), total);
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (0..n).combinations(k).collect()
}

/// The spherical building: order complex of proper nonzero subspaces of
/// F_q^n under inclusion.
pub fn build_building(n: usize, q: u64, limits: &Limits) -> Result<SimplicialComplex> {
    let subspaces = enumerate_subspaces(n, q, limits)?;
    let mut order: Vec<usize> = (0..subspaces.len()).collect();
    order.sort_by(|&a, &b| subspaces[a].key().cmp(&subspaces[b].key()));
    let sorted: Vec<&FqSubspace> = order.iter().map(|&i| &subspaces[i]).collect();
    let keys: Vec<String> = sorted.iter().map(|s| s.key()).collect();
    let poset = PosetView::new(keys, |i, j| sorted[i].lt(sorted[j]))?;
    order_complex(&poset, limits)
}

/// The apartment of the building spanned by n independent vectors: the
/// subcomplex of flags of subspaces spanned by proper nonempty subsets.
pub fn building_apartment(
    n: usize,
    q: u64,
    vectors: &[Vec<u64>],
) -> Result<SimplicialComplex> {
    if vectors.len() != n {
        return Err(Error::Malformed(format!(
            "expected {n} vectors, got {}",
            vectors.len()
        )));
    }
    let all = FqSubspace::span(q, n, vectors)?;
    if all.dim() != n {
        return Err(Error::DependentVectors);
    }
    subset_chain_complex(n, |mask| {
        let subset: Vec<Vec<u64>> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| vectors[i].clone())
            .collect();
        FqSubspace::span(q, n, &subset).expect("validated input").key()
    })
}

/// Rational apartment on n independent integer vectors, returned together
/// with the subspace at each vertex.
pub fn rational_apartment_with_subspaces(
    vectors: &[Vec<i64>],
) -> Result<(SimplicialComplex, Vec<QSubspace>)> {
    let n = vectors.len();
    let all = QSubspace::span_integer(n, vectors)?;
    if all.dim() != n {
        return Err(Error::DependentVectors);
    }
    let mut by_key: BTreeMap<String, QSubspace> = BTreeMap::new();
    let full: u32 = (1 << n) - 1;
    for mask in 1..full {
        let subset: Vec<Vec<i64>> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| vectors[i].clone())
            .collect();
        let s = QSubspace::span_integer(n, &subset)?;
        by_key.insert(s.key(), s);
    }
    let complex = subset_chain_complex(n, |mask| {
        let subset: Vec<Vec<i64>> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| vectors[i].clone())
            .collect();
        QSubspace::span_integer(n, &subset).expect("validated input").key()
    })?;
    let subspaces: Vec<QSubspace> = complex
        .vertex_labels()
        .iter()
        .map(|k| by_key[k].clone())
        .collect();
    Ok((complex, subspaces))
}

/// The rational subspace spanned by the exponent vectors of a subgroup's
/// basis words: the image of the subgroup under abelianization.
pub fn abelianize(g: &CoreGraph) -> QSubspace {
    let vectors: Vec<Vec<i64>> = g
        .subgroup_basis()
        .iter()
        .map(Word::exponent_vector)
        .collect();
    QSubspace::span_integer(g.ambient_rank(), &vectors).expect("lengths match")
}

/// A verified simplicial isomorphism from the apartment of a basis of the
/// free group onto the rational building apartment of its abelianization.
pub struct ApartmentMap {
    pub fc_apartment: SimplicialComplex,
    pub fc_factors: Vec<FreeFactor>,
    pub building_apartment: SimplicialComplex,
    pub building_subspaces: Vec<QSubspace>,
    /// Vertex map: fc vertex index → building vertex index.
    pub vertex_map: Vec<usize>,
    /// Image of the fundamental cycle: per building facet, a ±1
    /// coefficient; the chain is verified to be a nonzero cycle.
    pub cycle_image: Vec<(usize, i64)>,
}

/// Builds and verifies the apartment map induced by abelianization: the
/// vertex map must be injective and carry facets bijectively onto the
/// facets of the rational apartment, and the fundamental cycle must push
/// forward to a cycle with coefficient ±1 on every image facet.
pub fn induced_apartment_map(basis: &[Word]) -> Result<ApartmentMap> {
    let (fc_apartment, fc_factors) = crate::factors::apartment_with_factors(basis)?;
    let vectors: Vec<Vec<i64>> = basis.iter().map(Word::exponent_vector).collect();
    let (building, subspaces) = rational_apartment_with_subspaces(&vectors)
        .map_err(|e| match e {
            Error::DependentVectors => Error::Internal(
                "abelianized basis vectors are dependent".into(),
            ),
            other => other,
        })?;

    let building_index: HashMap<String, usize> = building
        .vertex_labels()
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), i))
        .collect();
    let mut vertex_map = Vec::with_capacity(fc_factors.len());
    for factor in &fc_factors {
        let image = abelianize(factor.core());
        let target = building_index.get(&image.key()).ok_or_else(|| {
            Error::Internal(format!(
                "abelianized factor {} misses the building apartment",
                factor.key()
            ))
        })?;
        vertex_map.push(*target);
    }
    let mut seen = vec![false; building.vertex_count()];
    for &t in &vertex_map {
        if seen[t] {
            return Err(Error::Internal("vertex map is not injective".into()));
        }
        seen[t] = true;
    }

    // Facets must map onto facets, bijectively.
    let building_facets: HashMap<Vec<usize>, usize> = building
        .facets()
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i))
        .collect();
    let mut hit = vec![false; building.facet_count()];
    let mut facet_image: Vec<(usize, i64)> = Vec::with_capacity(fc_apartment.facet_count());
    for facet in fc_apartment.facets() {
        let mapped: Vec<usize> = facet.iter().map(|&v| vertex_map[v]).collect();
        let mut sorted = mapped.clone();
        sorted.sort_unstable();
        let target = *building_facets.get(&sorted).ok_or_else(|| {
            Error::Internal(format!("facet {facet:?} does not map onto a facet"))
        })?;
        if hit[target] {
            return Err(Error::Internal("facet map is not injective".into()));
        }
        hit[target] = true;
        facet_image.push((target, permutation_sign(&mapped)));
    }
    if !hit.iter().all(|&h| h) {
        return Err(Error::Internal("facet map is not onto".into()));
    }

    // Push the fundamental cycle forward and verify it stays a cycle.
    let cycle = crate::homology::fundamental_cycle(&fc_apartment).ok_or_else(|| {
        Error::Internal("apartment has no fundamental cycle".into())
    })?;
    let mut cycle_image: Vec<(usize, i64)> = cycle
        .iter()
        .map(|&(f, c)| {
            let (target, sign) = facet_image[f];
            (target, c * sign)
        })
        .collect();
    cycle_image.sort_unstable();
    if cycle_image.iter().any(|&(_, c)| c != 1 && c != -1) {
        return Err(Error::Internal("cycle image coefficient is not ±1".into()));
    }
    let mats = crate::homology::boundary_matrices(&building);
    let top = mats.last().expect("nonempty complex");
    for i in 0..top.nrows() {
        let mut acc = BigInt::zero();
        for &(j, c) in &cycle_image {
            acc += top.get(i, j) * BigInt::from(c);
        }
        if !acc.is_zero() {
            return Err(Error::Internal("cycle image has nonzero boundary".into()));
        }
    }

    Ok(ApartmentMap {
        fc_apartment,
        fc_factors,
        building_apartment: building,
        building_subspaces: subspaces,
        vertex_map,
        cycle_image,
    })
}

/// Sign of the permutation sorting the given distinct values.
fn permutation_sign(values: &[usize]) -> i64 {
    let mut v = values.to_vec();
    let mut sign = 1i64;
    for i in 0..v.len() {
        for j in (i + 1..v.len()).rev() {
            if v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
            }
        }
    }
    sign
}

/// Outcome of the top-homology rank check against the classical
/// q^(n(n−1)/2) formula.
#[derive(Debug)]
pub struct SteinbergReport {
    pub n: usize,
    pub q: u64,
    pub computed: Option<usize>,
    pub expected: BigInt,
    pub pass: bool,
    pub homology: HomologyResult,
}

/// Computes the building's homology and compares the top rank with the
/// classical formula; a non-sphere-shaped answer fails with the full
/// homology attached.
pub fn steinberg_check(n: usize, q: u64, limits: &Limits) -> Result<SteinbergReport> {
    let building = build_building(n, q, limits)?;
    let homology = reduced_homology(&building);
    let computed = wedge_of_spheres_rank(&homology, n as i64 - 2);
    let expected = num::pow::pow(BigInt::from(q), n * (n - 1) / 2);
    let pass = computed.is_some_and(|r| BigInt::from(r) == expected);
    Ok(SteinbergReport {
        n,
        q,
        computed,
        expected,
        pass,
        homology,
    })
}

/// Lifts a unimodular integer matrix to a basis of the free group: the
/// matrix is factored into elementary row operations, which are mirrored
/// by Nielsen moves on the standard basis. The returned words' exponent
/// vectors are exactly the rows of the input.
pub fn lift_unimodular(matrix: &[Vec<i64>]) -> Result<Vec<Word>> {
    let n = matrix.len();
    if n == 0 || matrix.iter().any(|r| r.len() != n) {
        return Err(Error::Malformed("matrix must be square and nonempty".into()));
    }

    #[derive(Clone, Copy)]
    enum RowOp {
        Swap(usize, usize),
        Negate(usize),
        /// row i += c · row j
        Add(usize, usize, i64),
    }

    let mut m: Vec<Vec<i64>> = matrix.to_vec();
    let mut ops: Vec<RowOp> = Vec::new();
    for col in 0..n {
        // Euclid down the column to a single ±1 pivot.
        loop {
            let mut nonzero: Vec<usize> = (col..n).filter(|&r| m[r][col] != 0).collect();
            if nonzero.is_empty() {
                return Err(Error::NotUnimodular(format!("column {col} is singular")));
            }
            nonzero.sort_by_key(|&r| m[r][col].unsigned_abs());
            let smallest = nonzero[0];
            if nonzero.len() == 1 {
                if smallest != col {
                    m.swap(col, smallest);
                    ops.push(RowOp::Swap(col, smallest));
                }
                break;
            }
            for &r in &nonzero[1..] {
                let quot = m[r][col] / m[smallest][col];
                for c in 0..n {
                    m[r][c] -= quot * m[smallest][c];
                }
                ops.push(RowOp::Add(r, smallest, -quot));
            }
        }
        if m[col][col] < 0 {
            for c in 0..n {
                m[col][c] = -m[col][c];
            }
            ops.push(RowOp::Negate(col));
        }
        if m[col][col] != 1 {
            return Err(Error::NotUnimodular(format!(
                "pivot {} in column {col}",
                m[col][col]
            )));
        }
        // Clear the column above the pivot.
        for r in 0..n {
            if r != col && m[r][col] != 0 {
                let quot = m[r][col];
                for c in 0..n {
                    m[r][c] -= quot * m[col][c];
                }
                ops.push(RowOp::Add(r, col, -quot));
            }
        }
    }

    // m is now the identity: matrix = op₁⁻¹ ∘ ... ∘ op_k⁻¹ applied to I.
    // Replay the inverse operations on the standard basis words, newest
    // first, so the word rows end up with the prescribed exponent vectors.
    let mut words: Vec<Word> = (1..=n)
        .map(|i| Word::generator(n, i))
        .collect::<Result<_>>()?;
    for op in ops.into_iter().rev() {
        match op {
            RowOp::Swap(i, j) => words.swap(i, j),
            RowOp::Negate(i) => words[i] = words[i].inverse(),
            RowOp::Add(i, j, c) => {
                // Inverse of "row i += c · row j".
                let c = -c;
                let mut acc = words[i].clone();
                let step = if c >= 0 {
                    words[j].clone()
                } else {
                    words[j].inverse()
                };
                for _ in 0..c.unsigned_abs() {
                    acc = acc.concat(&step)?;
                }
                words[i] = acc;
            }
        }
    }
    Ok(words)
}
