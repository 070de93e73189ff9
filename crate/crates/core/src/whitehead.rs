//! Whitehead minimization of subgroup graphs and the decision procedures
//! built on it: primitivity, free-factor recognition, basis extension, and
//! recognition of standard tuples of corank-one factors.
//!
//! The descent is greedy and deterministic: at each step the first move in
//! the canonical inventory that strictly reduces the edge count is applied.
//! Positive answers come with a composed automorphism as a witness, which
//! is re-verified by applying it. Negative answers rest on peak reduction:
//! a graph strictly above its minimum always admits a reducing move.

use std::collections::BTreeSet;

use num::Integer;

use crate::error::{Error, Result};
use crate::stallings::CoreGraph;
use crate::words::{whitehead_moves_cached, Automorphism, Word};

/// One descent step: the move applied and the edge count after it.
#[derive(Clone, Debug)]
pub struct MinimizationStep {
    pub mv: crate::words::WhiteheadMove,
    pub edges_after: usize,
}

/// A descent certificate: edge counts strictly decrease along the trace and
/// the final graph admits no strictly reducing move.
#[derive(Clone, Debug)]
pub struct MinimizationTrace {
    pub start: CoreGraph,
    pub steps: Vec<MinimizationStep>,
    pub final_graph: CoreGraph,
}

impl MinimizationTrace {
    /// The composed automorphism carrying `start` to `final_graph`.
    pub fn witness(&self) -> Result<Automorphism> {
        let mut acc = Automorphism::identity(self.start.ambient_rank())?;
        for step in &self.steps {
            acc = step.mv.automorphism().compose(&acc)?;
        }
        Ok(acc)
    }
}

/// Repeatedly applies the first Whitehead move (in canonical order) that
/// strictly reduces the edge count, until none does. Signed permutations
/// never change the count, so only multiplier moves are tried.
pub fn minimize(g: &CoreGraph) -> Result<MinimizationTrace> {
    if g.subgroup_rank() == 0 {
        return Err(Error::TrivialSubgroup);
    }
    let moves = whitehead_moves_cached(g.ambient_rank())?;
    let mut current = g.clone();
    let mut steps = Vec::new();
    loop {
        let edges = current.edge_count();
        let basis = current.subgroup_basis();
        let mut next = None;
        for mv in moves.iter().filter(|m| m.is_multiplier()) {
            let images: Result<Vec<Word>> =
                basis.iter().map(|w| mv.automorphism().apply(w)).collect();
            let candidate = CoreGraph::build(current.ambient_rank(), &images?)?;
            if candidate.edge_count() < edges {
                next = Some((mv.clone(), candidate));
                break;
            }
        }
        match next {
            Some((mv, candidate)) => {
                steps.push(MinimizationStep {
                    mv,
                    edges_after: candidate.edge_count(),
                });
                current = candidate;
            }
            None => break,
        }
    }
    Ok(MinimizationTrace {
        start: g.clone(),
        steps,
        final_graph: current,
    })
}

/// Outcome of a free-factor test. When positive, `witness` carries the
/// subgroup onto the letter rose on `letters`.
#[derive(Clone, Debug)]
pub struct FactorCheck {
    pub is_factor: bool,
    pub witness: Option<Automorphism>,
    pub letters: Option<BTreeSet<usize>>,
    pub trace: MinimizationTrace,
}

/// Decides whether the subgroup is a free factor of the ambient group: the
/// descent bottoms out at a letter rose exactly when it is.
pub fn is_free_factor(g: &CoreGraph) -> Result<FactorCheck> {
    if g.subgroup_rank() == 0 {
        return Err(Error::TrivialSubgroup);
    }
    let trace = minimize(g)?;
    let rose = trace.final_graph.letter_rose_letters();
    match rose {
        Some(letters) => {
            let witness = trace.witness()?;
            let image = g.image(&witness)?;
            if image != trace.final_graph {
                return Err(Error::Internal(
                    "descent witness does not reproduce the minimal graph".into(),
                ));
            }
            Ok(FactorCheck {
                is_factor: true,
                witness: Some(witness),
                letters: Some(letters),
                trace,
            })
        }
        None => Ok(FactorCheck {
            is_factor: false,
            witness: None,
            letters: None,
            trace,
        }),
    }
}

/// True iff the cyclic subgroup generated by `w` is a rank-one free factor.
/// Fast-rejects when the exponent vector is not primitive in Z^n.
pub fn is_primitive(w: &Word) -> Result<bool> {
    if w.is_identity() {
        return Err(Error::Malformed("the identity is not a candidate primitive".into()));
    }
    let gcd = w
        .exponent_vector()
        .into_iter()
        .fold(0i64, |acc, e| acc.gcd(&e));
    if gcd != 1 {
        return Ok(false);
    }
    let g = CoreGraph::build(w.ambient_rank(), std::slice::from_ref(w))?;
    Ok(is_free_factor(&g)?.is_factor)
}

/// Outcome of a basis-extension test.
#[derive(Clone, Debug)]
pub struct BasisCheck {
    pub extends: bool,
    /// Set when more words were supplied than the ambient rank admits.
    pub degenerate: bool,
    pub built_rank: usize,
    pub witness: Option<Automorphism>,
}

/// Decides whether the given k words extend to a basis of the ambient
/// group: they must freely generate a rank-k subgroup which is a free
/// factor. More than n words is degenerate, not an error.
pub fn extends_to_basis(words: &[Word]) -> Result<BasisCheck> {
    let first = words
        .first()
        .ok_or_else(|| Error::Malformed("no words supplied".into()))?;
    let rank = first.ambient_rank();
    let g = CoreGraph::build(rank, words)?;
    if words.len() > rank {
        return Ok(BasisCheck {
            extends: false,
            degenerate: true,
            built_rank: g.subgroup_rank(),
            witness: None,
        });
    }
    if g.subgroup_rank() != words.len() {
        return Ok(BasisCheck {
            extends: false,
            degenerate: false,
            built_rank: g.subgroup_rank(),
            witness: None,
        });
    }
    let check = is_free_factor(&g)?;
    Ok(BasisCheck {
        extends: check.is_factor,
        degenerate: false,
        built_rank: g.subgroup_rank(),
        witness: check.witness,
    })
}

/// Greedy joint descent on a tuple of subgroup graphs, minimizing the total
/// edge count. Returns the minimized tuple and the applied steps.
pub fn tuple_minimize(
    graphs: &[CoreGraph],
) -> Result<(Vec<CoreGraph>, Vec<MinimizationStep>)> {
    let first = graphs
        .first()
        .ok_or_else(|| Error::Malformed("no graphs supplied".into()))?;
    let rank = first.ambient_rank();
    for g in graphs {
        if g.ambient_rank() != rank {
            return Err(Error::RankMismatch {
                left: rank,
                right: g.ambient_rank(),
            });
        }
    }
    let moves = whitehead_moves_cached(rank)?;
    let mut current: Vec<CoreGraph> = graphs.to_vec();
    let mut steps = Vec::new();
    loop {
        let total: usize = current.iter().map(CoreGraph::edge_count).sum();
        let bases: Vec<Vec<Word>> = current.iter().map(CoreGraph::subgroup_basis).collect();
        let mut next = None;
        for mv in moves.iter().filter(|m| m.is_multiplier()) {
            let mut candidates = Vec::with_capacity(current.len());
            for basis in &bases {
                let images: Result<Vec<Word>> =
                    basis.iter().map(|w| mv.automorphism().apply(w)).collect();
                candidates.push(CoreGraph::build(rank, &images?)?);
            }
            let cand_total: usize = candidates.iter().map(CoreGraph::edge_count).sum();
            if cand_total < total {
                next = Some((mv.clone(), candidates, cand_total));
                break;
            }
        }
        match next {
            Some((mv, candidates, cand_total)) => {
                steps.push(MinimizationStep {
                    mv,
                    edges_after: cand_total,
                });
                current = candidates;
            }
            None => break,
        }
    }
    Ok((current, steps))
}

/// Outcome of the standard-tuple recognition for corank-one factors.
/// A positive answer is certified by the witness; a negative answer relies
/// on joint peak reduction and carries no certificate.
#[derive(Clone, Debug)]
pub struct ZSimplexCheck {
    pub is_simplex: bool,
    pub witnessed: bool,
    pub final_graphs: Vec<CoreGraph>,
    pub witness: Option<Automorphism>,
}

/// Decides whether k distinct rank-(n−1) factors are simultaneously carried
/// by one automorphism to the k roses obtained by deleting k distinct basis
/// letters.
pub fn is_z_simplex(graphs: &[CoreGraph]) -> Result<ZSimplexCheck> {
    let first = graphs
        .first()
        .ok_or_else(|| Error::Malformed("no factors supplied".into()))?;
    let rank = first.ambient_rank();
    for g in graphs {
        if g.subgroup_rank() != rank - 1 {
            return Err(Error::WrongRank {
                expected: rank - 1,
                got: g.subgroup_rank(),
            });
        }
    }
    for (i, g) in graphs.iter().enumerate() {
        for h in &graphs[..i] {
            if g == h {
                return Err(Error::Malformed("factors must be pairwise distinct".into()));
            }
        }
    }

    let (finals, steps) = tuple_minimize(graphs)?;
    let mut deleted = BTreeSet::new();
    let mut standard = true;
    for g in &finals {
        match g.letter_rose_letters() {
            Some(letters) if letters.len() == rank - 1 => {
                let missing: BTreeSet<usize> =
                    (1..=rank).filter(|i| !letters.contains(i)).collect();
                let letter = *missing.iter().next().expect("one letter missing");
                if !deleted.insert(letter) {
                    standard = false;
                    break;
                }
            }
            _ => {
                standard = false;
                break;
            }
        }
    }

    if standard {
        let mut acc = Automorphism::identity(rank)?;
        for step in &steps {
            acc = step.mv.automorphism().compose(&acc)?;
        }
        for (g, f) in graphs.iter().zip(&finals) {
            if g.image(&acc)? != *f {
                return Err(Error::Internal(
                    "tuple witness does not reproduce the minimized tuple".into(),
                ));
            }
        }
        Ok(ZSimplexCheck {
            is_simplex: true,
            witnessed: true,
            final_graphs: finals,
            witness: Some(acc),
        })
    } else {
        Ok(ZSimplexCheck {
            is_simplex: false,
            witnessed: false,
            final_graphs: finals,
            witness: None,
        })
    }
}
