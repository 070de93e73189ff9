//! Freely reduced words over a fixed finite basis, and the Nielsen /
//! Whitehead automorphisms that act on them.
//!
//! Generator `i` is written as the `i`-th letter of the cycle
//! `x, y, z, a, b, ..., w` and its inverse as the corresponding uppercase
//! letter, so `"xyX"` denotes x·y·x⁻¹. The empty word is the identity and
//! is printed as `"1"`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use itertools::Itertools;
use once_cell::sync::Lazy;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Largest supported ambient rank (one generator per latin letter).
pub const MAX_RANK: usize = 26;

/// Ranks for which the full Whitehead move inventory may be enumerated.
/// The inventory has n!·2ⁿ + 2n·2^(2n−2) members and is unusable far
/// beyond desk scale anyway.
pub const MAX_MOVE_RANK: usize = 8;

fn index_to_char(index: usize) -> char {
    debug_assert!((1..=MAX_RANK).contains(&index));
    if index <= 3 {
        (b'x' + (index as u8 - 1)) as char
    } else {
        (b'a' + (index as u8 - 4)) as char
    }
}

fn char_to_index(c: char) -> Option<usize> {
    match c.to_ascii_lowercase() {
        'x' => Some(1),
        'y' => Some(2),
        'z' => Some(3),
        c @ 'a'..='w' => Some(c as usize - 'a' as usize + 4),
        _ => None,
    }
}

/// A single signed generator: index in `1..=rank`, sign ±1.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i8);

impl Letter {
    pub fn new(index: usize, sign: i8) -> Result<Letter> {
        if index == 0 || index > MAX_RANK {
            return Err(Error::Malformed(format!("generator index {index} out of range")));
        }
        match sign {
            1 => Ok(Letter(index as i8)),
            -1 => Ok(Letter(-(index as i8))),
            _ => Err(Error::Malformed(format!("sign must be ±1, got {sign}"))),
        }
    }

    pub fn positive(index: usize) -> Letter {
        Letter::new(index, 1).expect("valid index")
    }

    pub fn index(&self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn sign(&self) -> i8 {
        if self.0 > 0 {
            1
        } else {
            -1
        }
    }

    pub fn inverse(&self) -> Letter {
        Letter(-self.0)
    }

    /// Canonical enumeration code: x < X < y < Y < ... Used for the
    /// deterministic ordering of Whitehead moves.
    pub fn code(&self) -> usize {
        (self.index() - 1) * 2 + usize::from(self.0 < 0)
    }

    pub fn from_code(code: usize) -> Letter {
        let index = code / 2 + 1;
        if code.is_multiple_of(2) {
            Letter(index as i8)
        } else {
            Letter(-(index as i8))
        }
    }

    pub fn to_char(&self) -> char {
        let c = index_to_char(self.index());
        if self.0 > 0 {
            c
        } else {
            c.to_ascii_uppercase()
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        let index = char_to_index(c)?;
        Some(if c.is_ascii_uppercase() {
            Letter(-(index as i8))
        } else {
            Letter(index as i8)
        })
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.code().cmp(&other.code())
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A freely reduced word in the free group of the given ambient rank.
/// Words are immutable values; equality is sequence equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

/// Pushes a letter onto a reduced buffer, cancelling with the top if needed.
fn push_reduced(buf: &mut Vec<Letter>, l: Letter) {
    if buf.last() == Some(&l.inverse()) {
        buf.pop();
    } else {
        buf.push(l);
    }
}

impl Word {
    /// Freely reduces an arbitrary letter sequence.
    pub fn from_letters<I>(rank: usize, letters: I) -> Result<Word>
    where
        I: IntoIterator<Item = Letter>,
    {
        if rank == 0 || rank > MAX_RANK {
            return Err(Error::Malformed(format!("ambient rank {rank} out of range")));
        }
        let mut buf = Vec::new();
        for l in letters {
            if l.index() > rank {
                return Err(Error::Malformed(format!(
                    "letter {} exceeds ambient rank {rank}",
                    l
                )));
            }
            push_reduced(&mut buf, l);
        }
        Ok(Word { rank, letters: buf })
    }

    pub fn identity(rank: usize) -> Word {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    pub fn generator(rank: usize, index: usize) -> Result<Word> {
        Word::from_letters(rank, [Letter::new(index, 1)?])
    }

    /// Parses the text syntax; `"1"` and `""` denote the identity.
    pub fn parse(rank: usize, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "1" {
            if rank == 0 || rank > MAX_RANK {
                return Err(Error::Malformed(format!("ambient rank {rank} out of range")));
            }
            return Ok(Word::identity(rank));
        }
        let mut letters = Vec::with_capacity(text.len());
        for c in text.chars() {
            let l = Letter::from_char(c)
                .ok_or_else(|| Error::Malformed(format!("unknown letter '{c}'")))?;
            letters.push(l);
        }
        Word::from_letters(rank, letters)
    }

    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    fn check_rank(&self, other: &Word) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        Ok(())
    }

    /// Group multiplication with free reduction at the junction.
    pub fn concat(&self, other: &Word) -> Result<Word> {
        self.check_rank(other)?;
        let mut buf = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut buf, l);
        }
        Ok(Word {
            rank: self.rank,
            letters: buf,
        })
    }

    /// The formal inverse: reversed and negated.
    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(Letter::inverse).collect(),
        }
    }

    /// Strips matching first/last letters until none remain.
    pub fn cyclic_reduce(&self) -> Word {
        let mut letters = self.letters.as_slice();
        while letters.len() >= 2 && letters[0] == letters[letters.len() - 1].inverse() {
            letters = &letters[1..letters.len() - 1];
        }
        Word {
            rank: self.rank,
            letters: letters.to_vec(),
        }
    }

    /// Exponent-sum vector in Z^rank (the abelianized image).
    pub fn exponent_vector(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for l in &self.letters {
            v[l.index() - 1] += l.sign() as i64;
        }
        v
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// Substitutes `images[i-1]` for generator `i` (inverted for negative
/// letters) and freely reduces.
fn substitute(images: &[Word], w: &Word) -> Word {
    let mut buf = Vec::new();
    for l in &w.letters {
        let image = &images[l.index() - 1];
        if l.sign() > 0 {
            for &m in &image.letters {
                push_reduced(&mut buf, m);
            }
        } else {
            for &m in image.letters.iter().rev() {
                push_reduced(&mut buf, m.inverse());
            }
        }
    }
    Word {
        rank: w.rank,
        letters: buf,
    }
}

/// An automorphism of the free group, stored together with its inverse so
/// that inversion is free and membership in Aut is certified at build time.
#[derive(Clone, PartialEq, Eq)]
pub struct Automorphism {
    rank: usize,
    images: Vec<Word>,
    inverse_images: Vec<Word>,
}

impl Automorphism {
    /// Builds an automorphism from generator images and inverse images,
    /// verifying that the two compose to the identity on the basis.
    pub fn new(images: Vec<Word>, inverse_images: Vec<Word>) -> Result<Automorphism> {
        let rank = images.len();
        if rank == 0 || rank > MAX_RANK {
            return Err(Error::InvalidAutomorphism(format!("rank {rank} out of range")));
        }
        if inverse_images.len() != rank {
            return Err(Error::InvalidAutomorphism(format!(
                "{} images but {} inverse images",
                rank,
                inverse_images.len()
            )));
        }
        for w in images.iter().chain(&inverse_images) {
            if w.ambient_rank() != rank {
                return Err(Error::RankMismatch {
                    left: rank,
                    right: w.ambient_rank(),
                });
            }
        }
        for i in 0..rank {
            let gen = Word::generator(rank, i + 1)?;
            if substitute(&inverse_images, &images[i]) != gen {
                return Err(Error::InvalidAutomorphism(format!(
                    "inverse images do not undo the image of generator {}",
                    index_to_char(i + 1)
                )));
            }
            if substitute(&images, &inverse_images[i]) != gen {
                return Err(Error::InvalidAutomorphism(format!(
                    "images do not undo the inverse image of generator {}",
                    index_to_char(i + 1)
                )));
            }
        }
        Ok(Automorphism {
            rank,
            images,
            inverse_images,
        })
    }

    pub fn identity(rank: usize) -> Result<Automorphism> {
        let images: Result<Vec<Word>> = (1..=rank).map(|i| Word::generator(rank, i)).collect();
        let images = images?;
        Automorphism::new(images.clone(), images)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn image_of(&self, index: usize) -> &Word {
        &self.images[index - 1]
    }

    pub fn inverse_image_of(&self, index: usize) -> &Word {
        &self.inverse_images[index - 1]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.letters.len() == 1 && w.letters[0] == Letter::positive(i + 1))
    }

    /// Applies the automorphism to a word: substitute and reduce.
    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.ambient_rank() != self.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: w.ambient_rank(),
            });
        }
        Ok(substitute(&self.images, w))
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        let images = other
            .images
            .iter()
            .map(|w| substitute(&self.images, w))
            .collect();
        let inverse_images = self
            .inverse_images
            .iter()
            .map(|w| substitute(&other.inverse_images, w))
            .collect();
        Automorphism::new(images, inverse_images)
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            rank: self.rank,
            images: self.inverse_images.clone(),
            inverse_images: self.images.clone(),
        }
    }

    /// The induced integer matrix on the abelianization; column `j` is the
    /// exponent vector of the image of generator `j+1`.
    pub fn abelianization_matrix(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.rank]; self.rank];
        for (j, w) in self.images.iter().enumerate() {
            for (i, e) in w.exponent_vector().into_iter().enumerate() {
                m[i][j] = e;
            }
        }
        m
    }

    /// JSON form: generator names mapped to word strings, plus a parallel
    /// `"inverse"` object.
    pub fn to_json(&self) -> Value {
        let imgs: serde_json::Map<String, Value> = (1..=self.rank)
            .map(|i| {
                (
                    index_to_char(i).to_string(),
                    Value::String(self.images[i - 1].to_string()),
                )
            })
            .collect();
        let invs: serde_json::Map<String, Value> = (1..=self.rank)
            .map(|i| {
                (
                    index_to_char(i).to_string(),
                    Value::String(self.inverse_images[i - 1].to_string()),
                )
            })
            .collect();
        json!({ "rank": self.rank, "images": imgs, "inverse": invs })
    }

    pub fn from_json(v: &Value) -> Result<Automorphism> {
        let rank = v
            .get("rank")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Malformed("automorphism json missing rank".into()))?
            as usize;
        let read = |key: &str| -> Result<Vec<Word>> {
            let obj = v
                .get(key)
                .and_then(Value::as_object)
                .ok_or_else(|| Error::Malformed(format!("automorphism json missing {key}")))?;
            (1..=rank)
                .map(|i| {
                    let name = index_to_char(i).to_string();
                    let s = obj
                        .get(&name)
                        .and_then(Value::as_str)
                        .ok_or_else(|| Error::Malformed(format!("missing image of {name}")))?;
                    Word::parse(rank, s)
                })
                .collect()
        };
        Automorphism::new(read("images")?, read("inverse")?)
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (1..=self.rank)
            .map(|i| format!("{}->{}", index_to_char(i), self.images[i - 1]))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// A set of signed letters, stored as a bitmask over letter codes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LetterSet(u64);

impl LetterSet {
    pub fn empty() -> LetterSet {
        LetterSet(0)
    }

    pub fn insert(&mut self, l: Letter) {
        self.0 |= 1 << l.code();
    }

    pub fn contains(&self, l: Letter) -> bool {
        self.0 >> l.code() & 1 == 1
    }

    pub fn remove(&mut self, l: Letter) {
        self.0 &= !(1 << l.code());
    }

    pub fn bits(&self) -> u64 {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..64).filter(|c| self.0 >> c & 1 == 1).map(Letter::from_code)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.iter().map(|l| l.to_char()).join(","))
    }
}

/// The two kinds of Whitehead moves.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MoveKind {
    /// A signed permutation of the basis: generator `i+1` maps to `images[i]`.
    SignedPermutation { images: Vec<Letter> },
    /// Multiplier letter `a` and a letter set `A` with `a ∈ A`, `a⁻¹ ∉ A`;
    /// generator x maps to a^{-[x⁻¹∈A]} · x · a^{[x∈A]}, the generator
    /// underlying `a` is fixed.
    Multiplier { multiplier: Letter, set: LetterSet },
}

/// A Whitehead move together with its realization as an automorphism.
#[derive(Clone, PartialEq, Eq)]
pub struct WhiteheadMove {
    rank: usize,
    kind: MoveKind,
    auto: Automorphism,
}

impl WhiteheadMove {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kind(&self) -> &MoveKind {
        &self.kind
    }

    pub fn automorphism(&self) -> &Automorphism {
        &self.auto
    }

    pub fn is_multiplier(&self) -> bool {
        matches!(self.kind, MoveKind::Multiplier { .. })
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            MoveKind::SignedPermutation { images } => {
                let parts: Vec<String> = images
                    .iter()
                    .enumerate()
                    .map(|(i, l)| format!("{}->{}", index_to_char(i + 1), l.to_char()))
                    .collect();
                format!("perm[{}]", parts.join(","))
            }
            MoveKind::Multiplier { multiplier, set } => {
                format!("mult[a={}, A={:?}]", multiplier.to_char(), set)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match &self.kind {
            MoveKind::SignedPermutation { images } => json!({
                "kind": "permutation",
                "images": images.iter().map(|l| l.to_char().to_string()).collect::<Vec<_>>(),
            }),
            MoveKind::Multiplier { multiplier, set } => json!({
                "kind": "multiplier",
                "multiplier": multiplier.to_char().to_string(),
                "set": set.iter().map(|l| l.to_char().to_string()).collect::<Vec<_>>(),
            }),
        }
    }
}

impl fmt::Debug for WhiteheadMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

fn permutation_automorphism(rank: usize, images: &[Letter]) -> Result<Automorphism> {
    let img_words: Result<Vec<Word>> = images
        .iter()
        .map(|l| Word::from_letters(rank, [*l]))
        .collect();
    let mut inv = vec![None; rank];
    for (i, l) in images.iter().enumerate() {
        inv[l.index() - 1] = Some(Letter::new(i + 1, l.sign())?);
    }
    let inv_words: Result<Vec<Word>> = inv
        .into_iter()
        .map(|l| {
            let l = l.ok_or_else(|| {
                Error::InvalidAutomorphism("signed permutation is not a bijection".into())
            })?;
            Word::from_letters(rank, [l])
        })
        .collect();
    Automorphism::new(img_words?, inv_words?)
}

/// Images of the generators under the multiplier move `(A, a)`.
fn multiplier_images(rank: usize, multiplier: Letter, set: &LetterSet) -> Result<Vec<Word>> {
    let mut images = Vec::with_capacity(rank);
    for g in 1..=rank {
        if g == multiplier.index() {
            images.push(Word::generator(rank, g)?);
            continue;
        }
        let pos = Letter::positive(g);
        let neg = pos.inverse();
        let mut letters = Vec::with_capacity(3);
        if set.contains(neg) {
            letters.push(multiplier.inverse());
        }
        letters.push(pos);
        if set.contains(pos) {
            letters.push(multiplier);
        }
        images.push(Word::from_letters(rank, letters)?);
    }
    Ok(images)
}

fn multiplier_automorphism(rank: usize, multiplier: Letter, set: LetterSet) -> Result<Automorphism> {
    let images = multiplier_images(rank, multiplier, &set)?;
    // The inverse of (A, a) is (A − a + a⁻¹, a⁻¹).
    let mut inv_set = set;
    inv_set.remove(multiplier);
    inv_set.insert(multiplier.inverse());
    let inverse_images = multiplier_images(rank, multiplier.inverse(), &inv_set)?;
    Automorphism::new(images, inverse_images)
}

/// Enumerates all Whitehead moves for the given rank: signed permutations
/// (Type I) first, then multiplier moves (Type II) sorted by
/// (multiplier letter, bitmask of A). The identity is excluded and
/// duplicates are pruned.
pub fn whitehead_moves(rank: usize) -> Result<Vec<WhiteheadMove>> {
    if rank == 0 {
        return Err(Error::Malformed("rank must be at least 1".into()));
    }
    if rank > MAX_MOVE_RANK {
        return Err(Error::Unsupported(format!(
            "whitehead move enumeration is limited to rank <= {MAX_MOVE_RANK}"
        )));
    }

    let mut type1 = Vec::new();
    for perm in (1..=rank).permutations(rank) {
        for mask in 0u32..1 << rank {
            let images: Vec<Letter> = perm
                .iter()
                .enumerate()
                .map(|(i, &g)| {
                    Letter::new(g, if mask >> i & 1 == 1 { -1 } else { 1 }).expect("valid letter")
                })
                .collect();
            let identity = images
                .iter()
                .enumerate()
                .all(|(i, l)| l.index() == i + 1 && l.sign() == 1);
            if identity {
                continue;
            }
            let auto = permutation_automorphism(rank, &images)?;
            type1.push(WhiteheadMove {
                rank,
                kind: MoveKind::SignedPermutation { images },
                auto,
            });
        }
    }
    type1.sort_by_key(|m| match &m.kind {
        MoveKind::SignedPermutation { images } => images.iter().map(Letter::code).collect::<Vec<_>>(),
        MoveKind::Multiplier { .. } => unreachable!(),
    });

    let mut type2 = Vec::new();
    for mult_code in 0..2 * rank {
        let multiplier = Letter::from_code(mult_code);
        let others: Vec<Letter> = (0..2 * rank)
            .filter(|&c| c != mult_code && c != multiplier.inverse().code())
            .map(Letter::from_code)
            .collect();
        for mask in 1u64..1 << others.len() {
            let mut set = LetterSet::empty();
            set.insert(multiplier);
            for (i, &l) in others.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    set.insert(l);
                }
            }
            let auto = multiplier_automorphism(rank, multiplier, set)?;
            if auto.is_identity() {
                continue;
            }
            type2.push(WhiteheadMove {
                rank,
                kind: MoveKind::Multiplier { multiplier, set },
                auto,
            });
        }
    }
    type2.sort_by_key(|m| match &m.kind {
        MoveKind::Multiplier { multiplier, set } => (multiplier.code(), set.bits()),
        MoveKind::SignedPermutation { .. } => unreachable!(),
    });

    let mut seen: BTreeSet<Vec<Vec<Letter>>> = BTreeSet::new();
    let mut moves = Vec::with_capacity(type1.len() + type2.len());
    for mv in type1.into_iter().chain(type2) {
        let sig: Vec<Vec<Letter>> = mv.auto.images.iter().map(|w| w.letters.clone()).collect();
        if seen.insert(sig) {
            moves.push(mv);
        }
    }
    Ok(moves)
}

static MOVE_CACHE: Lazy<Mutex<HashMap<usize, Arc<Vec<WhiteheadMove>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Cached variant of [`whitehead_moves`]; the inventory per rank is fixed.
pub fn whitehead_moves_cached(rank: usize) -> Result<Arc<Vec<WhiteheadMove>>> {
    let mut cache = MOVE_CACHE.lock().expect("move cache poisoned");
    if let Some(v) = cache.get(&rank) {
        return Ok(v.clone());
    }
    let moves = Arc::new(whitehead_moves(rank)?);
    cache.insert(rank, moves.clone());
    Ok(moves)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(rank: usize, s: &str) -> Word {
        Word::parse(rank, s).unwrap()
    }

    /// Independent single-pass stack oracle for free reduction.
    fn stack_reduce(rank: usize, s: &str) -> Word {
        let mut stack: Vec<Letter> = Vec::new();
        for c in s.chars() {
            let l = Letter::from_char(c).unwrap();
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word::from_letters(rank, stack).unwrap()
    }

    #[test]
    fn letter_text_roundtrip() {
        for i in 1..=MAX_RANK {
            let l = Letter::positive(i);
            assert_eq!(Letter::from_char(l.to_char()), Some(l));
            assert_eq!(Letter::from_char(l.inverse().to_char()), Some(l.inverse()));
        }
        assert_eq!(Letter::positive(1).to_char(), 'x');
        assert_eq!(Letter::positive(2).to_char(), 'y');
        assert_eq!(Letter::positive(3).to_char(), 'z');
        assert_eq!(Letter::positive(4).to_char(), 'a');
        assert_eq!(Letter::positive(26).to_char(), 'w');
    }

    #[test]
    fn free_reduce_examples() {
        assert!(w(3, "xX").is_identity());
        assert!(w(3, "xyYX").is_identity());
        assert_eq!(w(3, "xyXx"), stack_reduce(3, "xyXx"));
        assert_eq!(w(3, "xyXx").to_string(), "xy");
    }

    #[test]
    fn reduce_is_idempotent_and_nonincreasing() {
        for s in ["xyXx", "xXxXxX", "xyzZYX", "yxYxyX"] {
            let once = w(3, s);
            let twice = Word::from_letters(3, once.letters().iter().copied()).unwrap();
            assert_eq!(once, twice);
            assert!(once.len() <= s.len());
        }
    }

    #[test]
    fn parse_rejects_out_of_range() {
        assert!(Word::parse(2, "xz").is_err());
        assert!(Word::parse(3, "x?").is_err());
        assert!(Word::parse(0, "x").is_err());
    }

    #[test]
    fn identity_prints_as_one() {
        assert_eq!(Word::identity(3).to_string(), "1");
        assert_eq!(w(3, "1"), Word::identity(3));
    }

    #[test]
    fn concat_inverse_cyclic_examples() {
        assert_eq!(w(3, "xy").concat(&w(3, "Yx")).unwrap(), w(3, "xx"));
        assert_eq!(w(3, "xyZ").inverse(), w(3, "zYX"));
        assert_eq!(w(3, "Yxy").cyclic_reduce(), w(3, "x"));
        assert!(w(2, "x").concat(&w(3, "x")).is_err());
    }

    #[test]
    fn apply_examples() {
        let id = Automorphism::identity(2).unwrap();
        assert_eq!(id.apply(&w(2, "xyXY")).unwrap(), w(2, "xyXY"));

        // x -> xy, y -> y
        let a = Automorphism::new(
            vec![w(2, "xy"), w(2, "y")],
            vec![w(2, "xY"), w(2, "y")],
        )
        .unwrap();
        assert_eq!(a.apply(&w(2, "x")).unwrap(), w(2, "xy"));
        assert_eq!(a.apply(&w(2, "X")).unwrap(), w(2, "YX"));
    }

    #[test]
    fn apply_is_homomorphism() {
        let a = Automorphism::new(
            vec![w(2, "xy"), w(2, "y")],
            vec![w(2, "xY"), w(2, "y")],
        )
        .unwrap();
        for (u, v) in [("xy", "Yx"), ("xYx", "Xyy"), ("yy", "xYX")] {
            let u = w(2, u);
            let v = w(2, v);
            let lhs = a.apply(&u.concat(&v).unwrap()).unwrap();
            let rhs = a.apply(&u).unwrap().concat(&a.apply(&v).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn compose_examples() {
        let a = Automorphism::new(
            vec![w(2, "xy"), w(2, "y")],
            vec![w(2, "xY"), w(2, "y")],
        )
        .unwrap();
        let id = Automorphism::identity(2).unwrap();
        assert_eq!(a.compose(&id).unwrap(), a);
        assert!(a.compose(&a.inverse()).unwrap().is_identity());

        let swap = Automorphism::new(
            vec![w(2, "y"), w(2, "x")],
            vec![w(2, "y"), w(2, "x")],
        )
        .unwrap();
        assert!(swap.compose(&swap).unwrap().is_identity());
    }

    #[test]
    fn invalid_automorphism_rejected() {
        // x -> xy, y -> y with a wrong inverse.
        assert!(Automorphism::new(
            vec![w(2, "xy"), w(2, "y")],
            vec![w(2, "xy"), w(2, "y")],
        )
        .is_err());
        // Non-injective "images".
        assert!(Automorphism::new(
            vec![w(2, "x"), w(2, "x")],
            vec![w(2, "x"), w(2, "x")],
        )
        .is_err());
    }

    #[test]
    fn whitehead_moves_rank_one() {
        let moves = whitehead_moves(1).unwrap();
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0].automorphism().apply(&w(1, "x")).unwrap(), w(1, "X"));
    }

    #[test]
    fn multiplier_move_count_rank_two() {
        // Direct enumeration of (a, A) pairs: a has 2n choices and the other
        // 2n−2 letters are free, so 2n·2^(2n−2) pairs before pruning.
        let rank = 2;
        let mut raw = 0;
        for code in 0..2 * rank {
            let multiplier = Letter::from_code(code);
            let others = 2 * rank - 2;
            let _ = multiplier;
            raw += 1 << others;
        }
        assert_eq!(raw, 16);

        let moves = whitehead_moves(rank).unwrap();
        let type2: Vec<_> = moves.iter().filter(|m| m.is_multiplier()).collect();
        // One identity per multiplier choice is pruned.
        assert_eq!(type2.len(), 16 - 4);
    }

    #[test]
    fn moves_are_deduplicated_and_valid() {
        let moves = whitehead_moves(2).unwrap();
        let mut sigs = BTreeSet::new();
        for mv in &moves {
            assert!(!mv.automorphism().is_identity());
            let sig: Vec<String> = mv
                .automorphism()
                .images()
                .iter()
                .map(|w| w.to_string())
                .collect();
            assert!(sigs.insert(sig), "duplicate move {:?}", mv);
            // The stored inverse really is the inverse on every generator.
            for i in 1..=2 {
                let g = Word::generator(2, i).unwrap();
                let there = mv.automorphism().apply(&g).unwrap();
                let back = mv.automorphism().inverse().apply(&there).unwrap();
                assert_eq!(back, g);
            }
        }
        // Type I moves precede Type II moves.
        let first_mult = moves.iter().position(|m| m.is_multiplier()).unwrap();
        assert!(moves[..first_mult].iter().all(|m| !m.is_multiplier()));
        assert!(moves[first_mult..].iter().all(|m| m.is_multiplier()));
    }

    #[test]
    fn abelianization_matrix_tracks_apply() {
        let a = Automorphism::new(
            vec![w(2, "xy"), w(2, "y")],
            vec![w(2, "xY"), w(2, "y")],
        )
        .unwrap();
        let m = a.abelianization_matrix();
        for s in ["xyXY", "xxY", "yX"] {
            let word = w(2, s);
            let v = word.exponent_vector();
            let applied = a.apply(&word).unwrap().exponent_vector();
            for i in 0..2 {
                let expect: i64 = (0..2).map(|j| m[i][j] * v[j]).sum();
                assert_eq!(applied[i], expect);
            }
        }
    }

    #[test]
    fn automorphism_json_roundtrip() {
        let a = Automorphism::new(
            vec![w(2, "xy"), w(2, "y")],
            vec![w(2, "xY"), w(2, "y")],
        )
        .unwrap();
        let v = a.to_json();
        let b = Automorphism::from_json(&v).unwrap();
        assert_eq!(a, b);
    }
}
