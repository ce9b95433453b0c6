//! Vertex addresses of the stretched gasket, cell words, the bridge segments
//! between cells, gasket vertex classes, the dihedral action and the planar
//! embedding.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_MAX_LEVEL: usize = 8;
pub const MAX_LEVEL_ENV: &str = "SSG_MAX_LEVEL";

/// Level cap for vertex enumeration, read once from `SSG_MAX_LEVEL`.
pub fn max_level() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_LEVEL_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_LEVEL)
    })
}

fn check_letter(l: u8) -> Result<u8> {
    if (1..=3).contains(&l) {
        Ok(l)
    } else {
        Err(Error::InvalidLetter(l))
    }
}

/// Finite word over the alphabet {1,2,3}.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u8>) -> Result<Self> {
        for &l in &letters {
            check_letter(l)?;
        }
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    /// `self · l`
    pub fn push(&self, l: u8) -> Word {
        let mut v = self.0.clone();
        v.push(l);
        Word(v)
    }

    /// `l · self`
    pub fn prepend(&self, l: u8) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(l);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// Drops the first letter.
    pub fn tail(&self) -> Word {
        Word(self.0.get(1..).unwrap_or(&[]).to_vec())
    }

    pub fn padded(&self, l: u8, len: usize) -> Word {
        let mut v = self.0.clone();
        while v.len() < len {
            v.push(l);
        }
        Word(v)
    }

    /// All words of length `len` in lexicographic order.
    pub fn all(len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            out = out.iter().flat_map(|w| (1..=3).map(move |l| w.push(l))).collect();
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "∅" {
            return Ok(Word::empty());
        }
        let letters = s
            .chars()
            .map(|c| match c {
                '1' => Ok(1),
                '2' => Ok(2),
                '3' => Ok(3),
                _ => Err(Error::Parse(s.to_string())),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Word(letters))
    }
}

/// Canonical vertex name `(w, i)`, the image of corner `p_i` under the cell map of `w`.
/// The word never ends with the corner letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address {
    word: Word,
    corner: u8,
}

impl Address {
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn corner(&self) -> u8 {
        self.corner
    }

    pub fn corner_of(i: u8) -> Result<Address> {
        canonicalize(&Word::empty(), i)
    }
}

/// Strips the trailing run of `corner` from `word`.
pub fn canonicalize(word: &Word, corner: u8) -> Result<Address> {
    check_letter(corner)?;
    let mut letters = word.0.clone();
    while letters.last() == Some(&corner) {
        letters.pop();
    }
    Ok(Address {
        word: Word(letters),
        corner,
    })
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.word, self.corner)
    }
}

impl FromStr for Address {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (w, c) = s.rsplit_once(':').ok_or_else(|| Error::Parse(s.to_string()))?;
        let corner: u8 = c.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        canonicalize(&w.parse()?, corner)
    }
}

/// Canonical addresses with word length at most `m`, sorted.
pub fn vertex_set(m: usize) -> Result<Vec<Address>> {
    vertex_set_capped(m, max_level())
}

pub fn vertex_set_capped(m: usize, cap: usize) -> Result<Vec<Address>> {
    if m > cap {
        return Err(Error::LevelTooDeep { level: m, cap });
    }
    let mut out = Vec::with_capacity(vertex_count(m));
    for k in 0..=m {
        for w in Word::all(k) {
            for c in 1..=3u8 {
                if w.last() != Some(c) {
                    out.push(Address {
                        word: w.clone(),
                        corner: c,
                    });
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn vertex_count(m: usize) -> usize {
    3usize.pow(m as u32 + 1)
}

/// Oriented bond `(i, j)`, one of (1,2), (2,3), (3,1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bond {
    i: u8,
    j: u8,
}

impl Bond {
    pub const ALL: [Bond; 3] = [Bond { i: 1, j: 2 }, Bond { i: 2, j: 3 }, Bond { i: 3, j: 1 }];

    pub fn i(self) -> u8 {
        self.i
    }

    pub fn j(self) -> u8 {
        self.j
    }

    /// The bond on `{i, j}` and whether `(i, j)` runs against its orientation.
    pub fn between(i: u8, j: u8) -> Result<(Bond, bool)> {
        check_letter(i)?;
        check_letter(j)?;
        for b in Bond::ALL {
            if (b.i, b.j) == (i, j) {
                return Ok((b, false));
            }
            if (b.j, b.i) == (i, j) {
                return Ok((b, true));
            }
        }
        Err(Error::Parse(format!("{i}{j}")))
    }
}

impl fmt::Display for Bond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.i, self.j)
    }
}

/// Line segment joining the cells `w·i` and `w·j`, from `(w·i, j)` to `(w·j, i)`.
/// It appears at level `|w| + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    word: Word,
    bond: Bond,
}

impl Segment {
    pub fn new(word: Word, bond: Bond) -> Self {
        Segment { word, bond }
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn bond(&self) -> Bond {
        self.bond
    }

    pub fn level(&self) -> usize {
        self.word.len() + 1
    }

    pub fn start(&self) -> Address {
        Address {
            word: self.word.push(self.bond.i),
            corner: self.bond.j,
        }
    }

    pub fn end(&self) -> Address {
        Address {
            word: self.word.push(self.bond.j),
            corner: self.bond.i,
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.word, self.bond)
    }
}

impl FromStr for Segment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(s.to_string());
        let (w, b) = s.rsplit_once(':').ok_or_else(bad)?;
        let digits: Vec<u8> = b
            .trim()
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad))
            .collect::<Result<_>>()?;
        if digits.len() != 2 {
            return Err(bad());
        }
        let (bond, reversed) = Bond::between(digits[0], digits[1])?;
        if reversed {
            return Err(bad());
        }
        Ok(Segment { word: w.parse()?, bond })
    }
}

/// All segments of levels `1..=m`, ordered by level, word, bond.
pub fn segments(m: usize) -> Vec<Segment> {
    let mut out = Vec::new();
    for k in 1..=m {
        for w in Word::all(k - 1) {
            for b in Bond::ALL {
                out.push(Segment::new(w.clone(), b));
            }
        }
    }
    out
}

/// Permutation of the letters {1,2,3}; `perm[l-1]` is the image of `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symmetry([u8; 3]);

impl Symmetry {
    pub fn new(perm: [u8; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &l in &perm {
            check_letter(l)?;
            seen[l as usize - 1] = true;
        }
        if seen.iter().all(|&s| s) {
            Ok(Symmetry(perm))
        } else {
            Err(Error::Parse(format!("{perm:?} is not a permutation")))
        }
    }

    pub fn identity() -> Self {
        Symmetry([1, 2, 3])
    }

    /// Transposition of `a` and `b`.
    pub fn swap(a: u8, b: u8) -> Result<Self> {
        check_letter(a)?;
        check_letter(b)?;
        let mut p = [1, 2, 3];
        p.swap(a as usize - 1, b as usize - 1);
        Ok(Symmetry(p))
    }

    /// 1 → 2 → 3 → 1.
    pub fn rotation() -> Self {
        Symmetry([2, 3, 1])
    }

    pub fn all() -> [Symmetry; 6] {
        [
            Symmetry([1, 2, 3]),
            Symmetry([1, 3, 2]),
            Symmetry([2, 1, 3]),
            Symmetry([2, 3, 1]),
            Symmetry([3, 1, 2]),
            Symmetry([3, 2, 1]),
        ]
    }

    pub fn letter(self, l: u8) -> u8 {
        self.0[l as usize - 1]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: Symmetry) -> Symmetry {
        Symmetry([1, 2, 3].map(|l| self.letter(other.letter(l))))
    }

    pub fn inverse(self) -> Symmetry {
        let mut p = [0; 3];
        for l in 1..=3u8 {
            p[self.letter(l) as usize - 1] = l;
        }
        Symmetry(p)
    }

    pub fn word(self, w: &Word) -> Word {
        Word(w.0.iter().map(|&l| self.letter(l)).collect())
    }

    /// Image of a segment, and whether its parametrization is reversed.
    pub fn segment(self, s: &Segment) -> (Segment, bool) {
        let (bond, reversed) =
            Bond::between(self.letter(s.bond.i), self.letter(s.bond.j)).expect("permutation maps bonds to bonds");
        (Segment::new(self.word(&s.word), bond), reversed)
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.0[0], self.0[1], self.0[2])
    }
}

pub fn apply_symmetry(s: Symmetry, a: &Address) -> Address {
    // relabeling keeps the last letter distinct from the corner
    Address {
        word: s.word(&a.word),
        corner: s.letter(a.corner),
    }
}

/// Vertex of the level-`m` gasket, named by the least padded address in its class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SgClass {
    level: usize,
    word: Word,
    corner: u8,
}

impl SgClass {
    pub fn level(&self) -> usize {
        self.level
    }

    /// Padded representative; its word length equals the level.
    pub fn representative(&self) -> (&Word, u8) {
        (&self.word, self.corner)
    }

    /// The canonical address of the representative.
    pub fn address(&self) -> Address {
        canonicalize(&self.word, self.corner).expect("valid corner")
    }

    /// The two padded members (equal for the three outer corners).
    pub fn members(&self) -> [(Word, u8); 2] {
        let w = &self.word;
        let c = self.corner;
        let stripped = canonicalize(w, c).expect("valid corner");
        match stripped.word.last() {
            None => [(w.clone(), c), (w.clone(), c)],
            Some(l) => {
                let v = Word(stripped.word.0[..stripped.word.len() - 1].to_vec());
                let other = (v.push(c).padded(l, self.level), l);
                [(w.clone(), c), other]
            }
        }
    }
}

impl fmt::Display for SgClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.word, self.corner)
    }
}

/// Gasket vertex that the point of `a` collapses to at level `m`.
pub fn sg_class(a: &Address, m: usize) -> Result<SgClass> {
    if a.word.len() > m {
        return Err(Error::AddressTooDeep {
            len: a.word.len(),
            level: m,
        });
    }
    let own = (a.word.padded(a.corner, m), a.corner);
    let rep = match a.word.last() {
        None => own,
        Some(l) => {
            // (v·l, c) touches (v·c, l)
            let v = Word(a.word.0[..a.word.len() - 1].to_vec());
            let partner = (v.push(a.corner).padded(l, m), l);
            own.min(partner)
        }
    };
    Ok(SgClass {
        level: m,
        word: rep.0,
        corner: rep.1,
    })
}

/// Vertex set of the level-`m` gasket graph, sorted; it has `3(3^m+1)/2` elements.
pub fn sg_vertex_set(m: usize) -> Result<Vec<SgClass>> {
    let mut out: Vec<SgClass> = vertex_set(m)?.iter().map(|a| sg_class(a, m)).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// Cell-map contraction parameter and the three outer corners.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmbeddingParams<T> {
    alpha: T,
    corners: [[T; 2]; 3],
}

impl<T: Scalar> EmbeddingParams<T> {
    /// Unit-side triangle centred at the origin with `p_1` on top.
    pub fn new(alpha: T) -> Result<Self> {
        let h = T::one() / T::lit(3.0).sqrt();
        let half = T::lit(0.5);
        Self::with_corners(alpha, [[T::zero(), h], [-half, -h * half], [half, -h * half]])
    }

    pub fn with_corners(alpha: T, corners: [[T; 2]; 3]) -> Result<Self> {
        if !(alpha > T::zero() && alpha < T::one()) {
            return Err(Error::InvalidSequence(format!(
                "embedding alpha {alpha} must lie in (0,1)"
            )));
        }
        Ok(EmbeddingParams { alpha, corners })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn corner(&self, i: u8) -> [T; 2] {
        self.corners[i as usize - 1]
    }

    fn contract(&self, i: u8, x: [T; 2]) -> [T; 2] {
        let ratio = (T::one() - self.alpha) / T::lit(2.0);
        let p = self.corner(i);
        [ratio * (x[0] - p[0]) + p[0], ratio * (x[1] - p[1]) + p[1]]
    }
}

/// Planar position of `a`: the cell maps of the word applied to its corner, innermost last letter first.
pub fn embed<T: Scalar>(a: &Address, params: &EmbeddingParams<T>) -> [T; 2] {
    a.word
        .0
        .iter()
        .rev()
        .fold(params.corner(a.corner), |x, &l| params.contract(l, x))
}

/// `address,x,y` rows for every vertex of level `m`.
pub fn coordinates_csv<T: Scalar>(m: usize, params: &EmbeddingParams<T>) -> Result<String> {
    let mut out = String::from("address,x,y\n");
    for a in vertex_set(m)? {
        let [x, y] = embed(&a, params);
        out.push_str(&format!("{a},{x},{y}\n"));
    }
    Ok(out)
}
