//! Words in free groups, representations, crossed homomorphisms and the
//! cohomology computations built on them: H^1 of the rose, H^0/H^1 of a
//! circle, bending deformations, relative tangent spaces, and the seeded
//! samplers that feed every verification.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{column_complement, null_space, null_space_abs, rank, CMatrix, CVector, C64};
use crate::mat::{
    dsigma, is_regular, random_group_element_with, standard_frame, GroupElement, LieElement,
    OrthonormalFrame, REGULAR_TOL,
};
use crate::trace::Genericity;

/// Relative singular-value cut-off used for every rank decision on
/// coboundary and restriction maps.
pub const RANK_TOL: f64 = 1e-9;
pub const INVARIANCE_TOL: f64 = 1e-8;
pub const SAMPLER_BUDGET: usize = 10_000;

/// A word in the free generators; `i` stands for `g_i`, `-i` for its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    pub letters: Vec<i32>,
}

impl Word {
    pub fn new(letters: Vec<i32>) -> Self {
        Word { letters }
    }

    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn split_at(&self, at: usize) -> (Word, Word) {
        let (a, b) = self.letters.split_at(at);
        (Word::new(a.to_vec()), Word::new(b.to_vec()))
    }

    pub fn rotate(&self, by: usize) -> Word {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let by = by % letters.len();
            letters.rotate_left(by);
        }
        Word { letters }
    }

    pub fn check_rank(&self, k: usize) -> Result<()> {
        for &l in &self.letters {
            if l == 0 || l.unsigned_abs() as usize > k {
                return Err(Error::LetterOutOfRange { letter: l, rank: k });
            }
        }
        Ok(())
    }
}

impl From<&[i32]> for Word {
    fn from(l: &[i32]) -> Self {
        Word::new(l.to_vec())
    }
}

impl<const L: usize> From<[i32; L]> for Word {
    fn from(l: [i32; L]) -> Self {
        Word::new(l.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    Rose(usize),
    S03,
    S11,
    S04,
    S03Sl3,
    S04Sl3,
}

/// A free group together with the words representing its boundary curves.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceConfig {
    pub kind: SurfaceKind,
    pub rank: usize,
    pub peripheral_words: Vec<Word>,
    pub genus: usize,
    pub boundary: usize,
}

impl SurfaceConfig {
    /// The wedge of `k` circles, with no boundary constraints.
    pub fn rose(k: usize) -> Self {
        SurfaceConfig {
            kind: SurfaceKind::Rose(k),
            rank: k,
            peripheral_words: Vec::new(),
            genus: 0,
            boundary: 0,
        }
    }

    pub fn new(kind: SurfaceKind) -> Self {
        let w = |l: &[i32]| Word::from(l);
        match kind {
            SurfaceKind::Rose(k) => Self::rose(k),
            SurfaceKind::S03 | SurfaceKind::S03Sl3 => SurfaceConfig {
                kind,
                rank: 2,
                peripheral_words: vec![w(&[1]), w(&[2]), w(&[1, 2])],
                genus: 0,
                boundary: 3,
            },
            SurfaceKind::S11 => SurfaceConfig {
                kind,
                rank: 2,
                peripheral_words: vec![w(&[1, 2, -1, -2])],
                genus: 1,
                boundary: 1,
            },
            SurfaceKind::S04 => SurfaceConfig {
                kind,
                rank: 3,
                peripheral_words: vec![w(&[1]), w(&[2]), w(&[3]), w(&[1, 2, 3])],
                genus: 0,
                boundary: 4,
            },
            // Boundary curves of the four-holed sphere obtained by cutting
            // the rank-3 free group along the curves 1 and 23.
            SurfaceKind::S04Sl3 => SurfaceConfig {
                kind,
                rank: 3,
                peripheral_words: vec![w(&[2]), w(&[3]), w(&[1, 2]), w(&[1, 3])],
                genus: 0,
                boundary: 4,
            },
        }
    }

    /// Accepts `S03`, `S11`, `S04`, `S03_SL3`, `S04_SL3`, `rose:K` (or `FK`).
    pub fn from_name(name: &str) -> Result<Self> {
        let kind = match name {
            "S03" | "s03" => SurfaceKind::S03,
            "S11" | "s11" => SurfaceKind::S11,
            "S04" | "s04" => SurfaceKind::S04,
            "S03_SL3" | "s03_sl3" => SurfaceKind::S03Sl3,
            "S04_SL3" | "s04_sl3" => SurfaceKind::S04Sl3,
            other => {
                let digits = other
                    .strip_prefix("rose:")
                    .or_else(|| other.strip_prefix('F'))
                    .or_else(|| other.strip_prefix('f'));
                match digits.and_then(|d| d.parse::<usize>().ok()) {
                    Some(k) if k >= 1 => SurfaceKind::Rose(k),
                    _ => return Err(Error::UnknownSurface(name.to_string())),
                }
            }
        };
        Ok(Self::new(kind))
    }

    pub fn name(&self) -> String {
        match self.kind {
            SurfaceKind::Rose(k) => format!("rose:{k}"),
            SurfaceKind::S03 => "S03".into(),
            SurfaceKind::S11 => "S11".into(),
            SurfaceKind::S04 => "S04".into(),
            SurfaceKind::S03Sl3 => "S03_SL3".into(),
            SurfaceKind::S04Sl3 => "S04_SL3".into(),
        }
    }

    /// Euler characteristic; for the rose this is `1 - k`, for a surface
    /// `2 - 2g - b`.
    pub fn euler(&self) -> i64 {
        match self.kind {
            SurfaceKind::Rose(k) => 1 - k as i64,
            _ => 2 - 2 * self.genus as i64 - self.boundary as i64,
        }
    }

    pub fn boundary_count(&self) -> usize {
        self.peripheral_words.len()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RepresentationJson {
    n: usize,
    k: usize,
    generators: Vec<GroupElement>,
}

/// Images of the free generators; inverses are cached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RepresentationJson", into = "RepresentationJson")]
pub struct Representation {
    n: usize,
    generators: Vec<GroupElement>,
    inverses: Vec<GroupElement>,
}

impl Representation {
    pub fn new(generators: Vec<GroupElement>) -> Result<Self> {
        let n = generators
            .first()
            .ok_or_else(|| Error::InvalidArgument("a representation needs at least one generator".into()))?
            .n();
        for g in &generators {
            if g.n() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    got: g.n(),
                });
            }
        }
        let inverses = generators.iter().map(|g| g.inverse()).collect();
        Ok(Representation {
            n,
            generators,
            inverses,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &GroupElement {
        &self.generators[i]
    }

    fn letter(&self, l: i32) -> &GroupElement {
        let i = l.unsigned_abs() as usize - 1;
        if l > 0 {
            &self.generators[i]
        } else {
            &self.inverses[i]
        }
    }

    pub fn evaluate(&self, w: &Word) -> Result<GroupElement> {
        w.check_rank(self.k())?;
        let mut acc = CMatrix::identity(self.n, self.n);
        for &l in &w.letters {
            acc *= self.letter(l).matrix();
        }
        Ok(GroupElement::from_trusted(acc))
    }

    pub fn trace(&self, w: &Word) -> Result<C64> {
        Ok(self.evaluate(w)?.trace())
    }
}

impl TryFrom<RepresentationJson> for Representation {
    type Error = Error;
    fn try_from(j: RepresentationJson) -> Result<Self> {
        if j.generators.len() != j.k {
            return Err(Error::Malformed(format!(
                "k = {} but {} generators given",
                j.k,
                j.generators.len()
            )));
        }
        let rep = Representation::new(j.generators)?;
        if rep.n() != j.n {
            return Err(Error::SizeMismatch {
                expected: j.n,
                got: rep.n(),
            });
        }
        Ok(rep)
    }
}

impl From<Representation> for RepresentationJson {
    fn from(r: Representation) -> Self {
        RepresentationJson {
            n: r.n,
            k: r.generators.len(),
            generators: r.generators,
        }
    }
}

/// Word evaluation on arbitrary invertible matrices (not necessarily
/// unimodular), used by finite-difference oracles.
pub fn evaluate_matrices(gens: &[CMatrix], w: &Word) -> Result<CMatrix> {
    w.check_rank(gens.len())?;
    let n = gens[0].nrows();
    let mut acc = CMatrix::identity(n, n);
    for &l in &w.letters {
        let g = &gens[l.unsigned_abs() as usize - 1];
        if l > 0 {
            acc *= g;
        } else {
            acc *= g.clone().try_inverse().ok_or(Error::InvalidArgument("singular generator".into()))?;
        }
    }
    Ok(acc)
}

/// A crossed homomorphism, stored through its values on the generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cocycle {
    pub values: Vec<LieElement>,
}

impl Cocycle {
    pub fn new(values: Vec<LieElement>) -> Self {
        Cocycle { values }
    }

    pub fn zero(n: usize, k: usize) -> Result<Self> {
        Ok(Cocycle {
            values: vec![LieElement::zero(n)?; k],
        })
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn scale(&self, s: C64) -> Cocycle {
        Cocycle {
            values: self.values.iter().map(|v| v.scale(s)).collect(),
        }
    }

    pub fn add(&self, other: &Cocycle) -> Cocycle {
        Cocycle {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    /// Frame coordinates in `C^1 = g^k`, generator-major.
    pub fn coords(&self, frame: &OrthonormalFrame) -> CVector {
        let d = frame.dim();
        let mut out = CVector::zeros(d * self.k());
        for (i, v) in self.values.iter().enumerate() {
            out.rows_mut(i * d, d).copy_from(&frame.coords(v.matrix()));
        }
        out
    }

    pub fn from_coords(v: &[C64], frame: &OrthonormalFrame) -> Result<Cocycle> {
        let d = frame.dim();
        if !v.len().is_multiple_of(d) {
            return Err(Error::SizeMismatch {
                expected: d,
                got: v.len(),
            });
        }
        Ok(Cocycle {
            values: v.chunks(d).map(|chunk| frame.from_coords(chunk)).collect(),
        })
    }

    fn check_against(&self, rho: &Representation) -> Result<()> {
        if self.k() != rho.k() {
            return Err(Error::SizeMismatch {
                expected: rho.k(),
                got: self.k(),
            });
        }
        for v in &self.values {
            if v.n() != rho.n() {
                return Err(Error::SizeMismatch {
                    expected: rho.n(),
                    got: v.n(),
                });
            }
        }
        Ok(())
    }
}

/// Evaluates `rho(w)` and `u(w)` together by the crossed rule
/// `u(gh) = u(g) + Ad_{rho(g)} u(h)`, `u(g^-1) = -Ad_{rho(g)^-1} u(g)`.
pub fn evaluate_with_cocycle(
    rho: &Representation,
    u: &Cocycle,
    w: &Word,
) -> Result<(GroupElement, LieElement)> {
    w.check_rank(rho.k())?;
    u.check_against(rho)?;
    let n = rho.n();
    let mut g = CMatrix::identity(n, n);
    let mut g_inv = CMatrix::identity(n, n);
    let mut acc = CMatrix::zeros(n, n);
    for &l in &w.letters {
        let i = l.unsigned_abs() as usize - 1;
        let val = if l > 0 {
            u.values[i].matrix().clone()
        } else {
            -(rho.inverses[i].conjugate(u.values[i].matrix()))
        };
        acc += &g * val * &g_inv;
        g *= rho.letter(l).matrix();
        g_inv = rho.letter(-l).matrix() * g_inv;
    }
    Ok((GroupElement::from_trusted(g), LieElement::from_trusted(acc)))
}

pub fn extend_cocycle(rho: &Representation, u: &Cocycle, w: &Word) -> Result<LieElement> {
    Ok(evaluate_with_cocycle(rho, u, w)?.1)
}

/// The inner crossed homomorphism `g -> Ad_{rho(g)} a - a`.
pub fn coboundary(rho: &Representation, a: &LieElement) -> Cocycle {
    Cocycle {
        values: rho
            .generators
            .iter()
            .map(|g| g.ad(a).sub(a))
            .collect(),
    }
}

/// The `kd x d` matrix whose column `j` is the coboundary of the frame
/// element `m_j`.
pub fn coboundary_matrix(rho: &Representation, frame: &OrthonormalFrame) -> CMatrix {
    let d = frame.dim();
    let mut out = CMatrix::zeros(d * rho.k(), d);
    for (j, m) in frame.elements().iter().enumerate() {
        out.set_column(j, &coboundary(rho, m).coords(frame));
    }
    out
}

/// A basis of a complement of the coboundaries inside a space of cocycles.
#[derive(Debug, Clone)]
pub struct CohomologyBasis {
    pub ambient_dim: usize,
    pub coboundary_rank: usize,
    pub classes: Vec<Cocycle>,
    /// Frame coordinates of the classes, one column per class.
    pub coords: CMatrix,
    /// Orthogonal projector onto the span of `coords`.
    pub projector: CMatrix,
}

impl CohomologyBasis {
    pub(crate) fn from_coords(coords: CMatrix, coboundary_rank: usize, frame: &OrthonormalFrame) -> Self {
        let classes = (0..coords.ncols())
            .map(|j| {
                let col: Vec<C64> = coords.column(j).iter().copied().collect();
                Cocycle::from_coords(&col, frame).expect("coordinate length is a multiple of d")
            })
            .collect();
        let projector = &coords * coords.adjoint();
        CohomologyBasis {
            ambient_dim: coords.nrows(),
            coboundary_rank,
            classes,
            coords,
            projector,
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// H^1 of the rose: the Hermitian complement of the coboundaries in `g^k`.
pub fn h1_basis_rose(rho: &Representation) -> Result<CohomologyBasis> {
    let frame = standard_frame(rho.n())?;
    h1_basis_rose_in(rho, &frame)
}

pub fn h1_basis_rose_in(rho: &Representation, frame: &OrthonormalFrame) -> Result<CohomologyBasis> {
    let d = frame.dim();
    let delta = coboundary_matrix(rho, frame);
    let r = rank(&delta, RANK_TOL);
    if r < d {
        return Err(Error::NotGood { rank: r, expected: d });
    }
    let complement = column_complement(&delta, RANK_TOL);
    Ok(CohomologyBasis::from_coords(complement, r, frame))
}

/// H^0 and H^1 of a circle whose generator maps to `a`.
#[derive(Debug, Clone)]
pub struct CircleCohomology {
    pub h0: Vec<LieElement>,
    pub h1: Vec<LieElement>,
    pub h0_coords: CMatrix,
    pub h1_coords: CMatrix,
}

pub fn circle_cohomology(a: &GroupElement) -> Result<CircleCohomology> {
    let frame = standard_frame(a.n())?;
    circle_cohomology_in(a, &frame)
}

pub fn circle_cohomology_in(a: &GroupElement, frame: &OrthonormalFrame) -> Result<CircleCohomology> {
    let d = frame.dim();
    let ad = crate::mat::adjoint_matrix(a, frame)?;
    // Ad_A always has the eigenvalue 1, so its norm is a safe scale even
    // when Ad_A - Id vanishes.
    let cutoff = RANK_TOL * ad.norm();
    let m = ad - CMatrix::identity(d, d);
    let h0_coords = null_space_abs(&m, cutoff);
    let h1_coords = null_space_abs(&m.adjoint(), cutoff);
    let to_lie = |c: &CMatrix| -> Vec<LieElement> {
        (0..c.ncols())
            .map(|j| {
                let col: Vec<C64> = c.column(j).iter().copied().collect();
                frame.from_coords(&col)
            })
            .collect()
    };
    Ok(CircleCohomology {
        h0: to_lie(&h0_coords),
        h1: to_lie(&h1_coords),
        h0_coords,
        h1_coords,
    })
}

/// The bending deformation along a curve `split`: the generators in `moved`
/// (1-based) are conjugated by `1 + e a`, the others are fixed. `a` must
/// commute with `rho(split)`.
pub fn bending_cocycle(
    rho: &Representation,
    moved: &[usize],
    a: &LieElement,
    split: &Word,
) -> Result<Cocycle> {
    let s = rho.evaluate(split)?;
    let residual = (s.ad(a).matrix() - a.matrix()).norm();
    let scale = a.matrix().norm().max(1.0);
    if residual > INVARIANCE_TOL * scale {
        return Err(Error::NotInvariant(residual));
    }
    let mut values = vec![LieElement::zero(rho.n())?; rho.k()];
    for &j in moved {
        if j == 0 || j > rho.k() {
            return Err(Error::LetterOutOfRange {
                letter: j as i32,
                rank: rho.k(),
            });
        }
        values[j - 1] = a.sub(&rho.generators[j - 1].ad(a));
    }
    Ok(Cocycle { values })
}

/// Burnside test: words of length up to `2N^2` must span all N x N matrices.
pub fn is_good(rho: &Representation) -> bool {
    let n = rho.n();
    let full = n * n;
    let vec_of = |m: &CMatrix| CVector::from_iterator(full, m.iter().copied());
    let mut basis: Vec<CVector> = Vec::new();
    let mut frontier: Vec<CMatrix> = Vec::new();
    let push = |m: CMatrix, basis: &mut Vec<CVector>| -> Option<CMatrix> {
        let mut v = vec_of(&m);
        let norm = v.norm();
        if norm == 0.0 {
            return None;
        }
        v /= C64::new(norm, 0.0);
        for _ in 0..2 {
            for b in basis.iter() {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let rest = v.norm();
        if rest < 1e-8 {
            return None;
        }
        v /= C64::new(rest, 0.0);
        basis.push(v);
        Some(m / C64::new(norm, 0.0))
    };
    if let Some(m) = push(CMatrix::identity(n, n), &mut basis) {
        frontier.push(m);
    }
    let letters: Vec<&CMatrix> = rho
        .generators
        .iter()
        .chain(&rho.inverses)
        .map(|g| g.matrix())
        .collect();
    for _ in 0..2 * full {
        if basis.len() == full || frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for f in &frontier {
            for g in &letters {
                if let Some(m) = push(*g * f, &mut basis) {
                    next.push(m);
                }
            }
        }
        frontier = next;
    }
    basis.len() == full
}

/// Rows are `d sigma_j` of the boundary holonomies applied to each class of
/// `h`; one block of `N-1` rows per peripheral word.
pub fn restriction_matrix(
    rho: &Representation,
    cfg: &SurfaceConfig,
    classes: &[Cocycle],
) -> Result<CMatrix> {
    let r = rho.n() - 1;
    let b = cfg.peripheral_words.len();
    let mut out = CMatrix::zeros(b * r, classes.len());
    for (i, w) in cfg.peripheral_words.iter().enumerate() {
        for (c, u) in classes.iter().enumerate() {
            let (g, v) = evaluate_with_cocycle(rho, u, w)?;
            for (j, ds) in dsigma(&g, v.matrix()).into_iter().enumerate() {
                out[(i * r + j, c)] = ds;
            }
        }
    }
    Ok(out)
}

/// Tangent space of the relative character variety: classes of H^1 on which
/// every boundary `d sigma_j` vanishes.
pub fn relative_tangent_basis(rho: &Representation, cfg: &SurfaceConfig) -> Result<CohomologyBasis> {
    let frame = standard_frame(rho.n())?;
    let h = h1_basis_rose_in(rho, &frame)?;
    relative_from(rho, cfg, &h, &frame)
}

pub(crate) fn relative_from(
    rho: &Representation,
    cfg: &SurfaceConfig,
    h: &CohomologyBasis,
    frame: &OrthonormalFrame,
) -> Result<CohomologyBasis> {
    if cfg.rank != rho.k() {
        return Err(Error::SizeMismatch {
            expected: cfg.rank,
            got: rho.k(),
        });
    }
    let r = rho.n() - 1;
    let expected = cfg.peripheral_words.len() * r;
    if expected == 0 {
        return Ok(h.clone());
    }
    let restriction = restriction_matrix(rho, cfg, &h.classes)?;
    let got = rank(&restriction, RANK_TOL);
    if got < expected {
        return Err(Error::NotBoundaryRegular { rank: got, expected });
    }
    let kernel = null_space(&restriction, RANK_TOL);
    Ok(CohomologyBasis::from_coords(&h.coords * kernel, h.coboundary_rank, frame))
}

/// Expected dimension of the relative tangent space, `-d chi - b r`.
pub fn relative_dimension(n: usize, cfg: &SurfaceConfig) -> i64 {
    let d = (n * n - 1) as i64;
    -d * cfg.euler() - (cfg.peripheral_words.len() * (n - 1)) as i64
}

/// A uniformly drawn tuple of `k` elements of SL(N,C), with no conditions.
pub fn random_representation(n: usize, k: usize, seed: u64) -> Result<Representation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_representation_with(n, k, &mut rng)
}

fn random_representation_with(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<Representation> {
    if k == 0 {
        return Err(Error::InvalidArgument("rank must be positive".into()));
    }
    let gens = (0..k)
        .map(|_| random_group_element_with(n, rng))
        .collect::<Result<Vec<_>>>()?;
    Representation::new(gens)
}

/// Checks everything the samplers guarantee: goodness, regular boundary
/// holonomy, full-rank restriction, and the requested margins.
pub fn check_sample(
    rho: &Representation,
    cfg: &SurfaceConfig,
    margins: &[Genericity],
    margin: f64,
) -> Result<()> {
    if !is_good(rho) {
        return Err(Error::NotGood {
            rank: 0,
            expected: rho.n() * rho.n(),
        });
    }
    for w in &cfg.peripheral_words {
        if !is_regular(&rho.evaluate(w)?, REGULAR_TOL)? {
            return Err(Error::NotRegular);
        }
    }
    for g in margins {
        g.check(rho, margin)?;
    }
    relative_tangent_basis(rho, cfg)?;
    Ok(())
}

/// Rejection sampler for good, boundary-regular representations meeting the
/// requested genericity margins.
pub fn random_good_rep(
    n: usize,
    cfg: &SurfaceConfig,
    margins: &[Genericity],
    margin: f64,
    seed: u64,
) -> Result<Representation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLER_BUDGET {
        let rho = random_representation_with(n, cfg.rank, &mut rng)?;
        if check_sample(&rho, cfg, margins, margin).is_ok() {
            return Ok(rho);
        }
    }
    Err(Error::RejectionExhausted(SAMPLER_BUDGET))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, real};
    use crate::mat::random_lie_element_with;

    fn example_pair() -> Representation {
        let a = GroupElement::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]).unwrap();
        let b = GroupElement::from_real_rows(&[&[1.0, 1.0], &[1.0, 2.0]]).unwrap();
        Representation::new(vec![a, b]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let rho = example_pair();
        assert_eq!(rho.evaluate(&Word::empty()).unwrap().matrix(), &CMatrix::identity(2, 2));
        let id = rho.evaluate(&Word::from([1, -1])).unwrap();
        assert!(max_abs(&(id.matrix() - CMatrix::identity(2, 2))) < 1e-14);
        let ab = rho.evaluate(&Word::from([1, 2])).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[real(3.0), real(4.0), real(2.0), real(3.0)]);
        assert!(max_abs(&(ab.matrix() - expected)) < 1e-14);
        assert!(matches!(
            rho.evaluate(&Word::from([3])),
            Err(Error::LetterOutOfRange { letter: 3, rank: 2 })
        ));
        assert!(rho.evaluate(&Word::from([0])).is_err());
    }

    #[test]
    fn cocycle_of_trivial_word_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_representation(3, 2, 4).unwrap();
        let u = Cocycle::new(vec![
            random_lie_element_with(3, &mut rng).unwrap(),
            random_lie_element_with(3, &mut rng).unwrap(),
        ]);
        let v = extend_cocycle(&rho, &u, &Word::from([1, -1])).unwrap();
        assert!(max_abs(v.matrix()) < 1e-13);
        let v = extend_cocycle(&rho, &u, &Word::from([2, 1, -1, -2])).unwrap();
        assert!(max_abs(v.matrix()) < 1e-12);
    }

    #[test]
    fn coboundary_extends_as_conjugation_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = random_representation(2, 3, 1).unwrap();
        let a = random_lie_element_with(2, &mut rng).unwrap();
        let u = coboundary(&rho, &a);
        let w = Word::from([1, -3, 2, 2, -1]);
        // oracle: build Ad_{rho(prefix)} a - a letter by letter
        let mut expected = CMatrix::zeros(2, 2);
        let mut prefix = Word::empty();
        for &l in &w.letters {
            let before = rho.evaluate(&prefix).unwrap();
            prefix.letters.push(l);
            let after = rho.evaluate(&prefix).unwrap();
            expected += after.conjugate(a.matrix()) - before.conjugate(a.matrix());
        }
        let got = extend_cocycle(&rho, &u, &w).unwrap();
        let direct = rho.evaluate(&w).unwrap().conjugate(a.matrix()) - a.matrix();
        assert!(max_abs(&(got.matrix() - &expected)) < 1e-10);
        assert!(max_abs(&(got.matrix() - direct)) < 1e-10);
    }

    #[test]
    fn zero_and_commuting_coboundaries() {
        let rho = random_representation(2, 2, 3).unwrap();
        let z = coboundary(&rho, &LieElement::zero(2).unwrap());
        assert!(z.values.iter().all(|v| max_abs(v.matrix()) == 0.0));
        let d1 = GroupElement::from_real_rows(&[&[2.0, 0.0], &[0.0, 0.5]]).unwrap();
        let d2 = GroupElement::from_real_rows(&[&[-4.0, 0.0], &[0.0, -0.25]]).unwrap();
        let diag = Representation::new(vec![d1, d2]).unwrap();
        let h = LieElement::new(CMatrix::from_diagonal(&CVector::from_vec(vec![real(1.0), real(-1.0)]))).unwrap();
        let u = coboundary(&diag, &h);
        assert!(u.values.iter().all(|v| max_abs(v.matrix()) < 1e-15));
    }

    #[test]
    fn h1_dimensions_of_roses() {
        let rho = random_representation(2, 2, 10).unwrap();
        let h = h1_basis_rose(&rho).unwrap();
        assert_eq!(h.len(), 3);
        let rho = random_representation(3, 3, 10).unwrap();
        let h = h1_basis_rose(&rho).unwrap();
        assert_eq!(h.len(), 16);
        let frame = standard_frame(3).unwrap();
        let delta = coboundary_matrix(&rho, &frame);
        assert!(max_abs(&(&h.projector * delta)) < 1e-10);
    }

    #[test]
    fn h1_rejects_reducible_representation() {
        let d1 = GroupElement::from_real_rows(&[&[2.0, 0.0], &[0.0, 0.5]]).unwrap();
        let d2 = GroupElement::from_real_rows(&[&[3.0, 0.0], &[0.0, 1.0 / 3.0]]).unwrap();
        let diag = Representation::new(vec![d1, d2]).unwrap();
        assert!(!is_good(&diag));
        assert!(matches!(h1_basis_rose(&diag), Err(Error::NotGood { .. })));
    }

    #[test]
    fn goodness_examples() {
        assert!(is_good(&example_pair()));
        assert!(is_good(&random_representation(3, 2, 5).unwrap()));
    }

    #[test]
    fn circle_cohomology_examples() {
        let a = GroupElement::from_real_rows(&[&[2.0, 0.0], &[0.0, 0.5]]).unwrap();
        let cc = circle_cohomology(&a).unwrap();
        assert_eq!(cc.h0.len(), 1);
        assert_eq!(cc.h1.len(), 1);
        let h0 = cc.h0[0].matrix();
        // spanned by diag(1,-1)
        assert!(h0[(0, 1)].norm() < 1e-14 && h0[(1, 0)].norm() < 1e-14);
        assert!((h0[(0, 0)] + h0[(1, 1)]).norm() < 1e-14);
        let id = GroupElement::identity(3).unwrap();
        assert_eq!(circle_cohomology(&id).unwrap().h0.len(), 8);
    }

    #[test]
    fn bending_requires_invariance() {
        let rho = random_representation(2, 3, 6).unwrap();
        let l = rho.evaluate(&Word::from([1, 2])).unwrap();
        let a = LieElement::project(l.matrix()).unwrap();
        let beta = bending_cocycle(&rho, &[3], &a, &Word::from([1, 2])).unwrap();
        assert!(max_abs(beta.values[0].matrix()) == 0.0);
        let zero = bending_cocycle(&rho, &[3], &LieElement::zero(2).unwrap(), &Word::from([1, 2])).unwrap();
        assert!(zero.values.iter().all(|v| max_abs(v.matrix()) == 0.0));
        let other = LieElement::project(rho.generator(2).matrix()).unwrap();
        assert!(matches!(
            bending_cocycle(&rho, &[3], &other, &Word::from([1, 2])),
            Err(Error::NotInvariant(_))
        ));
    }

    #[test]
    fn surface_configs() {
        for (name, chi, b) in [("S03", -1, 3), ("S11", -1, 1), ("S04", -2, 4), ("S03_SL3", -1, 3), ("S04_SL3", -2, 4)] {
            let cfg = SurfaceConfig::from_name(name).unwrap();
            assert_eq!(cfg.euler(), chi);
            assert_eq!(cfg.boundary_count(), b);
            assert_eq!(cfg.name(), name);
        }
        assert_eq!(SurfaceConfig::from_name("rose:4").unwrap().euler(), -3);
        assert_eq!(SurfaceConfig::from_name("F3").unwrap().rank, 3);
        assert!(SurfaceConfig::from_name("S22").is_err());
        assert_eq!(relative_dimension(2, &SurfaceConfig::new(SurfaceKind::S11)), 2);
        assert_eq!(relative_dimension(3, &SurfaceConfig::new(SurfaceKind::S03Sl3)), 2);
    }

    #[test]
    fn representation_json_round_trip() {
        let rho = random_representation(3, 2, 12).unwrap();
        let s = serde_json::to_string(&rho).unwrap();
        let back: Representation = serde_json::from_str(&s).unwrap();
        assert_eq!(back.k(), 2);
        assert!(max_abs(&(back.generator(1).matrix() - rho.generator(1).matrix())) < 1e-15);
        let w: Word = serde_json::from_str(r#"{"letters":[1,2,-1,-2]}"#).unwrap();
        assert_eq!(w, Word::from([1, 2, -1, -2]));
        let bad = r#"{"n":2,"k":2,"generators":[{"n":2,"entries":[[[1,0],[0,0]],[[0,0],[1,0]]]}]}"#;
        assert!(serde_json::from_str::<Representation>(bad).is_err());
    }
}
