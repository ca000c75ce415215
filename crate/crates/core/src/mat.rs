//! SL(N,C) and sl(N,C) values, the invariant form `B(X,Y) = -tr(XY)`,
//! fundamental characters and their differentials, regularity, the adjoint
//! action in an orthonormal frame, and the companion-matrix section.

use std::ops::Mul;

use nalgebra::Schur;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, det, real, trace, CMatrix, CVector, C64, I};

pub const MIN_SIZE: usize = 2;
pub const MAX_SIZE: usize = 6;
pub const DET_TOL: f64 = 1e-10;
pub const REGULAR_TOL: f64 = 1e-6;

const DET_FLOOR: f64 = 0.01;
const DRAW_BUDGET: usize = 1000;

fn check_size(n: usize) -> Result<()> {
    if (MIN_SIZE..=MAX_SIZE).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedSize(n))
    }
}

fn check_square_finite(m: &CMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::SizeMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    check_size(m.nrows())?;
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(m.nrows())
}

/// Wire format shared by every matrix-valued type.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let entries = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        MatrixJson {
            n: m.nrows(),
            entries,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.entries.len() != self.n {
            return Err(Error::Malformed(format!(
                "expected {} rows, found {}",
                self.n,
                self.entries.len()
            )));
        }
        let mut m = CMatrix::zeros(self.n, self.n);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.n {
                return Err(Error::Malformed(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    self.n
                )));
            }
            for (j, z) in row.iter().enumerate() {
                m[(i, j)] = c(z[0], z[1]);
            }
        }
        Ok(m)
    }
}

/// An element of SL(N,C), 2 <= N <= 6.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct GroupElement {
    m: CMatrix,
}

impl GroupElement {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, DET_TOL)
    }

    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        check_square_finite(&m)?;
        let err = (det(&m) - real(1.0)).norm();
        if err > tol {
            return Err(Error::NotUnimodular(err));
        }
        Ok(GroupElement { m })
    }

    /// Products and inverses of checked elements stay in the group up to
    /// rounding, so they skip the determinant test.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        GroupElement { m }
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(GroupElement {
            m: CMatrix::identity(n, n),
        })
    }

    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, z) in row.iter().enumerate() {
                m[(i, j)] = *z;
            }
        }
        Self::new(m)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let complex: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| real(x)).collect()).collect();
        let refs: Vec<&[C64]> = complex.iter().map(|r| r.as_slice()).collect();
        Self::from_rows(&refs)
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn trace(&self) -> C64 {
        trace(&self.m)
    }

    pub fn inverse(&self) -> GroupElement {
        let inv = self
            .m
            .clone()
            .try_inverse()
            .expect("unimodular matrices are invertible");
        GroupElement { m: inv }
    }

    /// `A X A^{-1}`.
    pub fn conjugate(&self, x: &CMatrix) -> CMatrix {
        &self.m * x * self.inverse().m
    }

    pub fn ad(&self, x: &LieElement) -> LieElement {
        LieElement {
            m: self.conjugate(&x.m),
        }
    }
}

impl Mul for &GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: &GroupElement) -> GroupElement {
        GroupElement { m: &self.m * &rhs.m }
    }
}

impl TryFrom<MatrixJson> for GroupElement {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        GroupElement::new(j.to_matrix()?)
    }
}

impl From<GroupElement> for MatrixJson {
    fn from(g: GroupElement) -> Self {
        MatrixJson::from_matrix(&g.m)
    }
}

/// A traceless N x N matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct LieElement {
    m: CMatrix,
}

impl LieElement {
    /// The trace test is relative to the largest entry, so that large
    /// elements assembled from rounded products are still accepted.
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square_finite(&m)?;
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let tr = trace(&m).norm();
        if tr > DET_TOL * scale {
            return Err(Error::NotTraceless(tr));
        }
        Ok(LieElement { m })
    }

    /// Removes the trace part of an arbitrary square matrix.
    pub fn project(m: &CMatrix) -> Result<Self> {
        let n = check_square_finite(m)?;
        let shift = trace(m) / n as f64;
        Ok(LieElement {
            m: m - CMatrix::identity(n, n) * shift,
        })
    }

    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        LieElement { m }
    }

    pub fn zero(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(LieElement {
            m: CMatrix::zeros(n, n),
        })
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn scale(&self, s: C64) -> LieElement {
        LieElement { m: &self.m * s }
    }

    pub fn add(&self, other: &LieElement) -> LieElement {
        LieElement {
            m: &self.m + &other.m,
        }
    }

    pub fn sub(&self, other: &LieElement) -> LieElement {
        LieElement {
            m: &self.m - &other.m,
        }
    }
}

impl TryFrom<MatrixJson> for LieElement {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        LieElement::new(j.to_matrix()?)
    }
}

impl From<LieElement> for MatrixJson {
    fn from(x: LieElement) -> Self {
        MatrixJson::from_matrix(&x.m)
    }
}

/// `B(X, Y) = -tr(XY)`.
pub fn bilinear_b(x: &LieElement, y: &LieElement) -> Result<C64> {
    if x.n() != y.n() {
        return Err(Error::SizeMismatch {
            expected: x.n(),
            got: y.n(),
        });
    }
    Ok(-trace_of_product(&x.m, &y.m))
}

/// `tr(XY)` without forming the product.
pub(crate) fn trace_of_product(x: &CMatrix, y: &CMatrix) -> C64 {
    let n = x.nrows();
    let mut acc = real(0.0);
    for i in 0..n {
        for j in 0..n {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

/// A basis `m_1..m_d` of sl(N,C) with `B(m_i, m_j) = delta_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalFrame {
    n: usize,
    elements: Vec<LieElement>,
}

/// The fixed frame used everywhere: for each pair `i < j` the two elements
/// `(E_ij - E_ji)/sqrt2` and `i(E_ij + E_ji)/sqrt2`, followed by
/// `i * diag(1,..,1,-k,0,..)/sqrt(k(k+1))` for `k = 1..N-1`.
pub fn standard_frame(n: usize) -> Result<OrthonormalFrame> {
    check_size(n)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut elements = Vec::with_capacity(n * n - 1);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut a = CMatrix::zeros(n, n);
            a[(i, j)] = real(s);
            a[(j, i)] = real(-s);
            elements.push(LieElement { m: a });
            let mut b = CMatrix::zeros(n, n);
            b[(i, j)] = c(0.0, s);
            b[(j, i)] = c(0.0, s);
            elements.push(LieElement { m: b });
        }
    }
    for k in 1..n {
        let norm = ((k * (k + 1)) as f64).sqrt();
        let mut h = CMatrix::zeros(n, n);
        for l in 0..k {
            h[(l, l)] = I / norm;
        }
        h[(k, k)] = I * (-(k as f64) / norm);
        elements.push(LieElement { m: h });
    }
    Ok(OrthonormalFrame { n, elements })
}

impl OrthonormalFrame {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[LieElement] {
        &self.elements
    }

    pub fn gram(&self) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |i, j| {
            -trace_of_product(&self.elements[i].m, &self.elements[j].m)
        })
    }

    /// Coordinates `c_i = B(m_i, X)`.
    pub fn coords(&self, x: &CMatrix) -> CVector {
        CVector::from_iterator(
            self.dim(),
            self.elements.iter().map(|e| -trace_of_product(&e.m, x)),
        )
    }

    pub fn from_coords(&self, v: &[C64]) -> LieElement {
        let mut m = CMatrix::zeros(self.n, self.n);
        for (coef, e) in v.iter().zip(&self.elements) {
            m += &e.m * *coef;
        }
        LieElement { m }
    }
}

/// Column `j` holds the frame coordinates of `A m_j A^{-1}`.
pub fn adjoint_matrix(a: &GroupElement, frame: &OrthonormalFrame) -> Result<CMatrix> {
    if a.n() != frame.n() {
        return Err(Error::SizeMismatch {
            expected: frame.n(),
            got: a.n(),
        });
    }
    let inv = a.inverse();
    let d = frame.dim();
    let mut out = CMatrix::zeros(d, d);
    for (j, e) in frame.elements.iter().enumerate() {
        let img = &a.m * &e.m * &inv.m;
        out.set_column(j, &frame.coords(&img));
    }
    Ok(out)
}

/// The fundamental characters `(sigma_1, .., sigma_{N-1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaVector {
    pub values: Vec<C64>,
}

impl SigmaVector {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        check_size(values.len() + 1)?;
        Ok(SigmaVector { values })
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    pub fn n(&self) -> usize {
        self.values.len() + 1
    }
}

fn power_sums(m: &CMatrix, upto: usize) -> Vec<C64> {
    let mut p = Vec::with_capacity(upto);
    let mut pow = m.clone();
    for k in 0..upto {
        if k > 0 {
            pow = &pow * m;
        }
        p.push(trace(&pow));
    }
    p
}

/// Elementary symmetric functions `e_1..e_N` of the eigenvalues of any
/// square matrix, via Newton's identities.
pub fn elementary_symmetric(m: &CMatrix) -> Vec<C64> {
    let n = m.nrows();
    let p = power_sums(m, n);
    newton_from_power_sums(&p)
}

fn newton_from_power_sums(p: &[C64]) -> Vec<C64> {
    let n = p.len();
    let mut e = vec![real(1.0)];
    for k in 1..=n {
        let mut acc = real(0.0);
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += e[k - i] * p[i - 1] * sign;
        }
        e.push(acc / k as f64);
    }
    e.remove(0);
    e
}

pub fn sigma(a: &GroupElement) -> SigmaVector {
    let mut e = elementary_symmetric(&a.m);
    e.truncate(a.n() - 1);
    SigmaVector { values: e }
}

/// `d/de sigma_j((Id + e v) A)` at `e = 0`, for `j = 1..N-1`.
///
/// Differentiates the power sums (`dp_k = k tr(v A^k)`) and pushes the
/// derivative through Newton's recursion.
pub fn dsigma(a: &GroupElement, v: &CMatrix) -> Vec<C64> {
    let n = a.n();
    let r = n - 1;
    let mut p = Vec::with_capacity(r);
    let mut dp = Vec::with_capacity(r);
    let mut pow = a.m.clone();
    for k in 1..=r {
        if k > 1 {
            pow = &pow * &a.m;
        }
        p.push(trace(&pow));
        dp.push(trace_of_product(v, &pow) * k as f64);
    }
    let mut e = vec![real(1.0)];
    let mut de = vec![real(0.0)];
    for k in 1..=r {
        let mut acc = real(0.0);
        let mut dacc = real(0.0);
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += e[k - i] * p[i - 1] * sign;
            dacc += (de[k - i] * p[i - 1] + e[k - i] * dp[i - 1]) * sign;
        }
        e.push(acc / k as f64);
        de.push(dacc / k as f64);
    }
    de.remove(0);
    de
}

/// Central-difference version of [`dsigma`], used as an oracle.
pub fn dsigma_central(a: &GroupElement, v: &CMatrix, step: f64) -> Vec<C64> {
    let n = a.n();
    let id = CMatrix::identity(n, n);
    let plus = elementary_symmetric(&((&id + v * real(step)) * &a.m));
    let minus = elementary_symmetric(&((&id - v * real(step)) * &a.m));
    (0..n - 1)
        .map(|j| (plus[j] - minus[j]) / (2.0 * step))
        .collect()
}

pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let schur = Schur::try_new(m.clone(), 1e-15, 10_000).ok_or(Error::EigenFailure)?;
    let (_, t) = schur.unpack();
    let vals: Vec<C64> = t.diagonal().iter().copied().collect();
    if vals.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigenFailure);
    }
    Ok(vals)
}

/// Groups eigenvalues that lie within `tol` (relative to `max(1, |z|)`).
pub fn eigenvalue_clusters(vals: &[C64], tol: f64) -> Vec<Vec<C64>> {
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for &z in vals {
        let hit = clusters.iter_mut().find(|cl| {
            cl.iter()
                .any(|&w| (w - z).norm() <= tol * z.norm().max(w.norm()).max(1.0))
        });
        match hit {
            Some(cl) => cl.push(z),
            None => clusters.push(vec![z]),
        }
    }
    clusters
}

/// True iff every eigenvalue has a one-dimensional eigenspace, i.e. the
/// minimal polynomial has degree N.
pub fn is_regular(a: &GroupElement, tol: f64) -> Result<bool> {
    let n = a.n();
    let vals = eigenvalues(&a.m)?;
    let scale = a.m.norm().max(1.0);
    for cl in eigenvalue_clusters(&vals, tol) {
        let centre: C64 = cl.iter().sum::<C64>() / cl.len() as f64;
        let shifted = &a.m - CMatrix::identity(n, n) * centre;
        let sv = shifted.singular_values();
        let rank = sv.iter().filter(|&&s| s > tol * scale).count();
        if rank != n - 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Companion matrix of `z^N - s_1 z^{N-1} + s_2 z^{N-2} - .. + (-1)^N`:
/// ones on the subdiagonal and minus the coefficients in the last column.
pub fn companion_section(p: &SigmaVector) -> GroupElement {
    let n = p.n();
    let mut m = CMatrix::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = real(1.0);
    }
    let sigma_at = |k: usize| -> C64 {
        if k == 0 || k == n {
            real(1.0)
        } else {
            p.values[k - 1]
        }
    };
    for j in 0..n {
        // coefficient of z^j is (-1)^(N-j) sigma_{N-j}
        let sign = if (n - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        m[(j, n - 1)] = -sigma_at(n - j) * sign;
    }
    GroupElement { m }
}

/// Draws one element with the given generator: uniform entries in the
/// complex box, rejection of `|det| < 0.01`, then division by the principal
/// N-th root of the determinant.
pub fn random_group_element_with<R: Rng>(n: usize, rng: &mut R) -> Result<GroupElement> {
    check_size(n)?;
    for _ in 0..DRAW_BUDGET {
        let m = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)));
        let d = det(&m);
        if d.norm() < DET_FLOOR {
            continue;
        }
        let root = d.powf(1.0 / n as f64);
        return Ok(GroupElement { m: m / root });
    }
    Err(Error::RejectionExhausted(DRAW_BUDGET))
}

pub fn random_group_element(n: usize, seed: u64) -> Result<GroupElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_group_element_with(n, &mut rng)
}

/// A random traceless matrix with entries in the complex unit box.
pub fn random_lie_element_with<R: Rng>(n: usize, rng: &mut R) -> Result<LieElement> {
    check_size(n)?;
    let m = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)));
    LieElement::project(&m)
}
