//! Trace functions and their differentials, classical trace identities, the
//! SL(2) variation function and Goldman brackets, the explicit symplectic
//! forms, and the registry of coordinate volume forms.

use crate::cohomology::{evaluate_matrices, evaluate_with_cocycle, Cocycle, Representation, SurfaceConfig, SurfaceKind, Word};
use crate::error::{Error, Result};
use crate::linalg::{c, det, real, trace, CMatrix, C64};
use crate::mat::{trace_of_product, GroupElement, LieElement};

/// Default lower bound on the modulus of chart denominators.
pub const MARGIN: f64 = 0.1;

fn w(letters: &[i32]) -> Word {
    Word::from(letters)
}

/// `tr rho(w)`.
pub fn t(rho: &Representation, word: &Word) -> Result<C64> {
    rho.trace(word)
}

fn tl(rho: &Representation, letters: &[i32]) -> Result<C64> {
    rho.trace(&w(letters))
}

/// Differential of the trace function of `w` along the tangent vector `u`:
/// `tr(u(w) rho(w))`.
pub fn d_t(rho: &Representation, word: &Word, u: &Cocycle) -> Result<C64> {
    let (g, v) = evaluate_with_cocycle(rho, u, word)?;
    Ok(trace_of_product(v.matrix(), g.matrix()))
}

/// Central-difference derivative of `tr rho_e(w)` with
/// `rho_e(g_i) = (Id + e u_i) rho(g_i)`.
pub fn d_t_central(rho: &Representation, word: &Word, u: &Cocycle, step: f64) -> Result<C64> {
    let n = rho.n();
    let id = CMatrix::identity(n, n);
    let moved = |s: f64| -> Vec<CMatrix> {
        rho.generators()
            .iter()
            .zip(&u.values)
            .map(|(g, v)| (&id + v.matrix() * real(s)) * g.matrix())
            .collect()
    };
    let plus = trace(&evaluate_matrices(&moved(step), word)?);
    let minus = trace(&evaluate_matrices(&moved(-step), word)?);
    Ok((plus - minus) / (2.0 * step))
}

/// Matrix of trace differentials: entry `(i, j)` is `d t_{w_j}(h_i)`.
pub fn trace_jacobian(rho: &Representation, words: &[Word], h: &[Cocycle]) -> Result<CMatrix> {
    let mut out = CMatrix::zeros(h.len(), words.len());
    for (i, u) in h.iter().enumerate() {
        for (j, word) in words.iter().enumerate() {
            out[(i, j)] = d_t(rho, word, u)?;
        }
    }
    Ok(out)
}

/// `|a - b|` relative to `max(1, |a|, |b|)`.
pub fn scaled_residual(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn require_sl2(a: &GroupElement) -> Result<()> {
    if a.n() != 2 {
        return Err(Error::SizeMismatch {
            expected: 2,
            got: a.n(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrickeResiduals {
    /// `tr A tr B = tr AB + tr AB^-1`.
    pub product: f64,
    /// `tr [A,B]` against the polynomial in `tr A, tr B, tr AB`.
    pub commutator: f64,
    pub commutator_trace: C64,
}

/// `t1^2 + t2^2 + t12^2 - t1 t2 t12 - 2`.
pub fn commutator_polynomial(t1: C64, t2: C64, t12: C64) -> C64 {
    t1 * t1 + t2 * t2 + t12 * t12 - t1 * t2 * t12 - real(2.0)
}

pub fn fricke_identity_check(a: &GroupElement, b: &GroupElement) -> Result<FrickeResiduals> {
    require_sl2(a)?;
    require_sl2(b)?;
    let ab = a * b;
    let ab_inv = a * &b.inverse();
    let (t1, t2, t12) = (a.trace(), b.trace(), ab.trace());
    let product = scaled_residual(t1 * t2, t12 + ab_inv.trace());
    let comm = &ab * &(&a.inverse() * &b.inverse());
    let commutator_trace = comm.trace();
    let commutator = scaled_residual(commutator_trace, commutator_polynomial(t1, t2, t12));
    Ok(FrickeResiduals {
        product,
        commutator,
        commutator_trace,
    })
}

/// The coefficients of the quadratic satisfied by `t123` and `t213`.
pub fn f3_quadratic_coefficients(rho: &Representation) -> Result<(C64, C64)> {
    let t1 = tl(rho, &[1])?;
    let t2 = tl(rho, &[2])?;
    let t3 = tl(rho, &[3])?;
    let t12 = tl(rho, &[1, 2])?;
    let t13 = tl(rho, &[1, 3])?;
    let t23 = tl(rho, &[2, 3])?;
    let r = t1 * t23 + t2 * t13 + t3 * t12 - t1 * t2 * t3;
    let s = t1 * t1 + t2 * t2 + t3 * t3 + t12 * t12 + t13 * t13 + t23 * t23 + t12 * t13 * t23
        - t1 * t2 * t12
        - t1 * t3 * t13
        - t2 * t3 * t23
        - real(4.0);
    Ok((r, s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticResiduals {
    pub root_123: f64,
    pub root_213: f64,
    pub sum: f64,
    pub product: f64,
}

impl QuadraticResiduals {
    pub fn max(&self) -> f64 {
        self.root_123.max(self.root_213).max(self.sum).max(self.product)
    }
}

pub fn f3_quadratic_check(rho: &Representation) -> Result<QuadraticResiduals> {
    if rho.n() != 2 || rho.k() != 3 {
        return Err(Error::InvalidArgument("expects a rank-3 representation into SL(2)".into()));
    }
    let (r, s) = f3_quadratic_coefficients(rho)?;
    let z1 = tl(rho, &[1, 2, 3])?;
    let z2 = tl(rho, &[2, 1, 3])?;
    let root = |z: C64| {
        let scale = (z * z).norm().max((r * z).norm()).max(s.norm()).max(1.0);
        (z * z - r * z + s).norm() / scale
    };
    Ok(QuadraticResiduals {
        root_123: root(z1),
        root_213: root(z2),
        sum: scaled_residual(r, z1 + z2),
        product: scaled_residual(s, z1 * z2),
    })
}

/// `T(A) = (tr A / 2) Id - A` on SL(2).
pub fn variation_sl2(a: &GroupElement) -> Result<LieElement> {
    require_sl2(a)?;
    let m = CMatrix::identity(2, 2) * (a.trace() / 2.0) - a.matrix();
    LieElement::new(m)
}

/// `tr(T(A) T(B))`.
pub fn variation_pairing(a: &GroupElement, b: &GroupElement) -> Result<C64> {
    let ta = variation_sl2(a)?;
    let tb = variation_sl2(b)?;
    Ok(trace_of_product(ta.matrix(), tb.matrix()))
}

/// Symplectic forms with an explicit coordinate expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymplecticKey {
    S11Sl2,
    S04Sl2,
    S03RelSl3,
}

impl SymplecticKey {
    pub const ALL: [SymplecticKey; 3] = [SymplecticKey::S11Sl2, SymplecticKey::S04Sl2, SymplecticKey::S03RelSl3];

    pub fn parse(key: &str) -> Result<Self> {
        match key {
            "s11_sl2" => Ok(SymplecticKey::S11Sl2),
            "s04_sl2" => Ok(SymplecticKey::S04Sl2),
            "s03rel_sl3" => Ok(SymplecticKey::S03RelSl3),
            other => Err(Error::UnknownForm(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SymplecticKey::S11Sl2 => "s11_sl2",
            SymplecticKey::S04Sl2 => "s04_sl2",
            SymplecticKey::S03RelSl3 => "s03rel_sl3",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            SymplecticKey::S03RelSl3 => 3,
            _ => 2,
        }
    }

    pub fn surface(&self) -> SurfaceConfig {
        SurfaceConfig::new(match self {
            SymplecticKey::S11Sl2 => SurfaceKind::S11,
            SymplecticKey::S04Sl2 => SurfaceKind::S04,
            SymplecticKey::S03RelSl3 => SurfaceKind::S03Sl3,
        })
    }

    /// The pair of trace functions serving as local coordinates.
    pub fn coordinates(&self) -> (Word, Word) {
        match self {
            SymplecticKey::S11Sl2 => (w(&[1]), w(&[2])),
            SymplecticKey::S04Sl2 => (w(&[1, 2]), w(&[2, 3])),
            SymplecticKey::S03RelSl3 => (w(&[1, -2]), w(&[-1, 2])),
        }
    }

    /// The closed-form coefficient of `dx ^ dy`.
    pub fn closed_form_prefactor(&self, rho: &Representation) -> Result<C64> {
        let denom = self.denominator(rho)?;
        Ok(match self {
            SymplecticKey::S11Sl2 => real(2.0) / denom,
            _ => real(1.0) / denom,
        })
    }

    pub fn denominator(&self, rho: &Representation) -> Result<C64> {
        Ok(match self {
            SymplecticKey::S11Sl2 => tl(rho, &[1, 2])? - tl(rho, &[1, -2])?,
            SymplecticKey::S04Sl2 => tl(rho, &[1, 2, 2, 3])? - tl(rho, &[1, 2, 3, 2])?,
            SymplecticKey::S03RelSl3 => tl(rho, &[2, 1, -2, -1])? - tl(rho, &[1, 2, -1, -2])?,
        })
    }

    pub fn genericity(&self) -> Genericity {
        match self {
            SymplecticKey::S11Sl2 => Genericity::S11Chart,
            SymplecticKey::S04Sl2 => Genericity::S04Chart,
            SymplecticKey::S03RelSl3 => Genericity::Sl3Commutator(1, 2),
        }
    }
}

/// Poisson bracket of the two coordinate functions.
///
/// For SL(2) this is assembled from variation functions at the
/// intersection points of the two curves (sign `+1` at the first point);
/// for the SL(3) pair of pants it is the commutator-trace difference.
pub fn goldman_bracket(rho: &Representation, key: SymplecticKey) -> Result<C64> {
    check_shape(rho, key.n(), key.surface().rank)?;
    match key {
        SymplecticKey::S11Sl2 => {
            let a = rho.generator(0);
            let b = rho.generator(1);
            Ok(-variation_pairing(a, b)?)
        }
        SymplecticKey::S04Sl2 => {
            let l = rho.evaluate(&w(&[1, 2]))?;
            let m = rho.evaluate(&w(&[2, 3]))?;
            // the second intersection point, reached along half of the first curve
            let m_moved = rho.evaluate(&w(&[1, 2, 3, -1]))?;
            Ok(-(variation_pairing(&l, &m)? - variation_pairing(&l, &m_moved)?))
        }
        SymplecticKey::S03RelSl3 => Ok(tl(rho, &[2, 1, -2, -1])? - tl(rho, &[1, 2, -1, -2])?),
    }
}

fn check_shape(rho: &Representation, n: usize, k: usize) -> Result<()> {
    if rho.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: rho.n(),
        });
    }
    if rho.k() != k {
        return Err(Error::SizeMismatch {
            expected: k,
            got: rho.k(),
        });
    }
    Ok(())
}

/// `omega(a, b)` with `omega = -(1/{x,y}) dx ^ dy`.
pub fn symplectic_eval(
    rho: &Representation,
    key: SymplecticKey,
    a: &Cocycle,
    b: &Cocycle,
    margin: f64,
) -> Result<C64> {
    key.genericity().check(rho, margin)?;
    let bracket = goldman_bracket(rho, key)?;
    let (x, y) = key.coordinates();
    let wedge = d_t(rho, &x, a)? * d_t(rho, &y, b)? - d_t(rho, &x, b)? * d_t(rho, &y, a)?;
    Ok(-wedge / bracket)
}

/// Quantities that must stay away from zero for a chart to be usable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Genericity {
    /// `t12 - t1(-2)`.
    S11Chart,
    /// `t1223 - t1232`.
    S04Chart,
    /// `t12i - t21i`, for `i >= 3`.
    TripleBranch(usize),
    /// `t_{i j -i -j} - t_{j i -j -i}` (SL(3) commutator traces).
    Sl3Commutator(usize, usize),
    /// The 2x2 bending determinant attached to the pair `(2, i)`.
    Delta1(usize),
}

impl Genericity {
    pub fn value(&self, rho: &Representation) -> Result<C64> {
        match *self {
            Genericity::S11Chart => Ok(tl(rho, &[1, 2])? - tl(rho, &[1, -2])?),
            Genericity::S04Chart => Ok(tl(rho, &[1, 2, 2, 3])? - tl(rho, &[1, 2, 3, 2])?),
            Genericity::TripleBranch(i) => {
                let i = i as i32;
                Ok(tl(rho, &[1, 2, i])? - tl(rho, &[2, 1, i])?)
            }
            Genericity::Sl3Commutator(i, j) => {
                let (i, j) = (i as i32, j as i32);
                Ok(tl(rho, &[i, j, -i, -j])? - tl(rho, &[j, i, -j, -i])?)
            }
            Genericity::Delta1(i) => delta1(rho, i),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Genericity::S11Chart => "t[1,2]-t[1,-2]".into(),
            Genericity::S04Chart => "t[1,2,2,3]-t[1,2,3,2]".into(),
            Genericity::TripleBranch(i) => format!("t[1,2,{i}]-t[2,1,{i}]"),
            Genericity::Sl3Commutator(i, j) => format!("t[{i},{j},-{i},-{j}]-t[{j},{i},-{j},-{i}]"),
            Genericity::Delta1(i) => format!("delta1[2,{i}]"),
        }
    }

    pub fn check(&self, rho: &Representation, margin: f64) -> Result<()> {
        let value = self.value(rho)?.norm();
        if value > margin {
            Ok(())
        } else {
            Err(Error::MarginViolation {
                name: self.name(),
                value,
                margin,
            })
        }
    }
}

/// `(t_{12i} - t_{1i2})(t_{-1-2-i} - t_{-1-i-2})
///   - (t_{1-2-i} - t_{1-i-2})(t_{-12i} - t_{-1i2})`.
pub fn delta1(rho: &Representation, i: usize) -> Result<C64> {
    let i = i as i32;
    let f = |a: &[i32], b: &[i32]| -> Result<C64> { Ok(tl(rho, a)? - tl(rho, b)?) };
    Ok(f(&[1, 2, i], &[1, i, 2])? * f(&[-1, -2, -i], &[-1, -i, -2])?
        - f(&[1, -2, -i], &[1, -i, -2])? * f(&[-1, 2, i], &[-1, i, 2])?)
}

/// The coordinate volume forms of the registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKey {
    F2Sl2,
    FkSl2(usize),
    F3Sl2,
    F2Sl3,
    FkSl3(usize),
}

impl FormKey {
    pub fn parse(key: &str) -> Result<Self> {
        let unknown = || Error::UnknownForm(key.to_string());
        let rank = |s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(k) if k >= 2 => Ok(k),
                _ => Err(unknown()),
            }
        };
        match key {
            "f2_sl2" => Ok(FormKey::F2Sl2),
            "f3_sl2" => Ok(FormKey::F3Sl2),
            "f2_sl3" => Ok(FormKey::F2Sl3),
            _ => {
                if let Some(k) = key.strip_prefix("fk_sl2:") {
                    Ok(FormKey::FkSl2(rank(k)?))
                } else if let Some(k) = key.strip_prefix("fk_sl3:") {
                    Ok(FormKey::FkSl3(rank(k)?))
                } else {
                    Err(unknown())
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            FormKey::F2Sl2 => "f2_sl2".into(),
            FormKey::FkSl2(k) => format!("fk_sl2:{k}"),
            FormKey::F3Sl2 => "f3_sl2".into(),
            FormKey::F2Sl3 => "f2_sl3".into(),
            FormKey::FkSl3(k) => format!("fk_sl3:{k}"),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            FormKey::F2Sl2 | FormKey::FkSl2(_) | FormKey::F3Sl2 => 2,
            FormKey::F2Sl3 | FormKey::FkSl3(_) => 3,
        }
    }

    pub fn k(&self) -> usize {
        match *self {
            FormKey::F2Sl2 | FormKey::F2Sl3 => 2,
            FormKey::F3Sl2 => 3,
            FormKey::FkSl2(k) | FormKey::FkSl3(k) => k,
        }
    }

    pub fn arity(&self) -> usize {
        let n = self.n();
        (self.k() - 1) * (n * n - 1)
    }

    pub fn coframe(&self) -> Vec<Word> {
        match *self {
            FormKey::F2Sl2 => vec![w(&[1]), w(&[2]), w(&[1, 2])],
            FormKey::F3Sl2 => vec![w(&[1]), w(&[2]), w(&[3]), w(&[1, 2]), w(&[1, 3]), w(&[2, 3])],
            FormKey::FkSl2(k) => {
                let mut out = vec![w(&[1]), w(&[2]), w(&[1, 2])];
                for i in 3..=k as i32 {
                    out.extend([w(&[i]), w(&[1, i]), w(&[2, i])]);
                }
                out
            }
            FormKey::F2Sl3 => vec![
                w(&[1]),
                w(&[-1]),
                w(&[2]),
                w(&[-2]),
                w(&[1, 2]),
                w(&[-1, -2]),
                w(&[1, -2]),
                w(&[-1, 2]),
            ],
            FormKey::FkSl3(k) => {
                let mut out = Vec::new();
                for i in 2..=k as i32 {
                    out.extend([w(&[1, -i]), w(&[-1, i])]);
                    if i == 2 {
                        out.extend([w(&[1]), w(&[-1]), w(&[2]), w(&[-2]), w(&[1, 2]), w(&[-2, -1])]);
                    } else {
                        out.extend([w(&[i]), w(&[-i]), w(&[1, i]), w(&[-i, -1]), w(&[2, i]), w(&[-i, -2])]);
                    }
                }
                out
            }
        }
    }

    pub fn genericity(&self) -> Vec<Genericity> {
        match *self {
            FormKey::F2Sl2 => vec![],
            FormKey::F3Sl2 => vec![Genericity::TripleBranch(3)],
            FormKey::FkSl2(k) => (3..=k).map(Genericity::TripleBranch).collect(),
            FormKey::F2Sl3 => vec![Genericity::Sl3Commutator(1, 2)],
            FormKey::FkSl3(k) => {
                let mut out: Vec<Genericity> = (2..=k).map(|i| Genericity::Sl3Commutator(1, i)).collect();
                out.extend((3..=k).map(Genericity::Delta1));
                out
            }
        }
    }

    /// The scalar multiplying `dt_{w_1} ^ .. ^ dt_{w_m}` over the coframe.
    pub fn prefactor(&self, rho: &Representation) -> Result<C64> {
        check_shape(rho, self.n(), self.k())?;
        let sqrt2 = real(std::f64::consts::SQRT_2);
        let sqrt_m3 = c(0.0, 3f64.sqrt());
        match *self {
            FormKey::F2Sl2 => Ok(sqrt2 * 2.0),
            FormKey::F3Sl2 => Ok(real(4.0) / Genericity::TripleBranch(3).value(rho)?),
            FormKey::FkSl2(k) => {
                let mut p = sqrt2 * 2.0;
                for i in 3..=k {
                    p *= sqrt2 / Genericity::TripleBranch(i).value(rho)?;
                }
                Ok(p)
            }
            FormKey::F2Sl3 => Ok(sqrt_m3 * 3.0 / -Genericity::Sl3Commutator(1, 2).value(rho)?),
            FormKey::FkSl3(k) => {
                // omega_12 ^ nu_1 ^ nu_2 ^ nu_12, then one block per extra generator
                let mut p = sqrt_m3.powu(3) / Genericity::Sl3Commutator(1, 2).value(rho)?;
                for i in 3..=k {
                    let omega = real(1.0) / Genericity::Sl3Commutator(1, i).value(rho)?;
                    p *= omega * sqrt_m3.powu(3) / (delta1(rho, i)? * 3.0);
                }
                Ok(p)
            }
        }
    }
}

/// Value of a registry volume form on an ordered tuple of tangent vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateValue {
    pub prefactor: C64,
    pub determinant: C64,
    pub value: C64,
}

pub fn coordinate_volume(
    rho: &Representation,
    key: FormKey,
    h: &[Cocycle],
    margin: f64,
) -> Result<CoordinateValue> {
    check_shape(rho, key.n(), key.k())?;
    if h.len() != key.arity() {
        return Err(Error::Arity {
            expected: key.arity(),
            got: h.len(),
        });
    }
    for g in key.genericity() {
        g.check(rho, margin)?;
    }
    let prefactor = key.prefactor(rho)?;
    let determinant = det(&trace_jacobian(rho, &key.coframe(), h)?);
    Ok(CoordinateValue {
        prefactor,
        determinant,
        value: prefactor * determinant,
    })
}

/// Result of comparing `d tau_23 ^ d tau_{-2-3}` on the two bendings with
/// the determinant `delta1[2,3]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuDelta {
    pub bending_det: C64,
    pub delta: C64,
    pub residual: f64,
}

/// Bends the third generator by the two elements `x = A - tr(A)/3`,
/// `y = A^-1 - tr(A^-1)/3` commuting with `A = rho(g_1)`.
pub fn nu_delta_check(rho: &Representation, margin: f64) -> Result<NuDelta> {
    check_shape(rho, 3, 3)?;
    Genericity::Delta1(3).check(rho, margin)?;
    let a = rho.generator(0);
    let x = LieElement::project(a.matrix())?;
    let y = LieElement::project(a.inverse().matrix())?;
    let split = w(&[1]);
    let bx = crate::cohomology::bending_cocycle(rho, &[3], &x, &split)?;
    let by = crate::cohomology::bending_cocycle(rho, &[3], &y, &split)?;
    let jac = trace_jacobian(rho, &[w(&[2, 3]), w(&[-2, -3])], &[bx, by])?;
    let bending_det = det(&jac);
    let delta = delta1(rho, 3)?;
    let residual = (bending_det.norm() - delta.norm()).abs() / delta.norm().max(f64::MIN_POSITIVE);
    Ok(NuDelta {
        bending_det,
        delta,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{coboundary, h1_basis_rose, random_representation};
    use crate::linalg::{max_abs, rel_err};
    use crate::mat::random_lie_element_with;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example_pair() -> Representation {
        let a = GroupElement::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]).unwrap();
        let b = GroupElement::from_real_rows(&[&[1.0, 1.0], &[1.0, 2.0]]).unwrap();
        Representation::new(vec![a, b]).unwrap()
    }

    fn random_cocycle(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Cocycle {
        Cocycle::new((0..k).map(|_| random_lie_element_with(n, rng).unwrap()).collect())
    }

    #[test]
    fn traces_of_example_pair() {
        let rho = example_pair();
        assert!(rel_err(t(&rho, &w(&[1, 2])).unwrap(), real(6.0)) < 1e-15);
        assert!(rel_err(t(&rho, &w(&[1, -2])).unwrap(), real(3.0)) < 1e-14);
    }

    #[test]
    fn trace_cyclic_and_inverse_symmetry() {
        let rho = random_representation(2, 3, 1).unwrap();
        let word = w(&[1, 3, -2, 2, 2, -1, 3]);
        let base = t(&rho, &word).unwrap();
        for s in 1..word.len() {
            assert!(rel_err(t(&rho, &word.rotate(s)).unwrap(), base) < 1e-11);
        }
        assert!(rel_err(t(&rho, &word.inverse()).unwrap(), base) < 1e-10);
    }

    #[test]
    fn fricke_on_example_pair() {
        let rho = example_pair();
        let r = fricke_identity_check(rho.generator(0), rho.generator(1)).unwrap();
        assert!(r.product < 1e-14);
        assert!(r.commutator < 1e-14);
        assert!(rel_err(r.commutator_trace, real(-2.0)) < 1e-14);
        // oracle: ABA^-1B^-1 = [[-7, 6], [-6, 5]]
        let comm = rho.evaluate(&w(&[1, 2, -1, -2])).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[real(-7.0), real(6.0), real(-6.0), real(5.0)]);
        assert!(max_abs(&(comm.matrix() - expected)) < 1e-13);
        let id = GroupElement::identity(2).unwrap();
        let r = fricke_identity_check(&id, &id).unwrap();
        assert!(r.product == 0.0 && r.commutator == 0.0);
        assert!(fricke_identity_check(&GroupElement::identity(3).unwrap(), &id).is_err());
    }

    #[test]
    fn quadratic_for_abelian_representation() {
        let d = |x: f64| GroupElement::from_real_rows(&[&[x, 0.0], &[0.0, 1.0 / x]]).unwrap();
        let rho = Representation::new(vec![d(2.0), d(3.0), d(-0.5)]).unwrap();
        let r = f3_quadratic_check(&rho).unwrap();
        assert!(r.max() < 1e-12);
        let (rr, s) = f3_quadratic_coefficients(&rho).unwrap();
        assert!((rr * rr - s * 4.0).norm() < 1e-9);
    }

    #[test]
    fn quadratic_for_random_representation() {
        for seed in 0..10 {
            let rho = random_representation(2, 3, seed).unwrap();
            assert!(f3_quadratic_check(&rho).unwrap().max() < 1e-10);
        }
    }

    #[test]
    fn four_letter_trace_relation() {
        // t1223 - t1232 = -(t12(-3)(-2) - t1(-3))
        for seed in 0..10 {
            let rho = random_representation(2, 3, seed).unwrap();
            let lhs = tl(&rho, &[1, 2, 2, 3]).unwrap() - tl(&rho, &[1, 2, 3, 2]).unwrap();
            let rhs = -(tl(&rho, &[1, 2, -3, -2]).unwrap() - tl(&rho, &[1, -3]).unwrap());
            assert!(scaled_residual(lhs, rhs) < 1e-11);
        }
    }

    #[test]
    fn variation_examples() {
        let rho = example_pair();
        let ta = variation_sl2(rho.generator(0)).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[real(-0.5), real(-1.0), real(-1.0), real(0.5)]);
        assert!(max_abs(&(ta.matrix() - expected)) < 1e-15);
        let p = variation_pairing(rho.generator(0), rho.generator(1)).unwrap();
        assert!(rel_err(p, real(1.5)) < 1e-15);
        let zero = variation_sl2(&GroupElement::identity(2).unwrap()).unwrap();
        assert_eq!(max_abs(zero.matrix()), 0.0);
        // commutes with A
        let a = rho.generator(0);
        assert!(max_abs(&(a.conjugate(ta.matrix()) - ta.matrix())) < 1e-13);
    }

    #[test]
    fn brackets_against_closed_forms() {
        let rho = example_pair();
        let b = goldman_bracket(&rho, SymplecticKey::S11Sl2).unwrap();
        assert!(rel_err(b, real(-1.5)) < 1e-14);
        assert!(rel_err(SymplecticKey::S11Sl2.denominator(&rho).unwrap(), real(3.0)) < 1e-14);
        for seed in 0..10 {
            let rho = random_representation(2, 3, seed).unwrap();
            let b = goldman_bracket(&rho, SymplecticKey::S04Sl2).unwrap();
            let target = SymplecticKey::S04Sl2.denominator(&rho).unwrap();
            assert!(scaled_residual(b, -target) < 1e-10);
            let rho2 = random_representation(2, 2, seed).unwrap();
            let p = -real(1.0) / goldman_bracket(&rho2, SymplecticKey::S11Sl2).unwrap();
            let closed = SymplecticKey::S11Sl2.closed_form_prefactor(&rho2).unwrap();
            assert!(rel_err(p, closed) < 1e-10);
        }
    }

    #[test]
    fn symplectic_form_is_alternating() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_representation(2, 2, 17).unwrap();
        let a = random_cocycle(2, 2, &mut rng);
        let b = random_cocycle(2, 2, &mut rng);
        let key = SymplecticKey::S11Sl2;
        let ab = symplectic_eval(&rho, key, &a, &b, 0.0).unwrap();
        let ba = symplectic_eval(&rho, key, &b, &a, 0.0).unwrap();
        assert!((ab + ba).norm() < 1e-12 * ab.norm().max(1.0));
        assert_eq!(symplectic_eval(&rho, key, &a, &a, 0.0).unwrap().norm(), 0.0);
        assert!(matches!(
            symplectic_eval(&rho, key, &a, &b, 1e12),
            Err(Error::MarginViolation { .. })
        ));
    }

    #[test]
    fn d_t_vanishes_on_coboundaries_and_matches_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_representation(3, 2, 2).unwrap();
        let a = random_lie_element_with(3, &mut rng).unwrap();
        let u = coboundary(&rho, &a);
        for word in [w(&[1]), w(&[1, 2, -1]), w(&[2, 2, -1, 1, -2])] {
            assert!(d_t(&rho, &word, &u).unwrap().norm() < 1e-10);
        }
        let v = random_cocycle(3, 2, &mut rng);
        let word = w(&[1, -2, 1, 2]);
        let exact = d_t(&rho, &word, &v).unwrap();
        let approx = d_t_central(&rho, &word, &v, 1e-5).unwrap();
        assert!(rel_err(exact, approx) < 1e-6);
        let twice = d_t(&rho, &word, &v.scale(real(2.0))).unwrap();
        assert!(rel_err(twice, exact * 2.0) < 1e-13);
    }

    #[test]
    fn registry_keys_and_prefactors() {
        for key in ["f2_sl2", "f3_sl2", "f2_sl3", "fk_sl2:4", "fk_sl3:3"] {
            let k = FormKey::parse(key).unwrap();
            assert_eq!(k.name(), key);
            assert_eq!(k.coframe().len(), k.arity());
        }
        assert!(FormKey::parse("fk_sl2:1").is_err());
        assert!(FormKey::parse("nope").is_err());
        let rho = example_pair();
        assert!(rel_err(FormKey::F2Sl2.prefactor(&rho).unwrap(), real(2.0 * 2f64.sqrt())) < 1e-15);
        let rho3 = random_representation(2, 3, 4).unwrap();
        let p = FormKey::F3Sl2.prefactor(&rho3).unwrap();
        let expected = real(4.0) / (tl(&rho3, &[1, 2, 3]).unwrap() - tl(&rho3, &[2, 1, 3]).unwrap());
        assert!(rel_err(p, expected) < 1e-14);
        let rho_sl3 = random_representation(3, 2, 4).unwrap();
        let p = FormKey::F2Sl3.prefactor(&rho_sl3).unwrap();
        let denom = tl(&rho_sl3, &[2, 1, -2, -1]).unwrap() - tl(&rho_sl3, &[1, 2, -1, -2]).unwrap();
        assert!(rel_err(p, c(0.0, 3.0 * 3f64.sqrt()) / denom) < 1e-14);
    }

    #[test]
    fn coordinate_form_ignores_coboundary_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_representation(2, 3, 12).unwrap();
        let h = h1_basis_rose(&rho).unwrap();
        let base = coordinate_volume(&rho, FormKey::F3Sl2, &h.classes, 0.0).unwrap();
        let mut shifted = h.classes.clone();
        shifted[2] = shifted[2].add(&coboundary(&rho, &random_lie_element_with(2, &mut rng).unwrap()));
        let moved = coordinate_volume(&rho, FormKey::F3Sl2, &shifted, 0.0).unwrap();
        assert!(rel_err(base.value, moved.value) < 1e-9);
        assert!(base.determinant.norm() > 1e-8);
        assert!(matches!(
            coordinate_volume(&rho, FormKey::F3Sl2, &h.classes[..5], 0.0),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn nu_delta_matches_bending_determinant() {
        for seed in 0..5 {
            let rho = random_representation(3, 3, seed).unwrap();
            let r = nu_delta_check(&rho, 0.0).unwrap();
            assert!(r.residual < 1e-7, "{r:?}");
        }
    }
}
