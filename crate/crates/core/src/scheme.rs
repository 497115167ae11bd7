//! The Bose-Mesner algebra of a distance-regular graph and the dual algebra
//! at a base vertex.
//!
//! Every element of the Bose-Mesner algebra is stored by its coordinates in the
//! distance-matrix basis `A_0, ..., A_D`. Products use the intersection numbers
//! `A_h A_k = sum_l p^l_{hk} A_l` and entrywise products are coordinatewise, so
//! all identities can be checked exactly at size `D + 1` and, for small graphs,
//! again on dense `n x n` matrices.

use std::cmp::Ordering;

use rug::{Integer, Rational};

use crate::field::{FieldError, GroundField, Scalar};
use crate::graphs::{DistanceData, IntersectionData};
use crate::linalg::{FieldElem, Mat};
use crate::report::{Check, Tally};

/// Largest vertex count for which dense `n x n` cross-checks run by default.
pub const DENSE_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SchemeError {
    #[error("eigenvalue not in the ground field: {0}")]
    EigenvalueNotInField(String),
    #[error("idempotent property `{property}` fails: {detail}")]
    PropertyViolation { property: String, detail: String },
    #[error("Krein parameter q^{h}_({i},{j}) = {value} is not a nonnegative real")]
    NegativeKrein { h: usize, i: usize, j: usize, value: String },
    #[error("ordering {0:?} is not a Q-polynomial ordering")]
    InvalidOrdering(Vec<usize>),
    #[error("graph has no Q-polynomial ordering")]
    NotQPolynomial,
    #[error("|X|(E_1)_xy is not constant on sphere {0}")]
    NonConstantOnSphere(usize),
    #[error("dual product rule fails for A*_{0} A*_{1}")]
    ProductRuleViolation(usize, usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Integer polynomial, constant term first.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Poly(Vec<Integer>);

impl Poly {
    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn eval(&self, t: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.0.iter().rev() {
            acc *= t;
            acc += c;
        }
        acc
    }

    /// `self * (t - r)`.
    fn mul_linear(&self, r: &Integer) -> Poly {
        let mut out = vec![Integer::new(); self.0.len() + 1];
        for (k, c) in self.0.iter().enumerate() {
            out[k + 1] += c;
            out[k] -= Integer::from(c * r);
        }
        Poly(out)
    }

    /// Exact quotient by a monic divisor.
    fn div_monic(&self, divisor: &[Integer]) -> Poly {
        let dl = divisor.len() - 1;
        let mut rem = self.0.clone();
        let mut quot = vec![Integer::new(); rem.len().saturating_sub(dl)];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dl].clone();
            for (j, d) in divisor.iter().enumerate() {
                rem[k + j] -= Integer::from(&c * d);
            }
            quot[k] = c;
        }
        debug_assert!(rem.iter().all(|c| *c == 0), "inexact polynomial division");
        Poly(quot)
    }

    /// Remainder of division by a monic divisor.
    fn rem_monic(&self, divisor: &[Integer]) -> Vec<Integer> {
        let dl = divisor.len() - 1;
        let mut rem = self.0.clone();
        for k in (0..rem.len().saturating_sub(dl)).rev() {
            let c = rem[k + dl].clone();
            for (j, d) in divisor.iter().enumerate() {
                rem[k + j] -= Integer::from(&c * d);
            }
        }
        rem
    }
}

/// Characteristic polynomial of the tridiagonal matrix with diagonal `a_i`
/// and off-diagonal products `b_{i-1} c_i`.
fn tridiagonal_charpoly(inter: &IntersectionData) -> Poly {
    let d = inter.diameter();
    let mut prev = Poly(vec![Integer::from(1)]);
    let mut cur = prev.mul_linear(&Integer::from(inter.a[0]));
    for k in 1..=d {
        let next_a = cur.mul_linear(&Integer::from(inter.a[k]));
        let w = Integer::from(inter.b[k - 1] * inter.c[k]);
        let mut coeffs = next_a.0;
        for (j, c) in prev.0.iter().enumerate() {
            coeffs[j] -= Integer::from(&w * c);
        }
        prev = cur;
        cur = Poly(coeffs);
    }
    cur
}

/// Eigenvalue shapes found in the characteristic polynomial.
#[derive(Debug, Clone)]
struct RawSpectrum {
    integers: Vec<i64>,
    /// Irreducible factors `t^2 + p t + r`, as `(p, r)`.
    quadratics: Vec<(i64, i64)>,
    leftover_degree: usize,
}

impl RawSpectrum {
    /// Discriminant `p^2 - 4r` of every quadratic factor.
    fn discriminants(&self) -> impl Iterator<Item = i64> + '_ {
        self.quadratics.iter().map(|&(p, r)| p * p - 4 * r)
    }
}

fn raw_spectrum(inter: &IntersectionData) -> RawSpectrum {
    let k = inter.valency() as i64;
    let mut poly = tridiagonal_charpoly(inter);
    let mut integers = Vec::new();
    // eigenvalues are real algebraic integers bounded by the valency
    for t in (-k..=k).rev() {
        let ti = Integer::from(t);
        while poly.degree() > 0 && poly.eval(&ti) == 0 {
            integers.push(t);
            poly = poly.div_monic(&[-ti.clone(), Integer::from(1)]);
        }
    }
    let mut quadratics = Vec::new();
    'search: for p in -2 * k..=2 * k {
        for r in -(k * k)..=k * k {
            if poly.degree() < 2 {
                break 'search;
            }
            let disc = p * p - 4 * r;
            if disc <= 0 || Integer::from(disc).is_perfect_square() {
                continue;
            }
            let divisor = [Integer::from(r), Integer::from(p), Integer::from(1)];
            if poly.rem_monic(&divisor).iter().all(|c| *c == 0) {
                quadratics.push((p, r));
                poly = poly.div_monic(&divisor);
            }
        }
    }
    RawSpectrum {
        integers,
        quadratics,
        leftover_degree: poly.degree(),
    }
}

fn squarefree_part(u: i64) -> i64 {
    let sign = u.signum();
    let mut m = u.abs();
    let mut out = 1;
    let mut p = 2;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= p;
        }
        p += 1;
    }
    sign * out * m
}

/// A value of `b` whose field `Q(sqrt(b))` contains the eigenvalues, or
/// `None` when they are all integers.
pub fn natural_field_b(inter: &IntersectionData) -> Option<i64> {
    raw_spectrum(inter).discriminants().next().map(squarefree_part)
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.cmp0() == Ordering::Less {
        return None;
    }
    let (num, den) = (r.numer(), r.denom());
    if num.is_perfect_square() && den.is_perfect_square() {
        Some(Rational::from((num.clone().sqrt(), den.clone().sqrt())))
    } else {
        None
    }
}

/// Eigenvalues of `A_1` in `field`, sorted by decreasing real value.
pub fn eigenvalues_a1(inter: &IntersectionData, field: &GroundField) -> Result<Vec<Scalar>, SchemeError> {
    let raw = raw_spectrum(inter);
    if raw.leftover_degree > 0 {
        return Err(SchemeError::EigenvalueNotInField(format!(
            "a factor of degree {} has no roots in a quadratic field",
            raw.leftover_degree
        )));
    }
    let mut out: Vec<Scalar> = raw.integers.iter().map(|&t| field.int(t)).collect();
    for &(p, r) in &raw.quadratics {
        // roots -p/2 +- c q with c^2 = (p^2 - 4r) / (4b)
        let disc = p * p - 4 * r;
        let c = rational_sqrt(&Rational::from((disc, 4 * field.b()))).ok_or_else(|| {
            SchemeError::EigenvalueNotInField(format!(
                "sqrt({disc}) is not a rational multiple of q (b = {})",
                field.b()
            ))
        })?;
        let re = Rational::from((-p, 2));
        out.push(field.scalar(re.clone(), c.clone()));
        out.push(field.scalar(re, -c));
    }
    if out.len() != inter.diameter() + 1 {
        return Err(SchemeError::EigenvalueNotInField("repeated eigenvalue".into()));
    }
    out.sort_by(|x, y| {
        let (fx, fy) = (field.to_complex(x).re, field.to_complex(y).re);
        fy.partial_cmp(&fx).unwrap_or(Ordering::Equal)
    });
    Ok(out)
}

/// How the idempotent ordering was chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderingChoice {
    /// The first Q-polynomial ordering that is formally self-dual, else the
    /// first Q-polynomial ordering.
    Auto,
    /// A permutation of `0..=D` (indices into the decreasing eigenvalue list).
    Given(Vec<usize>),
}

/// Bose-Mesner algebra data in a fixed idempotent ordering.
#[derive(Debug, Clone)]
pub struct SchemeData {
    field: GroundField,
    inter: IntersectionData,
    n: usize,
    /// Eigenvalues in decreasing order; `ordering[i]` indexes into it.
    base_theta: Vec<Scalar>,
    ordering: Vec<usize>,
    ordering_source: String,
    qpoly_orderings: Vec<Vec<usize>>,
    theta: Vec<Scalar>,
    /// `E_i = sum_h coeffs[i][h] A_h`.
    coeffs: Vec<Vec<Scalar>>,
    /// `A_h = sum_i eigmat[h][i] E_i`.
    eigmat: Vec<Vec<Scalar>>,
    mult: Vec<usize>,
    krein: Vec<Scalar>,
}

/// Coordinates of a Bose-Mesner element in the `A_h` basis.
pub type BmCoords = Vec<Scalar>;

impl SchemeData {
    pub fn new(
        inter: &IntersectionData,
        n: usize,
        field: &GroundField,
        choice: &OrderingChoice,
    ) -> Result<Self, SchemeError> {
        let d = inter.diameter();
        let base_theta = eigenvalues_a1(inter, field)?;
        let eig = eigen_matrix(inter, field, &base_theta);
        let inv = eig.inverse().map_err(|_| SchemeError::PropertyViolation {
            property: "eigenmatrix invertible".into(),
            detail: "the eigenmatrix is singular".into(),
        })?;
        let base_coeffs: Vec<Vec<Scalar>> = (0..=d)
            .map(|i| (0..=d).map(|h| field.scalar(inv[(i, h)].a0().clone(), inv[(i, h)].a1().clone())).collect())
            .collect();
        let nn = Rational::from(n as i64);
        let base_krein = krein_tensor(&base_coeffs, &eig, &nn, field);
        let qpoly = find_qpoly_orderings(&base_krein, d);
        let self_dual = |ord: &Vec<usize>| first_self_dual_mismatch(&base_krein, inter, ord).is_none();
        let (ordering, source) = match choice {
            OrderingChoice::Given(perm) => {
                let valid = perm.len() == d + 1
                    && perm[0] == 0
                    && {
                        let mut s = perm.clone();
                        s.sort_unstable();
                        s == (0..=d).collect::<Vec<_>>()
                    }
                    && qpoly.contains(perm);
                if !valid {
                    return Err(SchemeError::InvalidOrdering(perm.clone()));
                }
                (perm.clone(), "given".to_string())
            }
            OrderingChoice::Auto => {
                if let Some(o) = qpoly.iter().find(|o| self_dual(o)) {
                    (o.clone(), "self-dual".to_string())
                } else if let Some(o) = qpoly.first() {
                    (o.clone(), "q-polynomial".to_string())
                } else {
                    ((0..=d).collect(), "none".to_string())
                }
            }
        };
        let theta = ordering.iter().map(|&a| base_theta[a].clone()).collect();
        let coeffs: Vec<Vec<Scalar>> = ordering.iter().map(|&a| base_coeffs[a].clone()).collect();
        let eigmat: Vec<Vec<Scalar>> = (0..=d)
            .map(|h| ordering.iter().map(|&a| eig[(h, a)].clone()).collect())
            .collect();
        let mut mult = Vec::with_capacity(d + 1);
        for (i, c) in coeffs.iter().enumerate() {
            let tr = c[0].mul_rational(&nn);
            let m = tr
                .as_rational()
                .filter(|r| r.denom() == &1 && r.cmp0() == Ordering::Greater)
                .and_then(|r| r.numer().to_usize())
                .ok_or_else(|| SchemeError::PropertyViolation {
                    property: "multiplicity".into(),
                    detail: format!("trace(E_{i}) = {tr} is not a positive integer"),
                })?;
            mult.push(m);
        }
        let krein = krein_tensor(&coeffs, &Mat::from_fn(d + 1, d + 1, |h, i| eigmat[h][i].clone()), &nn, field);
        Ok(SchemeData {
            field: field.clone(),
            inter: inter.clone(),
            n,
            base_theta,
            ordering,
            ordering_source: source,
            qpoly_orderings: qpoly,
            theta,
            coeffs,
            eigmat,
            mult,
            krein,
        })
    }

    pub fn field(&self) -> &GroundField {
        &self.field
    }

    pub fn intersection(&self) -> &IntersectionData {
        &self.inter
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diameter(&self) -> usize {
        self.inter.diameter()
    }

    /// `theta_i` in the chosen ordering.
    pub fn theta(&self) -> &[Scalar] {
        &self.theta
    }

    /// All eigenvalues in decreasing order.
    pub fn eigenvalues(&self) -> &[Scalar] {
        &self.base_theta
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.mult
    }

    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }

    /// `self-dual`, `q-polynomial`, `given` or `none`.
    pub fn ordering_source(&self) -> &str {
        &self.ordering_source
    }

    pub fn is_q_polynomial(&self) -> bool {
        self.ordering_source != "none"
    }

    /// Every Q-polynomial ordering, in lexicographic order.
    pub fn qpoly_orderings(&self) -> &[Vec<usize>] {
        &self.qpoly_orderings
    }

    /// Eigenvalue of `A_h` on `E_iV`.
    pub fn eigenmatrix(&self, h: usize, i: usize) -> &Scalar {
        &self.eigmat[h][i]
    }

    pub fn idempotent_coords(&self, i: usize) -> &BmCoords {
        &self.coeffs[i]
    }

    /// `q^h_{ij}` in the chosen ordering.
    pub fn krein(&self, h: usize, i: usize, j: usize) -> &Scalar {
        let s = self.diameter() + 1;
        &self.krein[(h * s + i) * s + j]
    }

    /// True when every idempotent has rational entries.
    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().flatten().all(Scalar::is_rational)
    }

    /// Coordinates of `E_lo + ... + E_hi` (empty range gives zero).
    pub fn idempotent_range(&self, lo: usize, hi: usize) -> BmCoords {
        let mut acc = vec![Scalar::zero(); self.diameter() + 1];
        if lo > hi {
            return acc;
        }
        for i in lo..=hi.min(self.diameter()) {
            for (a, c) in acc.iter_mut().zip(&self.coeffs[i]) {
                *a = &*a + c;
            }
        }
        acc
    }

    /// Dense matrix `sum_h coords[h] A_h`, or `None` if an entry is not
    /// representable in `F`.
    pub fn materialize<F: FieldElem>(&self, dd: &DistanceData, coords: &[Scalar]) -> Option<Mat<F>> {
        let vals: Vec<F> = coords
            .iter()
            .map(|c| F::from_scalar(c, &self.field))
            .collect::<Option<_>>()?;
        Some(Mat::from_fn(self.n, self.n, |x, y| vals[dd.dist(x, y)].clone()))
    }

    pub fn idempotent<F: FieldElem>(&self, dd: &DistanceData, i: usize) -> Option<Mat<F>> {
        self.materialize(dd, &self.coeffs[i])
    }

    /// `A_h A_k` expanded in coordinates.
    pub fn bm_product(&self, x: &[Scalar], y: &[Scalar]) -> BmCoords {
        let d = self.diameter();
        let mut out = vec![Scalar::zero(); d + 1];
        for (h, xh) in x.iter().enumerate() {
            if xh.is_zero() {
                continue;
            }
            for (k, yk) in y.iter().enumerate() {
                if yk.is_zero() {
                    continue;
                }
                let prod = xh * yk;
                for (l, o) in out.iter_mut().enumerate() {
                    let p = self.inter.p(l, h, k);
                    if p != 0 {
                        *o = &*o + &prod.mul_rational(&Rational::from(p as i64));
                    }
                }
            }
        }
        out
    }

    /// `A_1 * x` in coordinates, by the three-term recurrence.
    fn times_a1(&self, x: &[Scalar]) -> BmCoords {
        let d = self.diameter();
        let mut out = vec![Scalar::zero(); d + 1];
        for (h, f) in x.iter().enumerate() {
            let r = |v: usize| Rational::from(v as i64);
            if h > 0 {
                out[h - 1] = &out[h - 1] + &f.mul_rational(&r(self.inter.b[h - 1]));
            }
            out[h] = &out[h] + &f.mul_rational(&r(self.inter.a[h]));
            if h < d {
                out[h + 1] = &out[h + 1] + &f.mul_rational(&r(self.inter.c[h + 1]));
            }
        }
        out
    }

    /// Checks of the idempotent and Krein identities in the coordinate
    /// representation; with `dense`, repeats them on `n x n` matrices built
    /// independently as polynomials in `A_1`.
    pub fn verify(&self, dd: &DistanceData, dense: bool) -> Vec<Check> {
        let d = self.diameter();
        let f = &self.field;
        let n_r = Rational::from(self.n as i64);
        let unit = |h: usize| -> BmCoords {
            (0..=d).map(|k| if k == h { Scalar::one() } else { Scalar::zero() }).collect()
        };
        let mut checks = Vec::new();

        let mut t = Tally::exact();
        let mut sum = vec![Scalar::zero(); d + 1];
        for c in &self.coeffs {
            sum = sum.iter().zip(c).map(|(a, b)| a + b).collect();
        }
        if sum != unit(0) {
            t.fail("coordinates of sum E_i differ from A_0".into());
        }
        checks.push(t.finish("scheme.idempotents_sum_to_identity", "E_0 + ... + E_D = I"));

        let mut t = Tally::exact();
        let inv_n = Scalar::from_rational(Rational::from((1, self.n as i64)));
        if self.coeffs[0].iter().any(|c| c != &inv_n) {
            t.fail("E_0 has an entry other than 1/|X|".into());
        }
        checks.push(t.finish("scheme.trivial_idempotent", "E_0 = |X|^-1 J"));

        let mut t = Tally::exact();
        for i in 0..=d {
            for j in 0..=d {
                let prod = self.bm_product(&self.coeffs[i], &self.coeffs[j]);
                let want = if i == j { self.coeffs[i].clone() } else { vec![Scalar::zero(); d + 1] };
                if prod != want {
                    t.fail(format!("E_{i} E_{j}"));
                }
            }
        }
        checks.push(t.finish("scheme.idempotents_orthogonal", "E_i E_j = delta_ij E_i"));

        let mut t = Tally::exact();
        let mut recon = vec![Scalar::zero(); d + 1];
        for (th, c) in self.theta.iter().zip(&self.coeffs) {
            recon = recon.iter().zip(c).map(|(a, b)| a + &(th * b)).collect();
        }
        if recon != unit(1) {
            t.fail("sum theta_i E_i differs from A_1".into());
        }
        checks.push(t.finish("scheme.spectral_decomposition", "A_1 = sum theta_i E_i"));

        let mut t = Tally::exact();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.iter().any(|x| !x.is_real()) {
                t.fail(format!("E_{i} has a non-real entry"));
            }
        }
        if self.mult.iter().sum::<usize>() != self.n {
            t.fail(format!("multiplicities {:?} do not sum to |X|", self.mult));
        }
        checks.push(t.finish("scheme.idempotents_real_symmetric", "conj(E_i) = E_i = E_i^t, sum m_i = |X|"));

        let mut t = Tally::exact();
        for i in 0..=d {
            let mut poly = unit(0);
            let mut denom = Scalar::one();
            for j in (0..=d).filter(|&j| j != i) {
                let shifted = self.times_a1(&poly);
                poly = shifted.iter().zip(&poly).map(|(a, p)| a - &(&self.theta[j] * p)).collect();
                denom = &denom * &(&self.theta[i] - &self.theta[j]);
            }
            let inv = denom.recip().expect("eigenvalues are distinct");
            let e: BmCoords = poly.iter().map(|p| p * &inv).collect();
            if e != self.coeffs[i] {
                t.fail(format!("E_{i} differs from its Lagrange polynomial in A_1"));
            }
        }
        checks.push(t.finish("scheme.idempotents_are_polynomials_in_a1", "E_i = prod_(j!=i) (A_1 - theta_j I)/(theta_i - theta_j)"));

        let mut t = Tally::exact();
        let mut t_sign = Tally::exact();
        for i in 0..=d {
            for j in 0..=d {
                let had: BmCoords = self.coeffs[i]
                    .iter()
                    .zip(&self.coeffs[j])
                    .map(|(a, b)| (a * b).mul_rational(&n_r))
                    .collect();
                let mut exp = vec![Scalar::zero(); d + 1];
                for h in 0..=d {
                    let qh = self.krein(h, i, j);
                    exp = exp.iter().zip(&self.coeffs[h]).map(|(a, c)| a + &(qh * c)).collect();
                    if !matches!(f.real_sign(qh), Some(Ordering::Greater | Ordering::Equal)) {
                        t_sign.fail(format!("q^{h}_({i},{j}) = {qh}"));
                    }
                }
                if had != exp {
                    t.fail(format!("expansion of E_{i} o E_{j}"));
                }
            }
        }
        checks.push(t.finish("scheme.krein_expansion", "E_i o E_j = |X|^-1 sum_h q^h_ij E_h"));
        checks.push(t_sign.finish("scheme.krein_nonnegative", "q^h_ij real and nonnegative"));

        let mut t = Tally::exact();
        if let Some((h, i, j)) = triangle_violation(&self.krein, d, &(0..=d).collect::<Vec<_>>()) {
            t.fail(format!("triangle condition at (h,i,j) = ({h},{i},{j})"));
        }
        if !self.is_q_polynomial() {
            t.fail("no Q-polynomial ordering exists".into());
        }
        checks.push(t.finish("scheme.q_polynomial", "q^h_ij = 0 (!= 0) when one index exceeds (equals) the sum of the others"));

        if dense {
            checks.extend(self.verify_dense(dd));
        }
        checks
    }

    fn verify_dense(&self, dd: &DistanceData) -> Vec<Check> {
        let d = self.diameter();
        let n = self.n;
        let f = &self.field;
        let lift = |x: &Scalar| f.scalar(x.a0().clone(), x.a1().clone());
        let a1: Mat<Scalar> = dd.distance_matrix::<Rational>(1).map(|r| f.rational(r.clone()));
        let id: Mat<Scalar> = Mat::identity(n);
        let mut es = Vec::new();
        let mut t = Tally::exact();
        for i in 0..=d {
            let mut e = id.clone();
            for j in (0..=d).filter(|&j| j != i) {
                let factor = a1.sub(&id.scale(&self.theta[j]));
                let inv = (&self.theta[i] - &self.theta[j]).recip().expect("distinct eigenvalues");
                e = e.matmul(&factor).scale(&inv);
            }
            let from_coords: Mat<Scalar> = self.idempotent::<Scalar>(dd, i).expect("scalar entries").map(lift);
            t.record_diff(&e, &from_coords, || format!("E_{i}"));
            es.push(e);
        }
        let mut checks = vec![t.finish("scheme.dense.idempotents_match", "dense Lagrange E_i equals the coordinate form")];

        let mut t = Tally::exact();
        let mut sum = Mat::zeros(n, n);
        let mut recon = Mat::zeros(n, n);
        for (i, e) in es.iter().enumerate() {
            sum = sum.add(e);
            recon = recon.add(&e.scale(&self.theta[i]));
            for (j, e2) in es.iter().enumerate() {
                let prod = e.matmul(e2);
                let want = if i == j { e.clone() } else { Mat::zeros(n, n) };
                t.record_diff(&prod, &want, || format!("E_{i} E_{j}"));
            }
            t.record_diff(e, &e.transpose(), || format!("E_{i} symmetric"));
            t.record_diff(e, &e.conj(), || format!("E_{i} real"));
        }
        t.record_diff(&sum, &id, || "sum E_i".into());
        t.record_diff(&recon, &a1, || "sum theta_i E_i".into());
        let j_over_n = Mat::all_ones(n, n).scale(&f.rational(Rational::from((1, n as i64))));
        t.record_diff(&es[0], &j_over_n, || "E_0".into());
        checks.push(t.finish("scheme.dense.idempotent_identities", "E_0 = |X|^-1 J, sum E_i = I, E_iE_j = delta_ij E_i, A_1 = sum theta_i E_i"));

        let mut t = Tally::exact();
        let n_s = f.int(n as i64);
        for i in 0..=d {
            for j in 0..=d {
                let had = es[i].hadamard(&es[j]);
                for h in 0..=d {
                    let tr = had.matmul(&es[h]).trace();
                    let q = (&n_s * &tr).checked_div(&f.int(self.mult[h] as i64)).expect("m_h > 0");
                    if &q != self.krein(h, i, j) {
                        t.fail(format!("trace formula for q^{h}_({i},{j})"));
                    }
                }
            }
        }
        checks.push(t.finish("scheme.dense.krein_trace", "q^h_ij = |X| tr((E_i o E_j) E_h) / m_h"));
        checks
    }

    /// Dual data at base vertex `x`.
    pub fn dual(&self, dd: &DistanceData, x: usize) -> Result<DualData, SchemeError> {
        let d = self.diameter();
        let n_r = Rational::from(self.n as i64);
        let theta_star: Vec<Scalar> = (0..=d).map(|i| self.coeffs[1][i].mul_rational(&n_r)).collect();
        // row x of E_1, read off the distance partition
        let row: Vec<Scalar> = (0..self.n).map(|y| self.coeffs[1][dd.dist(x, y)].mul_rational(&n_r)).collect();
        for i in 0..=d {
            if dd.sphere(x, i).iter().any(|&y| row[y] != theta_star[i]) {
                return Err(SchemeError::NonConstantOnSphere(i));
            }
        }
        Ok(DualData {
            x,
            shell: (0..self.n).map(|y| dd.dist(x, y)).collect(),
            theta_star,
        })
    }
}

fn eigen_matrix(inter: &IntersectionData, field: &GroundField, theta: &[Scalar]) -> Mat<Scalar> {
    let d = inter.diameter();
    let mut m = Mat::zeros(d + 1, d + 1);
    for (l, t) in theta.iter().enumerate() {
        // v_0 = 1, v_1 = t, c_{h+1} v_{h+1} = (t - a_h) v_h - b_{h-1} v_{h-1}
        let mut v = vec![field.int(1)];
        if d >= 1 {
            v.push(t.clone());
        }
        for h in 1..d {
            let next = &(&(t - &field.int(inter.a[h] as i64)) * &v[h]) - &v[h - 1].mul_rational(&Rational::from(inter.b[h - 1] as i64));
            v.push(next.mul_rational(&Rational::from((1, inter.c[h + 1] as i64))));
        }
        for (h, val) in v.into_iter().enumerate() {
            m[(h, l)] = val;
        }
    }
    m
}

/// `q^h_{ij} = |X| sum_k e_i[k] e_j[k] P[k][h]`, flattened as `(h, i, j)`.
fn krein_tensor(coeffs: &[Vec<Scalar>], eig: &Mat<Scalar>, n: &Rational, field: &GroundField) -> Vec<Scalar> {
    let s = coeffs.len();
    let mut out = vec![Scalar::zero(); s * s * s];
    for i in 0..s {
        for j in 0..s {
            for h in 0..s {
                let mut acc = field.int(0);
                for k in 0..s {
                    acc = &acc + &(&(&coeffs[i][k] * &coeffs[j][k]) * &eig[(k, h)]);
                }
                out[(h * s + i) * s + j] = acc.mul_rational(n);
            }
        }
    }
    out
}

/// First `(h, i, j)` (in the relabelled ordering `ord`) violating the
/// Q-polynomial triangle condition.
fn triangle_violation(krein: &[Scalar], d: usize, ord: &[usize]) -> Option<(usize, usize, usize)> {
    let s = d + 1;
    let q = |h: usize, i: usize, j: usize| &krein[(ord[h] * s + ord[i]) * s + ord[j]];
    for h in 0..s {
        for i in 0..s {
            for j in 0..s {
                let max = h.max(i).max(j);
                let rest = h + i + j - max;
                let zero = q(h, i, j).is_zero();
                if (max > rest && !zero) || (max == rest && zero) {
                    return Some((h, i, j));
                }
            }
        }
    }
    None
}

/// Greedy extension from each candidate `E_1`, followed by the full
/// triangle check. Orderings index the decreasing eigenvalue list.
fn find_qpoly_orderings(krein: &[Scalar], d: usize) -> Vec<Vec<usize>> {
    let s = d + 1;
    let q = |h: usize, i: usize, j: usize| &krein[(h * s + i) * s + j];
    let mut found = Vec::new();
    for first in 1..s {
        let mut ord = vec![0, first];
        while ord.len() < s {
            let cur = *ord.last().expect("nonempty");
            let next: Vec<usize> = (0..s)
                .filter(|h| !ord.contains(h) && !q(*h, first, cur).is_zero())
                .collect();
            if next.len() != 1 {
                break;
            }
            ord.push(next[0]);
        }
        if d == 0 {
            ord.truncate(1);
        }
        if ord.len() == s && triangle_violation(krein, d, &ord).is_none() {
            found.push(ord);
        }
    }
    found.sort();
    found
}

fn first_self_dual_mismatch(
    krein: &[Scalar],
    inter: &IntersectionData,
    ord: &[usize],
) -> Option<(usize, usize, usize)> {
    let s = inter.diameter() + 1;
    for h in 0..s {
        for i in 0..s {
            for j in 0..s {
                let q = &krein[(ord[h] * s + ord[i]) * s + ord[j]];
                if q != &Scalar::from_i64(inter.p(h, i, j) as i64) {
                    return Some((h, i, j));
                }
            }
        }
    }
    None
}

/// Compares `q^h_{ij}` with `p^h_{ij}` under the chosen ordering.
pub fn check_self_dual(scheme: &SchemeData) -> Check {
    let ord: Vec<usize> = (0..=scheme.diameter()).collect();
    let s = scheme.diameter() + 1;
    let mut krein = vec![Scalar::zero(); s * s * s];
    for h in 0..s {
        for i in 0..s {
            for j in 0..s {
                krein[(h * s + i) * s + j] = scheme.krein(h, i, j).clone();
            }
        }
    }
    let mismatch = first_self_dual_mismatch(&krein, scheme.intersection(), &ord);
    Check::boolean("scheme.formally_self_dual", "q^h_ij = p^h_ij", mismatch.is_none(), || {
        let (h, i, j) = mismatch.expect("mismatch present");
        format!(
            "first mismatch at (h,i,j) = ({h},{i},{j}): q = {}, p = {}",
            scheme.krein(h, i, j),
            scheme.intersection().p(h, i, j)
        )
    })
}

/// The dual idempotents `E*_i` and dual eigenvalues at a base vertex.
///
/// `E*_i` is the diagonal indicator of the shell at distance `i`, so it is
/// stored as the shell index of every vertex.
#[derive(Debug, Clone)]
pub struct DualData {
    x: usize,
    shell: Vec<usize>,
    theta_star: Vec<Scalar>,
}

impl DualData {
    pub fn base_vertex(&self) -> usize {
        self.x
    }

    pub fn theta_star(&self) -> &[Scalar] {
        &self.theta_star
    }

    /// `d(x, y)` for every vertex `y`.
    pub fn shells(&self) -> &[usize] {
        &self.shell
    }

    /// Vertices `y` with `lo <= d(x, y) <= hi`.
    pub fn shell_range(&self, lo: usize, hi: usize) -> Vec<usize> {
        (0..self.shell.len())
            .filter(|&y| (lo..=hi).contains(&self.shell[y]))
            .collect()
    }

    pub fn shell_sizes(&self) -> Vec<usize> {
        let d = self.theta_star.len() - 1;
        (0..=d).map(|i| self.shell.iter().filter(|&&s| s == i).count()).collect()
    }

    /// Diagonal of `sum_i w_i E*_i`.
    pub fn diagonal(&self, weights: &[Scalar]) -> Vec<Scalar> {
        self.shell.iter().map(|&s| weights[s].clone()).collect()
    }

    /// Diagonal of `A*_1 = sum theta*_i E*_i`.
    pub fn astar1_diagonal(&self) -> Vec<Scalar> {
        self.diagonal(&self.theta_star)
    }

    /// Checks of the dual algebra identities.
    pub fn verify(&self, scheme: &SchemeData) -> Vec<Check> {
        let d = scheme.diameter();
        let n = Rational::from(scheme.n() as i64);
        // (A*_i)_yy = |X| (E_i)_xy depends only on the shell of y
        let astar = |i: usize, shell: usize| scheme.idempotent_coords(i)[shell].mul_rational(&n);
        let mut checks = Vec::new();

        let mut t = Tally::exact();
        for i in 0..=d {
            for j in 0..=d {
                for shell in 0..=d {
                    let lhs = &astar(i, shell) * &astar(j, shell);
                    let mut rhs = Scalar::zero();
                    for h in 0..=d {
                        rhs = &rhs + &(scheme.krein(h, i, j) * &astar(h, shell));
                    }
                    if lhs != rhs {
                        t.fail(format!("A*_{i} A*_{j} on shell {shell}"));
                    }
                }
            }
        }
        checks.push(t.finish("dual.product_rule", "A*_i A*_j = sum_h q^h_ij A*_h"));

        let mut t = Tally::exact();
        if (0..=d).any(|s| astar(0, s) != Scalar::one()) {
            t.fail("A*_0 is not the identity".into());
        }
        let sizes = self.shell_sizes();
        if sizes.iter().sum::<usize>() != scheme.n() || sizes.iter().any(|&s| s == 0) {
            t.fail(format!("shell sizes {sizes:?}"));
        }
        checks.push(t.finish("dual.identity", "A*_0 = I, sum E*_i = I"));

        let mut t = Tally::exact();
        for i in 0..=d {
            for j in 0..i {
                if self.theta_star[i] == self.theta_star[j] {
                    t.fail(format!("theta*_{i} = theta*_{j}"));
                }
            }
            if astar(1, i) != self.theta_star[i] {
                t.fail(format!("A*_1 on shell {i}"));
            }
        }
        checks.push(t.finish("dual.eigenvalues", "A*_1 = sum theta*_i E*_i with distinct theta*_i"));
        checks
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::QSign;
    use crate::graphs::{build_family, GraphSpec};

    fn setup(spec: &str) -> (DistanceData, SchemeData) {
        let g = build_family(&spec.parse::<GraphSpec>().unwrap()).unwrap();
        let dd = DistanceData::new(&g).unwrap();
        let inter = IntersectionData::new(&dd).unwrap();
        let b = natural_field_b(&inter).unwrap_or(1);
        let field = GroundField::new(b, QSign::Plus).unwrap();
        let s = SchemeData::new(&inter, g.n(), &field, &OrderingChoice::Auto).unwrap();
        (dd, s)
    }

    #[test]
    fn cube_spectrum() {
        let (dd, s) = setup("hamming:3,2");
        let th: Vec<String> = s.theta().iter().map(ToString::to_string).collect();
        assert_eq!(th, ["3", "1", "-1", "-3"]);
        assert_eq!(s.multiplicities(), &[1, 3, 3, 1]);
        assert_eq!(s.ordering_source(), "self-dual");
        for c in s.verify(&dd, true) {
            assert!(c.passed(), "{c:?}");
        }
        let dual = s.dual(&dd, 0).unwrap();
        let ts: Vec<String> = dual.theta_star().iter().map(ToString::to_string).collect();
        assert_eq!(ts, ["3", "1", "-1", "-3"]);
        assert!(dual.verify(&s).iter().all(Check::passed));
    }

    #[test]
    fn octagon_needs_sqrt2() {
        let (dd, s) = setup("cycle:8");
        assert_eq!(s.field().b(), 2);
        assert!(!s.is_rational());
        assert!(s.is_q_polynomial());
        for c in s.verify(&dd, true) {
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn charpoly_of_cube() {
        let dd = DistanceData::new(&build_family(&GraphSpec::Hamming { d: 3, q: 2 }).unwrap()).unwrap();
        let inter = IntersectionData::new(&dd).unwrap();
        // (t-3)(t-1)(t+1)(t+3) = t^4 - 10 t^2 + 9
        let p = tridiagonal_charpoly(&inter);
        let want: Vec<Integer> = [9, 0, -10, 0, 1].iter().map(|&v| Integer::from(v)).collect();
        assert_eq!(p.0, want);
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_part(8), 2);
        assert_eq!(squarefree_part(-12), -3);
        assert_eq!(squarefree_part(49), 1);
    }

    #[test]
    fn pentagon_eigenvalues() {
        let dd = DistanceData::new(&build_family(&GraphSpec::Cycle { n: 5 }).unwrap()).unwrap();
        let inter = IntersectionData::new(&dd).unwrap();
        assert_eq!(natural_field_b(&inter), Some(5));
        let field = GroundField::new(5, QSign::Plus).unwrap();
        let theta = eigenvalues_a1(&inter, &field).unwrap();
        let half = Rational::from((1, 2));
        assert_eq!(theta[0], field.int(2));
        assert_eq!(theta[1], field.scalar(-half.clone(), half.clone()));
        assert_eq!(theta[2], field.scalar(-half.clone(), -half));
        let two = GroundField::new(2, QSign::Plus).unwrap();
        assert!(matches!(
            eigenvalues_a1(&inter, &two),
            Err(SchemeError::EigenvalueNotInField(_))
        ));
    }
}
