//! Irreducible modules of the subconstituent algebra `T = <A_1, E*_0..E*_D>`.
//!
//! `T` is generated by rational matrices, so the decomposition is carried out
//! over `Q` for every graph: the commutant of `T` is block diagonal with
//! respect to the shells of the base vertex, a random self-adjoint element of
//! its center separates the isotypic components, and each isotypic component
//! is split greedily by closures of vectors from its lowest shell.
//!
//! Module statistics and the cell checks run over any entry type `F`, since
//! the primitive idempotents `E_j` may need the quadratic field.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;
use serde_json::json;
use thiserror::Error;

use crate::graphs::DistanceData;
use crate::linalg::{FieldElem, LinalgError, Mat};
use crate::report::{Check, Tally};
use crate::scheme::{DualData, SchemeData};
use crate::split::{Kind, SplitSystem};
use crate::subspace::Subspace;

/// Largest vertex count accepted by [`decompose`].
pub const EXACT_LIMIT: usize = 64;
/// Number of central elements tried before giving up.
pub const DRAW_BUDGET: usize = 8;

#[derive(Debug, Error)]
pub enum TModuleError {
    #[error("exact decomposition is limited to {cap} vertices, graph has {n}")]
    TooLarge { n: usize, cap: usize },
    #[error("not fully split after {draws} draws: {} modules found, {remaining} dimensions left", partial.len())]
    NotFullySplit {
        draws: usize,
        remaining: usize,
        partial: Vec<Subspace<Rational>>,
    },
    #[error("non-contiguous support: {0}")]
    NonContiguousSupport(String),
    #[error("primitive idempotents are not representable in this entry type")]
    NotRepresentable,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An irreducible `T`-module with its endpoints, diameter and displacements.
#[derive(Clone, Debug)]
pub struct TModule<F> {
    pub basis: Subspace<F>,
    pub rho: usize,
    pub tau: usize,
    pub d: usize,
    pub eta: i64,
    pub zeta: i64,
}

impl<F: FieldElem> TModule<F> {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "dim": self.dim(),
            "rho": self.rho,
            "tau": self.tau,
            "d": self.d,
            "eta": self.eta,
            "zeta": self.zeta,
        })
    }
}

/// Result of [`decompose`].
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub modules: Vec<Subspace<Rational>>,
    /// Central elements drawn, including the successful one.
    pub draws: usize,
    /// Dimension of the commutant of `T`.
    pub commutant_dim: usize,
    /// Dimension of its center, the number of isotypic components.
    pub center_dim: usize,
}

/// Block-diagonal matrix, one square block per shell.
type Blocks = Vec<Mat<Rational>>;

/// `T` acting on a space graded by shells: block sizes and the nonzero
/// off-diagonal and diagonal blocks of `A_1`.
struct GradedOp {
    sizes: Vec<usize>,
    a: BTreeMap<(usize, usize), Mat<Rational>>,
}

impl GradedOp {
    fn from_graph(a1: &Mat<Rational>, shells: &[Vec<usize>]) -> Self {
        let mut a = BTreeMap::new();
        for (i, ri) in shells.iter().enumerate() {
            for (j, rj) in shells.iter().enumerate() {
                if i.abs_diff(j) <= 1 && !ri.is_empty() && !rj.is_empty() {
                    a.insert((i, j), a1.select_rows(ri).select_columns(rj));
                }
            }
        }
        GradedOp {
            sizes: shells.iter().map(Vec::len).collect(),
            a,
        }
    }

    /// The action on `W`, whose basis is grouped by shell in `parts`.
    fn restricted(a1: &Mat<Rational>, parts: &[Mat<Rational>]) -> Result<Self, LinalgError> {
        let n = a1.rows();
        let sizes: Vec<usize> = parts.iter().map(Mat::cols).collect();
        let refs: Vec<&Mat<Rational>> = parts.iter().collect();
        let basis = Mat::hstack_all(n, &refs);
        let x = coordinates_in(&basis, &a1.matmul(&basis)).ok_or(LinalgError::SingularMatrix)?;
        let offsets = prefix(&sizes);
        let mut a = BTreeMap::new();
        for i in 0..sizes.len() {
            for j in 0..sizes.len() {
                if sizes[i] == 0 || sizes[j] == 0 {
                    continue;
                }
                let blk = Mat::from_fn(sizes[i], sizes[j], |r, c| x[(offsets[i] + r, offsets[j] + c)].clone());
                if !blk.is_zero() {
                    a.insert((i, j), blk);
                }
            }
        }
        Ok(GradedOp { sizes, a })
    }

    fn unknowns(&self) -> usize {
        self.sizes.iter().map(|k| k * k).sum()
    }

    /// Basis of `{Y block diagonal : Y A = A Y}`.
    fn commutant(&self) -> Vec<Blocks> {
        let offsets = prefix(&self.sizes.iter().map(|k| k * k).collect::<Vec<_>>());
        let var = |i: usize, r: usize, c: usize| offsets[i] + r * self.sizes[i] + c;
        let mut rows = Vec::new();
        for (&(i, j), blk) in &self.a {
            let (ki, kj) = (self.sizes[i], self.sizes[j]);
            for r in 0..ki {
                for c in 0..kj {
                    let mut row = vec![Rational::new(); self.unknowns()];
                    for t in 0..ki {
                        row[var(i, r, t)] += &blk[(t, c)];
                    }
                    for t in 0..kj {
                        row[var(j, t, c)] -= &blk[(r, t)];
                    }
                    rows.push(row);
                }
            }
        }
        let kernel = if rows.is_empty() {
            Mat::identity(self.unknowns())
        } else {
            Mat::from_rows(rows).kernel()
        };
        (0..kernel.cols())
            .map(|c| {
                self.sizes
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| Mat::from_fn(k, k, |r, s| kernel[(var(i, r, s), c)].clone()))
                    .collect()
            })
            .collect()
    }
}

fn prefix(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    out.push(0);
    for s in sizes {
        acc += s;
        out.push(acc);
    }
    out
}

/// `X` with `basis X = vectors`, or `None` if some column lies outside the span.
fn coordinates_in(basis: &Mat<Rational>, vectors: &Mat<Rational>) -> Option<Mat<Rational>> {
    let w = basis.cols();
    let e = basis.hstack(vectors).rref();
    if e.pivots.len() != w || e.pivots.iter().any(|&p| p >= w) {
        return None;
    }
    Some(Mat::from_fn(w, vectors.cols(), |r, c| e.reduced[(r, w + c)].clone()))
}

fn block_mul(x: &Blocks, y: &Blocks) -> Blocks {
    x.iter().zip(y).map(|(a, b)| a.matmul(b)).collect()
}

fn block_flatten(x: &Blocks) -> Vec<Rational> {
    x.iter().flat_map(|b| b.entries().iter().cloned()).collect()
}

fn block_combination(basis: &[Blocks], coeffs: &[Rational]) -> Blocks {
    let mut out: Blocks = basis[0].iter().map(|b| Mat::zeros(b.rows(), b.cols())).collect();
    for (m, c) in basis.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, b) in out.iter_mut().zip(m) {
            o.add_assign_scaled(b, c);
        }
    }
    out
}

/// Basis of the center of the algebra spanned by `basis`.
fn center(basis: &[Blocks]) -> Vec<Blocks> {
    let r = basis.len();
    let len = basis[0].iter().map(|b| b.rows() * b.cols()).sum::<usize>();
    let mut cols: Vec<Vec<Rational>> = vec![Vec::new(); r];
    for l in 0..r {
        for (k, col) in cols.iter_mut().enumerate() {
            if k == l {
                col.extend(std::iter::repeat(Rational::new()).take(len));
                continue;
            }
            let lhs = block_flatten(&block_mul(&basis[k], &basis[l]));
            let rhs = block_flatten(&block_mul(&basis[l], &basis[k]));
            col.extend(lhs.iter().zip(&rhs).map(|(a, b)| a.minus(b)));
        }
    }
    let system = Mat::from_columns(r * len, &cols);
    let kernel = system.kernel();
    (0..kernel.cols())
        .map(|c| block_combination(basis, &kernel.col(c)))
        .collect()
}

/// Characteristic polynomial, lowest degree first, by Faddeev–LeVerrier.
pub fn charpoly(m: &Mat<Rational>) -> Vec<Rational> {
    let s = m.rows();
    let mut coeffs = vec![Rational::new(); s + 1];
    coeffs[s] = Rational::from(1);
    let mut mk: Mat<Rational> = Mat::zeros(s, s);
    let id: Mat<Rational> = Mat::identity(s);
    for k in 1..=s {
        mk = m.matmul(&mk);
        mk.add_assign_scaled(&id, &coeffs[s + 1 - k]);
        let tr = m.matmul(&mk).trace();
        coeffs[s - k] = -tr / Rational::from(k as i64);
    }
    coeffs
}

fn eval(poly: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::new();
    for c in poly.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Complex roots of a polynomial (lowest degree first) by Durand–Kerner.
fn numeric_roots(poly: &[Rational]) -> Vec<Complex64> {
    let deg = poly.len() - 1;
    let lead = poly[deg].clone();
    let c: Vec<Complex64> = poly.iter().map(|a| Complex64::new((a.clone() / &lead).to_f64(), 0.0)).collect();
    let bound = 1.0 + c[..deg].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(bound, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();
    let p = |x: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * x + a);
    for _ in 0..2000 {
        let mut moved: f64 = 0.0;
        for k in 0..deg {
            let mut den = Complex64::new(1.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    den *= z[k] - zj;
                }
            }
            let step = p(z[k]) / den;
            z[k] -= step;
            moved = moved.max(step.norm() / z[k].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Continued-fraction convergents of `x` with denominators up to `max_den`.
fn convergents(x: f64, max_den: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..40 {
        let a = v.floor();
        if !a.is_finite() || a.abs() > 1e15 {
            break;
        }
        let a = a as i128;
        let h = a * h1 + h0;
        let k = a * k1 + k0;
        if k > max_den as i128 {
            break;
        }
        out.push(Rational::from((h, k)));
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = v - a as f64;
        if frac.abs() < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    out
}

/// The distinct rational roots of `poly`, if it splits into distinct
/// rational linear factors.
fn rational_roots(poly: &[Rational]) -> Option<Vec<Rational>> {
    let deg = poly.len() - 1;
    let mut roots: Vec<Rational> = Vec::new();
    for z in numeric_roots(poly) {
        let exact = convergents(z.re, 1 << 24).into_iter().rev().find(|c| eval(poly, c).is_zero())?;
        if roots.contains(&exact) {
            return None;
        }
        roots.push(exact);
    }
    (roots.len() == deg).then_some(roots)
}

fn shell_coords(dual: &DualData, d: usize) -> Vec<Vec<usize>> {
    (0..=d).map(|i| dual.shell_range(i, i)).collect()
}

fn project<F: FieldElem>(v: &[F], coords: &[usize]) -> Vec<F> {
    let mut out = vec![F::zero(); v.len()];
    for &c in coords {
        out[c] = v[c].clone();
    }
    out
}

/// Smallest subspace containing `seeds` and closed under `A_1` and every `E*_i`.
fn closure(a1: &Mat<Rational>, shells: &[Vec<usize>], seeds: &[Vec<Rational>]) -> Subspace<Rational> {
    let n = a1.rows();
    let split = |vs: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
        vs.iter()
            .flat_map(|v| shells.iter().map(move |s| project(v, s)))
            .filter(|v| v.iter().any(|x| !x.is_zero()))
            .collect()
    };
    let mut w = Subspace::span_of(n, &split(seeds));
    loop {
        let images = a1.matmul(w.basis()).columns();
        let mut all = w.basis().columns();
        all.extend(split(&images));
        let next = Subspace::span_of(n, &all);
        if next.dim() == w.dim() {
            return w;
        }
        w = next;
    }
}

/// Bases of `E*_i W`, one per shell.
fn shell_parts(w: &Subspace<Rational>, shells: &[Vec<usize>]) -> Vec<Mat<Rational>> {
    shells
        .iter()
        .map(|s| w.restrict_to_coordinates(s).into_basis())
        .collect()
}

/// Dimension of the commutant of `T` restricted to the invariant subspace `w`.
fn endomorphism_dim(a1: &Mat<Rational>, shells: &[Vec<usize>], w: &Subspace<Rational>) -> Result<usize, LinalgError> {
    let op = GradedOp::restricted(a1, &shell_parts(w, shells))?;
    Ok(op.commutant().len())
}

/// Splits the invariant subspace `u`, on which the commutant acts as a full
/// matrix algebra over `Q`, into irreducible modules.
fn split_isotypic(
    a1: &Mat<Rational>,
    shells: &[Vec<usize>],
    u: &Subspace<Rational>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Subspace<Rational>>, Vec<Subspace<Rational>>> {
    let mut out = Vec::new();
    let mut rest = u.clone();
    while !rest.is_zero() {
        let low = shells
            .iter()
            .map(|s| rest.restrict_to_coordinates(s))
            .find(|p| !p.is_zero())
            .expect("nonzero invariant subspace meets some shell");
        let basis = low.basis();
        let mut seeds: Vec<Vec<Rational>> = basis.columns().into_iter().take(DRAW_BUDGET).collect();
        while seeds.len() < DRAW_BUDGET {
            let coeffs: Vec<Rational> = (0..basis.cols()).map(|_| Rational::from(rng.gen_range(-5i64..=5))).collect();
            seeds.push(basis.matvec(&coeffs));
        }
        let mut found = None;
        for seed in seeds {
            if seed.iter().all(|x| x.is_zero()) {
                continue;
            }
            let w = closure(a1, shells, &[seed]);
            if endomorphism_dim(a1, shells, &w) == Ok(1) {
                found = Some(w);
                break;
            }
        }
        let Some(w) = found else {
            return Err(out);
        };
        rest = Subspace::orth_complement_within(&w, &rest).map_err(|_| out.clone())?;
        out.push(w);
    }
    Ok(out)
}

/// Decomposes the standard module into irreducible `T`-modules over `Q`.
///
/// Central elements are drawn from `ChaCha8Rng` seeded with `seed + draw`.
/// Modules are returned sorted by their lowest shell, then by basis.
pub fn decompose(dd: &DistanceData, dual: &DualData, seed: u64) -> Result<Decomposition, TModuleError> {
    let n = dd.n();
    if n > EXACT_LIMIT {
        return Err(TModuleError::TooLarge { n, cap: EXACT_LIMIT });
    }
    let d = dd.diameter();
    let a1: Mat<Rational> = dd.distance_matrix(1);
    let shells = shell_coords(dual, d);
    let op = GradedOp::from_graph(&a1, &shells);
    let comm = op.commutant();
    let zbasis = center(&comm);
    let s = zbasis.len();
    let zflat: Vec<Vec<Rational>> = zbasis.iter().map(block_flatten).collect();
    let zmat = Mat::from_columns(zflat[0].len(), &zflat);

    let mut partial = Vec::new();
    for draw in 0..DRAW_BUDGET {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(draw as u64));
        let coeffs: Vec<Rational> = (0..s).map(|_| Rational::from(rng.gen_range(-9i64..=9))).collect();
        let raw = block_combination(&zbasis, &coeffs);
        let half = Rational::from((1, 2));
        let z: Blocks = raw.iter().map(|b| b.add(&b.transpose()).scale(&half)).collect();

        let images: Vec<Vec<Rational>> = zbasis.iter().map(|zb| block_flatten(&block_mul(&z, zb))).collect();
        let Some(regular) = coordinates_in(&zmat, &Mat::from_columns(zmat.rows(), &images)) else {
            continue;
        };
        let Some(roots) = rational_roots(&charpoly(&regular)) else {
            continue;
        };

        let mut isotypic = Vec::new();
        for c in &roots {
            let mut vecs = Vec::new();
            for (i, blk) in z.iter().enumerate() {
                if blk.rows() == 0 {
                    continue;
                }
                let shifted = blk.sub(&Mat::identity(blk.rows()).scale(c));
                let k = shifted.kernel();
                for col in k.columns() {
                    let mut v = vec![Rational::new(); n];
                    for (t, &y) in shells[i].iter().enumerate() {
                        v[y] = col[t].clone();
                    }
                    vecs.push(v);
                }
            }
            isotypic.push(Subspace::span_of(n, &vecs));
        }
        if isotypic.iter().map(Subspace::dim).sum::<usize>() != n {
            continue;
        }

        let mut modules = Vec::new();
        let mut ok = true;
        for u in &isotypic {
            match split_isotypic(&a1, &shells, u, &mut rng) {
                Ok(ws) => modules.extend(ws),
                Err(ws) => {
                    modules.extend(ws);
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            modules.sort_by_key(|w| {
                let low = shells.iter().position(|s| !w.restrict_to_coordinates(s).is_zero());
                (low, w.dim())
            });
            return Ok(Decomposition {
                modules,
                draws: draw + 1,
                commutant_dim: comm.len(),
                center_dim: s,
            });
        }
        if modules.len() > partial.len() {
            partial = modules;
        }
    }
    let found: usize = partial.iter().map(Subspace::dim).sum();
    Err(TModuleError::NotFullySplit {
        draws: DRAW_BUDGET,
        remaining: n - found,
        partial,
    })
}

/// Primitive idempotents `E_0..E_D` in the scheme's ordering.
pub fn idempotents<F: FieldElem>(scheme: &SchemeData, dd: &DistanceData) -> Result<Vec<Mat<F>>, TModuleError> {
    (0..=scheme.diameter())
        .map(|j| scheme.idempotent::<F>(dd, j).ok_or(TModuleError::NotRepresentable))
        .collect()
}

fn support<F: FieldElem>(mut nonzero: impl FnMut(usize) -> bool, d: usize, what: &str) -> Result<(usize, usize), TModuleError> {
    let idx: Vec<usize> = (0..=d).filter(|&i| nonzero(i)).collect();
    let (Some(&lo), Some(&hi)) = (idx.first(), idx.last()) else {
        return Err(TModuleError::NonContiguousSupport(format!("{what} support is empty")));
    };
    if idx.len() != hi - lo + 1 {
        return Err(TModuleError::NonContiguousSupport(format!("{what} support {idx:?}")));
    }
    Ok((lo, hi - lo))
}

/// Endpoint, dual endpoint, diameter and displacements of an irreducible module.
///
/// Fails when either support has a gap, or when the diameter and dual
/// diameter differ; both signal a reducible input.
pub fn module_stats<F: FieldElem>(
    w: &Subspace<Rational>,
    dual: &DualData,
    idem: &[Mat<F>],
) -> Result<TModule<F>, TModuleError> {
    let d_graph = idem.len() - 1;
    let shells = shell_coords(dual, d_graph);
    let basis = Subspace::span(&w.basis().map(F::from_rational));
    let b = basis.basis().clone();
    let (rho, d) = support::<F>(|i| !w.restrict_to_coordinates(&shells[i]).is_zero(), d_graph, "dual")?;
    let (tau, d_dual) = support::<F>(|j| !idem[j].matmul(&b).is_zero(), d_graph, "eigenspace")?;
    if d != d_dual {
        return Err(TModuleError::NonContiguousSupport(format!(
            "diameter {d} differs from dual diameter {d_dual}"
        )));
    }
    let dd = d_graph as i64;
    Ok(TModule {
        basis,
        rho,
        tau,
        d,
        eta: rho as i64 + tau as i64 + d as i64 - dd,
        zeta: rho as i64 - tau as i64,
    })
}

/// The cell `W^{mu nu}_h`.
pub fn module_cell<F: FieldElem>(
    w: &TModule<F>,
    kind: Kind,
    h: usize,
    dual: &DualData,
    idem: &[Mat<F>],
) -> Subspace<F> {
    let (rho, tau, d) = (w.rho, w.tau, w.d);
    let (slo, shi) = match kind.mu {
        crate::split::Dir::Down => (rho, rho + h),
        crate::split::Dir::Up => (rho + d - h, rho + d),
    };
    let (elo, ehi) = match kind.nu {
        crate::split::Dir::Down => (tau, tau + d - h),
        crate::split::Dir::Up => (tau + h, tau + d),
    };
    let star_part = w.basis.restrict_to_coordinates(&dual.shell_range(slo, shi));
    let n = idem[0].rows();
    let mut p: Mat<F> = Mat::zeros(n, n);
    for e in &idem[elo..=ehi] {
        p.add_assign_scaled(e, &F::one());
    }
    let prim_part = Subspace::span(&p.matmul(w.basis.basis()));
    star_part.intersect(&prim_part).expect("same ambient space")
}

/// The tilde cell predicted to contain `W^{mu nu}_h`.
pub fn predicted_cell(kind: Kind, rho: usize, tau: usize, d: usize, h: usize, diameter: usize) -> (usize, usize) {
    use crate::split::Dir::{Down, Up};
    let i = match kind.mu {
        Down => rho + h,
        Up => diameter + h - rho - d,
    };
    let j = match kind.nu {
        Down => tau + d - h,
        Up => diameter - tau - h,
    };
    (i, j)
}

/// Decomposition-level checks: invariance, orthogonality, dimension sum and
/// the irreducibility certificates.
pub fn check_decomposition(dd: &DistanceData, dual: &DualData, modules: &[Subspace<Rational>]) -> Vec<Check> {
    let n = dd.n();
    let a1: Mat<Rational> = dd.distance_matrix(1);
    let shells = shell_coords(dual, dd.diameter());
    let mut checks = Vec::new();

    let mut t = Tally::exact();
    for (k, w) in modules.iter().enumerate() {
        for (c, v) in w.basis().columns().iter().enumerate() {
            if !w.contains_vector(&a1.matvec(v)) {
                t.fail(format!("module {k}: A_1 w_{c} leaves W"));
            }
            for (i, s) in shells.iter().enumerate() {
                if !w.contains_vector(&project(v, s)) {
                    t.fail(format!("module {k}: E*_{i} w_{c} leaves W"));
                }
            }
        }
    }
    checks.push(t.finish("tmodule.invariant", "A_1 W inside W and E*_i W inside W, hence A*_1 W inside W"));

    let mut t = Tally::exact();
    for a in 0..modules.len() {
        for b in a + 1..modules.len() {
            let g = modules[a].basis().conj_transpose().matmul(modules[b].basis());
            t.record_zero(&g, 1.0, || format!("modules {a} and {b} are not orthogonal"));
        }
    }
    checks.push(t.finish("tmodule.orthogonal", "<W, W'> = 0 for distinct summands"));

    let total: usize = modules.iter().map(Subspace::dim).sum();
    checks.push(Check::boolean("tmodule.dimension_sum", "sum dim W = |X|", total == n, || {
        format!("dimensions sum to {total}, expected {n}")
    }));

    let mut t = Tally::exact();
    for (k, w) in modules.iter().enumerate() {
        match endomorphism_dim(&a1, &shells, w) {
            Ok(1) => {}
            Ok(e) => t.fail(format!("module {k}: commutant has dimension {e}")),
            Err(e) => t.fail(format!("module {k}: {e}")),
        }
        for (i, part) in shell_parts(w, &shells).iter().enumerate() {
            if part.cols() == 0 {
                continue;
            }
            let c = closure(&a1, &shells, &[part.col(0)]);
            if c.dim() != w.dim() {
                t.fail(format!("module {k}: closure from E*_{i} W has dimension {}", c.dim()));
            }
        }
    }
    checks.push(t.finish(
        "tmodule.irreducible",
        "End_T(W) = Q, and the T-closure of a vector of each nonzero E*_i W is W",
    ));
    checks
}

/// Support, diameter and bound checks on the computed statistics.
pub fn check_stats<F: FieldElem>(modules: &[TModule<F>], diameter: usize) -> Vec<Check> {
    let dm = diameter as i64;
    let mut t = Tally::exact();
    for (k, w) in modules.iter().enumerate() {
        let (rho, tau, d) = (w.rho as i64, w.tau as i64, w.d as i64);
        let bounds = [
            (rho + d <= dm, "rho+d <= D"),
            (tau + d <= dm, "tau+d <= D"),
            (2 * rho + d >= dm, "2rho+d >= D"),
            (2 * tau + d >= dm, "2tau+d >= D"),
            ((0..=dm).contains(&w.eta), "0 <= eta <= D"),
            ((-dm..=dm).contains(&w.zeta), "-D <= zeta <= D"),
        ];
        for (ok, what) in bounds {
            if !ok {
                t.fail(format!("module {k} ({rho},{tau},{d}): {what} fails"));
            }
        }
    }
    vec![t.finish(
        "tmodule.bounds",
        "rho+d <= D, tau+d <= D, 2rho+d >= D, 2tau+d >= D, 0 <= eta <= D, -D <= zeta <= D",
    )]
}

/// The four families `W^{mu nu}_h`: direct sums and tilde-cell containments,
/// plus the action of `phi_xi` and `psi_xi` on each module.
pub fn check_module_cells<F: FieldElem>(
    modules: &[TModule<F>],
    split: &SplitSystem<F>,
    dual: &DualData,
    idem: &[Mat<F>],
    tol: f64,
) -> Vec<Check> {
    let dm = split.diameter();
    let mut checks = Vec::new();
    for kind in Kind::ALL {
        let grid = split.grid(kind);
        let mut t_sum = Tally::exact();
        let mut t_in = Tally::exact();
        for (k, w) in modules.iter().enumerate() {
            let cells: Vec<Subspace<F>> = (0..=w.d).map(|h| module_cell(w, kind, h, dual, idem)).collect();
            let dims: usize = cells.iter().map(Subspace::dim).sum();
            let span = cells
                .iter()
                .try_fold(Subspace::zero(split.n()), |acc, c| acc.sum(c))
                .expect("same ambient space");
            if dims != w.dim() || span.dim() != w.dim() {
                t_sum.fail(format!("module {k}: cell dims sum to {dims}, span {}, dim W {}", span.dim(), w.dim()));
            }
            for (h, cell) in cells.iter().enumerate() {
                let want = predicted_cell(kind, w.rho, w.tau, w.d, h, dm);
                for i in 0..=dm {
                    for j in 0..=dm {
                        let inside = grid.tilde(i, j).contains(cell);
                        if inside != ((i, j) == want) {
                            t_in.fail(format!(
                                "module {k}, h={h}: containment in ({i},{j}) is {inside}, predicted cell {want:?}"
                            ));
                        }
                    }
                }
            }
        }
        checks.push(t_sum.finish(
            format!("tmodule.cells.{kind}.direct_sum"),
            format!("W = sum_h W^{{{kind}}}_h (direct)"),
        ));
        checks.push(t_in.finish(
            format!("tmodule.cells.{kind}.containment"),
            format!("W^{{{kind}}}_h lies in exactly one tilde cell, the predicted one"),
        ));
    }

    for (name, label, first) in [("phi", "eta", true), ("psi", "zeta", false)] {
        let mut t = Tally::for_elem::<F>(tol);
        for xi in -(dm as i64)..=dm as i64 {
            if first && xi < 0 {
                continue;
            }
            let p = if first { split.phi(xi as usize) } else { split.psi(xi) };
            for (k, w) in modules.iter().enumerate() {
                let b = w.basis.basis();
                let own = if first { w.eta } else { w.zeta };
                let image = p.matmul(b);
                if own == xi {
                    t.record_diff(&image, b, || format!("module {k}: {name}_{xi} is not the identity on W"));
                } else {
                    t.record_zero(&image, b.max_abs(), || format!("module {k}: {name}_{xi} does not annihilate W"));
                }
            }
        }
        checks.push(t.finish(
            format!("tmodule.displacement.{name}_action"),
            format!("{name}_xi W = W if xi is the {label} of W, otherwise 0"),
        ));
    }
    checks
}

/// `rank phi_eta` and `rank psi_zeta` against displacement-sorted dimension sums.
pub fn displacement_cross_check<F: FieldElem>(modules: &[TModule<F>], split: &SplitSystem<F>) -> (Vec<Check>, serde_json::Value) {
    let dm = split.diameter() as i64;
    let mut checks = Vec::new();
    let mut table = serde_json::Map::new();
    for (name, first) in [("phi", true), ("psi", false)] {
        let mut t = Tally::exact();
        let mut ranks = serde_json::Map::new();
        let lo = if first { 0 } else { -dm };
        for xi in lo..=dm {
            let p = if first { split.phi(xi as usize) } else { split.psi(xi) };
            let rank = if F::EXACT { p.rank() } else { p.trace().magnitude().round() as usize };
            let want: usize = modules
                .iter()
                .filter(|w| (if first { w.eta } else { w.zeta }) == xi)
                .map(TModule::dim)
                .sum();
            if rank != want {
                t.fail(format!("rank {name}_{xi} = {rank}, modules give {want}"));
            }
            ranks.insert(xi.to_string(), json!(rank));
        }
        table.insert(name.into(), serde_json::Value::Object(ranks));
        checks.push(t.finish(
            format!("tmodule.displacement.{name}_rank"),
            format!("rank {name}_xi = sum of dim W over modules with displacement xi"),
        ));
    }
    (checks, serde_json::Value::Object(table))
}

/// Output of [`run_suite`].
#[derive(Clone, Debug)]
pub struct SuiteOutput<F> {
    pub checks: Vec<Check>,
    pub modules: Vec<TModule<F>>,
    /// Module inventory and displacement ranks.
    pub table: serde_json::Value,
}

/// Decomposes, computes statistics, and runs every module-level check.
pub fn run_suite<F: FieldElem>(
    scheme: &SchemeData,
    dd: &DistanceData,
    dual: &DualData,
    split: &SplitSystem<F>,
    seed: u64,
    tol: f64,
) -> Result<SuiteOutput<F>, TModuleError> {
    let dec = decompose(dd, dual, seed)?;
    let idem = idempotents::<F>(scheme, dd)?;
    let mut checks = check_decomposition(dd, dual, &dec.modules);

    let mut modules = Vec::new();
    let mut t = Tally::exact();
    for (k, w) in dec.modules.iter().enumerate() {
        match module_stats(w, dual, &idem) {
            Ok(m) => modules.push(m),
            Err(e) => t.fail(format!("module {k}: {e}")),
        }
    }
    checks.push(t.finish(
        "tmodule.support",
        "E*_i W != 0 iff rho <= i <= rho+d, E_j W != 0 iff tau <= j <= tau+d; diameter equals dual diameter",
    ));
    modules.sort_by_key(|m| (m.rho, m.tau, m.d, m.dim()));
    checks.extend(check_stats(&modules, scheme.diameter()));
    checks.extend(check_module_cells(&modules, split, dual, &idem, tol));
    let (rank_checks, ranks) = displacement_cross_check(&modules, split);
    checks.extend(rank_checks);

    let table = json!({
        "modules": modules.iter().map(TModule::to_json).collect::<Vec<_>>(),
        "displacement_ranks": ranks,
        "draws": dec.draws,
        "commutant_dim": dec.commutant_dim,
        "center_dim": dec.center_dim,
    });
    Ok(SuiteOutput { checks, modules, table })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn charpoly_of_companion() {
        // roots 1, -2, 3/2
        let m = Mat::from_rows(vec![
            vec![q(1, 1), q(0, 1), q(0, 1)],
            vec![q(5, 1), q(-2, 1), q(0, 1)],
            vec![q(7, 3), q(1, 1), q(3, 2)],
        ]);
        let p = charpoly(&m);
        let mut roots = rational_roots(&p).unwrap();
        roots.sort();
        assert_eq!(roots, vec![q(-2, 1), q(1, 1), q(3, 2)]);
    }

    #[test]
    fn irrational_roots_are_rejected() {
        assert!(rational_roots(&[q(-2, 1), q(0, 1), q(1, 1)]).is_none());
        assert!(rational_roots(&[q(1, 1), q(-2, 1), q(1, 1)]).is_none());
    }

    #[test]
    fn predicted_cells_of_a_primary_module() {
        assert_eq!(predicted_cell(Kind::DD, 0, 0, 3, 0, 3), (0, 3));
        assert_eq!(predicted_cell(Kind::UU, 0, 0, 3, 0, 3), (0, 3));
        assert_eq!(predicted_cell(Kind::UD, 1, 1, 1, 1, 3), (2, 1));
        assert_eq!(predicted_cell(Kind::DU, 1, 1, 1, 0, 3), (1, 2));
    }
}
